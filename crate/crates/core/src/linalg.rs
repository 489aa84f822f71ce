//! Dense linear algebra for desk-scale graphs.

use crate::error::CentralityError;
use crate::scalar::Scalar;

/// Largest system solved by the dense LU path.
pub const DENSE_LIMIT: usize = 512;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<W> {
    n: usize,
    data: Vec<W>,
}

impl<W: Scalar> Matrix<W> {
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix {
            n,
            data: vec![W::zero(); n * n],
        };
        for i in 0..n {
            m.data[i * n + i] = W::one();
        }
        m
    }

    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![W::zero(); n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &W {
        &self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: W) {
        self.data[r * self.n + c] = value;
    }

    pub fn add_to(&mut self, r: usize, c: usize, value: W) {
        let slot = &mut self.data[r * self.n + c];
        *slot = slot.clone() + value;
    }

    pub fn mul_vec(&self, x: &[W]) -> Vec<W> {
        (0..self.n)
            .map(|r| {
                self.data[r * self.n..(r + 1) * self.n]
                    .iter()
                    .zip(x)
                    .fold(W::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }
}

/// LU factorization with row pivoting. Floats pivot on the largest magnitude;
/// exact rationals take the first non-zero entry.
#[derive(Debug, Clone)]
pub struct Lu<W> {
    n: usize,
    lu: Vec<W>,
    perm: Vec<usize>,
}

impl<W: Scalar> Lu<W> {
    pub fn factor(m: &Matrix<W>) -> Result<Self, CentralityError> {
        let n = m.n;
        if n > DENSE_LIMIT {
            return Err(CentralityError::TooLarge {
                nodes: n,
                limit: DENSE_LIMIT,
            });
        }
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot_row = if W::EXACT {
                (k..n).find(|&r| !lu[r * n + k].is_zero())
            } else {
                (k..n)
                    .filter(|&r| !lu[r * n + k].is_zero())
                    .max_by(|&a, &b| {
                        lu[a * n + k]
                            .abs()
                            .partial_cmp(&lu[b * n + k].abs())
                            .unwrap_or(std::cmp::Ordering::Equal)
                    })
            };
            let p = pivot_row.ok_or(CentralityError::Singular)?;
            if !W::EXACT && lu[p * n + k].abs().to_f64() < 1e-300 {
                return Err(CentralityError::Singular);
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k].clone();
            for r in k + 1..n {
                if lu[r * n + k].is_zero() {
                    continue;
                }
                let factor = lu[r * n + k].clone() / pivot.clone();
                for c in k + 1..n {
                    if lu[k * n + c].is_zero() {
                        continue;
                    }
                    let delta = factor.clone() * lu[k * n + c].clone();
                    lu[r * n + c] = lu[r * n + c].clone() - delta;
                }
                lu[r * n + k] = factor;
            }
        }
        Ok(Lu { n, lu, perm })
    }

    pub fn solve(&self, rhs: &[W]) -> Vec<W> {
        let n = self.n;
        let mut x: Vec<W> = self.perm.iter().map(|&p| rhs[p].clone()).collect();
        for r in 0..n {
            let mut acc = x[r].clone();
            for c in 0..r {
                if !self.lu[r * n + c].is_zero() {
                    acc = acc - self.lu[r * n + c].clone() * x[c].clone();
                }
            }
            x[r] = acc;
        }
        for r in (0..n).rev() {
            let mut acc = x[r].clone();
            for c in r + 1..n {
                if !self.lu[r * n + c].is_zero() {
                    acc = acc - self.lu[r * n + c].clone() * x[c].clone();
                }
            }
            x[r] = acc / self.lu[r * n + r].clone();
        }
        x
    }
}

/// Solves `m x = rhs`. Exact for rationals; floats get two rounds of
/// iterative refinement.
pub fn solve<W: Scalar>(m: &Matrix<W>, rhs: &[W]) -> Result<Vec<W>, CentralityError> {
    let lu = Lu::factor(m)?;
    let mut x = lu.solve(rhs);
    if !W::EXACT {
        for _ in 0..2 {
            let ax = m.mul_vec(&x);
            let r: Vec<W> = rhs.iter().zip(&ax).map(|(b, a)| b.clone() - a.clone()).collect();
            let d = lu.solve(&r);
            for (xi, di) in x.iter_mut().zip(d) {
                *xi = xi.clone() + di;
            }
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn solves_small_float_system() {
        let mut m = Matrix::<f64>::zeros(2);
        m.set(0, 0, 0.0);
        m.set(0, 1, 2.0);
        m.set(1, 0, 3.0);
        m.set(1, 1, 1.0);
        let x = solve(&m, &[4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn solves_exactly_in_rationals() {
        let q = |p, d| Rational::from_ratio(p, d);
        let mut m = Matrix::<Rational>::identity(3);
        m.set(0, 1, q(1, 3));
        m.set(2, 0, q(-1, 7));
        let rhs = vec![q(1, 1), q(2, 1), q(0, 1)];
        let x = solve(&m, &rhs).unwrap();
        assert_eq!(m.mul_vec(&x), rhs);
        assert_eq!(x[0], q(1, 3));
    }

    #[test]
    fn singular_is_reported() {
        let m = Matrix::<f64>::zeros(2);
        assert_eq!(solve(&m, &[1.0, 1.0]), Err(CentralityError::Singular));
    }

    #[test]
    fn size_limit() {
        let m = Matrix::<f64>::identity(DENSE_LIMIT + 1);
        assert!(matches!(Lu::factor(&m), Err(CentralityError::TooLarge { .. })));
    }
}
