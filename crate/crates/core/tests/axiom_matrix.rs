use feedcent::axioms::{
    default_measures, satisfaction_matrix, AxiomId, CellStatus, MatrixConfig, NcVariant,
};
use feedcent::Measure;

#[test]
fn matrix_matches_reference_pattern() {
    let config = MatrixConfig::default();
    let report = satisfaction_matrix(&default_measures(), &AxiomId::ALL, &config).unwrap();
    for c in &report.cells {
        println!(
            "{:<14} {:<4} {:<8} admissible={:<4} skipped={:<4} failures={:<4} dev={:.3e}",
            c.measure.to_string(),
            c.axiom.tag(),
            c.status.to_string(),
            c.admissible,
            c.skipped,
            c.failures,
            c.max_deviation
        );
        if let Some(w) = &c.witness {
            println!("{}", w.shrunk);
        }
    }
    for c in &report.cells {
        if c.status != CellStatus::Skipped {
            assert!(c.admissible >= config.trials, "{} {}: {}", c.measure, c.axiom, c.admissible);
        }
        if c.status == CellStatus::Fail {
            assert!(c.witness.is_some());
        }
    }
    let bad: Vec<String> = report
        .mismatches()
        .iter()
        .map(|c| format!("{} {} {}", c.measure, c.axiom, c.status))
        .collect();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn nc_variants() {
    let config = MatrixConfig { trials: 100, max_attempts: 1000, ..MatrixConfig::default() };
    let axioms = [
        AxiomId::NodeCombination(NcVariant::SemiOutRegular),
        AxiomId::NodeCombination(NcVariant::Unconstrained),
    ];
    let report = satisfaction_matrix(&[Measure::Katz(0.1), Measure::PageRank(0.85)], &axioms, &config).unwrap();
    for c in &report.cells {
        println!("{} {} {} {} {:.3e}", c.measure, c.axiom, c.status, c.admissible, c.max_deviation);
    }
    let sor = |m: Measure| report.cell(&m, axioms[0]).unwrap().status;
    assert_eq!(sor(Measure::Katz(0.1)), CellStatus::Pass);
    assert_eq!(sor(Measure::PageRank(0.85)), CellStatus::Pass);
    assert_eq!(report.cell(&Measure::Katz(0.1), axioms[1]).unwrap().status, CellStatus::Pass);
    assert_eq!(report.cell(&Measure::PageRank(0.85), axioms[1]).unwrap().status, CellStatus::Fail);
}
