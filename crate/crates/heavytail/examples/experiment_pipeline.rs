//! The JSON experiment pipeline, driven as a library.
//!
//! Everything the `heavytail` binary does is available programmatically: load
//! a config, validate it, and run the tail / diagnose / check stages on it.
//! This example loads the shipped alternating-power-tails config, tightens
//! its budgets for a quick run, and walks all three stages.
//!
//! Run with: cargo run --example experiment_pipeline

use std::path::Path;

use heavytail::cli::{diagnose_components, run_check, tail_rows, TheoremId};
use heavytail::{ExperimentConfig, Verdict};

fn main() -> heavytail::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/example2.json");
    let mut config = ExperimentConfig::load(&path)?;
    println!("loaded {} (schema v{})", config.experiment_id, config.schema_version);

    // Shrink the Monte Carlo budget for an interactive run; 0 would skip the
    // cross-check entirely.
    config.mc.samples = 500_000;
    let config = config.validated()?;

    let (rows, exit_code) = tail_rows(&config)?;
    assert_eq!(exit_code, 0, "series must converge for this config");
    println!("\n{}", heavytail::TAIL_CSV_HEADER);
    for row in &rows {
        println!(
            "{},{},{},{:.6e},{:.6e},{:.6e},{},{}",
            row.experiment_id, row.functional, row.x, row.lower, row.estimate, row.upper,
            row.method, row.seed
        );
    }

    println!();
    for component in diagnose_components(&config)? {
        let passes: Vec<&str> = component
            .diagnosis
            .class_rows()
            .iter()
            .filter(|(_, _, verdict)| *verdict == Verdict::Pass)
            .map(|(class, _, _)| *class)
            .collect();
        println!(
            "component {} ({:?}): classes passed: {}",
            component.index,
            component.law,
            passes.join(", ")
        );
    }

    let report = run_check(&config, TheoremId::Theorem5)?;
    println!("\ntheorem 5 hypotheses: {}", report.overall.label());
    assert_eq!(report.overall, Verdict::Pass);
    Ok(())
}
