//! Calibration error without true probabilities: the belief chain is
//! primary, and the "effective truth" is the proportion of true
//! propositions at each belief level, one error-window draw away. At
//! range 0 the assessor is perfectly calibrated and the scenario
//! coincides with the prototypical one.
//!
//! Run with: cargo run --example frequency_calibration

use beliefsim::harness::{run_sweep, Scenario, ScenarioConfig};
use beliefsim::report::{render_table, MetricId, TableFormat};
use beliefsim::Procedure;

fn main() {
    let mut config = ScenarioConfig::new(Scenario::Frequency);
    config.master_seed = 42;
    let frequency = run_sweep(&config).expect("default configuration is valid");
    println!(
        "{}",
        render_table(&frequency, MetricId::Re, TableFormat::Markdown)
    );

    let mut config = ScenarioConfig::new(Scenario::Prototypical);
    config.master_seed = 42;
    config.ranges = vec![0.0];
    let prototypical = run_sweep(&config).unwrap();

    println!("range-0 check (perfect calibration reduces both regimes to truth = belief):");
    for p in [Procedure::ProperBayes, Procedure::StrongLinear] {
        println!(
            "  {}: frequency re {:.3} vs prototypical re {:.3}",
            p.id(),
            frequency.rows[0].cell(p).unwrap().re_aggregate.value,
            prototypical.rows[0].cell(p).unwrap().re_aggregate.value,
        );
    }
}
