//! Why the three error measures disagree: the distribution of relative
//! belief under H=T vs H=F, pooled over a sweep's cases. The exact
//! posterior separates the conditions further apart (higher sensitivity)
//! but spreads wide; the deadbanded vote counter huddles around 0.5, so
//! the decision thresholds sit far out on its tails.
//!
//! Run with: cargo run --example belief_histograms

use beliefsim::harness::{histogram_data, Scenario, ScenarioConfig};
use beliefsim::report::render_histogram_csv;
use beliefsim::Procedure;

fn main() {
    let mut config = ScenarioConfig::new(Scenario::Prototypical);
    config.master_seed = 42;
    config.ranges = vec![1.0];

    for procedure in [Procedure::ProperBayes, Procedure::StrongLinear] {
        let histogram = histogram_data(&config, 0, procedure).unwrap();
        println!("-- {} at error range {:.1} --", procedure.id(), histogram.range);
        println!("{}", render_histogram_csv(&histogram));

        let (mean_true, var_true) = histogram.moments(true);
        let (mean_false, var_false) = histogram.moments(false);
        println!(
            "mean rb: {mean_true:.3} given H=T vs {mean_false:.3} given H=F; sd {:.3} / {:.3}\n",
            var_true.sqrt(),
            var_false.sqrt()
        );
    }
}
