//! Walks one simulated case through every layer by hand: draw a true
//! model, perturb it into a belief model, run all five procedures, and
//! score them exactly.
//!
//! Run with: cargo run --example single_case

use beliefsim::metrics::{self, DecisionThresholds, DprimePooling};
use beliefsim::model::{ChainParameters, Topology};
use beliefsim::noise::{perturb_marginalized, ErrorRange};
use beliefsim::procedures::{evaluate_all, DropRule, Procedure};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let topology = Topology::prototypical();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // The true model: 31 conditional probabilities drawn uniformly.
    let truth = ChainParameters::sample(&mut rng, &topology);
    println!(
        "true model: {} chain entries, prior P(H=T) = {:.4}",
        truth.n_entries(),
        truth.entry(beliefsim::model::VariableId(0), 0)
    );

    // The assessor's beliefs: every entry one clipped-uniform draw away.
    let range = ErrorRange::new(0.6);
    let belief = perturb_marginalized(&truth, range, &mut rng);

    let truth_joint = truth.to_joint();
    let decomposition = truth_joint.decompose(&topology);
    let tables = evaluate_all(
        &Procedure::ALL,
        &belief,
        &topology,
        DropRule::PerObservedValue,
    );

    println!("\nrelative belief in H per evidential state (evidence order ABCD):");
    print!("{:<8} {:>10} {:>12}", "state", "P(state)", "P(H=T|s)");
    for (p, _) in &tables {
        print!(" {:>18}", p.id());
    }
    println!();
    for e in topology.evidential_states() {
        let label: String = (0..topology.n_evidence())
            .map(|j| if e.observed(j) { 'T' } else { 'F' })
            .collect();
        print!(
            "{label:<8} {:>10.5} {:>12.5}",
            decomposition.state_mass(e),
            decomposition.posterior(e).unwrap()
        );
        for (_, table) in &tables {
            print!(" {:>18.5}", table.rb(e));
        }
        println!();
    }

    println!(
        "\nminimum possible mse for this case: {:.5}",
        metrics::min_possible_mse(&decomposition)
    );
    println!(
        "{:<20} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "procedure", "mse", "pe", "pc", "re", "dprime"
    );
    for (p, table) in &tables {
        let record = metrics::evaluate(
            table,
            &decomposition,
            DecisionThresholds::default(),
            DprimePooling::Pooled,
        );
        println!(
            "{:<20} {:>8.4} {:>8.4} {:>8.4} {:>8} {:>8}",
            p.id(),
            record.mse,
            record.pe,
            record.pc,
            record
                .re
                .map(|v| format!("{v:.4}"))
                .unwrap_or_else(|| "-".into()),
            record
                .dprime
                .map(|v| format!("{v:.3}"))
                .unwrap_or_else(|| "-".into()),
        );
    }
}
