//! Counter-style random streams for order-independent case evaluation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One independent stream per (master seed, scenario, range row, case).
/// The four counters are written straight into the ChaCha key, so distinct
/// tuples give independent streams and results never depend on evaluation
/// order or thread scheduling.
pub fn case_stream(
    master_seed: u64,
    scenario_index: u64,
    range_index: u64,
    case_index: u64,
) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&scenario_index.to_le_bytes());
    key[16..24].copy_from_slice(&range_index.to_le_bytes());
    key[24..32].copy_from_slice(&case_index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn first_draws(rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..8).map(|_| rng.random()).collect()
    }

    #[test]
    fn identical_tuples_replay_identically() {
        let a = first_draws(&mut case_stream(42, 1, 2, 3));
        let b = first_draws(&mut case_stream(42, 1, 2, 3));
        assert_eq!(a, b);
    }

    #[test]
    fn each_counter_separates_streams() {
        let base = first_draws(&mut case_stream(42, 1, 2, 3));
        for stream in [
            case_stream(43, 1, 2, 3),
            case_stream(42, 2, 2, 3),
            case_stream(42, 1, 3, 3),
            case_stream(42, 1, 2, 4),
        ] {
            let mut stream = stream;
            assert_ne!(base, first_draws(&mut stream));
        }
    }
}
