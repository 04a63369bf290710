use advdist::channel::make_params;
use advdist::distill::{
    acceptance_probability, block_rng, bob_error_after_ad, dump_transcripts, run_session, simulate_block,
    TRANSCRIPT_HEADER,
};
use proptest::prelude::*;

fn parse_list(field: &str) -> Vec<usize> {
    field.split(';').map(|x| x.parse().unwrap()).collect()
}

#[test]
fn acceptance_matches_analytic_value_at_one_million_blocks() {
    let params = make_params(2, 0.8).unwrap();
    let pa = acceptance_probability(&params, 2).unwrap();
    assert!((pa - 0.68).abs() < 1e-12);
    let stats = run_session(&params, 2, 1_000_000, 1).unwrap();
    assert!((stats.acceptance_rate - pa).abs() <= 4.0 * stats.acceptance_std_error(pa));
    let pe = bob_error_after_ad(&params, 2).unwrap();
    let rate = stats.bob_error_rate.unwrap();
    assert!((rate - pe).abs() <= 4.0 * stats.bob_error_std_error(pe));
}

#[test]
fn noiseless_session_always_accepts_correctly() {
    let params = make_params(3, 1.0).unwrap();
    let stats = run_session(&params, 4, 5_000, 9).unwrap();
    assert_eq!(stats.blocks_accepted, 5_000);
    assert_eq!(stats.bob_error_rate, Some(0.0));
}

#[test]
fn dumped_transcripts_replay_their_decisions() {
    let params = make_params(3, 0.6).unwrap();
    let mut buf = Vec::new();
    dump_transcripts(&params, 3, 2_000, 5, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(TRANSCRIPT_HEADER));
    let mut count = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 8);
        let announcements = parse_list(f[3]);
        let bob = parse_list(f[4]);
        let diffs: Vec<usize> = bob.iter().zip(&announcements).map(|(y, m)| (y + 3 - m) % 3).collect();
        assert_eq!(diffs, parse_list(f[5]));
        let accepted = diffs.iter().all(|&d| d == diffs[0]);
        assert_eq!(f[6], if accepted { "1" } else { "0" });
        if accepted {
            assert_eq!(f[7].parse::<usize>().unwrap(), diffs[0]);
        } else {
            assert!(f[7].is_empty());
        }
        count += 1;
    }
    assert_eq!(count, 2_000);
}

#[test]
fn sessions_are_reproducible_and_seed_dependent() {
    let params = make_params(2, 0.7).unwrap();
    let a = run_session(&params, 3, 50_000, 11).unwrap();
    let b = run_session(&params, 3, 50_000, 11).unwrap();
    let c = run_session(&params, 3, 50_000, 12).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_simulated_block_is_consistent(n in 2usize..=5, t in 0.0f64..=1.0, block_size in 1usize..=6, seed: u64, index: u64) {
        let params = make_params(n, 1.0 / n as f64 + t * (1.0 - 1.0 / n as f64)).unwrap();
        let block = simulate_block(&params, block_size, &mut block_rng(seed, index)).unwrap();
        prop_assert!(block.is_consistent());
        prop_assert_eq!(block.block_size(), block_size);
        prop_assert!(block.alice_symbols.iter().chain(&block.bob_symbols).all(|&x| x < n));
    }

    #[test]
    fn bob_error_never_grows_with_block_size(n in 2usize..=6, t in 0.01f64..1.0, block_size in 1usize..30) {
        let params = make_params(n, 1.0 / n as f64 + t * (1.0 - 1.0 / n as f64)).unwrap();
        let a = bob_error_after_ad(&params, block_size).unwrap();
        let b = bob_error_after_ad(&params, block_size + 1).unwrap();
        prop_assert!(b <= a + 1e-15);
    }

    #[test]
    fn bob_error_exponent_offset_is_bounded(n in 2usize..=6, t in 0.05f64..0.95) {
        let params = make_params(n, 1.0 / n as f64 + t * (1.0 - 1.0 / n as f64)).unwrap();
        let rate = (params.q() / params.beta0()).ln();
        let offsets: Vec<f64> = (1..=60)
            .map(|k| bob_error_after_ad(&params, k).unwrap().ln() - k as f64 * rate)
            .collect();
        let (lo, hi) = offsets.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
        prop_assert!(hi - lo < (n as f64).ln());
    }
}
