use advdist::adversary::{
    attack_error, attack_error_with_announcements, coherent_attack_error, coherent_attack_error_dense,
    coherent_block_states, eve_error_exponent, eve_round_states, incoherent_attack_error, round_fidelity, AttackKind,
};
use advdist::channel::make_params;
use advdist::matcore::{fidelity, inner};

fn interior_grid(n: usize, steps: usize) -> Vec<f64> {
    let floor = 1.0 / n as f64;
    (1..steps).map(|k| floor + k as f64 * (1.0 - floor) / steps as f64).collect()
}

#[test]
fn extremes_for_both_attacks() {
    for n in [2usize, 3] {
        let decoupled = make_params(n, 1.0).unwrap();
        let copied = make_params(n, 1.0 / n as f64).unwrap();
        for kind in AttackKind::ALL {
            for block_size in 1..=3 {
                let e = attack_error(&decoupled, kind, block_size).unwrap().eve_error;
                assert!((e - (n - 1) as f64 / n as f64).abs() < 1e-9, "{kind} n={n} N={block_size}");
                let e = attack_error(&copied, kind, block_size).unwrap().eve_error;
                assert!(e < 1e-9, "{kind} n={n} N={block_size}: {e}");
            }
        }
    }
}

#[test]
fn errors_stay_in_range() {
    for n in [2usize, 3, 4] {
        let bound = (n - 1) as f64 / n as f64;
        for beta0 in interior_grid(n, 6) {
            let params = make_params(n, beta0).unwrap();
            for block_size in 1..=3 {
                for kind in AttackKind::ALL {
                    let e = attack_error(&params, kind, block_size).unwrap().eve_error;
                    assert!((0.0..=bound).contains(&e));
                }
            }
        }
    }
}

#[test]
fn announcement_shift_leaves_errors_unchanged() {
    let cases: [(usize, &[usize]); 5] = [
        (2, &[1, 0, 1]),
        (2, &[1, 1, 1, 0]),
        (3, &[2, 1]),
        (3, &[1, 2, 0]),
        (4, &[3, 1]),
    ];
    for (n, announcements) in cases {
        for beta0 in interior_grid(n, 4) {
            let params = make_params(n, beta0).unwrap();
            let canonical = vec![0; announcements.len()];
            for kind in AttackKind::ALL {
                let a = attack_error_with_announcements(&params, kind, announcements).unwrap();
                let b = attack_error_with_announcements(&params, kind, &canonical).unwrap();
                assert!((a - b).abs() < 1e-9, "{kind} n={n} {announcements:?}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn more_noise_never_helps_alice_and_bob() {
    for n in [2usize, 3] {
        let grid = interior_grid(n, 12);
        for block_size in 1..=4 {
            for kind in AttackKind::ALL {
                let errors: Vec<f64> = grid
                    .iter()
                    .map(|&b| attack_error(&make_params(n, b).unwrap(), kind, block_size).unwrap().eve_error)
                    .collect();
                // grid ascends in β₀, so errors must be nondecreasing
                for w in errors.windows(2) {
                    assert!(w[0] <= w[1] + 1e-9, "{kind} n={n} N={block_size}: {errors:?}");
                }
            }
        }
    }
}

#[test]
fn span_reduction_agrees_with_dense_operators() {
    for (n, max_block) in [(2usize, 4usize), (3, 2)] {
        for beta0 in interior_grid(n, 5) {
            let params = make_params(n, beta0).unwrap();
            for block_size in 1..=max_block {
                let reduced = coherent_attack_error(&params, block_size).unwrap().eve_error;
                let dense = coherent_attack_error_dense(&params, block_size).unwrap();
                assert!((reduced - dense).abs() < 1e-9, "n={n} β₀={beta0} N={block_size}");
            }
        }
    }
}

#[test]
fn single_round_block_is_the_round_state() {
    let params = make_params(3, 0.7).unwrap();
    let round = eve_round_states(&params, 0).unwrap();
    let block = coherent_block_states(&params, 1).unwrap();
    for (h, b) in round.hypotheses.iter().zip(&block) {
        let d = b.block_state.density().unwrap();
        assert!(d.matrix().max_abs_diff(h.state.matrix()) < 1e-12);
        assert!((b.prior - 1.0 / 3.0).abs() < 1e-15);
    }
}

#[test]
fn block_fidelity_is_round_fidelity_to_the_n() {
    for n in [2usize, 3] {
        for beta0 in interior_grid(n, 4) {
            let params = make_params(n, beta0).unwrap();
            let f = round_fidelity(&params).unwrap();
            let (b, q) = (params.beta0(), params.q());
            for block_size in 1..=3 {
                let hyps = coherent_block_states(&params, block_size).unwrap();
                // Bob-correct branch: a product of per-round vectors
                let correct = |h: usize| {
                    let c = hyps[h].block_state.components();
                    c.iter().find(|c| c.0 == 0).unwrap().2.clone()
                };
                let pure = inner(&correct(0), &correct(1)).norm();
                assert!((pure - f.powi(block_size as i32)).abs() < 1e-8);
                // error branches are orthogonal across hypotheses, so only the
                // Bob-correct weight survives in the mixed-state fidelity
                let weight = b.powi(block_size as i32)
                    / (b.powi(block_size as i32) + (n - 1) as f64 * q.powi(block_size as i32));
                let full = fidelity(
                    &hyps[0].block_state.density().unwrap(),
                    &hyps[1].block_state.density().unwrap(),
                )
                .unwrap();
                assert!((full - weight * f.powi(block_size as i32)).abs() < 1e-8, "n={n} β₀={beta0} N={block_size}");
            }
        }
    }
}

#[test]
fn round_fidelity_fixture() {
    // λ/β₀ at n = 2, β₀ = 0.75
    let f = round_fidelity(&make_params(2, 0.75).unwrap()).unwrap();
    assert!((f - 2.0 / 3.0).abs() < 1e-12);
    let ens = eve_round_states(&make_params(2, 0.75).unwrap(), 0).unwrap();
    let mixed = fidelity(&ens.hypotheses[0].state, &ens.hypotheses[1].state).unwrap();
    assert!(mixed > 0.0 && mixed < 1.0);
    assert!((mixed - 0.5).abs() < 1e-9);
}

#[test]
fn attack_regression_fixtures() {
    let params = make_params(2, 0.75).unwrap();
    let inc = incoherent_attack_error(&params, 4).unwrap();
    let coh = coherent_attack_error(&params, 4).unwrap();
    assert!((inc.eve_error - 0.043_961_931_356_748).abs() < 1e-9);
    assert!((coh.eve_error - 0.009_731_523_631_578).abs() < 1e-9);
    assert!(coh.eve_error <= inc.eve_error);
    assert_eq!((inc.dims_used, coh.dims_used), (4, 256));
}

#[test]
fn coherent_slope_tracks_twice_log_fidelity() {
    for beta0 in [0.7236, 0.75, 0.8, 0.9] {
        let params = make_params(2, beta0).unwrap();
        let slope = eve_error_exponent(&params, AttackKind::Coherent, 6).unwrap();
        let target = 2.0 * round_fidelity(&params).unwrap().ln();
        assert!((slope - target).abs() < 0.05, "β₀ = {beta0}: {slope} vs {target}");
    }
}

#[test]
fn incoherent_slope_at_the_incoherent_threshold() {
    let params = make_params(2, 2.0 / 3.0).unwrap();
    let slope = eve_error_exponent(&params, AttackKind::Incoherent, 6).unwrap();
    assert!((slope + 2f64.ln()).abs() < 0.05, "{slope}");
}

#[test]
fn noiseless_exponent_is_flat() {
    let params = make_params(3, 1.0).unwrap();
    for kind in AttackKind::ALL {
        assert!(eve_error_exponent(&params, kind, 4).unwrap().abs() < 1e-12);
    }
}
