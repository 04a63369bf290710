//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use advdist::adversary::{coherent_attack_error, incoherent_attack_error, AttackKind};
use advdist::channel::{make_params, purify};
use advdist::distill::{acceptance_probability, bob_error_after_ad, dump_transcripts, run_session};
use advdist::matcore::{
    discrimination_error, fidelity, helstrom_error, kron, random_density_operator, random_pure_state,
    square_root_measurement, ComplexMatrix, DensityOperator,
};
use advdist::thresholds::{
    figure_table, find_threshold_numeric, quantum_distillability_threshold, threshold_coherent_closed,
    threshold_incoherent_closed,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel_err(x: f64, reference: f64) -> f64 {
    ((x - reference) / reference).abs()
}

fn closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [2usize, 5, 25] {
        let nf = n as f64;
        worst = worst.max(rel_err(threshold_incoherent_closed(n), 2.0 / (nf + 1.0)));
        let coh = 2.0 / (2.0 + (3.0 - 5f64.sqrt()) * (nf - 1.0));
        worst = worst.max(rel_err(threshold_coherent_closed(n), coh));
    }
    let six = format!(
        "{:.6}/{:.6}",
        threshold_incoherent_closed(2),
        threshold_coherent_closed(2)
    );
    let table = match figure_table(2, 25, false) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("figure_table failed: {e}")),
    };
    let ordered = table.len() == 24 && table.iter().all(|r| r.beta_coh_closed > r.beta_inc_closed);
    outcome(
        worst <= 1e-12 && six == "0.666667/0.723607" && ordered,
        format!("max relative error {worst:.2e}, n=2 values {six}, coherent above incoherent for n=2..25: {ordered}"),
    )
}

fn quantum_coincidence() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=25 {
        match quantum_distillability_threshold(n) {
            Ok(b) => worst = worst.max((b - threshold_incoherent_closed(n)).abs()),
            Err(e) => return outcome(false, format!("n = {n}: {e}")),
        }
    }
    outcome(worst <= 1e-10, format!("max |quantum − incoherent| over n=2..25: {worst:.2e}"))
}

fn numeric_threshold(n: usize, kind: AttackKind, n_max: usize, target: f64, tol: f64) -> (bool, String) {
    match find_threshold_numeric(n, kind, n_max, 1e-3) {
        Ok(b) => (
            (b - target).abs() <= tol,
            format!("n={n} N_max={n_max}: {b:.4} vs {target:.4} ± {tol}"),
        ),
        Err(e) => (false, format!("n={n}: {e}")),
    }
}

fn numeric_incoherent() -> Outcome {
    let results: Vec<(bool, String)> = [2usize, 3]
        .iter()
        .map(|&n| numeric_threshold(n, AttackKind::Incoherent, 6, threshold_incoherent_closed(n), 0.01))
        .collect();
    outcome(
        results.iter().all(|r| r.0),
        results.iter().map(|r| r.1.as_str()).collect::<Vec<_>>().join("; "),
    )
}

fn numeric_coherent() -> Outcome {
    let results = [
        numeric_threshold(2, AttackKind::Coherent, 6, 0.7236, 0.01),
        numeric_threshold(3, AttackKind::Coherent, 4, 0.5669, 0.015),
    ];
    outcome(
        results.iter().all(|r| r.0),
        results.iter().map(|r| r.1.as_str()).collect::<Vec<_>>().join("; "),
    )
}

fn dominance() -> Outcome {
    let mut violations = 0;
    let mut points = 0;
    let mut details = Vec::new();
    for n in [2usize, 3] {
        let floor = 1.0 / n as f64;
        let mut strict = 0;
        for k in 1..=9 {
            let beta0 = floor + k as f64 * (1.0 - floor) / 10.0;
            let params = make_params(n, beta0).unwrap();
            for block_size in 1..=5 {
                let (inc, coh) = match (
                    incoherent_attack_error(&params, block_size),
                    coherent_attack_error(&params, block_size),
                ) {
                    (Ok(i), Ok(c)) => (i.eve_error, c.eve_error),
                    (Err(e), _) | (_, Err(e)) => {
                        return outcome(false, format!("n={n} β₀={beta0:.3} N={block_size}: {e}"))
                    }
                };
                points += 1;
                if coh > inc + 1e-9 {
                    violations += 1;
                }
                if coh < inc - 1e-9 {
                    strict += 1;
                }
            }
        }
        details.push(format!("n={n}: {strict} strict"));
        if strict == 0 {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("{points} grid points, {violations} violations, {}", details.join(", ")),
    )
}

fn simulation() -> Outcome {
    let tuples: [(usize, f64, usize); 12] = [
        (2, 0.8, 1),
        (2, 0.8, 2),
        (2, 0.8, 4),
        (2, 0.9, 3),
        (2, 0.7, 5),
        (2, 0.6, 3),
        (3, 0.8, 2),
        (3, 0.6, 3),
        (3, 0.5, 4),
        (4, 0.7, 2),
        (4, 0.5, 3),
        (5, 0.6, 3),
    ];
    let blocks = 1_000_000;
    let mut worst_z: f64 = 0.0;
    for (i, &(n, beta0, block_size)) in tuples.iter().enumerate() {
        let params = make_params(n, beta0).unwrap();
        let stats = run_session(&params, block_size, blocks, 1000 + i as u64).unwrap();
        let pa = acceptance_probability(&params, block_size).unwrap();
        let pe = bob_error_after_ad(&params, block_size).unwrap();
        let za = (stats.acceptance_rate - pa).abs() / stats.acceptance_std_error(pa);
        let ze = (stats.bob_error_rate.unwrap_or(0.0) - pe).abs() / stats.bob_error_std_error(pe);
        worst_z = worst_z.max(za).max(ze);
    }
    let params = make_params(3, 0.7).unwrap();
    let rerun_stats = run_session(&params, 3, 200_000, 42).unwrap() == run_session(&params, 3, 200_000, 42).unwrap();
    let dump = || {
        let mut buf = Vec::new();
        dump_transcripts(&params, 3, 20_000, 42, &mut buf).unwrap();
        buf
    };
    let rerun_dump = dump() == dump();
    outcome(
        worst_z <= 4.0 && rerun_stats && rerun_dump,
        format!("worst deviation {worst_z:.2} standard errors over 12 tuples × 10⁶ blocks, identical reruns: {}", rerun_stats && rerun_dump),
    )
}

fn numerics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut fid_dev: f64 = 0.0;
    let mut trace_dev: f64 = 0.0;
    let mut completeness_dev: f64 = 0.0;
    let mut binary_dev: f64 = 0.0;
    for trial in 0..40 {
        let d = 2 + trial % 3;
        let rank = 1 + trial % d;
        let rho = random_density_operator(&[d], rank, &mut rng);
        let sigma = random_density_operator(&[d], d, &mut rng);
        let rho2 = random_density_operator(&[2], 2, &mut rng);
        let sigma2 = random_density_operator(&[2], 1, &mut rng);
        let f = fidelity(&rho, &sigma).unwrap();
        fid_dev = fid_dev
            .max((fidelity(&rho, &rho).unwrap() - 1.0).abs())
            .max((f - fidelity(&sigma, &rho).unwrap()).abs());
        let f_prod = fidelity(&rho.tensor(&rho2), &sigma.tensor(&sigma2)).unwrap();
        fid_dev = fid_dev.max((f_prod - f * fidelity(&rho2, &sigma2).unwrap()).abs());

        let product = rho.tensor(&sigma);
        trace_dev = trace_dev
            .max(product.partial_trace(&[0]).unwrap().matrix().max_abs_diff(rho.matrix()))
            .max(product.partial_trace(&[1]).unwrap().matrix().max_abs_diff(sigma.matrix()));
        let joint = random_density_operator(&[d, d], 1 + trial % (d * d), &mut rng);
        let purified = purify(&joint).unwrap();
        trace_dev = trace_dev.max(purified.reduced_ab().matrix().max_abs_diff(joint.matrix()));

        let k = 2 + trial % 4;
        let states: Vec<DensityOperator> = (0..k)
            .map(|j| random_density_operator(&[d], 1 + j % d, &mut rng))
            .collect();
        let priors = vec![1.0 / k as f64; k];
        let povm = square_root_measurement(&priors, &states).unwrap();
        let sum = povm
            .effects()
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, e| &acc + e);
        completeness_dev = completeness_dev.max(sum.max_abs_diff(&ComplexMatrix::identity(d)));

        let a = random_pure_state(d, &mut rng);
        let b = random_pure_state(d, &mut rng);
        let pair = [
            DensityOperator::from_pure(&a, vec![d]).unwrap(),
            DensityOperator::from_pure(&b, vec![d]).unwrap(),
        ];
        let srm = square_root_measurement(&[0.5, 0.5], &pair).unwrap();
        let e_srm = discrimination_error(&[0.5, 0.5], &pair, &srm).unwrap();
        let e_hel = helstrom_error(0.5, &pair[0], 0.5, &pair[1]).unwrap();
        binary_dev = binary_dev.max((e_srm - e_hel).abs());
    }
    // kron keeps subsystem ordering: (A⊗B)(C⊗D) = AC⊗BD on random factors
    let a = random_density_operator(&[2], 2, &mut rng);
    let b = random_density_operator(&[3], 2, &mut rng);
    let mixed = kron(a.matrix(), b.matrix()).matmul(&kron(a.matrix(), b.matrix()));
    let split = kron(&a.matrix().matmul(a.matrix()), &b.matrix().matmul(b.matrix()));
    trace_dev = trace_dev.max(mixed.max_abs_diff(&split));
    outcome(
        fid_dev <= 1e-8 && trace_dev <= 1e-9 && completeness_dev <= 1e-8 && binary_dev <= 1e-8,
        format!(
            "fidelity laws {fid_dev:.1e}, round trips {trace_dev:.1e}, completeness {completeness_dev:.1e}, Helstrom vs SRM {binary_dev:.1e}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("closed-form thresholds", closed_forms, Duration::from_secs(1)),
        ("quantum/classical coincidence", quantum_coincidence, Duration::from_secs(1)),
        ("numeric incoherent threshold", numeric_incoherent, Duration::from_secs(120)),
        ("numeric coherent threshold", numeric_coherent, Duration::from_secs(600)),
        ("coherent dominance", dominance, Duration::from_secs(300)),
        ("simulation consistency", simulation, Duration::from_secs(120)),
        ("numerics properties", numerics, Duration::from_secs(60)),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= *budget;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {}: {} {name}: {} [{:.2}s of {}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
