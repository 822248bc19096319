//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (run with `--nocapture` to see them). Monte Carlo
//! configurations are fully pinned, so every run reproduces the same numbers.

use std::time::Instant;

use arma_fpe::deriv::{derivative_path, DerivOrder};
use arma_fpe::estimator::FitConfig;
use arma_fpe::mc::{
    run_eig_experiment, run_moment_experiment, run_mspe_experiment, run_selection_experiment,
    Aggregates, McConfig,
};
use arma_fpe::{
    decay_fit, filter_bank, min_eig_subadditivity_check, residuals, simulate, validate_params,
    ArmaParams, GridSpec, ModelOrder, NoiseSpec, ParamSpace,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn arma11_truth() -> ArmaParams {
    ArmaParams::new(vec![0.5], vec![0.3]).unwrap()
}

fn mc_config(
    truth: ArmaParams,
    sample_sizes: Vec<usize>,
    replications: usize,
    master_seed: u64,
) -> McConfig {
    let order = truth.order();
    let space = ParamSpace::defaults_for(order);
    let fit_config = FitConfig::default_for(order, &space, 7).unwrap();
    McConfig {
        true_params: truth,
        order,
        space,
        noise: NoiseSpec::Gaussian { sigma2: 1.0 },
        sample_sizes,
        replications,
        master_seed,
        moment_orders: vec![2.0, 4.0],
        grid: None,
        fit_config,
    }
}

/// n (MSPE - sigma^2) tends to p_bar sigma^2 = 2 for the ARMA(1,1) model:
/// the n = 400 estimate lies in [1.5, 2.5], within 0.6 of the limit, and the
/// n = 100..400 sequence moves toward it. Budget: under five minutes.
#[test]
fn criterion_01_mspe_expansion_arma11() {
    let started = Instant::now();
    let config = mc_config(arma11_truth(), vec![100, 200, 400], 4000, 20260810);
    let result = run_mspe_experiment(&config).unwrap();
    let rows = match &result.aggregates {
        Aggregates::Mspe(rows) => rows,
        _ => panic!("wrong aggregate kind"),
    };
    let d = |n: usize| rows.iter().find(|r| r.n == n).unwrap().d_hat;
    let (d100, d400) = (d(100), d(400));
    let elapsed = started.elapsed().as_secs_f64();

    assert!(
        result.quality_ok,
        "nonconvergence gate: {:?}",
        result.nonconvergence
    );
    assert!(
        (1.5..=2.5).contains(&d400),
        "d_hat(400) = {d400} outside [1.5, 2.5]"
    );
    assert!(
        (d400 - 2.0).abs() <= 0.6,
        "d_hat(400) = {d400} not within 0.6 of the limit 2"
    );
    assert!(
        (d400 - 2.0).abs() <= (d100 - 2.0).abs(),
        "no trend toward the limit: d_hat(100) = {d100}, d_hat(400) = {d400}"
    );
    assert!(elapsed < 300.0, "runtime {elapsed:.1}s exceeds 5 minutes");
    println!(
        "criterion 01 PASS: d_hat = {:.3} / {:.3} / {:.3} for n = 100/200/400 (limit 2), {elapsed:.1}s",
        d100,
        d(200),
        d400
    );
}

/// Same expansion for AR(1) with alpha = 0.6 (limit p_bar sigma^2 = 1).
#[test]
fn criterion_02_mspe_expansion_ar1() {
    let truth = ArmaParams::new(vec![0.6], vec![]).unwrap();
    let config = mc_config(truth, vec![400], 4000, 20260810);
    let result = run_mspe_experiment(&config).unwrap();
    let rows = match &result.aggregates {
        Aggregates::Mspe(rows) => rows,
        _ => panic!("wrong aggregate kind"),
    };
    let d400 = rows[0].d_hat;
    assert!(result.quality_ok);
    assert!(
        (0.75..=1.25).contains(&d400),
        "d_hat(400) = {d400} outside [0.75, 1.25]"
    );
    println!("criterion 02 PASS: d_hat(400) = {d400:.3} within [0.75, 1.25] (limit 1)");
}

/// Boundedness of E || sqrt(n)(estimate - truth) ||^q across n for q = 2, 4:
/// the spread over n = 100..800 stays within a factor of 3 and fits converge
/// in more than 98% of replications.
#[test]
fn criterion_03_moment_boundedness() {
    let config = mc_config(arma11_truth(), vec![100, 200, 400, 800], 1000, 1);
    let result = run_moment_experiment(&config).unwrap();
    let rows = match &result.aggregates {
        Aggregates::Moments(rows) => rows,
        _ => panic!("wrong aggregate kind"),
    };
    for nc in &result.nonconvergence {
        assert!(
            nc.rate < 0.02,
            "nonconvergence rate {} at n = {}",
            nc.rate,
            nc.n
        );
    }
    let mut summary = String::new();
    for q in [2.0, 4.0] {
        let values: Vec<f64> = rows
            .iter()
            .filter(|r| r.q == q)
            .map(|r| r.estimate)
            .collect();
        assert!(values.iter().all(|v| v.is_finite()));
        let max = values.iter().copied().fold(f64::MIN, f64::max);
        let min = values.iter().copied().fold(f64::MAX, f64::min);
        let ratio = max / min;
        assert!(ratio <= 3.0, "q = {q}: max/min over n is {ratio}");
        summary.push_str(&format!(" q={q}: ratio {ratio:.2};"));
    }
    println!("criterion 03 PASS:{summary}");
}

/// Grid-supremum inverse-eigenvalue moments stay bounded in n with no
/// degenerate (infinite) statistics.
#[test]
fn criterion_04_uniform_inverse_eigenvalue_moment() {
    let truth = arma11_truth();
    let mut config = mc_config(truth.clone(), vec![100, 200, 400], 500, 20260810);
    config.moment_orders = vec![2.0];
    config.grid = Some(GridSpec::new(truth, 0.1, 5).unwrap());
    let result = run_eig_experiment(&config).unwrap();
    let rows = match &result.aggregates {
        Aggregates::Eig(rows) => rows,
        _ => panic!("wrong aggregate kind"),
    };
    let mut values = Vec::new();
    for row in rows {
        assert_eq!(row.infinite_count, 0, "degenerate sample at n = {}", row.n);
        assert!(row.estimate.is_finite());
        values.push(row.estimate);
    }
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    assert!(max / min <= 3.0, "spread {} exceeds factor 3", max / min);
    println!(
        "criterion 04 PASS: grid-sup means {:?} across n, spread {:.2}",
        values
            .iter()
            .map(|v| format!("{v:.3e}"))
            .collect::<Vec<_>>(),
        max / min
    );
}

/// Analytic gradients and Hessians match central finite differences at 100
/// random admissible points near the truth.
#[test]
fn criterion_05_derivative_correctness() {
    let truth = arma11_truth();
    let order = truth.order();
    let space = ParamSpace::defaults_for(order);
    let n = 300;
    let y = simulate(&truth, &space, n, &NoiseSpec::Gaussian { sigma2: 1.0 }, 55).unwrap();
    let h = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut tested = 0;
    let mut worst = 0.0_f64;
    while tested < 100 {
        let cand = ArmaParams::new(
            vec![0.5 + rng.gen_range(-0.1..0.1)],
            vec![0.3 + rng.gen_range(-0.1..0.1)],
        )
        .unwrap();
        if !validate_params(&cand, &space).is_valid() {
            continue;
        }
        tested += 1;
        let path = derivative_path(&cand, &y, DerivOrder::Hessian);
        for coord in 0..2 {
            let mut up = cand.to_vec();
            let mut dn = up.clone();
            up[coord] += h;
            dn[coord] -= h;
            let pu = ArmaParams::from_slice(order, &up).unwrap();
            let pd = ArmaParams::from_slice(order, &dn).unwrap();
            let eu = residuals(&pu, &y);
            let ed = residuals(&pd, &y);
            let gu = derivative_path(&pu, &y, DerivOrder::Gradient);
            let gd = derivative_path(&pd, &y, DerivOrder::Gradient);
            for t in 0..n {
                let fd = (eu[t] - ed[t]) / (2.0 * h);
                let rel = (path.grad_row(t)[coord] - fd).abs() / fd.abs().max(1.0);
                worst = worst.max(rel);
                assert!(rel < 1e-5, "gradient mismatch {rel} at t = {t}");
                for i in 0..2 {
                    let fd2 = (gu.grad_row(t)[i] - gd.grad_row(t)[i]) / (2.0 * h);
                    let rel2 = (path.hess_at(t, i, coord) - fd2).abs() / fd2.abs().max(1.0);
                    worst = worst.max(rel2);
                    assert!(rel2 < 1e-5, "hessian mismatch {rel2} at t = {t}");
                }
            }
        }
    }
    println!("criterion 05 PASS: 100 points, worst relative error {worst:.2e}");
}

/// The gradient and residual-difference filter representations agree with
/// the exact recursions to 1e-8 for 20 random parameter pairs at n = 500.
#[test]
fn criterion_06_filter_representation_identities() {
    let order = ModelOrder { p1: 1, p2: 1 };
    let space = ParamSpace::defaults_for(order);
    let n = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draw = |rng: &mut ChaCha8Rng| loop {
        let cand = ArmaParams::new(
            vec![rng.gen_range(-0.98..0.98)],
            vec![rng.gen_range(-0.98..0.98)],
        )
        .unwrap();
        if validate_params(&cand, &space).is_valid() {
            return cand;
        }
    };
    let mut worst_grad = 0.0_f64;
    let mut worst_diff = 0.0_f64;
    for pair in 0..20 {
        let truth = draw(&mut rng);
        let point = draw(&mut rng);
        let y = simulate(
            &truth,
            &space,
            n,
            &NoiseSpec::Gaussian { sigma2: 1.0 },
            1000 + pair,
        )
        .unwrap();
        let eps = y.innovations().unwrap();
        let bank = filter_bank(&point, &truth, &space, n).unwrap();

        let path = derivative_path(&point, &y, DerivOrder::Gradient);
        let filtered = bank.gradient_rows(eps);
        for t in 0..n {
            for l in 0..2 {
                worst_grad = worst_grad.max((filtered[t][l] - path.grad_row(t)[l]).abs());
            }
        }

        let diffs = bank.residual_diffs(eps);
        let e_point = residuals(&point, &y);
        let e_truth = residuals(&truth, &y);
        for t in 0..n {
            worst_diff = worst_diff.max((diffs[t] - (e_point[t] - e_truth[t])).abs());
        }
    }
    assert!(worst_grad < 1e-8, "gradient identity error {worst_grad:e}");
    assert!(
        worst_diff < 1e-8,
        "difference identity error {worst_diff:e}"
    );
    println!(
        "criterion 06 PASS: max abs errors {worst_grad:.2e} (gradient) and {worst_diff:.2e} (difference)"
    );
}

/// Filter coefficients decay exponentially: fitted log-slopes stay below
/// -0.05 at L = 200 for the acceptance parameter pairs.
#[test]
fn criterion_07_exponential_decay() {
    let pairs = [
        (
            arma11_truth(),
            ArmaParams::new(vec![0.4], vec![0.2]).unwrap(),
        ),
        (
            arma11_truth(),
            ArmaParams::new(vec![0.6], vec![0.1]).unwrap(),
        ),
        (
            ArmaParams::new(vec![0.6], vec![]).unwrap(),
            ArmaParams::new(vec![0.4], vec![]).unwrap(),
        ),
    ];
    let mut slopes = Vec::new();
    for (truth, point) in pairs {
        let space = ParamSpace::defaults_for(truth.order());
        let bank = filter_bank(&point, &truth, &space, 200).unwrap();
        for l in 0..bank.p_bar() {
            let slope = decay_fit(bank.row(l)).slope().expect("nonzero row");
            assert!(slope < -0.05, "row {l} slope {slope}");
            slopes.push(slope);
        }
        let slope = decay_fit(bank.diff_coeffs())
            .slope()
            .expect("distinct points give nonzero difference coefficients");
        assert!(slope < -0.05, "difference slope {slope}");
        slopes.push(slope);
    }
    println!(
        "criterion 07 PASS: slopes {:?} all below -0.05",
        slopes.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>()
    );
}

/// Minimum-eigenvalue superadditivity holds on 1000 random symmetric pairs.
#[test]
fn criterion_08_eigenvalue_subadditivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2468);
    let mut min_slack = f64::INFINITY;
    for _ in 0..1000 {
        let dim = rng.gen_range(2..=6);
        let raw_a = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
        let raw_b = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
        let a = (&raw_a + raw_a.transpose()) * 0.5;
        let b = (&raw_b + raw_b.transpose()) * 0.5;
        let check = min_eig_subadditivity_check(&a, &b).unwrap();
        min_slack = min_slack.min(check.slack);
        assert!(check.slack >= -1e-12, "slack {}", check.slack);
    }
    println!("criterion 08 PASS: min slack {min_slack:.2e} over 1000 pairs");
}

/// FPE selects the true AR(1) order among AR(1..3) in at least 60% of
/// replications (pilot value 0.768 at this seed).
#[test]
fn criterion_09_fpe_selection_frequency() {
    let truth = ArmaParams::new(vec![0.6], vec![]).unwrap();
    let mut config = mc_config(truth, vec![400], 500, 20260810);
    config.moment_orders = vec![];
    let candidates = [
        ModelOrder { p1: 1, p2: 0 },
        ModelOrder { p1: 2, p2: 0 },
        ModelOrder { p1: 3, p2: 0 },
    ];
    let result = run_selection_experiment(&config, &candidates).unwrap();
    let rows = match &result.aggregates {
        Aggregates::Selection(rows) => rows,
        _ => panic!("wrong aggregate kind"),
    };
    let true_freq = rows
        .iter()
        .find(|r| r.order == candidates[0])
        .unwrap()
        .frequency;
    assert!(true_freq >= 0.6, "true-order frequency {true_freq}");
    println!("criterion 09 PASS: AR(1) selected with frequency {true_freq:.3}");
}

/// Identical `mc` invocations produce byte-identical output directories at
/// thread counts 1 and 8.
#[test]
fn criterion_10_thread_count_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.toml");
    std::fs::write(
        &config_path,
        r#"
[model]
ar = [0.5]
ma = [0.3]

[noise]
kind = "gaussian"
sigma2 = 1.0

[mc]
sample_sizes = [60]
replications = 24
master_seed = 99
moment_orders = [2.0]

[grid]
radius = 0.05
points_per_axis = 3
"#,
    )
    .unwrap();

    let bin = env!("CARGO_BIN_EXE_arma-fpe");
    let run = |kind: &str, out: &str, threads: &str| {
        let out_dir = dir.path().join(out);
        let status = std::process::Command::new(bin)
            .args([
                "mc",
                kind,
                "--config",
                config_path.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
                "--threads",
                threads,
            ])
            .status()
            .unwrap();
        assert!(status.success(), "mc {kind} exited with {status}");
        out_dir
    };
    let read_all = |dir: &std::path::Path| {
        let mut names: Vec<_> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        names
            .into_iter()
            .map(|name| (name.clone(), std::fs::read(dir.join(name)).unwrap()))
            .collect::<Vec<_>>()
    };

    for kind in ["mspe", "eig"] {
        let a = read_all(&run(kind, &format!("{kind}_t1"), "1"));
        let b = read_all(&run(kind, &format!("{kind}_t8"), "8"));
        let c = read_all(&run(kind, &format!("{kind}_t1_again"), "1"));
        assert_eq!(a.len(), 3);
        for ((na, ba), ((nb, bb), (nc, bc))) in a.iter().zip(b.iter().zip(c.iter())) {
            assert_eq!(na, nb);
            assert_eq!(na, nc);
            assert_eq!(ba, bb, "{kind}/{na} differs between 1 and 8 threads");
            assert_eq!(ba, bc, "{kind}/{na} differs between reruns");
        }
    }
    println!("criterion 10 PASS: mspe and eig runs byte-identical at 1 and 8 threads");
}
