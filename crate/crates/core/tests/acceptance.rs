//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see the lines for passing criteria too).
//!
//! Every tolerance is pinned here, in code. Two criteria are known-red and
//! fail with the measured numbers in their message:
//! - criterion 5: the optimized closed-form rate ratio approaches
//!   `(3 sqrt(3) / 8) G ~ 0.6495 G`, so an advantage of `G` itself is not
//!   attainable from that rate model;
//! - criterion 11: the overcoupled squeezed configuration trades ~17% of
//!   on-resonance sensitivity for the bandwidth gain, so strict 1% equality
//!   of `sigma(0)` does not hold (the >= 3x half-width part does).

use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use squeezescan::cavity::{
    output_spectrum, sensitivity, sensitivity_halfwidth, susceptibility, AxionPsd, CavityParams,
    GainProfile, ReceiverConfig,
};
use squeezescan::cli::{self, CommonOpts, OutputFormat};
use squeezescan::config::ConfigFile;
use squeezescan::estimation;
use squeezescan::langevin::{
    self, estimate_force_variance, estimate_psd_streaming, generate_force, InitialState, Protocol,
    SimulationConfig,
};
use squeezescan::phasespace::{r_from_gain, GaussianState, Quadrature};
use squeezescan::scan::{bandwidth, optimize_kappa_m, quantum_advantage, ScanConfig};
use squeezescan::ForceSignal;

fn report(criterion: u32, name: &str, pass: bool, detail: &str, started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    println!(
        "acceptance criterion {criterion:2} [{}] {name}: {detail} ({elapsed:.2} s, budget {budget_s} s)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}): {detail}");
    assert!(
        elapsed < budget_s,
        "criterion {criterion} ({name}) exceeded its runtime budget: {elapsed:.2} s >= {budget_s} s"
    );
}

#[test]
fn criterion_01_symplectic_uncertainty_suite() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE01);
    let mut worst_asym = 0.0f64;
    let mut worst_nu = f64::INFINITY;
    for _ in 0..1000 {
        let n_modes = rng.random_range(1..=3usize);
        let mut state = GaussianState::vacuum(n_modes).unwrap();
        // Cap the cumulative squeeze per sequence: an unbounded random walk
        // in r drives covariance entries to exp(tens), where certifying a
        // 1e-9 eigenvalue bound is beyond double precision. |r| total <= 3
        // keeps the eigensolver error near 1e-13.
        let mut squeeze_budget = 3.0f64;
        for _ in 0..15 {
            let mut op = rng.random_range(0..4u8);
            let r: f64 = rng.random_range(-1.0..1.0);
            if (op == 1 || op == 2) && squeeze_budget < r.abs() {
                op = 0;
            }
            match op {
                1 => {
                    let mode = rng.random_range(0..n_modes);
                    state = state.squeeze_single(mode, r).unwrap();
                    squeeze_budget -= r.abs();
                }
                2 if n_modes >= 2 => {
                    let a = rng.random_range(0..n_modes);
                    let mut b = rng.random_range(0..n_modes);
                    while b == a {
                        b = rng.random_range(0..n_modes);
                    }
                    state = state.squeeze_two_mode(a, b, r).unwrap();
                    squeeze_budget -= r.abs();
                }
                0 | 2 => {
                    let mode = rng.random_range(0..n_modes);
                    state = state
                        .displace(
                            mode,
                            rng.random_range(-3.0..3.0),
                            rng.random_range(-3.0..3.0),
                        )
                        .unwrap();
                }
                _ => {
                    let mode = rng.random_range(0..n_modes);
                    state = state
                        .loss_channel(
                            mode,
                            rng.random_range(0.0..=1.0),
                            rng.random_range(0.0..2.0),
                        )
                        .unwrap();
                }
            }
        }
        let cov = state.cov();
        let scale = cov.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for i in 0..cov.nrows() {
            for j in (i + 1)..cov.ncols() {
                worst_asym = worst_asym.max((cov[(i, j)] - cov[(j, i)]).abs() / scale);
            }
        }
        let nu_min = state
            .symplectic_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        worst_nu = worst_nu.min(nu_min);
    }
    let pass = worst_asym <= 1e-12 && worst_nu >= 0.5 - 1e-9;
    report(
        1,
        "symplectic/uncertainty suite",
        pass,
        &format!("worst asymmetry {worst_asym:.2e}, smallest symplectic eigenvalue {worst_nu:.12}"),
        started,
        10.0,
    );
}

#[test]
fn criterion_02_scattering_unitarity() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE02);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let kappa_m = 10f64.powf(rng.random_range(-2.0..2.0));
        let kappa_loss = 10f64.powf(rng.random_range(-2.0..2.0));
        let kappa_ax = if rng.random_bool(0.2) {
            0.0
        } else {
            10f64.powf(rng.random_range(-6.0..0.0))
        };
        let params = CavityParams::new(kappa_m, kappa_loss, kappa_ax).unwrap();
        let omega = rng.random_range(-100.0..100.0) * params.kappa();
        let chi = susceptibility(omega, &params);
        let product = chi * chi.adjoint();
        for j in 0..3 {
            for k in 0..3 {
                let expect = if j == k { 1.0 } else { 0.0 };
                worst = worst
                    .max((product[(j, k)].re - expect).abs())
                    .max(product[(j, k)].im.abs());
            }
        }
    }
    report(
        2,
        "scattering unitarity",
        worst <= 1e-12,
        &format!("worst |chi chi^dagger - I| element {worst:.2e} over 1e4 tuples"),
        started,
        5.0,
    );
}

#[test]
fn criterion_03_estimator_formulas() {
    let started = Instant::now();
    let mut worst_det = 0.0f64;

    // Deterministic phase-space protocols against the closed forms.
    for t_s in [0.7, 1.0, 3.0] {
        let (_, var) = GaussianState::vacuum(1)
            .unwrap()
            .displace(0, 0.3 * t_s, 0.0)
            .unwrap()
            .measure_quadrature_stats(0, Quadrature::X)
            .unwrap();
        let rel = (var / (t_s * t_s) / estimation::csl_variance(t_s).unwrap() - 1.0).abs();
        worst_det = worst_det.max(rel);
    }
    for gain in [2.0, 10.0, 100.0] {
        let t_s = 1.3;
        let r = r_from_gain(gain).unwrap();
        let (_, var) = GaussianState::vacuum(1)
            .unwrap()
            .squeeze_single(0, r)
            .unwrap()
            .displace(0, 0.3 * t_s, 0.0)
            .unwrap()
            .measure_quadrature_stats(0, Quadrature::X)
            .unwrap();
        let expect = estimation::squeezed_variance(gain, t_s).unwrap();
        worst_det = worst_det.max((var / (t_s * t_s) / expect - 1.0).abs());
    }
    for r in [0.0, 0.5, 1.5] {
        let t_s = 2.0;
        let state = GaussianState::vacuum(2)
            .unwrap()
            .squeeze_two_mode(0, 1, r)
            .unwrap()
            .displace(0, 0.4 * t_s, 0.0)
            .unwrap();
        let q = DVector::from_row_slice(&[1.0, 0.0, -1.0, 0.0]);
        let (_, var_q) = state.linear_combination_stats(&q).unwrap();
        let expect = estimation::two_mode_variances(r, t_s).unwrap().0;
        worst_det = worst_det.max((var_q / (t_s * t_s) / expect - 1.0).abs());
    }

    // Sampled protocols, 1e5 repetitions each, within 3 standard errors.
    let base = SimulationConfig {
        params: CavityParams::new(1.0, 1.0, 0.0).unwrap(),
        receiver: ReceiverConfig::new(GainProfile::Flat(10.0), 0.0, AxionPsd::None).unwrap(),
        signal: Some(ForceSignal::resonant(0.4).unwrap()),
        dt: 0.025,
        n_steps: 40,
        n_trajectories: 100_000,
        seed: 0xACCE03,
        initial: InitialState::Stationary,
    };
    let t_s = base.total_time();
    let mut sampled_ok = true;
    let mut detail_mc = String::new();
    for (protocol, expect) in [
        (Protocol::Csl, estimation::csl_variance(t_s).unwrap()),
        (
            Protocol::Squeezed,
            estimation::squeezed_variance(10.0, t_s).unwrap(),
        ),
    ] {
        let est = estimate_force_variance(&base, protocol).unwrap();
        let z = (est.variance - expect) / est.variance_std_error;
        sampled_ok &= z.abs() < 3.0;
        detail_mc.push_str(&format!(" {protocol:?} z = {z:+.2};"));
    }
    // Two-mode sampling through the entangled state.
    {
        let r = 1.0;
        let state = GaussianState::vacuum(2)
            .unwrap()
            .squeeze_two_mode(0, 1, r)
            .unwrap()
            .displace(0, 0.4 * t_s, 0.0)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE33);
        let n = 100_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                let draw = langevin::sample_state(&state, &mut rng).unwrap();
                (draw[0] - draw[2]) / t_s
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n as f64 - 1.0);
        let expect = estimation::two_mode_variances(r, t_s).unwrap().0;
        let se = var * (2.0 / (n as f64 - 1.0)).sqrt();
        let z = (var - expect) / se;
        sampled_ok &= z.abs() < 3.0;
        detail_mc.push_str(&format!(" TwoMode z = {z:+.2};"));
    }

    let pass = worst_det <= 1e-12 && sampled_ok;
    report(
        3,
        "estimator formulas",
        pass,
        &format!("deterministic worst rel err {worst_det:.2e};{detail_mc}"),
        started,
        60.0,
    );
}

fn scan_config() -> ScanConfig {
    ScanConfig::new(
        CavityParams::new(1.0, 1.0, 1e-4).unwrap(),
        ReceiverConfig::new(
            GainProfile::Flat(1.0),
            0.0,
            AxionPsd::DeltaLike { n_ax: 1.0 },
        )
        .unwrap(),
        1e-3,
        1.0,
    )
    .unwrap()
}

#[test]
fn criterion_04_optimal_coupling() {
    let started = Instant::now();
    let cfg = scan_config();
    let opt1 = optimize_kappa_m(1.0, &cfg).unwrap();
    let rel1 = (opt1.kappa_m_opt / 2.0 - 1.0).abs();
    let opt100 = optimize_kappa_m(100.0, &cfg).unwrap();
    let rel100 = (opt100.kappa_m_opt / 200.0 - 1.0).abs();
    let pass = rel1 <= 1e-6 && rel100 <= 0.03;
    report(
        4,
        "optimal coupling",
        pass,
        &format!(
            "G=1: kappa_m_opt = {:.9} (rel err {rel1:.2e}); G=100: {:.4} vs 2G = 200 (rel err {rel100:.2e})",
            opt1.kappa_m_opt, opt100.kappa_m_opt
        ),
        started,
        5.0,
    );
}

#[test]
fn criterion_05_quantum_advantage_tends_to_gain() {
    let started = Instant::now();
    let cfg = scan_config();
    let adv1 = quantum_advantage(1.0, &cfg).unwrap();
    let adv1000 = quantum_advantage(1000.0, &cfg).unwrap();
    let rel = (adv1000 / 1000.0 - 1.0).abs();
    let pass = adv1 == 1.0 && rel <= 0.02;
    report(
        5,
        "quantum advantage equals gain",
        pass,
        &format!(
            "advantage(1) = {adv1}; advantage(1000) = {adv1000:.2} vs 1000 required within 2% \
             (the optimized closed-form ratio approaches (3*sqrt(3)/8)*G ~ 0.6495*G, \
             so this bound cannot be met by the rate model itself)"
        ),
        started,
        10.0,
    );
}

#[test]
fn criterion_06_technically_limited_sensitivity() {
    let started = Instant::now();
    let kappa_ax = 1e-6;
    let params = CavityParams::new(1.0, 1.0, kappa_ax).unwrap();
    let n_ax = 1.0;
    let n_t = 0.3;
    let formula = (n_ax / (n_t + 0.5)) * kappa_ax / params.kappa_loss;
    let sigmas: Vec<f64> = [1.0, 10.0, 100.0]
        .iter()
        .map(|&g| {
            let cfg = ReceiverConfig::new(GainProfile::Flat(g), n_t, AxionPsd::DeltaLike { n_ax })
                .unwrap();
            sensitivity(0.0, &params, &cfg).unwrap()
        })
        .collect();
    let spread = sigmas.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - sigmas.iter().cloned().fold(f64::INFINITY, f64::min);
    let rel_spread = spread / sigmas[0];
    // Formula agreement carries the O(kappa_ax / kappa_loss) regime error.
    let rel_formula = (sigmas[0] / formula - 1.0).abs();
    let pass = rel_spread <= 1e-9 && rel_formula <= 1e-5;
    report(
        6,
        "technically-limited sensitivity",
        pass,
        &format!("gain spread {rel_spread:.2e} (<= 1e-9); formula deviation {rel_formula:.2e}"),
        started,
        1.0,
    );
}

#[test]
fn criterion_07_bandwidth_and_halfwidth() {
    let started = Instant::now();
    let params = CavityParams::new(1.0, 1.0, 1e-8).unwrap();
    let receiver = ReceiverConfig::new(
        GainProfile::Flat(1.0),
        0.0,
        AxionPsd::DeltaLike { n_ax: 1.0 },
    )
    .unwrap();
    let cfg = ScanConfig::new(params, receiver.clone(), 1e-3, 1.0).unwrap();
    let b = bandwidth(&cfg).unwrap();
    let rel_b = (b / std::f64::consts::FRAC_PI_4 - 1.0).abs();
    let hw = sensitivity_halfwidth(&params, &receiver).unwrap();
    let rel_hw = (hw / params.kappa_loss - 1.0).abs();
    let pass = rel_b <= 1e-6 && rel_hw <= 1e-6;
    report(
        7,
        "bandwidth integral and half-width",
        pass,
        &format!("B = {b:.9} vs pi/4 (rel {rel_b:.2e}); half-width {hw:.9} vs kappa_loss (rel {rel_hw:.2e})"),
        started,
        5.0,
    );
}

#[test]
fn criterion_08_montecarlo_vs_analytic_spectra() {
    let started = Instant::now();
    let configs = [
        // (name, params, gain, dt, n_steps, segment_length)
        (
            "critical G=1",
            CavityParams::new(1.0, 1.0, 0.0).unwrap(),
            1.0,
            0.025,
            131_072usize,
            1024usize,
        ),
        (
            "overcoupled G=10",
            CavityParams::new(10.0, 1.0, 0.0).unwrap(),
            10.0,
            0.004,
            196_608,
            2048,
        ),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (name, params, gain, dt, n_steps, segment_length) in configs {
        // 128 trajectories put the per-bin standard error near 0.7% (1% for
        // the one-degree-of-freedom DC bin), a comfortable margin under the
        // 5% bound for the worst of ~100 bins.
        let cfg = SimulationConfig {
            params,
            receiver: ReceiverConfig::new(GainProfile::Flat(gain), 0.0, AxionPsd::None).unwrap(),
            signal: None,
            dt,
            n_steps,
            n_trajectories: 128,
            seed: 0xACCE08,
            initial: InitialState::Stationary,
        };
        let (grid, n_segments) = estimate_psd_streaming(&cfg, segment_length, 0.5).unwrap();
        assert!(
            n_segments >= 400,
            "need at least 400 segments, got {n_segments}"
        );
        let kappa = params.kappa();
        let mut worst = 0.0f64;
        let mut worst_omega = 0.0;
        for (&omega, &measured) in grid.omegas.iter().zip(grid.values.iter()) {
            if omega > 5.0 * kappa {
                break;
            }
            let expect = output_spectrum(omega, &params, &cfg.receiver);
            let rel = ((measured - expect) / expect).abs();
            if rel > worst {
                worst = rel;
                worst_omega = omega;
            }
        }
        pass &= worst <= 0.05;
        detail.push_str(&format!(
            " [{name}: {n_segments} segments, worst bin {worst:.3} at omega {worst_omega:.2}]"
        ));
    }
    report(
        8,
        "Monte Carlo vs analytic spectra",
        pass,
        &detail,
        started,
        300.0,
    );
}

#[test]
fn criterion_09_decoherence_scaling() {
    let started = Instant::now();
    let cfg = SimulationConfig {
        params: CavityParams::new(1.0, 1.0, 0.0).unwrap(),
        receiver: ReceiverConfig::vacuum(),
        signal: None,
        dt: 0.025,
        n_steps: 2000, // t_s = 50 = 100 / kappa
        n_trajectories: 10_000,
        seed: 0xACCE09,
        initial: InitialState::Stationary,
    };
    let t_s = cfg.total_time();
    let kappa = cfg.params.kappa();
    assert!((t_s - 100.0 / kappa).abs() < 1e-12);
    let est = estimate_force_variance(&cfg, Protocol::Dissipative).unwrap();
    let expect = estimation::dissipative_variance(kappa, t_s).unwrap();
    let z = (est.variance - expect) / est.variance_std_error;
    report(
        9,
        "decoherence scaling",
        z.abs() < 3.0,
        &format!(
            "Var = {:.6e} vs kappa/(4 t_s) = {expect:.6e}, z = {z:+.2} over {} trajectories",
            est.variance, est.n
        ),
        started,
        300.0,
    );
}

#[test]
fn criterion_10_force_signal_statistics() {
    let started = Instant::now();
    let f0 = 1.3;
    let tau0 = 1.0;
    let delta = 2.0;
    let signal = ForceSignal::new(f0, 0.0, delta, tau0).unwrap();
    let dt = 0.05;
    let n = 200_000; // 1e4 tau0 of data
    let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE10);
    let (_, f_y) = generate_force(&signal, &times, &mut rng).unwrap();

    let n_batches = 50;
    let batch_len = n / n_batches;
    let mut worst_z = 0.0f64;
    let mut worst_lag = 0usize;
    for k in 0..20usize {
        let lag = k * 4; // tau = k tau0 / 5
        let tau = lag as f64 * dt;
        let expect = estimation::axion_autocorrelation(&signal, tau).unwrap();
        let mut estimates = Vec::with_capacity(n_batches);
        for b in 0..n_batches {
            let seg = &f_y[b * batch_len..(b + 1) * batch_len];
            let m = seg.len() - lag;
            estimates.push((0..m).map(|i| seg[i] * seg[i + lag]).sum::<f64>() / m as f64);
        }
        let mean = estimates.iter().sum::<f64>() / n_batches as f64;
        let var = estimates
            .iter()
            .map(|e| (e - mean) * (e - mean))
            .sum::<f64>()
            / (n_batches as f64 - 1.0);
        let se = (var / n_batches as f64).sqrt();
        let z = (mean - expect) / se;
        if z.abs() > worst_z {
            worst_z = z.abs();
            worst_lag = k;
        }
    }
    report(
        10,
        "force-signal statistics",
        worst_z < 3.0,
        &format!("20 lags, worst |z| = {worst_z:.2} at lag index {worst_lag}"),
        started,
        120.0,
    );
}

#[test]
fn criterion_11_figure_reproduction() {
    let started = Instant::now();

    fn run_spectrum(kappa_m: f64, gain: f64) -> (f64, f64) {
        let dir = tempfile::tempdir().unwrap();
        let text = format!(
            r#"{{
                "cavity": {{"kappa_m_over_kloss": {kappa_m}, "kappa_ax_over_kloss": 1e-6}},
                "receiver": {{"gain": {gain}, "axion": {{"model": "delta_like", "n_ax": 1.0}}}}
            }}"#
        );
        let path = dir.path().join("config.json");
        std::fs::write(&path, text).unwrap();
        let resolved = ConfigFile::from_path(&path).unwrap().resolve().unwrap();
        let opts = CommonOpts {
            out_dir: dir.path().to_path_buf(),
            seed: None,
            grid_points: 2001,
            format: OutputFormat::Csv,
        };
        cli::cmd_spectrum(&resolved, &opts).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
        let rows: Vec<(f64, f64)> = csv
            .lines()
            .skip(2)
            .map(|line| {
                let cells: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
                (cells[0], cells[5]) // omega, sigma
            })
            .collect();
        let sigma0 = rows[0].1;
        let target = sigma0 / 2.0;
        let halfwidth = rows
            .windows(2)
            .find(|w| w[0].1 >= target && w[1].1 < target)
            .map(|w| {
                let (o0, s0) = w[0];
                let (o1, s1) = w[1];
                o0 + (s0 - target) / (s0 - s1) * (o1 - o0)
            })
            .expect("sensitivity falls below half maximum inside the grid");
        (sigma0, halfwidth)
    }

    let (sigma_a, hw_a) = run_spectrum(1.0, 1.0);
    let (sigma_b, hw_b) = run_spectrum(10.0, 10.0);
    let sigma_rel = (sigma_b / sigma_a - 1.0).abs();
    let hw_ratio = hw_b / hw_a;
    let pass = sigma_rel <= 0.01 && hw_ratio >= 3.0;
    report(
        11,
        "figure reproduction",
        pass,
        &format!(
            "sigma(0) ratio {:.4} (required equal within 1%; the overcoupled squeezed case \
             trades ~17% on-resonance sensitivity for bandwidth); half-width ratio {hw_ratio:.2} (>= 3 required)",
            sigma_b / sigma_a
        ),
        started,
        5.0,
    );
}
