//! Time-domain stochastic oracle for the cavity quadratures.
//!
//! Integrates the Langevin equations
//!
//! ```text
//! dX/dt = -(kappa/2) X + F_Y(t) + sum_j sqrt(kappa_j) x_in_j(t)
//! dY/dt = -(kappa/2) Y - F_X(t) + sum_j sqrt(kappa_j) y_in_j(t)
//! ```
//!
//! with white Gaussian port inputs whose per-quadrature spectral densities
//! are `(n_T + 1/2)/G` (measurement x), `(n_T + 1/2) G` (measurement y),
//! `(n_T + 1/2)` (loss) and `1/2` (signal-port vacuum); the signal itself
//! enters as the classical force `F`.
//!
//! The discretization is exact, not Euler: over each step the linear SDE is
//! solved in closed form, so the end-of-step state, the step-averaged state
//! and the step-averaged measurement-port output record
//! `x_out = x_in - sqrt(kappa_m) X` are drawn from their exact joint Gaussian
//! law. The step size therefore only limits the spectral bandwidth of the
//! output record (band-averaging rolls off as `sinc^2(omega dt / 2)`), not
//! its accuracy. The force is sample-and-held over each step.
//!
//! Each trajectory draws from its own counter-derived ChaCha streams
//! (`2 * index` for port noise, `2 * index + 1` for the stochastic force), so
//! batches are bit-identical whether integrated serially or in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cavity::{CavityParams, ReceiverConfig, SpectrumGrid};
use crate::error::invalid;
use crate::estimation::ForceSignal;
use crate::phasespace::{GaussianState, VACUUM_VARIANCE};
use crate::welch::WelchSpec;
use crate::{Error, Result};

/// Hard stability/accuracy guard on the step size: `dt <= 0.05 / kappa`.
pub const MAX_KAPPA_DT: f64 = 0.05;

/// Minimum simulated time, in units of `1/kappa`, for steady-state claims.
pub const STEADY_STATE_KAPPA_T: f64 = 20.0;

/// Cavity state at `t = 0`, sampled per trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    /// Noise-stationary moments; the mean includes the steady displacement
    /// when the force is a constant resonant drive.
    Stationary,
    /// Oscillator ground state, `Var = 1/2` per quadrature.
    Vacuum,
    /// Squeezed vacuum, `Var(X) = exp(-2r)/2`.
    Squeezed { r: f64 },
}

/// Full description of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub params: CavityParams,
    pub receiver: ReceiverConfig,
    pub signal: Option<ForceSignal>,
    /// Step size; must satisfy `dt * kappa <= 0.05`.
    pub dt: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub seed: u64,
    #[serde(default = "default_initial")]
    pub initial: InitialState,
}

fn default_initial() -> InitialState {
    InitialState::Stationary
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.receiver.validate()?;
        if self.receiver.gain.flat_value().is_none() {
            return Err(invalid(
                "time-domain simulation supports flat squeezer gain only (ideal squeezer)",
            ));
        }
        if let Some(signal) = &self.signal {
            signal.validate()?;
        }
        let kappa = self.params.kappa();
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.dt * kappa > MAX_KAPPA_DT * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "dt * kappa = {} exceeds the stability guard {MAX_KAPPA_DT}",
                self.dt * kappa
            )));
        }
        if self.n_steps < 2 {
            return Err(invalid("n_steps must be at least 2"));
        }
        if self.n_trajectories == 0 {
            return Err(invalid("n_trajectories must be at least 1"));
        }
        if let InitialState::Squeezed { r } = self.initial {
            if !r.is_finite() || r.abs() > crate::phasespace::MAX_SQUEEZE_PARAM {
                return Err(invalid(format!(
                    "initial squeeze parameter {r} out of range"
                )));
            }
        }
        Ok(())
    }

    /// Whether the simulated span is long enough for steady-state claims,
    /// `n_steps * dt >= 20 / kappa`.
    pub fn supports_steady_state(&self) -> bool {
        self.n_steps as f64 * self.dt >= STEADY_STATE_KAPPA_T / self.params.kappa()
    }

    pub fn total_time(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }
}

/// One simulated sample path.
///
/// `times[i] = (i + 1) dt` is the end of step `i`; `x`/`y` are the cavity
/// quadratures at that instant and `out_x` is the measurement-port output
/// x-quadrature averaged over step `i` (the record an amplifier would
/// integrate-and-dump).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub out_x: Vec<f64>,
}

impl Trajectory {
    pub fn dt(&self) -> f64 {
        self.times[0]
    }
}

/// Per-port noise spectral densities implied by a receiver.
#[derive(Debug, Clone, Copy)]
struct NoiseDensities {
    measurement_x: f64,
    measurement_y: f64,
    loss: f64,
    axion: f64,
}

impl NoiseDensities {
    fn from_receiver(receiver: &ReceiverConfig) -> Self {
        let gain = receiver.gain.flat_value().expect("validated: flat gain");
        let thermal = receiver.n_thermal + VACUUM_VARIANCE;
        Self {
            measurement_x: thermal / gain,
            measurement_y: thermal * gain,
            loss: thermal,
            axion: VACUUM_VARIANCE,
        }
    }
}

/// Precomputed exact-step coefficients.
///
/// Per step and port the triple `(w, u, v)` of integrated input noise
/// functionals is jointly Gaussian:
///
/// ```text
/// w = int x dt          (plain integral; feeds the output record)
/// u = int e^(-kappa (dt-s)/2) x ds          (feeds the end-of-step state)
/// v = int (2/kappa)(1 - e^(-kappa (dt-s)/2)) x ds  (feeds the step average)
/// ```
///
/// The covariance combinations below suffer catastrophic cancellation when
/// written with bare exponentials, so they are summed as series in
/// `eps = kappa dt / 2` (the validation bound keeps `eps <= 0.025`).
struct StepKernel {
    kappa: f64,
    sqrt_km: f64,
    alpha: f64,
    /// Coefficient of the held force in the end-of-step update.
    force_end: f64,
    /// Coefficient of the held force in the step average.
    force_avg: f64,
    /// Coefficient of the start-of-step state in the step average.
    g_avg: f64,
    /// Lower Cholesky of the unit-density (w, u, v) covariance.
    l3: [[f64; 3]; 3],
    /// Lower Cholesky of the unit-density (u, v) covariance.
    l2: [[f64; 2]; 2],
    /// Density scales.
    scale_m_x: f64,
    scale_other_x: f64,
    /// Standard deviation of the combined u-draw for the y quadrature.
    std_u_y: f64,
    stationary_var_x: f64,
    stationary_var_y: f64,
}

/// `sum_{k>=2} (-1)^k eps^k / k!  =  eps - (1 - e^-eps)`.
fn series_eps_minus_em1(eps: f64) -> f64 {
    let mut term = eps * eps / 2.0;
    let mut sum = term;
    let mut k = 3.0;
    while term.abs() > 1e-20 * sum.abs() {
        term *= -eps / k;
        sum += term;
        k += 1.0;
    }
    sum
}

/// `2 em1(eps) - em1(2 eps) = sum_{k>=2} (-1)^(k+1) (2 - 2^k) eps^k / k!`.
fn series_two_em1_minus_em2(eps: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = eps;
    let mut factorial = 1.0;
    let mut two_k = 2.0;
    for k in 2..60 {
        pow *= eps;
        factorial *= k as f64;
        two_k *= 2.0;
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        let term = sign * (2.0 - two_k) * pow / factorial;
        sum += term;
        if term.abs() < 1e-20 * sum.abs() {
            break;
        }
    }
    sum
}

/// `2 eps - 4 em1(eps) + em1(2 eps) = sum_{k>=3} (-1)^(k+1) (2^k - 4) eps^k / k!`.
fn series_var_v_core(eps: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = eps * eps;
    let mut factorial = 2.0;
    let mut two_k = 4.0;
    for k in 3..60 {
        pow *= eps;
        factorial *= k as f64;
        two_k *= 2.0;
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        let term = sign * (two_k - 4.0) * pow / factorial;
        sum += term;
        if term.abs() < 1e-20 * sum.abs() {
            break;
        }
    }
    sum
}

impl StepKernel {
    fn new(cfg: &SimulationConfig) -> Self {
        let params = &cfg.params;
        let kappa = params.kappa();
        let dt = cfg.dt;
        let eps = kappa * dt / 2.0;
        let em1 = -(-eps).exp_m1();
        let em2 = -(-2.0 * eps).exp_m1();
        let alpha = 1.0 - em1;

        let var_w = dt;
        let cov_wu = 2.0 / kappa * em1;
        let var_u = em2 / kappa;
        let cov_wv = 4.0 / (kappa * kappa) * series_eps_minus_em1(eps);
        let cov_uv = 2.0 / (kappa * kappa) * series_two_em1_minus_em2(eps);
        let var_v = 4.0 / (kappa * kappa * kappa) * series_var_v_core(eps);

        let l11 = var_w.sqrt();
        let l21 = cov_wu / l11;
        let l22 = (var_u - l21 * l21).max(0.0).sqrt();
        let l31 = cov_wv / l11;
        let l32 = (cov_uv - l21 * l31) / l22;
        let l33 = (var_v - l31 * l31 - l32 * l32).max(0.0).sqrt();

        // Standalone factor of the marginal (u, v) covariance for the ports
        // whose w never enters the output.
        let m11 = var_u.sqrt();
        let m21 = cov_uv / m11;
        let m22 = (var_v - m21 * m21).max(0.0).sqrt();

        let densities = NoiseDensities::from_receiver(&cfg.receiver);
        let total_x = params.kappa_m * densities.measurement_x
            + params.kappa_loss * densities.loss
            + params.kappa_ax * densities.axion;
        let total_y = params.kappa_m * densities.measurement_y
            + params.kappa_loss * densities.loss
            + params.kappa_ax * densities.axion;
        let other_x = params.kappa_loss * densities.loss + params.kappa_ax * densities.axion;

        Self {
            kappa,
            sqrt_km: params.kappa_m.sqrt(),
            alpha,
            force_end: 2.0 / kappa * em1,
            force_avg: 2.0 / kappa * (1.0 - em1 / eps),
            g_avg: em1 / eps,
            l3: [[l11, 0.0, 0.0], [l21, l22, 0.0], [l31, l32, l33]],
            l2: [[m11, 0.0], [m21, m22]],
            scale_m_x: densities.measurement_x.sqrt(),
            scale_other_x: other_x.sqrt(),
            std_u_y: (total_y * var_u).sqrt(),
            stationary_var_x: total_x / kappa,
            stationary_var_y: total_y / kappa,
        }
    }
}

fn noise_stream(idx: u64) -> u64 {
    2 * idx
}

fn force_stream(idx: u64) -> u64 {
    2 * idx + 1
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Realize the classical force on a time grid: `(F_X(t_i), F_Y(t_i))`.
///
/// An infinite coherence time gives the deterministic sinusoids
/// `F_X = f0 cos(delta t + phi)`, `F_Y = f0 sin(delta t + phi)`. A finite
/// `tau0` replaces the fixed envelope with a stationary complex
/// Ornstein-Uhlenbeck process (Rayleigh-distributed amplitude, uniform
/// phase, so `phi` does not enter), whose autocorrelation is exactly
/// `<F_Y(t) F_Y(t+tau)> = (f0^2/2) exp(-tau/tau0) cos(delta tau)`.
pub fn generate_force(
    signal: &ForceSignal,
    times: &[f64],
    rng: &mut impl Rng,
) -> Result<(Vec<f64>, Vec<f64>)> {
    signal.validate()?;
    let n = times.len();
    let mut f_x = Vec::with_capacity(n);
    let mut f_y = Vec::with_capacity(n);
    if signal.is_coherent() {
        for &t in times {
            let theta = signal.delta * t + signal.phi;
            f_x.push(signal.f0 * theta.cos());
            f_y.push(signal.f0 * theta.sin());
        }
        return Ok((f_x, f_y));
    }
    // Complex OU envelope: two independent real OU components with
    // stationary variance 1/2 and correlation time tau0.
    let mut zx: f64 = (VACUUM_VARIANCE).sqrt() * rng.sample::<f64, _>(StandardNormal);
    let mut zy: f64 = (VACUUM_VARIANCE).sqrt() * rng.sample::<f64, _>(StandardNormal);
    for i in 0..n {
        let t = times[i];
        let theta = signal.delta * t + signal.phi;
        let (sin_t, cos_t) = theta.sin_cos();
        f_x.push(signal.f0 * (zx * cos_t - zy * sin_t));
        f_y.push(signal.f0 * (zx * sin_t + zy * cos_t));
        if i + 1 < n {
            let a = (-(times[i + 1] - t) / signal.tau0).exp();
            let innovation = (VACUUM_VARIANCE * (1.0 - a * a)).sqrt();
            zx = a * zx + innovation * rng.sample::<f64, _>(StandardNormal);
            zy = a * zy + innovation * rng.sample::<f64, _>(StandardNormal);
        }
    }
    Ok((f_x, f_y))
}

fn initial_moments(cfg: &SimulationConfig, kernel: &StepKernel) -> (f64, f64, f64, f64) {
    match cfg.initial {
        InitialState::Vacuum => (0.0, 0.0, VACUUM_VARIANCE, VACUUM_VARIANCE),
        InitialState::Squeezed { r } => (
            0.0,
            0.0,
            VACUUM_VARIANCE * (-2.0 * r).exp(),
            VACUUM_VARIANCE * (2.0 * r).exp(),
        ),
        InitialState::Stationary => {
            let (mut mean_x, mut mean_y) = (0.0, 0.0);
            if let Some(signal) = &cfg.signal {
                if signal.is_coherent() && signal.delta == 0.0 {
                    let f_y = signal.f0 * signal.phi.sin();
                    let f_x = signal.f0 * signal.phi.cos();
                    mean_x = 2.0 * f_y / kernel.kappa;
                    mean_y = -2.0 * f_x / kernel.kappa;
                }
            }
            (
                mean_x,
                mean_y,
                kernel.stationary_var_x,
                kernel.stationary_var_y,
            )
        }
    }
}

fn run_trajectory(cfg: &SimulationConfig, kernel: &StepKernel, idx: u64) -> Result<Trajectory> {
    let n = cfg.n_steps;
    let dt = cfg.dt;
    let mut noise_rng = stream_rng(cfg.seed, noise_stream(idx));

    // Step-start grid for the sample-and-hold force.
    let (f_x, f_y) = match &cfg.signal {
        Some(signal) => {
            let grid: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
            let mut force_rng = stream_rng(cfg.seed, force_stream(idx));
            generate_force(signal, &grid, &mut force_rng)?
        }
        None => (vec![0.0; n], vec![0.0; n]),
    };

    let (mean_x, mean_y, var_x, var_y) = initial_moments(cfg, kernel);
    let mut x = mean_x + var_x.sqrt() * noise_rng.sample::<f64, _>(StandardNormal);
    let mut y = mean_y + var_y.sqrt() * noise_rng.sample::<f64, _>(StandardNormal);

    let mut times = Vec::with_capacity(n);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut outs = Vec::with_capacity(n);

    let l3 = &kernel.l3;
    let l2 = &kernel.l2;
    for i in 0..n {
        let n1: f64 = noise_rng.sample(StandardNormal);
        let n2: f64 = noise_rng.sample(StandardNormal);
        let n3: f64 = noise_rng.sample(StandardNormal);
        let n4: f64 = noise_rng.sample(StandardNormal);
        let n5: f64 = noise_rng.sample(StandardNormal);
        let n6: f64 = noise_rng.sample(StandardNormal);

        // Measurement-port triple and combined loss+signal pair, x quadrature.
        let w_m = kernel.scale_m_x * l3[0][0] * n1;
        let u_m = kernel.scale_m_x * (l3[1][0] * n1 + l3[1][1] * n2);
        let v_m = kernel.scale_m_x * (l3[2][0] * n1 + l3[2][1] * n2 + l3[2][2] * n3);
        let u_c = kernel.scale_other_x * l2[0][0] * n4;
        let v_c = kernel.scale_other_x * (l2[1][0] * n4 + l2[1][1] * n5);

        let x_avg =
            kernel.g_avg * x + (kernel.sqrt_km * v_m + v_c) / dt + f_y[i] * kernel.force_avg;
        outs.push(w_m / dt - kernel.sqrt_km * x_avg);

        x = kernel.alpha * x + kernel.sqrt_km * u_m + u_c + f_y[i] * kernel.force_end;
        y = kernel.alpha * y + kernel.std_u_y * n6 - f_x[i] * kernel.force_end;

        times.push((i + 1) as f64 * dt);
        xs.push(x);
        ys.push(y);
    }
    Ok(Trajectory {
        times,
        x: xs,
        y: ys,
        out_x: outs,
    })
}

/// Integrate a single trajectory (index 0 of the batch).
pub fn integrate(cfg: &SimulationConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let kernel = StepKernel::new(cfg);
    run_trajectory(cfg, &kernel, 0)
}

/// Integrate the whole batch in parallel. Bit-identical to repeated
/// [`integrate`] calls with increasing stream indices.
pub fn integrate_batch(cfg: &SimulationConfig) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    let kernel = StepKernel::new(cfg);
    (0..cfg.n_trajectories as u64)
        .into_par_iter()
        .map(|idx| run_trajectory(cfg, &kernel, idx))
        .collect()
}

/// Welch-averaged spectral density of the measurement-port output records of
/// pre-integrated trajectories.
pub fn estimate_psd(
    trajectories: &[Trajectory],
    segment_length: usize,
    overlap: f64,
) -> Result<SpectrumGrid> {
    let first = trajectories
        .first()
        .ok_or_else(|| Error::InsufficientData("no trajectories supplied".into()))?;
    if first.times.len() < 2 {
        return Err(Error::InsufficientData("trajectories too short".into()));
    }
    let dt = first.times[1] - first.times[0];
    let spec = WelchSpec::new(segment_length, overlap, dt)?;
    if segment_length > first.out_x.len() {
        return Err(Error::InsufficientData(format!(
            "segment length {segment_length} exceeds trajectory length {}",
            first.out_x.len()
        )));
    }
    let mut accum = vec![0.0; spec.n_bins()];
    let mut n_segments = 0;
    for traj in trajectories {
        n_segments += spec.accumulate(&traj.out_x, &mut accum);
    }
    spec.spectrum(&accum, n_segments)
}

/// Integrate the configured batch and Welch-average its output spectrum
/// without materializing trajectories; returns the grid and the number of
/// averaged segments.
pub fn estimate_psd_streaming(
    cfg: &SimulationConfig,
    segment_length: usize,
    overlap: f64,
) -> Result<(SpectrumGrid, usize)> {
    cfg.validate()?;
    if segment_length > cfg.n_steps {
        return Err(Error::InsufficientData(format!(
            "segment length {segment_length} exceeds n_steps {}",
            cfg.n_steps
        )));
    }
    let kernel = StepKernel::new(cfg);
    let spec = WelchSpec::new(segment_length, overlap, cfg.dt)?;
    let (accum, n_segments) = (0..cfg.n_trajectories as u64)
        .into_par_iter()
        .map(|idx| -> Result<(Vec<f64>, usize)> {
            let traj = run_trajectory(cfg, &kernel, idx)?;
            let mut local = vec![0.0; spec.n_bins()];
            let n = spec.accumulate(&traj.out_x, &mut local);
            Ok((local, n))
        })
        .try_reduce(
            || (vec![0.0; spec.n_bins()], 0usize),
            |(mut a, na), (b, nb)| {
                for (x, y) in a.iter_mut().zip(b.iter()) {
                    *x += y;
                }
                Ok((a, na + nb))
            },
        )?;
    Ok((spec.spectrum(&accum, n_segments)?, n_segments))
}

/// Which estimation protocol [`estimate_force_variance`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Ground-state preparation, dissipation-free evolution, X readout.
    Csl,
    /// Squeezed preparation (receiver gain), dissipation-free evolution.
    Squeezed,
    /// Dissipative cavity read through the output record.
    Dissipative,
}

/// Empirical moments of a repeated estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub mean: f64,
    pub variance: f64,
    /// Standard error of `variance` under Gaussian statistics,
    /// `variance * sqrt(2 / (n - 1))`.
    pub variance_std_error: f64,
    pub n: usize,
}

fn summarize(samples: &[f64]) -> VarianceEstimate {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let variance = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n as f64 - 1.0);
    VarianceEstimate {
        mean,
        variance,
        variance_std_error: variance * (2.0 / (n as f64 - 1.0)).sqrt(),
        n,
    }
}

/// Empirical variance of the force estimator over `n_trajectories`
/// repetitions.
///
/// `Csl` and `Squeezed` use the dissipation-free phase-space protocol: the
/// prepared state is displaced by `F_Y t_s` and a single X sample is read,
/// with `F_est = X / t_s` (requires a coherent signal or none; the cavity
/// parameters are ignored). `Dissipative` integrates the full cavity at
/// critical coupling on resonance and uses the output-record estimator
///
/// ```text
/// F_est = -(kappa / (2 sqrt(kappa_m))) * mean(out_x),
/// ```
///
/// which is unbiased (`<out_x> = -sqrt(kappa_m) 2 F_Y / kappa`) and whose
/// variance is `kappa^2 / (8 kappa_m t_s)`; at critical coupling that equals
/// `kappa / (4 t_s)`. (Averaging the intracavity X path instead costs a
/// factor 2: its variance floor is `kappa / (2 t_s)`.)
pub fn estimate_force_variance(
    cfg: &SimulationConfig,
    protocol: Protocol,
) -> Result<VarianceEstimate> {
    cfg.validate()?;
    if cfg.n_trajectories < 100 {
        return Err(Error::InsufficientData(format!(
            "need at least 100 trajectories for a variance estimate, got {}",
            cfg.n_trajectories
        )));
    }
    let t_s = cfg.total_time();
    match protocol {
        Protocol::Csl | Protocol::Squeezed => {
            let gain = match protocol {
                Protocol::Csl => 1.0,
                _ => cfg
                    .receiver
                    .gain
                    .flat_value()
                    .expect("validated: flat gain"),
            };
            let f_y =
                match &cfg.signal {
                    None => 0.0,
                    Some(signal) if signal.is_coherent() && signal.delta == 0.0 => {
                        signal.f0 * signal.phi.sin()
                    }
                    Some(_) => return Err(invalid(
                        "dissipation-free protocols require a resonant coherent signal (or none)",
                    )),
                };
            let r = crate::phasespace::r_from_gain(gain)?;
            let state = GaussianState::vacuum(1)?.squeeze_single(0, r)?;
            let sd = state.cov()[(0, 0)].sqrt();
            let samples: Vec<f64> = (0..cfg.n_trajectories as u64)
                .into_par_iter()
                .map(|idx| {
                    let mut rng = stream_rng(cfg.seed, noise_stream(idx));
                    let x = f_y * t_s + sd * rng.sample::<f64, _>(StandardNormal);
                    x / t_s
                })
                .collect();
            Ok(summarize(&samples))
        }
        Protocol::Dissipative => {
            if !cfg.supports_steady_state() {
                return Err(invalid(format!(
                    "dissipative protocol needs n_steps * dt >= {STEADY_STATE_KAPPA_T} / kappa"
                )));
            }
            let mut run = cfg.clone();
            run.initial = InitialState::Stationary;
            let kernel = StepKernel::new(&run);
            let scale = -run.params.kappa() / (2.0 * run.params.kappa_m.sqrt());
            let samples: Vec<f64> = (0..run.n_trajectories as u64)
                .into_par_iter()
                .map(|idx| {
                    let traj = run_trajectory(&run, &kernel, idx)?;
                    let mean_out = traj.out_x.iter().sum::<f64>() / traj.out_x.len() as f64;
                    Ok(scale * mean_out)
                })
                .collect::<Result<_>>()?;
            Ok(summarize(&samples))
        }
    }
}

/// Draw one sample of every quadrature from a Gaussian state's Wigner
/// distribution.
pub fn sample_state(state: &GaussianState, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let chol = state
        .cov()
        .clone()
        .cholesky()
        .ok_or_else(|| invalid("covariance not positive definite"))?;
    let dim = 2 * state.n_modes();
    let normals = nalgebra::DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let sample = state.mean() + chol.l() * normals;
    Ok(sample.iter().cloned().collect())
}
