//! Scan-rate figure of merit and its optimization.
//!
//! A tuning receiver resolves a line of width `delta_a` near resonance after
//! an averaging time `t_av = c / (sigma(0)^2 delta_a)` and then steps its
//! resonance by the bandwidth
//!
//! ```text
//! B = integral_0^inf  d omega  sigma^2(omega) / sigma^2(0),
//! ```
//!
//! so the figure of merit is the scan rate `R = B / t_av`. For the simplified
//! sensitivity this has the closed form
//!
//! ```text
//! R(G, kappa_m) = (2 n_ax^2 kappa_ax^2 delta_a / (n_T + 1/2)^2)
//!     * sqrt(G) kappa_m^2
//!       / [kappa_loss kappa_m + (kappa_loss - kappa_m)^2 / (4G)]^(3/2)
//! ```
//!
//! whose prefactor fixes the `t_av` constant to `pi/8`; the numerical route
//! ([`scan_rate_numeric`]) uses that same normalization so the two paths are
//! directly comparable. They agree to better than 0.1% when both
//! `kappa_ax / kappa_loss` and
//! `kappa_ax (n_ax + 1/2) / (kappa_loss (n_T + 1/2))` are small.
//!
//! Without squeezing the rate peaks at `kappa_m = 2 kappa_loss`; with large
//! gain the optimum moves to `kappa_m ~ 2 G kappa_loss`. The exact optimum of
//! the closed form is the positive root of
//! `kappa_m^2 + (1 - 2G) kappa_loss kappa_m - 2 kappa_loss^2 = 0`.
//!
//! `R` is homogeneous of degree 2 in the rates: scaling every rate
//! (`kappa_j`, `delta_a`, `kappa_m`) by `c` scales `R` by `c^2`
//! (bandwidth per unit time).

use serde::{Deserialize, Serialize};

use crate::cavity::{
    beta_profile, sensitivity, AxionPsd, CavityParams, GainProfile, ReceiverConfig,
};
use crate::error::invalid;
use crate::numeric::{adaptive_simpson, golden_section_max};
use crate::Result;

/// `t_av` proportionality constant that gives `B / t_av` the same
/// normalization as the closed-form rate.
pub const RATE_T_AV_CONSTANT: f64 = std::f64::consts::PI / 8.0;

/// Relative tolerance of the bandwidth quadrature.
pub const BANDWIDTH_QUAD_TOL: f64 = 1e-8;

/// Relative tolerance of the coupling optimizer.
pub const OPTIMIZER_REL_TOL: f64 = 1e-9;

/// Number of log-grid points used for the unimodality scan.
const GRID_POINTS: usize = 200;

/// Inputs for the scan-rate computations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub params: CavityParams,
    pub receiver: ReceiverConfig,
    /// Signal linewidth `delta_a` (angular rate).
    pub delta_a: f64,
    /// Proportionality constant of the stand-alone [`averaging_time`]
    /// (the rate routes use [`RATE_T_AV_CONSTANT`] instead).
    pub t_av_constant: f64,
}

impl ScanConfig {
    pub fn new(
        params: CavityParams,
        receiver: ReceiverConfig,
        delta_a: f64,
        t_av_constant: f64,
    ) -> Result<Self> {
        let cfg = Self {
            params,
            receiver,
            delta_a,
            t_av_constant,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.receiver.validate()?;
        if !(self.delta_a > 0.0) || !self.delta_a.is_finite() {
            return Err(invalid(format!(
                "delta_a must be > 0 and finite, got {}",
                self.delta_a
            )));
        }
        if !(self.t_av_constant > 0.0) || !self.t_av_constant.is_finite() {
            return Err(invalid(format!(
                "t_av_constant must be > 0 and finite, got {}",
                self.t_av_constant
            )));
        }
        Ok(())
    }

    /// Receiver with the signal model replaced by a delta-like line of the
    /// same peak density: the line is assumed narrow on every cavity scale
    /// and to sit wherever the receiver currently looks.
    fn tracking_receiver(&self) -> Result<ReceiverConfig> {
        let peak = self.receiver.axion_psd.peak();
        if !(peak > 0.0) {
            return Err(invalid(
                "scan computations need a signal model with positive peak density",
            ));
        }
        Ok(ReceiverConfig {
            gain: self.receiver.gain.clone(),
            n_thermal: self.receiver.n_thermal,
            axion_psd: AxionPsd::DeltaLike { n_ax: peak },
        })
    }

    /// As [`tracking_receiver`], with gain and coupling overridden by the
    /// swept values.
    fn at(&self, gain: f64, kappa_m: f64) -> Result<(CavityParams, ReceiverConfig)> {
        if !(gain > 0.0) || !gain.is_finite() {
            return Err(invalid(format!(
                "gain must be positive and finite, got {gain}"
            )));
        }
        if !(kappa_m > 0.0) || !kappa_m.is_finite() {
            return Err(invalid(format!(
                "kappa_m must be positive and finite, got {kappa_m}"
            )));
        }
        let mut receiver = self.tracking_receiver()?;
        receiver.gain = GainProfile::Flat(gain);
        let params = CavityParams {
            kappa_m,
            ..self.params
        };
        Ok((params, receiver))
    }
}

/// Result of a coupling optimization at fixed gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptimum {
    pub kappa_m_opt: f64,
    pub gain_opt: f64,
    pub rate_opt: f64,
    /// Ratio of `rate_opt` to the optimized rate without squeezing.
    pub advantage: f64,
}

/// Averaging time needed to resolve the line at resonance,
/// `t_av_constant / (sigma(0)^2 delta_a)`.
pub fn averaging_time(cfg: &ScanConfig) -> Result<f64> {
    cfg.validate()?;
    let receiver = cfg.tracking_receiver()?;
    let sigma0 = sensitivity(0.0, &cfg.params, &receiver)?;
    if !(sigma0 > 0.0) {
        return Err(invalid(format!("sigma(0) must be positive, got {sigma0}")));
    }
    Ok(cfg.t_av_constant / (sigma0 * sigma0 * cfg.delta_a))
}

/// Bandwidth integral `B = integral_0^inf sigma^2(omega)/sigma^2(0) d omega`.
///
/// Evaluated by adaptive quadrature after the substitution
/// `omega = s tan(theta)` with the half-sensitivity scale
/// `s^2 = G kappa_m kappa_loss + beta(0)`, which maps the `omega^-4` tail to a
/// smooth integrand on `[0, pi/2]`.
pub fn bandwidth(cfg: &ScanConfig) -> Result<f64> {
    cfg.validate()?;
    let receiver = cfg.tracking_receiver()?;
    bandwidth_inner(&cfg.params, &receiver)
}

fn bandwidth_inner(params: &CavityParams, receiver: &ReceiverConfig) -> Result<f64> {
    let sigma0 = sensitivity(0.0, params, receiver)?;
    if !(sigma0 > 0.0) {
        return Err(invalid(format!("sigma(0) must be positive, got {sigma0}")));
    }
    let scale = (receiver.gain.value_at(0.0) * params.kappa_m * params.kappa_loss
        + beta_profile(0.0, params))
    .sqrt();
    let integrand = |theta: f64| -> f64 {
        if theta >= std::f64::consts::FRAC_PI_2 {
            return 0.0;
        }
        let t = theta.tan();
        let omega = scale * t;
        let ratio = sensitivity(omega, params, receiver).unwrap_or(0.0) / sigma0;
        ratio * ratio * scale * (1.0 + t * t)
    };
    adaptive_simpson(
        &integrand,
        0.0,
        std::f64::consts::FRAC_PI_2,
        BANDWIDTH_QUAD_TOL,
    )
}

/// Closed-form scan rate
/// `R(G, kappa_m) = (2 n_ax^2 kappa_ax^2 delta_a / (n_T + 1/2)^2)
///  * sqrt(G) kappa_m^2 / [kappa_loss kappa_m + (kappa_loss - kappa_m)^2/(4G)]^(3/2)`.
pub fn scan_rate_closed_form(gain: f64, kappa_m: f64, cfg: &ScanConfig) -> Result<f64> {
    cfg.validate()?;
    let (_, receiver) = cfg.at(gain, kappa_m)?;
    let n_ax = receiver.axion_psd.peak();
    let thermal = receiver.n_thermal + 0.5;
    let kl = cfg.params.kappa_loss;
    let denom = kl * kappa_m + (kl - kappa_m) * (kl - kappa_m) / (4.0 * gain);
    let prefactor = 2.0 * n_ax * n_ax * cfg.params.kappa_ax * cfg.params.kappa_ax * cfg.delta_a
        / (thermal * thermal);
    Ok(prefactor * gain.sqrt() * kappa_m * kappa_m / denom.powf(1.5))
}

/// Scan rate assembled from the numerical bandwidth and the on-resonance
/// sensitivity, `R = B / t_av` with the [`RATE_T_AV_CONSTANT`] normalization.
pub fn scan_rate_numeric(gain: f64, kappa_m: f64, cfg: &ScanConfig) -> Result<f64> {
    cfg.validate()?;
    let (params, receiver) = cfg.at(gain, kappa_m)?;
    let b = bandwidth_inner(&params, &receiver)?;
    let sigma0 = sensitivity(0.0, &params, &receiver)?;
    let t_av = RATE_T_AV_CONSTANT / (sigma0 * sigma0 * cfg.delta_a);
    Ok(b / t_av)
}

/// Maximize the closed-form rate over `kappa_m` at fixed gain.
///
/// A 200-point log grid over `[1e-2 kappa_loss, 1e4 G kappa_loss]` asserts
/// unimodality, then golden-section refines the bracket to relative tolerance
/// 1e-9. The `advantage` field is the ratio to the `G = 1` optimum.
pub fn optimize_kappa_m(gain: f64, cfg: &ScanConfig) -> Result<ScanOptimum> {
    cfg.validate()?;
    if !(gain >= 1.0) {
        return Err(invalid(format!("gain must be >= 1, got {gain}")));
    }
    let optimum = optimize_inner(gain, cfg)?;
    let advantage = if gain == 1.0 {
        1.0
    } else {
        optimum.1 / optimize_inner(1.0, cfg)?.1
    };
    Ok(ScanOptimum {
        kappa_m_opt: optimum.0,
        gain_opt: gain,
        rate_opt: optimum.1,
        advantage,
    })
}

fn optimize_inner(gain: f64, cfg: &ScanConfig) -> Result<(f64, f64)> {
    let kl = cfg.params.kappa_loss;
    let lo = 1e-2 * kl;
    let hi = 1e4 * gain * kl;
    let rate = |kappa_m: f64| {
        scan_rate_closed_form(gain, kappa_m, cfg).expect("validated config stays valid")
    };

    let log_lo = lo.ln();
    let step = (hi.ln() - log_lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| (log_lo + i as f64 * step).exp())
        .collect();
    let values: Vec<f64> = grid.iter().map(|&k| rate(k)).collect();

    let maxima: Vec<usize> = (1..GRID_POINTS - 1)
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .collect();
    if maxima.len() != 1 {
        let dump: Vec<String> = grid
            .iter()
            .zip(&values)
            .step_by(10)
            .map(|(k, v)| format!("({k:.3e}, {v:.6e})"))
            .collect();
        return Err(crate::Error::NonUnimodal {
            n_maxima: maxima.len(),
            grid_dump: dump.join(" "),
        });
    }
    let peak = maxima[0];
    let (kappa_opt, rate_opt) =
        golden_section_max(rate, grid[peak - 1], grid[peak + 1], OPTIMIZER_REL_TOL);
    Ok((kappa_opt, rate_opt))
}

/// Ratio of the optimized scan rate at gain `G` to the optimized rate
/// without squeezing.
pub fn quantum_advantage(gain: f64, cfg: &ScanConfig) -> Result<f64> {
    Ok(optimize_kappa_m(gain, cfg)?.advantage)
}
