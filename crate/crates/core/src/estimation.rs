//! Closed-form variances of the force-estimation protocols.
//!
//! The benchmark is the coherent-state-limit (CSL) strategy: prepare the
//! oscillator ground state, let the resonant force displace it for a time
//! `t_s`, measure one quadrature and estimate `F = X / t_s`. Its variance is
//! `1/(2 t_s^2)`. A single-mode squeezed input divides that by the gain `G`;
//! the two-mode (EPR) strategy reads both force components at `exp(-2r)/t_s^2`
//! each. With cavity dissipation the displacement saturates at
//! `<X> = 2 F_Y / kappa` and repeated estimates average down as
//! `Var(F_Y)(t_s) = kappa / (4 t_s)`.
//!
//! Every closed form here is reproduced (a) deterministically by the
//! phase-space protocols in [`crate::phasespace`] and (b) statistically by
//! the Monte Carlo estimators in [`crate::langevin`].

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::phasespace::{r_from_gain, GaussianState, Quadrature};
use crate::Result;

/// Stochastic classical force: amplitude `f0`, phase `phi`, detuning `delta`
/// from cavity resonance and coherence time `tau0` (infinite for a perfectly
/// coherent drive).
///
/// The quadrature drives are `F_X = f0 cos(delta t + phi)` and
/// `F_Y = f0 sin(delta t + phi)`; for finite `tau0` the envelope dephases so
/// that `<F_Y(t) F_Y(t + tau)> = (f0^2 / 2) exp(-tau/tau0) cos(delta tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceSignal {
    pub f0: f64,
    pub phi: f64,
    pub delta: f64,
    /// Coherence time; `f64::INFINITY` means a deterministic sinusoid.
    pub tau0: f64,
}

impl ForceSignal {
    pub fn new(f0: f64, phi: f64, delta: f64, tau0: f64) -> Result<Self> {
        let s = Self {
            f0,
            phi,
            delta,
            tau0,
        };
        s.validate()?;
        Ok(s)
    }

    /// Perfectly coherent resonant drive along the Y quadrature (displaces X).
    pub fn resonant(f0: f64) -> Result<Self> {
        Self::new(f0, std::f64::consts::FRAC_PI_2, 0.0, f64::INFINITY)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f0 >= 0.0) || !self.f0.is_finite() {
            return Err(invalid(format!(
                "f0 must be >= 0 and finite, got {}",
                self.f0
            )));
        }
        if !self.phi.is_finite() || !self.delta.is_finite() {
            return Err(invalid("phi and delta must be finite"));
        }
        if !(self.tau0 > 0.0) {
            return Err(invalid(format!(
                "tau0 must be > 0 (or infinite), got {}",
                self.tau0
            )));
        }
        Ok(())
    }

    pub fn is_coherent(&self) -> bool {
        self.tau0.is_infinite()
    }
}

/// Outcome of an estimation protocol: estimator mean, variance and the
/// evolution time it used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub estimator_mean: f64,
    pub estimator_variance: f64,
    pub t_s: f64,
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0) || !value.is_finite() {
        Err(invalid(format!(
            "{name} must be positive and finite, got {value}"
        )))
    } else {
        Ok(())
    }
}

/// Coherent-state-limit variance `1 / (2 t_s^2)`.
pub fn csl_variance(t_s: f64) -> Result<f64> {
    check_positive("t_s", t_s)?;
    Ok(0.5 / (t_s * t_s))
}

/// Squeezed-input variance `1 / (2 G t_s^2)`.
///
/// Gains below 1 are allowed (anti-squeezed input) but logged as a warning.
pub fn squeezed_variance(gain: f64, t_s: f64) -> Result<f64> {
    check_positive("t_s", t_s)?;
    check_positive("gain", gain)?;
    if gain < 1.0 {
        log::warn!("gain {gain} < 1: input is anti-squeezed along the measured quadrature");
    }
    Ok(0.5 / (gain * t_s * t_s))
}

/// Two-mode (EPR) protocol variances for both force components:
/// `Var(F_Y) = Var(F_X) = exp(-2r) / t_s^2`.
pub fn two_mode_variances(r: f64, t_s: f64) -> Result<(f64, f64)> {
    check_positive("t_s", t_s)?;
    if !r.is_finite() {
        return Err(invalid("r must be finite"));
    }
    let v = (-2.0 * r).exp() / (t_s * t_s);
    Ok((v, v))
}

/// Steady-state displacement of a resonantly driven lossy cavity:
/// `<X> = 2 F_Y / kappa`.
pub fn steady_state_mean_x(f_y: f64, kappa: f64) -> Result<f64> {
    check_positive("kappa", kappa)?;
    if !f_y.is_finite() {
        return Err(invalid("f_y must be finite"));
    }
    Ok(2.0 * f_y / kappa)
}

/// Dissipation-limited estimator variance `kappa / (4 t_s)`.
///
/// Valid for `t_s >> 1/kappa`; the formula is evaluated for any input, with a
/// warning outside the validity window (see [`dissipative_regime_ok`]).
pub fn dissipative_variance(kappa: f64, t_s: f64) -> Result<f64> {
    check_positive("kappa", kappa)?;
    check_positive("t_s", t_s)?;
    if !dissipative_regime_ok(kappa, t_s) {
        log::warn!(
            "t_s = {t_s} is below 10/kappa = {}: kappa/(4 t_s) is outside its validity regime",
            10.0 / kappa
        );
    }
    Ok(kappa / (4.0 * t_s))
}

/// Validity window for the `kappa / (4 t_s)` asymptotic: `t_s >= 10 / kappa`.
pub fn dissipative_regime_ok(kappa: f64, t_s: f64) -> bool {
    t_s >= 10.0 / kappa
}

/// Run the single-mode protocol at the covariance level: prepare (squeezed)
/// vacuum, let a constant `F_Y` displace `X` for `t_s`, read the marginal and
/// divide by `t_s`.
///
/// Deterministic (no sampling); reproduces [`csl_variance`] at `gain = 1` and
/// [`squeezed_variance`] otherwise to machine precision. The estimator is
/// unbiased: `estimator_mean == f_y` exactly.
pub fn single_mode_protocol(gain: f64, f_y: f64, t_s: f64) -> Result<ProtocolResult> {
    check_positive("t_s", t_s)?;
    let r = r_from_gain(gain)?;
    let state = GaussianState::vacuum(1)?
        .squeeze_single(0, r)?
        .displace(0, f_y * t_s, 0.0)?;
    let (mean, var) = state.measure_quadrature_stats(0, Quadrature::X)?;
    Ok(ProtocolResult {
        estimator_mean: mean / t_s,
        estimator_variance: var / (t_s * t_s),
        t_s,
    })
}

/// Run the two-mode (EPR) protocol at the covariance level: entangle a
/// force-free ancilla, displace the science mode, read `Q = X1 - X2` and
/// `P = Y1 + Y2`.
///
/// Returns the `F_Y` and `F_X` estimates as `(result_fy, result_fx)`, each
/// matching [`two_mode_variances`] to machine precision.
pub fn two_mode_protocol(
    r: f64,
    f_y: f64,
    f_x: f64,
    t_s: f64,
) -> Result<(ProtocolResult, ProtocolResult)> {
    check_positive("t_s", t_s)?;
    let state = GaussianState::vacuum(2)?
        .squeeze_two_mode(0, 1, r)?
        .displace(0, f_y * t_s, -f_x * t_s)?;
    let q = DVector::from_row_slice(&[1.0, 0.0, -1.0, 0.0]);
    let p = DVector::from_row_slice(&[0.0, 1.0, 0.0, 1.0]);
    let (q_mean, q_var) = state.linear_combination_stats(&q)?;
    let (p_mean, p_var) = state.linear_combination_stats(&p)?;
    Ok((
        ProtocolResult {
            estimator_mean: q_mean / t_s,
            estimator_variance: q_var / (t_s * t_s),
            t_s,
        },
        ProtocolResult {
            estimator_mean: -p_mean / t_s,
            estimator_variance: p_var / (t_s * t_s),
            t_s,
        },
    ))
}

/// Autocorrelation of the stochastic force,
/// `(f0^2 / 2) exp(-tau/tau0) cos(delta tau)` at lag `tau >= 0`.
pub fn axion_autocorrelation(signal: &ForceSignal, tau: f64) -> Result<f64> {
    signal.validate()?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(invalid(format!("tau must be >= 0 and finite, got {tau}")));
    }
    let envelope = if signal.tau0.is_infinite() {
        1.0
    } else {
        (-tau / signal.tau0).exp()
    };
    Ok(0.5 * signal.f0 * signal.f0 * envelope * (signal.delta * tau).cos())
}
