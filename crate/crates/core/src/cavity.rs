//! Frequency-domain input-output model of the three-port cavity.
//!
//! The cavity exchanges energy with a measurement port (rate `kappa_m`), an
//! internal-loss port (`kappa_loss`) and a signal port (`kappa_ax`), with
//! total linewidth `kappa = kappa_m + kappa_loss + kappa_ax`. The output
//! fields are related to the inputs by the susceptibility matrix
//!
//! ```text
//! chi_jk(omega) = (-sqrt(kappa_j kappa_k) + (kappa/2 + i omega) delta_jk)
//!                 / (kappa/2 + i omega)
//! ```
//!
//! which is unitary at every Fourier frequency: `chi chi^dagger = I`.
//!
//! The measured x-quadrature output spectral density (photon units, vacuum at
//! 1/2) with a squeezer of gain `G` on the measurement-port input is
//!
//! ```text
//! S_x_out = |chi_mm|^2 (n_T + 1/2)/G + |chi_ml|^2 (n_T + 1/2)
//!         + |chi_ma|^2 (n_ax + 1/2)
//! ```
//!
//! and the fractional sensitivity to the signal line is
//! `sigma = (S_x_out - S_x_out|n_ax=0) / S_x_out = |chi_ma|^2 n_ax / S_x_out`.
//! In the accessible regime `kappa_ax << kappa_loss ~ kappa_m` this reduces to
//! the closed form implemented by [`sensitivity_simplified`].
//!
//! Frequencies `omega` are Fourier offsets from cavity resonance; all rates
//! use the same (arbitrary) angular unit.

use nalgebra::{Complex, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::{Error, Result};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const KB: f64 = 1.380_649e-23;

/// Port order used for every susceptibility matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    Measurement = 0,
    Loss = 1,
    Axion = 2,
}

/// Decay rates of the three cavity ports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    /// Measurement-port rate, > 0.
    pub kappa_m: f64,
    /// Internal-loss rate, > 0.
    pub kappa_loss: f64,
    /// Signal-port rate, >= 0.
    pub kappa_ax: f64,
}

impl CavityParams {
    pub fn new(kappa_m: f64, kappa_loss: f64, kappa_ax: f64) -> Result<Self> {
        let p = Self {
            kappa_m,
            kappa_loss,
            kappa_ax,
        };
        p.validate()?;
        Ok(p)
    }

    /// Total cavity linewidth.
    pub fn kappa(&self) -> f64 {
        self.kappa_m + self.kappa_loss + self.kappa_ax
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_m > 0.0) || !self.kappa_m.is_finite() {
            return Err(invalid(format!(
                "kappa_m must be positive and finite, got {}",
                self.kappa_m
            )));
        }
        if !(self.kappa_loss > 0.0) || !self.kappa_loss.is_finite() {
            return Err(invalid(format!(
                "kappa_loss must be positive and finite, got {}",
                self.kappa_loss
            )));
        }
        if !(self.kappa_ax >= 0.0) || !self.kappa_ax.is_finite() {
            return Err(invalid(format!(
                "kappa_ax must be >= 0 and finite, got {}",
                self.kappa_ax
            )));
        }
        Ok(())
    }

    /// True in the physically accessible regime of signal-to-photon
    /// conversion, `kappa_ax < 1e-3 * min(kappa_m, kappa_loss)`.
    pub fn is_physically_accessible(&self) -> bool {
        self.kappa_ax < 1e-3 * self.kappa_m.min(self.kappa_loss)
    }

    /// Rates divided by `kappa_loss`, the normalization used for reporting.
    pub fn in_loss_units(&self) -> Self {
        Self {
            kappa_m: self.kappa_m / self.kappa_loss,
            kappa_loss: 1.0,
            kappa_ax: self.kappa_ax / self.kappa_loss,
        }
    }
}

/// Spectral model of the signal line `n_ax(omega)` (photon units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum AxionPsd {
    /// No signal: `n_ax = 0` everywhere.
    None,
    /// A line much narrower than every cavity scale: evaluates to the peak
    /// density at any probed frequency. Used for analytic cross-checks where
    /// the line is centered wherever the receiver looks.
    DeltaLike { n_ax: f64 },
    /// Explicit Lorentzian line: peak density `n_ax` at `center`, full width
    /// at half maximum `fwhm`.
    Lorentzian { center: f64, fwhm: f64, n_ax: f64 },
}

impl AxionPsd {
    /// Signal spectral density at Fourier frequency `omega`.
    pub fn value_at(&self, omega: f64) -> f64 {
        match *self {
            AxionPsd::None => 0.0,
            AxionPsd::DeltaLike { n_ax } => n_ax,
            AxionPsd::Lorentzian { center, fwhm, n_ax } => {
                let u = 2.0 * (omega - center) / fwhm;
                n_ax / (1.0 + u * u)
            }
        }
    }

    /// Peak density of the line (0 when absent).
    pub fn peak(&self) -> f64 {
        match *self {
            AxionPsd::None => 0.0,
            AxionPsd::DeltaLike { n_ax } | AxionPsd::Lorentzian { n_ax, .. } => n_ax,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            AxionPsd::None => Ok(()),
            AxionPsd::DeltaLike { n_ax } => {
                if !(n_ax >= 0.0) || !n_ax.is_finite() {
                    Err(invalid(format!("n_ax must be >= 0 and finite, got {n_ax}")))
                } else {
                    Ok(())
                }
            }
            AxionPsd::Lorentzian { center, fwhm, n_ax } => {
                if !center.is_finite() {
                    return Err(invalid("lorentzian center must be finite"));
                }
                if !(fwhm > 0.0) || !fwhm.is_finite() {
                    return Err(invalid(format!("lorentzian fwhm must be > 0, got {fwhm}")));
                }
                if !(n_ax >= 0.0) || !n_ax.is_finite() {
                    return Err(invalid(format!("n_ax must be >= 0 and finite, got {n_ax}")));
                }
                Ok(())
            }
        }
    }
}

/// Squeezer gain, either flat or tabulated over frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GainProfile {
    /// Frequency-independent gain (the ideal squeezer).
    Flat(f64),
    /// Piecewise-linear interpolation of `(omega, gain)` samples; evaluated at
    /// `|omega|` and clamped to the table ends.
    Table { omegas: Vec<f64>, gains: Vec<f64> },
}

impl GainProfile {
    pub fn value_at(&self, omega: f64) -> f64 {
        match self {
            GainProfile::Flat(g) => *g,
            GainProfile::Table { omegas, gains } => {
                let w = omega.abs();
                if w <= omegas[0] {
                    return gains[0];
                }
                if w >= *omegas.last().expect("non-empty table") {
                    return *gains.last().expect("non-empty table");
                }
                let hi = omegas.partition_point(|&o| o < w);
                let (o0, o1) = (omegas[hi - 1], omegas[hi]);
                let t = (w - o0) / (o1 - o0);
                gains[hi - 1] + t * (gains[hi] - gains[hi - 1])
            }
        }
    }

    /// The flat gain value, if this profile is flat.
    pub fn flat_value(&self) -> Option<f64> {
        match self {
            GainProfile::Flat(g) => Some(*g),
            GainProfile::Table { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GainProfile::Flat(g) => {
                if !(*g >= 1.0) || !g.is_finite() {
                    Err(invalid(format!("gain must be >= 1 and finite, got {g}")))
                } else {
                    Ok(())
                }
            }
            GainProfile::Table { omegas, gains } => {
                if omegas.is_empty() || omegas.len() != gains.len() {
                    return Err(invalid(
                        "gain table must be non-empty with matching lengths",
                    ));
                }
                if !omegas.windows(2).all(|w| w[0] < w[1]) {
                    return Err(invalid(
                        "gain table frequencies must be strictly increasing",
                    ));
                }
                if gains.iter().any(|g| !(*g >= 1.0) || !g.is_finite()) {
                    return Err(invalid("gain must be >= 1 and finite over the whole table"));
                }
                Ok(())
            }
        }
    }
}

/// Receiver settings: squeezer gain, thermal occupation and signal model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReceiverConfig {
    pub gain: GainProfile,
    /// Thermal photon occupation of the measurement and loss environments.
    pub n_thermal: f64,
    pub axion_psd: AxionPsd,
}

impl ReceiverConfig {
    pub fn new(gain: GainProfile, n_thermal: f64, axion_psd: AxionPsd) -> Result<Self> {
        let cfg = Self {
            gain,
            n_thermal,
            axion_psd,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Unsqueezed vacuum receiver with no signal.
    pub fn vacuum() -> Self {
        Self {
            gain: GainProfile::Flat(1.0),
            n_thermal: 0.0,
            axion_psd: AxionPsd::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.gain.validate()?;
        if !(self.n_thermal >= 0.0) || !self.n_thermal.is_finite() {
            return Err(invalid(format!(
                "n_thermal must be >= 0 and finite, got {}",
                self.n_thermal
            )));
        }
        self.axion_psd.validate()
    }
}

/// A frequency grid with associated spectral-density samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumGrid {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
}

impl SpectrumGrid {
    pub fn new(omegas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if omegas.len() != values.len() {
            return Err(invalid("spectrum grid lengths must match"));
        }
        if !omegas.windows(2).all(|w| w[0] < w[1]) {
            return Err(invalid("spectrum frequencies must be strictly increasing"));
        }
        if omegas.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("spectrum entries must be finite"));
        }
        Ok(Self { omegas, values })
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

/// Susceptibility (scattering) matrix at Fourier frequency `omega`, port order
/// `(measurement, loss, axion)`.
///
/// Unitary for every frequency and every valid parameter set.
pub fn susceptibility(omega: f64, params: &CavityParams) -> Matrix3<Complex<f64>> {
    let denom = Complex::new(params.kappa() / 2.0, omega);
    let roots = [
        params.kappa_m.sqrt(),
        params.kappa_loss.sqrt(),
        params.kappa_ax.sqrt(),
    ];
    Matrix3::from_fn(|j, k| {
        let mut numer = Complex::new(-roots[j] * roots[k], 0.0);
        if j == k {
            numer += denom;
        }
        numer / denom
    })
}

/// `|chi_jk(omega)|^2` for a single matrix element.
pub fn susceptibility_sq(omega: f64, params: &CavityParams, j: Port, k: Port) -> f64 {
    susceptibility(omega, params)[(j as usize, k as usize)].norm_sqr()
}

/// Bose-Einstein occupation `1 / (exp(hbar omega_c / kB T) - 1)`.
///
/// `omega_c` is the angular cavity frequency in rad/s and `temperature` is in
/// kelvin; returns 0 at `T = 0` by continuous extension.
pub fn thermal_occupation(omega_c: f64, temperature: f64) -> Result<f64> {
    if !(omega_c > 0.0) || !omega_c.is_finite() {
        return Err(invalid(format!("omega_c must be positive, got {omega_c}")));
    }
    if !(temperature >= 0.0) {
        return Err(invalid(format!(
            "temperature must be >= 0 K, got {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega_c / (KB * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Spectral density of the measured x-quadrature output at `omega`.
///
/// With `G = 1`, `n_thermal = 0` and no signal this is exactly 1/2 at every
/// frequency: vacuum in, vacuum out, by unitarity of the susceptibility.
pub fn output_spectrum(omega: f64, params: &CavityParams, cfg: &ReceiverConfig) -> f64 {
    let chi = susceptibility(omega, params);
    let chi_mm = chi[(0, 0)].norm_sqr();
    let chi_ml = chi[(0, 1)].norm_sqr();
    let chi_ma = chi[(0, 2)].norm_sqr();
    let half = crate::phasespace::VACUUM_VARIANCE;
    let thermal = cfg.n_thermal + half;
    chi_mm * thermal / cfg.gain.value_at(omega)
        + chi_ml * thermal
        + chi_ma * (cfg.axion_psd.value_at(omega) + half)
}

/// Fractional excess output power due to the signal,
/// `sigma = |chi_ma|^2 n_ax / S_x_out`.
pub fn sensitivity(omega: f64, params: &CavityParams, cfg: &ReceiverConfig) -> Result<f64> {
    let s_total = output_spectrum(omega, params, cfg);
    if !(s_total > 0.0) {
        return Err(invalid(format!(
            "output spectrum must be positive, got {s_total}"
        )));
    }
    let chi_ma = susceptibility_sq(omega, params, Port::Measurement, Port::Axion);
    Ok(chi_ma * cfg.axion_psd.value_at(omega) / s_total)
}

/// Closed-form sensitivity in the regime `kappa_ax << kappa_loss ~ kappa_m`:
///
/// ```text
/// sigma = n_ax / (n_T + 1/2) * kappa_ax kappa_m
///         / (kappa_m kappa_loss + beta(omega) / G)
/// beta(omega) = ((kappa_m - kappa_loss)/2)^2 + omega^2
/// ```
///
/// Agrees with [`sensitivity`] up to relative corrections of order
/// `kappa_ax (n_ax + 1/2) / (kappa_loss (n_T + 1/2))`.
pub fn sensitivity_simplified(omega: f64, params: &CavityParams, cfg: &ReceiverConfig) -> f64 {
    let beta = beta_profile(omega, params);
    let g = cfg.gain.value_at(omega);
    let n_ax = cfg.axion_psd.value_at(omega);
    (n_ax / (cfg.n_thermal + 0.5))
        * (params.kappa_ax * params.kappa_m / (params.kappa_m * params.kappa_loss + beta / g))
}

/// `beta(omega) = ((kappa_m - kappa_loss)/2)^2 + omega^2`.
pub fn beta_profile(omega: f64, params: &CavityParams) -> f64 {
    let asym = (params.kappa_m - params.kappa_loss) / 2.0;
    asym * asym + omega * omega
}

/// Frequency at which the sensitivity has fallen to half its on-resonance
/// value, found by bisection on the full [`sensitivity`] to relative
/// tolerance 1e-9.
///
/// From the simplified form the crossing sits at
/// `omega^2 = G kappa_m kappa_loss + beta(0)`, which is the independent check
/// used in the tests. Fails with [`Error::UnboundedBandwidth`] when no
/// crossing exists below `1e9` times the cavity linewidth.
pub fn sensitivity_halfwidth(params: &CavityParams, cfg: &ReceiverConfig) -> Result<f64> {
    let sigma0 = sensitivity(0.0, params, cfg)?;
    if !(sigma0 > 0.0) {
        return Err(invalid(format!("sigma(0) must be positive, got {sigma0}")));
    }
    let target = sigma0 / 2.0;
    let kappa = params.kappa();
    let mut hi = kappa / 2.0;
    let cap = 1e9 * kappa;
    while sensitivity(hi, params, cfg)? > target {
        hi *= 2.0;
        if hi > cap {
            return Err(Error::UnboundedBandwidth {
                searched_up_to: cap,
            });
        }
    }
    let mut lo = 0.0f64;
    // sigma decreases monotonically in |omega|, so plain bisection converges.
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if sensitivity(mid, params, cfg)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
