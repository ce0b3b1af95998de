//! Gaussian-state algebra on quadrature phase space.
//!
//! A state of `N` bosonic modes is represented by the mean vector and
//! covariance matrix of the quadratures `(X1, Y1, ..., XN, YN)`, where
//! `[X, Y] = i`. With that commutator the ground state has
//! `Var(X) = Var(Y) = 1/2` (note: some texts use 1), and its Wigner function
//! is `W0 = (1/pi) exp[-(X^2 + Y^2)]`.
//!
//! All operations are pure: they take a state by reference and return a new
//! one. Displacements and squeezes are symplectic congruences of the
//! covariance matrix; loss channels mix in an environment mode. Measurement
//! operations return marginal statistics only and never condition the state;
//! drawing samples from a state lives in [`crate::langevin`].
//!
//! Squeezing strength can be given either as the squeeze parameter `r` or as
//! the gain `G = exp(2r)`; see [`r_from_gain`] and [`gain_from_r`].

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::{Error, Result};

/// Vacuum variance of a single quadrature.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Largest accepted |r|; `exp(2 * 15)` is still comfortably representable.
pub const MAX_SQUEEZE_PARAM: f64 = 15.0;

/// Covariance condition number beyond which density evaluation refuses.
pub const DEGENERACY_CONDITION_LIMIT: f64 = 1e12;

/// Relative symmetry tolerance for covariance matrices.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Slack allowed below 1/2 for symplectic eigenvalues.
pub const UNCERTAINTY_SLACK: f64 = 1e-9;

/// Which quadrature of a mode a (homodyne) measurement addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    X,
    Y,
}

/// Convert squeezer gain `G` to the squeeze parameter `r = ln(G)/2`.
pub fn r_from_gain(gain: f64) -> Result<f64> {
    if !(gain > 0.0) || !gain.is_finite() {
        return Err(invalid(format!(
            "gain must be positive and finite, got {gain}"
        )));
    }
    Ok(0.5 * gain.ln())
}

/// Convert a squeeze parameter `r` to the gain `G = exp(2r)`.
pub fn gain_from_r(r: f64) -> f64 {
    (2.0 * r).exp()
}

/// The symplectic form `Omega`: block-diagonal `[[0, 1], [-1, 0]]` per mode.
///
/// Encodes `[X, Y] = i` as matrix algebra; a transform `S` is symplectic iff
/// `S^T Omega S = Omega`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    omega
}

/// Gaussian state of `n_modes` bosonic modes.
///
/// `mean` has length `2 * n_modes` and `cov` is the symmetric
/// `2 n_modes x 2 n_modes` covariance of the quadratures, both in the
/// `(X1, Y1, X2, Y2, ...)` ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Ground state of `n_modes` modes: zero mean, covariance `I/2`.
    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(invalid("vacuum requires at least one mode"));
        }
        Ok(Self {
            n_modes,
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes) * VACUUM_VARIANCE,
        })
    }

    /// Build a state from raw moments, validating the invariants.
    pub fn from_moments(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(invalid(format!(
                "mean length must be a positive even number, got {dim}"
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(invalid(format!(
                "covariance must be {dim}x{dim}, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let state = Self {
            n_modes: dim / 2,
            mean,
            cov,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes {
            Err(Error::ModeIndex {
                index: mode,
                n_modes: self.n_modes,
            })
        } else {
            Ok(())
        }
    }

    /// Check the state invariants: finite moments, symmetric covariance
    /// (relative tolerance 1e-12) and symplectic eigenvalues `>= 1/2 - 1e-9`.
    pub fn validate(&self) -> Result<()> {
        if self.mean.iter().any(|v| !v.is_finite()) || self.cov.iter().any(|v| !v.is_finite()) {
            return Err(invalid("state moments must be finite"));
        }
        let scale = self.cov.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        for i in 0..self.cov.nrows() {
            for j in (i + 1)..self.cov.ncols() {
                if (self.cov[(i, j)] - self.cov[(j, i)]).abs() > SYMMETRY_TOLERANCE * scale {
                    return Err(invalid(format!(
                        "covariance not symmetric at ({i},{j}): {} vs {}",
                        self.cov[(i, j)],
                        self.cov[(j, i)]
                    )));
                }
            }
        }
        let nu_min = self
            .symplectic_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if nu_min < VACUUM_VARIANCE - UNCERTAINTY_SLACK {
            return Err(invalid(format!(
                "uncertainty principle violated: smallest symplectic eigenvalue {nu_min} < 1/2"
            )));
        }
        Ok(())
    }

    /// Symplectic eigenvalues of the covariance matrix, sorted ascending.
    ///
    /// These are the moduli of the eigenvalues of `Omega * cov`, which come in
    /// `+/- i nu` pairs; each `nu` is reported once. The uncertainty principle
    /// is `nu >= 1/2` for every mode.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let omega_cov = symplectic_form(self.n_modes) * &self.cov;
        let mut moduli: Vec<f64> = omega_cov
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .collect();
        moduli.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        // Pairs (+i nu, -i nu) have equal modulus; keep one of each.
        moduli.into_iter().skip(1).step_by(2).collect()
    }

    /// Displace one mode in phase space: shifts the mean, covariance unchanged.
    pub fn displace(&self, mode: usize, dx: f64, dy: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !dx.is_finite() || !dy.is_finite() {
            return Err(invalid("displacement must be finite"));
        }
        let mut out = self.clone();
        out.mean[2 * mode] += dx;
        out.mean[2 * mode + 1] += dy;
        Ok(out)
    }

    /// Apply a symplectic matrix to mean and covariance: `mean -> S mean`,
    /// `cov -> S cov S^T`.
    fn apply_symplectic(&self, s: &DMatrix<f64>) -> Self {
        let mean = s * &self.mean;
        let cov = s * &self.cov * s.transpose();
        Self {
            n_modes: self.n_modes,
            mean,
            cov,
        }
    }

    /// Single-mode squeeze: `X -> exp(-r) X`, `Y -> exp(+r) Y` on the chosen
    /// mode, in both mean and covariance.
    ///
    /// Positive `r` squeezes `X`: on vacuum, `Var(X) = exp(-2r)/2 = 1/(2G)`
    /// with gain `G = exp(2r)`.
    pub fn squeeze_single(&self, mode: usize, r: f64) -> Result<Self> {
        self.check_mode(mode)?;
        check_squeeze_param(r)?;
        let mut s = DMatrix::identity(2 * self.n_modes, 2 * self.n_modes);
        s[(2 * mode, 2 * mode)] = (-r).exp();
        s[(2 * mode + 1, 2 * mode + 1)] = r.exp();
        Ok(self.apply_symplectic(&s))
    }

    /// Two-mode squeeze of modes `a` and `b`.
    ///
    /// Squeezes the joint quadratures `Q = Xa - Xb` and `P = Ya + Yb` by
    /// `exp(-r)` while anti-squeezing `R = Xa + Xb` and `S = Ya - Yb` by
    /// `exp(+r)`. On the two-mode vacuum, `Var(Q) = Var(P) = exp(-2r)`
    /// (the unsqueezed value is 1, the sum of two vacuum halves).
    pub fn squeeze_two_mode(&self, mode_a: usize, mode_b: usize, r: f64) -> Result<Self> {
        self.check_mode(mode_a)?;
        self.check_mode(mode_b)?;
        if mode_a == mode_b {
            return Err(Error::EqualModes(mode_a));
        }
        check_squeeze_param(r)?;
        let (c, s) = (r.cosh(), r.sinh());
        let mut t = DMatrix::identity(2 * self.n_modes, 2 * self.n_modes);
        let (xa, ya, xb, yb) = (2 * mode_a, 2 * mode_a + 1, 2 * mode_b, 2 * mode_b + 1);
        t[(xa, xa)] = c;
        t[(xa, xb)] = s;
        t[(xb, xa)] = s;
        t[(xb, xb)] = c;
        t[(ya, ya)] = c;
        t[(ya, yb)] = -s;
        t[(yb, ya)] = -s;
        t[(yb, yb)] = c;
        Ok(self.apply_symplectic(&t))
    }

    /// Pure loss / thermal channel on one mode.
    ///
    /// `eta` is the retained fraction of the field energy: the mode's mean
    /// scales by `sqrt(eta)`, its covariance block becomes
    /// `eta * cov + (1 - eta) * (n_thermal + 1/2) * I`, and cross-covariances
    /// with other modes scale by `sqrt(eta)`.
    pub fn loss_channel(&self, mode: usize, eta: f64, n_thermal: f64) -> Result<Self> {
        self.check_mode(mode)?;
        if !(0.0..=1.0).contains(&eta) {
            return Err(invalid(format!("eta must lie in [0, 1], got {eta}")));
        }
        if !(n_thermal >= 0.0) || !n_thermal.is_finite() {
            return Err(invalid(format!("n_thermal must be >= 0, got {n_thermal}")));
        }
        let sqrt_eta = eta.sqrt();
        let env = (1.0 - eta) * (n_thermal + VACUUM_VARIANCE);
        let mut out = self.clone();
        out.mean[2 * mode] *= sqrt_eta;
        out.mean[2 * mode + 1] *= sqrt_eta;
        for row in 0..2 * self.n_modes {
            for col in 0..2 * self.n_modes {
                let row_in = row / 2 == mode;
                let col_in = col / 2 == mode;
                match (row_in, col_in) {
                    (true, true) => {
                        out.cov[(row, col)] *= eta;
                        if row == col {
                            out.cov[(row, col)] += env;
                        }
                    }
                    (true, false) | (false, true) => out.cov[(row, col)] *= sqrt_eta,
                    (false, false) => {}
                }
            }
        }
        Ok(out)
    }

    /// Marginal statistics of a single-quadrature (homodyne) measurement:
    /// `(mean, variance)` of the selected quadrature. The state is not
    /// conditioned.
    pub fn measure_quadrature_stats(&self, mode: usize, which: Quadrature) -> Result<(f64, f64)> {
        self.check_mode(mode)?;
        let idx = 2 * mode + matches!(which, Quadrature::Y) as usize;
        Ok((self.mean[idx], self.cov[(idx, idx)]))
    }

    /// Statistics of a simultaneous measurement of both quadratures:
    /// `(mean_x, mean_y, var_x, var_y)`.
    ///
    /// Measuring both non-commuting quadratures at once costs exactly half a
    /// photon of added noise per quadrature, so each variance is the marginal
    /// variance plus 1/2 (vacuum reads `Var(X) = Var(Y) = 1`).
    pub fn measure_both_quadratures_stats(&self, mode: usize) -> Result<(f64, f64, f64, f64)> {
        let (mx, vx) = self.measure_quadrature_stats(mode, Quadrature::X)?;
        let (my, vy) = self.measure_quadrature_stats(mode, Quadrature::Y)?;
        Ok((mx, my, vx + VACUUM_VARIANCE, vy + VACUUM_VARIANCE))
    }

    /// Mean and variance of an arbitrary linear combination `c . quadratures`.
    ///
    /// Used for joint observables such as `Q = X1 - X2`.
    pub fn linear_combination_stats(&self, coeffs: &DVector<f64>) -> Result<(f64, f64)> {
        if coeffs.len() != 2 * self.n_modes {
            return Err(invalid(format!(
                "coefficient vector length {} does not match 2 * n_modes = {}",
                coeffs.len(),
                2 * self.n_modes
            )));
        }
        let mean = coeffs.dot(&self.mean);
        let var = (coeffs.transpose() * &self.cov * coeffs)[(0, 0)];
        Ok((mean, var))
    }

    /// Evaluate the Wigner density at a phase-space point of length
    /// `2 * n_modes`.
    ///
    /// For a Gaussian state this is the normal density
    /// `(2 pi)^-N det(cov)^(-1/2) exp(-(z - mean)^T cov^-1 (z - mean) / 2)`;
    /// it integrates to 1. Vacuum at the origin gives `1/pi`.
    pub fn wigner_eval(&self, point: &DVector<f64>) -> Result<f64> {
        if point.len() != 2 * self.n_modes {
            return Err(invalid(format!(
                "point length {} does not match 2 * n_modes = {}",
                point.len(),
                2 * self.n_modes
            )));
        }
        let eigs = self.cov.clone().symmetric_eigenvalues();
        let lo = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(lo > 0.0) || hi / lo > DEGENERACY_CONDITION_LIMIT {
            return Err(Error::DegenerateState {
                cond: if lo > 0.0 { hi / lo } else { f64::INFINITY },
                limit: DEGENERACY_CONDITION_LIMIT,
            });
        }
        let chol = self
            .cov
            .clone()
            .cholesky()
            .ok_or_else(|| invalid("covariance not positive definite"))?;
        let delta = point - &self.mean;
        let solved = chol.solve(&delta);
        let quad_form = delta.dot(&solved);
        let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        let n = self.n_modes as f64;
        Ok((-0.5 * quad_form - 0.5 * log_det - n * (2.0 * std::f64::consts::PI).ln()).exp())
    }

    /// Determinant of the covariance matrix (phase-space volume; preserved by
    /// symplectic transforms, increased by thermal loss).
    pub fn cov_determinant(&self) -> f64 {
        self.cov.clone().determinant()
    }
}

fn check_squeeze_param(r: f64) -> Result<()> {
    if !r.is_finite() {
        return Err(invalid("squeeze parameter must be finite"));
    }
    if r.abs() > MAX_SQUEEZE_PARAM {
        return Err(invalid(format!(
            "|r| = {} exceeds the supported maximum {MAX_SQUEEZE_PARAM}",
            r.abs()
        )));
    }
    Ok(())
}

/// JSON mirror of a state: `{"n_modes", "mean", "cov"}` with `cov` flattened
/// row-major. Used for test fixtures.
#[derive(Debug, Serialize, Deserialize)]
struct GaussianStateJson {
    n_modes: usize,
    mean: Vec<f64>,
    cov: Vec<f64>,
}

impl Serialize for GaussianState {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let dim = 2 * self.n_modes;
        let mut cov = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                cov.push(self.cov[(i, j)]);
            }
        }
        GaussianStateJson {
            n_modes: self.n_modes,
            mean: self.mean.iter().cloned().collect(),
            cov,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GaussianState {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let raw = GaussianStateJson::deserialize(deserializer)?;
        let dim = 2 * raw.n_modes;
        if raw.mean.len() != dim || raw.cov.len() != dim * dim {
            return Err(serde::de::Error::custom(format!(
                "expected mean of length {dim} and cov of length {}, got {} and {}",
                dim * dim,
                raw.mean.len(),
                raw.cov.len()
            )));
        }
        let mean = DVector::from_vec(raw.mean);
        let cov = DMatrix::from_row_slice(dim, dim, &raw.cov);
        GaussianState::from_moments(mean, cov).map_err(serde::de::Error::custom)
    }
}
