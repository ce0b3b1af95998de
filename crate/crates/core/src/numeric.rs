//! Small numerical routines shared by the analytic modules.

use crate::{Error, Result};

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Returns `(x_max, f_max)` once the bracket has shrunk to `rel_tol`
/// relative to `x_max`.
pub fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    for _ in 0..500 {
        if (b - a).abs() <= rel_tol * 0.5 * (a.abs() + b.abs()) {
            break;
        }
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }

    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to relative tolerance
/// `rel_tol` (with an absolute floor for integrals near zero).
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Coarse magnitude estimate to scale the relative tolerance.
    let scale = whole.abs().max(1e-300);
    let mut evals = 0usize;
    let value = simpson_step(f, a, b, fa, fm, fb, whole, rel_tol * scale, 50, &mut evals);
    if evals > 2_000_000 {
        return Err(Error::QuadratureNonConvergence {
            achieved: f64::NAN,
            requested: rel_tol,
        });
    }
    Ok(value)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    evals: &mut usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, evals)
            + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, evals)
    }
}
