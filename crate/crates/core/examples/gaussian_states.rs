//! Tour of the Gaussian phase-space layer: vacuum, displacement, squeezing,
//! loss channels, measurement statistics and the Wigner density.
//!
//! ```bash
//! cargo run --example gaussian_states
//! ```

use nalgebra::DVector;
use squeezescan::phasespace::{gain_from_r, r_from_gain, GaussianState, Quadrature};

fn main() -> squeezescan::Result<()> {
    println!("== vacuum ==");
    let vacuum = GaussianState::vacuum(1)?;
    let (mean, var) = vacuum.measure_quadrature_stats(0, Quadrature::X)?;
    println!("X homodyne: mean = {mean}, variance = {var} (vacuum convention 1/2)");
    let (_, _, vx, vy) = vacuum.measure_both_quadratures_stats(0)?;
    println!("simultaneous X and Y: variances = ({vx}, {vy}) (half photon added each)");
    let origin = DVector::from_row_slice(&[0.0, 0.0]);
    println!(
        "Wigner density at the origin: {} (= 1/pi)",
        vacuum.wigner_eval(&origin)?
    );

    println!("\n== displaced, squeezed state ==");
    let gain = 10.0;
    let r = r_from_gain(gain)?;
    println!(
        "gain G = {gain} corresponds to r = {r:.6} (G = exp(2r) = {:.3})",
        gain_from_r(r)
    );
    let state = vacuum.squeeze_single(0, r)?.displace(0, 3.0, -1.0)?;
    let (mx, varx) = state.measure_quadrature_stats(0, Quadrature::X)?;
    let (my, vary) = state.measure_quadrature_stats(0, Quadrature::Y)?;
    println!("X: mean = {mx}, variance = {varx:.6} (= 1/(2G))");
    println!("Y: mean = {my}, variance = {vary:.6} (= G/2, anti-squeezed)");
    println!(
        "symplectic eigenvalues: {:?} (pure state: all 1/2)",
        state.symplectic_eigenvalues()
    );

    println!("\n== loss channel ==");
    let lossy = state.loss_channel(0, 0.5, 0.25)?;
    let (_, varx_lossy) = lossy.measure_quadrature_stats(0, Quadrature::X)?;
    println!("after eta = 0.5, n_thermal = 0.25: Var(X) = {varx_lossy:.6}");
    println!(
        "covariance determinant grew from {:.6e} to {:.6e} (purity lost)",
        state.cov_determinant(),
        lossy.cov_determinant()
    );

    println!("\n== two-mode squeezed (EPR) state ==");
    let epr = GaussianState::vacuum(2)?.squeeze_two_mode(0, 1, 1.0)?;
    let q = DVector::from_row_slice(&[1.0, 0.0, -1.0, 0.0]);
    let r_obs = DVector::from_row_slice(&[1.0, 0.0, 1.0, 0.0]);
    let (_, var_q) = epr.linear_combination_stats(&q)?;
    let (_, var_r) = epr.linear_combination_stats(&r_obs)?;
    println!("Var(Q = X1 - X2) = {var_q:.6} (squeezed, exp(-2r))");
    println!("Var(R = X1 + X2) = {var_r:.6} (anti-squeezed, exp(+2r))");
    println!(
        "product = {:.6} (saturates the joint uncertainty)",
        var_q * var_r
    );

    println!("\n== JSON fixture ==");
    println!("{}", serde_json::to_string(&epr).expect("serializable"));
    Ok(())
}
