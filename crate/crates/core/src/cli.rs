//! Command implementations behind the `squeezescan` binary.
//!
//! Each command resolves a config, writes a `run_manifest.json` first and
//! then its data files into the output directory. Data files are
//! deterministic: identical manifests reproduce byte-identical outputs.
//! Every CSV references the manifest in a leading comment line; JSON outputs
//! carry a `manifest` field.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::cavity::{output_spectrum, sensitivity, susceptibility_sq, Port, SpectrumGrid};
use crate::config::{ResolvedConfig, RunManifest};
use crate::estimation;
use crate::langevin::{self, Protocol};
use crate::phasespace::{r_from_gain, GaussianState};
use crate::scan;
use crate::{Error, Result};

/// Manifest file name; every data file references it.
pub const MANIFEST_NAME: &str = "run_manifest.json";

/// Options shared by all commands.
#[derive(Debug, Clone)]
pub struct CommonOpts {
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub grid_points: usize,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Extra options of the `montecarlo` command.
#[derive(Debug, Clone)]
pub struct MonteCarloOpts {
    pub segment_length: Option<usize>,
    pub overlap: Option<f64>,
    /// Per-bin relative tolerance of the measured-vs-analytic check.
    pub tolerance: f64,
    pub dump_trajectory: bool,
}

impl Default for MonteCarloOpts {
    fn default() -> Self {
        Self {
            segment_length: None,
            overlap: None,
            tolerance: 0.05,
            dump_trajectory: false,
        }
    }
}

/// Largest trajectory dump accepted (rows).
const TRAJECTORY_DUMP_LIMIT: usize = 1 << 20;

/// What a command produced, for logging and tests.
#[derive(Debug, Clone)]
pub struct CommandReport {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Map an error to the process exit code contract:
/// 2 config, 3 numerical, 4 statistical.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::InvalidParameter(_)
        | Error::ModeIndex { .. }
        | Error::EqualModes(_)
        | Error::InsufficientData(_)
        | Error::Io(_) => 2,
        Error::DegenerateState { .. }
        | Error::UnboundedBandwidth { .. }
        | Error::QuadratureNonConvergence { .. }
        | Error::NonUnimodal { .. } => 3,
        Error::StatisticalFailure(_) => 4,
    }
}

/// One output table, written as CSV (with a manifest comment line) or as a
/// JSON array of row objects.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn write(&self, dir: &Path, basename: &str, format: OutputFormat) -> Result<PathBuf> {
        match format {
            OutputFormat::Csv => {
                let mut text = String::new();
                writeln!(text, "# manifest: {MANIFEST_NAME}").expect("string write");
                writeln!(text, "{}", self.columns.join(",")).expect("string write");
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                    writeln!(text, "{}", cells.join(",")).expect("string write");
                }
                let path = dir.join(format!("{basename}.csv"));
                fs::write(&path, text)?;
                Ok(path)
            }
            OutputFormat::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = serde_json::Map::new();
                        for (name, value) in self.columns.iter().zip(row) {
                            obj.insert(name.to_string(), json!(value));
                        }
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                let doc = json!({ "manifest": MANIFEST_NAME, "rows": rows });
                let path = dir.join(format!("{basename}.json"));
                fs::write(
                    &path,
                    serde_json::to_string_pretty(&doc).expect("json encode"),
                )?;
                Ok(path)
            }
        }
    }
}

fn write_manifest(
    dir: &Path,
    subcommand: &str,
    seed: Option<u64>,
    resolved: &ResolvedConfig,
    outputs: &[&str],
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let manifest = RunManifest::new(subcommand, seed, resolved, outputs)?;
    let path = dir.join(MANIFEST_NAME);
    fs::write(
        &path,
        serde_json::to_string_pretty(&manifest).expect("json encode"),
    )?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, basename: &str, value: &T) -> Result<PathBuf> {
    let path = dir.join(format!("{basename}.json"));
    fs::write(
        &path,
        serde_json::to_string_pretty(value).expect("json encode"),
    )?;
    Ok(path)
}

fn data_ext(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

/// Export susceptibilities, output spectrum and sensitivity over a frequency
/// grid `omega in [0, 5 kappa]`.
///
/// Columns: `omega_over_kloss, chi_mm_sq, chi_ml_sq, chi_ma_sq, S_x_out, sigma`.
pub fn cmd_spectrum(resolved: &ResolvedConfig, opts: &CommonOpts) -> Result<CommandReport> {
    if opts.grid_points < 2 {
        return Err(Error::Config("grid points must be at least 2".into()));
    }
    let data_name = format!("spectrum.{}", data_ext(opts.format));
    let manifest = write_manifest(&opts.out_dir, "spectrum", None, resolved, &[&data_name])?;

    let params = &resolved.params;
    let receiver = &resolved.receiver;
    let omega_max = 5.0 * params.kappa();
    let mut table = Table::new(vec![
        "omega_over_kloss",
        "chi_mm_sq",
        "chi_ml_sq",
        "chi_ma_sq",
        "S_x_out",
        "sigma",
    ]);
    for i in 0..opts.grid_points {
        let omega = omega_max * i as f64 / (opts.grid_points - 1) as f64;
        table.push(vec![
            omega,
            susceptibility_sq(omega, params, Port::Measurement, Port::Measurement),
            susceptibility_sq(omega, params, Port::Measurement, Port::Loss),
            susceptibility_sq(omega, params, Port::Measurement, Port::Axion),
            output_spectrum(omega, params, receiver),
            sensitivity(omega, params, receiver)?,
        ]);
    }
    let data = table.write(&opts.out_dir, "spectrum", opts.format)?;
    let sigma0 = sensitivity(0.0, params, receiver)?;
    Ok(CommandReport {
        files: vec![manifest, data],
        summary: format!(
            "spectrum: {} points, sigma(0) = {sigma0:.6e}",
            opts.grid_points
        ),
    })
}

/// Optimize the coupling for every configured gain.
///
/// Columns: `gain, kappa_m_over_kloss, rate_normalized, advantage`
/// (rates in `kappa_loss` units; `advantage` relative to the G = 1 optimum).
pub fn cmd_optimize(resolved: &ResolvedConfig, opts: &CommonOpts) -> Result<CommandReport> {
    let scan_cfg = resolved.scan_config()?;
    let gains = resolved
        .scan
        .as_ref()
        .expect("scan_config checked")
        .gains
        .clone();
    let data_name = format!("optimize.{}", data_ext(opts.format));
    let manifest = write_manifest(&opts.out_dir, "optimize", None, resolved, &[&data_name])?;

    let mut table = Table::new(vec![
        "gain",
        "kappa_m_over_kloss",
        "rate_normalized",
        "advantage",
    ]);
    let mut last = None;
    for gain in &gains {
        let opt = scan::optimize_kappa_m(*gain, &scan_cfg)?;
        table.push(vec![*gain, opt.kappa_m_opt, opt.rate_opt, opt.advantage]);
        last = Some(opt);
    }
    let data = table.write(&opts.out_dir, "optimize", opts.format)?;
    let summary = match last {
        Some(opt) => format!(
            "optimize: {} gain(s), final kappa_m_opt = {:.6} kappa_loss, advantage = {:.4}",
            gains.len(),
            opt.kappa_m_opt,
            opt.advantage
        ),
        None => "optimize: no gains configured".to_string(),
    };
    Ok(CommandReport {
        files: vec![manifest, data],
        summary,
    })
}

/// Sweep the scan rate over a `(gain, kappa_m)` grid.
///
/// Columns as in [`cmd_optimize`]; `advantage` is each rate over the
/// unsqueezed optimum.
pub fn cmd_scan_rate(resolved: &ResolvedConfig, opts: &CommonOpts) -> Result<CommandReport> {
    let scan_cfg = resolved.scan_config()?;
    let scan_section = resolved.scan.as_ref().expect("scan_config checked");
    let gains = scan_section.gains.clone();
    let grid = match &scan_section.kappa_m_grid {
        Some(grid) => grid.clone(),
        None => {
            let max_gain = gains.iter().cloned().fold(1.0, f64::max);
            let hi: f64 = 20.0 * max_gain;
            let lo: f64 = 0.1;
            let n = opts.grid_points.max(2);
            (0..n)
                .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    };
    let data_name = format!("scan_rate.{}", data_ext(opts.format));
    let manifest = write_manifest(&opts.out_dir, "scan-rate", None, resolved, &[&data_name])?;

    let baseline = scan::optimize_kappa_m(1.0, &scan_cfg)?.rate_opt;
    let mut table = Table::new(vec![
        "gain",
        "kappa_m_over_kloss",
        "rate_normalized",
        "advantage",
    ]);
    for gain in &gains {
        for kappa_m in &grid {
            let rate = scan::scan_rate_closed_form(*gain, *kappa_m, &scan_cfg)?;
            table.push(vec![*gain, *kappa_m, rate, rate / baseline]);
        }
    }
    let data = table.write(&opts.out_dir, "scan_rate", opts.format)?;
    Ok(CommandReport {
        files: vec![manifest, data],
        summary: format!("scan-rate: {} rows", gains.len() * grid.len()),
    })
}

/// Analytic output spectrum on the Welch bin grid, for comparison tables.
fn analytic_on_grid(resolved: &ResolvedConfig, grid: &SpectrumGrid) -> Vec<f64> {
    grid.omegas
        .iter()
        .map(|&omega| output_spectrum(omega, &resolved.params, &resolved.receiver))
        .collect()
}

/// Integrate the configured batch, Welch-average the measured output
/// spectrum and compare it per-bin against the analytic model over
/// `omega in [0, 5 kappa]`.
///
/// Columns: `omega_over_kloss, S_measured, S_analytic, rel_err`. A summary
/// JSON records the worst bin; exceeding the tolerance is a statistical
/// failure (exit code 4) after all files are written.
pub fn cmd_montecarlo(
    resolved: &ResolvedConfig,
    opts: &CommonOpts,
    mc: &MonteCarloOpts,
) -> Result<CommandReport> {
    let sim = resolved.simulation_config(opts.seed)?;
    sim.validate()?;
    let sim_section = resolved
        .simulation
        .as_ref()
        .expect("simulation_config checked");
    let segment_length = mc.segment_length.unwrap_or(sim_section.segment_length);
    let overlap = mc.overlap.unwrap_or(sim_section.overlap);
    if mc.dump_trajectory && sim.n_steps > TRAJECTORY_DUMP_LIMIT {
        return Err(Error::Config(format!(
            "trajectory dump limited to {TRAJECTORY_DUMP_LIMIT} steps, configured {}",
            sim.n_steps
        )));
    }

    let psd_name = format!("montecarlo_psd.{}", data_ext(opts.format));
    let mut outputs: Vec<String> = vec![psd_name, "montecarlo_summary.json".into()];
    if mc.dump_trajectory {
        outputs.push("trajectory.csv".into());
    }
    let output_refs: Vec<&str> = outputs.iter().map(|s| s.as_str()).collect();
    let manifest = write_manifest(
        &opts.out_dir,
        "montecarlo",
        Some(sim.seed),
        resolved,
        &output_refs,
    )?;
    let mut files = vec![manifest];

    let (grid, n_segments) = langevin::estimate_psd_streaming(&sim, segment_length, overlap)?;
    let analytic = analytic_on_grid(resolved, &grid);

    let omega_cut = 5.0 * resolved.params.kappa();
    let mut table = Table::new(vec![
        "omega_over_kloss",
        "S_measured",
        "S_analytic",
        "rel_err",
    ]);
    let mut worst: Option<(f64, f64)> = None; // (omega, rel_err)
    for ((&omega, &measured), &expect) in grid
        .omegas
        .iter()
        .zip(grid.values.iter())
        .zip(analytic.iter())
    {
        let rel_err = (measured - expect) / expect;
        table.push(vec![omega, measured, expect, rel_err]);
        if omega <= omega_cut && worst.is_none_or(|(_, w)| rel_err.abs() > w.abs()) {
            worst = Some((omega, rel_err));
        }
    }
    files.push(table.write(&opts.out_dir, "montecarlo_psd", opts.format)?);

    if mc.dump_trajectory {
        let traj = langevin::integrate(&sim)?;
        let mut dump = Table::new(vec!["time", "x", "y"]);
        for i in 0..traj.times.len() {
            dump.push(vec![traj.times[i], traj.x[i], traj.y[i]]);
        }
        files.push(dump.write(&opts.out_dir, "trajectory", OutputFormat::Csv)?);
    }

    let (worst_omega, worst_err) = worst.expect("grid is non-empty");
    let pass = worst_err.abs() <= mc.tolerance;
    let summary_doc = json!({
        "manifest": MANIFEST_NAME,
        "n_segments": n_segments,
        "segment_length": segment_length,
        "overlap": overlap,
        "omega_max_over_kloss": omega_cut,
        "tolerance": mc.tolerance,
        "worst_bin": { "omega_over_kloss": worst_omega, "rel_err": worst_err },
        "pass": pass,
    });
    files.push(write_json(
        &opts.out_dir,
        "montecarlo_summary",
        &summary_doc,
    )?);

    let summary = format!(
        "montecarlo: {n_segments} segments, worst bin at omega = {worst_omega:.4} with \
         rel_err = {worst_err:+.4} (tolerance {})",
        mc.tolerance
    );
    if !pass {
        return Err(Error::StatisticalFailure(summary));
    }
    Ok(CommandReport { files, summary })
}

/// Closed-form vs Monte Carlo estimator variances.
///
/// Columns: `protocol, gain, t_s, var_closed, var_mc, se_mc, z_score` with
/// protocol encoded as 0 = CSL, 1 = squeezed, 2 = two-mode, 3 = dissipative.
/// The dissipative row always runs at critical coupling
/// (`kappa_m = kappa_loss`, no signal port), where the output-record
/// estimator attains `kappa / (4 t_s)`.
pub fn cmd_estimate(resolved: &ResolvedConfig, opts: &CommonOpts) -> Result<CommandReport> {
    let sim = resolved.simulation_config(opts.seed)?;
    let data_name = format!("estimate.{}", data_ext(opts.format));
    let manifest = write_manifest(
        &opts.out_dir,
        "estimate",
        Some(sim.seed),
        resolved,
        &[&data_name],
    )?;

    let t_s = sim.total_time();
    let gain = resolved
        .receiver
        .gain
        .flat_value()
        .ok_or_else(|| Error::Config("estimate needs a flat receiver gain".into()))?;
    let mut table = Table::new(vec![
        "protocol",
        "gain",
        "t_s",
        "var_closed",
        "var_mc",
        "se_mc",
        "z_score",
    ]);

    let mut push_row = |proto: f64, g: f64, closed: f64, mc: langevin::VarianceEstimate| {
        let z = (mc.variance - closed) / mc.variance_std_error;
        table.push(vec![
            proto,
            g,
            t_s,
            closed,
            mc.variance,
            mc.variance_std_error,
            z,
        ]);
    };

    let csl = langevin::estimate_force_variance(&sim, Protocol::Csl)?;
    push_row(0.0, 1.0, estimation::csl_variance(t_s)?, csl);

    let squeezed = langevin::estimate_force_variance(&sim, Protocol::Squeezed)?;
    push_row(
        1.0,
        gain,
        estimation::squeezed_variance(gain, t_s)?,
        squeezed,
    );

    // Two-mode protocol: sample the entangled state directly, read Q = X1 - X2.
    let r = r_from_gain(gain)?;
    let f_y = resolved.signal.map(|s| s.f0 * s.phi.sin()).unwrap_or(0.0);
    let state = GaussianState::vacuum(2)?
        .squeeze_two_mode(0, 1, r)?
        .displace(0, f_y * t_s, 0.0)?;
    let two_mode = two_mode_mc(&state, t_s, sim.n_trajectories, sim.seed)?;
    push_row(
        2.0,
        gain,
        estimation::two_mode_variances(r, t_s)?.0,
        two_mode,
    );

    // Dissipative protocol at critical coupling.
    let mut dissipative_sim = sim.clone();
    dissipative_sim.params = crate::cavity::CavityParams::new(1.0, 1.0, 0.0)?;
    let kappa = dissipative_sim.params.kappa();
    let dissipative = langevin::estimate_force_variance(&dissipative_sim, Protocol::Dissipative)?;
    push_row(
        3.0,
        1.0,
        estimation::dissipative_variance(kappa, t_s)?,
        dissipative,
    );

    let data = table.write(&opts.out_dir, "estimate", opts.format)?;
    Ok(CommandReport {
        files: vec![manifest, data],
        summary: format!(
            "estimate: 4 protocols over t_s = {t_s} at {} repetitions",
            sim.n_trajectories
        ),
    })
}

fn two_mode_mc(
    state: &GaussianState,
    t_s: f64,
    n: usize,
    seed: u64,
) -> Result<langevin::VarianceEstimate> {
    use rand::SeedableRng;
    if n < 100 {
        return Err(Error::InsufficientData(format!(
            "need at least 100 trajectories for a variance estimate, got {n}"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let draw = langevin::sample_state(state, &mut rng)?;
        samples.push((draw[0] - draw[2]) / t_s);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let variance = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n as f64 - 1.0);
    Ok(langevin::VarianceEstimate {
        mean,
        variance,
        variance_std_error: variance * (2.0 / (n as f64 - 1.0)).sqrt(),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigFile;

    fn resolved(text: &str) -> ResolvedConfig {
        let file: ConfigFile = serde_json::from_str(text).unwrap();
        file.resolve().unwrap()
    }

    fn opts(dir: &Path) -> CommonOpts {
        CommonOpts {
            out_dir: dir.to_path_buf(),
            seed: None,
            grid_points: 101,
            format: OutputFormat::Csv,
        }
    }

    #[test]
    fn exit_codes_follow_contract() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::InvalidParameter("x".into())), 2);
        assert_eq!(
            exit_code(&Error::UnboundedBandwidth {
                searched_up_to: 1.0
            }),
            3
        );
        assert_eq!(
            exit_code(&Error::NonUnimodal {
                n_maxima: 2,
                grid_dump: String::new()
            }),
            3
        );
        assert_eq!(exit_code(&Error::StatisticalFailure("x".into())), 4);
    }

    #[test]
    fn spectrum_writes_manifest_then_data() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = resolved(
            r#"{
                "cavity": {"kappa_m_over_kloss": 1.0, "kappa_ax_over_kloss": 1e-3},
                "receiver": {"axion": {"model": "delta_like", "n_ax": 1.0}}
            }"#,
        );
        let report = cmd_spectrum(&cfg, &opts(dir.path())).unwrap();
        assert_eq!(report.files.len(), 2);
        let manifest_text = fs::read_to_string(dir.path().join(MANIFEST_NAME)).unwrap();
        assert!(manifest_text.contains("\"subcommand\": \"spectrum\""));
        let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "# manifest: run_manifest.json");
        assert_eq!(
            lines.next().unwrap(),
            "omega_over_kloss,chi_mm_sq,chi_ml_sq,chi_ma_sq,S_x_out,sigma"
        );
        assert_eq!(csv.lines().count(), 2 + 101);
    }

    #[test]
    fn spectrum_matches_susceptibility_values_at_resonance() {
        // kappa_ax = kappa / 1000 with kappa_m = kappa_loss: on resonance
        // chi_mm_sq is tiny, chi_ml_sq near 1 and chi_ma_sq = 4 kappa_m
        // kappa_ax / kappa^2.
        let dir = tempfile::tempdir().unwrap();
        // kappa_ax/kloss = x with kappa = (2 + x) kloss and x = kappa/1000
        // means x = 2/999.
        let x = 2.0 / 999.0;
        let cfg = resolved(&format!(
            r#"{{
                "cavity": {{"kappa_m_over_kloss": 1.0, "kappa_ax_over_kloss": {x}}},
                "receiver": {{"axion": {{"model": "delta_like", "n_ax": 1.0}}}}
            }}"#
        ));
        let report = cmd_spectrum(&cfg, &opts(dir.path())).unwrap();
        let csv = fs::read_to_string(&report.files[1]).unwrap();
        let first: Vec<f64> = csv
            .lines()
            .nth(2)
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        let kappa = 2.0 + x;
        assert!(first[1] < 1e-5, "chi_mm_sq(0) = {}", first[1]);
        assert!((first[2] - 1.0).abs() < 1e-2, "chi_ml_sq(0) = {}", first[2]);
        let expect_ma = 4.0 * 1.0 * x / (kappa * kappa);
        assert!(
            (first[3] - expect_ma).abs() < 1e-12,
            "chi_ma_sq(0) = {} vs {expect_ma}",
            first[3]
        );
    }

    #[test]
    fn spectrum_sigma_column_zero_without_signal() {
        let dir = tempfile::tempdir().unwrap();
        let cfg =
            resolved(r#"{"cavity": {"kappa_m_over_kloss": 1.0, "kappa_ax_over_kloss": 1e-3}}"#);
        let report = cmd_spectrum(&cfg, &opts(dir.path())).unwrap();
        let csv = fs::read_to_string(&report.files[1]).unwrap();
        for line in csv.lines().skip(2) {
            let sigma: f64 = line.split(',').next_back().unwrap().parse().unwrap();
            assert_eq!(sigma, 0.0);
        }
    }

    #[test]
    fn optimize_reports_paper_coupling() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = resolved(
            r#"{
                "cavity": {"kappa_m_over_kloss": 1.0, "kappa_ax_over_kloss": 1e-4},
                "receiver": {"axion": {"model": "delta_like", "n_ax": 1.0}},
                "scan": {"delta_a_over_kloss": 1e-3, "gains": [1.0]}
            }"#,
        );
        let report = cmd_optimize(&cfg, &opts(dir.path())).unwrap();
        let csv = fs::read_to_string(&report.files[1]).unwrap();
        let row: Vec<f64> = csv
            .lines()
            .nth(2)
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert!((row[1] - 2.0).abs() < 1e-5, "kappa_m_opt = {}", row[1]);
        assert_eq!(row[3], 1.0);
    }

    #[test]
    fn identical_runs_are_byte_identical() {
        let text = r#"{
            "cavity": {"kappa_m_over_kloss": 1.0, "kappa_ax_over_kloss": 1e-4},
            "receiver": {"axion": {"model": "delta_like", "n_ax": 1.0}},
            "scan": {"delta_a_over_kloss": 1e-3, "gains": [1.0, 10.0]}
        }"#;
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        cmd_optimize(&resolved(text), &opts(dir_a.path())).unwrap();
        cmd_optimize(&resolved(text), &opts(dir_b.path())).unwrap();
        for name in ["run_manifest.json", "optimize.csv"] {
            let a = fs::read(dir_a.path().join(name)).unwrap();
            let b = fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical runs");
        }
    }

    #[test]
    fn json_format_emits_rows() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = resolved(r#"{"cavity": {"kappa_m_over_kloss": 1.0}}"#);
        let mut o = opts(dir.path());
        o.format = OutputFormat::Json;
        o.grid_points = 11;
        let report = cmd_spectrum(&cfg, &o).unwrap();
        let doc: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&report.files[1]).unwrap()).unwrap();
        assert_eq!(doc["manifest"], MANIFEST_NAME);
        assert_eq!(doc["rows"].as_array().unwrap().len(), 11);
    }

    #[test]
    fn estimate_rows_match_closed_forms_loosely() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = resolved(
            r#"{
                "cavity": {"kappa_m_over_kloss": 1.0},
                "receiver": {"gain": 10.0},
                "signal": {"f0": 0.5, "phi": 1.5707963267948966},
                "simulation": {"dt_times_kloss": 0.02, "n_steps": 1000,
                               "n_trajectories": 5000, "seed": 3}
            }"#,
        );
        let report = cmd_estimate(&cfg, &opts(dir.path())).unwrap();
        let csv = fs::read_to_string(&report.files[1]).unwrap();
        let rows: Vec<Vec<f64>> = csv
            .lines()
            .skip(2)
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            let z = row[6];
            assert!(z.abs() < 4.0, "z-score {z} too large in row {row:?}");
        }
    }

    #[test]
    fn montecarlo_pass_and_failure_paths() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = resolved(
            r#"{
                "cavity": {"kappa_m_over_kloss": 1.0},
                "simulation": {"dt_times_kloss": 0.02, "n_steps": 32768,
                               "n_trajectories": 4, "seed": 5,
                               "segment_length": 256}
            }"#,
        );
        let mc = MonteCarloOpts {
            tolerance: 0.2,
            ..MonteCarloOpts::default()
        };
        let report = cmd_montecarlo(&cfg, &opts(dir.path()), &mc).unwrap();
        assert!(report.summary.contains("segments"));
        let summary: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(dir.path().join("montecarlo_summary.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(summary["pass"], true);

        // An absurd tolerance turns the same run into a statistical failure,
        // after writing all files.
        let dir2 = tempfile::tempdir().unwrap();
        let mc_fail = MonteCarloOpts {
            tolerance: 1e-6,
            ..MonteCarloOpts::default()
        };
        let err = cmd_montecarlo(&cfg, &opts(dir2.path()), &mc_fail).unwrap_err();
        assert_eq!(exit_code(&err), 4);
        assert!(dir2.path().join("montecarlo_psd.csv").exists());
    }
}
