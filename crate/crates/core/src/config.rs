//! Configuration files and run manifests.
//!
//! A run is described by a single JSON document with sections
//! `{cavity, receiver, signal, simulation, scan}`. Unknown keys are rejected
//! everywhere: this is a units-heavy domain and a misspelled rate silently
//! defaulting is worse than an error.
//!
//! Rates are accepted in either of two unit styles:
//! - dimensionless, suffix `_over_kloss` (ratios to the internal-loss rate);
//! - `_hz`, anchored by an explicit `cavity.kappa_loss_hz`.
//!
//! Internally everything is reduced to `kappa_loss = 1` units (ratios are all
//! the physics here); times carry the suffix `_times_kloss`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cavity::{AxionPsd, CavityParams, GainProfile, ReceiverConfig};
use crate::estimation::ForceSignal;
use crate::langevin::{InitialState, SimulationConfig};
use crate::scan::ScanConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub cavity: CavitySection,
    #[serde(default)]
    pub receiver: ReceiverSection,
    #[serde(default)]
    pub signal: Option<SignalSection>,
    #[serde(default)]
    pub simulation: Option<SimulationSection>,
    #[serde(default)]
    pub scan: Option<ScanSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    /// Anchor for every `_hz` field in the file.
    pub kappa_loss_hz: Option<f64>,
    pub kappa_m_over_kloss: Option<f64>,
    pub kappa_m_hz: Option<f64>,
    pub kappa_ax_over_kloss: Option<f64>,
    pub kappa_ax_hz: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverSection {
    pub gain: Option<f64>,
    pub gain_profile: Option<GainTableSection>,
    pub n_thermal: Option<f64>,
    pub axion: Option<AxionSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainTableSection {
    pub omegas_over_kloss: Vec<f64>,
    pub gains: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, tag = "model", rename_all = "snake_case")]
pub enum AxionSection {
    None,
    DeltaLike {
        n_ax: f64,
    },
    Lorentzian {
        n_ax: f64,
        center_over_kloss: Option<f64>,
        center_hz: Option<f64>,
        fwhm_over_kloss: Option<f64>,
        fwhm_hz: Option<f64>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSection {
    pub f0: f64,
    pub phi: Option<f64>,
    pub delta_over_kloss: Option<f64>,
    pub delta_hz: Option<f64>,
    /// Coherence time in `1/kappa_loss` units; omit for a coherent drive.
    pub tau0_times_kloss: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub dt_times_kloss: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub seed: Option<u64>,
    pub segment_length: Option<usize>,
    pub overlap: Option<f64>,
    pub initial: Option<InitialState>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub delta_a_over_kloss: Option<f64>,
    pub delta_a_hz: Option<f64>,
    pub t_av_constant: Option<f64>,
    pub gains: Option<Vec<f64>>,
    pub kappa_m_grid_over_kloss: Option<Vec<f64>>,
}

/// Fully resolved run description, `kappa_loss = 1` units everywhere.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub params: CavityParams,
    pub receiver: ReceiverConfig,
    pub signal: Option<ForceSignal>,
    pub simulation: Option<ResolvedSimulation>,
    pub scan: Option<ResolvedScan>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedSimulation {
    pub dt: f64,
    pub n_steps: usize,
    pub n_trajectories: usize,
    pub seed: u64,
    pub segment_length: usize,
    pub overlap: f64,
    pub initial: InitialState,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolvedScan {
    pub delta_a: f64,
    pub t_av_constant: f64,
    pub gains: Vec<f64>,
    pub kappa_m_grid: Option<Vec<f64>>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Resolve one rate that may be given dimensionless or in Hz.
fn resolve_rate(
    name: &str,
    over_kloss: Option<f64>,
    hz: Option<f64>,
    anchor_hz: Option<f64>,
) -> Result<Option<f64>> {
    match (over_kloss, hz) {
        (Some(_), Some(_)) => Err(config_err(format!(
            "{name}: give either {name}_over_kloss or {name}_hz, not both"
        ))),
        (Some(v), None) => Ok(Some(v)),
        (None, Some(v)) => {
            let anchor = anchor_hz.ok_or_else(|| {
                config_err(format!(
                    "{name}_hz requires cavity.kappa_loss_hz as the unit anchor"
                ))
            })?;
            if !(anchor > 0.0) {
                return Err(config_err("cavity.kappa_loss_hz must be positive"));
            }
            Ok(Some(v / anchor))
        }
        (None, None) => Ok(None),
    }
}

impl ConfigFile {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let anchor = self.cavity.kappa_loss_hz;
        if let Some(a) = anchor {
            if !(a > 0.0) || !a.is_finite() {
                return Err(config_err(
                    "cavity.kappa_loss_hz must be positive and finite",
                ));
            }
        }
        let kappa_m = resolve_rate(
            "kappa_m",
            self.cavity.kappa_m_over_kloss,
            self.cavity.kappa_m_hz,
            anchor,
        )?
        .ok_or_else(|| config_err("cavity: kappa_m_over_kloss or kappa_m_hz required"))?;
        let kappa_ax = resolve_rate(
            "kappa_ax",
            self.cavity.kappa_ax_over_kloss,
            self.cavity.kappa_ax_hz,
            anchor,
        )?
        .unwrap_or(0.0);
        let params = CavityParams::new(kappa_m, 1.0, kappa_ax)
            .map_err(|e| config_err(format!("cavity: {e}")))?;

        let gain = match (&self.receiver.gain, &self.receiver.gain_profile) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "receiver: give either gain or gain_profile, not both",
                ))
            }
            (Some(g), None) => GainProfile::Flat(*g),
            (None, Some(table)) => GainProfile::Table {
                omegas: table.omegas_over_kloss.clone(),
                gains: table.gains.clone(),
            },
            (None, None) => GainProfile::Flat(1.0),
        };
        let axion_psd = match &self.receiver.axion {
            None | Some(AxionSection::None) => AxionPsd::None,
            Some(AxionSection::DeltaLike { n_ax }) => AxionPsd::DeltaLike { n_ax: *n_ax },
            Some(AxionSection::Lorentzian {
                n_ax,
                center_over_kloss,
                center_hz,
                fwhm_over_kloss,
                fwhm_hz,
            }) => {
                let center =
                    resolve_rate("center", *center_over_kloss, *center_hz, anchor)?.unwrap_or(0.0);
                let fwhm = resolve_rate("fwhm", *fwhm_over_kloss, *fwhm_hz, anchor)?
                    .ok_or_else(|| config_err("axion lorentzian: fwhm required"))?;
                AxionPsd::Lorentzian {
                    center,
                    fwhm,
                    n_ax: *n_ax,
                }
            }
        };
        let receiver = ReceiverConfig::new(gain, self.receiver.n_thermal.unwrap_or(0.0), axion_psd)
            .map_err(|e| config_err(format!("receiver: {e}")))?;

        let signal = match &self.signal {
            None => None,
            Some(section) => {
                let delta =
                    resolve_rate("delta", section.delta_over_kloss, section.delta_hz, anchor)?
                        .unwrap_or(0.0);
                let tau0 = section.tau0_times_kloss.unwrap_or(f64::INFINITY);
                Some(
                    ForceSignal::new(section.f0, section.phi.unwrap_or(0.0), delta, tau0)
                        .map_err(|e| config_err(format!("signal: {e}")))?,
                )
            }
        };

        let simulation = match &self.simulation {
            None => None,
            Some(section) => {
                let overlap = section.overlap.unwrap_or(0.5);
                if !(0.0..1.0).contains(&overlap) {
                    return Err(config_err("simulation.overlap must lie in [0, 1)"));
                }
                Some(ResolvedSimulation {
                    dt: section.dt_times_kloss,
                    n_steps: section.n_steps,
                    n_trajectories: section.n_trajectories,
                    seed: section.seed.unwrap_or(1),
                    segment_length: section.segment_length.unwrap_or(1024),
                    overlap,
                    initial: section.initial.unwrap_or(InitialState::Stationary),
                })
            }
        };

        let scan = match &self.scan {
            None => None,
            Some(section) => {
                let delta_a = resolve_rate(
                    "delta_a",
                    section.delta_a_over_kloss,
                    section.delta_a_hz,
                    anchor,
                )?
                .ok_or_else(|| config_err("scan: delta_a_over_kloss or delta_a_hz required"))?;
                Some(ResolvedScan {
                    delta_a,
                    t_av_constant: section.t_av_constant.unwrap_or(1.0),
                    gains: section.gains.clone().unwrap_or_else(|| vec![1.0]),
                    kappa_m_grid: section.kappa_m_grid_over_kloss.clone(),
                })
            }
        };

        let resolved = ResolvedConfig {
            params,
            receiver,
            signal,
            simulation,
            scan,
        };
        resolved.validate()?;
        Ok(resolved)
    }
}

impl ResolvedConfig {
    fn validate(&self) -> Result<()> {
        self.params
            .validate()
            .map_err(|e| config_err(e.to_string()))?;
        self.receiver
            .validate()
            .map_err(|e| config_err(e.to_string()))?;
        if let Some(signal) = &self.signal {
            signal
                .validate()
                .map_err(|e| config_err(format!("signal: {e}")))?;
        }
        if let Some(sim) = &self.simulation {
            self.simulation_config_with(sim)
                .and_then(|c| c.validate())
                .map_err(|e| config_err(format!("simulation: {e}")))?;
        }
        if let Some(scan) = &self.scan {
            if !(scan.delta_a > 0.0) {
                return Err(config_err("scan.delta_a must be positive"));
            }
            if !(scan.t_av_constant > 0.0) {
                return Err(config_err("scan.t_av_constant must be positive"));
            }
            if scan.gains.is_empty() || scan.gains.iter().any(|g| !(*g >= 1.0)) {
                return Err(config_err(
                    "scan.gains must be a non-empty list of gains >= 1",
                ));
            }
            if let Some(grid) = &scan.kappa_m_grid {
                if grid.iter().any(|k| !(*k > 0.0)) {
                    return Err(config_err("scan.kappa_m_grid entries must be positive"));
                }
            }
        }
        Ok(())
    }

    fn simulation_config_with(&self, sim: &ResolvedSimulation) -> Result<SimulationConfig> {
        Ok(SimulationConfig {
            params: self.params,
            receiver: self.receiver.clone(),
            signal: self.signal,
            dt: sim.dt,
            n_steps: sim.n_steps,
            n_trajectories: sim.n_trajectories,
            seed: sim.seed,
            initial: sim.initial,
        })
    }

    /// Build the simulation config, applying an optional seed override.
    pub fn simulation_config(&self, seed_override: Option<u64>) -> Result<SimulationConfig> {
        let sim = self
            .simulation
            .as_ref()
            .ok_or_else(|| config_err("this command needs a simulation section"))?;
        let mut cfg = self.simulation_config_with(sim)?;
        if let Some(seed) = seed_override {
            cfg.seed = seed;
        }
        Ok(cfg)
    }

    /// Build the scan config for the configured receiver.
    pub fn scan_config(&self) -> Result<ScanConfig> {
        let scan = self
            .scan
            .as_ref()
            .ok_or_else(|| config_err("this command needs a scan section"))?;
        ScanConfig::new(
            self.params,
            self.receiver.clone(),
            scan.delta_a,
            scan.t_av_constant,
        )
        .map_err(|e| config_err(e.to_string()))
    }
}

/// Provenance record written before any data file of a run.
///
/// Reruns from an identical manifest produce byte-identical data files; the
/// manifest carries no timestamps for that reason. Column layouts are stable
/// per `tool_version`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub parameters: serde_json::Value,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        seed: Option<u64>,
        resolved: &ResolvedConfig,
        outputs: &[&str],
    ) -> Result<Self> {
        Ok(Self {
            subcommand: subcommand.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            parameters: serde_json::to_value(resolved)
                .map_err(|e| config_err(format!("manifest serialization: {e}")))?,
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ResolvedConfig> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        file.resolve()
    }

    #[test]
    fn minimal_dimensionless_config() {
        let resolved = parse(r#"{"cavity": {"kappa_m_over_kloss": 2.0}}"#).unwrap();
        assert_eq!(resolved.params.kappa_m, 2.0);
        assert_eq!(resolved.params.kappa_loss, 1.0);
        assert_eq!(resolved.params.kappa_ax, 0.0);
        assert_eq!(resolved.receiver.gain.flat_value(), Some(1.0));
    }

    #[test]
    fn hz_config_resolves_to_ratios() {
        let resolved = parse(
            r#"{
                "cavity": {"kappa_loss_hz": 5000.0, "kappa_m_hz": 10000.0, "kappa_ax_hz": 0.5},
                "scan": {"delta_a_hz": 5.0}
            }"#,
        )
        .unwrap();
        assert_eq!(resolved.params.kappa_m, 2.0);
        assert_eq!(resolved.params.kappa_ax, 1e-4);
        assert_eq!(resolved.scan.unwrap().delta_a, 1e-3);
    }

    #[test]
    fn hz_without_anchor_fails() {
        let err = parse(r#"{"cavity": {"kappa_m_hz": 100.0}}"#).unwrap_err();
        assert!(err.to_string().contains("kappa_loss_hz"));
    }

    #[test]
    fn both_unit_styles_for_one_field_fail() {
        let err = parse(
            r#"{"cavity": {"kappa_loss_hz": 1.0, "kappa_m_hz": 2.0, "kappa_m_over_kloss": 2.0}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("not both"));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse(r#"{"cavity": {"kappa_m_over_kloss": 1.0, "kappa_mm": 3.0}}"#).is_err());
        assert!(parse(r#"{"cavity": {"kappa_m_over_kloss": 1.0}, "extra": {}}"#).is_err());
    }

    #[test]
    fn full_config_round_trip() {
        let resolved = parse(
            r#"{
                "cavity": {"kappa_m_over_kloss": 1.0, "kappa_ax_over_kloss": 1e-6},
                "receiver": {"gain": 10.0, "n_thermal": 0.5,
                             "axion": {"model": "delta_like", "n_ax": 1.0}},
                "signal": {"f0": 0.5, "phi": 1.5707963267948966},
                "simulation": {"dt_times_kloss": 0.02, "n_steps": 4096,
                               "n_trajectories": 4, "seed": 9,
                               "initial": {"kind": "squeezed", "r": 0.5}},
                "scan": {"delta_a_over_kloss": 1e-3, "gains": [1.0, 10.0]}
            }"#,
        )
        .unwrap();
        let sim = resolved.simulation_config(None).unwrap();
        assert_eq!(sim.seed, 9);
        assert!(matches!(sim.initial, InitialState::Squeezed { .. }));
        let sim2 = resolved.simulation_config(Some(77)).unwrap();
        assert_eq!(sim2.seed, 77);
        let scan = resolved.scan_config().unwrap();
        assert_eq!(scan.delta_a, 1e-3);
    }

    #[test]
    fn signal_defaults_to_coherent() {
        let resolved =
            parse(r#"{"cavity": {"kappa_m_over_kloss": 1.0}, "signal": {"f0": 1.0}}"#).unwrap();
        assert!(resolved.signal.unwrap().is_coherent());
    }

    #[test]
    fn bad_physics_rejected_at_resolution() {
        assert!(parse(r#"{"cavity": {"kappa_m_over_kloss": -1.0}}"#).is_err());
        assert!(
            parse(r#"{"cavity": {"kappa_m_over_kloss": 1.0}, "receiver": {"gain": 0.3}}"#).is_err()
        );
        // dt over the stability guard.
        assert!(parse(
            r#"{"cavity": {"kappa_m_over_kloss": 1.0},
                "simulation": {"dt_times_kloss": 0.1, "n_steps": 10, "n_trajectories": 1}}"#
        )
        .is_err());
    }
}
