//! Config file loading, saving, and hashing.
//!
//! The on-disk format is flat TOML with four sections. Every field is
//! explicit (no silent defaults), so a config file is a complete record of
//! a scenario. `ConfigFile::default()` is the shipped baseline; loading
//! then re-serializing any file is byte-idempotent.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics::IsolatedAgents;
use crate::perception::{NoiseSchedule, Perturbation};
use crate::sim::{InitConfig, ScenarioConfig};
use crate::state::{FlockParams, Model};

/// Whether a run perceives exact or delayed-and-noisy neighbor states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Nominal,
    Perturbed,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Nominal => write!(f, "nominal"),
            Mode::Perturbed => write!(f, "perturbed"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nominal" => Ok(Mode::Nominal),
            "perturbed" => Ok(Mode::Perturbed),
            other => Err(Error::InvalidArgument(format!(
                "unknown mode `{other}` (expected `nominal` or `perturbed`)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub model: Model,
    pub n: usize,
    pub m: usize,
    pub dt: f64,
    pub t_final: f64,
    pub r: f64,
    pub delta: f64,
    pub theta: f64,
    pub t_ph: f64,
    pub tau: f64,
    pub v_max: f64,
    pub u_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSection {
    pub base_p: f64,
    pub amp_p: f64,
    pub base_v: f64,
    pub amp_v: f64,
    pub base_u: f64,
    pub amp_u: f64,
    pub omega: f64,
    pub phase_p: f64,
    pub phase_v: f64,
    pub phase_u: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub mode: Mode,
    pub seed: u64,
    pub record_every: usize,
    pub gamma_isolated: IsolatedAgents,
}

/// The four-section on-disk config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub model: ModelSection,
    pub init: InitConfig,
    pub noise: NoiseSection,
    pub run: RunSection,
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile::from_scenario(&ScenarioConfig::default(), Mode::Nominal)
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml_string())?;
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialization cannot fail")
    }

    /// SHA-256 over the canonical serialization: changes iff any semantic
    /// field changes.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_toml_string().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn noise_schedule(&self) -> NoiseSchedule {
        NoiseSchedule {
            base_p: self.noise.base_p,
            amp_p: self.noise.amp_p,
            base_v: self.noise.base_v,
            amp_v: self.noise.amp_v,
            base_u: self.noise.base_u,
            amp_u: self.noise.amp_u,
            omega: self.noise.omega,
            phase_p: self.noise.phase_p,
            phase_v: self.noise.phase_v,
            phase_u: self.noise.phase_u,
        }
    }

    /// Resolve to a validated runnable scenario.
    pub fn to_scenario(&self) -> Result<ScenarioConfig> {
        let params = FlockParams {
            n: self.model.n,
            m: self.model.m,
            dt: self.model.dt,
            t_final: self.model.t_final,
            r: self.model.r,
            delta: self.model.delta,
            theta: self.model.theta,
            t_ph: self.model.t_ph,
            tau: self.model.tau,
            v_max: self.model.v_max,
            u_max: self.model.u_max,
            model: self.model.model,
        };
        let perturbation = match self.run.mode {
            Mode::Nominal => Perturbation::Nominal,
            Mode::Perturbed => Perturbation::DelayNoise(self.noise_schedule()),
        };
        let scenario = ScenarioConfig {
            params,
            perturbation,
            init: self.init.clone(),
            seed: self.run.seed,
            record_every: self.run.record_every,
            gamma_isolated: self.run.gamma_isolated,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Reverse mapping, used to echo resolved configs and to build the
    /// shipped default.
    pub fn from_scenario(scenario: &ScenarioConfig, mode: Mode) -> ConfigFile {
        let p = &scenario.params;
        let schedule = match &scenario.perturbation {
            Perturbation::DelayNoise(s) => s.clone(),
            Perturbation::Nominal => NoiseSchedule::default(),
        };
        ConfigFile {
            model: ModelSection {
                model: p.model,
                n: p.n,
                m: p.m,
                dt: p.dt,
                t_final: p.t_final,
                r: p.r,
                delta: p.delta,
                theta: p.theta,
                t_ph: p.t_ph,
                tau: p.tau,
                v_max: p.v_max,
                u_max: p.u_max,
            },
            init: scenario.init.clone(),
            noise: NoiseSection {
                base_p: schedule.base_p,
                amp_p: schedule.amp_p,
                base_v: schedule.base_v,
                amp_v: schedule.amp_v,
                base_u: schedule.base_u,
                amp_u: schedule.amp_u,
                omega: schedule.omega,
                phase_p: schedule.phase_p,
                phase_v: schedule.phase_v,
                phase_u: schedule.phase_u,
            },
            run: RunSection {
                mode,
                seed: scenario.seed,
                record_every: scenario.record_every,
                gamma_isolated: scenario.gamma_isolated,
            },
        }
    }
}
