//! TOML problem description: layers, materials and optional run sections.
//!
//! ```toml
//! [[layers]]
//! r_start = 1.0
//! r_end = 1.5
//! material = "steel"
//! cells = 16
//!
//! [materials.steel]
//! rho = [7800.0]
//! cv = [460.0, 0.2]          # c0 + c1 u
//! lambda = [45.0]
//! phi = [0.0]                # optional, defaults to 0
//! valid_range = [0.0, 2000.0] # optional, defaults to the real line
//!
//! [simulate]
//! tau = 0.5
//! steps = 200
//! stride = 20
//! solver = "NTDM"
//! shift = "td-shift"
//! initial = 300.0            # or one value per layer: [500.0, 300.0]
//!
//! [bench]
//! n_values = [1000, 10000]
//! k = 11
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::BenchScenario;
use crate::error::{Error, Result};
use crate::materials::MaterialSet;
use crate::mesh::{LayerSpec, RadialMesh};
use crate::solvers::SolverId;
use crate::time_stepper::{ShiftMode, StepConfig, TemperatureField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub tau: f64,
    pub steps: usize,
    #[serde(default = "one")]
    pub stride: usize,
    pub solver: SolverId,
    #[serde(default)]
    pub shift: ShiftMode,
    pub initial: InitialTemperature,
    #[serde(default = "default_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_max_picard")]
    pub max_picard: usize,
}

/// A uniform value, or one value per layer (contact nodes take the inner
/// layer's value).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialTemperature {
    Uniform(f64),
    PerLayer(Vec<f64>),
}

fn one() -> usize {
    1
}

fn default_tol() -> f64 {
    StepConfig::DEFAULT_TOL
}

fn default_max_picard() -> usize {
    StepConfig::DEFAULT_MAX_PICARD
}

impl SimulateSection {
    pub fn step_config(&self) -> StepConfig {
        StepConfig {
            tau: self.tau,
            picard_tol: self.picard_tol,
            max_picard: self.max_picard,
            solver: self.solver,
            shift: self.shift,
        }
    }

    pub fn initial_field(&self, mesh: &RadialMesh) -> TemperatureField {
        match &self.initial {
            InitialTemperature::Uniform(u) => TemperatureField::constant(mesh.len(), *u),
            InitialTemperature::PerLayer(values) => {
                let mut field = vec![values[0]; mesh.len()];
                for (i, u) in field.iter_mut().enumerate().skip(1) {
                    *u = values[mesh.layer_of_cell(i - 1)];
                }
                TemperatureField::new(field, 0.0)
            }
        }
    }

    fn validate(&self, layers: usize) -> Result<()> {
        self.step_config().validate()?;
        if self.steps == 0 || self.stride == 0 {
            return Err(Error::Config("simulate.steps and simulate.stride must be at least 1".into()));
        }
        let values = match &self.initial {
            InitialTemperature::Uniform(u) => std::slice::from_ref(u),
            InitialTemperature::PerLayer(v) if v.len() == layers => v.as_slice(),
            InitialTemperature::PerLayer(v) => {
                return Err(Error::Config(format!(
                    "simulate.initial has {} values for {layers} layers",
                    v.len()
                )))
            }
        };
        if values.iter().any(|u| !u.is_finite()) {
            return Err(Error::Config("simulate.initial must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub layers: Vec<LayerSpec>,
    pub materials: MaterialSet,
    #[serde(default)]
    pub simulate: Option<SimulateSection>,
    #[serde(default)]
    pub bench: Option<BenchScenario>,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Checks that the layers build a mesh, every layer names a known
    /// material, every validity range is ordered, and the run sections are
    /// consistent.
    pub fn validate(&self) -> Result<()> {
        self.mesh()?;
        for layer in &self.layers {
            self.materials.get(&layer.material_id)?;
        }
        for (id, model) in self.materials.iter() {
            let (lo, hi) = model.valid_range;
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(Error::Config(format!("material '{id}': empty validity range [{lo}, {hi}]")));
            }
        }
        if let Some(sim) = &self.simulate {
            sim.validate(self.layers.len())?;
        }
        if let Some(bench) = &self.bench {
            bench.validate()?;
        }
        Ok(())
    }

    pub fn mesh(&self) -> Result<RadialMesh> {
        RadialMesh::from_layers(&self.layers)
    }
}
