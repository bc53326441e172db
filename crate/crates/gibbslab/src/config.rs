//! Run configuration: TOML-backed model, kernel-method and study settings
//! with validation that names the offending field.

use crate::algebra::ModeLayout;
use crate::lindblad::Method;
use crate::model::{self, FermionModel};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    #[default]
    Closed,
    Quadrature,
    Both,
}

impl MethodChoice {
    pub fn to_method(self) -> Method {
        match self {
            MethodChoice::Closed => Method::Closed,
            MethodChoice::Quadrature => Method::Quadrature,
            MethodChoice::Both => Method::Both,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(MethodChoice::Closed),
            "quadrature" => Ok(MethodChoice::Quadrature),
            "both" => Ok(MethodChoice::Both),
            other => Err(Error::Config(format!(
                "method must be closed, quadrature or both, got '{other}'"
            ))),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Free models: one split mode or a two-mode hopping chain.
    Quadratic {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "one")]
        modes: usize,
        #[serde(default = "default_hopping")]
        hopping: f64,
    },
    /// Spinful Hubbard chain with unit hopping.
    Hubbard {
        #[serde(default = "one")]
        sites: usize,
        #[serde(default)]
        u: f64,
        #[serde(default = "default_mu")]
        mu: f64,
    },
    /// Explicit Majorana terms.
    CustomPolynomial {
        modes: usize,
        terms: Vec<TermConfig>,
    },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub indices: Vec<usize>,
    #[serde(default)]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn default_epsilon() -> f64 {
    0.4
}
fn default_hopping() -> f64 {
    0.7
}
fn default_mu() -> f64 {
    0.3
}
fn one() -> usize {
    1
}
fn default_beta() -> f64 {
    1.0
}
fn default_seed() -> u64 {
    7
}
fn default_sweep_points() -> usize {
    7
}
fn default_sweep_u_max() -> f64 {
    0.3
}
fn default_mix_epsilon() -> f64 {
    0.1
}
fn default_radii() -> Vec<f64> {
    vec![1.0, 2.0, 3.0]
}
fn default_omega() -> f64 {
    0.3
}
fn default_chain_modes() -> usize {
    5
}
fn default_chain_u() -> f64 {
    0.1
}
fn default_chain_t() -> f64 {
    1.0
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::Quadratic {
            epsilon: default_epsilon(),
            modes: 1,
            hopping: default_hopping(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub u_min: f64,
    #[serde(default = "default_sweep_u_max")]
    pub u_max: f64,
    #[serde(default = "default_sweep_points")]
    pub points: usize,
    #[serde(default = "default_mu")]
    pub mu: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            u_min: 0.0,
            u_max: default_sweep_u_max(),
            points: default_sweep_points(),
            mu: default_mu(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MixingConfig {
    #[serde(default = "default_mix_epsilon")]
    pub epsilon: f64,
}

impl Default for MixingConfig {
    fn default() -> Self {
        MixingConfig {
            epsilon: default_mix_epsilon(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationConfig {
    #[serde(default = "default_chain_modes")]
    pub modes: usize,
    #[serde(default = "default_chain_t")]
    pub hopping: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_chain_u")]
    pub coupling: f64,
}

impl Default for CorrelationConfig {
    fn default() -> Self {
        CorrelationConfig {
            modes: default_chain_modes(),
            hopping: default_chain_t(),
            mu: default_mu(),
            coupling: default_chain_u(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LocalityConfig {
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_omega")]
    pub omega: f64,
}

impl Default for LocalityConfig {
    fn default() -> Self {
        LocalityConfig {
            radii: default_radii(),
            omega: default_omega(),
        }
    }
}

/// Complete run settings. Every field has a default, so an empty document is a
/// valid configuration.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub method: MethodChoice,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Hard cap on Dirac mode counts accepted from the model section.
    #[serde(default = "crate::max_modes_default")]
    pub max_modes: usize,
    /// 1-based Majorana indices coupled to the bath; empty means all.
    #[serde(default)]
    pub jump_channels: Vec<usize>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub mixing: MixingConfig,
    #[serde(default)]
    pub correlation: CorrelationConfig,
    #[serde(default)]
    pub locality: LocalityConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            beta: default_beta(),
            method: MethodChoice::default(),
            seed: default_seed(),
            max_modes: crate::MAX_DIRAC_MODES,
            jump_channels: Vec::new(),
            model: ModelConfig::default(),
            sweep: SweepConfig::default(),
            mixing: MixingConfig::default(),
            correlation: CorrelationConfig::default(),
            locality: LocalityConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::Config(format!(
                "beta must be a positive finite number, got {}",
                self.beta
            )));
        }
        if self.max_modes == 0 || self.max_modes > crate::MAX_DIRAC_MODES {
            return Err(Error::Config(format!(
                "max_modes must lie in 1..={}, got {}",
                crate::MAX_DIRAC_MODES,
                self.max_modes
            )));
        }
        let n = self.model_modes()?;
        if n > self.max_modes {
            return Err(Error::Config(format!(
                "model needs {n} modes but max_modes is {}",
                self.max_modes
            )));
        }
        for &j in &self.jump_channels {
            if j == 0 || j > 2 * n {
                return Err(Error::Config(format!(
                    "jump_channels entry {j} outside 1..={}",
                    2 * n
                )));
            }
        }
        if self.sweep.points == 0 {
            return Err(Error::Config("sweep.points must be at least 1".into()));
        }
        if self.sweep.u_max < self.sweep.u_min {
            return Err(Error::Config(format!(
                "sweep.u_max {} below sweep.u_min {}",
                self.sweep.u_max, self.sweep.u_min
            )));
        }
        if !(self.mixing.epsilon > 0.0 && self.mixing.epsilon < 2.0) {
            return Err(Error::Config(format!(
                "mixing.epsilon must lie in (0, 2), got {}",
                self.mixing.epsilon
            )));
        }
        if self.correlation.modes < 3 || self.correlation.modes > crate::MAX_DIRAC_MODES {
            return Err(Error::Config(format!(
                "correlation.modes must lie in 3..={}, got {}",
                crate::MAX_DIRAC_MODES,
                self.correlation.modes
            )));
        }
        if self.locality.radii.len() < 2 {
            return Err(Error::Config(
                "locality.radii needs at least two entries".into(),
            ));
        }
        Ok(())
    }

    fn model_modes(&self) -> Result<usize> {
        Ok(match &self.model {
            ModelConfig::Quadratic { modes, .. } => {
                if *modes == 0 || *modes > 2 {
                    return Err(Error::Config(format!(
                        "model.modes must be 1 or 2 for the quadratic kind, got {modes}"
                    )));
                }
                *modes
            }
            ModelConfig::Hubbard { sites, .. } => {
                if *sites == 0 {
                    return Err(Error::Config("model.sites must be at least 1".into()));
                }
                2 * sites
            }
            ModelConfig::CustomPolynomial { modes, terms } => {
                if *modes == 0 {
                    return Err(Error::Config("model.modes must be at least 1".into()));
                }
                for t in terms {
                    for &j in &t.indices {
                        if j == 0 || j > 2 * modes {
                            return Err(Error::Config(format!(
                                "model.terms index {j} outside 1..={}",
                                2 * modes
                            )));
                        }
                    }
                }
                *modes
            }
        })
    }

    /// Instantiates the configured model.
    pub fn build_model(&self) -> Result<FermionModel> {
        match &self.model {
            ModelConfig::Quadratic {
                epsilon,
                modes,
                hopping,
            } => match modes {
                1 => model::single_mode(*epsilon),
                2 => model::two_mode_chain(*hopping),
                _ => Err(Error::Config(format!(
                    "model.modes must be 1 or 2 for the quadratic kind, got {modes}"
                ))),
            },
            ModelConfig::Hubbard { sites, u, mu } => model::build_fermi_hubbard(*sites, *u, *mu),
            ModelConfig::CustomPolynomial { modes, terms } => {
                let parsed: Vec<(Vec<usize>, C64)> = terms
                    .iter()
                    .map(|t| (t.indices.clone(), C64::new(t.re, t.im)))
                    .collect();
                model::from_terms("custom", ModeLayout::chain(*modes), &parsed)
            }
        }
    }

    /// Channel list for assembly; empty config means every Majorana.
    pub fn channels_for(&self, n_modes: usize) -> Vec<usize> {
        if self.jump_channels.is_empty() {
            (1..=2 * n_modes).collect()
        } else {
            self.jump_channels.clone()
        }
    }
}
