//! Experiment configuration: a TOML document plus command-line overrides.
//!
//! ```toml
//! experiment = "hv-chsh"
//!
//! [params]
//! n = 100000
//! seed = 7
//! angles = [0.0, 45.0, 22.5, 67.5]   # degrees: a, a', b, b'
//! kind = "photon"                    # or "spin_half"
//! scheme = "output_chain"            # result_match | input_match | output_chain
//! alpha = 0.5                        # omitted: minimizing endpoint
//! enforce_repeat_consistency = false
//!
//! [model]
//! family = "hysteretic_collapse"     # classical_sign | collapse | hysteretic_collapse
//! drag = 0.5
//! asymmetry = 0.5
//!
//! [state]
//! kind = "hardy"                     # singlet | product_hv | circular_pair | ghz | hardy
//! alpha = 0.46
//! beta = 1.0
//!
//! [poll]
//! weights = [1.0, 1.0]
//! answers = [[1, 1], [-1, 1]]
//! order_effect = [[[0.0, 1.0], [1.0, 0.0]], [[0.0, 1.0], [1.0, 0.0]]]
//! couple_rule = "identical"
//! exit_immediate = true
//!
//! [output]
//! format = "json"                    # json | csv | text
//! path = "report.json"               # omitted: stdout
//! ```

use std::path::{Path, PathBuf};

use chronobell::bellops::{GhzPhase, ParticleKind, Sign, StateSpec};
use chronobell::hvsim::{MatchingScheme, ModelFamily, ModelSpec};
use chronobell::pollsim::{CoupleRule, PollModel};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    /// Degrees.
    pub angles: Option<Vec<f64>>,
    pub kind: Option<ParticleKind>,
    pub scheme: Option<MatchingScheme>,
    pub alpha: Option<f64>,
    pub enforce_repeat_consistency: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub family: Option<ModelFamily>,
    pub drag: Option<f64>,
    pub asymmetry: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Singlet,
    ProductHv,
    CircularPair,
    Ghz,
    Hardy,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub kind: Option<StateKind>,
    pub s1: Option<Sign>,
    pub parties: Option<usize>,
    pub phase: Option<GhzPhase>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PollSection {
    pub weights: Option<Vec<f64>>,
    pub answers: Option<Vec<[i8; 2]>>,
    pub order_effect: Option<Vec<[[f64; 2]; 2]>>,
    pub couple_rule: Option<CoupleRule>,
    pub exit_immediate: Option<bool>,
    /// Draw a random model with this many states instead of using the table.
    pub random_states: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub state: StateSection,
    #[serde(default)]
    pub poll: PollSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn n_or(&self, default: usize) -> Result<usize, CliError> {
        match self.params.n.unwrap_or(default) {
            0 => Err(CliError::Usage("n must be at least 1".into())),
            n => Ok(n),
        }
    }

    pub fn seed(&self) -> u64 {
        self.params.seed.unwrap_or(0)
    }

    pub fn kind_or(&self, default: ParticleKind) -> ParticleKind {
        self.params.kind.unwrap_or(default)
    }

    /// Exactly `count` angles (degrees), or the defaults.
    pub fn angles_or<const N: usize>(&self, default: [f64; N]) -> Result<[f64; N], CliError> {
        match &self.params.angles {
            None => Ok(default),
            Some(v) => {
                let arr: [f64; N] = v
                    .as_slice()
                    .try_into()
                    .map_err(|_| CliError::Usage(format!("expected {N} angles, got {}", v.len())))?;
                if arr.iter().any(|x| !x.is_finite()) {
                    return Err(CliError::Usage("angles must be finite".into()));
                }
                Ok(arr)
            }
        }
    }

    pub fn model_spec(&self, kind: ParticleKind, default: ModelFamily) -> Result<ModelSpec, CliError> {
        let m = &self.model;
        let spec = match m.family.unwrap_or(default) {
            ModelFamily::ClassicalSign => ModelSpec::classical(kind),
            ModelFamily::Collapse => ModelSpec::collapse(kind),
            ModelFamily::HystereticCollapse => {
                ModelSpec::hysteretic(kind, m.drag.unwrap_or(0.5), m.asymmetry.unwrap_or(0.5))?
            }
        };
        Ok(spec)
    }

    pub fn state_spec(&self, default: StateKind) -> Result<StateSpec<f64>, CliError> {
        let s = &self.state;
        Ok(match s.kind.unwrap_or(default) {
            StateKind::Singlet => StateSpec::Singlet,
            StateKind::ProductHv => StateSpec::ProductHv,
            StateKind::CircularPair => StateSpec::CircularPair {
                s1: s.s1.unwrap_or(Sign::Plus),
            },
            StateKind::Ghz => StateSpec::Ghz {
                n: s.parties.unwrap_or(3),
                phase: s.phase.unwrap_or(GhzPhase::MinusOne),
            },
            StateKind::Hardy => StateSpec::Hardy {
                alpha: s.alpha.unwrap_or(0.46),
                beta: s.beta.unwrap_or(1.0),
            },
        })
    }

    pub fn poll_model(&self) -> Result<PollModel, CliError> {
        let p = &self.poll;
        let rule = p.couple_rule.unwrap_or(CoupleRule::Identical);
        let mut model = match (&p.weights, p.random_states) {
            (Some(w), None) => PollModel {
                weights: w.clone(),
                answers: p
                    .answers
                    .clone()
                    .ok_or_else(|| CliError::Usage("poll.answers is required with poll.weights".into()))?,
                order_effect: p.order_effect.clone().unwrap_or_else(|| vec![[[0.0; 2]; 2]; w.len()]),
                couple_rule: rule,
                exit_immediate: true,
            },
            (None, states) => PollModel::random(self.seed(), states.unwrap_or(2), rule)?,
            (Some(_), Some(_)) => {
                return Err(CliError::Usage(
                    "poll.weights and poll.random_states are exclusive".into(),
                ))
            }
        };
        model.exit_immediate = p.exit_immediate.unwrap_or(true);
        model.validate()?;
        Ok(model)
    }
}
