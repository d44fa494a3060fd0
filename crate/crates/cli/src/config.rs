//! Experiment configuration: a single JSON file selecting forecaster,
//! skeptic, reality, horizon, seed, and output paths. Command-line flags
//! override file values; the `GTP_SEED` environment variable supplies
//! the seed when neither flag nor file sets one.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use gtp_core::game::{Forecaster, SzilardConfig};
use gtp_core::markov::{Distribution, MarkovKernel};
use gtp_core::realities::{biased_flip, MarkovReality, PeriodicReality, Reality, ReplayReality};
use gtp_core::strategies::{self, Strategy};
use gtp_core::{Alphabet, Word};

use crate::CliError;

pub const SEED_ENV_VAR: &str = "GTP_SEED";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub alphabet: usize,
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub forecaster: ForecasterSpec,
    pub skeptic: SkepticSpec,
    pub reality: RealitySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary_json: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub szilard: Option<SzilardSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ForecasterSpec {
    Constant {
        probs: Vec<f64>,
    },
    Markov {
        kernel_file: PathBuf,
        /// Announcements for the first k steps; defaults to the
        /// stationary single-symbol marginal.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial: Option<Vec<Vec<f64>>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkepticSpec {
    /// "lz", "ld", "lz-restart" or "none".
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RealitySpec {
    Markov {
        kernel_file: PathBuf,
    },
    Iid {
        probs: Vec<f64>,
    },
    Periodic {
        pattern: String,
    },
    BiasedFlip {
        kernel_file: PathBuf,
        epsilon: f64,
        context: String,
    },
    Replay {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        word: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        word_file: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SzilardSpec {
    pub lengths: Vec<f64>,
    pub gravity: f64,
    pub scale: f64,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let config: Self = serde_json::from_str(&text)
            .map_err(|e| format!("cannot parse config {}: {e}", path.display()))?;
        Ok(config)
    }

    pub fn alphabet(&self) -> Result<Alphabet, CliError> {
        Ok(Alphabet::new(self.alphabet)?)
    }

    /// Seed precedence: explicit flag, then config file, then GTP_SEED,
    /// then zero.
    pub fn resolve_seed(&self, flag: Option<u64>) -> Result<u64, CliError> {
        if let Some(seed) = flag.or(self.seed) {
            return Ok(seed);
        }
        match std::env::var(SEED_ENV_VAR) {
            Ok(text) => text
                .parse()
                .map_err(|_| format!("{SEED_ENV_VAR} must be an integer, got {text:?}").into()),
            Err(_) => Ok(0),
        }
    }

    pub fn build_forecaster(&self) -> Result<Forecaster, CliError> {
        let alphabet = self.alphabet()?;
        match &self.forecaster {
            ForecasterSpec::Constant { probs } => {
                if probs.len() != alphabet.size() {
                    return Err("forecaster probs do not match the alphabet size".into());
                }
                Ok(Forecaster::constant(Distribution::new(probs.clone())?))
            }
            ForecasterSpec::Markov {
                kernel_file,
                initial,
            } => {
                let kernel = load_kernel(kernel_file, alphabet)?;
                match initial {
                    None => Ok(Forecaster::markov_stationary_start(kernel)?),
                    Some(rows) => {
                        let rows = rows
                            .iter()
                            .map(|r| Distribution::new(r.clone()))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(Forecaster::markov(kernel, rows)?)
                    }
                }
            }
        }
    }

    pub fn build_skeptic(&self) -> Result<Box<dyn Strategy>, CliError> {
        Ok(strategies::by_name(
            &self.skeptic.kind,
            self.alphabet()?,
            self.skeptic.threshold,
        )?)
    }

    pub fn build_reality(&self, seed: u64) -> Result<Box<dyn Reality>, CliError> {
        let alphabet = self.alphabet()?;
        match &self.reality {
            RealitySpec::Markov { kernel_file } => {
                let kernel = load_kernel(kernel_file, alphabet)?;
                Ok(Box::new(MarkovReality::new(kernel, seed)?))
            }
            RealitySpec::Iid { probs } => {
                let p = Distribution::new(probs.clone())?;
                Ok(Box::new(MarkovReality::iid(p, alphabet, seed)?))
            }
            RealitySpec::Periodic { pattern } => {
                let word = Word::parse(pattern, alphabet)?;
                Ok(Box::new(PeriodicReality::new(word)?))
            }
            RealitySpec::BiasedFlip {
                kernel_file,
                epsilon,
                context,
            } => {
                let kernel = load_kernel(kernel_file, alphabet)?;
                let ctx = Word::parse(context, alphabet)?;
                let flipped = biased_flip(&kernel, ctx.symbols(), *epsilon)?;
                Ok(Box::new(MarkovReality::new(flipped, seed)?))
            }
            RealitySpec::Replay { word, word_file } => {
                let text = match (word, word_file) {
                    (Some(w), None) => w.clone(),
                    (None, Some(path)) => fs::read_to_string(path)
                        .map_err(|e| format!("cannot read word {}: {e}", path.display()))?,
                    _ => {
                        return Err("replay needs exactly one of word or word_file".into());
                    }
                };
                Ok(Box::new(ReplayReality::new(Word::parse(
                    text.trim(),
                    alphabet,
                )?)))
            }
        }
    }

    pub fn build_szilard(&self) -> Result<Option<SzilardConfig>, CliError> {
        match &self.szilard {
            None => Ok(None),
            Some(spec) => Ok(Some(SzilardConfig::new(
                spec.lengths.clone(),
                spec.gravity,
                spec.scale,
            )?)),
        }
    }
}

pub fn load_kernel(path: &Path, alphabet: Alphabet) -> Result<MarkovKernel, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read kernel {}: {e}", path.display()))?;
    let kernel = MarkovKernel::from_config(&text)?;
    if kernel.alphabet() != alphabet {
        return Err(format!(
            "kernel {} is over an alphabet of size {}, config says {}",
            path.display(),
            kernel.alphabet().size(),
            alphabet.size()
        )
        .into());
    }
    Ok(kernel)
}
