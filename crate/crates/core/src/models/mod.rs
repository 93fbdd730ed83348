//! The five baselines behind one contract: fit on a [`Corpus`], then map any
//! sentence to a distribution over the four emotions.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Emotion};
use crate::normalizer::{train_skipgram, SkipGramConfig};
use crate::rng;
use crate::text::NgramSpec;

mod lstm;
pub mod naive_bayes;
pub mod subword;
pub mod svm;
mod train;
pub mod word_lstm;

pub use naive_bayes::{nb_fit, nb_predict_distribution, NaiveBayesModel};
pub use subword::{subword_fit, subword_forward, SubwordConfig, SubwordLstmModel};
pub use svm::{svm_fit, svm_predict_distribution, BowWeighting, LinearSvmModel, SvmConfig};
pub use train::TrainConfig;
pub use word_lstm::{lstm_fit, lstm_forward, LstmConfig, LstmWordModel};

/// Probabilities for (Angry, Fear, Sad, Happy).
pub type ClassDistribution = [f64; 4];

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("training corpus needs at least two classes")]
    TooFewClasses,
    #[error("id {id} out of range (limit {limit})")]
    IdOutOfRange { id: usize, limit: usize },
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("training failed: {0}")]
    Training(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed model file: {0}")]
    Format(String),
}

/// Index of the largest probability; ties go to the earliest class in
/// A < F < S < H order.
pub fn argmax(dist: &ClassDistribution) -> Emotion {
    let mut best = 0;
    for i in 1..4 {
        if dist[i] > dist[best] {
            best = i;
        }
    }
    Emotion::ALL[best]
}

pub trait Classifier {
    fn predict_distribution(&self, text: &str) -> ClassDistribution;

    fn predict(&self, text: &str) -> Emotion {
        argmax(&self.predict_distribution(text))
    }
}

/// The baseline roster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    NbChar,
    NbWord,
    Svm,
    Lstm,
    SubwordLstm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::NbChar,
        ModelKind::NbWord,
        ModelKind::Svm,
        ModelKind::Lstm,
        ModelKind::SubwordLstm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::NbChar => "nb-char",
            ModelKind::NbWord => "nb-word",
            ModelKind::Svm => "svm",
            ModelKind::Lstm => "lstm",
            ModelKind::SubwordLstm => "subword-lstm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = ModelKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown model {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// A baseline together with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClassifierSpec {
    NbChar {
        ngrams: NgramSpec,
        alpha: f64,
    },
    NbWord {
        ngrams: NgramSpec,
        alpha: f64,
    },
    Svm(SvmConfig),
    Lstm {
        train: TrainConfig,
        arch: LstmConfig,
        /// When set, embeddings are pre-trained with skip-gram on the
        /// training corpus (dimension forced to `arch.embedding_dim`).
        pretrain: Option<SkipGramConfig>,
    },
    SubwordLstm {
        train: TrainConfig,
        arch: SubwordConfig,
    },
}

impl ClassifierSpec {
    /// Defaults: character 8-grams, word 1-2 grams, Laplace smoothing, and
    /// the architecture defaults of each neural model.
    pub fn default_for(kind: ModelKind) -> ClassifierSpec {
        match kind {
            ModelKind::NbChar => ClassifierSpec::NbChar {
                ngrams: NgramSpec::characters(8, 8).expect("valid range"),
                alpha: 1.0,
            },
            ModelKind::NbWord => ClassifierSpec::NbWord {
                ngrams: NgramSpec::words(1, 2).expect("valid range"),
                alpha: 1.0,
            },
            ModelKind::Svm => ClassifierSpec::Svm(SvmConfig::default()),
            ModelKind::Lstm => ClassifierSpec::Lstm {
                train: TrainConfig::default(),
                arch: LstmConfig::default(),
                pretrain: None,
            },
            ModelKind::SubwordLstm => ClassifierSpec::SubwordLstm {
                train: TrainConfig::default(),
                arch: SubwordConfig::default(),
            },
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ClassifierSpec::NbChar { .. } => ModelKind::NbChar,
            ClassifierSpec::NbWord { .. } => ModelKind::NbWord,
            ClassifierSpec::Svm(_) => ModelKind::Svm,
            ClassifierSpec::Lstm { .. } => ModelKind::Lstm,
            ClassifierSpec::SubwordLstm { .. } => ModelKind::SubwordLstm,
        }
    }

    /// Trains the model. All randomness derives from `seed`.
    pub fn fit(&self, corpus: &Corpus, seed: u64) -> Result<Model, ModelError> {
        if corpus.is_empty() {
            return Err(ModelError::EmptyCorpus);
        }
        Ok(match self {
            ClassifierSpec::NbChar { ngrams, alpha } => {
                Model::NbChar(nb_fit(corpus, ngrams, *alpha)?)
            }
            ClassifierSpec::NbWord { ngrams, alpha } => {
                Model::NbWord(nb_fit(corpus, ngrams, *alpha)?)
            }
            ClassifierSpec::Svm(cfg) => Model::Svm(svm_fit(corpus, cfg, seed)?),
            ClassifierSpec::Lstm {
                train,
                arch,
                pretrain,
            } => {
                let table = match pretrain {
                    Some(sg) => {
                        let sg = SkipGramConfig {
                            dim: arch.embedding_dim,
                            seed: rng::derive_seed(seed, 2),
                            ..sg.clone()
                        };
                        Some(
                            train_skipgram(corpus, &sg)
                                .map_err(|e| ModelError::Training(e.to_string()))?,
                        )
                    }
                    None => None,
                };
                Model::Lstm(lstm_fit(corpus, train, arch, table.as_ref(), seed)?)
            }
            ClassifierSpec::SubwordLstm { train, arch } => {
                Model::SubwordLstm(subword_fit(corpus, train, arch, seed)?)
            }
        })
    }
}

/// A trained baseline of any kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "kebab-case")]
pub enum Model {
    NbChar(NaiveBayesModel),
    NbWord(NaiveBayesModel),
    Svm(LinearSvmModel),
    Lstm(LstmWordModel),
    SubwordLstm(SubwordLstmModel),
}

const FORMAT_TAG: &str = "codemix-emotion-model";
const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile<M> {
    format: String,
    version: u32,
    #[serde(flatten)]
    body: M,
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::NbChar(_) => ModelKind::NbChar,
            Model::NbWord(_) => ModelKind::NbWord,
            Model::Svm(_) => ModelKind::Svm,
            Model::Lstm(_) => ModelKind::Lstm,
            Model::SubwordLstm(_) => ModelKind::SubwordLstm,
        }
    }

    /// JSON container with a format tag, version and `kind` discriminator.
    /// Floats are written in shortest round-trip form, so a reloaded model
    /// predicts bit-identically.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ModelFile {
            format: FORMAT_TAG.to_string(),
            version: FORMAT_VERSION,
            body: self,
        })
        .expect("models serialize")
    }

    pub fn from_json(json: &str) -> Result<Model, ModelError> {
        let file: ModelFile<Model> =
            serde_json::from_str(json).map_err(|e| ModelError::Format(e.to_string()))?;
        if file.format != FORMAT_TAG || file.version != FORMAT_VERSION {
            return Err(ModelError::Format(format!(
                "unsupported container {} v{}",
                file.format, file.version
            )));
        }
        Ok(file.body)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| ModelError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model, ModelError> {
        let path = path.as_ref();
        let json = fs::read_to_string(path).map_err(|source| ModelError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Model::from_json(&json)
    }
}

impl Classifier for Model {
    fn predict_distribution(&self, text: &str) -> ClassDistribution {
        match self {
            Model::NbChar(m) | Model::NbWord(m) => m.predict_distribution(text),
            Model::Svm(m) => m.predict_distribution(text),
            Model::Lstm(m) => m.predict_distribution(text),
            Model::SubwordLstm(m) => m.predict_distribution(text),
        }
    }
}
