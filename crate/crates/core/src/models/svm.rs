//! One-vs-rest linear SVMs on bag-of-words vectors, trained with the
//! Pegasos primal sub-gradient method.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Emotion};
use crate::numerics::{softmax_unchecked, DenseMatrix};
use crate::rng;
use crate::text::{bag_of_words, build_vocabulary, tokenize, Vocabulary};

use super::{ClassDistribution, Classifier, ModelError};

/// How bag-of-words counts become feature values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BowWeighting {
    /// Raw token counts.
    #[default]
    Counts,
    /// Counts divided by the sentence's in-vocabulary token total.
    Frequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub lambda: f64,
    pub epochs: usize,
    pub weighting: BowWeighting,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            lambda: 1e-4,
            epochs: 50,
            weighting: BowWeighting::Counts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    vocab: Vocabulary,
    /// One row per class; the last column is the bias.
    weights: DenseMatrix,
    lambda: f64,
    weighting: BowWeighting,
}

fn features(text: &str, vocab: &Vocabulary, weighting: BowWeighting) -> Vec<(usize, f64)> {
    let bow = bag_of_words(&tokenize(text), vocab);
    let norm = match weighting {
        BowWeighting::Counts => 1.0,
        BowWeighting::Frequency => bow.total().max(1.0),
    };
    let mut x: Vec<(usize, f64)> = bow.iter().map(|(&id, w)| (id, w / norm)).collect();
    // Constant bias feature.
    x.push((vocab.len(), 1.0));
    x
}

/// Trains four one-vs-rest SVMs minimizing
/// `λ/2 ‖w‖² + mean hinge(y · w·x)` with step `1 / (λ t)`.
///
/// The bias is an extra constant feature and is regularized with the rest of
/// the weights.
pub fn svm_fit(
    corpus: &Corpus,
    config: &SvmConfig,
    seed: u64,
) -> Result<LinearSvmModel, ModelError> {
    if !(config.lambda > 0.0 && config.lambda.is_finite()) || config.epochs == 0 {
        return Err(ModelError::InvalidConfig(
            "svm lambda and epochs must be positive".into(),
        ));
    }
    if corpus.class_distribution().present().count() < 2 {
        return Err(ModelError::TooFewClasses);
    }
    let vocab = build_vocabulary(corpus);
    let dim = vocab.len() + 1;
    let xs: Vec<Vec<(usize, f64)>> = corpus
        .texts()
        .map(|t| features(t, &vocab, config.weighting))
        .collect();
    let labels = corpus.labels();

    // One shared visiting order for all four binary problems.
    let mut rng = rng::seeded(seed);
    let mut schedule = Vec::with_capacity(xs.len() * config.epochs);
    let mut order: Vec<usize> = (0..xs.len()).collect();
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        schedule.extend_from_slice(&order);
    }

    let mut weights = DenseMatrix::zeros(4, dim);
    for class in Emotion::ALL {
        // w = scale · v, so the shrink step is O(1).
        let mut v = vec![0.0; dim];
        let mut scale = 1.0;
        for (step, &i) in schedule.iter().enumerate() {
            let t = (step + 1) as f64;
            let eta = 1.0 / (config.lambda * t);
            let y = if labels[i] == class { 1.0 } else { -1.0 };
            let margin = y * scale * xs[i].iter().map(|&(j, x)| v[j] * x).sum::<f64>();
            scale *= 1.0 - eta * config.lambda;
            if scale == 0.0 {
                v.iter_mut().for_each(|w| *w = 0.0);
                scale = 1.0;
            }
            if margin < 1.0 {
                for &(j, x) in &xs[i] {
                    v[j] += eta * y * x / scale;
                }
            }
        }
        for (w, vj) in weights.row_mut(class.index()).iter_mut().zip(&v) {
            *w = scale * vj;
        }
    }

    Ok(LinearSvmModel {
        vocab,
        weights,
        lambda: config.lambda,
        weighting: config.weighting,
    })
}

impl LinearSvmModel {
    /// An all-zero model over `vocab`.
    pub fn zeros(vocab: Vocabulary) -> Self {
        let dim = vocab.len() + 1;
        LinearSvmModel {
            vocab,
            weights: DenseMatrix::zeros(4, dim),
            lambda: SvmConfig::default().lambda,
            weighting: BowWeighting::Counts,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Decision values `w_c · x + b_c` for the four classes.
    pub fn margins(&self, text: &str) -> [f64; 4] {
        let x = features(text, &self.vocab, self.weighting);
        let mut out = [0.0; 4];
        for (c, m) in out.iter_mut().enumerate() {
            let row = self.weights.row(c);
            *m = x.iter().map(|&(j, v)| row[j] * v).sum();
        }
        out
    }
}

/// Softmax over the four margins.
pub fn svm_predict_distribution(model: &LinearSvmModel, text: &str) -> ClassDistribution {
    margins_to_distribution(&model.margins(text))
}

pub(crate) fn margins_to_distribution(margins: &[f64; 4]) -> ClassDistribution {
    let p = softmax_unchecked(margins);
    [p[0], p[1], p[2], p[3]]
}

impl Classifier for LinearSvmModel {
    fn predict_distribution(&self, text: &str) -> ClassDistribution {
        svm_predict_distribution(self, text)
    }
}
