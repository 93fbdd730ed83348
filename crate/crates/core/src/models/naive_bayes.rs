//! Multinomial Naive Bayes over character or word n-gram counts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Emotion};
use crate::numerics::softmax_unchecked;
use crate::text::NgramSpec;

use super::{ClassDistribution, Classifier, ModelError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    featurizer: NgramSpec,
    alpha: f64,
    class_counts: [usize; 4],
    /// Per feature, `ln P(feature | class)` for each class.
    log_likelihoods: BTreeMap<String, [f64; 4]>,
}

/// Fits multinomial NB with additive smoothing:
/// `P(f | c) = (count_c(f) + alpha) / (total_c + alpha · |F|)` over the
/// training feature space `F`, and `P(c) = N_c / N`.
pub fn nb_fit(
    corpus: &Corpus,
    spec: &NgramSpec,
    alpha: f64,
) -> Result<NaiveBayesModel, ModelError> {
    if corpus.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ModelError::InvalidConfig(format!(
            "smoothing alpha must be positive, got {alpha}"
        )));
    }
    spec.validate().map_err(ModelError::InvalidConfig)?;

    let mut counts: BTreeMap<String, [f64; 4]> = BTreeMap::new();
    let mut totals = [0.0f64; 4];
    for ex in corpus.examples() {
        let c = ex.label().index();
        for (feature, n) in spec.featurize(ex.text()).iter() {
            counts.entry(feature.clone()).or_insert([0.0; 4])[c] += n;
            totals[c] += n;
        }
    }
    let vocab_size = counts.len() as f64;
    let log_likelihoods = counts
        .into_iter()
        .map(|(f, per_class)| {
            let mut ll = [0.0; 4];
            for c in 0..4 {
                ll[c] = ((per_class[c] + alpha) / (totals[c] + alpha * vocab_size)).ln();
            }
            (f, ll)
        })
        .collect();

    Ok(NaiveBayesModel {
        featurizer: *spec,
        alpha,
        class_counts: corpus.class_distribution().0,
        log_likelihoods,
    })
}

impl NaiveBayesModel {
    pub fn featurizer(&self) -> &NgramSpec {
        &self.featurizer
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `ln P(c)`; `-inf` for classes absent from training.
    pub fn log_prior(&self, class: Emotion) -> f64 {
        let n: usize = self.class_counts.iter().sum();
        (self.class_counts[class.index()] as f64 / n as f64).ln()
    }

    pub fn feature_count(&self) -> usize {
        self.log_likelihoods.len()
    }

    /// `P(feature | class)`, or `None` for features unseen in training.
    pub fn likelihood(&self, feature: &str, class: Emotion) -> Option<f64> {
        self.log_likelihoods
            .get(feature)
            .map(|ll| ll[class.index()].exp())
    }

    /// Joint log scores `ln P(c) + Σ_f count(f) · ln P(f | c)`; unseen
    /// features are skipped.
    pub fn log_scores(&self, text: &str) -> [f64; 4] {
        let mut scores = [0.0; 4];
        for c in Emotion::ALL {
            scores[c.index()] = self.log_prior(c);
        }
        for (feature, n) in self.featurizer.featurize(text).iter() {
            if let Some(ll) = self.log_likelihoods.get(feature) {
                for c in 0..4 {
                    if scores[c].is_finite() {
                        scores[c] += n * ll[c];
                    }
                }
            }
        }
        scores
    }
}

pub fn nb_predict_distribution(model: &NaiveBayesModel, text: &str) -> ClassDistribution {
    let p = softmax_unchecked(&model.log_scores(text));
    [p[0], p[1], p[2], p[3]]
}

impl Classifier for NaiveBayesModel {
    fn predict_distribution(&self, text: &str) -> ClassDistribution {
        nb_predict_distribution(self, text)
    }
}
