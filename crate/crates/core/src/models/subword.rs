//! Sub-word LSTM: character embeddings → 1-D convolution (ReLU) → temporal
//! max-pooling → LSTM → affine → softmax.
//!
//! The convolution is unpadded; inputs shorter than the filter width are
//! right-padded with the pad character. Pooling uses non-overlapping windows
//! and keeps a final partial window, so there is always at least one pooled
//! step.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Emotion};
use crate::numerics::{softmax_unchecked, DenseMatrix, ParamSet, PROB_FLOOR};
use crate::rng;

use super::lstm::{self, LstmSlots};
use super::train::{fit_sequences, SequenceNet, TrainConfig};
use super::{ClassDistribution, Classifier, ModelError};

pub const PAD_CHAR_ID: usize = 0;
pub const UNK_CHAR_ID: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubwordConfig {
    pub char_dim: usize,
    pub filters: usize,
    pub conv_width: usize,
    /// Pool window and stride.
    pub pool_width: usize,
    pub hidden: usize,
    /// Sentences are truncated to this many characters.
    pub max_chars: usize,
}

impl Default for SubwordConfig {
    fn default() -> Self {
        SubwordConfig {
            char_dim: 16,
            filters: 64,
            conv_width: 3,
            pool_width: 2,
            hidden: 64,
            max_chars: 200,
        }
    }
}

/// Character inventory: ids 0 and 1 are PAD and UNK.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub struct CharVocab {
    chars: Vec<char>,
    ids: HashMap<char, usize>,
}

impl From<String> for CharVocab {
    fn from(s: String) -> Self {
        let chars: Vec<char> = s.chars().collect();
        let ids = chars.iter().enumerate().map(|(i, &c)| (c, i + 2)).collect();
        CharVocab { chars, ids }
    }
}

impl From<CharVocab> for String {
    fn from(v: CharVocab) -> String {
        v.chars.into_iter().collect()
    }
}

impl CharVocab {
    /// Characters of the lowercased texts in first-occurrence order.
    pub fn from_texts<'a>(texts: impl IntoIterator<Item = &'a str>) -> CharVocab {
        let mut seen = String::new();
        let mut set = std::collections::HashSet::new();
        for t in texts {
            for c in t.to_lowercase().chars() {
                if set.insert(c) {
                    seen.push(c);
                }
            }
        }
        CharVocab::from(seen)
    }

    /// Number of ids including PAD and UNK.
    pub fn id_space(&self) -> usize {
        self.chars.len() + 2
    }

    pub fn id(&self, c: char) -> usize {
        self.ids.get(&c).copied().unwrap_or(UNK_CHAR_ID)
    }
}

const EMB: usize = 0;
const CONV_W: usize = 1;
const CONV_B: usize = 2;
const OUT_W: usize = 6;
const OUT_B: usize = 7;

fn slots(hidden: usize) -> LstmSlots {
    LstmSlots {
        w: 3,
        u: 4,
        b: 5,
        hidden,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubwordLstmModel {
    chars: CharVocab,
    config: SubwordConfig,
    params: ParamSet,
}

struct ConvCache {
    /// Flattened `len × char_dim` embedded input.
    embedded: Vec<f64>,
    /// Post-ReLU activations, `conv_len × filters`.
    activations: Vec<f64>,
    /// Pooled `pooled_len × filters` sequence fed to the LSTM.
    pooled: Vec<f64>,
    /// For each pooled cell, the conv position it came from.
    argmax: Vec<usize>,
}

impl SubwordLstmModel {
    pub fn new(chars: CharVocab, config: SubwordConfig, seed: u64) -> Result<Self, ModelError> {
        let c = &config;
        if c.char_dim == 0
            || c.filters == 0
            || c.conv_width == 0
            || c.pool_width == 0
            || c.hidden == 0
            || c.max_chars == 0
        {
            return Err(ModelError::InvalidConfig(
                "sub-word dimensions must be positive".into(),
            ));
        }
        let mut rng = rng::seeded(seed);
        let mut params = ParamSet::new();
        params.push(
            "char_embedding",
            DenseMatrix::uniform(chars.id_space(), c.char_dim, 1.0, &mut rng),
        );
        let fan_in = c.conv_width * c.char_dim;
        params.push(
            "conv.w",
            DenseMatrix::uniform(c.filters, fan_in, 1.0 / (fan_in as f64).sqrt(), &mut rng),
        );
        params.push("conv.b", DenseMatrix::zeros(1, c.filters));
        let s = LstmSlots::init(&mut params, c.filters, c.hidden, &mut rng);
        debug_assert_eq!(s, slots(c.hidden));
        let scale = 1.0 / (c.hidden as f64).sqrt();
        params.push("out.w", DenseMatrix::uniform(4, c.hidden, scale, &mut rng));
        params.push("out.b", DenseMatrix::zeros(1, 4));
        Ok(SubwordLstmModel {
            chars,
            config,
            params,
        })
    }

    pub fn config(&self) -> &SubwordConfig {
        &self.config
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn char_vocab(&self) -> &CharVocab {
        &self.chars
    }

    pub fn with_params(&self, params: ParamSet) -> Result<Self, ModelError> {
        if !params.same_layout(&self.params) {
            return Err(ModelError::InvalidConfig(
                "parameter layout mismatch".into(),
            ));
        }
        Ok(SubwordLstmModel {
            params,
            ..self.clone()
        })
    }

    /// Character ids of the lowercased text, truncated to `max_chars`.
    /// Padding is applied later by the forward pass.
    pub fn encode(&self, text: &str) -> Vec<usize> {
        text.to_lowercase()
            .chars()
            .take(self.config.max_chars)
            .map(|c| self.chars.id(c))
            .collect()
    }

    fn check_ids(&self, ids: &[usize]) -> Result<(), ModelError> {
        match ids.iter().find(|&&id| id >= self.chars.id_space()) {
            Some(&id) => Err(ModelError::IdOutOfRange {
                id,
                limit: self.chars.id_space(),
            }),
            None => Ok(()),
        }
    }

    /// Drops trailing pads, truncates, then right-pads to the conv width.
    fn prepare(&self, ids: &[usize]) -> Vec<usize> {
        let end = ids
            .iter()
            .rposition(|&id| id != PAD_CHAR_ID)
            .map_or(0, |i| i + 1);
        let mut out: Vec<usize> = ids[..end.min(self.config.max_chars)].to_vec();
        while out.len() < self.config.conv_width {
            out.push(PAD_CHAR_ID);
        }
        out
    }

    fn conv_forward(&self, ids: &[usize]) -> ConvCache {
        let c = &self.config;
        let emb = self.params.get(EMB);
        let embedded: Vec<f64> = ids
            .iter()
            .flat_map(|&id| emb.row(id).iter().copied())
            .collect();
        let conv_len = ids.len() - c.conv_width + 1;
        let window = c.conv_width * c.char_dim;
        let conv_w = self.params.get(CONV_W);
        let conv_b = self.params.get(CONV_B).as_slice();
        let mut activations = vec![0.0; conv_len * c.filters];
        for p in 0..conv_len {
            let x = &embedded[p * c.char_dim..p * c.char_dim + window];
            let out = &mut activations[p * c.filters..(p + 1) * c.filters];
            out.copy_from_slice(conv_b);
            conv_w.matvec_acc(x, out);
            for v in out.iter_mut() {
                *v = v.max(0.0);
            }
        }
        let pooled_len = conv_len.div_ceil(c.pool_width);
        let mut pooled = vec![0.0; pooled_len * c.filters];
        let mut argmax = vec![0; pooled_len * c.filters];
        for q in 0..pooled_len {
            let start = q * c.pool_width;
            let end = (start + c.pool_width).min(conv_len);
            for f in 0..c.filters {
                let mut best = start;
                for p in start + 1..end {
                    if activations[p * c.filters + f] > activations[best * c.filters + f] {
                        best = p;
                    }
                }
                pooled[q * c.filters + f] = activations[best * c.filters + f];
                argmax[q * c.filters + f] = best;
            }
        }
        ConvCache {
            embedded,
            activations,
            pooled,
            argmax,
        }
    }

    fn logits(&self, h: &[f64]) -> Vec<f64> {
        let mut z = self.params.get(OUT_B).as_slice().to_vec();
        self.params.get(OUT_W).matvec_acc(h, &mut z);
        z
    }

    fn forward_unchecked(&self, ids: &[usize]) -> ClassDistribution {
        let ids = self.prepare(ids);
        let conv = self.conv_forward(&ids);
        let cache = lstm::forward(
            &self.params,
            slots(self.config.hidden),
            &conv.pooled,
            self.config.filters,
        );
        let p = softmax_unchecked(&self.logits(cache.final_hidden(self.config.hidden)));
        [p[0], p[1], p[2], p[3]]
    }

    pub fn loss_and_gradient(
        &self,
        ids: &[usize],
        label: Emotion,
    ) -> Result<(f64, ParamSet), ModelError> {
        self.check_ids(ids)?;
        let mut grads = self.params.zeros_like();
        let loss = self.loss_and_grad(ids, label.index(), 1.0, &mut grads);
        Ok((loss, grads))
    }

    /// Mean cross-entropy over `batch`.
    pub fn batch_loss(&self, batch: &[(Vec<usize>, Emotion)]) -> Result<f64, ModelError> {
        let mut total = 0.0;
        for (ids, label) in batch {
            let p = subword_forward(self, ids)?;
            total += -p[label.index()].max(PROB_FLOOR).ln();
        }
        Ok(total / batch.len() as f64)
    }

    pub fn batch_gradient(&self, batch: &[(Vec<usize>, Emotion)]) -> Result<ParamSet, ModelError> {
        let mut grads = self.params.zeros_like();
        let scale = 1.0 / batch.len() as f64;
        for (ids, label) in batch {
            self.check_ids(ids)?;
            self.loss_and_grad(ids, label.index(), scale, &mut grads);
        }
        Ok(grads)
    }
}

impl SequenceNet for SubwordLstmModel {
    fn params(&self) -> &ParamSet {
        &self.params
    }

    fn params_mut(&mut self) -> &mut ParamSet {
        &mut self.params
    }

    fn loss_and_grad(&self, ids: &[usize], label: usize, scale: f64, grads: &mut ParamSet) -> f64 {
        let c = &self.config;
        let ids = self.prepare(ids);
        let conv = self.conv_forward(&ids);
        let cache = lstm::forward(&self.params, slots(c.hidden), &conv.pooled, c.filters);
        let h = cache.final_hidden(c.hidden);
        let p = softmax_unchecked(&self.logits(h));
        let loss = -p[label].max(PROB_FLOOR).ln();

        let mut d_logits = p;
        d_logits[label] -= 1.0;
        d_logits.iter_mut().for_each(|v| *v *= scale);
        grads.get_mut(OUT_W).outer_acc(&d_logits, h);
        for (g, d) in grads
            .get_mut(OUT_B)
            .as_mut_slice()
            .iter_mut()
            .zip(&d_logits)
        {
            *g += d;
        }
        let mut dh = vec![0.0; c.hidden];
        self.params.get(OUT_W).matvec_t_acc(&d_logits, &mut dh);
        let d_pooled = lstm::backward(
            &self.params,
            slots(c.hidden),
            &conv.pooled,
            c.filters,
            &cache,
            &dh,
            grads,
        );

        // Unpool, then through the ReLU.
        let conv_len = conv.activations.len() / c.filters;
        let mut d_pre = vec![0.0; conv.activations.len()];
        for (cell, &d) in d_pooled.iter().enumerate() {
            let f = cell % c.filters;
            let p = conv.argmax[cell];
            d_pre[p * c.filters + f] += d;
        }
        for (d, &a) in d_pre.iter_mut().zip(&conv.activations) {
            if a <= 0.0 {
                *d = 0.0;
            }
        }

        let window = c.conv_width * c.char_dim;
        let mut d_embedded = vec![0.0; conv.embedded.len()];
        let conv_w = self.params.get(CONV_W);
        for p in 0..conv_len {
            let dp = &d_pre[p * c.filters..(p + 1) * c.filters];
            if dp.iter().all(|&v| v == 0.0) {
                continue;
            }
            let x = &conv.embedded[p * c.char_dim..p * c.char_dim + window];
            grads.get_mut(CONV_W).outer_acc(dp, x);
            for (g, d) in grads.get_mut(CONV_B).as_mut_slice().iter_mut().zip(dp) {
                *g += d;
            }
            conv_w.matvec_t_acc(dp, &mut d_embedded[p * c.char_dim..p * c.char_dim + window]);
        }
        let emb_grad = grads.get_mut(EMB);
        for (t, &id) in ids.iter().enumerate() {
            let src = &d_embedded[t * c.char_dim..(t + 1) * c.char_dim];
            for (g, d) in emb_grad.row_mut(id).iter_mut().zip(src) {
                *g += d;
            }
        }
        loss
    }
}

/// Class distribution for a character-id sequence. Trailing pads beyond the
/// conv width do not affect the result.
pub fn subword_forward(
    model: &SubwordLstmModel,
    ids: &[usize],
) -> Result<ClassDistribution, ModelError> {
    model.check_ids(ids)?;
    Ok(model.forward_unchecked(ids))
}

pub fn subword_fit(
    corpus: &Corpus,
    train: &TrainConfig,
    arch: &SubwordConfig,
    seed: u64,
) -> Result<SubwordLstmModel, ModelError> {
    subword_fit_with_history(corpus, train, arch, seed).map(|(m, _)| m)
}

pub fn subword_fit_with_history(
    corpus: &Corpus,
    train: &TrainConfig,
    arch: &SubwordConfig,
    seed: u64,
) -> Result<(SubwordLstmModel, Vec<f64>), ModelError> {
    if corpus.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    let chars = CharVocab::from_texts(corpus.texts());
    let mut model = SubwordLstmModel::new(chars, arch.clone(), rng::derive_seed(seed, 0))?;
    let inputs: Vec<Vec<usize>> = corpus.texts().map(|t| model.encode(t)).collect();
    let labels: Vec<usize> = corpus.labels().iter().map(|e| e.index()).collect();
    let history = fit_sequences(
        &mut model,
        &inputs,
        &labels,
        train,
        rng::derive_seed(seed, 1),
    )?;
    Ok((model, history))
}

impl Classifier for SubwordLstmModel {
    fn predict_distribution(&self, text: &str) -> ClassDistribution {
        self.forward_unchecked(&self.encode(text))
    }
}
