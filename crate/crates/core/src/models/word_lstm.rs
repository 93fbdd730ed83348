//! Word-level LSTM: token embeddings → single LSTM layer → affine → softmax.

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Emotion};
use crate::normalizer::EmbeddingTable;
use crate::numerics::{softmax_unchecked, DenseMatrix, ParamSet};
use crate::rng;
use crate::text::{build_vocabulary, tokenize, Vocabulary};

use super::lstm::{self, LstmSlots};
use super::train::{fit_sequences, SequenceNet, TrainConfig};
use super::{ClassDistribution, Classifier, ModelError};

/// Id reserved for out-of-vocabulary tokens (and for empty input).
pub const UNK_ID: usize = 0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmConfig {
    pub embedding_dim: usize,
    pub hidden: usize,
    /// Sentences are truncated to this many tokens.
    pub max_len: usize,
}

impl Default for LstmConfig {
    fn default() -> Self {
        LstmConfig {
            embedding_dim: 32,
            hidden: 64,
            max_len: 40,
        }
    }
}

const EMB: usize = 0;
const OUT_W: usize = 4;
const OUT_B: usize = 5;

fn slots(hidden: usize) -> LstmSlots {
    LstmSlots {
        w: 1,
        u: 2,
        b: 3,
        hidden,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmWordModel {
    vocab: Vocabulary,
    config: LstmConfig,
    params: ParamSet,
}

impl LstmWordModel {
    /// Random initialization over `vocab` (ids shifted by one for UNK).
    pub fn new(vocab: Vocabulary, config: LstmConfig, seed: u64) -> Result<Self, ModelError> {
        if config.embedding_dim == 0 || config.hidden == 0 || config.max_len == 0 {
            return Err(ModelError::InvalidConfig(
                "lstm dimensions must be positive".into(),
            ));
        }
        let mut rng = rng::seeded(seed);
        let mut params = ParamSet::new();
        let rows = vocab.len() + 1;
        params.push(
            "embedding",
            DenseMatrix::uniform(rows, config.embedding_dim, 1.0, &mut rng),
        );
        let s = LstmSlots::init(&mut params, config.embedding_dim, config.hidden, &mut rng);
        debug_assert_eq!(s, slots(config.hidden));
        let scale = 1.0 / (config.hidden as f64).sqrt();
        params.push(
            "out.w",
            DenseMatrix::uniform(4, config.hidden, scale, &mut rng),
        );
        params.push("out.b", DenseMatrix::zeros(1, 4));
        Ok(LstmWordModel {
            vocab,
            config,
            params,
        })
    }

    /// Overwrites embedding rows with vectors from `table` where the token is
    /// known to it.
    pub fn load_embeddings(&mut self, table: &EmbeddingTable) -> Result<(), ModelError> {
        if table.dim() != self.config.embedding_dim {
            return Err(ModelError::InvalidConfig(format!(
                "embedding table has dim {}, model expects {}",
                table.dim(),
                self.config.embedding_dim
            )));
        }
        for (id, token) in self.vocab.tokens().iter().enumerate() {
            if let Some(v) = table.vector(token) {
                self.params.get_mut(EMB).row_mut(id + 1).copy_from_slice(v);
            }
        }
        Ok(())
    }

    pub fn config(&self) -> &LstmConfig {
        &self.config
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    /// Same architecture with a replaced parameter set.
    pub fn with_params(&self, params: ParamSet) -> Result<Self, ModelError> {
        if !params.same_layout(&self.params) {
            return Err(ModelError::InvalidConfig(
                "parameter layout mismatch".into(),
            ));
        }
        Ok(LstmWordModel {
            params,
            ..self.clone()
        })
    }

    /// Number of embedding rows (vocabulary plus UNK).
    pub fn id_space(&self) -> usize {
        self.vocab.len() + 1
    }

    /// Token ids for `text`, truncated to `max_len`; empty input becomes a
    /// single UNK.
    pub fn encode(&self, text: &str) -> Vec<usize> {
        let mut ids: Vec<usize> = tokenize(text)
            .iter()
            .take(self.config.max_len)
            .map(|t| self.vocab.id(t).map_or(UNK_ID, |id| id + 1))
            .collect();
        if ids.is_empty() {
            ids.push(UNK_ID);
        }
        ids
    }

    fn check_ids(&self, ids: &[usize]) -> Result<(), ModelError> {
        match ids.iter().find(|&&id| id >= self.id_space()) {
            Some(&id) => Err(ModelError::IdOutOfRange {
                id,
                limit: self.id_space(),
            }),
            None => Ok(()),
        }
    }

    fn prepare<'a>(&self, ids: &'a [usize]) -> &'a [usize] {
        const UNK_ONLY: &[usize] = &[UNK_ID];
        if ids.is_empty() {
            UNK_ONLY
        } else {
            &ids[..ids.len().min(self.config.max_len)]
        }
    }

    fn embed(&self, ids: &[usize]) -> Vec<f64> {
        let emb = self.params.get(EMB);
        ids.iter()
            .flat_map(|&id| emb.row(id).iter().copied())
            .collect()
    }

    fn logits(&self, h: &[f64]) -> Vec<f64> {
        let mut z = self.params.get(OUT_B).as_slice().to_vec();
        self.params.get(OUT_W).matvec_acc(h, &mut z);
        z
    }

    fn forward_unchecked(&self, ids: &[usize]) -> ClassDistribution {
        let ids = self.prepare(ids);
        let x = self.embed(ids);
        let cache = lstm::forward(
            &self.params,
            slots(self.config.hidden),
            &x,
            self.config.embedding_dim,
        );
        let p = softmax_unchecked(&self.logits(cache.final_hidden(self.config.hidden)));
        [p[0], p[1], p[2], p[3]]
    }

    /// Cross-entropy of one example and its gradient.
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
            let p = lstm_forward(self, ids)?;
            total += -p[label.index()].max(crate::numerics::PROB_FLOOR).ln();
        }
        Ok(total / batch.len() as f64)
    }

    /// Gradient of [`LstmWordModel::batch_loss`].
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

impl SequenceNet for LstmWordModel {
    fn params(&self) -> &ParamSet {
        &self.params
    }

    fn params_mut(&mut self) -> &mut ParamSet {
        &mut self.params
    }

    fn loss_and_grad(&self, ids: &[usize], label: usize, scale: f64, grads: &mut ParamSet) -> f64 {
        let ids = self.prepare(ids);
        let (ed, hd) = (self.config.embedding_dim, self.config.hidden);
        let x = self.embed(ids);
        let cache = lstm::forward(&self.params, slots(hd), &x, ed);
        let h = cache.final_hidden(hd);
        let p = softmax_unchecked(&self.logits(h));
        let loss = -p[label].max(crate::numerics::PROB_FLOOR).ln();

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
        let mut dh = vec![0.0; hd];
        self.params.get(OUT_W).matvec_t_acc(&d_logits, &mut dh);
        let dx = lstm::backward(&self.params, slots(hd), &x, ed, &cache, &dh, grads);
        let emb_grad = grads.get_mut(EMB);
        for (t, &id) in ids.iter().enumerate() {
            for (g, d) in emb_grad
                .row_mut(id)
                .iter_mut()
                .zip(&dx[t * ed..(t + 1) * ed])
            {
                *g += d;
            }
        }
        loss
    }
}

/// Class distribution for a sequence of token ids.
pub fn lstm_forward(model: &LstmWordModel, ids: &[usize]) -> Result<ClassDistribution, ModelError> {
    model.check_ids(ids)?;
    Ok(model.forward_unchecked(ids))
}

pub fn lstm_fit(
    corpus: &Corpus,
    train: &TrainConfig,
    arch: &LstmConfig,
    embeddings: Option<&EmbeddingTable>,
    seed: u64,
) -> Result<LstmWordModel, ModelError> {
    lstm_fit_with_history(corpus, train, arch, embeddings, seed).map(|(m, _)| m)
}

/// Trains embeddings and LSTM jointly by BPTT. When `embeddings` is given,
/// the embedding matrix starts from it (then keeps training).
pub fn lstm_fit_with_history(
    corpus: &Corpus,
    train: &TrainConfig,
    arch: &LstmConfig,
    embeddings: Option<&EmbeddingTable>,
    seed: u64,
) -> Result<(LstmWordModel, Vec<f64>), ModelError> {
    if corpus.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    let vocab = build_vocabulary(corpus);
    let mut model = LstmWordModel::new(vocab, arch.clone(), rng::derive_seed(seed, 0))?;
    if let Some(table) = embeddings {
        model.load_embeddings(table)?;
    }
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

impl Classifier for LstmWordModel {
    fn predict_distribution(&self, text: &str) -> ClassDistribution {
        self.forward_unchecked(&self.encode(text))
    }
}
