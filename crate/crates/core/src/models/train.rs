//! Mini-batch training loop for the neural baselines.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::numerics::{optimizer_step, OptimConfig, OptimState, ParamSet};
use crate::rng;

use super::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub optim: OptimConfig,
}

/// Defaults: 20 epochs, batches of 16, Adam at 1e-2. At 1e-3 twenty epochs
/// over a thousand sentences leave the word LSTM under-trained.
impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            batch_size: 16,
            optim: OptimConfig::adam(1e-2),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(ModelError::InvalidConfig(
                "epochs and batch_size must be positive".into(),
            ));
        }
        self.optim
            .validate()
            .map_err(|e| ModelError::InvalidConfig(e.to_string()))
    }
}

/// A differentiable model trained on integer sequences.
pub(crate) trait SequenceNet {
    fn params(&self) -> &ParamSet;
    fn params_mut(&mut self) -> &mut ParamSet;
    /// Cross-entropy of one example; adds `scale · ∂loss/∂θ` into `grads`.
    fn loss_and_grad(&self, input: &[usize], label: usize, scale: f64, grads: &mut ParamSet)
        -> f64;
}

/// Runs `config.epochs` passes of shuffled mini-batches. Each batch's
/// gradient is the mean over its examples. Sequences are processed one at a
/// time, which is equivalent to padding a batch with masked steps.
///
/// Returns the mean training loss of each epoch (measured on the fly).
pub(crate) fn fit_sequences<N: SequenceNet>(
    net: &mut N,
    inputs: &[Vec<usize>],
    labels: &[usize],
    config: &TrainConfig,
    shuffle_seed: u64,
) -> Result<Vec<f64>, ModelError> {
    config.validate()?;
    let mut rng = rng::seeded(shuffle_seed);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut grads = net.params().zeros_like();
    let mut state = OptimState::new();
    let mut history = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(config.batch_size) {
            grads.fill_zero();
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                total += net.loss_and_grad(&inputs[i], labels[i], scale, &mut grads);
            }
            optimizer_step(net.params_mut(), &mut grads, &mut state, &config.optim)
                .map_err(|e| ModelError::Training(e.to_string()))?;
        }
        history.push(total / inputs.len().max(1) as f64);
    }
    Ok(history)
}
