//! Single-layer LSTM with hand-derived backpropagation through time, shared
//! by the word-level and sub-word models.
//!
//! Gate rows are stacked as `[input; forget; output; candidate]`:
//!
//! ```text
//! z_t = W x_t + U h_{t-1} + b
//! i = σ(z_i)  f = σ(z_f)  o = σ(z_o)  g = tanh(z_g)
//! c_t = f ⊙ c_{t-1} + i ⊙ g
//! h_t = o ⊙ tanh(c_t)
//! ```

use crate::numerics::{sigmoid, DenseMatrix, ParamSet};
use crate::rng;

/// Slots of one LSTM layer inside a model's [`ParamSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LstmSlots {
    pub w: usize,
    pub u: usize,
    pub b: usize,
    pub hidden: usize,
}

impl LstmSlots {
    /// Adds freshly initialized weights to `params`. The forget-gate bias
    /// starts at 1.
    pub fn init(
        params: &mut ParamSet,
        input: usize,
        hidden: usize,
        rng: &mut rng::Rng,
    ) -> LstmSlots {
        let scale = 1.0 / (hidden as f64).sqrt();
        let w = params.push(
            "lstm.w",
            DenseMatrix::uniform(4 * hidden, input, scale, rng),
        );
        let u = params.push(
            "lstm.u",
            DenseMatrix::uniform(4 * hidden, hidden, scale, rng),
        );
        let mut bias = DenseMatrix::zeros(1, 4 * hidden);
        for j in hidden..2 * hidden {
            bias.set(0, j, 1.0);
        }
        let b = params.push("lstm.b", bias);
        LstmSlots { w, u, b, hidden }
    }
}

/// Activations kept from a forward pass.
pub(crate) struct LstmCache {
    /// Activated gates per step, `4 * hidden` each.
    gates: Vec<f64>,
    /// Cell states `c_1..c_T`.
    cells: Vec<f64>,
    /// Hidden states `h_1..h_T`.
    hiddens: Vec<f64>,
    steps: usize,
}

impl LstmCache {
    pub fn final_hidden(&self, hidden: usize) -> &[f64] {
        &self.hiddens[(self.steps - 1) * hidden..]
    }
}

/// Runs the layer over `inputs` (`steps × input`, row-major).
pub(crate) fn forward(
    params: &ParamSet,
    slots: LstmSlots,
    inputs: &[f64],
    input_dim: usize,
) -> LstmCache {
    let hd = slots.hidden;
    let steps = inputs.len() / input_dim;
    debug_assert!(steps > 0);
    let w = params.get(slots.w);
    let u = params.get(slots.u);
    let b = params.get(slots.b).as_slice();

    let mut gates = vec![0.0; steps * 4 * hd];
    let mut cells = vec![0.0; steps * hd];
    let mut hiddens = vec![0.0; steps * hd];
    let zeros = vec![0.0; hd];
    for t in 0..steps {
        let x = &inputs[t * input_dim..(t + 1) * input_dim];
        let z = &mut gates[t * 4 * hd..(t + 1) * 4 * hd];
        z.copy_from_slice(b);
        w.matvec_acc(x, z);
        let (h_prev, c_prev) = if t == 0 {
            (&zeros[..], &zeros[..])
        } else {
            (&hiddens[(t - 1) * hd..t * hd], &cells[(t - 1) * hd..t * hd])
        };
        u.matvec_acc(h_prev, z);
        for v in &mut z[..3 * hd] {
            *v = sigmoid(*v);
        }
        for v in &mut z[3 * hd..] {
            *v = v.tanh();
        }
        let mut c_new = vec![0.0; hd];
        let mut h_new = vec![0.0; hd];
        for j in 0..hd {
            let (i, f, o, g) = (z[j], z[hd + j], z[2 * hd + j], z[3 * hd + j]);
            c_new[j] = f * c_prev[j] + i * g;
            h_new[j] = o * c_new[j].tanh();
        }
        cells[t * hd..(t + 1) * hd].copy_from_slice(&c_new);
        hiddens[t * hd..(t + 1) * hd].copy_from_slice(&h_new);
    }
    LstmCache {
        gates,
        cells,
        hiddens,
        steps,
    }
}

/// Backpropagates `d_final` (gradient w.r.t. the last hidden state) through
/// time. Accumulates weight gradients into `grads` and returns the gradient
/// w.r.t. the inputs (`steps × input`).
pub(crate) fn backward(
    params: &ParamSet,
    slots: LstmSlots,
    inputs: &[f64],
    input_dim: usize,
    cache: &LstmCache,
    d_final: &[f64],
    grads: &mut ParamSet,
) -> Vec<f64> {
    let hd = slots.hidden;
    let steps = cache.steps;
    let w = params.get(slots.w);
    let u = params.get(slots.u);

    let mut d_inputs = vec![0.0; inputs.len()];
    let mut dh = d_final.to_vec();
    let mut dc = vec![0.0; hd];
    let mut dz = vec![0.0; 4 * hd];
    let zeros = vec![0.0; hd];
    for t in (0..steps).rev() {
        let gate = &cache.gates[t * 4 * hd..(t + 1) * 4 * hd];
        let c = &cache.cells[t * hd..(t + 1) * hd];
        let (h_prev, c_prev) = if t == 0 {
            (&zeros[..], &zeros[..])
        } else {
            (
                &cache.hiddens[(t - 1) * hd..t * hd],
                &cache.cells[(t - 1) * hd..t * hd],
            )
        };
        for j in 0..hd {
            let (i, f, o, g) = (gate[j], gate[hd + j], gate[2 * hd + j], gate[3 * hd + j]);
            let tc = c[j].tanh();
            let d_o = dh[j] * tc;
            let dcj = dc[j] + dh[j] * o * (1.0 - tc * tc);
            dz[j] = dcj * g * i * (1.0 - i);
            dz[hd + j] = dcj * c_prev[j] * f * (1.0 - f);
            dz[2 * hd + j] = d_o * o * (1.0 - o);
            dz[3 * hd + j] = dcj * i * (1.0 - g * g);
            dc[j] = dcj * f;
        }
        let x = &inputs[t * input_dim..(t + 1) * input_dim];
        grads.get_mut(slots.w).outer_acc(&dz, x);
        grads.get_mut(slots.u).outer_acc(&dz, h_prev);
        for (gb, d) in grads.get_mut(slots.b).as_mut_slice().iter_mut().zip(&dz) {
            *gb += d;
        }
        w.matvec_t_acc(&dz, &mut d_inputs[t * input_dim..(t + 1) * input_dim]);
        dh.iter_mut().for_each(|v| *v = 0.0);
        u.matvec_t_acc(&dz, &mut dh);
    }
    d_inputs
}
