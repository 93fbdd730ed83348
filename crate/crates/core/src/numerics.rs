//! Dense math shared by the neural baselines: matrices, named parameter
//! sets, softmax / cross-entropy, optimizers and a finite-difference
//! gradient checker. Everything is `f64`.

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Emotion;
use crate::rng;

#[derive(Debug, Error, PartialEq)]
pub enum NumericsError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, NumericsError> {
        if data.len() != rows * cols {
            return Err(NumericsError::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Entries drawn uniformly from `[-scale, scale]`.
    pub fn uniform(rows: usize, cols: usize, scale: f64, rng: &mut rng::Rng) -> Self {
        let data = (0..rows * cols)
            .map(|_| rng.gen_range(-scale..=scale))
            .collect();
        DenseMatrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// `out += self · x`.
    pub fn matvec_acc(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            *o += dot(self.row(r), x);
        }
    }

    /// `out += selfᵀ · y`.
    pub fn matvec_t_acc(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        for (r, &yr) in y.iter().enumerate() {
            if yr != 0.0 {
                axpy(yr, self.row(r), out);
            }
        }
    }

    /// `self += y ⊗ x` (rank-one update).
    pub fn outer_acc(&mut self, y: &[f64], x: &[f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(x.len(), self.cols);
        for (r, &yr) in y.iter().enumerate() {
            if yr != 0.0 {
                axpy(yr, x, self.row_mut(r));
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Dot product with four independent accumulators so the compiler can
/// vectorize it.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let j = i * 4;
        acc[0] += a[j] * b[j];
        acc[1] += a[j + 1] * b[j + 1];
        acc[2] += a[j + 2] * b[j + 2];
        acc[3] += a[j + 3] * b[j + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for j in chunks * 4..a.len() {
        s += a[j] * b[j];
    }
    s
}

/// `y += alpha · x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// A named parameter tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub value: DenseMatrix,
}

/// An ordered collection of named tensors with a flat coordinate view.
///
/// Flat coordinates enumerate tensors in insertion order, each row-major.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParamSet {
    params: Vec<Param>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a tensor and returns its slot index.
    pub fn push(&mut self, name: impl Into<String>, value: DenseMatrix) -> usize {
        self.params.push(Param {
            name: name.into(),
            value,
        });
        self.params.len() - 1
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn get(&self, slot: usize) -> &DenseMatrix {
        &self.params[slot].value
    }

    pub fn get_mut(&mut self, slot: usize) -> &mut DenseMatrix {
        &mut self.params[slot].value
    }

    pub fn by_name(&self, name: &str) -> Option<&DenseMatrix> {
        self.params
            .iter()
            .find(|p| p.name == name)
            .map(|p| &p.value)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Param> {
        self.params.iter()
    }

    pub fn flat_len(&self) -> usize {
        self.params.iter().map(|p| p.value.data.len()).sum()
    }

    fn locate(&self, mut i: usize) -> (usize, usize) {
        for (slot, p) in self.params.iter().enumerate() {
            if i < p.value.data.len() {
                return (slot, i);
            }
            i -= p.value.data.len();
        }
        panic!("flat index out of range");
    }

    pub fn flat_get(&self, i: usize) -> f64 {
        let (slot, off) = self.locate(i);
        self.params[slot].value.data[off]
    }

    pub fn flat_set(&mut self, i: usize, v: f64) {
        let (slot, off) = self.locate(i);
        self.params[slot].value.data[off] = v;
    }

    /// Same names and shapes, all zeros.
    pub fn zeros_like(&self) -> ParamSet {
        ParamSet {
            params: self
                .params
                .iter()
                .map(|p| Param {
                    name: p.name.clone(),
                    value: DenseMatrix::zeros(p.value.rows, p.value.cols),
                })
                .collect(),
        }
    }

    pub fn fill_zero(&mut self) {
        for p in &mut self.params {
            p.value.data.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    pub fn same_layout(&self, other: &ParamSet) -> bool {
        self.params.len() == other.params.len()
            && self
                .params
                .iter()
                .zip(&other.params)
                .all(|(a, b)| a.name == b.name && a.value.shape() == b.value.shape())
    }

    pub fn global_norm(&self) -> f64 {
        self.params
            .iter()
            .flat_map(|p| p.value.data.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for p in &mut self.params {
            p.value.data.iter_mut().for_each(|v| *v *= factor);
        }
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, other: &ParamSet, factor: f64) {
        for (a, b) in self.params.iter_mut().zip(&other.params) {
            axpy(factor, &b.value.data, &mut a.value.data);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.value.is_finite())
    }
}

/// Softmax with max subtraction. Rejects non-finite logits.
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>, NumericsError> {
    if logits.is_empty() {
        return Err(NumericsError::ShapeMismatch(
            "softmax of an empty vector".into(),
        ));
    }
    if logits.iter().any(|z| !z.is_finite()) {
        return Err(NumericsError::NonFinite("softmax logits"));
    }
    Ok(softmax_unchecked(logits))
}

/// Softmax for scores that may contain `-inf` (impossible classes). At least
/// one score must be finite.
pub(crate) fn softmax_unchecked(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Smallest probability fed to the logarithm.
pub const PROB_FLOOR: f64 = 1e-12;

/// `-ln p[label]` for a four-class distribution, with `p` floored at
/// [`PROB_FLOOR`].
pub fn categorical_cross_entropy(probs: &[f64], label: Emotion) -> Result<f64, NumericsError> {
    if probs.len() != Emotion::COUNT {
        return Err(NumericsError::NotADistribution(format!(
            "expected {} entries, got {}",
            Emotion::COUNT,
            probs.len()
        )));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(NumericsError::NotADistribution(
            "entries must be finite and non-negative".into(),
        ));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(NumericsError::NotADistribution(format!("sums to {sum}")));
    }
    Ok(-probs[label.index()].max(PROB_FLOOR).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Sgd,
    Adam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimConfig {
    pub algorithm: Algorithm,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Gradients are rescaled so their global L2 norm is at most this.
    pub clip_norm: f64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        OptimConfig::adam(1e-3)
    }
}

impl OptimConfig {
    pub fn adam(learning_rate: f64) -> Self {
        OptimConfig {
            algorithm: Algorithm::Adam,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            clip_norm: 5.0,
        }
    }

    pub fn sgd(learning_rate: f64) -> Self {
        OptimConfig {
            algorithm: Algorithm::Sgd,
            ..OptimConfig::adam(learning_rate)
        }
    }

    // Negated comparisons so NaN is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), NumericsError> {
        let bad = |m: &str| Err(NumericsError::InvalidConfig(m.to_string()));
        // A zero learning rate is allowed: it turns every step into a no-op.
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be finite and >= 0");
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0 && self.beta2 > 0.0 && self.beta2 < 1.0) {
            return bad("betas must lie in (0, 1)");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.clip_norm > 0.0) {
            return bad("clip_norm must be positive");
        }
        Ok(())
    }
}

/// Per-trainer optimizer state (Adam moments and step counter).
#[derive(Debug, Clone, Default)]
pub struct OptimState {
    step: u64,
    first_moment: Option<ParamSet>,
    second_moment: Option<ParamSet>,
}

impl OptimState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> u64 {
        self.step
    }
}

/// Rescales `grads` in place so its global norm is at most `max_norm`.
/// Returns the norm before clipping.
pub fn clip_global_norm(grads: &mut ParamSet, max_norm: f64) -> f64 {
    let norm = grads.global_norm();
    if norm > max_norm {
        grads.scale(max_norm / norm);
    }
    norm
}

/// Applies one update. `grads` is clipped in place by global norm first.
pub fn optimizer_step(
    params: &mut ParamSet,
    grads: &mut ParamSet,
    state: &mut OptimState,
    config: &OptimConfig,
) -> Result<(), NumericsError> {
    if !params.same_layout(grads) {
        return Err(NumericsError::ShapeMismatch(
            "gradient layout differs from parameters".into(),
        ));
    }
    if !grads.is_finite() {
        return Err(NumericsError::NonFinite("gradients"));
    }
    clip_global_norm(grads, config.clip_norm);
    state.step += 1;
    match config.algorithm {
        Algorithm::Sgd => params.add_scaled(grads, -config.learning_rate),
        Algorithm::Adam => {
            let m = state
                .first_moment
                .get_or_insert_with(|| params.zeros_like());
            let v = state
                .second_moment
                .get_or_insert_with(|| params.zeros_like());
            let (b1, b2) = (config.beta1, config.beta2);
            let t = state.step as i32;
            let c1 = 1.0 - b1.powi(t);
            let c2 = 1.0 - b2.powi(t);
            let lr = config.learning_rate;
            for slot in 0..params.len() {
                let g = grads.get(slot).as_slice();
                let m = m.get_mut(slot).as_mut_slice();
                let v = v.get_mut(slot).as_mut_slice();
                let p = params.get_mut(slot).as_mut_slice();
                for i in 0..p.len() {
                    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                    let m_hat = m[i] / c1;
                    let v_hat = v[i] / c2;
                    p[i] -= lr * m_hat / (v_hat.sqrt() + config.epsilon);
                }
            }
        }
    }
    Ok(())
}

/// Worst-case discrepancies found by [`finite_difference_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    /// Largest `|a - n| / max(|a|, |n|, 1e-8)`.
    pub max_relative: f64,
    /// Largest `|a - n|`.
    pub max_absolute: f64,
    pub coordinates: usize,
}

/// Compares `analytic` against central differences of `loss` on up to
/// `sample` seeded coordinates (all coordinates if `sample` covers them).
///
/// Returns the largest relative error `|a - n| / max(|a|, |n|, 1e-8)`.
pub fn finite_difference_check<F>(
    loss: F,
    params: &ParamSet,
    analytic: &ParamSet,
    h: f64,
    sample: usize,
    seed: u64,
) -> f64
where
    F: FnMut(&ParamSet) -> f64,
{
    finite_difference_report(loss, params, analytic, h, sample, seed).max_relative
}

/// [`finite_difference_check`] with the absolute error as well. Rounding in
/// the loss limits the central difference to roughly `1e-16 · |loss| / h`
/// absolute accuracy, which dominates the relative error on coordinates
/// whose gradient is near zero.
pub fn finite_difference_report<F>(
    mut loss: F,
    params: &ParamSet,
    analytic: &ParamSet,
    h: f64,
    sample: usize,
    seed: u64,
) -> GradCheck
where
    F: FnMut(&ParamSet) -> f64,
{
    assert!(h > 0.0, "step must be positive");
    assert!(params.same_layout(analytic), "gradient layout differs");
    let n = params.flat_len();
    let coords: Vec<usize> = if sample >= n {
        (0..n).collect()
    } else {
        let mut idx = index::sample(&mut rng::seeded(seed), n, sample).into_vec();
        idx.sort_unstable();
        idx
    };
    let mut probe = params.clone();
    let mut report = GradCheck {
        max_relative: 0.0,
        max_absolute: 0.0,
        coordinates: coords.len(),
    };
    for i in coords {
        let orig = probe.flat_get(i);
        probe.flat_set(i, orig + h);
        let plus = loss(&probe);
        probe.flat_set(i, orig - h);
        let minus = loss(&probe);
        probe.flat_set(i, orig);
        let numeric = (plus - minus) / (2.0 * h);
        let a = analytic.flat_get(i);
        let diff = (a - numeric).abs();
        let rel = diff / a.abs().max(numeric.abs()).max(1e-8);
        report.max_relative = report.max_relative.max(rel);
        report.max_absolute = report.max_absolute.max(diff);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scalar_set(v: f64) -> ParamSet {
        let mut p = ParamSet::new();
        p.push("w", DenseMatrix::from_vec(1, 1, vec![v]).unwrap());
        p
    }

    #[test]
    fn softmax_examples() {
        let p = softmax(&[0.0; 4]).unwrap();
        for x in &p {
            assert!((x - 0.25).abs() < 1e-15);
        }
        let p = softmax(&[1000.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!(p[1..].iter().all(|&x| (0.0..1e-300).contains(&x)));
        let z = [0.3, -1.2, 2.5, 0.0];
        let shifted: Vec<f64> = z.iter().map(|v| v + 3.7).collect();
        let (a, b) = (softmax(&z).unwrap(), softmax(&shifted).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_rejects_non_finite() {
        assert_eq!(
            softmax(&[f64::NAN, 0.0]),
            Err(NumericsError::NonFinite("softmax logits"))
        );
        assert!(softmax(&[f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn cross_entropy_examples() {
        let l = categorical_cross_entropy(&[0.25; 4], Emotion::Sad).unwrap();
        assert!((l - 4f64.ln()).abs() < 1e-12);
        assert!((l - 1.3862944).abs() < 1e-7);
        let l = categorical_cross_entropy(&[1.0, 0.0, 0.0, 0.0], Emotion::Angry).unwrap();
        assert_eq!(l, 0.0);
        let l = categorical_cross_entropy(&[0.7, 0.1, 0.1, 0.1], Emotion::Angry).unwrap();
        assert!((l - 0.3566749).abs() < 1e-6);
        // Zero probability on the gold class is clamped, not infinite.
        let l = categorical_cross_entropy(&[1.0, 0.0, 0.0, 0.0], Emotion::Happy).unwrap();
        assert!((l - (-PROB_FLOOR.ln())).abs() < 1e-9);
    }

    #[test]
    fn cross_entropy_rejects_bad_distributions() {
        assert!(categorical_cross_entropy(&[0.5, 0.5, 0.5, 0.5], Emotion::Angry).is_err());
        assert!(categorical_cross_entropy(&[0.5, 0.5], Emotion::Angry).is_err());
        assert!(categorical_cross_entropy(&[1.5, -0.5, 0.0, 0.0], Emotion::Angry).is_err());
    }

    #[test]
    fn sgd_step_example() {
        let mut p = scalar_set(1.0);
        let mut g = scalar_set(0.5);
        optimizer_step(
            &mut p,
            &mut g,
            &mut OptimState::new(),
            &OptimConfig::sgd(0.1),
        )
        .unwrap();
        assert!((p.flat_get(0) - 0.95).abs() < 1e-15);
    }

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        for cfg in [OptimConfig::sgd(0.1), OptimConfig::adam(0.1)] {
            let mut p = scalar_set(1.0);
            let mut state = OptimState::new();
            for _ in 0..3 {
                let mut g = scalar_set(0.0);
                optimizer_step(&mut p, &mut g, &mut state, &cfg).unwrap();
            }
            assert_eq!(p.flat_get(0), 1.0);
        }
    }

    #[test]
    fn clipping_rescales_to_max_norm() {
        let mut p = ParamSet::new();
        p.push("a", DenseMatrix::zeros(1, 2));
        let mut g = ParamSet::new();
        g.push("a", DenseMatrix::from_vec(1, 2, vec![30.0, 40.0]).unwrap());
        assert!((g.global_norm() - 50.0).abs() < 1e-12);
        optimizer_step(
            &mut p,
            &mut g,
            &mut OptimState::new(),
            &OptimConfig::sgd(1.0),
        )
        .unwrap();
        // With lr = 1 the parameter delta is exactly the applied gradient.
        assert!((p.global_norm() - 5.0).abs() < 1e-9);
        assert!((g.global_norm() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn adam_first_step_moves_by_learning_rate() {
        let mut p = scalar_set(1.0);
        let mut g = scalar_set(0.3);
        optimizer_step(
            &mut p,
            &mut g,
            &mut OptimState::new(),
            &OptimConfig::adam(0.01),
        )
        .unwrap();
        // Bias-corrected m/sqrt(v) is sign(g) on the first step.
        assert!((p.flat_get(0) - 0.99).abs() < 1e-6);
    }

    #[test]
    fn optimizer_rejects_layout_mismatch() {
        let mut p = scalar_set(1.0);
        let mut g = ParamSet::new();
        g.push("w", DenseMatrix::zeros(2, 1));
        assert!(matches!(
            optimizer_step(
                &mut p,
                &mut g,
                &mut OptimState::new(),
                &OptimConfig::sgd(0.1)
            ),
            Err(NumericsError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn finite_difference_examples() {
        let params = scalar_set(3.0);
        let err = finite_difference_check(
            |p| p.flat_get(0).powi(2),
            &params,
            &scalar_set(6.0),
            1e-5,
            1,
            0,
        );
        assert!(err < 1e-8, "{err}");

        let err = finite_difference_check(|_| 4.2, &params, &scalar_set(0.0), 1e-5, 1, 0);
        assert_eq!(err, 0.0);

        let err = finite_difference_check(
            |p| p.flat_get(0).powi(2),
            &params,
            &scalar_set(12.0),
            1e-5,
            1,
            0,
        );
        assert!((err - 0.5).abs() < 1e-6, "{err}");
    }

    #[test]
    fn matvec_helpers_agree_with_loops() {
        let m = DenseMatrix::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let mut out = vec![0.0; 2];
        m.matvec_acc(&[1.0, 0.0, -1.0], &mut out);
        assert_eq!(out, vec![-2.0, -2.0]);
        let mut out = vec![0.0; 3];
        m.matvec_t_acc(&[1.0, 1.0], &mut out);
        assert_eq!(out, vec![5.0, 7.0, 9.0]);
        let mut acc = DenseMatrix::zeros(2, 3);
        acc.outer_acc(&[1.0, 2.0], &[1.0, 0.0, 3.0]);
        assert_eq!(acc.as_slice(), &[1.0, 0.0, 3.0, 2.0, 0.0, 6.0]);
    }

    #[test]
    fn dot_handles_remainders() {
        let a: Vec<f64> = (0..7).map(f64::from).collect();
        assert_eq!(dot(&a, &a), (0..7).map(|i| (i * i) as f64).sum::<f64>());
    }

    proptest! {
        #[test]
        fn softmax_is_a_distribution(z in prop::collection::vec(-1e3f64..1e3, 1..8)) {
            let p = softmax(&z).unwrap();
            let sum: f64 = p.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }

        #[test]
        fn zero_learning_rate_is_identity(
            w in prop::collection::vec(-5f64..5.0, 3),
            g in prop::collection::vec(-50f64..50.0, 3),
            adam in any::<bool>(),
        ) {
            let mut p = ParamSet::new();
            p.push("w", DenseMatrix::from_vec(1, 3, w.clone()).unwrap());
            let mut grads = ParamSet::new();
            grads.push("w", DenseMatrix::from_vec(1, 3, g).unwrap());
            let cfg = if adam { OptimConfig::adam(0.0) } else { OptimConfig::sgd(0.0) };
            optimizer_step(&mut p, &mut grads, &mut OptimState::new(), &cfg).unwrap();
            prop_assert_eq!(p.get(0).as_slice(), w.as_slice());
        }
    }
}
