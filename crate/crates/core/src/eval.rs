//! Agreement and evaluation: Cohen's kappa, stratified k-fold
//! cross-validation, confusion matrices, per-class F1 and reports.

use std::thread;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Emotion};
use crate::models::{Classifier, ClassifierSpec, Model, ModelError};
use crate::normalizer::{
    apply_normalization, normalize_text, NormalizationConfig, NormalizerError,
};
use crate::rng;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("label sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no labels to compare")]
    Empty,
    #[error("class {class} has {count} examples, fewer than k = {k}")]
    ClassTooSmall {
        class: &'static str,
        count: usize,
        k: usize,
    },
    #[error("k must be positive")]
    ZeroFolds,
    #[error("fold plan covers {plan} examples but corpus has {corpus}")]
    PlanMismatch { plan: usize, corpus: usize },
    #[error("fold {fold}: {source}")]
    Training {
        fold: usize,
        #[source]
        source: ModelError,
    },
    #[error("fold {fold}: normalization failed: {source}")]
    Normalization {
        fold: usize,
        #[source]
        source: NormalizerError,
    },
    #[error("report has an empty model name")]
    EmptyModelName,
}

/// Observed and chance agreement between two annotators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub kappa: f64,
    pub n: usize,
    pub p_o: f64,
    pub p_e: f64,
}

/// `κ = (p_o − p_e) / (1 − p_e)`, with `κ = 1` when `p_e = 1`.
pub fn agreement(a: &[Emotion], b: &[Emotion]) -> Result<Agreement, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(EvalError::Empty);
    }
    let n = a.len();
    let mut agree = 0usize;
    let mut marg_a = [0usize; 4];
    let mut marg_b = [0usize; 4];
    for (&x, &y) in a.iter().zip(b) {
        agree += usize::from(x == y);
        marg_a[x.index()] += 1;
        marg_b[y.index()] += 1;
    }
    let nf = n as f64;
    let p_o = agree as f64 / nf;
    let p_e = (0..4).map(|c| (marg_a[c] * marg_b[c]) as f64).sum::<f64>() / (nf * nf);
    let kappa = if p_e == 1.0 {
        1.0
    } else {
        (p_o - p_e) / (1.0 - p_e)
    };
    Ok(Agreement { kappa, n, p_o, p_e })
}

pub fn cohen_kappa(a: &[Emotion], b: &[Emotion]) -> Result<f64, EvalError> {
    agreement(a, b).map(|r| r.kappa)
}

/// Assignment of every example to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    k: usize,
    assignment: Vec<usize>,
    seed: u64,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    /// `counts[fold][class]` for the given corpus.
    pub fn fold_class_counts(&self, corpus: &Corpus) -> Vec<[usize; 4]> {
        let mut counts = vec![[0usize; 4]; self.k];
        for (ex, &f) in corpus.examples().iter().zip(&self.assignment) {
            counts[f][ex.label().index()] += 1;
        }
        counts
    }
}

/// Shuffles each class's indices with `seed`, then deals them round-robin.
/// Dealing continues across classes (class order A, F, S, H), so overall fold
/// sizes also differ by at most one.
///
/// Classes absent from the corpus are ignored; every present class needs at
/// least `k` examples.
pub fn stratified_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldPlan, EvalError> {
    if k == 0 {
        return Err(EvalError::ZeroFolds);
    }
    let dist = corpus.class_distribution();
    for (class, count) in dist.iter() {
        if count > 0 && count < k {
            return Err(EvalError::ClassTooSmall {
                class: class.name(),
                count,
                k,
            });
        }
    }
    let mut rng = rng::seeded(seed);
    let mut assignment = vec![0usize; corpus.len()];
    let mut next = 0usize;
    for class in Emotion::ALL {
        let mut idx: Vec<usize> = corpus
            .examples()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.label() == class)
            .map(|(i, _)| i)
            .collect();
        idx.shuffle(&mut rng);
        for i in idx {
            assignment[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldPlan {
        k,
        assignment,
        seed,
    })
}

/// Counts indexed `[gold][predicted]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfusionMatrix(pub [[usize; 4]; 4]);

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.0.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn get(&self, gold: Emotion, predicted: Emotion) -> usize {
        self.0[gold.index()][predicted.index()]
    }

    pub fn add(&mut self, other: &ConfusionMatrix) {
        for g in 0..4 {
            for p in 0..4 {
                self.0[g][p] += other.0[g][p];
            }
        }
    }
}

pub fn confusion(golds: &[Emotion], preds: &[Emotion]) -> Result<ConfusionMatrix, EvalError> {
    if golds.len() != preds.len() {
        return Err(EvalError::LengthMismatch(golds.len(), preds.len()));
    }
    let mut cm = ConfusionMatrix::default();
    for (g, p) in golds.iter().zip(preds) {
        cm.0[g.index()][p.index()] += 1;
    }
    Ok(cm)
}

/// Per-class values keyed by label code.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PerClass {
    #[serde(rename = "A")]
    pub angry: f64,
    #[serde(rename = "F")]
    pub fear: f64,
    #[serde(rename = "S")]
    pub sad: f64,
    #[serde(rename = "H")]
    pub happy: f64,
}

impl PerClass {
    pub fn from_array(v: [f64; 4]) -> Self {
        PerClass {
            angry: v[0],
            fear: v[1],
            sad: v[2],
            happy: v[3],
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.angry, self.fear, self.sad, self.happy]
    }

    pub fn get(&self, e: Emotion) -> f64 {
        self.to_array()[e.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub f1: PerClass,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Accuracy and one-vs-rest F1 per class; any `0/0` is taken as 0.
pub fn metrics(cm: &ConfusionMatrix) -> Result<Metrics, EvalError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::Empty);
    }
    let mut f1 = [0.0; 4];
    for (c, slot) in f1.iter_mut().enumerate() {
        let tp = cm.0[c][c];
        let predicted: usize = (0..4).map(|g| cm.0[g][c]).sum();
        let gold: usize = cm.0[c].iter().sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, gold);
        *slot = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
    }
    Ok(Metrics {
        accuracy: ratio(cm.trace(), total),
        f1: PerClass::from_array(f1),
    })
}

/// Anything [`cross_validate`] can train per fold.
pub trait Learner: Sync {
    type Model: Classifier;

    fn name(&self) -> String;

    /// Hyperparameters echoed into the report.
    fn config_echo(&self) -> serde_json::Value {
        serde_json::Value::Null
    }

    fn fit(&self, corpus: &Corpus, seed: u64) -> Result<Self::Model, ModelError>;
}

impl Learner for ClassifierSpec {
    type Model = Model;

    fn name(&self) -> String {
        self.kind().name().to_string()
    }

    fn config_echo(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }

    fn fit(&self, corpus: &Corpus, seed: u64) -> Result<Model, ModelError> {
        ClassifierSpec::fit(self, corpus, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub f1: PerClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// Unweighted mean of fold accuracies.
    pub accuracy: f64,
    /// Unweighted mean of fold F1 per class.
    pub f1_mean: PerClass,
    /// Accuracy of the summed confusion matrix.
    pub accuracy_pooled: f64,
    /// F1 per class from the summed confusion matrix.
    pub f1_pooled: PerClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub folds: Vec<FoldResult>,
    pub aggregate: Aggregate,
}

/// Cross-validation options.
#[derive(Debug, Clone, Default)]
pub struct CrossValOptions {
    /// Fit a normalizer on each training split and apply it to both splits.
    pub normalization: Option<NormalizationConfig>,
    /// Run folds on separate threads. Results are identical either way.
    pub parallel: bool,
}

/// Seed used for everything fitted on fold `fold`.
pub fn fold_seed(plan_seed: u64, fold: usize) -> u64 {
    rng::derive_seed(plan_seed, fold as u64)
}

fn run_fold<L: Learner>(
    learner: &L,
    corpus: &Corpus,
    plan: &FoldPlan,
    fold: usize,
    options: &CrossValOptions,
) -> Result<FoldResult, EvalError> {
    let seed = fold_seed(plan.seed, fold);
    let mut train = corpus.subset(&plan.train_indices(fold), corpus.provenance());
    let test = corpus.subset(&plan.test_indices(fold), corpus.provenance());
    let mut test_texts: Vec<String> = test.texts().map(str::to_string).collect();
    if let Some(norm) = &options.normalization {
        let mut cfg = norm.clone();
        cfg.skipgram.seed = rng::derive_seed(seed, 100);
        let map = cfg
            .fit(&train)
            .map_err(|source| EvalError::Normalization { fold, source })?;
        train = apply_normalization(&train, &map);
        test_texts = test_texts.iter().map(|t| normalize_text(t, &map)).collect();
    }
    let model = learner
        .fit(&train, seed)
        .map_err(|source| EvalError::Training { fold, source })?;
    let preds: Vec<Emotion> = test_texts.iter().map(|t| model.predict(t)).collect();
    let cm = confusion(&test.labels(), &preds)?;
    let m = metrics(&cm)?;
    Ok(FoldResult {
        fold,
        confusion: cm,
        accuracy: m.accuracy,
        f1: m.f1,
    })
}

/// k-fold cross-validation: for each fold, train on the other folds and
/// evaluate on it. Anything fitted (normalizer, vocabulary, embeddings,
/// model) sees training folds only. Fold `i` uses seed
/// [`fold_seed`]`(plan.seed, i)`.
pub fn cross_validate<L: Learner>(
    learner: &L,
    corpus: &Corpus,
    plan: &FoldPlan,
    options: &CrossValOptions,
) -> Result<EvalReport, EvalError> {
    if plan.assignment.len() != corpus.len() {
        return Err(EvalError::PlanMismatch {
            plan: plan.assignment.len(),
            corpus: corpus.len(),
        });
    }
    let folds: Vec<usize> = (0..plan.k)
        .filter(|&f| plan.assignment.contains(&f))
        .collect();
    let results: Vec<Result<FoldResult, EvalError>> = if options.parallel {
        thread::scope(|s| {
            let handles: Vec<_> = folds
                .iter()
                .map(|&f| s.spawn(move || run_fold(learner, corpus, plan, f, options)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("fold thread panicked"))
                .collect()
        })
    } else {
        folds
            .iter()
            .map(|&f| run_fold(learner, corpus, plan, f, options))
            .collect()
    };
    let folds = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let n = folds.len() as f64;
    let accuracy = folds.iter().map(|f| f.accuracy).sum::<f64>() / n;
    let mut f1_sum = [0.0; 4];
    let mut pooled = ConfusionMatrix::default();
    for f in &folds {
        for (s, v) in f1_sum.iter_mut().zip(f.f1.to_array()) {
            *s += v;
        }
        pooled.add(&f.confusion);
    }
    let pooled_metrics = metrics(&pooled)?;
    let mut config = learner.config_echo();
    if let (Some(norm), serde_json::Value::Object(map)) = (&options.normalization, &mut config) {
        map.insert(
            "normalization".into(),
            serde_json::to_value(norm).unwrap_or(serde_json::Value::Null),
        );
    }
    Ok(EvalReport {
        model: learner.name(),
        seed: plan.seed,
        config,
        aggregate: Aggregate {
            accuracy,
            f1_mean: PerClass::from_array(f1_sum.map(|s| s / n)),
            accuracy_pooled: pooled_metrics.accuracy,
            f1_pooled: pooled_metrics.f1,
        },
        folds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Json,
}

/// Column order of the table: Sad, Angry, Happy, Fear, then accuracy.
pub const TABLE_CLASS_ORDER: [Emotion; 4] =
    [Emotion::Sad, Emotion::Angry, Emotion::Happy, Emotion::Fear];

/// `"S A H F Acc"` with F1 to two decimals and accuracy as a percentage to
/// one decimal, single-space separated.
pub fn format_row(f1: &PerClass, accuracy: f64) -> String {
    let mut cells: Vec<String> = TABLE_CLASS_ORDER
        .iter()
        .map(|&e| format!("{:.2}", f1.get(e)))
        .collect();
    cells.push(format!("{:.1}", accuracy * 100.0));
    cells.join(" ")
}

pub const TABLE_HEADER: &str = "Model\tSad Angry Happy Fear Accuracy%";

/// Renders one report; see [`render_reports`].
pub fn render_report(report: &EvalReport, format: ReportFormat) -> Result<String, EvalError> {
    match format {
        ReportFormat::Table => render_reports(std::slice::from_ref(report)),
        ReportFormat::Json => {
            if report.model.is_empty() {
                return Err(EvalError::EmptyModelName);
            }
            Ok(serde_json::to_string_pretty(report).expect("reports serialize") + "\n")
        }
    }
}

/// A header line plus one `model<TAB>row` line per report, using the
/// fold-mean aggregates.
pub fn render_reports(reports: &[EvalReport]) -> Result<String, EvalError> {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in reports {
        if r.model.is_empty() {
            return Err(EvalError::EmptyModelName);
        }
        out.push_str(&r.model);
        out.push('\t');
        out.push_str(&format_row(&r.aggregate.f1_mean, r.aggregate.accuracy));
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_report_json(json: &str) -> Result<EvalReport, serde_json::Error> {
    serde_json::from_str(json)
}
