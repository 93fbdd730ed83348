//! Transliteration-variant normalization.
//!
//! Romanized Hindi has no fixed spelling: `khubsurat`, `khoobsurat` and
//! `khoobsoorat` are the same word. Variants mostly differ in their vowels
//! and occur in similar contexts, so two words are treated as candidate
//! variants only when their consonant skeletons match, and then scored by
//! the cosine of their skip-gram vectors:
//!
//! ```text
//! f(w1, w2) = cos(v(w1), v(w2))   if skeleton(w1) == skeleton(w2)
//!           = 0                   otherwise
//! ```
//!
//! Words connected by `f >= tau` form a cluster, and every member is
//! rewritten to the cluster's most frequent spelling.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, LabeledExample};
use crate::numerics::{dot, sigmoid, DenseMatrix};
use crate::rng;
use crate::text::{build_vocabulary, consonant_skeleton, tokenize, Token, Vocabulary};

#[derive(Debug, Error)]
pub enum NormalizerError {
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("token {0:?} is not in the embedding table")]
    UnknownToken(String),
    #[error("cosine similarity undefined for a zero-norm vector")]
    ZeroNorm,
    #[error("vector dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipGramConfig {
    pub dim: usize,
    /// Context radius on each side of the center word.
    pub window: usize,
    /// Noise samples per observed (center, context) pair.
    pub negatives: usize,
    pub epochs: usize,
    /// Starting learning rate; decays linearly to 10% of this value.
    pub learning_rate: f64,
    pub min_count: usize,
    pub seed: u64,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            dim: 32,
            window: 2,
            negatives: 5,
            epochs: 10,
            learning_rate: 0.025,
            min_count: 1,
            seed: 0,
        }
    }
}

impl SkipGramConfig {
    pub fn validate(&self) -> Result<(), NormalizerError> {
        if self.dim < 2
            || self.window == 0
            || self.negatives == 0
            || self.epochs == 0
            || self.min_count == 0
            || !(self.learning_rate > 0.0 && self.learning_rate.is_finite())
        {
            return Err(NormalizerError::InvalidConfig(format!(
                "skip-gram parameters must be positive with dim >= 2: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Word vectors, one row per vocabulary id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingTable {
    vocab: Vocabulary,
    vectors: DenseMatrix,
}

impl EmbeddingTable {
    pub fn new(vocab: Vocabulary, vectors: DenseMatrix) -> Result<Self, NormalizerError> {
        if vectors.rows() != vocab.len() {
            return Err(NormalizerError::InvalidConfig(format!(
                "{} vectors for {} tokens",
                vectors.rows(),
                vocab.len()
            )));
        }
        Ok(EmbeddingTable { vocab, vectors })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn vectors(&self) -> &DenseMatrix {
        &self.vectors
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.vocab.id(token).map(|id| self.vectors.row(id))
    }

    /// Text form: a `V dim` header, then `token v1 ... vdim` per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.vocab.len(), self.dim());
        for (id, token) in self.vocab.tokens().iter().enumerate() {
            out.push_str(token);
            for v in self.vectors.row(id) {
                out.push(' ');
                out.push_str(&format!("{v:?}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`EmbeddingTable::to_text`] output. Frequencies are not part
    /// of the format and are set to 1.
    pub fn from_text(text: &str) -> Result<Self, NormalizerError> {
        let parse_err = |line: usize, reason: String| NormalizerError::Parse { line, reason };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|e| parse_err(1, format!("bad header: {e}")))?;
        let [v, dim] = dims[..] else {
            return Err(parse_err(1, "header must be `V dim`".into()));
        };
        let mut tokens = Vec::with_capacity(v);
        let mut data = Vec::with_capacity(v * dim);
        for (i, line) in lines {
            let mut fields = line.split_whitespace();
            let token = fields.next().unwrap_or_default().to_string();
            let values: Vec<f64> = fields
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| parse_err(i + 1, format!("bad value: {e}")))?;
            if values.len() != dim {
                return Err(parse_err(i + 1, format!("expected {dim} values")));
            }
            tokens.push((token, 1));
            data.extend(values);
        }
        if tokens.len() != v {
            return Err(parse_err(
                1,
                format!("header declares {v} rows, found {}", tokens.len()),
            ));
        }
        let vectors =
            DenseMatrix::from_vec(v, dim, data).map_err(|e| parse_err(1, e.to_string()))?;
        EmbeddingTable::new(Vocabulary::from_frequencies(tokens), vectors)
    }
}

pub fn train_skipgram(
    corpus: &Corpus,
    config: &SkipGramConfig,
) -> Result<EmbeddingTable, NormalizerError> {
    train_skipgram_with_losses(corpus, config).map(|(table, _)| table)
}

/// Skip-gram with negative sampling trained by plain SGD.
///
/// Returns the table and the mean per-pair loss of each epoch.
pub fn train_skipgram_with_losses(
    corpus: &Corpus,
    config: &SkipGramConfig,
) -> Result<(EmbeddingTable, Vec<f64>), NormalizerError> {
    config.validate()?;
    let vocab = build_vocabulary(corpus).with_min_count(config.min_count);
    if vocab.is_empty() {
        return Err(NormalizerError::EmptyVocabulary);
    }
    let sentences: Vec<Vec<usize>> = corpus
        .texts()
        .map(|t| tokenize(t).iter().filter_map(|tok| vocab.id(tok)).collect())
        .collect();

    let dim = config.dim;
    let mut rng = rng::seeded(config.seed);
    let bound = 0.5 / dim as f64;
    let mut input = DenseMatrix::uniform(vocab.len(), dim, bound, &mut rng);
    let mut output = DenseMatrix::zeros(vocab.len(), dim);

    // Noise distribution proportional to frequency^0.75.
    let mut cumulative = Vec::with_capacity(vocab.len());
    let mut acc = 0.0;
    for id in 0..vocab.len() {
        acc += (vocab.frequency_of_id(id) as f64).powf(0.75);
        cumulative.push(acc);
    }
    let noise_total = acc;

    let words_per_epoch: usize = sentences.iter().map(Vec::len).sum();
    let total_work = (words_per_epoch * config.epochs).max(1) as f64;
    let mut processed = 0usize;

    let mut order: Vec<usize> = (0..sentences.len()).collect();
    let mut grad_center = vec![0.0; dim];
    let mut center_row = vec![0.0; dim];
    let mut losses = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut pairs = 0usize;
        for &s in &order {
            let sentence = &sentences[s];
            for (pos, &center) in sentence.iter().enumerate() {
                let progress = processed as f64 / total_work;
                let lr = config.learning_rate * (1.0 - 0.9 * progress);
                processed += 1;
                let lo = pos.saturating_sub(config.window);
                let hi = (pos + config.window).min(sentence.len() - 1);
                #[allow(clippy::needless_range_loop)]
                for ctx_pos in lo..=hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    let context = sentence[ctx_pos];
                    grad_center.iter_mut().for_each(|g| *g = 0.0);
                    center_row.copy_from_slice(input.row(center));
                    let mut pair_loss = 0.0;
                    for k in 0..=config.negatives {
                        let (target, label) = if k == 0 {
                            (context, 1.0)
                        } else {
                            let r = rng.gen::<f64>() * noise_total;
                            let t = cumulative.partition_point(|&c| c <= r).min(vocab.len() - 1);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let score = dot(&center_row, output.row(target));
                        let p = sigmoid(score);
                        pair_loss -= if label == 1.0 {
                            log_sigmoid(score)
                        } else {
                            log_sigmoid(-score)
                        };
                        let g = (label - p) * lr;
                        for (gc, &o) in grad_center.iter_mut().zip(output.row(target)) {
                            *gc += g * o;
                        }
                        for (o, &c) in output.row_mut(target).iter_mut().zip(&center_row) {
                            *o += g * c;
                        }
                    }
                    for (c, g) in input.row_mut(center).iter_mut().zip(&grad_center) {
                        *c += g;
                    }
                    epoch_loss += pair_loss;
                    pairs += 1;
                }
            }
        }
        losses.push(if pairs == 0 {
            0.0
        } else {
            epoch_loss / pairs as f64
        });
    }

    Ok((EmbeddingTable::new(vocab, input)?, losses))
}

fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64, NormalizerError> {
    if a.len() != b.len() {
        return Err(NormalizerError::DimensionMismatch(a.len(), b.len()));
    }
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(NormalizerError::ZeroNorm);
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// The consonant-gated similarity `f(w1, w2)`.
pub fn variation_similarity(
    w1: &str,
    w2: &str,
    table: &EmbeddingTable,
) -> Result<f64, NormalizerError> {
    let v1 = table
        .vector(w1)
        .ok_or_else(|| NormalizerError::UnknownToken(w1.to_string()))?;
    let v2 = table
        .vector(w2)
        .ok_or_else(|| NormalizerError::UnknownToken(w2.to_string()))?;
    if consonant_skeleton(w1) != consonant_skeleton(w2) {
        return Ok(0.0);
    }
    cosine_similarity(v1, v2)
}

/// Token → canonical spelling, plus the partition it came from.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClusterMap {
    canonical: BTreeMap<String, String>,
    clusters: Vec<Vec<String>>,
}

impl ClusterMap {
    /// Canonical form of `token`; tokens outside the map are returned as is.
    pub fn canonical<'a>(&'a self, token: &'a str) -> &'a str {
        self.canonical.get(token).map_or(token, String::as_str)
    }

    pub fn clusters(&self) -> &[Vec<String>] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }

    /// Number of tokens whose canonical form differs from themselves.
    pub fn rewritten_tokens(&self) -> usize {
        self.canonical.iter().filter(|(t, c)| t != c).count()
    }

    /// `token<TAB>canonical` per line, sorted by token.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (t, c) in &self.canonical {
            out.push_str(t);
            out.push('\t');
            out.push_str(c);
            out.push('\n');
        }
        out
    }

    /// Parses [`ClusterMap::to_tsv`] output. Clusters are regrouped by
    /// canonical form; every canonical must map to itself.
    pub fn from_tsv(content: &str) -> Result<Self, NormalizerError> {
        let mut canonical = BTreeMap::new();
        for (i, line) in content.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 || cols[0].is_empty() || cols[1].is_empty() {
                return Err(NormalizerError::Parse {
                    line: i + 1,
                    reason: "expected `token<TAB>canonical`".into(),
                });
            }
            canonical.insert(cols[0].to_string(), cols[1].to_string());
        }
        let mut groups: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for (t, c) in &canonical {
            if canonical.get(c) != Some(c) {
                return Err(NormalizerError::Parse {
                    line: 0,
                    reason: format!("canonical {c:?} of {t:?} does not map to itself"),
                });
            }
            groups.entry(c.as_str()).or_default().push(t.clone());
        }
        let clusters = groups.into_values().collect();
        Ok(ClusterMap {
            canonical,
            clusters,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), NormalizerError> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|source| NormalizerError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NormalizerError> {
        let path = path.as_ref();
        let content = fs::read_to_string(path).map_err(|source| NormalizerError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        ClusterMap::from_tsv(&content)
    }
}

/// Clusters same-skeleton tokens whose similarity reaches `tau` (connected
/// components) and picks each cluster's most frequent member as canonical,
/// breaking ties by the lexicographically smallest token.
///
/// Tokens missing from `table`, or with zero vectors, stay singletons.
pub fn build_cluster_map(
    vocab: &Vocabulary,
    table: &EmbeddingTable,
    tau: f64,
) -> Result<ClusterMap, NormalizerError> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(NormalizerError::InvalidConfig(format!(
            "tau must lie in (0, 1], got {tau}"
        )));
    }
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (id, token) in vocab.tokens().iter().enumerate() {
        groups
            .entry(consonant_skeleton(token))
            .or_default()
            .push(id);
    }

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for members in groups.values() {
        let mut dsu = DisjointSet::new(members.len());
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                let (ta, tb) = (&vocab.tokens()[members[a]], &vocab.tokens()[members[b]]);
                let sim = match (table.vector(ta), table.vector(tb)) {
                    (Some(va), Some(vb)) => cosine_similarity(va, vb).unwrap_or(0.0),
                    _ => 0.0,
                };
                if sim >= tau {
                    dsu.union(a, b);
                }
            }
        }
        let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (local, &id) in members.iter().enumerate() {
            components.entry(dsu.find(local)).or_default().push(id);
        }
        clusters.extend(components.into_values());
    }
    // Members are in id order; order clusters by their first member.
    clusters.sort_by_key(|c| c[0]);

    let mut canonical = BTreeMap::new();
    let mut named = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let best = cluster
            .iter()
            .map(|&id| (vocab.frequency_of_id(id), &vocab.tokens()[id]))
            .max_by(|(fa, ta), (fb, tb)| fa.cmp(fb).then_with(|| tb.cmp(ta)))
            .map(|(_, t)| t.clone())
            .expect("clusters are non-empty");
        let names: Vec<String> = cluster
            .iter()
            .map(|&id| vocab.tokens()[id].clone())
            .collect();
        for t in &names {
            canonical.insert(t.clone(), best.clone());
        }
        named.push(names);
    }
    Ok(ClusterMap {
        canonical,
        clusters: named,
    })
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller root so component ids are stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Rewrites every token to its canonical form and rejoins with single
/// spaces. Labels and order are preserved. A sentence with no tokens is left
/// untouched.
pub fn apply_normalization(corpus: &Corpus, map: &ClusterMap) -> Corpus {
    let examples = corpus
        .examples()
        .iter()
        .map(|ex| {
            let tokens = tokenize(ex.text());
            if tokens.is_empty() {
                return ex.clone();
            }
            let text = tokens
                .iter()
                .map(|t| map.canonical(t.as_str()))
                .collect::<Vec<_>>()
                .join(" ");
            LabeledExample::new(text, ex.label()).expect("non-empty token join is valid text")
        })
        .collect();
    Corpus::new(examples, corpus.provenance())
}

/// Normalizes a single sentence the same way [`apply_normalization`] does.
pub fn normalize_text(text: &str, map: &ClusterMap) -> String {
    let tokens: Vec<Token> = tokenize(text);
    if tokens.is_empty() {
        return text.to_string();
    }
    tokens
        .iter()
        .map(|t| map.canonical(t.as_str()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// The full fit: skip-gram on `corpus`, then clustering at `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationConfig {
    pub skipgram: SkipGramConfig,
    pub tau: f64,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            skipgram: SkipGramConfig::default(),
            tau: 0.5,
        }
    }
}

impl NormalizationConfig {
    pub fn fit(&self, corpus: &Corpus) -> Result<ClusterMap, NormalizerError> {
        let table = train_skipgram(corpus, &self.skipgram)?;
        build_cluster_map(table.vocab(), &table, self.tau)
    }
}

/// Summary counts for a cluster map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterStats {
    pub vocabulary: usize,
    pub clusters: usize,
    pub multi_member_clusters: usize,
    pub largest_cluster: usize,
    pub rewritten_tokens: usize,
}

impl From<&ClusterMap> for ClusterStats {
    fn from(map: &ClusterMap) -> Self {
        ClusterStats {
            vocabulary: map.len(),
            clusters: map.clusters().len(),
            multi_member_clusters: map.clusters().iter().filter(|c| c.len() > 1).count(),
            largest_cluster: map.clusters().iter().map(Vec::len).max().unwrap_or(0),
            rewritten_tokens: map.rewritten_tokens(),
        }
    }
}

/// Canonical forms grouped by skeleton; handy for inspecting a map.
pub fn clusters_by_skeleton(map: &ClusterMap) -> HashMap<String, Vec<Vec<String>>> {
    let mut out: HashMap<String, Vec<Vec<String>>> = HashMap::new();
    for cluster in map.clusters() {
        out.entry(consonant_skeleton(&cluster[0]))
            .or_default()
            .push(cluster.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_synthetic, Emotion, SynthConfig};
    use proptest::prelude::*;

    /// Table over `tokens` whose rows are the given vectors.
    fn table(entries: &[(&str, usize, Vec<f64>)]) -> EmbeddingTable {
        let vocab = Vocabulary::from_frequencies(entries.iter().map(|(t, f, _)| (*t, *f)));
        let dim = entries[0].2.len();
        let data = entries.iter().flat_map(|(_, _, v)| v.clone()).collect();
        EmbeddingTable::new(
            vocab,
            DenseMatrix::from_vec(entries.len(), dim, data).unwrap(),
        )
        .unwrap()
    }

    /// Unit vector in the plane of e0/e1 at cosine `c` to e0.
    fn at_cosine(c: f64) -> Vec<f64> {
        vec![c, (1.0 - c * c).sqrt(), 0.0]
    }

    #[test]
    fn cosine_examples() {
        let v = [0.3, -2.0, 1.1];
        assert!((cosine_similarity(&v, &v).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c = cosine_similarity(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(matches!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]),
            Err(NormalizerError::ZeroNorm)
        ));
        assert!(matches!(
            cosine_similarity(&[1.0], &[1.0, 0.0]),
            Err(NormalizerError::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn variation_similarity_examples() {
        // Gram-Schmidt: e0 and a vector at cosine 0.8 to it.
        let t = table(&[
            ("khubsurat", 3, vec![1.0, 0.0, 0.0]),
            ("khoobsoorat", 2, at_cosine(0.8)),
            ("khush", 4, vec![0.0, 1.0, 0.0]),
            ("dukh", 4, vec![0.0, 1.0, 0.0]),
        ]);
        assert!((variation_similarity("khush", "khush", &t).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(variation_similarity("khush", "dukh", &t).unwrap(), 0.0);
        let s = variation_similarity("khubsurat", "khoobsoorat", &t).unwrap();
        assert!((s - 0.8).abs() < 1e-12, "{s}");
        assert!(matches!(
            variation_similarity("khush", "nahi", &t),
            Err(NormalizerError::UnknownToken(w)) if w == "nahi"
        ));
    }

    #[test]
    fn cluster_family_maps_to_most_frequent() {
        let t = table(&[
            ("ha", 20, vec![1.0, 0.0, 0.0]),
            ("hai", 50, at_cosine(0.9)),
            ("h", 10, vec![0.9, 0.0, (1.0f64 - 0.81).sqrt()]),
        ]);
        let map = build_cluster_map(t.vocab(), &t, 0.5).unwrap();
        for w in ["hai", "ha", "h"] {
            assert_eq!(map.canonical(w), "hai");
        }
        assert_eq!(map.clusters().len(), 1);
    }

    #[test]
    fn singleton_maps_to_itself() {
        let t = table(&[("khush", 5, vec![1.0, 0.0]), ("dukh", 9, vec![1.0, 0.0])]);
        let map = build_cluster_map(t.vocab(), &t, 0.5).unwrap();
        assert_eq!(map.canonical("khush"), "khush");
        assert_eq!(map.canonical("dukh"), "dukh");
        assert_eq!(map.canonical("unseen"), "unseen");
    }

    #[test]
    fn frequency_tie_prefers_lexicographically_smaller() {
        let t = table(&[
            ("pyaar", 7, vec![1.0, 0.0, 0.0]),
            ("pyar", 7, at_cosine(0.9)),
        ]);
        let map = build_cluster_map(t.vocab(), &t, 0.5).unwrap();
        assert_eq!(map.canonical("pyar"), "pyaar");
        assert_eq!(map.canonical("pyaar"), "pyaar");
    }

    #[test]
    fn below_tau_stays_separate() {
        let t = table(&[
            ("pyaar", 7, vec![1.0, 0.0, 0.0]),
            ("pyar", 3, at_cosine(0.4)),
        ]);
        let map = build_cluster_map(t.vocab(), &t, 0.5).unwrap();
        assert_eq!(map.canonical("pyar"), "pyar");
        assert!(build_cluster_map(t.vocab(), &t, 0.0).is_err());
        assert!(build_cluster_map(t.vocab(), &t, 1.5).is_err());
    }

    #[test]
    fn apply_examples() {
        let t = table(&[("hai", 5, vec![1.0, 0.0, 0.0]), ("ha", 1, at_cosine(0.9))]);
        let map = build_cluster_map(t.vocab(), &t, 0.5).unwrap();
        let c =
            Corpus::from_pairs([("ha bhai", Emotion::Happy), ("!!", Emotion::Sad)], "x").unwrap();
        let n = apply_normalization(&c, &map);
        assert_eq!(n.examples()[0].text(), "hai bhai");
        assert_eq!(n.examples()[1].text(), "!!");
        assert_eq!(n.labels(), c.labels());

        let identity = ClusterMap::default();
        let c = Corpus::from_pairs([("Ha,  BHAI!", Emotion::Happy)], "x").unwrap();
        assert_eq!(
            apply_normalization(&c, &identity).examples()[0].text(),
            "ha bhai"
        );
    }

    #[test]
    fn skipgram_output_shape() {
        let c = generate_synthetic(&SynthConfig {
            size: 40,
            ..SynthConfig::default()
        })
        .unwrap();
        let cfg = SkipGramConfig {
            epochs: 2,
            dim: 8,
            ..SkipGramConfig::default()
        };
        let t = train_skipgram(&c, &cfg).unwrap();
        assert_eq!(t.vectors().rows(), build_vocabulary(&c).len());
        assert_eq!(t.dim(), 8);
        assert!(t.vectors().is_finite());
        for id in 0..t.vocab().len() {
            assert!(t.vectors().row(id).iter().any(|&v| v != 0.0));
        }
        assert_eq!(train_skipgram(&c, &cfg).unwrap(), t);
    }

    fn toy_context_corpus() -> Corpus {
        let pairs: Vec<(&str, Emotion)> = (0..200)
            .map(|i| (if i % 2 == 0 { "a b c" } else { "a d c" }, Emotion::Angry))
            .collect();
        Corpus::from_pairs(pairs, "toy").unwrap()
    }

    #[test]
    fn shared_contexts_give_similar_vectors() {
        let c = toy_context_corpus();
        let t = train_skipgram(&c, &SkipGramConfig::default()).unwrap();
        let bd = cosine_similarity(t.vector("b").unwrap(), t.vector("d").unwrap()).unwrap();
        let mut rng = rng::seeded(11);
        let v = t.vocab().len();
        let mut sum = 0.0;
        for _ in 0..100 {
            let i = rng.gen_range(0..v);
            let j = (i + rng.gen_range(1..v)) % v;
            sum += cosine_similarity(t.vectors().row(i), t.vectors().row(j)).unwrap();
        }
        let mean = sum / 100.0;
        assert!(bd > mean, "cos(b,d) = {bd}, random mean = {mean}");
    }

    #[test]
    fn skipgram_loss_decreases() {
        let (_, losses) =
            train_skipgram_with_losses(&toy_context_corpus(), &SkipGramConfig::default()).unwrap();
        assert_eq!(losses.len(), 10);
        assert!(losses[9] < losses[0], "{losses:?}");
    }

    #[test]
    fn skipgram_rejects_bad_input() {
        let c = toy_context_corpus();
        let cfg = SkipGramConfig {
            min_count: 10_000,
            ..SkipGramConfig::default()
        };
        assert!(matches!(
            train_skipgram(&c, &cfg),
            Err(NormalizerError::EmptyVocabulary)
        ));
        let cfg = SkipGramConfig {
            dim: 1,
            ..SkipGramConfig::default()
        };
        assert!(train_skipgram(&c, &cfg).is_err());
    }

    #[test]
    fn embedding_text_round_trip() {
        let t = table(&[("a", 1, vec![0.1, -2.5e-7]), ("b", 1, vec![1.0 / 3.0, 4.0])]);
        let text = t.to_text();
        assert!(text.starts_with("2 2\n"));
        assert_eq!(EmbeddingTable::from_text(&text).unwrap(), t);
        assert!(EmbeddingTable::from_text("3 2\na 1 2\n").is_err());
    }

    #[test]
    fn cluster_map_tsv_round_trip() {
        let t = table(&[
            ("hai", 5, vec![1.0, 0.0, 0.0]),
            ("ha", 1, at_cosine(0.9)),
            ("dukh", 2, vec![0.0, 0.0, 1.0]),
        ]);
        let map = build_cluster_map(t.vocab(), &t, 0.5).unwrap();
        let back = ClusterMap::from_tsv(&map.to_tsv()).unwrap();
        assert_eq!(back.to_tsv(), map.to_tsv());
        for tok in ["hai", "ha", "dukh"] {
            assert_eq!(back.canonical(tok), map.canonical(tok));
        }
        assert!(ClusterMap::from_tsv("ha\thai\n").is_err());
    }

    #[test]
    fn normalization_of_synthetic_corpus_is_idempotent() {
        let c = generate_synthetic(&SynthConfig {
            size: 200,
            variant_rate: 0.3,
            seed: 5,
            ..SynthConfig::default()
        })
        .unwrap();
        let map = NormalizationConfig::default().fit(&c).unwrap();
        let once = apply_normalization(&c, &map);
        assert_eq!(apply_normalization(&once, &map), once);
    }

    fn random_table(seed: u64) -> EmbeddingTable {
        let words = [
            "hai", "ha", "h", "hain", "pyar", "pyaar", "piyar", "khush", "khushi", "dukh", "dekh",
            "dikh", "mei", "main", "mn",
        ];
        let mut rng = rng::seeded(seed);
        let vocab = Vocabulary::from_frequencies(words.iter().map(|w| (*w, rng.gen_range(1..5))));
        let vectors = DenseMatrix::uniform(words.len(), 3, 1.0, &mut rng);
        EmbeddingTable::new(vocab, vectors).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cluster_map_invariants(seed in any::<u64>(), tau in 0.05f64..1.0) {
            let t = random_table(seed);
            let vocab = t.vocab();
            let map = build_cluster_map(vocab, &t, tau).unwrap();
            let mut seen = std::collections::HashSet::new();
            for cluster in map.clusters() {
                let skel = consonant_skeleton(&cluster[0]);
                let canon = map.canonical(&cluster[0]).to_string();
                prop_assert!(cluster.contains(&canon));
                let max_freq = cluster.iter().map(|w| vocab.frequency(w)).max().unwrap();
                prop_assert_eq!(vocab.frequency(&canon), max_freq);
                for w in cluster {
                    prop_assert!(seen.insert(w.clone()));
                    prop_assert_eq!(consonant_skeleton(w), skel.clone());
                    prop_assert_eq!(map.canonical(w), canon.as_str());
                    prop_assert_eq!(map.canonical(map.canonical(w)), map.canonical(w));
                }
            }
            prop_assert_eq!(seen.len(), vocab.len());
        }

        #[test]
        fn similarity_is_symmetric_and_gated(seed in any::<u64>(), i in 0usize..15, j in 0usize..15) {
            let t = random_table(seed);
            let (a, b) = (&t.vocab().tokens()[i], &t.vocab().tokens()[j]);
            let ab = variation_similarity(a, b, &t).unwrap();
            prop_assert_eq!(ab, variation_similarity(b, a, &t).unwrap());
            if ab != 0.0 {
                prop_assert_eq!(consonant_skeleton(a), consonant_skeleton(b));
            }
        }

        #[test]
        fn raising_tau_refines_clusters(seed in any::<u64>(), lo in 0.05f64..0.9, step in 0.0f64..0.5) {
            let t = random_table(seed);
            let hi = (lo + step).min(1.0);
            let coarse = build_cluster_map(t.vocab(), &t, lo).unwrap();
            let fine = build_cluster_map(t.vocab(), &t, hi).unwrap();
            for cluster in fine.clusters() {
                let c = coarse.canonical(&cluster[0]);
                for w in cluster {
                    prop_assert_eq!(coarse.canonical(w), c);
                }
            }
        }
    }
}
