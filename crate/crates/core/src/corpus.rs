//! Labeled code-mixed sentences: data model, TSV I/O, class statistics and a
//! seeded synthetic generator.
//!
//! The on-disk format is a two-column UTF-8 file, text and label code
//! separated by a tab (shown here as `<TAB>`):
//!
//! ```text
//! # comment lines start with '#'
//! Kutte chup reh tu<TAB>A
//! Aaaj mei bahut khushh hu<TAB>H
//! ```

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::ops::Index;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;
use crate::text::consonant_skeleton;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected 2 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: unknown label {label:?} (expected one of A, F, S, H)")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: {reason}")]
    InvalidLine { line: usize, reason: String },
    #[error("corpus contains no examples")]
    Empty,
    #[error("invalid example: {0}")]
    InvalidExample(String),
    #[error("invalid synthetic config: {0}")]
    InvalidConfig(String),
}

/// One of the four annotated emotions. Declaration order (A < F < S < H) is
/// the class order used for tie-breaking everywhere in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Emotion {
    #[serde(rename = "A")]
    Angry,
    #[serde(rename = "F")]
    Fear,
    #[serde(rename = "S")]
    Sad,
    #[serde(rename = "H")]
    Happy,
}

impl Emotion {
    pub const ALL: [Emotion; 4] = [Emotion::Angry, Emotion::Fear, Emotion::Sad, Emotion::Happy];
    pub const COUNT: usize = 4;

    pub fn code(self) -> char {
        match self {
            Emotion::Angry => 'A',
            Emotion::Fear => 'F',
            Emotion::Sad => 'S',
            Emotion::Happy => 'H',
        }
    }

    /// Parses a single-letter code. Case-sensitive: only `A`, `F`, `S`, `H`.
    pub fn from_code(code: &str) -> Option<Emotion> {
        match code {
            "A" => Some(Emotion::Angry),
            "F" => Some(Emotion::Fear),
            "S" => Some(Emotion::Sad),
            "H" => Some(Emotion::Happy),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Emotion> {
        Emotion::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Angry => "Angry",
            Emotion::Fear => "Fear",
            Emotion::Sad => "Sad",
            Emotion::Happy => "Happy",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

impl FromStr for Emotion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Emotion::from_code(s).ok_or_else(|| format!("unknown label {s:?}"))
    }
}

/// A sentence with its emotion label.
///
/// The text must be non-blank and may not contain tabs or line breaks, which
/// the TSV format cannot represent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    text: String,
    label: Emotion,
}

impl LabeledExample {
    pub fn new(text: impl Into<String>, label: Emotion) -> Result<Self, CorpusError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(CorpusError::InvalidExample("text is blank".into()));
        }
        if text.contains(['\t', '\n', '\r']) {
            return Err(CorpusError::InvalidExample(
                "text contains a tab or line break".into(),
            ));
        }
        Ok(LabeledExample { text, label })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn label(&self) -> Emotion {
        self.label
    }
}

/// Per-class example counts, indexed by [`Emotion`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassCounts(pub [usize; 4]);

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Emotion, usize)> + '_ {
        Emotion::ALL.iter().map(move |&e| (e, self.0[e.index()]))
    }

    /// Classes with at least one example.
    pub fn present(&self) -> impl Iterator<Item = Emotion> + '_ {
        self.iter().filter(|&(_, n)| n > 0).map(|(e, _)| e)
    }
}

impl Index<Emotion> for ClassCounts {
    type Output = usize;

    fn index(&self, e: Emotion) -> &usize {
        &self.0[e.index()]
    }
}

/// An ordered collection of labeled examples. Order is load order; nothing is
/// deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    examples: Vec<LabeledExample>,
    provenance: String,
}

impl Corpus {
    pub fn new(examples: Vec<LabeledExample>, provenance: impl Into<String>) -> Self {
        Corpus {
            examples,
            provenance: provenance.into(),
        }
    }

    /// Builds a corpus from `(text, label)` pairs, validating each text.
    pub fn from_pairs<'a, I>(pairs: I, provenance: impl Into<String>) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = (&'a str, Emotion)>,
    {
        let examples = pairs
            .into_iter()
            .map(|(t, l)| LabeledExample::new(t, l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Corpus::new(examples, provenance))
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn labels(&self) -> Vec<Emotion> {
        self.examples.iter().map(|e| e.label).collect()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.examples.iter().map(|e| e.text.as_str())
    }

    pub fn class_distribution(&self) -> ClassCounts {
        let mut counts = [0usize; 4];
        for ex in &self.examples {
            counts[ex.label.index()] += 1;
        }
        ClassCounts(counts)
    }

    /// The sub-corpus made of the examples at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize], provenance: impl Into<String>) -> Corpus {
        Corpus::new(
            indices.iter().map(|&i| self.examples[i].clone()).collect(),
            provenance,
        )
    }

    /// Parses TSV content. `provenance` is recorded verbatim.
    pub fn from_tsv(content: &str, provenance: impl Into<String>) -> Result<Corpus, CorpusError> {
        let mut examples = Vec::new();
        for (i, raw) in content.split('\n').enumerate() {
            let line_no = i + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 {
                return Err(CorpusError::ColumnCount {
                    line: line_no,
                    found: cols.len(),
                });
            }
            let label = Emotion::from_code(cols[1]).ok_or_else(|| CorpusError::UnknownLabel {
                line: line_no,
                label: cols[1].to_string(),
            })?;
            let example =
                LabeledExample::new(cols[0], label).map_err(|e| CorpusError::InvalidLine {
                    line: line_no,
                    reason: e.to_string(),
                })?;
            examples.push(example);
        }
        if examples.is_empty() {
            return Err(CorpusError::Empty);
        }
        Ok(Corpus::new(examples, provenance))
    }

    /// Serializes to TSV: `text<TAB>label\n` per example, no header, no BOM.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for ex in &self.examples {
            out.push_str(&ex.text);
            out.push('\t');
            out.push(ex.label.code());
            out.push('\n');
        }
        out
    }
}

/// Reads a TSV corpus. The provenance of the result is the path.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Corpus::from_tsv(&content, path.display().to_string())
}

pub fn write_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    fs::write(path, corpus.to_tsv()).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parameters of the synthetic corpus generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Number of sentences; must be divisible by 4.
    pub size: usize,
    /// Per-token probability of a vowel perturbation.
    pub variant_rate: f64,
    /// Content words per class.
    pub lexicon_per_class: usize,
    /// Inclusive sentence length range in tokens.
    pub sentence_len_range: (usize, usize),
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            size: 1000,
            variant_rate: 0.2,
            lexicon_per_class: 30,
            sentence_len_range: (3, 8),
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), CorpusError> {
        let bad = |m: &str| Err(CorpusError::InvalidConfig(m.to_string()));
        if self.size == 0 || !self.size.is_multiple_of(4) {
            return bad("size must be a positive multiple of 4");
        }
        if !(0.0..=1.0).contains(&self.variant_rate) {
            return bad("variant_rate must lie in [0, 1]");
        }
        if self.lexicon_per_class == 0 {
            return bad("lexicon_per_class must be positive");
        }
        let (lo, hi) = self.sentence_len_range;
        if lo == 0 || lo > hi {
            return bad("sentence_len_range must satisfy 0 < min <= max");
        }
        Ok(())
    }
}

/// A token rewritten by the generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perturbation {
    pub original: String,
    pub perturbed: String,
}

/// Generator output together with its perturbation log.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub corpus: Corpus,
    pub perturbations: Vec<Perturbation>,
    /// Total number of tokens emitted (perturbed or not).
    pub token_count: usize,
}

const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];

const FUNCTION_WORDS: [&str; 15] = [
    "mei", "hai", "tu", "bahut", "yaar", "ye", "kya", "na", "to", "bhi", "aur", "main", "ho", "ki",
    "ka",
];

const ONSETS: [&str; 24] = [
    "b", "bh", "ch", "d", "dh", "g", "gh", "j", "k", "kh", "l", "m", "n", "p", "ph", "r", "s",
    "sh", "t", "th", "v", "z", "y", "h",
];

const NUCLEI: [&str; 8] = ["a", "e", "i", "o", "u", "aa", "oo", "ee"];

/// Generates a balanced synthetic corpus; see [`generate_synthetic_with_log`].
pub fn generate_synthetic(config: &SynthConfig) -> Result<Corpus, CorpusError> {
    generate_synthetic_with_log(config).map(|out| out.corpus)
}

/// Generates `size` sentences, `size / 4` per class, in shuffled order.
///
/// Each class owns a lexicon of content words whose consonant skeletons are
/// unique across the whole vocabulary; a shared pool of function words is
/// mixed in. With probability `variant_rate` each emitted token has one vowel
/// inserted, deleted or substituted, which leaves its skeleton unchanged.
pub fn generate_synthetic_with_log(config: &SynthConfig) -> Result<SynthOutput, CorpusError> {
    config.validate()?;
    let mut rng = rng::seeded(config.seed);

    let mut used_skeletons: HashSet<String> = FUNCTION_WORDS
        .iter()
        .map(|w| consonant_skeleton(w))
        .collect();
    let mut lexicons: Vec<Vec<String>> = Vec::with_capacity(4);
    for _ in Emotion::ALL {
        let mut words = Vec::with_capacity(config.lexicon_per_class);
        while words.len() < config.lexicon_per_class {
            let word = random_word(&mut rng);
            if used_skeletons.insert(consonant_skeleton(&word)) {
                words.push(word);
            }
        }
        lexicons.push(words);
    }

    let per_class = config.size / 4;
    let mut labels: Vec<Emotion> = Emotion::ALL
        .iter()
        .flat_map(|&e| std::iter::repeat_n(e, per_class))
        .collect();
    labels.shuffle(&mut rng);

    let (lo, hi) = config.sentence_len_range;
    let mut perturbations = Vec::new();
    let mut token_count = 0;
    let mut examples = Vec::with_capacity(config.size);
    for label in labels {
        let lexicon = &lexicons[label.index()];
        let len = rng.gen_range(lo..=hi);
        let mut words: Vec<&str> = (0..len)
            .map(|_| {
                if rng.gen_bool(0.6) {
                    lexicon[rng.gen_range(0..lexicon.len())].as_str()
                } else {
                    FUNCTION_WORDS[rng.gen_range(0..FUNCTION_WORDS.len())]
                }
            })
            .collect();
        if !words.iter().any(|w| lexicon.iter().any(|l| l == w)) {
            let slot = rng.gen_range(0..len);
            words[slot] = lexicon[rng.gen_range(0..lexicon.len())].as_str();
        }

        let mut tokens = Vec::with_capacity(len);
        for word in words {
            token_count += 1;
            if rng.gen_bool(config.variant_rate) {
                let perturbed = perturb_vowels(word, &mut rng);
                perturbations.push(Perturbation {
                    original: word.to_string(),
                    perturbed: perturbed.clone(),
                });
                tokens.push(perturbed);
            } else {
                tokens.push(word.to_string());
            }
        }
        examples.push(LabeledExample::new(tokens.join(" "), label)?);
    }

    Ok(SynthOutput {
        corpus: Corpus::new(examples, format!("synthetic:seed={}", config.seed)),
        perturbations,
        token_count,
    })
}

fn random_word(rng: &mut rng::Rng) -> String {
    let syllables = rng.gen_range(2..=3);
    let mut word = String::new();
    for _ in 0..syllables {
        word.push_str(ONSETS[rng.gen_range(0..ONSETS.len())]);
        word.push_str(NUCLEI[rng.gen_range(0..NUCLEI.len())]);
    }
    if rng.gen_bool(0.3) {
        word.push_str(["n", "r", "t", "l"][rng.gen_range(0..4)]);
    }
    word
}

/// Inserts, deletes or substitutes one vowel. The result always differs from
/// the input and shares its consonant skeleton.
fn perturb_vowels(word: &str, rng: &mut rng::Rng) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    let vowel_positions: Vec<usize> = chars
        .iter()
        .enumerate()
        .filter(|(_, c)| VOWELS.contains(c))
        .map(|(i, _)| i)
        .collect();
    let op = if vowel_positions.is_empty() {
        0
    } else {
        rng.gen_range(0..3)
    };
    match op {
        0 => {
            let at = rng.gen_range(0..=chars.len());
            chars.insert(at, VOWELS[rng.gen_range(0..VOWELS.len())]);
        }
        1 => {
            let at = vowel_positions[rng.gen_range(0..vowel_positions.len())];
            chars.remove(at);
        }
        _ => {
            let at = vowel_positions[rng.gen_range(0..vowel_positions.len())];
            let current = chars[at];
            let others: Vec<char> = VOWELS.iter().copied().filter(|&v| v != current).collect();
            chars[at] = others[rng.gen_range(0..others.len())];
        }
    }
    chars.into_iter().collect()
}
