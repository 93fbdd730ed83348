//! Tokenization, consonant skeletons and featurizers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;

/// Separator placed between the tokens of a multi-token word n-gram
/// (U+241F SYMBOL FOR UNIT SEPARATOR).
pub const NGRAM_SEPARATOR: char = '\u{241F}';

const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];

/// A lowercase, non-empty word without whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Token(String);

impl Token {
    /// Returns `None` unless `s` is non-empty, whitespace-free and lowercase.
    pub fn new(s: impl Into<String>) -> Option<Token> {
        let s = s.into();
        if s.is_empty() || s.chars().any(char::is_whitespace) || s.to_lowercase() != s {
            return None;
        }
        Some(Token(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl Deref for Token {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Lowercases, splits on Unicode whitespace and strips non-alphanumeric
/// characters from both ends of each piece. Word-internal punctuation such as
/// apostrophes is kept.
pub fn tokenize(text: &str) -> Vec<Token> {
    text.to_lowercase()
        .split_whitespace()
        .map(|piece| piece.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|piece| !piece.is_empty())
        .map(|piece| Token(piece.to_string()))
        .collect()
}

/// The token's letters with the Latin vowels `a e i o u` removed. Order and
/// repeats are kept; digits and other non-letters are dropped.
pub fn consonant_skeleton(token: &str) -> String {
    token
        .chars()
        .filter(|c| c.is_alphabetic() && !VOWELS.contains(c))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NgramUnit {
    Character,
    Word,
}

/// Which n-grams a featurizer emits: windows of every length in
/// `n_min..=n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NgramSpec {
    pub unit: NgramUnit,
    pub n_min: usize,
    pub n_max: usize,
}

impl NgramSpec {
    pub fn characters(n_min: usize, n_max: usize) -> Result<Self, String> {
        NgramSpec::new(NgramUnit::Character, n_min, n_max)
    }

    pub fn words(n_min: usize, n_max: usize) -> Result<Self, String> {
        NgramSpec::new(NgramUnit::Word, n_min, n_max)
    }

    pub fn new(unit: NgramUnit, n_min: usize, n_max: usize) -> Result<Self, String> {
        let spec = NgramSpec { unit, n_min, n_max };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(format!(
                "n-gram range must satisfy 0 < n_min <= n_max, got ({}, {})",
                self.n_min, self.n_max
            ));
        }
        Ok(())
    }

    /// Extracts this spec's n-grams from a raw sentence.
    pub fn featurize(&self, text: &str) -> SparseVector<String> {
        match self.unit {
            NgramUnit::Character => char_ngrams(text, self),
            NgramUnit::Word => word_ngrams(&tokenize(text), self),
        }
    }
}

/// Feature → weight map without explicit zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector<K: Ord> {
    entries: BTreeMap<K, f64>,
}

impl<K: Ord> Default for SparseVector<K> {
    fn default() -> Self {
        SparseVector {
            entries: BTreeMap::new(),
        }
    }
}

impl<K: Ord> SparseVector<K> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `weight` to `key`, dropping the entry if it becomes zero.
    pub fn add(&mut self, key: K, weight: f64) {
        let slot = self.entries.entry(key).or_insert(0.0);
        *slot += weight;
        if *slot == 0.0 {
            self.entries.retain(|_, v| *v != 0.0);
        }
    }

    pub fn get<Q>(&self, key: &Q) -> f64
    where
        K: std::borrow::Borrow<Q>,
        Q: Ord + ?Sized,
    {
        self.entries.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all weights.
    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }
}

impl<K: Ord> FromIterator<(K, f64)> for SparseVector<K> {
    fn from_iter<I: IntoIterator<Item = (K, f64)>>(iter: I) -> Self {
        let mut v = SparseVector::new();
        for (k, w) in iter {
            v.add(k, w);
        }
        v
    }
}

/// Lowercases and collapses every whitespace run to a single space.
pub fn normalize_whitespace(text: &str) -> String {
    text.to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Counts of contiguous character windows over the whitespace-normalized,
/// lowercased sentence. Windows cross word boundaries. A non-empty sentence
/// shorter than `n_min` yields itself as the single gram.
pub fn char_ngrams(text: &str, spec: &NgramSpec) -> SparseVector<String> {
    let chars: Vec<char> = normalize_whitespace(text).chars().collect();
    let mut out = SparseVector::new();
    if chars.is_empty() {
        return out;
    }
    if chars.len() < spec.n_min {
        out.add(chars.iter().collect(), 1.0);
        return out;
    }
    for n in spec.n_min..=spec.n_max.min(chars.len()) {
        for window in chars.windows(n) {
            out.add(window.iter().collect(), 1.0);
        }
    }
    out
}

/// Counts of contiguous token windows; multi-token grams are joined with
/// [`NGRAM_SEPARATOR`].
pub fn word_ngrams(tokens: &[Token], spec: &NgramSpec) -> SparseVector<String> {
    let mut out = SparseVector::new();
    let sep = NGRAM_SEPARATOR.to_string();
    for n in spec.n_min..=spec.n_max.min(tokens.len()) {
        for window in tokens.windows(n) {
            let gram = window
                .iter()
                .map(Token::as_str)
                .collect::<Vec<_>>()
                .join(&sep);
            out.add(gram, 1.0);
        }
    }
    out
}

/// Dense token ids with corpus frequencies. Ids follow first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    tokens: Vec<String>,
    frequencies: Vec<usize>,
    ids: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    tokens: Vec<String>,
    frequencies: Vec<usize>,
}

impl From<VocabularyRepr> for Vocabulary {
    fn from(r: VocabularyRepr) -> Self {
        let ids = r
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary {
            tokens: r.tokens,
            frequencies: r.frequencies,
            ids,
        }
    }
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        VocabularyRepr {
            tokens: v.tokens,
            frequencies: v.frequencies,
        }
    }
}

impl Vocabulary {
    /// Counts tokens across `sentences` in first-occurrence order.
    pub fn from_token_streams<'a, I, S>(sentences: I) -> Vocabulary
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = &'a str>,
    {
        let mut vocab = Vocabulary {
            tokens: Vec::new(),
            frequencies: Vec::new(),
            ids: HashMap::new(),
        };
        for sentence in sentences {
            for tok in sentence {
                match vocab.ids.get(tok) {
                    Some(&id) => vocab.frequencies[id] += 1,
                    None => {
                        vocab.ids.insert(tok.to_string(), vocab.tokens.len());
                        vocab.tokens.push(tok.to_string());
                        vocab.frequencies.push(1);
                    }
                }
            }
        }
        vocab
    }

    /// Keeps tokens seen at least `min_count` times, re-assigning dense ids in
    /// the original order.
    pub fn with_min_count(&self, min_count: usize) -> Vocabulary {
        let kept: Vec<(String, usize)> = self
            .tokens
            .iter()
            .zip(&self.frequencies)
            .filter(|(_, &f)| f >= min_count)
            .map(|(t, &f)| (t.clone(), f))
            .collect();
        let (tokens, frequencies): (Vec<_>, Vec<_>) = kept.into_iter().unzip();
        VocabularyRepr {
            tokens,
            frequencies,
        }
        .into()
    }

    /// Builds a vocabulary from explicit `(token, frequency)` pairs.
    pub fn from_frequencies<I, S>(entries: I) -> Vocabulary
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let (tokens, frequencies): (Vec<String>, Vec<usize>) =
            entries.into_iter().map(|(t, f)| (t.into(), f)).unzip();
        VocabularyRepr {
            tokens,
            frequencies,
        }
        .into()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn frequency(&self, token: &str) -> usize {
        self.id(token).map_or(0, |id| self.frequencies[id])
    }

    pub fn frequency_of_id(&self, id: usize) -> usize {
        self.frequencies[id]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Vocabulary over the tokenized sentences of `corpus`.
pub fn build_vocabulary(corpus: &Corpus) -> Vocabulary {
    let tokenized: Vec<Vec<Token>> = corpus.texts().map(tokenize).collect();
    Vocabulary::from_token_streams(tokenized.iter().map(|s| s.iter().map(Token::as_str)))
}

/// Per-token counts keyed by vocabulary id; out-of-vocabulary tokens are
/// ignored.
pub fn bag_of_words(tokens: &[Token], vocab: &Vocabulary) -> SparseVector<usize> {
    tokens
        .iter()
        .filter_map(|t| vocab.id(t))
        .map(|id| (id, 1.0))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Emotion;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn toks(words: &[&str]) -> Vec<Token> {
        words.iter().map(|w| Token::new(*w).unwrap()).collect()
    }

    fn strs(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(Token::as_str).collect()
    }

    #[test]
    fn tokenizes_sample_sentences() {
        assert_eq!(
            strs(&tokenize("Kutte chup reh tu")),
            ["kutte", "chup", "reh", "tu"]
        );
        assert_eq!(
            strs(&tokenize("Mujhe bohoh dukh hai RIP")),
            ["mujhe", "bohoh", "dukh", "hai", "rip"]
        );
        assert!(tokenize("  !!  ").is_empty());
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn tokenizer_keeps_internal_punctuation_and_digits() {
        assert_eq!(
            strs(&tokenize("\"Don't\" h8 (yaar)!!")),
            ["don't", "h8", "yaar"]
        );
        assert_eq!(strs(&tokenize("a\u{00A0}b\tc\n d")), ["a", "b", "c", "d"]);
    }

    #[test]
    fn token_invariants() {
        assert!(Token::new("abc").is_some());
        assert!(Token::new("").is_none());
        assert!(Token::new("Abc").is_none());
        assert!(Token::new("a b").is_none());
    }

    #[test]
    fn skeleton_examples() {
        assert_eq!(consonant_skeleton("khoobsurat"), "khbsrt");
        assert_eq!(consonant_skeleton("khoobsoorat"), "khbsrt");
        assert_eq!(consonant_skeleton("khubsurat"), "khbsrt");
        assert_eq!(consonant_skeleton("khbsrt"), "khbsrt");
        assert_eq!(consonant_skeleton("aaeio"), "");
        assert_eq!(consonant_skeleton("yaar"), "yr");
        assert_eq!(consonant_skeleton("h8"), "h");
        assert_eq!(consonant_skeleton("don't"), "dnt");
    }

    #[test]
    fn char_ngram_examples() {
        let bi = NgramSpec::characters(2, 2).unwrap();
        let v = char_ngrams("abc", &bi);
        assert_eq!(v.len(), 2);
        assert_eq!(v.get("ab"), 1.0);
        assert_eq!(v.get("bc"), 1.0);

        let v = char_ngrams("ab", &NgramSpec::characters(8, 8).unwrap());
        assert_eq!(v.len(), 1);
        assert_eq!(v.get("ab"), 1.0);

        let v = char_ngrams("aaaa", &bi);
        assert_eq!(v.len(), 1);
        assert_eq!(v.get("aa"), 3.0);

        assert!(char_ngrams("   ", &bi).is_empty());
    }

    #[test]
    fn char_ngrams_cross_word_boundaries_on_normalized_text() {
        let v = char_ngrams("A  b", &NgramSpec::characters(3, 3).unwrap());
        assert_eq!(v.get("a b"), 1.0);
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn char_ngram_range_short_sentence_is_not_duplicated() {
        // "abc" with (2, 8): all windows of length 2 and 3; the whole-sentence
        // gram comes from the length-3 window, not the fallback.
        let v = char_ngrams("abc", &NgramSpec::characters(2, 8).unwrap());
        assert_eq!(v.get("abc"), 1.0);
        assert_eq!(v.total(), 3.0);
    }

    #[test]
    fn word_ngram_examples() {
        let spec = NgramSpec::words(1, 2).unwrap();
        let v = word_ngrams(&toks(&["mei", "khush", "hu"]), &spec);
        let sep = NGRAM_SEPARATOR;
        assert_eq!(v.len(), 5);
        for k in ["mei", "khush", "hu"] {
            assert_eq!(v.get(k), 1.0);
        }
        assert_eq!(v.get(&format!("mei{sep}khush")), 1.0);
        assert_eq!(v.get(&format!("khush{sep}hu")), 1.0);

        let v = word_ngrams(&toks(&["hi"]), &spec);
        assert_eq!(v.len(), 1);
        assert_eq!(v.get("hi"), 1.0);

        assert!(word_ngrams(&[], &spec).is_empty());
    }

    #[test]
    fn ngram_spec_validation() {
        assert!(NgramSpec::words(0, 2).is_err());
        assert!(NgramSpec::words(3, 2).is_err());
        assert!(NgramSpec::characters(8, 8).is_ok());
    }

    #[test]
    fn vocabulary_counts() {
        let c = Corpus::from_pairs([("a b a", Emotion::Angry)], "t").unwrap();
        let v = build_vocabulary(&c);
        assert_eq!(v.len(), 2);
        assert_eq!(v.frequency("a"), 2);
        assert_eq!(v.frequency("b"), 1);
        assert_eq!(v.id("a"), Some(0));
        assert_eq!(v.id("b"), Some(1));
        assert_eq!(v.token(1), Some("b"));
    }

    #[test]
    fn vocabulary_of_sample_rows() {
        let rows = [
            ("Kutte chup reh tu", Emotion::Angry),
            ("Aaaj mei bahut khushh hu", Emotion::Happy),
            ("Bhoot bhoot bachao mujhe", Emotion::Fear),
            ("Mujhe bohoh dukh hai RIP", Emotion::Sad),
        ];
        let c = Corpus::from_pairs(rows, "t2").unwrap();
        // Independent count: lowercase, whitespace split, set of words.
        let expected: HashSet<String> = rows
            .iter()
            .flat_map(|(t, _)| t.split_whitespace().map(str::to_lowercase))
            .collect();
        let v = build_vocabulary(&c);
        assert_eq!(expected.len(), 16);
        assert_eq!(v.len(), expected.len());
        assert_eq!(v.frequency("bhoot"), 2);
        assert_eq!(v.frequency("mujhe"), 2);
        assert_eq!(build_vocabulary(&c), v);
    }

    #[test]
    fn min_count_filter_redensifies_ids() {
        let c = Corpus::from_pairs([("a b a c c", Emotion::Angry)], "t").unwrap();
        let v = build_vocabulary(&c).with_min_count(2);
        assert_eq!(v.tokens(), ["a", "c"]);
        assert_eq!(v.id("c"), Some(1));
        assert_eq!(v.id("b"), None);
    }

    #[test]
    fn bag_of_words_examples() {
        let vocab = Vocabulary::from_frequencies([("a", 2), ("b", 1)]);
        let v = bag_of_words(&toks(&["a", "b", "a"]), &vocab);
        assert_eq!(v.get(&0), 2.0);
        assert_eq!(v.get(&1), 1.0);
        assert!(bag_of_words(&toks(&["zzz"]), &vocab).is_empty());
        assert!(bag_of_words(&[], &vocab).is_empty());
    }

    #[test]
    fn vocabulary_serde_rebuilds_index() {
        let vocab = Vocabulary::from_frequencies([("x", 3), ("y", 1)]);
        let json = serde_json::to_string(&vocab).unwrap();
        let back: Vocabulary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vocab);
        assert_eq!(back.id("y"), Some(1));
    }

    fn token_strategy() -> impl Strategy<Value = String> {
        "[a-z]{1,12}"
    }

    proptest! {
        #[test]
        fn skeleton_is_idempotent(t in token_strategy()) {
            let s = consonant_skeleton(&t);
            prop_assert_eq!(consonant_skeleton(&s), s);
        }

        #[test]
        fn vowel_edits_preserve_skeleton(
            t in token_strategy(),
            pos in 0usize..13,
            v in prop::sample::select(vec!['a', 'e', 'i', 'o', 'u']),
            op in 0u8..3,
        ) {
            let mut chars: Vec<char> = t.chars().collect();
            let vowel_at: Vec<usize> = (0..chars.len()).filter(|&i| VOWELS.contains(&chars[i])).collect();
            match op {
                0 => chars.insert(pos.min(chars.len()), v),
                1 if !vowel_at.is_empty() => { chars.remove(vowel_at[pos % vowel_at.len()]); }
                2 if !vowel_at.is_empty() => { chars[vowel_at[pos % vowel_at.len()]] = v; }
                _ => {}
            }
            let edited: String = chars.into_iter().collect();
            prop_assert_eq!(consonant_skeleton(&edited), consonant_skeleton(&t));
        }

        #[test]
        fn char_ngram_total_matches_window_count(text in "[a-z ]{0,30}", n in 1usize..10) {
            let spec = NgramSpec::characters(n, n).unwrap();
            let normalized_len = normalize_whitespace(&text).chars().count();
            let expected = if normalized_len == 0 {
                0
            } else {
                (normalized_len + 1).saturating_sub(n).max(1)
            };
            prop_assert_eq!(char_ngrams(&text, &spec).total(), expected as f64);
        }

        #[test]
        fn featurizers_are_pure(text in "[a-zA-Z !]{0,40}") {
            let c = NgramSpec::characters(2, 4).unwrap();
            let w = NgramSpec::words(1, 2).unwrap();
            prop_assert_eq!(c.featurize(&text), c.featurize(&text));
            prop_assert_eq!(w.featurize(&text), w.featurize(&text));
            for (_, weight) in c.featurize(&text).iter() {
                prop_assert!(weight >= 1.0 && weight.fract() == 0.0);
            }
        }
    }
}
