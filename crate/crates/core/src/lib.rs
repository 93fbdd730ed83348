//! Emotion detection for Romanized Hindi-English code-mixed text.
//!
//! The crate covers the whole experimental pipeline:
//!
//! - [`corpus`]: the labeled-sentence data model, TSV I/O and a seeded
//!   synthetic corpus generator.
//! - [`text`]: tokenization, consonant skeletons and the n-gram / bag-of-words
//!   featurizers.
//! - [`normalizer`]: skip-gram embeddings and consonant-gated clustering of
//!   transliteration variants, with canonicalization by the most frequent
//!   spelling.
//! - [`numerics`]: the small dense-math kernel behind the neural baselines
//!   (softmax, cross-entropy, optimizers, finite-difference gradient checks).
//! - [`models`]: the five baselines (character n-gram Naive Bayes, word
//!   n-gram Naive Bayes, linear SVM, word LSTM, sub-word LSTM) behind one
//!   [`models::Classifier`] contract.
//! - [`eval`]: Cohen's kappa, stratified k-fold cross-validation, confusion
//!   matrices, per-class F1 and report rendering.
//! - [`cli`]: the `codemix` command-line front end.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod corpus;
pub mod eval;
pub mod models;
pub mod normalizer;
pub mod numerics;
pub mod rng;
pub mod text;

pub use corpus::{Corpus, Emotion, LabeledExample};
pub use models::{Classifier, ClassifierSpec, Model, ModelKind};
