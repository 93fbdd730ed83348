//! Trains the word-level LSTM, optionally starting from skip-gram
//! embeddings learned on the same corpus.
//!
//! cargo run --release --example word_lstm

use codemix_emotion::corpus::{generate_synthetic, SynthConfig};
use codemix_emotion::models::word_lstm::lstm_fit_with_history;
use codemix_emotion::models::{LstmConfig, TrainConfig};
use codemix_emotion::normalizer::{train_skipgram, SkipGramConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate_synthetic(&SynthConfig {
        size: 400,
        seed: 2,
        ..SynthConfig::default()
    })?;
    let arch = LstmConfig::default();
    let table = train_skipgram(
        &corpus,
        &SkipGramConfig {
            dim: arch.embedding_dim,
            ..SkipGramConfig::default()
        },
    )?;
    let train = TrainConfig::default();
    let (_, scratch) = lstm_fit_with_history(&corpus, &train, &arch, None, 0)?;
    let (_, pretrained) = lstm_fit_with_history(&corpus, &train, &arch, Some(&table), 0)?;
    println!("epoch  random-init  skip-gram-init");
    for (i, (a, b)) in scratch.iter().zip(&pretrained).enumerate() {
        println!("{:>5}  {a:>11.4}  {b:>14.4}", i + 1);
    }
    Ok(())
}
