//! Trains the character-level sub-word LSTM and prints its loss curve.
//!
//! cargo run --release --example subword_lstm

use codemix_emotion::corpus::{generate_synthetic, SynthConfig};
use codemix_emotion::models::subword::subword_fit_with_history;
use codemix_emotion::models::{Classifier, SubwordConfig, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate_synthetic(&SynthConfig {
        size: 200,
        seed: 6,
        ..SynthConfig::default()
    })?;
    let arch = SubwordConfig {
        char_dim: 8,
        filters: 32,
        hidden: 32,
        ..SubwordConfig::default()
    };
    let (model, losses) = subword_fit_with_history(&corpus, &TrainConfig::default(), &arch, 0)?;
    for (epoch, loss) in losses.iter().enumerate() {
        println!("epoch {:>2}  loss {loss:.4}", epoch + 1);
    }
    // Misspellings still share most character n-grams.
    for text in ["bahut khush hu", "bohot khooshh hu"] {
        println!("{text:?} -> {:.3?}", model.predict_distribution(text));
    }
    Ok(())
}
