//! Compares back-propagated gradients of both LSTM models with central
//! finite differences.

use codemix_emotion::corpus::Emotion;
use codemix_emotion::models::subword::CharVocab;
use codemix_emotion::models::{LstmConfig, LstmWordModel, SubwordConfig, SubwordLstmModel};
use codemix_emotion::numerics::{finite_difference_report, GradCheck};
use codemix_emotion::text::Vocabulary;

fn show(name: &str, r: GradCheck) {
    println!(
        "{name}: {} coordinates, max relative error {:.2e}, max absolute {:.1e}",
        r.coordinates, r.max_relative, r.max_absolute
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vocab = Vocabulary::from_frequencies((0..9).map(|i| (format!("w{i}"), 1)));
    let arch = LstmConfig {
        embedding_dim: 4,
        hidden: 5,
        max_len: 6,
    };
    let word = LstmWordModel::new(vocab, arch, 11)?;
    let batch = vec![
        (vec![1, 5, 2, 9, 3, 3], Emotion::Sad),
        (vec![4, 0, 7], Emotion::Happy),
    ];
    let grads = word.batch_gradient(&batch)?;
    let r = finite_difference_report(
        |p| {
            word.with_params(p.clone())
                .unwrap()
                .batch_loss(&batch)
                .unwrap()
        },
        word.params(),
        &grads,
        1e-5,
        usize::MAX,
        0,
    );
    show("word LSTM", r);

    let arch = SubwordConfig {
        char_dim: 3,
        filters: 4,
        hidden: 5,
        max_chars: 9,
        ..SubwordConfig::default()
    };
    let sub = SubwordLstmModel::new(CharVocab::from_texts(["abcdefghij"]), arch, 12)?;
    let batch = vec![
        (vec![2, 5, 7, 3, 11, 4, 9, 2, 6], Emotion::Fear),
        (vec![3, 10], Emotion::Angry),
    ];
    let grads = sub.batch_gradient(&batch)?;
    let r = finite_difference_report(
        |p| {
            sub.with_params(p.clone())
                .unwrap()
                .batch_loss(&batch)
                .unwrap()
        },
        sub.params(),
        &grads,
        1e-5,
        usize::MAX,
        0,
    );
    show("sub-word LSTM", r);
    Ok(())
}
