//! Multinomial naive Bayes on a three-sentence corpus.

use codemix_emotion::corpus::{Corpus, Emotion};
use codemix_emotion::models::{nb_fit, Classifier};
use codemix_emotion::text::NgramSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = Corpus::from_pairs(
        [
            ("khush khush", Emotion::Happy),
            ("khush", Emotion::Happy),
            ("dukh", Emotion::Sad),
        ],
        "toy",
    )?;
    let model = nb_fit(&corpus, &NgramSpec::words(1, 1)?, 1.0)?;
    for e in [Emotion::Happy, Emotion::Sad] {
        println!(
            "P({e}) = {:.4}  P(khush|{e}) = {:.4}  P(dukh|{e}) = {:.4}",
            model.log_prior(e).exp(),
            model.likelihood("khush", e).unwrap(),
            model.likelihood("dukh", e).unwrap(),
        );
    }
    for text in ["khush", "dukh", "khush dukh", "unseen"] {
        let p = model.predict_distribution(text);
        println!("{text:>12}: {} {p:.4?}", model.predict(text));
    }
    Ok(())
}
