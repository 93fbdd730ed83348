//! One-vs-rest linear SVMs on bag-of-words counts.

use codemix_emotion::corpus::{generate_synthetic, SynthConfig};
use codemix_emotion::models::{svm_fit, Classifier, SvmConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate_synthetic(&SynthConfig {
        size: 400,
        seed: 1,
        ..SynthConfig::default()
    })?;
    let (train, test) = corpus.examples().split_at(300);
    let train = codemix_emotion::Corpus::new(train.to_vec(), "train");
    let model = svm_fit(&train, &SvmConfig::default(), 0)?;

    let hits = test
        .iter()
        .filter(|ex| model.predict(ex.text()) == ex.label())
        .count();
    println!("held-out accuracy: {hits}/{}", test.len());
    let ex = &test[0];
    println!("{:?} ({})", ex.text(), ex.label());
    println!("  margins {:.3?}", model.margins(ex.text()));
    println!(
        "  distribution {:.3?}",
        model.predict_distribution(ex.text())
    );
    Ok(())
}
