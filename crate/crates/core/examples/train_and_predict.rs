//! Fits a model, saves it as JSON, reloads it and predicts.

use codemix_emotion::corpus::{generate_synthetic, SynthConfig};
use codemix_emotion::{Classifier, ClassifierSpec, Model, ModelKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate_synthetic(&SynthConfig {
        size: 400,
        seed: 9,
        ..SynthConfig::default()
    })?;
    let model = ClassifierSpec::default_for(ModelKind::NbChar).fit(&corpus, 0)?;
    let path = std::env::temp_dir().join("codemix-nb-char.json");
    model.save(&path)?;
    let reloaded = Model::load(&path)?;
    let text = corpus.examples()[0].text();
    println!("{text:?}");
    println!("  gold {}", corpus.examples()[0].label());
    println!(
        "  predicted {} {:.3?}",
        reloaded.predict(text),
        reloaded.predict_distribution(text)
    );
    println!("  saved to {}", path.display());
    Ok(())
}
