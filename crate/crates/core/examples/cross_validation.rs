//! Five-fold cross-validation of every baseline on a synthetic corpus,
//! printed as a table (F1 for Sad, Angry, Happy, Fear, then accuracy %).
//!
//! cargo run --release --example cross_validation -- [seed]

use std::time::Instant;

use codemix_emotion::corpus::{generate_synthetic, SynthConfig};
use codemix_emotion::eval::{cross_validate, render_reports, stratified_folds, CrossValOptions};
use codemix_emotion::{ClassifierSpec, ModelKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(7);
    let corpus = generate_synthetic(&SynthConfig {
        seed,
        ..SynthConfig::default()
    })?;
    let plan = stratified_folds(&corpus, 5, seed)?;

    let mut reports = Vec::new();
    for kind in ModelKind::ALL {
        let start = Instant::now();
        let spec = ClassifierSpec::default_for(kind);
        reports.push(cross_validate(
            &spec,
            &corpus,
            &plan,
            &CrossValOptions::default(),
        )?);
        eprintln!("{kind}: {:.1}s", start.elapsed().as_secs_f64());
    }
    print!("{}", render_reports(&reports)?);
    Ok(())
}
