//! Generates a small synthetic corpus and shows a few of the injected
//! spelling variants.

use codemix_emotion::corpus::{generate_synthetic_with_log, SynthConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = generate_synthetic_with_log(&SynthConfig {
        size: 40,
        seed: 3,
        ..SynthConfig::default()
    })?;
    for ex in out.corpus.examples().iter().take(8) {
        println!("{}\t{}", ex.text(), ex.label());
    }
    println!(
        "\n{} of {} tokens perturbed, e.g.:",
        out.perturbations.len(),
        out.token_count
    );
    for p in out.perturbations.iter().take(5) {
        println!("  {} -> {}", p.original, p.perturbed);
    }
    println!("\nclass counts: {:?}", out.corpus.class_distribution().0);
    Ok(())
}
