//! Learns skip-gram embeddings on a synthetic corpus, clusters spelling
//! variants that share a consonant skeleton, and rewrites the corpus.
//!
//! cargo run --release --example normalize_variants

use codemix_emotion::corpus::{generate_synthetic, SynthConfig};
use codemix_emotion::normalizer::{apply_normalization, ClusterStats, NormalizationConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate_synthetic(&SynthConfig {
        size: 1000,
        seed: 5,
        ..SynthConfig::default()
    })?;
    let map = NormalizationConfig::default().fit(&corpus)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&ClusterStats::from(&map))?
    );

    println!("\nlargest clusters:");
    let mut clusters: Vec<_> = map.clusters().iter().filter(|c| c.len() > 1).collect();
    clusters.sort_by_key(|c| std::cmp::Reverse(c.len()));
    for c in clusters.iter().take(5) {
        println!("  {} <- {}", map.canonical(&c[0]), c.join(", "));
    }

    let normalized = apply_normalization(&corpus, &map);
    println!("\nbefore: {}", corpus.examples()[0].text());
    println!("after:  {}", normalized.examples()[0].text());
    Ok(())
}
