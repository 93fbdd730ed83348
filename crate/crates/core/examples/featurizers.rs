//! Tokens, consonant skeletons and n-gram features for one sentence.

use codemix_emotion::text::{consonant_skeleton, tokenize, NgramSpec};

fn main() {
    let text = "Aaaj mei bahut khushh hu";
    for tok in tokenize(text) {
        println!("{tok:>8}  skeleton {}", consonant_skeleton(&tok));
    }

    let words = NgramSpec::words(1, 2).unwrap().featurize(text);
    println!("\nword 1-2 grams:");
    for (gram, n) in words.iter() {
        println!("  {gram} x{n}");
    }

    let chars = NgramSpec::characters(8, 8).unwrap().featurize(text);
    println!("\n{} character 8-grams, first three:", chars.len());
    for (gram, _) in chars.iter().take(3) {
        println!("  {gram:?}");
    }
}
