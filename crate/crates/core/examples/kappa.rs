//! Agreement between two annotators.

use codemix_emotion::corpus::Emotion::{self, *};
use codemix_emotion::eval::agreement;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let first: [Emotion; 10] = [
        Angry, Angry, Angry, Angry, Fear, Fear, Sad, Sad, Happy, Happy,
    ];
    let second: [Emotion; 10] = [
        Angry, Angry, Angry, Fear, Fear, Fear, Sad, Happy, Happy, Happy,
    ];
    let r = agreement(&first, &second)?;
    println!(
        "n = {}, observed {:.2}, chance {:.2}, kappa {:.4}",
        r.n, r.p_o, r.p_e, r.kappa
    );
    Ok(())
}
