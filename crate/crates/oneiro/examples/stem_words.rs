//! The preprocessing toolbox on its own: Porter stemming and configurable
//! per-language profiles.
//!
//! ```bash
//! cargo run -p oneiro --example stem_words
//! ```

use oneiro::corpus::SymbolDoc;
use oneiro::textproc::{porter_stem, preprocess, LangProfile, Step, StopList};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for word in [
        "caresses",
        "ponies",
        "relational",
        "generalizations",
        "oscillators",
        "sky",
    ] {
        println!("{word:>16} -> {}", porter_stem(word));
    }

    let doc = SymbolDoc {
        id: "demo".into(),
        symbol: "ladder".into(),
        lang: "en".into(),
        text: "Climbing ladders suggests reaching goals; the climber celebrates successes!".into(),
    };
    let stops = StopList::from_words(["the".to_string()]);

    let english = LangProfile::english();
    let tokens = preprocess(&doc, &english, &stops);
    println!("\nfull English profile: {:?}", tokens.counts());

    // the same text without stemming, keeping only longer tokens
    let light = LangProfile::new(
        "en",
        vec![
            Step::Lowercase,
            Step::StripPunctuation,
            Step::WhitespaceTokenize,
            Step::StopFilter,
            Step::MinTokenLen(5),
        ],
    )?;
    let tokens = preprocess(&doc, &light, &stops);
    println!("surface tokens >= 5 chars: {:?}", tokens.counts());
    Ok(())
}
