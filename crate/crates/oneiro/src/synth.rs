//! Deterministic synthetic trilingual corpus generator.
//!
//! Produces three parallel corpora (en, zh, ar) of 3 planted topics x 20
//! symbols each, with disjoint per-topic vocabularies plus a small shared
//! noise vocabulary that keeps the similarity graphs connected across
//! topics. The English topics carry planted sentiment levels (high / low /
//! neutral) through a generated happiness lexicon, so topic membership,
//! community structure, and sentiment groups coincide by construction.
//! Translation maps tie zh and ar symbols to their English counterparts
//! (with a deterministic subset left unmapped).
//!
//! Everything is a pure function of the seed: per-document RNG streams are
//! derived from (seed, language, doc index), so regeneration is stable.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    load_corpus, Corpus, CorpusFormat, HappinessLexicon, SymbolDoc, TranslationMap,
};
use crate::error::{Error, Result};

pub const TOPICS: usize = 3;
pub const SYMBOLS_PER_TOPIC: usize = 20;
pub const LANGS: [&str; 3] = ["en", "zh", "ar"];

/// English symbol headwords, one row per planted topic.
const EN_SYMBOLS: [[&str; SYMBOLS_PER_TOPIC]; TOPICS] = [
    // topic 0: ascent / achievement (positive sentiment)
    [
        "goal",
        "hill",
        "ladder",
        "summit",
        "trophy",
        "sunrise",
        "garden",
        "rainbow",
        "harvest",
        "wings",
        "crown",
        "bridge",
        "lighthouse",
        "compass",
        "medal",
        "fountain",
        "feast",
        "gift",
        "dance",
        "beacon",
    ],
    // topic 1: peril / trouble (negative sentiment)
    [
        "storm",
        "wolf",
        "cliff",
        "shipwreck",
        "quicksand",
        "thorn",
        "cage",
        "shadow",
        "flood",
        "serpent",
        "dagger",
        "wreckage",
        "plague",
        "ambush",
        "poison",
        "chasm",
        "vulture",
        "prison",
        "famine",
        "curse",
    ],
    // topic 2: dwelling / household (neutral sentiment)
    [
        "house",
        "door",
        "window",
        "corridor",
        "staircase",
        "kitchen",
        "roof",
        "cellar",
        "fence",
        "mailbox",
        "lantern",
        "chair",
        "carpet",
        "mirror",
        "clock",
        "curtain",
        "shelf",
        "drawer",
        "chimney",
        "pantry",
    ],
];

/// English interpretation vocabulary per topic (disjoint across topics).
const EN_VOCAB: [[&str; 24]; TOPICS] = [
    [
        "joy",
        "delight",
        "success",
        "triumph",
        "reward",
        "honor",
        "celebrate",
        "cheerful",
        "bright",
        "hope",
        "fortune",
        "prosper",
        "bliss",
        "admire",
        "praise",
        "glory",
        "thrive",
        "warmth",
        "laughter",
        "friendship",
        "comfort",
        "courage",
        "wonder",
        "radiant",
    ],
    [
        "fear", "dread", "sorrow", "grief", "danger", "threat", "misery", "despair", "anguish",
        "betray", "wound", "failure", "torment", "gloom", "panic", "doom", "hatred", "weep",
        "agony", "terror", "burden", "enemy", "bitter", "loss",
    ],
    [
        "room",
        "path",
        "surface",
        "corner",
        "entrance",
        "structure",
        "frame",
        "wall",
        "floor",
        "passage",
        "space",
        "place",
        "item",
        "area",
        "side",
        "edge",
        "form",
        "shape",
        "line",
        "point",
        "level",
        "part",
        "layout",
        "object",
    ],
];

/// Shared noise vocabulary: appears in every topic, keeping the similarity
/// graph connected while idf keeps its influence small.
const EN_NOISE: [&str; 16] = [
    "dream",
    "dreamer",
    "symbol",
    "meaning",
    "suggest",
    "indicate",
    "often",
    "sometimes",
    "reflect",
    "represent",
    "sign",
    "vision",
    "sleep",
    "night",
    "mind",
    "thought",
];

const EN_STOPS: [&str; 16] = [
    "the", "a", "an", "of", "to", "and", "in", "is", "it", "you", "your", "this", "that", "will",
    "may", "be",
];

const ZH_SYLLABLES: [&str; 24] = [
    "ma", "fang", "shui", "huo", "shan", "lin", "tian", "di", "ren", "xin", "men", "lu", "che",
    "niao", "yu", "hua", "shu", "yun", "feng", "long", "bao", "jing", "qiao", "hai",
];
const ZH_STOPS: [&str; 8] = ["de", "le", "shi", "zhe", "he", "zai", "you", "ye"];

const AR_SYLLABLES: [&str; 24] = [
    "kha", "ra", "bid", "suf", "man", "qa", "tar", "zay", "nur", "sal", "dam", "wa", "ham", "jab",
    "kar", "lam", "mim", "nun", "sad", "tha", "ghar", "fik", "dal", "bay",
];
const AR_STOPS: [&str; 8] = ["al", "fi", "min", "ala", "an", "ma", "la", "wa"];

/// Planted per-topic sentiment targets (lexicon score ranges).
const SENTIMENT_RANGE: [(f64, f64); TOPICS] = [(7.0, 8.5), (1.5, 3.0), (4.6, 5.4)];
const NOISE_RANGE: (f64, f64) = (4.7, 5.3);

/// Fraction of every 6th symbol left out of the translation maps.
const UNMAPPED_STRIDE: usize = 6;

/// Everything the generator produces for one seed.
pub struct SynthBundle {
    pub corpora: BTreeMap<String, Corpus>,
    /// zh -> en and ar -> en translation maps.
    pub maps: BTreeMap<String, TranslationMap>,
    pub lexicon: HappinessLexicon,
    pub stops: BTreeMap<String, Vec<String>>,
    /// Per language: (doc id, planted topic), in corpus order.
    pub planted: BTreeMap<String, Vec<(String, usize)>>,
}

fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn doc_rng(seed: u64, lang: &str, index: usize) -> ChaCha8Rng {
    let stride = (index as u64).wrapping_mul(0x9e3779b97f4a7c15);
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(lang).wrapping_add(stride))
}

/// Pseudo-word from a syllable bank, deterministic in (bank, ordinal, parts).
fn pseudo_word(bank: &[&str], ordinal: usize, parts: usize) -> String {
    let mut w = String::new();
    let mut state = ordinal.wrapping_mul(2654435761).wrapping_add(parts * 97);
    for _ in 0..parts {
        w.push_str(bank[state % bank.len()]);
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407)
            >> 8;
    }
    w
}

/// Unique pseudo-words: ordinals probe forward on collision. `seen` is
/// shared across classes so one language never reuses a word.
fn pseudo_words(
    bank: &[&str],
    count: usize,
    parts: usize,
    salt: usize,
    seen: &mut std::collections::HashSet<String>,
) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    let mut ordinal = salt;
    while out.len() < count {
        let w = pseudo_word(bank, ordinal, parts);
        if seen.insert(w.clone()) {
            out.push(w);
        }
        ordinal += 1;
    }
    out
}

struct LangSpec {
    lang: &'static str,
    symbols: Vec<Vec<String>>, // [topic][k]
    vocab: Vec<Vec<String>>,   // [topic][word]
    noise: Vec<String>,
    stops: Vec<String>,
}

fn lang_specs() -> Vec<LangSpec> {
    let en = LangSpec {
        lang: "en",
        symbols: EN_SYMBOLS
            .iter()
            .map(|t| t.iter().map(|s| s.to_string()).collect())
            .collect(),
        vocab: EN_VOCAB
            .iter()
            .map(|t| t.iter().map(|s| s.to_string()).collect())
            .collect(),
        noise: EN_NOISE.iter().map(|s| s.to_string()).collect(),
        stops: EN_STOPS.iter().map(|s| s.to_string()).collect(),
    };
    let make_pseudo = |bank: &[&str], stops: &[&str], lang: &'static str| {
        let mut seen: std::collections::HashSet<String> =
            stops.iter().map(|s| s.to_string()).collect();
        let symbols: Vec<Vec<String>> = (0..TOPICS)
            .map(|t| pseudo_words(bank, SYMBOLS_PER_TOPIC, 2, 1000 + t * 131, &mut seen))
            .collect();
        let vocab: Vec<Vec<String>> = (0..TOPICS)
            .map(|t| pseudo_words(bank, 24, 3, 5000 + t * 173, &mut seen))
            .collect();
        let noise = pseudo_words(bank, 12, 3, 9000, &mut seen);
        LangSpec {
            lang,
            symbols,
            vocab,
            noise,
            stops: stops.iter().map(|s| s.to_string()).collect(),
        }
    };
    let zh = make_pseudo(&ZH_SYLLABLES, &ZH_STOPS, "zh");
    let ar = make_pseudo(&AR_SYLLABLES, &AR_STOPS, "ar");
    vec![en, zh, ar]
}

/// Base token length per (topic, symbol), shared across languages so that
/// corresponding symbols have correlated text sizes. Log-normal-ish: spans
/// roughly an order of magnitude.
fn base_length(seed: u64, topic: usize, k: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((topic * SYMBOLS_PER_TOPIC + k) as u64) << 17);
    let z: f64 = rng.gen::<f64>() + rng.gen::<f64>() + rng.gen::<f64>() - 1.5; // approx normal
    (3.4 + 0.55 * z * 1.8).exp()
}

fn compose_text(
    rng: &mut ChaCha8Rng,
    len: usize,
    vocab: &[String],
    noise: &[String],
    stops: &[String],
) -> String {
    let mut words = Vec::with_capacity(len);
    for _ in 0..len {
        let r: f64 = rng.gen();
        let w = if r < 0.72 {
            &vocab[rng.gen_range(0..vocab.len())]
        } else if r < 0.88 {
            &noise[rng.gen_range(0..noise.len())]
        } else {
            &stops[rng.gen_range(0..stops.len())]
        };
        words.push(w.as_str());
    }
    // sentence-ish chunks
    let mut text = String::new();
    let mut i = 0;
    while i < words.len() {
        let n = rng.gen_range(6..=12).min(words.len() - i);
        let chunk = &words[i..i + n];
        let mut sentence = chunk.join(" ");
        if let Some(first) = sentence.get_mut(0..1) {
            first.make_ascii_uppercase();
        }
        sentence.push('.');
        if !text.is_empty() {
            text.push(' ');
        }
        text.push_str(&sentence);
        i += n;
    }
    text
}

/// Generates the full bundle for one seed.
pub fn generate(seed: u64) -> Result<SynthBundle> {
    let specs = lang_specs();
    let mut corpora = BTreeMap::new();
    let mut planted = BTreeMap::new();
    let mut maps = BTreeMap::new();
    let mut stops_out = BTreeMap::new();

    for spec in &specs {
        let mut docs = Vec::new();
        let mut plant = Vec::new();
        for topic in 0..TOPICS {
            for k in 0..SYMBOLS_PER_TOPIC {
                let index = topic * SYMBOLS_PER_TOPIC + k;
                let mut rng = doc_rng(seed, spec.lang, index);
                let jitter: f64 = rng.gen_range(0.8..1.25);
                let len = (base_length(seed, topic, k) * jitter)
                    .round()
                    .clamp(12.0, 160.0) as usize;
                let text =
                    compose_text(&mut rng, len, &spec.vocab[topic], &spec.noise, &spec.stops);
                let id = format!("{}-{:02}", spec.lang, index);
                docs.push(SymbolDoc {
                    id: id.clone(),
                    symbol: spec.symbols[topic][k].clone(),
                    lang: spec.lang.to_string(),
                    text,
                });
                plant.push((id, topic));
            }
        }
        let corpus = corpus_from_docs(docs)?;
        corpora.insert(spec.lang.to_string(), corpus);
        planted.insert(spec.lang.to_string(), plant);
        stops_out.insert(spec.lang.to_string(), spec.stops.clone());
    }

    // translation maps: zh/ar symbol (topic, k) -> en symbol (topic, k),
    // every UNMAPPED_STRIDE-th symbol deliberately left out. Two planted
    // gloss collisions per map exercise the alignment exclusion path:
    // symbols (1,7) and (2,11) are redirected onto their neighbors' glosses.
    for spec in specs.iter().skip(1) {
        let mut entries = Vec::new();
        for topic in 0..TOPICS {
            for k in 0..SYMBOLS_PER_TOPIC {
                if (topic * SYMBOLS_PER_TOPIC + k) % UNMAPPED_STRIDE == UNMAPPED_STRIDE - 1 {
                    continue;
                }
                let gloss_k = match (topic, k) {
                    (1, 7) => 6,
                    (2, 11) => 10,
                    _ => k,
                };
                entries.push((
                    spec.symbols[topic][k].clone(),
                    EN_SYMBOLS[topic][gloss_k].to_string(),
                ));
            }
        }
        maps.insert(
            spec.lang.to_string(),
            TranslationMap::from_entries(entries)?,
        );
    }

    // happiness lexicon over English topic + noise vocabulary, scores from
    // per-word streams so entries are order-independent
    let mut lex_entries = Vec::new();
    for (topic, words) in EN_VOCAB.iter().enumerate() {
        let (lo, hi) = SENTIMENT_RANGE[topic];
        for w in words {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(w));
            let score = (rng.gen_range(lo..hi) * 100.0).round() / 100.0;
            lex_entries.push((w.to_string(), score));
        }
    }
    for w in EN_NOISE {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(w));
        let score = (rng.gen_range(NOISE_RANGE.0..NOISE_RANGE.1) * 100.0).round() / 100.0;
        lex_entries.push((w.to_string(), score));
    }
    let lexicon = HappinessLexicon::from_entries(lex_entries)?;

    Ok(SynthBundle {
        corpora,
        maps,
        lexicon,
        stops: stops_out,
        planted,
    })
}

fn corpus_from_docs(docs: Vec<SymbolDoc>) -> Result<Corpus> {
    // round-trip through the JSONL loader so corpus invariants are enforced
    let tmp = std::env::temp_dir().join(format!("synth-{}.jsonl", std::process::id()));
    {
        let mut out = std::fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        use std::io::Write;
        for doc in &docs {
            writeln!(out, "{}", serde_json::to_string(doc).expect("serializable"))
                .map_err(|e| Error::io(&tmp, e))?;
        }
    }
    let corpus = load_corpus(&tmp, CorpusFormat::Jsonl);
    let _ = std::fs::remove_file(&tmp);
    corpus
}

/// Writes the bundle as fixture files:
/// `synth_<lang>.jsonl`, `map_<lang>_en.csv`, `lexicon_en.tsv`,
/// `stops_<lang>.txt`, `planted_<lang>.csv`.
pub fn write_fixtures(bundle: &SynthBundle, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    use std::io::Write;
    for (lang, corpus) in &bundle.corpora {
        crate::corpus::write_corpus(
            corpus,
            &dir.join(format!("synth_{lang}.jsonl")),
            CorpusFormat::Jsonl,
        )?;
    }
    for (lang, map) in &bundle.maps {
        let path = dir.join(format!("map_{lang}_en.csv"));
        let mut out = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        writeln!(out, "source,gloss").map_err(|e| Error::io(&path, e))?;
        for (src, gloss) in map.iter() {
            writeln!(out, "{src},{gloss}").map_err(|e| Error::io(&path, e))?;
        }
    }
    {
        let path = dir.join("lexicon_en.tsv");
        let mut out = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut entries: Vec<(String, f64)> = Vec::new();
        for words in EN_VOCAB.iter() {
            for w in words.iter() {
                entries.push((
                    w.to_string(),
                    bundle.lexicon.score(w).expect("generated word scored"),
                ));
            }
        }
        for w in EN_NOISE {
            entries.push((
                w.to_string(),
                bundle.lexicon.score(w).expect("generated word scored"),
            ));
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for (w, s) in entries {
            writeln!(out, "{w}\t{s}").map_err(|e| Error::io(&path, e))?;
        }
    }
    for (lang, stops) in &bundle.stops {
        let path = dir.join(format!("stops_{lang}.txt"));
        std::fs::write(&path, stops.join("\n") + "\n").map_err(|e| Error::io(&path, e))?;
    }
    for (lang, plant) in &bundle.planted {
        let path = dir.join(format!("planted_{lang}.csv"));
        let mut out = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        writeln!(out, "id,group").map_err(|e| Error::io(&path, e))?;
        for (id, topic) in plant {
            writeln!(out, "{id},{topic}").map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}
