//! Corpus, translation-map, sentiment-lexicon, and stop-list file models.
//!
//! The canonical corpus format is JSONL with fields `{id, symbol, lang, text}`,
//! one object per line; CSV with the same columns is supported for
//! convenience. Translation maps are 2-column CSV (source, gloss), lexicons
//! 2-column TSV (word, score), stop lists newline-delimited words. All loaded
//! objects are immutable after construction.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textproc::{LangProfile, StopList};

/// One dictionary symbol with its interpretation text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDoc {
    pub id: String,
    /// Display string (dictionary headword).
    pub symbol: String,
    pub lang: String,
    /// Raw interpretation text.
    pub text: String,
}

/// An ordered collection of [`SymbolDoc`]s sharing one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub lang: String,
    docs: Vec<SymbolDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl Corpus {
    /// Builds a corpus from documents, enforcing the corpus invariants:
    /// non-empty unique ids, unique case-folded symbols, matching language
    /// tags, non-empty text. `line_of` maps a doc index to the input line
    /// reported in errors.
    fn from_docs(
        docs: Vec<SymbolDoc>,
        path: &Path,
        line_of: impl Fn(usize) -> usize,
    ) -> Result<Corpus> {
        if docs.is_empty() {
            return Err(Error::InvalidInput(format!(
                "corpus {} contains no documents",
                path.display()
            )));
        }
        let lang = docs[0].lang.clone();
        if lang.is_empty() {
            return Err(Error::parse(path, line_of(0), "empty lang"));
        }
        let mut ids = HashSet::new();
        let mut symbols = HashSet::new();
        for (i, doc) in docs.iter().enumerate() {
            let line = line_of(i);
            if doc.id.is_empty() {
                return Err(Error::parse(path, line, "empty id"));
            }
            if doc.text.is_empty() {
                return Err(Error::parse(
                    path,
                    line,
                    format!("empty text for id '{}'", doc.id),
                ));
            }
            if doc.symbol.is_empty() {
                return Err(Error::parse(
                    path,
                    line,
                    format!("empty symbol for id '{}'", doc.id),
                ));
            }
            if doc.lang != lang {
                return Err(Error::parse(
                    path,
                    line,
                    format!(
                        "lang mismatch: corpus is '{lang}' but doc '{}' has '{}'",
                        doc.id, doc.lang
                    ),
                ));
            }
            if !ids.insert(doc.id.clone()) {
                return Err(Error::parse(
                    path,
                    line,
                    format!("duplicate id '{}'", doc.id),
                ));
            }
            if !symbols.insert(fold(&doc.symbol)) {
                return Err(Error::parse(
                    path,
                    line,
                    format!("duplicate symbol '{}'", doc.symbol),
                ));
            }
        }
        Ok(Corpus { lang, docs })
    }

    pub fn docs(&self) -> &[SymbolDoc] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&SymbolDoc> {
        self.docs.iter().find(|d| d.id == id)
    }
}

/// Case-fold for symbol/gloss/word comparison.
pub(crate) fn fold(s: &str) -> String {
    s.trim().to_lowercase()
}

/// Loads a corpus file in the given format, preserving input order.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus> {
    match format {
        CorpusFormat::Jsonl => load_corpus_jsonl(path),
        CorpusFormat::Csv => load_corpus_csv(path),
    }
}

fn load_corpus_jsonl(path: &Path) -> Result<Corpus> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut docs = Vec::new();
    let mut lines = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: SymbolDoc = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, lineno, format!("malformed record: {e}")))?;
        docs.push(doc);
        lines.push(lineno);
    }
    Corpus::from_docs(docs, path, |i| lines[i])
}

fn load_corpus_csv(path: &Path) -> Result<Corpus> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))?;
    let mut docs = Vec::new();
    let mut lines = Vec::new();
    for result in reader.deserialize::<SymbolDoc>() {
        let rec = result.map_err(|e| match e.position() {
            Some(pos) => Error::parse(path, pos.line() as usize, format!("malformed record: {e}")),
            None => Error::InvalidInput(format!("{}: {e}", path.display())),
        })?;
        lines.push(lines.len() + 2); // header occupies line 1
        docs.push(rec);
    }
    Corpus::from_docs(docs, path, |i| lines[i])
}

/// Writes a corpus in the given format; `load_corpus` round-trips it.
pub fn write_corpus(corpus: &Corpus, path: &Path, format: CorpusFormat) -> Result<()> {
    let mut out = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    match format {
        CorpusFormat::Jsonl => {
            for doc in corpus.docs() {
                let line = serde_json::to_string(doc)
                    .map_err(|e| Error::InvalidInput(format!("serialize {}: {e}", doc.id)))?;
                writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
            }
        }
        CorpusFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for doc in corpus.docs() {
                w.serialize(doc)
                    .map_err(|e| Error::InvalidInput(format!("serialize {}: {e}", doc.id)))?;
            }
            w.flush().map_err(|e| Error::io(path, e))?;
            return Ok(());
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Mapping from source-language symbol strings to case-folded target glosses.
#[derive(Debug, Clone, Default)]
pub struct TranslationMap {
    entries: BTreeMap<String, String>,
}

impl TranslationMap {
    pub fn from_entries<I: IntoIterator<Item = (String, String)>>(entries: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (src, gloss) in entries {
            insert_translation(&mut map, src, gloss, None, 0)?;
        }
        Ok(TranslationMap { entries: map })
    }

    pub fn lookup(&self, symbol: &str) -> Option<&str> {
        self.entries.get(symbol).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

fn insert_translation(
    map: &mut BTreeMap<String, String>,
    src: String,
    gloss: String,
    path: Option<&Path>,
    line: usize,
) -> Result<()> {
    if src.is_empty() {
        return match path {
            Some(p) => Err(Error::parse(p, line, "empty source symbol")),
            None => Err(Error::InvalidInput(
                "translation map: empty source symbol".into(),
            )),
        };
    }
    let gloss = fold(&gloss);
    if let Some(existing) = map.get(&src) {
        if existing != &gloss {
            let msg = format!(
                "duplicate source '{src}' with conflicting glosses '{existing}' and '{gloss}'"
            );
            return match path {
                Some(p) => Err(Error::parse(p, line, msg)),
                None => Err(Error::InvalidInput(format!("translation map: {msg}"))),
            };
        }
        return Ok(());
    }
    map.insert(src, gloss);
    Ok(())
}

/// Loads a 2-column CSV translation map (source, gloss). Glosses are
/// case-folded on load.
pub fn load_translation_map(path: &Path, has_header: bool) -> Result<TranslationMap> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for result in reader.records() {
        let rec = result.map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() < 2 {
            return Err(Error::parse(
                path,
                line,
                format!("expected 2 columns, got {}", rec.len()),
            ));
        }
        insert_translation(
            &mut map,
            rec[0].trim().to_string(),
            rec[1].to_string(),
            Some(path),
            line,
        )?;
    }
    Ok(TranslationMap { entries: map })
}

/// Word-to-happiness-score lexicon; scores lie in [1, 9] (5 = neutral).
#[derive(Debug, Clone, Default)]
pub struct HappinessLexicon {
    scores: HashMap<String, f64>,
}

impl HappinessLexicon {
    pub fn from_entries<I: IntoIterator<Item = (String, f64)>>(entries: I) -> Result<Self> {
        let mut lex = HappinessLexicon::default();
        for (word, score) in entries {
            lex.insert(word, score, None, 0)?;
        }
        Ok(lex)
    }

    fn insert(&mut self, word: String, score: f64, path: Option<&Path>, line: usize) -> Result<()> {
        let err = |msg: String| match path {
            Some(p) => Error::parse(p, line, msg),
            None => Error::InvalidInput(format!("lexicon: {msg}")),
        };
        let word = fold(&word);
        if word.is_empty() {
            return Err(err("empty word".into()));
        }
        if !(1.0..=9.0).contains(&score) {
            return Err(err(format!("score {score} for '{word}' outside [1, 9]")));
        }
        if self.scores.insert(word.clone(), score).is_some() {
            return Err(err(format!("duplicate word '{word}'")));
        }
        Ok(())
    }

    pub fn score(&self, word: &str) -> Option<f64> {
        self.scores.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Loads a TSV lexicon of (word, score) rows. A single header row is
/// tolerated when its second column does not parse as a number.
pub fn load_lexicon(path: &Path) -> Result<HappinessLexicon> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lex = HappinessLexicon::default();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(2, '\t');
        let word = parts.next().unwrap_or_default();
        let score_str = parts
            .next()
            .ok_or_else(|| Error::parse(path, lineno, "expected 2 tab-separated columns"))?
            .trim();
        match score_str.parse::<f64>() {
            Ok(score) => lex.insert(word.to_string(), score, Some(path), lineno)?,
            Err(_) if lineno == 1 => continue, // header row
            Err(_) => {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("unparseable score '{score_str}'"),
                ));
            }
        }
    }
    if lex.is_empty() {
        return Err(Error::InvalidInput(format!(
            "lexicon {} is empty",
            path.display()
        )));
    }
    Ok(lex)
}

/// Loads a newline-delimited stop-word list (case-folded, blank lines skipped).
pub fn load_stoplist(path: &Path) -> Result<StopList> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(StopList::from_words(
        content.lines().map(fold).filter(|w| !w.is_empty()),
    ))
}

/// Report-only corpus diagnostics: documents that preprocess to nothing and
/// a summary of the text-length distribution.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub n_docs: usize,
    /// Ids of documents with no tokens left after preprocessing.
    pub empty_after_preprocessing: Vec<String>,
    pub length_min: usize,
    pub length_median: usize,
    pub length_max: usize,
    pub length_mean: f64,
}

impl ValidationReport {
    pub fn warnings(&self) -> usize {
        self.empty_after_preprocessing.len()
    }
}

/// Validates a corpus against a preprocessing profile. Never fails: empty
/// results are reported, not rejected.
pub fn validate_corpus(
    corpus: &Corpus,
    profile: &LangProfile,
    stops: &StopList,
) -> ValidationReport {
    let mut empty = Vec::new();
    for doc in corpus.docs() {
        if crate::textproc::preprocess(doc, profile, stops).is_empty() {
            empty.push(doc.id.clone());
        }
    }
    let mut lengths: Vec<usize> = corpus
        .docs()
        .iter()
        .map(|d| d.text.chars().count())
        .collect();
    lengths.sort_unstable();
    let n = lengths.len();
    ValidationReport {
        n_docs: n,
        empty_after_preprocessing: empty,
        length_min: lengths[0],
        length_median: lengths[n / 2],
        length_max: lengths[n - 1],
        length_mean: lengths.iter().sum::<usize>() as f64 / n as f64,
    }
}
