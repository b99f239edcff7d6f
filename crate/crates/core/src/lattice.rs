//! Decipherment lattice construction.
//!
//! Every cipher token becomes a segment of scored candidate words. Known
//! codes yield their wordbank plaintext; unknown codes draw candidates from a
//! reference dictionary between the two nearest anchors, weighted by a beta
//! distribution whose mode sits at the code's relative position.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::{beta_interval_probs, BetaParams};
use crate::error::{Error, Result};
use crate::inflect::forms_for_marker;
use crate::transcript::{parse_document, CipherToken, TokenKind};
use crate::wordbank::{Anchoring, Wordbank};

/// Word emitted for sentence-end markers.
pub const SENTENCE_END_WORD: &str = ".";

/// Reads a one-word-per-line list, skipping blanks and `#` comments.
pub fn read_word_list(path: &Path) -> Result<Vec<String>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut words = Vec::new();
    for line in std::io::BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let word = line.trim();
        if !word.is_empty() && !word.starts_with('#') {
            words.push(word.to_lowercase());
        }
    }
    Ok(words)
}

/// Alphabetically sorted, duplicate-free list of lowercase lemmas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceDict {
    words: Vec<String>,
}

impl ReferenceDict {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut words: Vec<String> = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        words.sort_unstable();
        words.dedup();
        Self { words }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(Self::new(read_word_list(path)?))
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words
            .binary_search_by(|w| w.as_str().cmp(word))
            .is_ok()
    }

    /// Words strictly between the bounds; `None` leaves that side open.
    pub fn range(&self, lo: Option<&str>, hi: Option<&str>) -> &[String] {
        let start = lo.map_or(0, |lo| self.words.partition_point(|w| w.as_str() <= lo));
        let end = hi.map_or(self.words.len(), |hi| {
            self.words.partition_point(|w| w.as_str() < hi)
        });
        if start >= end {
            &[]
        } else {
            &self.words[start..end]
        }
    }

    /// Words strictly between two anchor words.
    pub fn candidates_between(&self, lo: &str, hi: &str) -> Result<&[String]> {
        if lo >= hi {
            return Err(Error::domain(format!(
                "anchor {lo:?} does not sort before {hi:?}"
            )));
        }
        Ok(self.range(Some(lo), Some(hi)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    WordbankExact,
    Interpolated,
    Inflection,
    EdgeCase,
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub word: String,
    /// Natural-log lattice probability.
    #[serde(rename = "logprob")]
    pub log_prob: f64,
    pub source: Source,
    /// Uninflected form the candidate was generated from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma: Option<String>,
}

impl Candidate {
    pub fn new(word: impl Into<String>, prob: f64, source: Source) -> Self {
        Self {
            word: word.into(),
            log_prob: prob.ln(),
            source,
            lemma: None,
        }
    }

    pub fn prob(&self) -> f64 {
        self.log_prob.exp()
    }

    /// The word to record in a wordbank when this candidate is accepted.
    pub fn base_word(&self) -> &str {
        self.lemma.as_deref().unwrap_or(&self.word)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub token: CipherToken,
    pub candidates: Vec<Candidate>,
}

impl Segment {
    pub fn total_prob(&self) -> f64 {
        self.candidates.iter().map(Candidate::prob).sum()
    }

    /// Index of the most probable candidate; earlier entries win ties.
    pub fn best(&self) -> usize {
        let mut best = 0;
        for (i, c) in self.candidates.iter().enumerate() {
            if c.log_prob > self.candidates[best].log_prob {
                best = i;
            }
        }
        best
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lattice {
    pub segments: Vec<Segment>,
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn mean_candidates(&self) -> f64 {
        if self.segments.is_empty() {
            return 0.0;
        }
        let total: usize = self.segments.iter().map(|s| s.candidates.len()).sum();
        total as f64 / self.segments.len() as f64
    }

    /// Product of segment sizes, saturating.
    pub fn path_count(&self) -> u128 {
        self.segments.iter().fold(1u128, |acc, s| {
            acc.saturating_mul(s.candidates.len() as u128)
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<SegmentRecord<'_>> = self
            .segments
            .iter()
            .map(|s| SegmentRecord {
                cipher: s.token.to_string(),
                candidates: std::borrow::Cow::Borrowed(&s.candidates),
            })
            .collect();
        Ok(serde_json::to_string_pretty(&rows)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rows: Vec<SegmentRecord<'static>> = serde_json::from_str(text)?;
        let mut segments = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            let mut tokens = parse_document(&row.cipher)?;
            if tokens.len() != 1 {
                return Err(Error::domain(format!(
                    "segment {i}: cipher {:?} is not a single token",
                    row.cipher
                )));
            }
            let candidates = row.candidates.into_owned();
            if candidates.is_empty() {
                return Err(Error::domain(format!("segment {i} has no candidates")));
            }
            if let Some(c) = candidates
                .iter()
                .find(|c| !c.log_prob.is_finite() || c.word.is_empty())
            {
                return Err(Error::domain(format!(
                    "segment {i}: invalid candidate {c:?}"
                )));
            }
            segments.push(Segment {
                token: tokens.remove(0),
                candidates,
            });
        }
        Ok(Lattice { segments })
    }
}

#[derive(Serialize, Deserialize)]
struct SegmentRecord<'a> {
    cipher: String,
    candidates: std::borrow::Cow<'a, [Candidate]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    /// Beta sharpness.
    pub beta: f64,
    /// Stand-in for unknown codes in the proper-noun block of the table.
    pub proper_noun: String,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            beta: 5.0,
            proper_noun: "america".to_string(),
        }
    }
}

/// Everything segment construction reads besides the token itself.
#[derive(Debug, Clone, Copy)]
pub struct LatticeInputs<'a> {
    pub wordbank: &'a Wordbank,
    pub reference: &'a ReferenceDict,
    /// Most common words, used for codes that cannot be interpolated.
    pub common_words: &'a [String],
    pub config: &'a LatticeConfig,
}

/// Splits every candidate's probability equally over its inflected forms,
/// restricted to forms matching `marker` when one is given. Forms produced
/// more than once merge by summing probability.
pub fn expand_inflections(cands: Vec<Candidate>, marker: Option<&str>) -> Vec<Candidate> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut merged: Vec<(Candidate, f64)> = Vec::new();
    for cand in cands {
        let forms = forms_for_marker(&cand.word, marker);
        let share = cand.prob() / forms.len() as f64;
        let lemma = cand.lemma.clone().unwrap_or_else(|| cand.word.clone());
        for form in forms {
            if let Some(&i) = index.get(&form) {
                merged[i].1 += share;
                continue;
            }
            let source = if form == cand.word {
                cand.source
            } else {
                Source::Inflection
            };
            let lemma = (form != lemma).then(|| lemma.clone());
            index.insert(form.clone(), merged.len());
            merged.push((
                Candidate {
                    word: form,
                    log_prob: 0.0,
                    source,
                    lemma,
                },
                share,
            ));
        }
    }
    merged
        .into_iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(mut c, p)| {
            c.log_prob = p.ln();
            c
        })
        .collect()
}

fn uniform(words: &[String], source: Source) -> Vec<Candidate> {
    let p = 1.0 / words.len() as f64;
    words
        .iter()
        .map(|w| Candidate::new(w.clone(), p, source))
        .collect()
}

fn common_fallback(inputs: &LatticeInputs<'_>, marker: Option<&str>) -> Vec<Candidate> {
    if inputs.common_words.is_empty() {
        return vec![Candidate::new(
            inputs.config.proper_noun.clone(),
            1.0,
            Source::EdgeCase,
        )];
    }
    let cands = uniform(inputs.common_words, Source::EdgeCase);
    match marker {
        Some(_) => expand_inflections(cands, marker),
        None => cands,
    }
}

/// Builds the candidate list for one cipher token. Never returns an empty
/// segment.
pub fn build_segment(token: &CipherToken, inputs: &LatticeInputs<'_>) -> Result<Segment> {
    let marker = token.suffix.as_deref();
    let candidates = match &token.kind {
        TokenKind::Literal { text } => {
            vec![Candidate::new(text.to_lowercase(), 1.0, Source::Literal)]
        }
        TokenKind::SentenceEnd => vec![Candidate::new(SENTENCE_END_WORD, 1.0, Source::Literal)],
        TokenKind::TableCode { .. } | TokenKind::DictCode { .. } => {
            match inputs.wordbank.anchors_for(token) {
                Anchoring::Exact(word) => {
                    let exact = vec![Candidate::new(word, 1.0, Source::WordbankExact)];
                    if marker.is_some() {
                        expand_inflections(exact, marker)
                    } else {
                        exact
                    }
                }
                Anchoring::Between(pair) => {
                    let words = inputs
                        .reference
                        .range(pair.lower.word.as_deref(), pair.upper.word.as_deref());
                    let ordered = match (&pair.lower.word, &pair.upper.word) {
                        (Some(lo), Some(hi)) => lo < hi,
                        _ => true,
                    };
                    if words.is_empty() || !ordered {
                        common_fallback(inputs, marker)
                    } else {
                        let params = BetaParams::new(pair.m, inputs.config.beta)?;
                        let probs = beta_interval_probs(&params, words.len());
                        let cands = words
                            .iter()
                            .zip(probs)
                            .filter(|(_, p)| *p > 0.0)
                            .map(|(w, p)| Candidate::new(w.clone(), p, Source::Interpolated))
                            .collect();
                        expand_inflections(cands, marker)
                    }
                }
                Anchoring::ProperNounSection => vec![Candidate::new(
                    inputs.config.proper_noun.clone(),
                    1.0,
                    Source::EdgeCase,
                )],
                Anchoring::OutsideAlphabetic | Anchoring::Unplaceable => {
                    common_fallback(inputs, marker)
                }
            }
        }
    };
    let candidates = if candidates.is_empty() {
        common_fallback(inputs, marker)
    } else {
        candidates
    };
    Ok(Segment {
        token: token.clone(),
        candidates,
    })
}

/// One segment per token, in document order. Segments are built in parallel.
pub fn build_lattice(doc: &[CipherToken], inputs: &LatticeInputs<'_>) -> Result<Lattice> {
    let segments = doc
        .par_iter()
        .map(|t| build_segment(t, inputs))
        .collect::<Result<Vec<_>>>()?;
    let lattice = Lattice { segments };
    log::debug!(
        "lattice: {} segments, {:.1} candidates per segment",
        lattice.len(),
        lattice.mean_candidates()
    );
    Ok(lattice)
}
