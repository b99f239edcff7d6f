use serde::Serialize;

use crate::decoder::{oracle_decode, DecodePath};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, SENTENCE_END_WORD};
use crate::transcript::TokenKind;
use crate::wordbank::Wordbank;

/// Rendering of a sentence-end token in a decode path.
const SENTENCE_END_CIPHER: &str = "|";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    /// Word tokens scored; sentence ends are not counted.
    pub tokens: usize,
    pub token_accuracy: f64,
    /// Tokens readable from the wordbank alone (exact code hits and literals).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_accuracy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_candidates_per_segment: Option<f64>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

fn check_len(path: usize, gold: usize) -> Result<()> {
    if path == gold {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "path has {path} tokens but gold has {gold}"
        )))
    }
}

/// Case-folded exact-match accuracy over word tokens.
pub fn evaluate<G: AsRef<str>>(path: &DecodePath, gold: &[G]) -> Result<Metrics> {
    check_len(path.len(), gold.len())?;
    let mut tokens = 0;
    let mut correct = 0;
    for (step, g) in path.steps.iter().zip(gold) {
        if step.cipher == SENTENCE_END_CIPHER || g.as_ref() == SENTENCE_END_WORD {
            continue;
        }
        tokens += 1;
        correct += usize::from(step.word.to_lowercase() == g.as_ref().to_lowercase());
    }
    Ok(Metrics {
        tokens,
        token_accuracy: ratio(correct, tokens),
        coverage: None,
        oracle_accuracy: None,
        mean_candidates_per_segment: None,
    })
}

/// Fraction of word tokens that are literals or codes present in `wordbank`.
pub fn coverage(lattice: &Lattice, wordbank: &Wordbank) -> f64 {
    let mut tokens = 0;
    let mut covered = 0;
    for seg in &lattice.segments {
        let hit = match seg.token.kind {
            TokenKind::SentenceEnd => continue,
            TokenKind::Literal { .. } => true,
            _ => wordbank.lookup(&seg.token).is_some(),
        };
        tokens += 1;
        covered += usize::from(hit);
    }
    ratio(covered, tokens)
}

/// [`evaluate`] plus the lattice-dependent figures.
pub fn evaluate_full<G: AsRef<str>>(
    path: &DecodePath,
    gold: &[G],
    lattice: &Lattice,
    wordbank: &Wordbank,
) -> Result<Metrics> {
    check_len(lattice.len(), gold.len())?;
    let mut m = evaluate(path, gold)?;
    let oracle = oracle_decode(lattice, gold)?;
    m.coverage = Some(coverage(lattice, wordbank));
    m.oracle_accuracy = Some(evaluate(&oracle.path, gold)?.token_accuracy);
    m.mean_candidates_per_segment = Some(lattice.mean_candidates());
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::DecodeStep;

    fn path(words: &[&str]) -> DecodePath {
        let mut p = DecodePath::empty(Some(4), 1.0);
        p.steps = words
            .iter()
            .map(|w| DecodeStep {
                cipher: if *w == "." { "|".into() } else { "[1]^".into() },
                word: w.to_string(),
                candidate: 0,
                lm: 0.0,
                lattice: 0.0,
            })
            .collect();
        p
    }

    #[test]
    fn identical_path_scores_one() {
        let m = evaluate(&path(&["i", "am", "."]), &["I", "am", "."]).unwrap();
        assert_eq!(m.token_accuracy, 1.0);
        assert_eq!(m.tokens, 2);
    }

    #[test]
    fn three_of_four() {
        let m = evaluate(
            &path(&["a", "b", "c", ".", "d"]),
            &["a", "b", "x", ".", "d"],
        )
        .unwrap();
        assert_eq!(m.token_accuracy, 0.75);
    }

    #[test]
    fn length_mismatch() {
        assert!(evaluate(&path(&["a"]), &["a", "b"]).is_err());
    }
}
