use std::cmp::Ordering;
use std::collections::HashMap;
use std::time::Instant;

use super::beam::check_weight;
use super::{better, DecodePath, DecodeStep};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::lm::{Scorer, TokenId};
use crate::transcript::TokenKind;

/// Largest lattice, in paths, that exhaustive search will enumerate.
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;

fn path_from_choices(lattice: &Lattice, choices: &[usize], seg_lm: &[f64]) -> Vec<DecodeStep> {
    lattice
        .segments
        .iter()
        .zip(choices)
        .zip(seg_lm)
        .map(|((seg, &ci), &lm)| DecodeStep {
            cipher: seg.token.to_string(),
            word: seg.candidates[ci].word.clone(),
            candidate: ci,
            lm,
            lattice: seg.candidates[ci].log_prob,
        })
        .collect()
}

struct Best {
    score: f64,
    lm: f64,
    lattice: f64,
    choices: Vec<usize>,
    seg_lm: Vec<f64>,
}

struct Enumerator<'l, 's, S: Scorer> {
    lattice: &'l Lattice,
    scorer: &'s S,
    tokens: Vec<Vec<Vec<TokenId>>>,
    a: f64,
    choices: Vec<usize>,
    seg_lm: Vec<f64>,
    best: Option<Best>,
}

impl<S: Scorer> Enumerator<'_, '_, S> {
    fn words_of(&self, choices: &[usize]) -> Vec<&str> {
        choices
            .iter()
            .zip(&self.lattice.segments)
            .map(|(&ci, seg)| seg.candidates[ci].word.as_str())
            .collect()
    }

    fn run(&mut self, si: usize, state: &S::State, lm: f64, lattice: f64) -> Result<()> {
        if si == self.lattice.len() {
            let score = lm + self.a * lattice;
            let wins = match &self.best {
                None => true,
                Some(b) => {
                    better(
                        score,
                        &self.words_of(&self.choices),
                        b.score,
                        &self.words_of(&b.choices),
                    ) == Ordering::Less
                }
            };
            if wins {
                self.best = Some(Best {
                    score,
                    lm,
                    lattice,
                    choices: self.choices.clone(),
                    seg_lm: self.seg_lm.clone(),
                });
            }
            return Ok(());
        }
        for ci in 0..self.lattice.segments[si].candidates.len() {
            let mut st = state.clone();
            let mut total = lm;
            let mut own = 0.0;
            for &t in &self.tokens[si][ci] {
                let (next, lp) = self.scorer.extend(&st, t)?;
                st = next;
                total += lp;
                own += lp;
            }
            let lat = lattice + self.lattice.segments[si].candidates[ci].log_prob;
            self.choices.push(ci);
            self.seg_lm.push(own);
            self.run(si + 1, &st, total, lat)?;
            self.choices.pop();
            self.seg_lm.pop();
        }
        Ok(())
    }
}

/// Globally best path by full enumeration. Refuses lattices with more than
/// [`EXHAUSTIVE_LIMIT`] paths.
pub fn exhaustive_decode<S: Scorer>(
    lattice: &Lattice,
    scorer: &S,
    lattice_weight: f64,
) -> Result<DecodePath> {
    check_weight(lattice_weight)?;
    let paths = lattice.path_count();
    if paths > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            paths,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    if paths == 0 {
        return Err(Error::domain("lattice has a segment without candidates"));
    }
    let started = Instant::now();
    let tokens = lattice
        .segments
        .iter()
        .map(|seg| {
            seg.candidates
                .iter()
                .map(|c| scorer.tokenize(&c.word))
                .collect()
        })
        .collect::<Result<Vec<Vec<_>>>>()?;
    let mut e = Enumerator {
        lattice,
        scorer,
        tokens,
        a: lattice_weight,
        choices: Vec::with_capacity(lattice.len()),
        seg_lm: Vec::with_capacity(lattice.len()),
        best: None,
    };
    e.run(0, &scorer.begin(), 0.0, 0.0)?;
    let best = e.best.expect("at least one path");
    Ok(DecodePath {
        steps: path_from_choices(lattice, &best.choices, &best.seg_lm),
        lm_total: best.lm,
        lattice_total: best.lattice,
        combined: best.score,
        beam: None,
        lattice_weight,
        runtime: started.elapsed(),
    })
}

/// Picks, independently per segment, the candidate with the best frequency
/// rank (1 = most frequent). Unranked words come after all ranked ones; ties
/// go to the higher lattice probability, then alphabetical order.
pub fn unigram_decode(lattice: &Lattice, rank: &HashMap<String, usize>) -> DecodePath {
    let started = Instant::now();
    let mut choices = Vec::with_capacity(lattice.len());
    for seg in &lattice.segments {
        let key = |ci: usize| {
            let c = &seg.candidates[ci];
            (rank.get(&c.word).copied().unwrap_or(usize::MAX), c)
        };
        let best = (0..seg.candidates.len()).min_by(|&x, &y| {
            let ((rx, cx), (ry, cy)) = (key(x), key(y));
            rx.cmp(&ry)
                .then(cy.log_prob.total_cmp(&cx.log_prob))
                .then(cx.word.cmp(&cy.word))
        });
        choices.push(best.unwrap_or(0));
    }
    let zeros = vec![0.0; lattice.len()];
    let steps = path_from_choices(lattice, &choices, &zeros);
    let lattice_total = steps.iter().fold(0.0, |acc, s| acc + s.lattice);
    DecodePath {
        steps,
        lm_total: 0.0,
        lattice_total,
        combined: lattice_total,
        beam: None,
        lattice_weight: 1.0,
        runtime: started.elapsed(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub path: DecodePath,
    /// Word segments whose gold word appears among the candidates.
    pub in_lattice: usize,
    /// Word segments considered (sentence ends excluded).
    pub scored: usize,
}

impl OracleResult {
    pub fn rate(&self) -> f64 {
        if self.scored == 0 {
            1.0
        } else {
            self.in_lattice as f64 / self.scored as f64
        }
    }
}

/// Chooses the gold word wherever the lattice contains it, otherwise the
/// most probable candidate.
pub fn oracle_decode<G: AsRef<str>>(lattice: &Lattice, gold: &[G]) -> Result<OracleResult> {
    if gold.len() != lattice.len() {
        return Err(Error::domain(format!(
            "gold has {} tokens but the lattice has {} segments",
            gold.len(),
            lattice.len()
        )));
    }
    let started = Instant::now();
    let mut choices = Vec::with_capacity(lattice.len());
    let (mut in_lattice, mut scored) = (0, 0);
    for (seg, g) in lattice.segments.iter().zip(gold) {
        let g = g.as_ref().to_lowercase();
        let hit = seg.candidates.iter().position(|c| c.word == g);
        if seg.token.kind != TokenKind::SentenceEnd {
            scored += 1;
            in_lattice += usize::from(hit.is_some());
        }
        choices.push(hit.unwrap_or_else(|| seg.best()));
    }
    let zeros = vec![0.0; lattice.len()];
    let steps = path_from_choices(lattice, &choices, &zeros);
    let lattice_total = steps.iter().fold(0.0, |acc, s| acc + s.lattice);
    let path = DecodePath {
        steps,
        lm_total: 0.0,
        lattice_total,
        combined: lattice_total,
        beam: None,
        lattice_weight: 1.0,
        runtime: started.elapsed(),
    };
    Ok(OracleResult {
        path,
        in_lattice,
        scored,
    })
}
