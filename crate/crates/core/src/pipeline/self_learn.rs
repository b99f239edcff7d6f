use std::collections::HashMap;

use serde::Serialize;

use super::Resources;
use crate::decoder::{beam_decode, DecodeOptions, DecodePath};
use crate::error::{Error, Result};
use crate::lattice::{build_lattice, Lattice, Source};
use crate::lm::Scorer;
use crate::transcript::CipherToken;
use crate::wordbank::{Section, Wordbank};

/// How a decoded token's confidence is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Confidence {
    /// The token's own contribution to the path score, LM + a * lattice.
    Score,
    /// Log share of the chosen candidate among all candidates of its
    /// segment, each scored with the decoded left context, the next decoded
    /// word and its lattice term.
    #[default]
    Posterior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfLearnConfig {
    /// Maximum promotion rounds.
    pub iterations: usize,
    /// Share of distinct unknown codes promoted per round.
    pub promote_fraction: f64,
    /// Confidence (natural log) a decoding needs to be promoted.
    pub min_confidence: f64,
    pub confidence: Confidence,
    pub decode: DecodeOptions,
}

impl Default for SelfLearnConfig {
    fn default() -> Self {
        Self {
            iterations: 3,
            promote_fraction: 0.1,
            min_confidence: -0.1,
            confidence: Confidence::Posterior,
            decode: DecodeOptions::default(),
        }
    }
}

impl SelfLearnConfig {
    fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::domain("self-learning needs at least one iteration"));
        }
        if !(self.promote_fraction > 0.0 && self.promote_fraction <= 1.0) {
            return Err(Error::domain(format!(
                "promote fraction must be in (0, 1], got {}",
                self.promote_fraction
            )));
        }
        self.decode.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundReport {
    pub round: usize,
    /// Wordbank entries when the round's decode ran.
    pub wordbank_size: usize,
    pub unknown_codes: usize,
    pub promoted: usize,
    /// Promotions refused because they broke alphabetical order.
    pub rejected: usize,
    pub combined: f64,
}

#[derive(Debug, Clone)]
pub struct SelfLearnOutcome {
    pub path: DecodePath,
    pub lattice: Lattice,
    pub wordbank: Wordbank,
    pub rounds: Vec<RoundReport>,
}

struct Proposal {
    section: Section,
    position: u64,
    word: String,
    score: f64,
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Per-step confidence of the decoded path. Steps that are never promoted
/// get `None`.
fn confidences<S: Scorer>(
    lattice: &Lattice,
    path: &DecodePath,
    scorer: &S,
    wanted: &[bool],
    a: f64,
    mode: Confidence,
) -> Result<Vec<Option<f64>>> {
    if mode == Confidence::Score {
        return Ok(path
            .steps
            .iter()
            .zip(wanted)
            .map(|(s, &w)| w.then_some(s.lm + a * s.lattice))
            .collect());
    }
    let tokens: Vec<Vec<_>> = path
        .steps
        .iter()
        .map(|s| scorer.tokenize(&s.word))
        .collect::<Result<_>>()?;
    let mut out = vec![None; path.steps.len()];
    let mut state = scorer.begin();
    for (i, seg) in lattice.segments.iter().enumerate() {
        if wanted[i] {
            let next = tokens.get(i + 1).map(Vec::as_slice).unwrap_or(&[]);
            let mut scores = Vec::with_capacity(seg.candidates.len());
            for cand in &seg.candidates {
                let (after, lp) =
                    crate::lm::score_tokens(scorer, &state, &scorer.tokenize(&cand.word)?)?;
                let (_, right) = crate::lm::score_tokens(scorer, &after, next)?;
                scores.push(lp + right + a * cand.log_prob);
            }
            let chosen = scores[path.steps[i].candidate];
            out[i] = Some(chosen - log_sum_exp(&scores));
        }
        state = crate::lm::score_tokens(scorer, &state, &tokens[i])?.0;
    }
    Ok(out)
}

/// Most confident decoding of every code the wordbank does not know yet.
fn proposals<S: Scorer>(
    doc: &[CipherToken],
    lattice: &Lattice,
    path: &DecodePath,
    wb: &Wordbank,
    scorer: &S,
    cfg: &SelfLearnConfig,
) -> Result<Vec<Proposal>> {
    let unknown: Vec<Option<(Section, u64)>> = doc
        .iter()
        .zip(&lattice.segments)
        .zip(&path.steps)
        .map(|((token, seg), step)| {
            let key = wb.layout.locate(token)?;
            let fresh = wb.get(key.0, key.1).is_none()
                && seg.candidates[step.candidate].source != Source::Literal;
            fresh.then_some(key)
        })
        .collect();
    let wanted: Vec<bool> = unknown.iter().map(Option::is_some).collect();
    let conf = confidences(
        lattice,
        path,
        scorer,
        &wanted,
        cfg.decode.lattice_weight,
        cfg.confidence,
    )?;
    let mut best: HashMap<(Section, u64), Proposal> = HashMap::new();
    for (i, key) in unknown.iter().enumerate() {
        let (Some((section, position)), Some(score)) = (*key, conf[i]) else {
            continue;
        };
        let cand = &lattice.segments[i].candidates[path.steps[i].candidate];
        let entry = best.entry((section, position)).or_insert_with(|| Proposal {
            section,
            position,
            word: cand.base_word().to_string(),
            score: f64::NEG_INFINITY,
        });
        if score > entry.score {
            entry.score = score;
            entry.word = cand.base_word().to_string();
        }
    }
    let mut out: Vec<Proposal> = best.into_values().collect();
    out.sort_by(|x, y| {
        y.score
            .total_cmp(&x.score)
            .then(x.section.cmp(&y.section))
            .then(x.position.cmp(&y.position))
    });
    Ok(out)
}

/// Decodes, promotes the most confident decodings of unknown codes into the
/// wordbank, rebuilds the lattice and repeats. Stops after
/// `cfg.iterations` rounds or as soon as a round promotes nothing. Entries
/// are only ever added.
pub fn self_learn<S: Scorer>(
    doc: &[CipherToken],
    wordbank: &Wordbank,
    resources: &Resources<'_>,
    scorer: &S,
    cfg: &SelfLearnConfig,
) -> Result<SelfLearnOutcome> {
    cfg.validate()?;
    let mut wb = wordbank.clone();
    let mut rounds = Vec::new();
    let mut lattice = build_lattice(doc, &resources.inputs(&wb))?;
    let mut path = beam_decode(&lattice, scorer, &cfg.decode)?;
    for round in 1..=cfg.iterations {
        let props = proposals(doc, &lattice, &path, &wb, scorer, cfg)?;
        let quota = (props.len() as f64 * cfg.promote_fraction).ceil() as usize;
        let mut report = RoundReport {
            round,
            wordbank_size: wb.len(),
            unknown_codes: props.len(),
            promoted: 0,
            rejected: 0,
            combined: path.combined,
        };
        for p in props
            .iter()
            .take(quota)
            .filter(|p| p.score >= cfg.min_confidence)
        {
            match wb.insert_ordered(p.section, p.position, &p.word) {
                Ok(()) => report.promoted += 1,
                Err(v) => {
                    log::debug!("round {round}: skipped promotion: {v}");
                    report.rejected += 1;
                }
            }
        }
        log::info!(
            "self-learning round {round}: {} unknown codes, promoted {}, rejected {}",
            report.unknown_codes,
            report.promoted,
            report.rejected
        );
        let promoted = report.promoted;
        rounds.push(report);
        if promoted == 0 {
            break;
        }
        lattice = build_lattice(doc, &resources.inputs(&wb))?;
        path = beam_decode(&lattice, scorer, &cfg.decode)?;
    }
    Ok(SelfLearnOutcome {
        path,
        lattice,
        wordbank: wb,
        rounds,
    })
}
