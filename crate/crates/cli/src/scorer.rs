use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use bookcode::lm::{ExternalScorer, ExternalState, NGramModel, NGramState, Scorer, TokenId};
use bookcode::Result;

/// `ngram:<model-file>` or `external:<command>`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScorerSpec {
    NGram(PathBuf),
    External(String),
}

impl FromStr for ScorerSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            Some(("ngram", path)) if !path.is_empty() => Ok(Self::NGram(path.into())),
            Some(("external", cmd)) if !cmd.trim().is_empty() => {
                Ok(Self::External(cmd.to_string()))
            }
            _ => Err(format!(
                "expected ngram:<model-file> or external:<command>, got {s:?}"
            )),
        }
    }
}

pub enum AnyScorer {
    NGram(NGramModel),
    External(ExternalScorer),
}

#[derive(Debug, Clone)]
pub enum AnyState {
    NGram(NGramState),
    External(ExternalState),
}

impl AnyScorer {
    pub fn open(spec: &ScorerSpec) -> anyhow::Result<Self> {
        Ok(match spec {
            ScorerSpec::NGram(path) => Self::NGram(
                NGramModel::load(path)
                    .with_context(|| format!("loading language model {}", path.display()))?,
            ),
            ScorerSpec::External(cmd) => Self::External(
                ExternalScorer::spawn(cmd).with_context(|| format!("starting scorer {cmd:?}"))?,
            ),
        })
    }
}

fn mismatch() -> ! {
    unreachable!("scorer state from a different scorer")
}

impl Scorer for AnyScorer {
    type State = AnyState;

    fn tokenize(&self, word: &str) -> Result<Vec<TokenId>> {
        match self {
            Self::NGram(m) => m.tokenize(word),
            Self::External(e) => e.tokenize(word),
        }
    }

    fn begin(&self) -> AnyState {
        match self {
            Self::NGram(m) => AnyState::NGram(m.begin()),
            Self::External(e) => AnyState::External(e.begin()),
        }
    }

    fn extend(&self, state: &AnyState, token: TokenId) -> Result<(AnyState, f64)> {
        match (self, state) {
            (Self::NGram(m), AnyState::NGram(s)) => {
                m.extend(s, token).map(|(s, lp)| (AnyState::NGram(s), lp))
            }
            (Self::External(e), AnyState::External(s)) => e
                .extend(s, token)
                .map(|(s, lp)| (AnyState::External(s), lp)),
            _ => mismatch(),
        }
    }

    fn extend_many(&self, state: &AnyState, tokens: &[TokenId]) -> Result<Vec<(AnyState, f64)>> {
        match (self, state) {
            (Self::NGram(m), AnyState::NGram(s)) => Ok(m
                .extend_many(s, tokens)?
                .into_iter()
                .map(|(s, lp)| (AnyState::NGram(s), lp))
                .collect()),
            (Self::External(e), AnyState::External(s)) => Ok(e
                .extend_many(s, tokens)?
                .into_iter()
                .map(|(s, lp)| (AnyState::External(s), lp))
                .collect()),
            _ => mismatch(),
        }
    }
}

pub fn check_beta(beta: f64) -> anyhow::Result<()> {
    if !(beta >= 2.0 && beta.is_finite()) {
        bail!("--beta must be at least 2, got {beta}");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        assert_eq!(
            "ngram:lm.json".parse(),
            Ok(ScorerSpec::NGram("lm.json".into()))
        );
        assert_eq!(
            "external:python3 serve.py --model gpt2".parse(),
            Ok(ScorerSpec::External("python3 serve.py --model gpt2".into()))
        );
        assert!("ngram:".parse::<ScorerSpec>().is_err());
        assert!("gpt2".parse::<ScorerSpec>().is_err());
    }
}
