//! Incremental language-model scoring.
//!
//! The decoder only needs three things from a language model: split a word
//! into model tokens, start a context, and extend a context by one token
//! while reporting that token's conditional log probability.

mod external;
mod ngram;

pub use external::{ExternalScorer, ExternalState};
pub use ngram::{NGramModel, NGramState, BOS, EOS, UNK};

use crate::error::Result;

pub type TokenId = u32;

pub trait Scorer: Sync {
    /// Context after consuming some token sequence. Equal sequences must
    /// yield states that score identically.
    type State: Clone + Send + Sync;

    /// Model tokens for a (possibly multi-word) lattice candidate.
    fn tokenize(&self, word: &str) -> Result<Vec<TokenId>>;

    fn begin(&self) -> Self::State;

    /// Natural-log probability of `token` after `state`, and the new state.
    fn extend(&self, state: &Self::State, token: TokenId) -> Result<(Self::State, f64)>;

    /// Scores several alternative next tokens from one state. Remote scorers
    /// override this to send a single batched request.
    fn extend_many(
        &self,
        state: &Self::State,
        tokens: &[TokenId],
    ) -> Result<Vec<(Self::State, f64)>> {
        tokens.iter().map(|&t| self.extend(state, t)).collect()
    }
}

/// Log probability of a whole token sequence, accumulated one token at a time.
pub fn score_tokens<S: Scorer>(
    scorer: &S,
    state: &S::State,
    tokens: &[TokenId],
) -> Result<(S::State, f64)> {
    let mut state = state.clone();
    let mut total = 0.0;
    for &t in tokens {
        let (next, lp) = scorer.extend(&state, t)?;
        state = next;
        total += lp;
    }
    Ok((state, total))
}

impl<S: Scorer> Scorer for &S {
    type State = S::State;

    fn tokenize(&self, word: &str) -> Result<Vec<TokenId>> {
        (**self).tokenize(word)
    }

    fn begin(&self) -> Self::State {
        (**self).begin()
    }

    fn extend(&self, state: &Self::State, token: TokenId) -> Result<(Self::State, f64)> {
        (**self).extend(state, token)
    }

    fn extend_many(
        &self,
        state: &Self::State,
        tokens: &[TokenId],
    ) -> Result<Vec<(Self::State, f64)>> {
        (**self).extend_many(state, tokens)
    }
}
