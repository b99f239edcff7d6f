//! Interpolated Kneser-Ney n-gram model.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::{Scorer, TokenId};
use crate::error::{Error, Result};
use crate::lattice::SENTENCE_END_WORD;

pub const UNK: TokenId = 0;
pub const BOS: TokenId = 1;
pub const EOS: TokenId = 2;

const FORMAT: &str = "bookcode-ngram";
const VERSION: u32 = 1;
const DEFAULT_DISCOUNT: f64 = 0.75;

type Gram = Box<[TokenId]>;

/// Per-context totals at one level: (sum of counts, distinct followers).
#[derive(Debug, Clone, Copy)]
struct ContextStats {
    total: f64,
    types: f64,
}

#[derive(Debug, Clone)]
struct Level {
    counts: HashMap<Gram, u32>,
    contexts: HashMap<Gram, ContextStats>,
}

impl Level {
    fn new(counts: HashMap<Gram, u32>) -> Self {
        let mut contexts: HashMap<Gram, ContextStats> = HashMap::new();
        for (gram, &count) in &counts {
            let ctx: Gram = gram[..gram.len() - 1].into();
            let stats = contexts.entry(ctx).or_insert(ContextStats {
                total: 0.0,
                types: 0.0,
            });
            stats.total += f64::from(count);
            stats.types += 1.0;
        }
        Self { counts, contexts }
    }
}

/// Smoothed n-gram model over a closed vocabulary plus `<unk>`.
#[derive(Debug, Clone)]
pub struct NGramModel {
    order: usize,
    discount: f64,
    vocab: Vec<String>,
    index: HashMap<String, TokenId>,
    /// `levels[k]` holds (k+1)-grams.
    levels: Vec<Level>,
}

/// Last `order - 1` tokens of context.
pub type NGramState = SmallVec<[TokenId; 4]>;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    order: usize,
    discount: f64,
    vocab: Vec<String>,
    /// One list per order: (token ids, count used at that order).
    levels: Vec<Vec<(Vec<TokenId>, u32)>>,
}

impl NGramModel {
    /// Trains on tokenized sentences (already lowercased words, no boundary
    /// markers). Sentence boundaries are added internally.
    pub fn train<S: AsRef<[String]>>(sentences: &[S], order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::domain("n-gram order must be >= 1"));
        }
        if sentences.iter().all(|s| s.as_ref().is_empty()) {
            return Err(Error::domain("training corpus is empty"));
        }
        let mut vocab = vec!["<unk>".to_string(), "<s>".to_string(), "</s>".to_string()];
        let mut index: HashMap<String, TokenId> = vocab
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as TokenId))
            .collect();

        let mut raw: Vec<HashMap<Gram, u32>> = vec![HashMap::new(); order + 1];
        for sentence in sentences {
            let words = sentence.as_ref();
            if words.is_empty() {
                continue;
            }
            let mut ids = Vec::with_capacity(words.len() + 2);
            ids.push(BOS);
            for w in words {
                let next = index.len() as TokenId;
                let id = *index.entry(w.clone()).or_insert_with(|| {
                    vocab.push(w.clone());
                    next
                });
                ids.push(id);
            }
            ids.push(EOS);
            // Raw counts up to order + 1 so continuation counts of the top
            // order's lower neighbours are available.
            for n in 1..=order.min(ids.len()) {
                for gram in ids.windows(n) {
                    if gram[n - 1] == BOS {
                        continue;
                    }
                    *raw[n - 1].entry(gram.into()).or_insert(0) += 1;
                }
            }
        }

        let mut levels = Vec::with_capacity(order);
        for n in 1..=order {
            let counts = if n == order {
                raw[n - 1].clone()
            } else {
                // Continuation counts: distinct left neighbours, except for
                // grams that start a sentence, which keep raw counts.
                let mut left: HashMap<Gram, HashSet<TokenId>> = HashMap::new();
                for gram in raw[n].keys() {
                    left.entry(gram[1..].into()).or_default().insert(gram[0]);
                }
                raw[n - 1]
                    .iter()
                    .map(|(gram, &c)| {
                        let count = if gram[0] == BOS {
                            c
                        } else {
                            left.get(gram).map_or(0, |s| s.len() as u32)
                        };
                        (gram.clone(), count)
                    })
                    .filter(|(_, c)| *c > 0)
                    .collect()
            };
            levels.push(Level::new(counts));
        }
        Ok(Self {
            order,
            discount: DEFAULT_DISCOUNT,
            vocab,
            index,
            levels,
        })
    }

    /// Splits running text into lowercase word sentences and trains.
    pub fn train_text(text: &str, order: usize) -> Result<Self> {
        let sentences = crate::pipeline::text::sentences(text);
        Self::train(&sentences, order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// Predictable vocabulary size: everything but `<s>`.
    pub fn vocab_size(&self) -> usize {
        self.vocab.len() - 1
    }

    /// Ids of all predictable tokens.
    pub fn predictable(&self) -> impl Iterator<Item = TokenId> + '_ {
        (0..self.vocab.len() as TokenId).filter(|&t| t != BOS)
    }

    pub fn token_id(&self, word: &str) -> TokenId {
        if word == SENTENCE_END_WORD {
            return EOS;
        }
        self.index.get(word).copied().unwrap_or(UNK)
    }

    pub fn word(&self, id: TokenId) -> Option<&str> {
        self.vocab.get(id as usize).map(String::as_str)
    }

    /// Conditional probability of `token` given up to `order - 1` context tokens.
    pub fn prob(&self, context: &[TokenId], token: TokenId) -> f64 {
        let keep = context.len().min(self.order - 1);
        self.prob_at(&context[context.len() - keep..], token)
    }

    fn prob_at(&self, context: &[TokenId], token: TokenId) -> f64 {
        let n = context.len() + 1;
        let level = &self.levels[n - 1];
        let lower = if n == 1 {
            1.0 / self.vocab_size() as f64
        } else {
            self.prob_at(&context[1..], token)
        };
        let Some(stats) = level.contexts.get(context) else {
            return lower;
        };
        let mut key: SmallVec<[TokenId; 8]> = SmallVec::from_slice(context);
        key.push(token);
        let count = level.counts.get(key.as_slice()).copied().unwrap_or(0);
        let discounted = (f64::from(count) - self.discount).max(0.0) / stats.total;
        let backoff = self.discount * stats.types / stats.total;
        discounted + backoff * lower
    }

    /// Per-token perplexity over sentences, counting each sentence end.
    pub fn perplexity<S: AsRef<[String]>>(&self, sentences: &[S]) -> f64 {
        let mut total = 0.0;
        let mut tokens = 0usize;
        for sentence in sentences {
            let mut state = self.begin();
            let words = sentence.as_ref();
            let ids = words
                .iter()
                .map(|w| self.token_id(w))
                .chain(std::iter::once(EOS));
            for id in ids {
                let (next, lp) = self.step(&state, id);
                total += lp;
                tokens += 1;
                state = next;
            }
        }
        if tokens == 0 {
            return 1.0;
        }
        (-total / tokens as f64).exp()
    }

    fn step(&self, state: &NGramState, token: TokenId) -> (NGramState, f64) {
        let lp = self.prob(state, token).ln();
        let mut next = if token == EOS {
            self.begin()
        } else {
            let mut s = state.clone();
            s.push(token);
            s
        };
        let keep = self.order - 1;
        if next.len() > keep {
            let drop = next.len() - keep;
            next.drain(..drop);
        }
        (next, lp)
    }

    pub fn to_json(&self) -> Result<String> {
        let levels = self
            .levels
            .iter()
            .map(|level| {
                let mut grams: Vec<(Vec<TokenId>, u32)> =
                    level.counts.iter().map(|(g, &c)| (g.to_vec(), c)).collect();
                grams.sort_unstable();
                grams
            })
            .collect();
        let file = ModelFile {
            format: FORMAT.to_string(),
            version: VERSION,
            order: self.order,
            discount: self.discount,
            vocab: self.vocab.clone(),
            levels,
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(Error::domain(format!(
                "unsupported model format {} v{}",
                file.format, file.version
            )));
        }
        if file.order < 1 || file.levels.len() != file.order || file.vocab.len() < 3 {
            return Err(Error::domain("inconsistent n-gram model file"));
        }
        let vocab_len = file.vocab.len() as TokenId;
        let mut levels = Vec::with_capacity(file.order);
        for (k, grams) in file.levels.into_iter().enumerate() {
            let mut counts = HashMap::with_capacity(grams.len());
            for (gram, count) in grams {
                if gram.len() != k + 1 || gram.iter().any(|&t| t >= vocab_len) || count == 0 {
                    return Err(Error::domain(format!("malformed {}-gram {gram:?}", k + 1)));
                }
                counts.insert(gram.into_boxed_slice(), count);
            }
            levels.push(Level::new(counts));
        }
        let index = file
            .vocab
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as TokenId))
            .collect();
        Ok(Self {
            order: file.order,
            discount: file.discount,
            vocab: file.vocab,
            index,
            levels,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

impl Scorer for NGramModel {
    type State = NGramState;

    fn tokenize(&self, word: &str) -> Result<Vec<TokenId>> {
        let ids: Vec<TokenId> = word.split_whitespace().map(|w| self.token_id(w)).collect();
        if ids.is_empty() {
            return Err(Error::domain("cannot tokenize an empty word"));
        }
        Ok(ids)
    }

    fn begin(&self) -> NGramState {
        let mut s = NGramState::new();
        if self.order > 1 {
            s.push(BOS);
        }
        s
    }

    fn extend(&self, state: &NGramState, token: TokenId) -> Result<(NGramState, f64)> {
        Ok(self.step(state, token))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(text: &str) -> Vec<Vec<String>> {
        text.split('.')
            .map(|s| s.split_whitespace().map(str::to_string).collect::<Vec<_>>())
            .filter(|s| !s.is_empty())
            .collect()
    }

    #[test]
    fn rejects_bad_input() {
        assert!(NGramModel::train(&corpus("a b ."), 0).is_err());
        assert!(NGramModel::train::<Vec<String>>(&[], 2).is_err());
        let m = NGramModel::train(&corpus("a b ."), 2).unwrap();
        assert!(m.tokenize("").is_err());
        assert!(m.tokenize("   ").is_err());
    }

    #[test]
    fn identity_tokenization() {
        let m = NGramModel::train(&corpus("i am very sorry ."), 2).unwrap();
        assert_eq!(m.tokenize("sorry").unwrap().len(), 1);
        assert_eq!(m.word(m.tokenize("sorry").unwrap()[0]), Some("sorry"));
        assert_eq!(m.tokenize("north carolina").unwrap(), vec![UNK, UNK]);
        assert_eq!(m.tokenize(".").unwrap(), vec![EOS]);
    }

    #[test]
    fn unigram_normalizes() {
        let m = NGramModel::train(&corpus("the cat saw the dog ."), 1).unwrap();
        let total: f64 = m.predictable().map(|t| m.prob(&[], t)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(m.prob(&[], m.token_id("the")) > m.prob(&[], m.token_id("cat")));
        assert!(m.prob(&[], UNK) > 0.0);
    }

    #[test]
    fn sentence_end_resets_context() {
        let m = NGramModel::train(&corpus("a b . a b . a c ."), 3).unwrap();
        let s = m.begin();
        let (s, _) = m.extend(&s, m.token_id("a")).unwrap();
        let (s, _) = m.extend(&s, m.token_id("b")).unwrap();
        assert_eq!(s.len(), 2);
        let (s, _) = m.extend(&s, EOS).unwrap();
        assert_eq!(s, m.begin());
    }

    #[test]
    fn json_round_trip() {
        let m = NGramModel::train(&corpus("a b . a b . a c . c a b ."), 3).unwrap();
        let back = NGramModel::from_json(&m.to_json().unwrap()).unwrap();
        for ctx in [&[][..], &[BOS][..], &[BOS, 3][..], &[3, 4][..]] {
            for t in m.predictable() {
                assert_eq!(m.prob(ctx, t), back.prob(ctx, t));
            }
        }
        assert!(NGramModel::from_json(
            r#"{"format":"other","version":1,"order":1,"discount":0.75,"vocab":[],"levels":[]}"#
        )
        .is_err());
    }
}
