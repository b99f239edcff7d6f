#![allow(dead_code)]

use std::path::PathBuf;

use bookcode::lattice::{Candidate, Lattice, Segment, Source};
use bookcode::lm::{Scorer, TokenId};
use bookcode::transcript::CipherToken;
use bookcode::Result;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Context-dependent pseudo-random scorer. Words split into two-letter
/// pieces so candidates share token prefixes; each log probability depends
/// on the seed, the previous two tokens and the token itself.
#[derive(Debug, Clone, Copy)]
pub struct MockScorer {
    pub seed: u64,
}

impl Scorer for MockScorer {
    type State = (TokenId, TokenId);

    fn tokenize(&self, word: &str) -> Result<Vec<TokenId>> {
        if word.is_empty() {
            return Err(bookcode::Error::Domain("empty word".into()));
        }
        Ok(word
            .as_bytes()
            .chunks(2)
            .map(|c| c.iter().fold(1u32, |acc, &b| acc * 131 + u32::from(b)))
            .collect())
    }

    fn begin(&self) -> Self::State {
        (0, 0)
    }

    fn extend(&self, state: &Self::State, token: TokenId) -> Result<(Self::State, f64)> {
        let h = splitmix(
            self.seed
                ^ splitmix(u64::from(state.0) << 32 | u64::from(state.1))
                ^ u64::from(token) << 7,
        );
        let lp = -(0.05 + 6.0 * (h >> 11) as f64 / (1u64 << 53) as f64);
        Ok(((state.1, token), lp))
    }
}

/// Scorer that gives every token the same log probability.
#[derive(Debug, Clone, Copy)]
pub struct FlatScorer(pub f64);

impl Scorer for FlatScorer {
    type State = ();
    fn tokenize(&self, _word: &str) -> Result<Vec<TokenId>> {
        Ok(vec![0])
    }
    fn begin(&self) {}
    fn extend(&self, _: &(), _: TokenId) -> Result<((), f64)> {
        Ok(((), self.0))
    }
}

const SYLLABLES: &[&str] = &[
    "ba", "be", "ca", "co", "da", "de", "ma", "mo", "ra", "re", "ta", "to",
];

fn random_word(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(1..=3);
    (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect()
}

/// Lattice of `1..=max_segments` segments with `1..=max_candidates`
/// distinct candidates each, probabilities normalized per segment.
pub fn random_lattice(rng: &mut ChaCha8Rng, max_segments: usize, max_candidates: usize) -> Lattice {
    let segments = (0..rng.gen_range(1..=max_segments))
        .map(|i| {
            let n = rng.gen_range(1..=max_candidates);
            let mut words: Vec<String> = Vec::new();
            while words.len() < n {
                let w = random_word(rng);
                if !words.contains(&w) {
                    words.push(w);
                }
            }
            let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
            let total: f64 = weights.iter().sum();
            Segment {
                token: CipherToken::table(200 + i as u32),
                candidates: words
                    .into_iter()
                    .zip(weights)
                    .map(|(w, p)| Candidate::new(w, p / total, Source::Interpolated))
                    .collect(),
            }
        })
        .collect();
    Lattice { segments }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Desk-scale corpora: one book split into disjoint parallel, held-out,
/// letter and language-model portions, plus the vendored word lists.
pub mod desk {
    use std::collections::HashMap;

    use bookcode::lattice::{read_word_list, LatticeConfig, ReferenceDict};
    use bookcode::pipeline::{frequency_ranks, text, Resources, SynthConfig};
    use bookcode::transcript::DictGeometry;
    use bookcode::NGramModel;

    pub const TABLE_SIZE: usize = 1000;

    pub struct Desk {
        pub parallel: Vec<String>,
        pub test: Vec<String>,
        pub letter: Vec<String>,
        pub lm_sentences: Vec<Vec<String>>,
        pub synth: SynthConfig,
        pub reference: ReferenceDict,
        pub common: Vec<String>,
        pub ranks: HashMap<String, usize>,
        pub config: LatticeConfig,
    }

    impl Desk {
        pub fn load() -> Self {
            let dir = super::data_dir();
            let book = std::fs::read_to_string(dir.join("moby_dick.txt")).unwrap();
            let chapters = text::split_chapters(&book);
            let tokens = |range: std::ops::Range<usize>| -> Vec<String> {
                chapters[range]
                    .iter()
                    .flat_map(|c| text::tokenize(c))
                    .collect()
            };
            let parallel = tokens(0..4);
            let test = tokens(9..10);
            let letter: Vec<String> = tokens(4..5).into_iter().take(300).collect();
            let lm_sentences = chapters[20..]
                .iter()
                .flat_map(|c| text::sentences(c))
                .collect();
            let freq = read_word_list(&dir.join("word_freq.txt")).unwrap();
            let key = read_word_list(&dir.join("key_dictionary.txt")).unwrap();
            let synth =
                SynthConfig::with_top_k(key, &freq, TABLE_SIZE, DictGeometry::default()).unwrap();
            Self {
                parallel,
                test,
                letter,
                lm_sentences,
                synth,
                reference: ReferenceDict::load(&dir.join("reference_dictionary.txt")).unwrap(),
                common: read_word_list(&dir.join("common_words.txt")).unwrap(),
                ranks: frequency_ranks(&freq),
                config: LatticeConfig::default(),
            }
        }

        pub fn resources(&self) -> Resources<'_> {
            Resources {
                reference: &self.reference,
                common_words: &self.common,
                config: &self.config,
            }
        }

        pub fn train_lm(&self) -> NGramModel {
            NGramModel::train(&self.lm_sentences, 3).unwrap()
        }
    }
}
