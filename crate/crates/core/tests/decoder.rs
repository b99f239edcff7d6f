mod common;

use std::collections::HashMap;

use bookcode::decoder::{
    beam_decode, exhaustive_decode, oracle_decode, unigram_decode, DecodeOptions, DecodePath,
    SegmentTrie,
};
use bookcode::lattice::{Candidate, Lattice, Segment, Source};
use bookcode::lm::{Scorer, TokenId};
use bookcode::transcript::CipherToken;
use bookcode::{Error, Result};
use common::{random_lattice, FlatScorer, MockScorer};
use proptest::prelude::*;

fn segment(code: u32, cands: &[(&str, f64)]) -> Segment {
    Segment {
        token: CipherToken::table(code),
        candidates: cands
            .iter()
            .map(|(w, p)| Candidate::new(*w, *p, Source::Interpolated))
            .collect(),
    }
}

fn recomputed(path: &DecodePath) -> f64 {
    let lm: f64 = path.steps.iter().map(|s| s.lm).sum();
    let lat: f64 = path.steps.iter().map(|s| s.lattice).sum();
    lm + path.lattice_weight * lat
}

fn scaled(lattice: &Lattice, c: f64) -> Lattice {
    let mut out = lattice.clone();
    for seg in &mut out.segments {
        for cand in &mut seg.candidates {
            cand.log_prob *= c;
        }
    }
    out
}

/// Bigram table over single-letter words.
struct TableScorer(HashMap<(char, char), f64>);

impl Scorer for TableScorer {
    type State = char;
    fn tokenize(&self, word: &str) -> Result<Vec<TokenId>> {
        Ok(vec![word.chars().next().unwrap() as TokenId])
    }
    fn begin(&self) -> char {
        '^'
    }
    fn extend(&self, state: &char, token: TokenId) -> Result<(char, f64)> {
        let c = char::from_u32(token).unwrap();
        Ok((c, self.0[&(*state, c)]))
    }
}

#[test]
fn empty_lattice_gives_empty_path() {
    let lattice = Lattice::default();
    let beam = beam_decode(&lattice, &MockScorer { seed: 1 }, &DecodeOptions::default()).unwrap();
    assert!(beam.is_empty());
    assert_eq!(beam.combined, 0.0);
    let ex = exhaustive_decode(&lattice, &MockScorer { seed: 1 }, 1.0).unwrap();
    assert!(ex.is_empty());
    assert_eq!(ex.combined, 0.0);
}

#[test]
fn singleton_lattice_is_its_only_path() {
    let lattice = Lattice {
        segments: vec![
            segment(200, &[("whale", 1.0)]),
            segment(201, &[("ship", 1.0)]),
        ],
    };
    let scorer = MockScorer { seed: 3 };
    let path = beam_decode(&lattice, &scorer, &DecodeOptions::new(1, 0.5)).unwrap();
    assert_eq!(path.words(), ["whale", "ship"]);
    let expected = bookcode::lm::score_tokens(
        &scorer,
        &scorer.begin(),
        &[
            scorer.tokenize("whale").unwrap(),
            scorer.tokenize("ship").unwrap(),
        ]
        .concat(),
    )
    .unwrap()
    .1;
    assert!((path.lm_total - expected).abs() < 1e-12);
    assert_eq!(path.combined, path.lm_total + 0.5 * 0.0);
}

#[test]
fn lattice_score_decides_under_flat_lm() {
    let lattice = Lattice {
        segments: vec![segment(200, &[("y", 0.1), ("x", 0.9)])],
    };
    let path = exhaustive_decode(&lattice, &FlatScorer(-2.0), 1.0).unwrap();
    assert_eq!(path.words(), ["x"]);
    assert_eq!(path.steps[0].candidate, 1);
}

#[test]
fn two_by_two_hand_computed() {
    // Paths: pq = ln.6 + ln.5 + (-1 - 3) = -4.8039
    //        pr = ln.6 + ln.5 + (-1 - 0.5) = -2.3039
    //        sq = ln.4 + ln.5 + (-2 - 0.2) = -3.5094
    //        sr = ln.4 + ln.5 + (-2 - 1)   = -4.3094
    let lattice = Lattice {
        segments: vec![
            segment(200, &[("p", 0.6), ("s", 0.4)]),
            segment(201, &[("q", 0.5), ("r", 0.5)]),
        ],
    };
    let scorer = TableScorer(HashMap::from([
        (('^', 'p'), -1.0),
        (('^', 's'), -2.0),
        (('p', 'q'), -3.0),
        (('p', 'r'), -0.5),
        (('s', 'q'), -0.2),
        (('s', 'r'), -1.0),
    ]));
    let path = exhaustive_decode(&lattice, &scorer, 1.0).unwrap();
    assert_eq!(path.words(), ["p", "r"]);
    let want = 0.6f64.ln() + 0.5f64.ln() - 1.5;
    assert!((path.combined - want).abs() < 1e-12);
    // Beam 1 commits to "p" after the first segment and happens to agree.
    let greedy = beam_decode(&lattice, &scorer, &DecodeOptions::new(1, 1.0)).unwrap();
    assert_eq!(greedy.words(), ["p", "r"]);
}

#[test]
fn ties_prefer_the_lexicographically_smaller_path() {
    let lattice = Lattice {
        segments: vec![
            segment(200, &[("b", 0.5), ("a", 0.5)]),
            segment(201, &[("d", 0.5), ("c", 0.5)]),
        ],
    };
    for beam in [1, 2, 10] {
        let p = beam_decode(&lattice, &FlatScorer(-1.0), &DecodeOptions::new(beam, 1.0)).unwrap();
        assert_eq!(p.words(), ["a", "c"]);
    }
    let p = exhaustive_decode(&lattice, &FlatScorer(-1.0), 1.0).unwrap();
    assert_eq!(p.words(), ["a", "c"]);
}

#[test]
fn exhaustive_refuses_large_lattices() {
    let cands: Vec<(String, f64)> = (0..10).map(|i| (format!("w{i}"), 0.1)).collect();
    let refs: Vec<(&str, f64)> = cands.iter().map(|(w, p)| (w.as_str(), *p)).collect();
    let lattice = Lattice {
        segments: (0..7).map(|i| segment(200 + i, &refs)).collect(),
    };
    match exhaustive_decode(&lattice, &FlatScorer(-1.0), 1.0) {
        Err(Error::TooLarge { paths, limit }) => {
            assert_eq!(paths, 10_000_000);
            assert_eq!(limit, 1_000_000);
        }
        other => panic!("expected refusal, got {other:?}"),
    }
}

#[test]
fn invalid_options_rejected() {
    let lattice = Lattice {
        segments: vec![segment(200, &[("a", 1.0)])],
    };
    assert!(beam_decode(&lattice, &FlatScorer(-1.0), &DecodeOptions::new(0, 1.0)).is_err());
    assert!(beam_decode(&lattice, &FlatScorer(-1.0), &DecodeOptions::new(1, 0.0)).is_err());
    assert!(exhaustive_decode(&lattice, &FlatScorer(-1.0), -1.0).is_err());
}

#[test]
fn trie_covers_every_candidate() {
    let mut rng = common::rng(17);
    let scorer = MockScorer { seed: 0 };
    for _ in 0..50 {
        let lattice = random_lattice(&mut rng, 3, 8);
        for seg in &lattice.segments {
            let trie = SegmentTrie::build(seg, &scorer).unwrap();
            let paths = trie.paths();
            assert_eq!(paths.len(), seg.candidates.len());
            for (ci, tokens) in paths {
                assert_eq!(tokens, scorer.tokenize(&seg.candidates[ci].word).unwrap());
            }
            let total: usize = seg
                .candidates
                .iter()
                .map(|c| scorer.tokenize(&c.word).unwrap().len())
                .sum();
            assert!(trie.node_count() <= total);
        }
    }
}

#[test]
fn unigram_picks_most_frequent() {
    let ranks = HashMap::from([("being".to_string(), 150), ("begin".to_string(), 900)]);
    let lattice = Lattice {
        segments: vec![
            segment(200, &[("begin", 0.7), ("being", 0.3)]),
            segment(201, &[("zzz", 0.2), ("yyy", 0.8)]),
            segment(202, &[("qqq", 0.5), ("ppp", 0.5)]),
        ],
    };
    let path = unigram_decode(&lattice, &ranks);
    assert_eq!(path.words(), ["being", "yyy", "ppp"]);
}

#[test]
fn oracle_counts_in_lattice_gold() {
    let segs: Vec<Segment> = (0..10)
        .map(|i| segment(200 + i, &[("a", 0.6), ("b", 0.4)]))
        .collect();
    let lattice = Lattice { segments: segs };
    let mut gold = vec!["b"; 10];
    let full = oracle_decode(&lattice, &gold).unwrap();
    assert_eq!(full.rate(), 1.0);
    assert!(full.path.words().iter().all(|w| *w == "b"));
    gold[4] = "c";
    let miss = oracle_decode(&lattice, &gold).unwrap();
    assert!((miss.rate() - 0.9).abs() < 1e-12);
    assert_eq!(miss.path.words()[4], "a");
    assert!(oracle_decode(&lattice, &gold[..9]).is_err());
}

#[test]
fn decode_path_file_round_trip() {
    let mut rng = common::rng(23);
    let lattice = random_lattice(&mut rng, 6, 5);
    let path = beam_decode(&lattice, &MockScorer { seed: 2 }, &DecodeOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("path.tsv");
    std::fs::write(&file, path.to_tsv(true)).unwrap();
    let back = DecodePath::load(&file).unwrap();
    assert_eq!(back.words(), path.words());
    assert_eq!(back.combined.to_bits(), path.combined.to_bits());
    assert_eq!(back.beam, Some(4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unlimited_beam_equals_exhaustive(seed in any::<u64>(), a in 0.1f64..4.0) {
        let mut rng = common::rng(seed);
        let lattice = random_lattice(&mut rng, 6, 5);
        let scorer = MockScorer { seed };
        let ex = exhaustive_decode(&lattice, &scorer, a).unwrap();
        let beam = beam_decode(&lattice, &scorer, &DecodeOptions::new(1_000_000, a)).unwrap();
        prop_assert_eq!(beam.words(), ex.words());
        prop_assert_eq!(beam.combined.to_bits(), ex.combined.to_bits());
    }

    #[test]
    fn reported_score_is_additive(seed in any::<u64>(), beam in 1usize..20, a in 0.1f64..4.0) {
        let mut rng = common::rng(seed);
        let lattice = random_lattice(&mut rng, 8, 6);
        let path = beam_decode(&lattice, &MockScorer { seed }, &DecodeOptions::new(beam, a)).unwrap();
        prop_assert!((path.combined - recomputed(&path)).abs() < 1e-9);
        prop_assert!((path.combined - (path.lm_total + a * path.lattice_total)).abs() < 1e-12);
    }

    #[test]
    fn trie_pruning_is_lossless(seed in any::<u64>(), beam in 1usize..8) {
        let mut rng = common::rng(seed);
        let lattice = random_lattice(&mut rng, 6, 8);
        let scorer = MockScorer { seed };
        let with = beam_decode(&lattice, &scorer, &DecodeOptions { beam, lattice_weight: 1.0, use_trie: true }).unwrap();
        let without = beam_decode(&lattice, &scorer, &DecodeOptions { beam, lattice_weight: 1.0, use_trie: false }).unwrap();
        prop_assert_eq!(with.words(), without.words());
        prop_assert_eq!(with.combined.to_bits(), without.combined.to_bits());
    }

    #[test]
    fn lattice_weight_scaling_keeps_argmax(seed in any::<u64>(), beam in 1usize..8) {
        let mut rng = common::rng(seed);
        let lattice = random_lattice(&mut rng, 6, 5);
        let scorer = MockScorer { seed };
        let base = beam_decode(&lattice, &scorer, &DecodeOptions::new(beam, 1.0)).unwrap();
        let doubled = beam_decode(&scaled(&lattice, 2.0), &scorer, &DecodeOptions::new(beam, 0.5)).unwrap();
        prop_assert_eq!(base.words(), doubled.words());
    }
}
