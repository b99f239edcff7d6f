use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use super::trie::SegmentTrie;
use super::{better, DecodePath, DecodeStep};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Segment};
use crate::lm::{Scorer, TokenId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeOptions {
    /// Hypotheses kept at each segment boundary.
    pub beam: usize,
    /// Weight `a` on the lattice log probability.
    pub lattice_weight: f64,
    /// Share LM calls across candidates with common token prefixes.
    pub use_trie: bool,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        Self {
            beam: 4,
            lattice_weight: 1.0,
            use_trie: true,
        }
    }
}

impl DecodeOptions {
    pub fn new(beam: usize, lattice_weight: f64) -> Self {
        Self {
            beam,
            lattice_weight,
            ..Self::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.beam == 0 {
            return Err(Error::domain("beam must be at least 1"));
        }
        check_weight(self.lattice_weight)
    }
}

pub(crate) fn check_weight(a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "lattice weight must be positive, got {a}"
        )))
    }
}

/// Back-pointer chain shared between hypotheses.
struct Trace<'a> {
    word: &'a str,
    candidate: usize,
    lm: f64,
    prev: Option<Rc<Trace<'a>>>,
}

fn words<'a>(mut at: Option<&Rc<Trace<'a>>>) -> Vec<&'a str> {
    let mut out = Vec::new();
    while let Some(t) = at {
        out.push(t.word);
        at = t.prev.as_ref();
    }
    out.reverse();
    out
}

struct Hyp<'a, St> {
    state: St,
    lm: f64,
    lattice: f64,
    score: f64,
    trace: Option<Rc<Trace<'a>>>,
}

impl<St> Hyp<'_, St> {
    fn rank(&self, other: &Self) -> Ordering {
        match other
            .score
            .partial_cmp(&self.score)
            .unwrap_or(Ordering::Equal)
        {
            Ordering::Equal => {
                let (a, b) = (words(self.trace.as_ref()), words(other.trace.as_ref()));
                better(self.score, &a, other.score, &b)
            }
            o => o,
        }
    }
}

/// Heap entry whose maximum is the worst hypothesis.
struct Worst<'a, St>(Hyp<'a, St>);

impl<St> PartialEq for Worst<'_, St> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<St> Eq for Worst<'_, St> {}
impl<St> PartialOrd for Worst<'_, St> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<St> Ord for Worst<'_, St> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.rank(&other.0)
    }
}

/// Keeps the best `cap` hypotheses seen so far.
struct Collector<'a, St> {
    cap: usize,
    heap: BinaryHeap<Worst<'a, St>>,
}

impl<'a, St> Collector<'a, St> {
    fn new(cap: usize) -> Self {
        Self {
            cap,
            heap: BinaryHeap::with_capacity(cap.min(4096)),
        }
    }

    /// Score a hypothesis must reach to have any chance of being kept.
    fn floor(&self) -> f64 {
        if self.heap.len() < self.cap {
            f64::NEG_INFINITY
        } else {
            self.heap.peek().map_or(f64::NEG_INFINITY, |w| w.0.score)
        }
    }

    fn offer(&mut self, hyp: Hyp<'a, St>) {
        if self.heap.len() < self.cap {
            self.heap.push(Worst(hyp));
            return;
        }
        let replace = self
            .heap
            .peek()
            .is_some_and(|worst| hyp.rank(&worst.0) == Ordering::Less);
        if replace {
            self.heap.pop();
            self.heap.push(Worst(hyp));
        }
    }

    /// Best first.
    fn into_sorted(self) -> Vec<Hyp<'a, St>> {
        self.heap
            .into_sorted_vec()
            .into_iter()
            .map(|w| w.0)
            .collect()
    }
}

struct SegmentSearch<'a, 's, S: Scorer> {
    scorer: &'s S,
    segment: &'a Segment,
    a: f64,
    collector: Collector<'a, S::State>,
    calls: usize,
}

impl<'a, S: Scorer> SegmentSearch<'a, '_, S> {
    fn complete(
        &mut self,
        parent: &Hyp<'a, S::State>,
        ci: usize,
        state: &S::State,
        lm: f64,
        seg_lm: f64,
    ) {
        let cand = &self.segment.candidates[ci];
        let lattice = parent.lattice + cand.log_prob;
        let score = lm + self.a * lattice;
        if score < self.collector.floor() {
            return;
        }
        self.collector.offer(Hyp {
            state: state.clone(),
            lm,
            lattice,
            score,
            trace: Some(Rc::new(Trace {
                word: &cand.word,
                candidate: ci,
                lm: seg_lm,
                prev: parent.trace.clone(),
            })),
        });
    }

    fn bound(&self, parent: &Hyp<'a, S::State>, lm: f64, best_lattice: f64) -> f64 {
        lm + self.a * (parent.lattice + best_lattice)
    }

    fn walk(
        &mut self,
        trie: &SegmentTrie,
        node: usize,
        parent: &Hyp<'a, S::State>,
        state: &S::State,
        lm: f64,
        seg_lm: f64,
    ) -> Result<()> {
        let n = &trie.nodes[node];
        for &ci in &n.ends {
            self.complete(parent, ci, state, lm, seg_lm);
        }
        if n.children.is_empty() {
            return Ok(());
        }
        // Log probabilities are never positive, so the current LM total
        // already bounds every extension.
        let floor = self.collector.floor();
        let mut live: Vec<usize> = n
            .children
            .iter()
            .copied()
            .filter(|&c| self.bound(parent, lm, trie.nodes[c].max_lattice) >= floor)
            .collect();
        if live.is_empty() {
            return Ok(());
        }
        live.sort_by(|&x, &y| {
            trie.nodes[y]
                .max_lattice
                .total_cmp(&trie.nodes[x].max_lattice)
        });
        let tokens: Vec<TokenId> = live.iter().map(|&c| trie.nodes[c].token).collect();
        let extended = self.scorer.extend_many(state, &tokens)?;
        self.calls += tokens.len();
        for (&child, (next, lp)) in live.iter().zip(extended) {
            let child_lm = lm + lp;
            if self.bound(parent, child_lm, trie.nodes[child].max_lattice) < self.collector.floor()
            {
                continue;
            }
            self.walk(trie, child, parent, &next, child_lm, seg_lm + lp)?;
        }
        Ok(())
    }

    fn flat(&mut self, tokens: &[Vec<TokenId>], parent: &Hyp<'a, S::State>) -> Result<()> {
        'cands: for (ci, toks) in tokens.iter().enumerate() {
            let best = self.segment.candidates[ci].log_prob;
            let mut state = parent.state.clone();
            let mut lm = parent.lm;
            let mut seg_lm = 0.0;
            for &t in toks {
                if self.bound(parent, lm, best) < self.collector.floor() {
                    continue 'cands;
                }
                let (next, lp) = self.scorer.extend(&state, t)?;
                self.calls += 1;
                state = next;
                lm += lp;
                seg_lm += lp;
            }
            self.complete(parent, ci, &state, lm, seg_lm);
        }
        Ok(())
    }
}

/// Beam search with hypotheses aligned at segment boundaries.
///
/// Within a segment each parent hypothesis walks the segment's token trie.
/// A branch is abandoned as soon as its LM score so far plus the best lattice
/// score reachable below it cannot beat the current `beam`-th best
/// completion, so pruning never discards a path that would have been kept.
pub fn beam_decode<S: Scorer>(
    lattice: &Lattice,
    scorer: &S,
    opts: &DecodeOptions,
) -> Result<DecodePath> {
    opts.validate()?;
    let started = Instant::now();
    let a = opts.lattice_weight;
    let mut beam = vec![Hyp {
        state: scorer.begin(),
        lm: 0.0,
        lattice: 0.0,
        score: 0.0,
        trace: None,
    }];
    let mut calls = 0usize;
    for (si, segment) in lattice.segments.iter().enumerate() {
        if segment.candidates.is_empty() {
            return Err(Error::domain(format!("segment {si} has no candidates")));
        }
        let mut search = SegmentSearch {
            scorer,
            segment,
            a,
            collector: Collector::new(opts.beam),
            calls: 0,
        };
        if opts.use_trie {
            let trie = SegmentTrie::build(segment, scorer)?;
            for parent in &beam {
                search.walk(&trie, 0, parent, &parent.state, parent.lm, 0.0)?;
            }
        } else {
            let tokens = segment
                .candidates
                .iter()
                .map(|c| scorer.tokenize(&c.word))
                .collect::<Result<Vec<_>>>()?;
            for parent in &beam {
                search.flat(&tokens, parent)?;
            }
        }
        calls += search.calls;
        beam = search.collector.into_sorted();
    }
    log::debug!(
        "beam {} decoded {} segments with {calls} LM extensions",
        opts.beam,
        lattice.len()
    );

    let best = beam.into_iter().next().expect("beam is never empty");
    let mut steps = Vec::with_capacity(lattice.len());
    let mut at = best.trace.as_ref();
    while let Some(t) = at {
        steps.push((t.candidate, t.lm));
        at = t.prev.as_ref();
    }
    steps.reverse();
    let steps = steps
        .into_iter()
        .zip(&lattice.segments)
        .map(|((ci, lm), seg)| DecodeStep {
            cipher: seg.token.to_string(),
            word: seg.candidates[ci].word.clone(),
            candidate: ci,
            lm,
            lattice: seg.candidates[ci].log_prob,
        })
        .collect();
    Ok(DecodePath {
        steps,
        lm_total: best.lm,
        lattice_total: best.lattice,
        combined: best.score,
        beam: Some(opts.beam),
        lattice_weight: a,
        runtime: started.elapsed(),
    })
}
