use crate::error::{Error, Result};
use crate::lattice::Segment;
use crate::lm::{Scorer, TokenId};

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub token: TokenId,
    pub children: Vec<usize>,
    /// Candidates whose token sequence ends here.
    pub ends: Vec<usize>,
    /// Best candidate lattice log-prob anywhere in this subtree.
    pub max_lattice: f64,
}

/// Prefix tree over the token sequences of one segment's candidates.
/// Node 0 is the root and carries no token.
#[derive(Debug, Clone)]
pub struct SegmentTrie {
    pub(crate) nodes: Vec<Node>,
    candidates: usize,
}

impl SegmentTrie {
    pub fn build<S: Scorer>(segment: &Segment, scorer: &S) -> Result<Self> {
        let mut nodes = vec![Node {
            token: 0,
            children: Vec::new(),
            ends: Vec::new(),
            max_lattice: f64::NEG_INFINITY,
        }];
        for (ci, cand) in segment.candidates.iter().enumerate() {
            let tokens = scorer.tokenize(&cand.word)?;
            if tokens.is_empty() {
                return Err(Error::domain(format!(
                    "candidate {:?} has no tokens",
                    cand.word
                )));
            }
            let mut at = 0;
            nodes[0].max_lattice = nodes[0].max_lattice.max(cand.log_prob);
            for &t in &tokens {
                let next = nodes[at]
                    .children
                    .iter()
                    .copied()
                    .find(|&c| nodes[c].token == t);
                at = match next {
                    Some(c) => c,
                    None => {
                        nodes.push(Node {
                            token: t,
                            children: Vec::new(),
                            ends: Vec::new(),
                            max_lattice: f64::NEG_INFINITY,
                        });
                        let id = nodes.len() - 1;
                        nodes[at].children.push(id);
                        id
                    }
                };
                nodes[at].max_lattice = nodes[at].max_lattice.max(cand.log_prob);
            }
            nodes[at].ends.push(ci);
        }
        Ok(Self {
            nodes,
            candidates: segment.candidates.len(),
        })
    }

    /// Number of token nodes, excluding the root.
    pub fn node_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates
    }

    /// Token sequence leading to every candidate, recovered by walking the tree.
    pub fn paths(&self) -> Vec<(usize, Vec<TokenId>)> {
        let mut out = Vec::with_capacity(self.candidates);
        let mut stack = vec![(0usize, Vec::new())];
        while let Some((id, prefix)) = stack.pop() {
            for &c in &self.nodes[id].ends {
                out.push((c, prefix.clone()));
            }
            for &child in &self.nodes[id].children {
                let mut p = prefix.clone();
                p.push(self.nodes[child].token);
                stack.push((child, p));
            }
        }
        out.sort_by_key(|(c, _)| *c);
        out
    }
}
