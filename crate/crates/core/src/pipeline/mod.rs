//! End-to-end runs: synthetic encipherment, evaluation, self-learning and
//! the data-efficiency experiment.

mod efficiency;
mod metrics;
mod self_learn;
mod synth;
pub mod text;

pub use efficiency::{data_efficiency, write_report, EfficiencyRow, EfficiencySetup};
pub use metrics::{coverage, evaluate, evaluate_full, Metrics};
pub use self_learn::{self_learn, Confidence, RoundReport, SelfLearnConfig, SelfLearnOutcome};
pub use synth::{synth_encipher, Enciphered, SynthConfig, TABLE_START};

use std::collections::HashMap;

use crate::lattice::{LatticeConfig, LatticeInputs, ReferenceDict};
use crate::wordbank::Wordbank;

/// Lattice inputs that stay fixed while the wordbank changes.
#[derive(Debug, Clone, Copy)]
pub struct Resources<'a> {
    pub reference: &'a ReferenceDict,
    pub common_words: &'a [String],
    pub config: &'a LatticeConfig,
}

impl<'a> Resources<'a> {
    pub fn inputs(&self, wordbank: &'a Wordbank) -> LatticeInputs<'a> {
        LatticeInputs {
            wordbank,
            reference: self.reference,
            common_words: self.common_words,
            config: self.config,
        }
    }
}

/// Rank table from a most-frequent-first word list (rank 1 = first line).
pub fn frequency_ranks(words: &[String]) -> HashMap<String, usize> {
    let mut ranks = HashMap::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        ranks.entry(w.clone()).or_insert(i + 1);
    }
    ranks
}
