use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::metrics::{coverage, evaluate};
use super::synth::{synth_encipher, Enciphered, SynthConfig};
use super::Resources;
use crate::decoder::{beam_decode, oracle_decode, unigram_decode, DecodeOptions};
use crate::error::{Error, Result};
use crate::lattice::build_lattice;
use crate::lm::Scorer;
use crate::wordbank::extract_wordbank;

/// One row of the data-efficiency report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyRow {
    /// Parallel tokens actually used (after clamping).
    pub parallel_tokens: usize,
    pub wordbank_size: usize,
    pub coverage: f64,
    pub accuracy: f64,
    pub unigram_accuracy: f64,
    pub oracle_accuracy: f64,
    pub mean_candidates: f64,
    pub runtime_s: f64,
}

pub struct EfficiencySetup<'a> {
    /// Plaintext tokens whose encipherment serves as parallel data.
    pub parallel: &'a [String],
    /// Held-out plaintext tokens to decipher.
    pub test: &'a [String],
    pub synth: &'a SynthConfig,
    pub resources: Resources<'a>,
    /// Frequency ranks for the unigram baseline (1 = most frequent).
    pub ranks: &'a HashMap<String, usize>,
}

fn run_one<S: Scorer>(
    n: usize,
    parallel: &Enciphered,
    test: &Enciphered,
    setup: &EfficiencySetup<'_>,
    scorer: &S,
    opts: &DecodeOptions,
) -> Result<EfficiencyRow> {
    let started = Instant::now();
    let (wb, report) = extract_wordbank(parallel.prefix(n).pairs(), setup.synth.layout());
    if !report.is_empty() {
        log::warn!("N={n}: {} wordbank violations", report.len());
    }
    let lattice = build_lattice(&test.tokens, &setup.resources.inputs(&wb))?;
    let path = beam_decode(&lattice, scorer, opts)?;
    let unigram = unigram_decode(&lattice, setup.ranks);
    let oracle = oracle_decode(&lattice, &test.gold)?;
    Ok(EfficiencyRow {
        parallel_tokens: n,
        wordbank_size: wb.len(),
        coverage: coverage(&lattice, &wb),
        accuracy: evaluate(&path, &test.gold)?.token_accuracy,
        unigram_accuracy: evaluate(&unigram, &test.gold)?.token_accuracy,
        oracle_accuracy: evaluate(&oracle.path, &test.gold)?.token_accuracy,
        mean_candidates: lattice.mean_candidates(),
        runtime_s: started.elapsed().as_secs_f64(),
    })
}

/// For each size N, builds a wordbank from the first N enciphered parallel
/// tokens and deciphers the held-out text with it. Sizes beyond the parallel
/// text are clamped. Sizes run in parallel; rows come back in input order.
pub fn data_efficiency<S: Scorer>(
    sizes: &[usize],
    setup: &EfficiencySetup<'_>,
    scorer: &S,
    opts: &DecodeOptions,
) -> Result<Vec<EfficiencyRow>> {
    if setup.test.is_empty() {
        return Err(Error::domain("held-out text is empty"));
    }
    let parallel = synth_encipher(setup.parallel, setup.synth);
    let test = synth_encipher(setup.test, setup.synth);
    let clamped: Vec<usize> = sizes
        .iter()
        .map(|&n| {
            if n > parallel.tokens.len() {
                log::warn!(
                    "N={n} exceeds the {} parallel tokens; clamped",
                    parallel.tokens.len()
                );
            }
            n.min(parallel.tokens.len())
        })
        .collect();
    clamped
        .par_iter()
        .map(|&n| run_one(n, &parallel, &test, setup, scorer, opts))
        .collect()
}

/// Report columns: parallel tokens, wordbank size, coverage and accuracies
/// in percent.
pub fn write_report<W: Write>(rows: &[EfficiencyRow], mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "parallel_tokens\twordbank_size\tcoverage\taccuracy\tunigram_accuracy\toracle_accuracy"
    )?;
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{:.1}\t{:.1}\t{:.1}\t{:.1}",
            r.parallel_tokens,
            r.wordbank_size,
            100.0 * r.coverage,
            100.0 * r.accuracy,
            100.0 * r.unigram_accuracy,
            100.0 * r.oracle_accuracy
        )?;
    }
    Ok(())
}
