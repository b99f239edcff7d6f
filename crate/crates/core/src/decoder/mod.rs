//! Best-path extraction from a lattice.

mod baselines;
mod beam;
mod trie;

pub use baselines::{
    exhaustive_decode, oracle_decode, unigram_decode, OracleResult, EXHAUSTIVE_LIMIT,
};
pub use beam::{beam_decode, DecodeOptions};
pub use trie::SegmentTrie;

use std::cmp::Ordering;
use std::io::{BufRead, Write};
use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};

/// One decoded segment.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeStep {
    pub cipher: String,
    pub word: String,
    /// Index of the chosen candidate within its segment.
    pub candidate: usize,
    pub lm: f64,
    pub lattice: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodePath {
    pub steps: Vec<DecodeStep>,
    pub lm_total: f64,
    pub lattice_total: f64,
    pub combined: f64,
    pub beam: Option<usize>,
    pub lattice_weight: f64,
    pub runtime: Duration,
}

impl DecodePath {
    pub fn empty(beam: Option<usize>, lattice_weight: f64) -> Self {
        Self {
            steps: Vec::new(),
            lm_total: 0.0,
            lattice_total: 0.0,
            combined: 0.0,
            beam,
            lattice_weight,
            runtime: Duration::ZERO,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn words(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.word.as_str()).collect()
    }

    /// Writes the path as TSV. The runtime footer line is optional so that
    /// repeated runs can produce identical bytes.
    pub fn write_tsv<W: Write>(&self, mut out: W, with_runtime: bool) -> std::io::Result<()> {
        writeln!(out, "cipher\tword\tlm\tlattice")?;
        for s in &self.steps {
            writeln!(out, "{}\t{}\t{}\t{}", s.cipher, s.word, s.lm, s.lattice)?;
        }
        writeln!(out, "# lm_total\t{}", self.lm_total)?;
        writeln!(out, "# lattice_total\t{}", self.lattice_total)?;
        writeln!(out, "# combined\t{}", self.combined)?;
        match self.beam {
            Some(b) => writeln!(out, "# beam\t{b}")?,
            None => writeln!(out, "# beam\tnone")?,
        }
        writeln!(out, "# a\t{}", self.lattice_weight)?;
        if with_runtime {
            writeln!(out, "# runtime_s\t{:.3}", self.runtime.as_secs_f64())?;
        }
        Ok(())
    }

    pub fn to_tsv(&self, with_runtime: bool) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf, with_runtime)
            .expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }

    pub fn read_tsv<R: BufRead>(input: R, origin: &Path) -> Result<Self> {
        let mut path = Self::empty(None, 1.0);
        let fail = |line: usize, message: String| Error::Format {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let num = |line: usize, s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| fail(line, format!("invalid number {s:?}")))
        };
        for (i, line) in input.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.is_empty() || line == "cipher\tword\tlm\tlattice" {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# ") {
                let (key, value) = rest.split_once('\t').unwrap_or((rest, ""));
                match key {
                    "lm_total" => path.lm_total = num(line_no, value)?,
                    "lattice_total" => path.lattice_total = num(line_no, value)?,
                    "combined" => path.combined = num(line_no, value)?,
                    "a" => path.lattice_weight = num(line_no, value)?,
                    "beam" => {
                        path.beam = match value {
                            "none" => None,
                            v => Some(
                                v.parse()
                                    .map_err(|_| fail(line_no, format!("invalid beam {v:?}")))?,
                            ),
                        }
                    }
                    "runtime_s" => {
                        path.runtime = Duration::from_secs_f64(num(line_no, value)?.max(0.0))
                    }
                    _ => {}
                }
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(fail(
                    line_no,
                    format!("expected 4 columns, found {}", fields.len()),
                ));
            }
            path.steps.push(DecodeStep {
                cipher: fields[0].to_string(),
                word: fields[1].to_string(),
                candidate: 0,
                lm: num(line_no, fields[2])?,
                lattice: num(line_no, fields[3])?,
            });
        }
        Ok(path)
    }

    pub fn load(file: &Path) -> Result<Self> {
        let f = std::fs::File::open(file).map_err(|e| Error::io(file, e))?;
        Self::read_tsv(std::io::BufReader::new(f), file)
    }
}

/// Orders complete or aligned partial paths: higher score first, then the
/// lexicographically smaller word sequence.
pub(crate) fn better(score_a: f64, words_a: &[&str], score_b: f64, words_b: &[&str]) -> Ordering {
    match score_b.partial_cmp(&score_a).unwrap_or(Ordering::Equal) {
        Ordering::Equal => words_a.cmp(words_b),
        o => o,
    }
}
