//! `bookcode` command-line driver.

mod scorer;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use bookcode::decoder::{
    beam_decode, exhaustive_decode, oracle_decode, unigram_decode, DecodeOptions, DecodePath,
};
use bookcode::lattice::{build_lattice, read_word_list, Lattice, LatticeConfig, ReferenceDict};
use bookcode::pipeline::{
    data_efficiency, evaluate, evaluate_full, frequency_ranks, self_learn, synth_encipher, text,
    write_report, Confidence, EfficiencySetup, Resources, SelfLearnConfig, SynthConfig,
};
use bookcode::transcript::{dict_index, parse_document, render_document, DictGeometry, TokenKind};
use bookcode::wordbank::{extract_wordbank, Layout, Wordbank};
use bookcode::NGramModel;
use clap::{Args, Parser, Subcommand, ValueEnum};
use scorer::{check_beta, AnyScorer, ScorerSpec};

#[derive(Parser)]
#[command(
    name = "bookcode",
    version,
    about = "Decipher dictionary-based book codes from known plaintext",
    args_override_self = true
)]
struct Cli {
    /// Seed for any randomized step. Every current command is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for lattice construction and per-size trials (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a transcription and list its tokens.
    Parse {
        file: PathBuf,
        /// Emit JSON instead of TSV.
        #[arg(long)]
        json: bool,
    },
    /// Extract a wordbank from a transcription and its aligned plaintext.
    Wordbank {
        #[arg(long)]
        cipher: PathBuf,
        /// Whitespace-separated plaintext, one word per cipher token ("." for "|").
        #[arg(long)]
        plain: PathBuf,
        #[command(flatten)]
        layout: LayoutArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the candidate lattice for a transcription.
    Lattice {
        #[arg(long)]
        cipher: PathBuf,
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract the best path through a lattice.
    Decode {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        decode: DecodeArgs,
        #[arg(long, value_enum, default_value_t = Method::Beam)]
        method: Method,
        /// Frequency-ranked word list for the unigram method.
        #[arg(long)]
        freq: Option<PathBuf>,
        /// Gold plaintext for the oracle method.
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode, promote confident decodings into the wordbank and repeat.
    SelfLearn {
        #[arg(long)]
        cipher: PathBuf,
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        decode: DecodeArgs,
        #[arg(long, default_value_t = 3)]
        iterations: usize,
        #[arg(long, default_value_t = 0.1)]
        promote_fraction: f64,
        /// Log confidence a decoding needs before it is promoted.
        #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
        min_confidence: f64,
        #[arg(long, value_enum, default_value_t = ConfidenceArg::Posterior)]
        confidence: ConfidenceArg,
        /// Where to write the grown wordbank.
        #[arg(long)]
        out_wordbank: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encipher plain text with a synthetic table and dictionary key.
    Synth {
        #[arg(long)]
        text: PathBuf,
        /// Chapter range, e.g. 0..4 (books split at CHAPTER headings).
        #[arg(long)]
        chapters: Option<ChapterRange>,
        /// Keep only the first N plaintext tokens.
        #[arg(long)]
        limit: Option<usize>,
        #[command(flatten)]
        key: KeyArgs,
        /// Transcription output (stdout when absent).
        #[arg(long)]
        out_cipher: Option<PathBuf>,
        /// Aligned plaintext, one token per line.
        #[arg(long)]
        out_gold: Option<PathBuf>,
        /// The complete key as a wordbank.
        #[arg(long)]
        out_key: Option<PathBuf>,
    },
    /// Wordbank size, coverage and accuracy as parallel data grows.
    DataEfficiency {
        #[arg(long)]
        book: PathBuf,
        #[arg(long, default_value = "0..4")]
        parallel_chapters: ChapterRange,
        #[arg(long, default_value = "9..10")]
        test_chapters: ChapterRange,
        /// Comma-separated parallel token counts.
        #[arg(long, value_delimiter = ',', default_value = "500,2000")]
        sizes: Vec<usize>,
        #[command(flatten)]
        key: KeyArgs,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        common_words: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        beta: f64,
        #[command(flatten)]
        decode: DecodeArgs,
        /// Also write the rows as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Score a decoded path against gold plaintext.
    Evaluate {
        #[arg(long)]
        path: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Lattice and wordbank for coverage and oracle figures.
        #[arg(long, requires = "wordbank")]
        lattice: Option<PathBuf>,
        #[arg(long, requires = "lattice")]
        wordbank: Option<PathBuf>,
    },
    /// Train an n-gram language model on plain text.
    TrainLm {
        #[arg(long)]
        text: PathBuf,
        #[arg(long)]
        chapters: Option<ChapterRange>,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConfidenceArg {
    /// The token's own LM + a * lattice score.
    Score,
    /// Local posterior of the chosen candidate.
    Posterior,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Beam,
    Exhaustive,
    Unigram,
    Oracle,
}

#[derive(Args)]
struct LayoutArgs {
    /// Inclusive table codes of the alphabetic word list, e.g. 160..1218.
    #[arg(long, default_value = "160..1218")]
    alpha_range: String,
    /// Estimated number of words in the shared dictionary.
    #[arg(long, default_value_t = 45_000)]
    dict_size: u64,
}

impl LayoutArgs {
    fn layout(&self) -> Result<Layout> {
        let (lo, hi) = self
            .alpha_range
            .split_once("..")
            .context("--alpha-range must look like LO..HI")?;
        let (lo, hi): (u32, u32) = (lo.parse()?, hi.parse()?);
        ensure!(lo <= hi, "--alpha-range is empty");
        Ok(Layout {
            geometry: DictGeometry::default(),
            alpha_range: (lo, hi),
            dict_size: self.dict_size,
        })
    }
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long)]
    wordbank: PathBuf,
    /// Modern dictionary, one lemma per line.
    #[arg(long)]
    reference: PathBuf,
    /// Fallback candidates for codes outside any anchor pair.
    #[arg(long)]
    common_words: PathBuf,
    /// Sharpness of the interpolation distribution.
    #[arg(long, default_value_t = 5.0)]
    beta: f64,
    /// Candidate for table codes below the alphabetic range.
    #[arg(long, default_value = "america")]
    proper_noun: String,
}

struct LatticeData {
    wordbank: Wordbank,
    reference: ReferenceDict,
    common: Vec<String>,
    config: LatticeConfig,
}

impl LatticeData {
    fn load(args: &LatticeArgs) -> Result<Self> {
        check_beta(args.beta)?;
        Ok(Self {
            wordbank: Wordbank::load(&args.wordbank)?,
            reference: ReferenceDict::load(&args.reference)?,
            common: read_word_list(&args.common_words)?,
            config: LatticeConfig {
                beta: args.beta,
                proper_noun: args.proper_noun.clone(),
            },
        })
    }

    fn resources(&self) -> Resources<'_> {
        Resources {
            reference: &self.reference,
            common_words: &self.common,
            config: &self.config,
        }
    }
}

#[derive(Args)]
struct SourceArgs {
    /// Lattice JSON written by `lattice`.
    #[arg(long, conflicts_with = "cipher")]
    lattice: Option<PathBuf>,
    /// Build the lattice from a transcription instead.
    #[arg(long, requires = "wordbank")]
    cipher: Option<PathBuf>,
    #[arg(long, requires_all = ["reference", "common_words"])]
    wordbank: Option<PathBuf>,
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    common_words: Option<PathBuf>,
    #[arg(long, default_value_t = 5.0)]
    beta: f64,
    #[arg(long, default_value = "america")]
    proper_noun: String,
}

impl SourceArgs {
    fn lattice(&self) -> Result<Lattice> {
        if let Some(path) = &self.lattice {
            let text = read(path)?;
            return Lattice::from_json(&text)
                .with_context(|| format!("reading lattice {}", path.display()));
        }
        let (Some(cipher), Some(wordbank), Some(reference), Some(common_words)) = (
            &self.cipher,
            &self.wordbank,
            &self.reference,
            &self.common_words,
        ) else {
            bail!(
                "give either --lattice or --cipher with --wordbank, --reference and --common-words"
            );
        };
        let data = LatticeData::load(&LatticeArgs {
            wordbank: wordbank.clone(),
            reference: reference.clone(),
            common_words: common_words.clone(),
            beta: self.beta,
            proper_noun: self.proper_noun.clone(),
        })?;
        let doc = parse_file(cipher)?;
        Ok(build_lattice(
            &doc,
            &data.resources().inputs(&data.wordbank),
        )?)
    }
}

#[derive(Args)]
struct DecodeArgs {
    /// `ngram:<model-file>` or `external:<command>`.
    #[arg(long)]
    scorer: Option<ScorerSpec>,
    #[arg(long, default_value_t = 4)]
    beam: usize,
    /// Weight `a` on lattice log probabilities.
    #[arg(long, default_value_t = 1.0)]
    lattice_weight: f64,
    /// Score every candidate separately instead of sharing token prefixes.
    #[arg(long)]
    no_trie: bool,
    /// Leave the runtime line out of the path footer.
    #[arg(long)]
    no_runtime: bool,
}

impl DecodeArgs {
    fn options(&self) -> Result<DecodeOptions> {
        ensure!(self.beam >= 1, "--beam must be at least 1");
        ensure!(
            self.lattice_weight > 0.0 && self.lattice_weight.is_finite(),
            "--lattice-weight must be positive"
        );
        Ok(DecodeOptions {
            beam: self.beam,
            lattice_weight: self.lattice_weight,
            use_trie: !self.no_trie,
        })
    }

    fn scorer(&self) -> Result<AnyScorer> {
        let spec = self.scorer.as_ref().context("--scorer is required")?;
        AnyScorer::open(spec)
    }
}

#[derive(Args)]
struct KeyArgs {
    /// Sorted key dictionary shared by the correspondents.
    #[arg(long)]
    key: PathBuf,
    /// Frequency-ranked word list; its top words form the code table.
    #[arg(long)]
    freq: PathBuf,
    #[arg(long, default_value_t = 1000)]
    table_size: usize,
}

impl KeyArgs {
    fn config(&self) -> Result<SynthConfig> {
        let key = read_word_list(&self.key)?;
        let freq = read_word_list(&self.freq)?;
        Ok(SynthConfig::with_top_k(
            key,
            &freq,
            self.table_size,
            DictGeometry::default(),
        )?)
    }
}

#[derive(Clone, Debug)]
struct ChapterRange(Range<usize>);

impl std::str::FromStr for ChapterRange {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("expected START..END or N, got {s:?}");
        match s.split_once("..") {
            Some((a, b)) => {
                let (a, b): (usize, usize) =
                    (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                if a >= b {
                    return Err(bad());
                }
                Ok(Self(a..b))
            }
            None => {
                let n: usize = s.parse().map_err(|_| bad())?;
                Ok(Self(n..n + 1))
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_file(path: &Path) -> Result<Vec<bookcode::CipherToken>> {
    parse_document(&read(path)?).with_context(|| format!("in {}", path.display()))
}

/// Plain-text tokens, optionally restricted to a chapter range.
fn text_tokens(path: &Path, chapters: Option<&ChapterRange>) -> Result<Vec<String>> {
    let book = read(path)?;
    let Some(range) = chapters else {
        return Ok(text::tokenize(&book));
    };
    let all = text::split_chapters(&book);
    ensure!(
        range.0.end <= all.len(),
        "{} has {} chapters, asked for {:?}",
        path.display(),
        all.len(),
        range.0
    );
    Ok(all[range.0.clone()]
        .iter()
        .flat_map(|c| text::tokenize(c))
        .collect())
}

fn read_tokens(path: &Path) -> Result<Vec<String>> {
    Ok(read(path)?.split_whitespace().map(str::to_string).collect())
}

/// Writes to the file if given, else to stdout.
fn output(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file =
                fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            let mut w = BufWriter::new(file);
            write(&mut w).with_context(|| format!("writing {}", p.display()))?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write(&mut w).context("writing to stdout")?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_path(path: &DecodePath, out: Option<&Path>, with_runtime: bool) -> Result<()> {
    output(out, |w| path.write_tsv(w, with_runtime))
}

fn run(cli: Cli) -> Result<()> {
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .context("configuring worker threads")?;
    }
    log::debug!("seed {}", cli.seed);
    match cli.command {
        Command::Parse { file, json } => {
            let doc = parse_file(&file)?;
            let geometry = DictGeometry::default();
            output(None, |w| {
                if json {
                    serde_json::to_writer_pretty(&mut *w, &doc)?;
                    return writeln!(w);
                }
                writeln!(w, "token\tkind\tindex")?;
                for t in &doc {
                    let (kind, index) = match &t.kind {
                        TokenKind::TableCode { code } => ("table", code.to_string()),
                        TokenKind::DictCode { page, row, column } => (
                            "dict",
                            dict_index(*page, *row, *column, &geometry)
                                .map_or("-".into(), |i| i.to_string()),
                        ),
                        TokenKind::Literal { .. } => ("literal", "-".into()),
                        TokenKind::SentenceEnd => ("sentence_end", "-".into()),
                    };
                    writeln!(w, "{t}\t{kind}\t{index}")?;
                }
                Ok(())
            })
        }
        Command::Wordbank {
            cipher,
            plain,
            layout,
            out,
        } => {
            let doc = parse_file(&cipher)?;
            let words = read_tokens(&plain)?;
            ensure!(
                doc.len() == words.len(),
                "{} has {} tokens but {} has {} words",
                cipher.display(),
                doc.len(),
                plain.display(),
                words.len()
            );
            let (wb, report) = extract_wordbank(
                doc.iter().zip(words.iter().map(String::as_str)),
                layout.layout()?,
            );
            for v in &report {
                log::warn!("{v}");
            }
            for v in wb.check_monotonic() {
                log::warn!("{v}");
            }
            output(out.as_deref(), |w| wb.write_tsv(w))
        }
        Command::Lattice {
            cipher,
            lattice,
            out,
        } => {
            let data = LatticeData::load(&lattice)?;
            let doc = parse_file(&cipher)?;
            let lat = build_lattice(&doc, &data.resources().inputs(&data.wordbank))?;
            let json = lat.to_json()?;
            output(out.as_deref(), |w| writeln!(w, "{json}"))
        }
        Command::Decode {
            source,
            decode,
            method,
            freq,
            gold,
            out,
        } => {
            let lattice = source.lattice()?;
            let path = match method {
                Method::Beam => beam_decode(&lattice, &decode.scorer()?, &decode.options()?)?,
                Method::Exhaustive => exhaustive_decode(
                    &lattice,
                    &decode.scorer()?,
                    decode.options()?.lattice_weight,
                )?,
                Method::Unigram => {
                    let freq = freq.context("--freq is required for the unigram method")?;
                    unigram_decode(&lattice, &frequency_ranks(&read_word_list(&freq)?))
                }
                Method::Oracle => {
                    let gold = gold.context("--gold is required for the oracle method")?;
                    let result = oracle_decode(&lattice, &read_tokens(&gold)?)?;
                    log::info!("gold in lattice for {:.1}% of words", 100.0 * result.rate());
                    result.path
                }
            };
            write_path(&path, out.as_deref(), !decode.no_runtime)
        }
        Command::SelfLearn {
            cipher,
            lattice,
            decode,
            iterations,
            promote_fraction,
            min_confidence,
            confidence,
            out_wordbank,
            out,
        } => {
            let data = LatticeData::load(&lattice)?;
            let doc = parse_file(&cipher)?;
            let cfg = SelfLearnConfig {
                iterations,
                promote_fraction,
                min_confidence,
                confidence: match confidence {
                    ConfidenceArg::Score => Confidence::Score,
                    ConfidenceArg::Posterior => Confidence::Posterior,
                },
                decode: decode.options()?,
            };
            let outcome = self_learn(
                &doc,
                &data.wordbank,
                &data.resources(),
                &decode.scorer()?,
                &cfg,
            )?;
            for r in &outcome.rounds {
                eprintln!("{}", serde_json::to_string(r)?);
            }
            if let Some(p) = out_wordbank {
                outcome.wordbank.save(&p)?;
            }
            write_path(&outcome.path, out.as_deref(), !decode.no_runtime)
        }
        Command::Synth {
            text,
            chapters,
            limit,
            key,
            out_cipher,
            out_gold,
            out_key,
        } => {
            let cfg = key.config()?;
            let tokens = text_tokens(&text, chapters.as_ref())?;
            let mut enc = synth_encipher(&tokens, &cfg);
            if let Some(n) = limit {
                enc = enc.prefix(n);
            }
            let rendered = render_document(&enc.tokens);
            output(out_cipher.as_deref(), |w| writeln!(w, "{rendered}"))?;
            if let Some(p) = out_gold {
                output(Some(&p), |w| {
                    for g in &enc.gold {
                        writeln!(w, "{g}")?;
                    }
                    Ok(())
                })?;
            }
            if let Some(p) = out_key {
                cfg.full_wordbank().save(&p)?;
            }
            Ok(())
        }
        Command::DataEfficiency {
            book,
            parallel_chapters,
            test_chapters,
            sizes,
            key,
            reference,
            common_words,
            beta,
            decode,
            json,
        } => {
            check_beta(beta)?;
            let synth = key.config()?;
            let parallel = text_tokens(&book, Some(&parallel_chapters))?;
            let test = text_tokens(&book, Some(&test_chapters))?;
            let reference = ReferenceDict::load(&reference)?;
            let common = read_word_list(&common_words)?;
            let config = LatticeConfig {
                beta,
                ..LatticeConfig::default()
            };
            let ranks = frequency_ranks(&read_word_list(&key.freq)?);
            let setup = EfficiencySetup {
                parallel: &parallel,
                test: &test,
                synth: &synth,
                resources: Resources {
                    reference: &reference,
                    common_words: &common,
                    config: &config,
                },
                ranks: &ranks,
            };
            let rows = data_efficiency(&sizes, &setup, &decode.scorer()?, &decode.options()?)?;
            if let Some(p) = json {
                output(Some(&p), |w| {
                    serde_json::to_writer_pretty(&mut *w, &rows)?;
                    writeln!(w)
                })?;
            }
            output(None, |w| write_report(&rows, w))
        }
        Command::Evaluate {
            path,
            gold,
            lattice,
            wordbank,
        } => {
            let decoded = DecodePath::load(&path)?;
            let gold = read_tokens(&gold)?;
            let metrics = match (lattice, wordbank) {
                (Some(l), Some(wb)) => {
                    let lat = Lattice::from_json(&read(&l)?)?;
                    evaluate_full(&decoded, &gold, &lat, &Wordbank::load(&wb)?)?
                }
                _ => evaluate(&decoded, &gold)?,
            };
            output(None, |w| {
                serde_json::to_writer_pretty(&mut *w, &metrics)?;
                writeln!(w)
            })
        }
        Command::TrainLm {
            text,
            chapters,
            order,
            out,
        } => {
            let tokens = text_tokens(&text, chapters.as_ref())?;
            let model = NGramModel::train(&text::split_sentences(&tokens), order)?;
            log::info!(
                "trained order-{order} model over {} words",
                model.vocab_size()
            );
            model.save(&out)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e)
            if e.chain()
                .filter_map(|c| c.downcast_ref::<io::Error>())
                .any(|io| io.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
