//! Known cipher-to-plaintext mappings and the anchors they provide.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::ops::Bound::{Excluded, Unbounded};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inflect::{forms_for_marker, lemma_candidates};
use crate::transcript::{dict_index, CipherToken, DictGeometry, TokenKind};

/// Where a wordbank entry lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Section {
    Table,
    Dict,
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::Table => "table",
            Section::Dict => "dict",
        })
    }
}

/// Code-book layout shared by all entries of a wordbank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub geometry: DictGeometry,
    /// Inclusive table codes of the alphabetic word list.
    pub alpha_range: (u32, u32),
    /// Estimated number of words in the shared dictionary; bounds
    /// interpolation past the last dictionary anchor.
    pub dict_size: u64,
}

impl Default for Layout {
    fn default() -> Self {
        Self {
            geometry: DictGeometry::default(),
            alpha_range: (160, 1218),
            dict_size: 45_000,
        }
    }
}

impl Layout {
    /// Section and linear position of a code token; `None` for literals,
    /// sentence ends and front-matter dictionary pages.
    pub fn locate(&self, token: &CipherToken) -> Option<(Section, u64)> {
        match token.kind {
            TokenKind::TableCode { code } => Some((Section::Table, u64::from(code))),
            TokenKind::DictCode { page, row, column } => {
                dict_index(page, row, column, &self.geometry)
                    .ok()
                    .map(|i| (Section::Dict, i))
            }
            _ => None,
        }
    }

    fn in_alpha(&self, code: u64) -> bool {
        let (lo, hi) = self.alpha_range;
        code >= u64::from(lo) && code <= u64::from(hi)
    }
}

/// Lowercases, drops punctuation other than apostrophes and hyphens, and
/// collapses whitespace. Multi-word plaintexts survive as one string.
pub fn normalize_plaintext(text: &str) -> String {
    let cleaned: String = text
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace() || *c == '\'' || *c == '-')
        .flat_map(char::to_lowercase)
        .collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wordbank {
    pub layout: Layout,
    pub table_entries: BTreeMap<u64, String>,
    pub dict_entries: BTreeMap<u64, String>,
}

/// A problem found while building or checking a wordbank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// Same code seen with two plaintexts; the first was kept.
    Conflict {
        section: Section,
        position: u64,
        kept: String,
        rejected: String,
    },
    /// Adjacent entries out of alphabetical order.
    OutOfOrder {
        section: Section,
        lower: (u64, String),
        upper: (u64, String),
    },
    /// A pair whose token cannot be placed (literal or front-matter page).
    Unplaceable { token: String, plaintext: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Conflict {
                section,
                position,
                kept,
                rejected,
            } => write!(
                f,
                "{section} {position}: kept {kept:?}, rejected {rejected:?}"
            ),
            Violation::OutOfOrder {
                section,
                lower,
                upper,
            } => write!(
                f,
                "{section} {}={:?} sorts after {}={:?}",
                lower.0, lower.1, upper.0, upper.1
            ),
            Violation::Unplaceable { token, plaintext } => {
                write!(f, "cannot place {token} ({plaintext:?})")
            }
        }
    }
}

/// One end of an interpolation interval. `word` is `None` at the open ends
/// of the dictionary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub position: u64,
    pub word: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorPair {
    pub lower: Anchor,
    pub upper: Anchor,
    /// Relative position of the query between the anchors, in (0, 1).
    pub m: f64,
}

/// How a cipher token relates to the wordbank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Anchoring {
    Exact(String),
    Between(AnchorPair),
    /// Table code below the first table anchor (names and places).
    ProperNounSection,
    /// Table code outside the alphabetic word list, or above its last anchor.
    OutsideAlphabetic,
    /// Not a code, or a code that cannot be positioned.
    Unplaceable,
}

impl Wordbank {
    pub fn new(layout: Layout) -> Self {
        Self {
            layout,
            table_entries: BTreeMap::new(),
            dict_entries: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.table_entries.len() + self.dict_entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entries(&self, section: Section) -> &BTreeMap<u64, String> {
        match section {
            Section::Table => &self.table_entries,
            Section::Dict => &self.dict_entries,
        }
    }

    fn entries_mut(&mut self, section: Section) -> &mut BTreeMap<u64, String> {
        match section {
            Section::Table => &mut self.table_entries,
            Section::Dict => &mut self.dict_entries,
        }
    }

    pub fn get(&self, section: Section, position: u64) -> Option<&str> {
        self.entries(section).get(&position).map(String::as_str)
    }

    /// Known plaintext for a token, if any.
    pub fn lookup(&self, token: &CipherToken) -> Option<&str> {
        let (section, position) = self.layout.locate(token)?;
        self.get(section, position)
    }

    /// Inserts unless the code is already mapped; returns the conflict when
    /// the existing mapping differs.
    pub fn insert(&mut self, section: Section, position: u64, word: &str) -> Option<Violation> {
        let word = normalize_plaintext(word);
        match self.entries_mut(section).entry(position) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(word);
                None
            }
            std::collections::btree_map::Entry::Occupied(o) if *o.get() == word => None,
            std::collections::btree_map::Entry::Occupied(o) => Some(Violation::Conflict {
                section,
                position,
                kept: o.get().clone(),
                rejected: word,
            }),
        }
    }

    /// Inserts only if the entry keeps its neighbours in alphabetical order.
    pub fn insert_ordered(
        &mut self,
        section: Section,
        position: u64,
        word: &str,
    ) -> Result<(), Violation> {
        let word = normalize_plaintext(word);
        if let Some(existing) = self.get(section, position) {
            if existing == word {
                return Ok(());
            }
            return Err(Violation::Conflict {
                section,
                position,
                kept: existing.to_string(),
                rejected: word,
            });
        }
        let ordered = section == Section::Dict || self.layout.in_alpha(position);
        if ordered {
            let entries = self.entries(section);
            let in_scope = |p: &u64| section == Section::Dict || self.layout.in_alpha(*p);
            if let Some((&p, w)) = entries.range(..position).rev().find(|(p, _)| in_scope(p)) {
                if w.as_str() > word.as_str() {
                    return Err(Violation::OutOfOrder {
                        section,
                        lower: (p, w.clone()),
                        upper: (position, word),
                    });
                }
            }
            if let Some((&p, w)) = entries
                .range((Excluded(position), Unbounded))
                .find(|(p, _)| in_scope(p))
            {
                if word.as_str() > w.as_str() {
                    return Err(Violation::OutOfOrder {
                        section,
                        lower: (position, word),
                        upper: (p, w.clone()),
                    });
                }
            }
        }
        self.entries_mut(section).insert(position, word);
        Ok(())
    }

    /// Positions the query between its nearest known neighbours.
    pub fn anchors_for(&self, token: &CipherToken) -> Anchoring {
        let Some((section, position)) = self.layout.locate(token) else {
            return Anchoring::Unplaceable;
        };
        if let Some(word) = self.get(section, position) {
            return Anchoring::Exact(word.to_string());
        }
        match section {
            Section::Table => self.table_anchors(position),
            Section::Dict => self.dict_anchors(position),
        }
    }

    fn table_anchors(&self, position: u64) -> Anchoring {
        let (alpha_lo, alpha_hi) = self.layout.alpha_range;
        let (alpha_lo, alpha_hi) = (u64::from(alpha_lo), u64::from(alpha_hi));
        if position < alpha_lo {
            return Anchoring::ProperNounSection;
        }
        if position > alpha_hi {
            return Anchoring::OutsideAlphabetic;
        }
        let below = self.table_entries.range(alpha_lo..position).next_back();
        let above = self
            .table_entries
            .range((Excluded(position), std::ops::Bound::Included(alpha_hi)))
            .next();
        match (below, above) {
            (None, _) => Anchoring::ProperNounSection,
            (Some(_), None) => Anchoring::OutsideAlphabetic,
            (Some((&lo, lw)), Some((&hi, hw))) => Anchoring::Between(AnchorPair {
                lower: Anchor {
                    position: lo,
                    word: Some(lw.clone()),
                },
                upper: Anchor {
                    position: hi,
                    word: Some(hw.clone()),
                },
                m: (position - lo) as f64 / (hi - lo) as f64,
            }),
        }
    }

    fn dict_anchors(&self, position: u64) -> Anchoring {
        let lower = match self.dict_entries.range(..position).next_back() {
            Some((&p, w)) => Anchor {
                position: p,
                word: Some(w.clone()),
            },
            None => Anchor {
                position: 0,
                word: None,
            },
        };
        let upper = match self
            .dict_entries
            .range((Excluded(position), Unbounded))
            .next()
        {
            Some((&p, w)) => Anchor {
                position: p,
                word: Some(w.clone()),
            },
            None => Anchor {
                position: self.layout.dict_size.max(position) + 1,
                word: None,
            },
        };
        let m = (position - lower.position) as f64 / (upper.position - lower.position) as f64;
        Anchoring::Between(AnchorPair { lower, upper, m })
    }

    /// Adjacent entries whose plaintexts are out of alphabetical order.
    pub fn check_monotonic(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let table = self
            .table_entries
            .iter()
            .filter(|(p, _)| self.layout.in_alpha(**p));
        for (section, entries) in [
            (Section::Table, table.collect::<Vec<_>>()),
            (Section::Dict, self.dict_entries.iter().collect()),
        ] {
            for pair in entries.windows(2) {
                let ((&p0, w0), (&p1, w1)) = (pair[0], pair[1]);
                if w0 > w1 {
                    out.push(Violation::OutOfOrder {
                        section,
                        lower: (p0, w0.clone()),
                        upper: (p1, w1.clone()),
                    });
                }
            }
        }
        out
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let l = &self.layout;
        writeln!(
            out,
            "# alpha_range\t{}\t{}",
            l.alpha_range.0, l.alpha_range.1
        )?;
        writeln!(
            out,
            "# geometry\t{}\t{}\t{}",
            l.geometry.rows_per_column, l.geometry.columns, l.geometry.first_content_page
        )?;
        writeln!(out, "# dict_size\t{}", l.dict_size)?;
        writeln!(out, "section\tposition\tplaintext")?;
        for section in [Section::Table, Section::Dict] {
            for (p, w) in self.entries(section) {
                writeln!(out, "{section}\t{p}\t{w}")?;
            }
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(input: R, origin: &Path) -> Result<Self> {
        let format_err = |line: usize, message: String| Error::Format {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut wb = Wordbank::new(Layout::default());
        let mut rows = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let num = |s: &str| -> Result<u64> {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| format_err(line_no, format!("expected a number, found {s:?}")))
            };
            if let Some(key) = fields[0].strip_prefix("# ") {
                match (key, fields.len()) {
                    ("alpha_range", 3) => {
                        wb.layout.alpha_range = (num(fields[1])? as u32, num(fields[2])? as u32)
                    }
                    ("geometry", 4) => {
                        wb.layout.geometry = DictGeometry {
                            rows_per_column: num(fields[1])? as u32,
                            columns: num(fields[2])? as u32,
                            first_content_page: num(fields[3])? as u32,
                        };
                        wb.layout
                            .geometry
                            .validate()
                            .map_err(|e| format_err(line_no, e.to_string()))?;
                    }
                    ("dict_size", 2) => wb.layout.dict_size = num(fields[1])?,
                    _ => {}
                }
                continue;
            }
            if line.starts_with('#') || fields[0] == "section" {
                continue;
            }
            if fields.len() != 3 {
                return Err(format_err(
                    line_no,
                    format!("expected 3 columns, found {}", fields.len()),
                ));
            }
            let section = match fields[0] {
                "table" => Section::Table,
                "dict" => Section::Dict,
                other => return Err(format_err(line_no, format!("unknown section {other:?}"))),
            };
            if fields[2].is_empty() {
                return Err(format_err(line_no, "empty plaintext".into()));
            }
            rows.push((line_no, section, num(fields[1])?, fields[2].to_string()));
        }
        for (line_no, section, position, word) in rows {
            if let Some(v) = wb.insert(section, position, &word) {
                return Err(format_err(line_no, v.to_string()));
            }
        }
        Ok(wb)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_tsv(std::io::BufReader::new(file), path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_tsv(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Dictionary form behind a plaintext written with a suffix marker, e.g.
/// "being" under `+ing` is recorded as "be". Falls back to the plaintext.
pub fn lemma_for_marked(form: &str, marker: &str) -> String {
    let mut guesses = lemma_candidates(form, |l| {
        forms_for_marker(l, Some(marker)).iter().any(|f| f == form)
    });
    guesses.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    guesses
        .into_iter()
        .next()
        .unwrap_or_else(|| form.to_string())
}

/// Builds a wordbank from aligned (cipher token, plaintext) pairs. Plaintexts
/// of suffixed codes are reduced to their lemma.
///
/// Literals and sentence ends are skipped; conflicting and unplaceable pairs
/// are reported and the first mapping wins.
pub fn extract_wordbank<'a, I>(pairs: I, layout: Layout) -> (Wordbank, Vec<Violation>)
where
    I: IntoIterator<Item = (&'a CipherToken, &'a str)>,
{
    let mut wb = Wordbank::new(layout);
    let mut report = Vec::new();
    for (token, plaintext) in pairs {
        if !token.is_code() {
            continue;
        }
        match layout.locate(token) {
            Some((section, position)) => {
                let stored = match token.suffix.as_deref() {
                    Some(marker) => lemma_for_marked(&normalize_plaintext(plaintext), marker),
                    None => plaintext.to_string(),
                };
                if let Some(v) = wb.insert(section, position, &stored) {
                    report.push(v);
                }
            }
            None => report.push(Violation::Unplaceable {
                token: token.to_string(),
                plaintext: plaintext.to_string(),
            }),
        }
    }
    (wb, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Wordbank {
        let tokens = [
            CipherToken::table(160),
            CipherToken::table(172),
            CipherToken::table(229),
            CipherToken::table(13),
            CipherToken::table(1249),
            CipherToken::dict(7, 24, 1),
            CipherToken::dict(15, 21, 1),
            CipherToken::dict(29, 29, 1),
        ];
        let words = [
            "a",
            "and",
            "be",
            "Wilkinson",
            "policy",
            "acquisition",
            "after",
            "answer",
        ];
        let (wb, report) = extract_wordbank(tokens.iter().zip(words), Layout::default());
        assert!(report.is_empty());
        wb
    }

    #[test]
    fn extracts_table_and_dict_entries() {
        let pairs = [
            (CipherToken::table(172), "and"),
            (CipherToken::dict(29, 29, 1), "answer"),
        ];
        let (wb, report) = extract_wordbank(pairs.iter().map(|(t, w)| (t, *w)), Layout::default());
        assert!(report.is_empty());
        assert_eq!(wb.table_entries, BTreeMap::from([(172, "and".to_string())]));
        assert_eq!(
            wb.dict_entries,
            BTreeMap::from([(1305, "answer".to_string())])
        );

        let (empty, report) = extract_wordbank(std::iter::empty(), Layout::default());
        assert!(empty.is_empty() && report.is_empty());
    }

    #[test]
    fn conflicts_keep_first_mapping() {
        let pairs = [
            (CipherToken::table(172), "and"),
            (CipherToken::table(172), "And"),
            (CipherToken::table(172), "an"),
            (CipherToken::dict(4, 6, 1), "me"),
            (CipherToken::literal("natchez"), "natchez"),
        ];
        let (wb, report) = extract_wordbank(pairs.iter().map(|(t, w)| (t, *w)), Layout::default());
        assert_eq!(wb.get(Section::Table, 172), Some("and"));
        assert_eq!(report.len(), 2);
        assert!(matches!(&report[0], Violation::Conflict { rejected, .. } if rejected == "an"));
        assert!(matches!(&report[1], Violation::Unplaceable { .. }));
    }

    #[test]
    fn monotonic_check() {
        let mut wb = Wordbank::new(Layout::default());
        wb.insert(Section::Dict, 24, "acquisition");
        wb.insert(Section::Dict, 485, "after");
        assert!(wb.check_monotonic().is_empty());

        let mut bad = Wordbank::new(Layout::default());
        bad.insert(Section::Dict, 24, "zebra");
        bad.insert(Section::Dict, 485, "after");
        let v = bad.check_monotonic();
        assert_eq!(v.len(), 1);
        assert!(
            matches!(&v[0], Violation::OutOfOrder { lower, upper, .. } if lower.0 == 24 && upper.0 == 485)
        );

        assert!(Wordbank::new(Layout::default())
            .check_monotonic()
            .is_empty());
        // Proper nouns and trailing common words are outside the ordered list.
        assert!(sample().check_monotonic().is_empty());
    }

    #[test]
    fn interpolates_between_table_anchors() {
        let wb = sample();
        match wb.anchors_for(&CipherToken::table(163)) {
            Anchoring::Between(pair) => {
                assert_eq!(pair.lower.position, 160);
                assert_eq!(pair.lower.word.as_deref(), Some("a"));
                assert_eq!(pair.upper.position, 172);
                assert_eq!(pair.upper.word.as_deref(), Some("and"));
                assert!((pair.m - 0.25).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            wb.anchors_for(&CipherToken::table(172)),
            Anchoring::Exact("and".into())
        );
        assert_eq!(
            wb.anchors_for(&CipherToken::table(90)),
            Anchoring::ProperNounSection
        );
        assert_eq!(
            wb.anchors_for(&CipherToken::table(13)),
            Anchoring::Exact("wilkinson".into())
        );
        assert_eq!(
            wb.anchors_for(&CipherToken::table(1235)),
            Anchoring::OutsideAlphabetic
        );
        assert_eq!(
            wb.anchors_for(&CipherToken::table(700)),
            Anchoring::OutsideAlphabetic
        );
        assert_eq!(
            wb.anchors_for(&CipherToken::literal("x")),
            Anchoring::Unplaceable
        );
        assert_eq!(
            wb.anchors_for(&CipherToken::dict(4, 6, 1)),
            Anchoring::Unplaceable
        );
    }

    #[test]
    fn dictionary_ends_are_open() {
        let wb = sample();
        match wb.anchors_for(&CipherToken::dict(7, 10, 1)) {
            Anchoring::Between(pair) => {
                assert_eq!(
                    pair.lower,
                    Anchor {
                        position: 0,
                        word: None
                    }
                );
                assert_eq!(pair.upper.position, 24);
                assert!((pair.m - 10.0 / 24.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        match wb.anchors_for(&CipherToken::dict(100, 1, 1)) {
            Anchoring::Between(pair) => {
                assert_eq!(pair.lower.word.as_deref(), Some("answer"));
                assert_eq!(
                    pair.upper,
                    Anchor {
                        position: 45_001,
                        word: None
                    }
                );
                assert!(pair.m > 0.0 && pair.m < 1.0);
            }
            other => panic!("{other:?}"),
        }
        let empty = Wordbank::new(Layout::default());
        assert!(matches!(
            empty.anchors_for(&CipherToken::dict(8, 1, 1)),
            Anchoring::Between(_)
        ));
        assert_eq!(
            empty.anchors_for(&CipherToken::table(200)),
            Anchoring::ProperNounSection
        );
    }

    #[test]
    fn ordered_insertion_rejects_violations() {
        let mut wb = sample();
        assert!(wb.insert_ordered(Section::Table, 165, "able").is_ok());
        assert!(matches!(
            wb.insert_ordered(Section::Table, 166, "zoo"),
            Err(Violation::OutOfOrder { .. })
        ));
        assert!(matches!(
            wb.insert_ordered(Section::Table, 172, "an"),
            Err(Violation::Conflict { .. })
        ));
        // Outside the alphabetic list anything goes.
        assert!(wb.insert_ordered(Section::Table, 1300, "aardvark").is_ok());
        assert!(wb.insert_ordered(Section::Dict, 1000, "against").is_ok());
        assert!(wb.insert_ordered(Section::Dict, 1001, "zulu").is_err());
        assert!(wb.check_monotonic().is_empty());
    }

    #[test]
    fn normalization() {
        assert_eq!(
            normalize_plaintext("  North   Carolina, "),
            "north carolina"
        );
        assert_eq!(normalize_plaintext("Don't!"), "don't");
    }

    #[test]
    fn tsv_round_trip() {
        let mut wb = sample();
        wb.layout.alpha_range = (160, 1159);
        wb.layout.dict_size = 37_000;
        wb.insert(Section::Table, 90, "north carolina");
        let mut buf = Vec::new();
        wb.write_tsv(&mut buf).unwrap();
        let back = Wordbank::read_tsv(buf.as_slice(), Path::new("mem")).unwrap();
        assert_eq!(back, wb);
    }

    #[test]
    fn tsv_errors_name_the_line() {
        let text = "section\tposition\tplaintext\ntable\t160\ta\ndict\tx\tfoo\n";
        match Wordbank::read_tsv(text.as_bytes(), Path::new("wb.tsv")) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let text = "table\t160\ta\ntable\t160\tb\n";
        assert!(Wordbank::read_tsv(text.as_bytes(), Path::new("wb.tsv")).is_err());
    }
}
