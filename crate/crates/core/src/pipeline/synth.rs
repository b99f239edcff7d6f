//! Enciphering plain text with a synthetic table and dictionary key.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::inflect::{lemma_candidates, marker_for};
use crate::lattice::SENTENCE_END_WORD;
use crate::transcript::{dict_position, CipherToken, DictGeometry};
use crate::wordbank::{Layout, Section, Wordbank};

/// First code of the alphabetic part of the synthetic table.
pub const TABLE_START: u32 = 160;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    key_dictionary: Vec<String>,
    table_words: Vec<String>,
    pub geometry: DictGeometry,
    key_index: HashMap<String, u64>,
    table_index: HashMap<String, u32>,
}

impl SynthConfig {
    /// `key_dictionary` must be strictly increasing. Table words are sorted
    /// here and numbered from [`TABLE_START`].
    pub fn new(
        key_dictionary: Vec<String>,
        mut table_words: Vec<String>,
        geometry: DictGeometry,
    ) -> Result<Self> {
        geometry.validate()?;
        if let Some(w) = key_dictionary.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!(
                "key dictionary is not strictly sorted at {:?} / {:?}",
                w[0], w[1]
            )));
        }
        table_words.sort();
        table_words.dedup();
        let key_index = key_dictionary
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u64 + 1))
            .collect();
        let table_index = table_words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), TABLE_START + i as u32))
            .collect();
        Ok(Self {
            key_dictionary,
            table_words,
            geometry,
            key_index,
            table_index,
        })
    }

    /// Uses the `k` most frequent words of `ranked` as the table.
    pub fn with_top_k(
        key_dictionary: Vec<String>,
        ranked: &[String],
        k: usize,
        geometry: DictGeometry,
    ) -> Result<Self> {
        Self::new(
            key_dictionary,
            ranked.iter().take(k).cloned().collect(),
            geometry,
        )
    }

    pub fn key_dictionary(&self) -> &[String] {
        &self.key_dictionary
    }

    pub fn table_words(&self) -> &[String] {
        &self.table_words
    }

    pub fn layout(&self) -> Layout {
        let last = TABLE_START + (self.table_words.len() as u32).saturating_sub(1);
        Layout {
            geometry: self.geometry,
            alpha_range: (TABLE_START, last),
            dict_size: self.key_dictionary.len() as u64,
        }
    }

    pub fn table_code(&self, word: &str) -> Option<u32> {
        self.table_index.get(word).copied()
    }

    /// 1-based dictionary index of a key word.
    pub fn dict_index(&self, word: &str) -> Option<u64> {
        self.key_index.get(word).copied()
    }

    fn dict_token(&self, index: u64) -> CipherToken {
        let (page, row, column) =
            dict_position(index, &self.geometry).expect("index is at least 1");
        CipherToken::dict(page, row, column)
    }

    /// Bare code for a word listed in the table or key, table first.
    pub fn code_for(&self, word: &str) -> Option<CipherToken> {
        if let Some(code) = self.table_code(word) {
            return Some(CipherToken::table(code));
        }
        self.dict_index(word).map(|i| self.dict_token(i))
    }

    /// Lemma code plus marker for an inflected form of a listed word.
    fn inflected_code(&self, form: &str) -> Option<CipherToken> {
        let listed = |w: &str| self.table_index.contains_key(w) || self.key_index.contains_key(w);
        let mut lemmas = lemma_candidates(form, listed);
        lemmas.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        lemmas.iter().find_map(|lemma| {
            let marker = marker_for(lemma, form)?;
            Some(self.code_for(lemma)?.with_suffix(marker))
        })
    }

    /// The complete key as a wordbank.
    pub fn full_wordbank(&self) -> Wordbank {
        let mut wb = Wordbank::new(self.layout());
        for (w, &code) in &self.table_index {
            wb.insert(Section::Table, u64::from(code), w);
        }
        for (w, &i) in &self.key_index {
            wb.insert(Section::Dict, i, w);
        }
        wb
    }
}

/// Encipherment of a token stream, aligned one-to-one with its plaintext.
#[derive(Debug, Clone, PartialEq)]
pub struct Enciphered {
    pub tokens: Vec<CipherToken>,
    pub gold: Vec<String>,
}

impl Enciphered {
    pub fn pairs(&self) -> impl Iterator<Item = (&CipherToken, &str)> {
        self.tokens.iter().zip(self.gold.iter().map(String::as_str))
    }

    pub fn prefix(&self, n: usize) -> Enciphered {
        let n = n.min(self.tokens.len());
        Enciphered {
            tokens: self.tokens[..n].to_vec(),
            gold: self.gold[..n].to_vec(),
        }
    }
}

/// Replaces table words by table codes, key words by dictionary codes,
/// inflections of listed words by the lemma's code and a suffix marker, and
/// sentence ends by `|`. Anything else stays a literal.
pub fn synth_encipher<S: AsRef<str>>(plaintext: &[S], cfg: &SynthConfig) -> Enciphered {
    let mut inflected: HashMap<&str, Option<CipherToken>> = HashMap::new();
    let mut tokens = Vec::with_capacity(plaintext.len());
    let mut gold = Vec::with_capacity(plaintext.len());
    for word in plaintext {
        let word = word.as_ref();
        let token = if word == SENTENCE_END_WORD {
            CipherToken::sentence_end()
        } else if let Some(t) = cfg.code_for(word) {
            t
        } else {
            inflected
                .entry(word)
                .or_insert_with(|| cfg.inflected_code(word))
                .clone()
                .unwrap_or_else(|| CipherToken::literal(word))
        };
        tokens.push(token);
        gold.push(word.to_string());
    }
    Enciphered { tokens, gold }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcript::{parse_document, render_document, TokenKind};

    fn strings(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    fn config() -> SynthConfig {
        let key = strings(&[
            "able", "answer", "cat", "hope", "run", "ship", "stop", "whale",
        ]);
        SynthConfig::new(key, strings(&["the", "a", "of"]), DictGeometry::default()).unwrap()
    }

    #[test]
    fn rejects_unsorted_key() {
        assert!(SynthConfig::new(strings(&["b", "a"]), vec![], DictGeometry::default()).is_err());
        assert!(SynthConfig::new(strings(&["a", "a"]), vec![], DictGeometry::default()).is_err());
    }

    #[test]
    fn table_codes_are_alphabetical() {
        let cfg = config();
        assert_eq!(cfg.table_code("a"), Some(160));
        assert_eq!(cfg.table_code("of"), Some(161));
        assert_eq!(cfg.table_code("the"), Some(162));
        assert_eq!(cfg.layout().alpha_range, (160, 162));
    }

    #[test]
    fn index_1305_is_page_29_row_29() {
        let key: Vec<String> = (0..2000).map(|i| format!("w{i:05}")).collect();
        let cfg = SynthConfig::new(key.clone(), vec![], DictGeometry::default()).unwrap();
        let t = cfg.code_for(&key[1304]).unwrap();
        assert_eq!(t, CipherToken::dict(29, 29, 1));
    }

    #[test]
    fn encipher_kinds() {
        let cfg = config();
        let text = strings(&[
            "the", "whale", "stopped", "hoping", "natchez", ".", "a", "cat",
        ]);
        let out = synth_encipher(&text, &cfg);
        assert_eq!(out.gold, text);
        let rendered = render_document(&out.tokens);
        assert_eq!(
            rendered.split_whitespace().collect::<Vec<_>>(),
            [
                "[162]^", "7.[8]-", "7.[7]-", "+ed", "7.[4]-", "+ing", "natchez", "|", "[160]^",
                "7.[3]-"
            ]
        );
        assert_eq!(parse_document(&rendered).unwrap(), out.tokens);
        assert!(matches!(out.tokens[4].kind, TokenKind::Literal { .. }));
    }

    #[test]
    fn full_wordbank_covers_key() {
        let cfg = config();
        let wb = cfg.full_wordbank();
        assert_eq!(wb.len(), 11);
        assert!(wb.check_monotonic().is_empty());
        assert_eq!(wb.lookup(&CipherToken::dict(7, 2, 1)), Some("answer"));
    }
}
