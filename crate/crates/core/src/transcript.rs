//! Cipher transcription notation.
//!
//! A transcription is a whitespace-separated stream of tokens:
//!
//! ```text
//! [664]^        table code 664
//! 390.[10]=     dictionary page 390, row 10, column 2
//! 4.[6]-        dictionary page 4, row 6, column 1
//! +ing          inflection marker for the preceding code
//! |             sentence end
//! natchez       plaintext literal
//! ```
//!
//! Lines whose first non-blank character is `#` are comments.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a single transcription unit stands for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    TableCode { code: u32 },
    DictCode { page: u32, row: u32, column: u8 },
    Literal { text: String },
    SentenceEnd,
}

/// One cipher token, optionally carrying an inflection suffix marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CipherToken {
    pub kind: TokenKind,
    pub suffix: Option<String>,
}

impl CipherToken {
    pub fn table(code: u32) -> Self {
        Self {
            kind: TokenKind::TableCode { code },
            suffix: None,
        }
    }

    pub fn dict(page: u32, row: u32, column: u8) -> Self {
        Self {
            kind: TokenKind::DictCode { page, row, column },
            suffix: None,
        }
    }

    pub fn literal(text: impl Into<String>) -> Self {
        Self {
            kind: TokenKind::Literal { text: text.into() },
            suffix: None,
        }
    }

    pub fn sentence_end() -> Self {
        Self {
            kind: TokenKind::SentenceEnd,
            suffix: None,
        }
    }

    pub fn with_suffix(mut self, suffix: impl Into<String>) -> Self {
        self.suffix = Some(suffix.into());
        self
    }

    /// True for table and dictionary codes.
    pub fn is_code(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::TableCode { .. } | TokenKind::DictCode { .. }
        )
    }
}

impl fmt::Display for CipherToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TokenKind::TableCode { code } => write!(f, "[{code}]^")?,
            TokenKind::DictCode { page, row, column } => {
                let bar = if *column == 2 { '=' } else { '-' };
                write!(f, "{page}.[{row}]{bar}")?
            }
            TokenKind::Literal { text } => f.write_str(text)?,
            TokenKind::SentenceEnd => f.write_str("|")?,
        }
        if let Some(suffix) = &self.suffix {
            write!(f, " +{suffix}")?;
        }
        Ok(())
    }
}

/// Layout of the shared dictionary used to linearize dictionary codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictGeometry {
    pub rows_per_column: u32,
    pub columns: u32,
    /// First page holding dictionary entries; earlier pages are front matter.
    pub first_content_page: u32,
}

impl Default for DictGeometry {
    fn default() -> Self {
        Self {
            rows_per_column: 29,
            columns: 2,
            first_content_page: 7,
        }
    }
}

impl DictGeometry {
    pub fn validate(&self) -> Result<()> {
        if self.rows_per_column == 0 || self.columns == 0 || self.first_content_page == 0 {
            return Err(Error::domain(format!(
                "dictionary geometry fields must be >= 1: {self:?}"
            )));
        }
        Ok(())
    }

    fn words_per_page(&self) -> u64 {
        u64::from(self.rows_per_column) * u64::from(self.columns)
    }
}

/// Linear position of a dictionary code in the shared dictionary.
///
/// Rows past `rows_per_column` are accepted and run on into the next column;
/// transcriptions contain such rows and the published indices follow the
/// same arithmetic.
pub fn dict_index(page: u32, row: u32, column: u8, geom: &DictGeometry) -> Result<u64> {
    geom.validate()?;
    if page < geom.first_content_page {
        return Err(Error::domain(format!(
            "page {page} precedes the first content page {}",
            geom.first_content_page
        )));
    }
    if row == 0 || column == 0 || u32::from(column) > geom.columns {
        return Err(Error::domain(format!(
            "invalid row/column {row}/{column} for geometry {geom:?}"
        )));
    }
    let page_offset = u64::from(page - geom.first_content_page) * geom.words_per_page();
    let column_offset = u64::from(column - 1) * u64::from(geom.rows_per_column);
    Ok(page_offset + column_offset + u64::from(row))
}

/// Inverse of [`dict_index`] restricted to in-range rows.
pub fn dict_position(index: u64, geom: &DictGeometry) -> Result<(u32, u32, u8)> {
    geom.validate()?;
    if index == 0 {
        return Err(Error::domain("dictionary indices start at 1"));
    }
    let zero = index - 1;
    let per_page = geom.words_per_page();
    let page = zero / per_page + u64::from(geom.first_content_page);
    let within = zero % per_page;
    let column = within / u64::from(geom.rows_per_column) + 1;
    let row = within % u64::from(geom.rows_per_column) + 1;
    let page = u32::try_from(page).map_err(|_| Error::domain("index beyond page range"))?;
    Ok((page, row as u32, column as u8))
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_number(s: &str, offset: usize, what: &str) -> std::result::Result<u32, (usize, String)> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err((offset, format!("expected {what} digits, found {s:?}")));
    }
    match s.parse::<u32>() {
        Ok(0) => Err((offset, format!("{what} must be >= 1"))),
        Ok(n) => Ok(n),
        Err(_) => Err((offset, format!("{what} out of range"))),
    }
}

/// Parses a token; errors carry a zero-based character offset.
fn parse_token_at(text: &str) -> std::result::Result<CipherToken, (usize, String)> {
    if text.is_empty() {
        return Err((0, "empty token".into()));
    }
    if text == "|" {
        return Ok(CipherToken::sentence_end());
    }
    if text.starts_with('+') {
        return Err((0, "inflection marker outside a document".into()));
    }
    if text.chars().any(char::is_whitespace) {
        return Err((0, "tokens cannot contain whitespace".into()));
    }
    let looks_coded = text.contains(['[', ']']) || text.ends_with('^');
    if !looks_coded {
        return Ok(CipherToken::literal(text));
    }

    if let Some(rest) = text.strip_prefix('[') {
        let close = rest
            .find(']')
            .ok_or_else(|| (text.len(), "missing ']'".to_string()))?;
        let code = parse_number(&rest[..close], 1, "table code")?;
        let tail = &rest[close + 1..];
        if tail != "^" {
            return Err((
                close + 2,
                format!("expected '^' after table code, found {tail:?}"),
            ));
        }
        return Ok(CipherToken::table(code));
    }

    let dot = text
        .find(".[")
        .ok_or_else(|| (0, "expected 'P.[R]-', 'P.[R]=' or '[N]^'".to_string()))?;
    let page = parse_number(&text[..dot], 0, "page")?;
    let rest = &text[dot + 2..];
    let close = rest
        .find(']')
        .ok_or_else(|| (text.len(), "missing ']'".to_string()))?;
    let row = parse_number(&rest[..close], dot + 2, "row")?;
    let bar_at = dot + 2 + close + 1;
    let column = match &rest[close + 1..] {
        "-" => 1,
        "=" => 2,
        other => {
            return Err((
                bar_at,
                format!("expected column marker '-' or '=', found {other:?}"),
            ))
        }
    };
    Ok(CipherToken::dict(page, row, column))
}

/// Parses a single whitespace-free token.
pub fn parse_token(text: &str) -> Result<CipherToken> {
    parse_token_at(text).map_err(|(offset, msg)| parse_error(1, offset + 1, msg))
}

/// Parses a whole transcription, attaching `+suffix` markers to the code
/// token immediately before them.
pub fn parse_document(text: &str) -> Result<Vec<CipherToken>> {
    let mut tokens: Vec<CipherToken> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        if line.trim_start().starts_with('#') {
            continue;
        }
        let mut rest = line;
        let mut consumed = 0;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let tail = &rest[start..];
            let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
            let word = &tail[..len];
            let column = line[..consumed + start].chars().count() + 1;

            if let Some(suffix) = word.strip_prefix('+') {
                if suffix.is_empty() {
                    return Err(parse_error(line_no, column, "empty inflection marker"));
                }
                match tokens.last_mut() {
                    Some(prev) if prev.is_code() && prev.suffix.is_none() => {
                        prev.suffix = Some(suffix.to_lowercase());
                    }
                    Some(prev) if prev.is_code() => {
                        return Err(parse_error(
                            line_no,
                            column,
                            format!("second inflection marker for {prev}"),
                        ));
                    }
                    _ => {
                        return Err(parse_error(
                            line_no,
                            column,
                            "inflection marker without a preceding code token",
                        ));
                    }
                }
            } else {
                let token = parse_token_at(word).map_err(|(offset, msg)| {
                    parse_error(
                        line_no,
                        column + word[..offset.min(word.len())].chars().count(),
                        msg,
                    )
                })?;
                tokens.push(token);
            }
            consumed += start + len;
            rest = &tail[len..];
        }
    }
    Ok(tokens)
}

/// Renders tokens in transcription notation, one line.
pub fn render_document(tokens: &[CipherToken]) -> String {
    let mut out = String::new();
    for (i, token) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&token.to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// (cipher, Index) rows of the published dictionary wordbank.
    pub(crate) const PUBLISHED_INDICES: [(&str, u64); 11] = [
        ("7.[24]-", 24),
        ("15.[21]-", 485),
        ("29.[29]-", 1305),
        ("44.[28]-", 2174),
        ("47.[21]-", 2341),
        ("59.[19]-", 3035),
        ("65.[17]=", 3410),
        ("75.[29]-", 3973),
        ("103.[40]=", 5637),
        ("113.[4]-", 6152),
        ("114.[20]-", 6226),
    ];

    #[test]
    fn parses_dictionary_code() {
        assert_eq!(
            parse_token("390.[10]=").unwrap(),
            CipherToken::dict(390, 10, 2)
        );
        assert_eq!(parse_token("4.[6]-").unwrap(), CipherToken::dict(4, 6, 1));
    }

    #[test]
    fn parses_table_code_literal_and_boundary() {
        assert_eq!(parse_token("[664]^").unwrap(), CipherToken::table(664));
        assert_eq!(
            parse_token("natchez").unwrap(),
            CipherToken::literal("natchez")
        );
        assert_eq!(parse_token("1803").unwrap(), CipherToken::literal("1803"));
        assert_eq!(parse_token("|").unwrap(), CipherToken::sentence_end());
    }

    #[test]
    fn malformed_codes_report_position() {
        for (text, column) in [
            ("[664", 5),
            ("[664]", 6),
            ("[x]^", 2),
            ("390.[10]", 9),
            ("390.[10]*", 9),
            ("390[10]=", 1),
            ("0.[1]-", 1),
            ("5.[]-", 4),
        ] {
            match parse_token(text) {
                Err(Error::Parse { column: c, .. }) => assert_eq!(c, column, "{text}"),
                other => panic!("{text}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn suffix_attaches_to_previous_code() {
        assert_eq!(
            parse_document("[229]^ +ing").unwrap(),
            vec![CipherToken::table(229).with_suffix("ing")]
        );
        assert_eq!(
            parse_document("[1235]^ +y 4.[6]-").unwrap(),
            vec![
                CipherToken::table(1235).with_suffix("y"),
                CipherToken::dict(4, 6, 1)
            ]
        );
        assert!(parse_document("").unwrap().is_empty());
    }

    #[test]
    fn leading_suffix_is_an_error() {
        match parse_document("  +ing [5]^") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 3)),
            other => panic!("{other:?}"),
        }
        assert!(parse_document("natchez +s").is_err());
        assert!(parse_document("[5]^ +s +d").is_err());
    }

    #[test]
    fn comments_and_line_numbers() {
        let doc = "# letter 1\n[160]^ 29.[29]- |\n\n  # aside\nwith [9 ]^";
        match parse_document(doc) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (5, 8)),
            other => panic!("{other:?}"),
        }
        let ok = parse_document("# letter 1\n[160]^ 29.[29]- |").unwrap();
        assert_eq!(ok.len(), 3);
    }

    #[test]
    fn sample_letter_fragment() {
        let text = "390.[10]= . [664]^ [526]^ [629]^ [1078]^ [752]^ [1216]^ 192.[10]- [172]^ [177]^ [782]^\n\
                    629.[16]- [1077]^ [313]^ [1235]^ +y 4.[6]- [570]^ [1255]^ [664]^ [628]^ [798]^ [238]^ +n 2.[18]=";
        let tokens = parse_document(text).unwrap();
        assert_eq!(tokens.len(), 24);
        assert_eq!(tokens[1], CipherToken::literal("."));
        assert_eq!(tokens[15], CipherToken::table(1235).with_suffix("y"));
        assert_eq!(tokens[22], CipherToken::table(238).with_suffix("n"));
    }

    #[test]
    fn published_indices() {
        let geom = DictGeometry::default();
        for (cipher, expected) in PUBLISHED_INDICES {
            let token = parse_token(cipher).unwrap();
            let TokenKind::DictCode { page, row, column } = token.kind else {
                panic!("{cipher}")
            };
            assert_eq!(
                dict_index(page, row, column, &geom).unwrap(),
                expected,
                "{cipher}"
            );
        }
    }

    #[test]
    fn front_matter_pages_are_rejected() {
        let geom = DictGeometry::default();
        assert!(matches!(dict_index(6, 1, 1, &geom), Err(Error::Domain(_))));
        assert!(matches!(dict_index(4, 6, 1, &geom), Err(Error::Domain(_))));
        assert!(dict_index(7, 1, 3, &geom).is_err());
        let bad = DictGeometry {
            rows_per_column: 0,
            ..geom
        };
        assert!(dict_index(10, 1, 1, &bad).is_err());
    }

    #[test]
    fn position_inverts_index() {
        let geom = DictGeometry::default();
        assert_eq!(dict_position(1305, &geom).unwrap(), (29, 29, 1));
        assert_eq!(dict_position(3410, &geom).unwrap(), (65, 17, 2));
        assert_eq!(dict_position(24, &geom).unwrap(), (7, 24, 1));
    }

    fn arb_token() -> impl Strategy<Value = CipherToken> {
        let suffix = proptest::option::of("[a-z]{1,4}");
        prop_oneof![
            (1u32..5000, suffix.clone()).prop_map(|(c, s)| CipherToken {
                suffix: s,
                ..CipherToken::table(c)
            }),
            (1u32..900, 1u32..60, 1u8..=2, suffix).prop_map(|(p, r, c, s)| CipherToken {
                suffix: s,
                ..CipherToken::dict(p, r, c)
            }),
            "[a-z][a-z0-9'.]{0,8}".prop_map(CipherToken::literal),
            Just(CipherToken::sentence_end()),
        ]
    }

    proptest! {
        #[test]
        fn render_then_parse_round_trips(tokens in proptest::collection::vec(arb_token(), 0..20)) {
            for token in &tokens {
                let reparsed = parse_document(&token.to_string()).unwrap();
                prop_assert_eq!(reparsed, vec![token.clone()]);
            }
            prop_assert_eq!(parse_document(&render_document(&tokens)).unwrap(), tokens);
        }

        #[test]
        fn index_is_strictly_increasing(
            a in (7u32..800, 1u8..=2, 1u32..=29),
            b in (7u32..800, 1u8..=2, 1u32..=29),
        ) {
            let geom = DictGeometry::default();
            let ia = dict_index(a.0, a.2, a.1, &geom).unwrap();
            let ib = dict_index(b.0, b.2, b.1, &geom).unwrap();
            prop_assert_eq!(a.cmp(&b), ia.cmp(&ib));
            prop_assert_eq!(dict_position(ia, &geom).unwrap(), (a.0, a.2, a.1));
        }
    }
}
