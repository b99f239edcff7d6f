//! Plain-text tokenization for book corpora.

use crate::lattice::SENTENCE_END_WORD;

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn flush(word: &mut String, out: &mut Vec<String>) {
    if word.is_empty() {
        return;
    }
    let trimmed = word.trim_end_matches(is_apostrophe);
    // Possessive 's is dropped; other contractions fuse ("don't" -> "dont").
    let base = trimmed
        .strip_suffix("'s")
        .or_else(|| trimmed.strip_suffix("\u{2019}s"))
        .unwrap_or(trimmed);
    let w: String = base.chars().filter(|c| !is_apostrophe(*c)).collect();
    if !w.is_empty() {
        out.push(w);
    }
    word.clear();
}

/// Lowercase words and sentence-end markers (".") in reading order.
///
/// Words are runs of letters, with internal apostrophes. `.`, `!` and `?`
/// end a sentence; empty sentences are never emitted.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        if c.is_alphabetic() {
            word.extend(c.to_lowercase());
        } else if is_apostrophe(c) && !word.is_empty() {
            word.push('\'');
        } else {
            flush(&mut word, &mut out);
            if matches!(c, '.' | '!' | '?') && out.last().is_some_and(|w| w != SENTENCE_END_WORD) {
                out.push(SENTENCE_END_WORD.to_string());
            }
        }
    }
    flush(&mut word, &mut out);
    if out.last().is_some_and(|w| w != SENTENCE_END_WORD) {
        out.push(SENTENCE_END_WORD.to_string());
    }
    out
}

/// Sentences as word lists, without the end markers.
pub fn sentences(text: &str) -> Vec<Vec<String>> {
    split_sentences(&tokenize(text))
}

pub fn split_sentences(tokens: &[String]) -> Vec<Vec<String>> {
    tokens
        .split(|t| t == SENTENCE_END_WORD)
        .filter(|s| !s.is_empty())
        .map(<[String]>::to_vec)
        .collect()
}

/// Splits a book at lines starting with `CHAPTER`. Text before the first
/// heading is dropped when at least one heading exists. Heading lines are
/// not part of the chapter bodies.
pub fn split_chapters(text: &str) -> Vec<String> {
    let mut chapters: Vec<String> = Vec::new();
    let mut current: Option<String> = None;
    for line in text.lines() {
        if line.trim_start().starts_with("CHAPTER") {
            if let Some(body) = current.take() {
                chapters.push(body);
            }
            current = Some(String::new());
        } else if let Some(body) = current.as_mut() {
            body.push_str(line);
            body.push('\n');
        }
    }
    if let Some(body) = current {
        chapters.push(body);
    }
    if chapters.is_empty() {
        chapters.push(text.to_string());
    }
    chapters
}
