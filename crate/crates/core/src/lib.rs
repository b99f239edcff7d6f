//! Known-plaintext decipherment of dictionary and table book codes.
//!
//! A transcription is parsed into cipher tokens, a wordbank of known
//! code/plaintext pairs is extracted from parallel material, every unknown
//! code is turned into a weighted list of candidate words by alphabetical
//! interpolation between wordbank anchors, and the best reading is searched
//! with a language model.

pub mod beta;
pub mod decoder;
pub mod error;
pub mod inflect;
pub mod lattice;
pub mod lm;
pub mod pipeline;
pub mod transcript;
pub mod wordbank;

pub use decoder::{
    beam_decode, exhaustive_decode, oracle_decode, unigram_decode, DecodeOptions, DecodePath,
};
pub use error::{Error, Result};
pub use lattice::{
    build_lattice, Candidate, Lattice, LatticeConfig, LatticeInputs, ReferenceDict, Segment, Source,
};
pub use lm::{NGramModel, Scorer};
pub use transcript::{parse_document, CipherToken, DictGeometry, TokenKind};
pub use wordbank::{extract_wordbank, Layout, Wordbank};
