//! Resource files compiled into the library. Each is also the default when a
//! configuration names no file of its own.

pub const LEXICON: &str = include_str!("../data/lexicon_tr.tsv");
pub const KEYBOARD: &str = include_str!("../data/keyboard_tr_q.txt");
pub const LEMMA_EXACT: &str = include_str!("../data/lemma_exact.tsv");
pub const LEMMA_RULES: &str = include_str!("../data/lemma_suffixes.tsv");
pub const STOPWORDS: &str = include_str!("../data/stopwords_tr.txt");
pub const SYNTH_VOCAB: &str = include_str!("../data/synth_default.toml");
