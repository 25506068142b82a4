//! Source-code aware text preprocessing shared by documents and queries.

use std::collections::HashSet;

use rust_stemmers::{Algorithm, Stemmer};

pub const ENGLISH_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");
pub const JAVA_KEYWORDS: &str = include_str!("../../data/java_keywords.txt");

/// Splits identifiers into words, drops stopwords and stems what is left.
///
/// A word is a maximal run of alphanumerics and underscores. Compound
/// identifiers (`getIndexOf`, `parse_bug_report`) produce the joined,
/// lowercased compound followed by each part.
pub struct Tokenizer {
    stopwords: HashSet<String>,
    stemmer: Stemmer,
}

impl std::fmt::Debug for Tokenizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tokenizer")
            .field("stopwords", &self.stopwords.len())
            .finish()
    }
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer::with_stopword_lists([ENGLISH_STOPWORDS, JAVA_KEYWORDS])
    }
}

impl Tokenizer {
    /// Each list holds one word per line; blank lines and `#` comments are
    /// ignored.
    pub fn with_stopword_lists<'a>(lists: impl IntoIterator<Item = &'a str>) -> Self {
        let stopwords = lists
            .into_iter()
            .flat_map(str::lines)
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Tokenizer {
            stopwords,
            stemmer: Stemmer::create(Algorithm::English),
        }
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for word in text
            .split(|c: char| !(c.is_alphanumeric() || c == '_'))
            .filter(|w| !w.is_empty())
        {
            let parts = split_identifier(word);
            if parts.len() > 1 {
                let compound: String = word.chars().filter(|c| *c != '_').collect();
                self.push_term(&compound, &mut out);
            }
            for part in parts {
                self.push_term(part, &mut out);
            }
        }
        out
    }

    fn push_term(&self, raw: &str, out: &mut Vec<String>) {
        let lower = raw.to_lowercase();
        if lower.is_empty() || self.stopwords.contains(&lower) {
            return;
        }
        out.push(self.stemmer.stem(&lower).into_owned());
    }
}

/// Splits on underscores and camelCase boundaries, including acronym
/// boundaries (`HTTPServer` -> `HTTP`, `Server`).
pub fn split_identifier(word: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    for piece in word.split('_').filter(|p| !p.is_empty()) {
        let chars: Vec<(usize, char)> = piece.char_indices().collect();
        let mut start = 0;
        for i in 1..chars.len() {
            let (pos, cur) = chars[i];
            let prev = chars[i - 1].1;
            let next_lower = chars.get(i + 1).is_some_and(|(_, c)| c.is_lowercase());
            let boundary = cur.is_uppercase()
                && (prev.is_lowercase()
                    || prev.is_ascii_digit()
                    || (prev.is_uppercase() && next_lower));
            if boundary {
                parts.push(&piece[start..pos]);
                start = pos;
            }
        }
        parts.push(&piece[start..]);
    }
    parts
}
