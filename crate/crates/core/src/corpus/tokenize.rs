use std::collections::HashSet;

const DEFAULT_STOPWORDS: &str = include_str!("stopwords.txt");

#[derive(Debug, Clone)]
pub struct TokenizeOptions {
    pub stopwords: HashSet<String>,
    pub stem: bool,
}

impl Default for TokenizeOptions {
    fn default() -> Self {
        Self {
            stopwords: default_stopwords(),
            stem: false,
        }
    }
}

impl TokenizeOptions {
    /// Replaces the stopword list with the whitespace-separated words in `text`.
    pub fn with_stopword_text(mut self, text: &str) -> Self {
        self.stopwords = parse_stopwords(text);
        self
    }
}

pub fn default_stopwords() -> HashSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

fn parse_stopwords(text: &str) -> HashSet<String> {
    text.split_whitespace().map(str::to_lowercase).collect()
}

/// Splits `text` on non-alphabetic characters, lowercases, drops stopwords and
/// optionally applies the Porter stemmer. Stopwords are matched before stemming.
pub fn tokenize(text: &str, options: &TokenizeOptions) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|piece| !piece.is_empty())
        .map(str::to_lowercase)
        .filter(|token| !options.stopwords.contains(token))
        .map(|token| {
            if options.stem {
                super::porter::stem(&token)
            } else {
                token
            }
        })
        .collect()
}
