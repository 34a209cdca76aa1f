use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of distinct terms with the inverse lookup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn new(terms: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(terms.len());
        for (i, term) in terms.iter().enumerate() {
            if index.insert(term.clone(), i as u32).is_some() {
                return Err(Error::input(format!("duplicate vocabulary term {term:?}")));
            }
        }
        Ok(Self { terms, index })
    }

    /// Placeholder terms `w0`, `w1`, ... for synthetic corpora.
    pub fn synthetic(size: usize) -> Self {
        Self::new((0..size).map(|w| format!("w{w}")).collect()).expect("distinct by construction")
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, id: u32) -> &str {
        &self.terms[id as usize]
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }
}

impl TryFrom<Vec<String>> for Vocabulary {
    type Error = Error;

    fn try_from(terms: Vec<String>) -> Result<Self> {
        Self::new(terms)
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.terms
    }
}

#[derive(Debug, Clone)]
pub struct VocabularyBuild {
    pub vocabulary: Vocabulary,
    /// Fraction of all token occurrences whose term was kept.
    pub coverage: f64,
    /// Set when fewer than the requested number of distinct terms exist.
    pub warning: Option<String>,
}

/// Keeps the `size` most frequent terms, ties broken lexicographically.
pub fn build_vocabulary<S: AsRef<str>>(streams: &[Vec<S>], size: usize) -> Result<VocabularyBuild> {
    if size == 0 {
        return Err(Error::config("vocabulary size must be at least 1"));
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for stream in streams {
        for token in stream {
            *counts.entry(token.as_ref()).or_default() += 1;
        }
    }
    let total: u64 = counts.values().sum();
    let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let warning = (ranked.len() < size).then(|| {
        format!(
            "requested {size} vocabulary terms but only {} distinct tokens exist",
            ranked.len()
        )
    });
    if let Some(w) = &warning {
        log::warn!("{w}");
    }
    ranked.truncate(size);
    let retained: u64 = ranked.iter().map(|(_, c)| c).sum();
    let coverage = if total == 0 { 1.0 } else { retained as f64 / total as f64 };
    let vocabulary = Vocabulary::new(ranked.into_iter().map(|(t, _)| t.to_string()).collect())?;
    Ok(VocabularyBuild {
        vocabulary,
        coverage,
        warning,
    })
}
