use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Sufficient statistics of the topic assignments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountMatrices {
    /// `C_{t,i,k}`, indexed by global document then topic.
    pub doc_topic: Vec<Vec<u32>>,
    /// `C_{w,k}`, indexed by word then topic.
    pub word_topic: Vec<Vec<u32>>,
    /// `C_k`.
    pub topic_total: Vec<u64>,
}

impl CountMatrices {
    pub fn zeros(num_docs: usize, vocab_size: usize, topics: usize) -> Self {
        Self {
            doc_topic: vec![vec![0; topics]; num_docs],
            word_topic: vec![vec![0; topics]; vocab_size],
            topic_total: vec![0; topics],
        }
    }

    pub fn topics(&self) -> usize {
        self.topic_total.len()
    }

    #[inline]
    pub fn increment(&mut self, doc: usize, word: u32, topic: usize) {
        self.doc_topic[doc][topic] += 1;
        self.word_topic[word as usize][topic] += 1;
        self.topic_total[topic] += 1;
    }

    /// Removes one token from the three matrices. Fails, leaving the counts
    /// untouched, when any of the cells is already zero.
    #[inline]
    pub fn decrement(&mut self, doc: usize, word: u32, topic: usize) -> Result<()> {
        let w = word as usize;
        if self.doc_topic[doc][topic] == 0
            || self.word_topic[w][topic] == 0
            || self.topic_total[topic] == 0
        {
            return Err(Error::invariant(format!(
                "count underflow removing word {word} of document {doc} from topic {topic}"
            )));
        }
        self.doc_topic[doc][topic] -= 1;
        self.word_topic[w][topic] -= 1;
        self.topic_total[topic] -= 1;
        Ok(())
    }

    /// Checks the marginal identities against the corpus document lengths.
    pub fn check_marginals(&self, corpus: &Corpus) -> Result<()> {
        for ((_, doc), row) in corpus.documents().zip(&self.doc_topic) {
            if row.iter().map(|&c| c as usize).sum::<usize>() != doc.len() {
                return Err(Error::invariant(format!("doc-topic row of {} does not sum to its length", doc.id)));
            }
        }
        for k in 0..self.topics() {
            let col: u64 = self.word_topic.iter().map(|r| r[k] as u64).sum();
            if col != self.topic_total[k] {
                return Err(Error::invariant(format!("word-topic column {k} disagrees with topic total")));
            }
        }
        if self.topic_total.iter().sum::<u64>() != corpus.num_tokens() as u64 {
            return Err(Error::invariant("topic totals do not sum to the token count"));
        }
        Ok(())
    }
}

/// Rebuilds all counts from the assignments `z` (one vector per document, in
/// corpus order).
pub fn recompute_counts(corpus: &Corpus, z: &[Vec<u32>], topics: usize) -> Result<CountMatrices> {
    if z.len() != corpus.num_documents() {
        return Err(Error::invariant(format!(
            "{} assignment vectors for {} documents",
            z.len(),
            corpus.num_documents()
        )));
    }
    let mut counts = CountMatrices::zeros(z.len(), corpus.vocab_size(), topics);
    for (d, ((_, doc), zd)) in corpus.documents().zip(z).enumerate() {
        if zd.len() != doc.len() {
            return Err(Error::invariant(format!(
                "document {} has {} tokens but {} assignments",
                doc.id,
                doc.len(),
                zd.len()
            )));
        }
        for (&w, &k) in doc.tokens.iter().zip(zd) {
            if k as usize >= topics {
                return Err(Error::invariant(format!("assignment {k} outside {topics} topics")));
            }
            counts.increment(d, w, k as usize);
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Vocabulary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn corpus(docs: Vec<Vec<u32>>, v: usize) -> Corpus {
        Corpus {
            vocabulary: Vocabulary::synthetic(v),
            period_labels: vec!["0".into()],
            periods: vec![docs
                .into_iter()
                .enumerate()
                .map(|(i, tokens)| Document { id: format!("d{i}"), tokens })
                .collect()],
            covariates: vec![vec![]],
            coverage: 1.0,
        }
    }

    #[test]
    fn hand_count() {
        let c = corpus(vec![vec![0, 0, 1]], 2);
        let m = recompute_counts(&c, &[vec![2, 2, 0]], 3).unwrap();
        assert_eq!(m.doc_topic[0], [1, 0, 2]);
        assert_eq!(m.word_topic[0][2], 2);
        assert_eq!(m.word_topic[1][0], 1);
        assert_eq!(m.topic_total, [1, 0, 2]);
        m.check_marginals(&c).unwrap();
    }

    #[test]
    fn empty_corpus() {
        let c = Corpus {
            vocabulary: Vocabulary::synthetic(3),
            period_labels: vec![],
            periods: vec![],
            covariates: vec![],
            coverage: 1.0,
        };
        let m = recompute_counts(&c, &[], 2).unwrap();
        assert_eq!(m, CountMatrices::zeros(0, 3, 2));
    }

    #[test]
    fn length_mismatch_is_error() {
        let c = corpus(vec![vec![0, 1]], 2);
        assert!(recompute_counts(&c, &[vec![0]], 2).is_err());
        assert!(recompute_counts(&c, &[], 2).is_err());
        assert!(recompute_counts(&c, &[vec![0, 5]], 2).is_err());
    }

    #[test]
    fn increment_decrement_identity_and_underflow() {
        let mut m = CountMatrices::zeros(1, 2, 2);
        let before = m.clone();
        m.increment(0, 1, 1);
        m.decrement(0, 1, 1).unwrap();
        assert_eq!(m, before);
        assert!(m.decrement(0, 1, 1).is_err());
        assert_eq!(m, before);
    }

    #[test]
    fn random_moves_match_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let docs: Vec<Vec<u32>> = (0..6)
            .map(|_| (0..rng.gen_range(1..9)).map(|_| rng.gen_range(0..5)).collect())
            .collect();
        let c = corpus(docs.clone(), 5);
        let k = 4;
        let mut z: Vec<Vec<u32>> = docs.iter().map(|d| d.iter().map(|_| rng.gen_range(0..k as u32)).collect()).collect();
        let mut m = recompute_counts(&c, &z, k).unwrap();
        for _ in 0..500 {
            let d = rng.gen_range(0..docs.len());
            let j = rng.gen_range(0..docs[d].len());
            let w = docs[d][j];
            m.decrement(d, w, z[d][j] as usize).unwrap();
            z[d][j] = rng.gen_range(0..k as u32);
            m.increment(d, w, z[d][j] as usize);
        }
        assert_eq!(m, recompute_counts(&c, &z, k).unwrap());
    }
}
