use std::collections::HashMap;

/// Token universe with corpus counts. Indices are dense and ordered by
/// descending count, ties broken alphabetically.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocab {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    min_count: u64,
}

impl Vocab {
    pub fn build<S: AsRef<str>>(corpus: &[Vec<S>], min_count: u64) -> Self {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for doc in corpus {
            for t in doc {
                *counts.entry(t.as_ref()).or_insert(0) += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = counts
            .into_iter()
            .filter(|&(_, c)| c >= min_count)
            .collect();
        kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Self::from_counts(
            kept.into_iter().map(|(t, c)| (t.to_string(), c)).collect(),
            min_count,
        )
    }

    pub fn from_counts(entries: Vec<(String, u64)>, min_count: u64) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.clone(), i))
            .collect();
        let (tokens, counts) = entries.into_iter().unzip();
        Vocab {
            tokens,
            counts,
            index,
            min_count,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, i: usize) -> &str {
        &self.tokens[i]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Maps a document to vocabulary ids, dropping unknown tokens.
    pub fn encode<S: AsRef<str>>(&self, doc: &[S]) -> Vec<usize> {
        doc.iter().filter_map(|t| self.get(t.as_ref())).collect()
    }
}
