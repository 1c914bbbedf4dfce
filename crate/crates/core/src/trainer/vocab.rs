use std::collections::HashMap;

use super::corpus::Corpus;
use crate::error::{Error, Result};

/// Retained vocabulary with weighted counts, ordered by (count desc, token asc).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabCounts {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    /// Corpus lexicon id → vocabulary id.
    remap: Vec<Option<u32>>,
}

pub fn build_vocab(corpus: &Corpus, min_count: u64) -> Result<VocabCounts> {
    if corpus.record_count() == 0 {
        return Err(Error::EmptyVocabulary("corpus has no records".into()));
    }
    let mut raw = vec![0u64; corpus.lexicon().len()];
    for r in corpus.records() {
        for &t in &r.tokens {
            raw[t as usize] += r.count;
        }
    }
    let mut kept: Vec<u32> = (0..raw.len() as u32)
        .filter(|&id| raw[id as usize] > 0 && raw[id as usize] >= min_count)
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary(format!(
            "no token occurs at least {min_count} times"
        )));
    }
    kept.sort_by(|&a, &b| {
        raw[b as usize]
            .cmp(&raw[a as usize])
            .then_with(|| corpus.token(a).cmp(corpus.token(b)))
    });
    let mut remap = vec![None; raw.len()];
    let mut tokens = Vec::with_capacity(kept.len());
    let mut counts = Vec::with_capacity(kept.len());
    let mut index = HashMap::with_capacity(kept.len());
    for (v, &id) in kept.iter().enumerate() {
        remap[id as usize] = Some(v as u32);
        tokens.push(corpus.token(id).to_string());
        counts.push(raw[id as usize]);
        index.insert(corpus.token(id).to_string(), v);
    }
    Ok(VocabCounts {
        tokens,
        counts,
        index,
        remap,
    })
}

impl VocabCounts {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, token: &str) -> Option<u64> {
        self.index.get(token).map(|&i| self.counts[i])
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub(crate) fn map_lexicon_id(&self, id: u32) -> Option<u32> {
        self.remap.get(id as usize).copied().flatten()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trainer::corpus::CorpusBuilder;

    #[test]
    fn min_count_filters() {
        let v = build_vocab(&Corpus::from_lines(["a a b"]), 2).unwrap();
        assert_eq!(v.tokens(), ["a"]);
        assert_eq!(v.counts(), [2]);
    }

    #[test]
    fn multiplicities_aggregate() {
        let mut b = CorpusBuilder::new();
        b.push(&["x", "y"], 3).unwrap();
        let v = build_vocab(&b.build(), 1).unwrap();
        assert_eq!(v.count("x"), Some(3));
        assert_eq!(v.count("y"), Some(3));
    }

    #[test]
    fn ordering_count_desc_then_token() {
        let v = build_vocab(&Corpus::from_lines(["d c b a", "b a", "z"]), 1).unwrap();
        assert_eq!(v.tokens(), ["a", "b", "c", "d", "z"]);
        assert_eq!(v.counts(), [2, 2, 1, 1, 1]);
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(
            build_vocab(&Corpus::from_lines(Vec::<&str>::new()), 1),
            Err(Error::EmptyVocabulary(_))
        ));
        assert!(matches!(
            build_vocab(&Corpus::from_lines(["a b"]), 5),
            Err(Error::EmptyVocabulary(_))
        ));
    }
}
