use std::collections::HashMap;

use super::CorpusTuple;
use crate::error::{CorpusError, RankError};

pub const BACKOFF_ALPHA: f64 = 0.4;

const BOS: u32 = 0;
const EOS: u32 = 1;

/// Word id in the LM vocabulary; `None` is an out-of-vocabulary word.
pub type WordId = Option<u32>;

/// Trigram counts with stupid-backoff scoring.
///
/// Sentences are padded as `<s> <s> w1 .. wn </s>`. A term is
/// `c(u v w) / c(u v ·)` when the trigram was seen, otherwise
/// `alpha * c(v w) / c(v ·)`, otherwise `alpha^2 * c(w) / N`, and an unseen
/// word gets `alpha^2 / ((V + 1) * N)`, where `N` is the number of scored
/// positions and `V` the number of distinct predicted words.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramLm {
    words: Vec<String>,
    ids: HashMap<String, u32>,
    unigrams: Vec<u64>,
    bigrams: HashMap<(u32, u32), u64>,
    trigrams: HashMap<(u32, u32, u32), u64>,
    contexts1: Vec<u64>,
    contexts2: HashMap<(u32, u32), u64>,
    total: u64,
    alpha: f64,
}

pub fn build_lm(tuples: &[CorpusTuple]) -> Result<NGramLm, CorpusError> {
    if tuples.is_empty() {
        return Err(CorpusError::Empty);
    }
    let mut lm = NGramLm::empty(BACKOFF_ALPHA);
    for tuple in tuples {
        for variant in tuple.variants.values() {
            let ids: Vec<u32> = variant.tokens.iter().map(|t| lm.intern(&t.surface)).collect();
            lm.count_sentence(&ids);
        }
    }
    lm.finish();
    Ok(lm)
}

impl NGramLm {
    fn empty(alpha: f64) -> Self {
        let mut lm = NGramLm {
            words: Vec::new(),
            ids: HashMap::new(),
            unigrams: Vec::new(),
            bigrams: HashMap::new(),
            trigrams: HashMap::new(),
            contexts1: Vec::new(),
            contexts2: HashMap::new(),
            total: 0,
            alpha,
        };
        lm.intern("<s>");
        lm.intern("</s>");
        lm
    }

    fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_string());
        self.ids.insert(word.to_string(), id);
        self.unigrams.push(0);
        self.contexts1.push(0);
        id
    }

    fn count_sentence(&mut self, ids: &[u32]) {
        let mut padded = vec![BOS, BOS];
        padded.extend_from_slice(ids);
        padded.push(EOS);
        for i in 2..padded.len() {
            let (u, v, w) = (padded[i - 2], padded[i - 1], padded[i]);
            *self.trigrams.entry((u, v, w)).or_default() += 1;
            *self.bigrams.entry((v, w)).or_default() += 1;
            self.unigrams[w as usize] += 1;
        }
    }

    /// Recompute context totals from the n-gram tables.
    fn finish(&mut self) {
        self.contexts1 = vec![0; self.words.len()];
        self.contexts2.clear();
        for (&(v, _), &c) in &self.bigrams {
            self.contexts1[v as usize] += c;
        }
        for (&(u, v, _), &c) in &self.trigrams {
            *self.contexts2.entry((u, v)).or_default() += c;
        }
        self.total = self.unigrams.iter().sum();
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn order(&self) -> usize {
        3
    }

    /// Number of distinct predicted words (including `</s>`).
    pub fn vocab_size(&self) -> usize {
        self.unigrams.iter().filter(|&&c| c > 0).count()
    }

    pub fn word_id(&self, word: &str) -> WordId {
        self.ids.get(word).copied().filter(|&id| id > EOS)
    }

    pub fn unknown_log_prob(&self) -> f64 {
        2.0 * self.alpha.ln() - ((self.vocab_size() as f64 + 1.0) * self.total as f64).ln()
    }

    /// Log-probability of `w` after the history `u v`.
    pub fn term(&self, u: WordId, v: WordId, w: WordId) -> f64 {
        let Some(w) = w else {
            return self.unknown_log_prob();
        };
        if let (Some(u), Some(v)) = (u, v) {
            if let Some(&c) = self.trigrams.get(&(u, v, w)) {
                return (c as f64 / self.contexts2[&(u, v)] as f64).ln();
            }
        }
        if let Some(v) = v {
            if let Some(&c) = self.bigrams.get(&(v, w)) {
                return self.alpha.ln() + (c as f64 / self.contexts1[v as usize] as f64).ln();
            }
        }
        let c = self.unigrams[w as usize];
        if c > 0 {
            2.0 * self.alpha.ln() + (c as f64 / self.total as f64).ln()
        } else {
            self.unknown_log_prob()
        }
    }

    pub const BOS: WordId = Some(BOS);
    pub const EOS: WordId = Some(EOS);

    /// Sum of the terms for each word followed by the end marker.
    pub fn score_ids(&self, ids: &[WordId]) -> Result<f64, RankError> {
        if ids.is_empty() {
            return Err(RankError::EmptySequence);
        }
        let (mut u, mut v) = (Self::BOS, Self::BOS);
        let mut total = 0.0;
        for &w in ids {
            total += self.term(u, v, w);
            u = v;
            v = w;
        }
        total += self.term(u, v, Self::EOS);
        Ok(total)
    }

    pub fn score<S: AsRef<str>>(&self, tokens: &[S]) -> Result<f64, RankError> {
        let ids: Vec<WordId> = tokens.iter().map(|t| self.word_id(t.as_ref())).collect();
        self.score_ids(&ids)
    }

    /// Count tables as TSV: `alpha`, then `1 w c`, `2 v w c`, `3 u v w c`, sorted.
    pub fn to_tsv(&self) -> String {
        let word = |id: u32| self.words[id as usize].as_str();
        let mut lines = Vec::new();
        for (id, &c) in self.unigrams.iter().enumerate() {
            if c > 0 {
                lines.push(format!("1\t{}\t{c}", word(id as u32)));
            }
        }
        for (&(v, w), &c) in &self.bigrams {
            lines.push(format!("2\t{}\t{}\t{c}", word(v), word(w)));
        }
        for (&(u, v, w), &c) in &self.trigrams {
            lines.push(format!("3\t{}\t{}\t{}\t{c}", word(u), word(v), word(w)));
        }
        lines.sort();
        format!("alpha\t{}\n{}\n", self.alpha, lines.join("\n"))
    }

    pub fn from_tsv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.is_empty());
        let alpha = match lines.next().and_then(|(_, l)| l.strip_prefix("alpha\t")) {
            Some(a) => a.parse::<f64>().map_err(|e| e.to_string())?,
            None => return Err("missing alpha header".into()),
        };
        let mut lm = NGramLm::empty(alpha);
        for (n, line) in lines {
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = || format!("line {}: malformed n-gram entry", n + 1);
            let order: usize = fields[0].parse().map_err(|_| bad())?;
            if !(1..=3).contains(&order) || fields.len() != order + 2 {
                return Err(bad());
            }
            let count: u64 = fields[order + 1].parse().map_err(|_| bad())?;
            if count == 0 {
                return Err(bad());
            }
            let ids: Vec<u32> = fields[1..=order].iter().map(|w| lm.intern(w)).collect();
            match ids[..] {
                [w] => lm.unigrams[w as usize] = count,
                [v, w] => {
                    lm.bigrams.insert((v, w), count);
                }
                [u, v, w] => {
                    lm.trigrams.insert((u, v, w), count);
                }
                _ => unreachable!(),
            }
        }
        lm.finish();
        Ok(lm)
    }
}
