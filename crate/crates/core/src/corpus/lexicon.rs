use std::collections::{BTreeMap, HashMap};

use super::CorpusTuple;
use crate::text::{Gender, GenderMark, Person, TokenLabel};

/// Previous-word symbol for sentence-initial tokens.
pub const BOUNDARY: &str = "<s>";

type UnigramKey = (String, Person, Gender);
type BigramKey = (String, String, Person, Gender);

/// Word-alternative counts observed in the corpus, keyed by the word and the
/// (person, target gender) it was rewritten for, optionally with the
/// preceding word.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenderLexicon {
    unigram: HashMap<UnigramKey, BTreeMap<String, u32>>,
    bigram: HashMap<BigramKey, BTreeMap<String, u32>>,
}

/// The single person whose gender changes between a base label and a
/// variant key, if exactly one does.
pub fn changed_person(label: &TokenLabel, speaker: Gender, listener: Gender) -> Option<Person> {
    let first = label.get(Person::First).is_some_and(|g| g != speaker);
    let second = label.get(Person::Second).is_some_and(|g| g != listener);
    match (first, second) {
        (true, false) => Some(Person::First),
        (false, true) => Some(Person::Second),
        _ => None,
    }
}

pub fn build_lexicon(tuples: &[CorpusTuple]) -> GenderLexicon {
    let mut lexicon = GenderLexicon::default();
    for tuple in tuples {
        for (&(speaker, listener), variant) in &tuple.variants {
            for (i, (base_tok, var_tok)) in tuple.base.tokens.iter().zip(&variant.tokens).enumerate() {
                if base_tok.surface == var_tok.surface {
                    continue;
                }
                // Tokens where both persons change at once are left to the
                // single-person stages composed by the engine.
                let Some(person) = changed_person(&tuple.labels[i], speaker, listener) else {
                    continue;
                };
                let gender = match person {
                    Person::First => speaker,
                    Person::Second => listener,
                };
                let prev = if i == 0 { BOUNDARY } else { tuple.base.tokens[i - 1].surface.as_str() };
                lexicon.add(prev, &base_tok.surface, GenderMark::new(person, gender), &var_tok.surface, 1);
            }
        }
    }
    lexicon
}

fn ranked(alternatives: &BTreeMap<String, u32>) -> Vec<String> {
    let mut items: Vec<(&String, &u32)> = alternatives.iter().collect();
    // BTreeMap order already gives the lexicographic tie-break.
    items.sort_by(|a, b| b.1.cmp(a.1));
    items.into_iter().map(|(s, _)| s.clone()).collect()
}

impl GenderLexicon {
    pub fn add(&mut self, prev: &str, surface: &str, target: GenderMark, alternative: &str, count: u32) {
        *self
            .unigram
            .entry((surface.to_string(), target.person, target.gender))
            .or_default()
            .entry(alternative.to_string())
            .or_default() += count;
        *self
            .bigram
            .entry((prev.to_string(), surface.to_string(), target.person, target.gender))
            .or_default()
            .entry(alternative.to_string())
            .or_default() += count;
    }

    pub fn unigram(&self, surface: &str, target: GenderMark) -> Option<&BTreeMap<String, u32>> {
        self.unigram.get(&(surface.to_string(), target.person, target.gender))
    }

    pub fn bigram(&self, prev: &str, surface: &str, target: GenderMark) -> Option<&BTreeMap<String, u32>> {
        self.bigram.get(&(prev.to_string(), surface.to_string(), target.person, target.gender))
    }

    /// Alternatives by descending count, ties lexicographic; bigram key first,
    /// then the unigram key.
    pub fn lookup(&self, prev: &str, surface: &str, target: GenderMark) -> Vec<String> {
        self.bigram(prev, surface, target)
            .or_else(|| self.unigram(surface, target))
            .map(ranked)
            .unwrap_or_default()
    }

    pub fn contains(&self, surface: &str, target: GenderMark) -> bool {
        self.unigram(surface, target).is_some()
    }

    pub fn unigram_len(&self) -> usize {
        self.unigram.len()
    }

    pub fn bigram_len(&self) -> usize {
        self.bigram.len()
    }

    /// All unigram keys, sorted.
    pub fn unigram_keys(&self) -> Vec<(String, GenderMark)> {
        let mut keys: Vec<_> = self.unigram.keys().map(|(s, p, g)| (s.clone(), GenderMark::new(*p, *g))).collect();
        keys.sort();
        keys
    }

    /// One line per (key, alternative): `U surface person gender alt count`
    /// or `B prev surface person gender alt count`, sorted.
    pub fn to_tsv(&self) -> String {
        let mut lines = Vec::new();
        for ((surface, p, g), alts) in &self.unigram {
            for (alt, count) in alts {
                lines.push(format!("U\t{surface}\t{}\t{g}\t{alt}\t{count}", p.digit()));
            }
        }
        for ((prev, surface, p, g), alts) in &self.bigram {
            for (alt, count) in alts {
                lines.push(format!("B\t{prev}\t{surface}\t{}\t{g}\t{alt}\t{count}", p.digit()));
            }
        }
        lines.sort();
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, String> {
        let mut lexicon = GenderLexicon::default();
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = || format!("line {}: malformed lexicon entry", n + 1);
            let (keys, rest) = match fields.first() {
                Some(&"U") if fields.len() == 6 => (&fields[1..2], &fields[2..]),
                Some(&"B") if fields.len() == 7 => (&fields[1..3], &fields[3..]),
                _ => return Err(bad()),
            };
            let person = rest[0].chars().next().and_then(Person::from_digit).ok_or_else(bad)?;
            let gender = rest[1].chars().next().and_then(Gender::from_char).ok_or_else(bad)?;
            let count: u32 = rest[3].parse().map_err(|_| bad())?;
            if count == 0 {
                return Err(bad());
            }
            let alts = if keys.len() == 1 {
                lexicon.unigram.entry((keys[0].to_string(), person, gender)).or_default()
            } else {
                lexicon.bigram.entry((keys[0].to_string(), keys[1].to_string(), person, gender)).or_default()
            };
            alts.insert(rest[2].to_string(), count);
        }
        Ok(lexicon)
    }
}
