use std::collections::BTreeMap;

use super::lexicon::changed_person;
use super::CorpusTuple;
use crate::text::{Gender, GenderMark, Person};

pub const MAX_SUFFIX_LEN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedRule {
    pub strip: String,
    pub add: String,
    pub person: Person,
    pub gender: Gender,
    pub weight: u32,
}

impl InducedRule {
    fn strip_len(&self) -> usize {
        self.strip.chars().count()
    }
}

/// Weighted suffix rewrites induced from corpus word pairs, conditioned on
/// the (person, target gender) of the change.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CharTransducer {
    rules: Vec<InducedRule>,
    pub max_suffix_len: usize,
    /// Changed pairs whose residuals were both longer than `max_suffix_len`.
    pub dropped: usize,
}

/// Residual suffixes of a word pair after removing the longest common prefix.
pub fn suffix_pair(from: &str, to: &str) -> (String, String) {
    let common = from.chars().zip(to.chars()).take_while(|(a, b)| a == b).count();
    (from.chars().skip(common).collect(), to.chars().skip(common).collect())
}

pub fn induce_char_rules(tuples: &[CorpusTuple]) -> CharTransducer {
    let mut weights: BTreeMap<(String, String, Person, Gender), u32> = BTreeMap::new();
    let mut dropped = 0;
    for tuple in tuples {
        for (&(speaker, listener), variant) in &tuple.variants {
            for (i, (b, v)) in tuple.base.tokens.iter().zip(&variant.tokens).enumerate() {
                if b.surface == v.surface {
                    continue;
                }
                let Some(person) = changed_person(&tuple.labels[i], speaker, listener) else {
                    continue;
                };
                let gender = if person == Person::First { speaker } else { listener };
                let (strip, add) = suffix_pair(&b.surface, &v.surface);
                if strip.chars().count() > MAX_SUFFIX_LEN && add.chars().count() > MAX_SUFFIX_LEN {
                    dropped += 1;
                    continue;
                }
                *weights.entry((strip, add, person, gender)).or_default() += 1;
            }
        }
    }
    let rules = weights
        .into_iter()
        .map(|((strip, add, person, gender), weight)| InducedRule { strip, add, person, gender, weight })
        .collect();
    CharTransducer::new(rules, MAX_SUFFIX_LEN, dropped)
}

impl CharTransducer {
    pub const MAX_CANDIDATES: usize = 5;

    pub fn new(mut rules: Vec<InducedRule>, max_suffix_len: usize, dropped: usize) -> Self {
        rules.sort_by(|a, b| {
            b.strip_len()
                .cmp(&a.strip_len())
                .then(b.weight.cmp(&a.weight))
                .then_with(|| (&a.strip, &a.add, a.person, a.gender).cmp(&(&b.strip, &b.add, b.person, b.gender)))
        });
        CharTransducer { rules, max_suffix_len, dropped }
    }

    pub fn rules(&self) -> &[InducedRule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rules for `target` whose strip suffix ends `token`, in application order.
    pub fn matching<'a>(&'a self, token: &'a str, target: GenderMark) -> impl Iterator<Item = &'a InducedRule> + 'a {
        self.rules
            .iter()
            .filter(move |r| r.person == target.person && r.gender == target.gender && token.ends_with(r.strip.as_str()))
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("max_suffix_len\t{}\ndropped\t{}\n", self.max_suffix_len, self.dropped);
        for r in &self.rules {
            out.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", r.strip, r.add, r.person.digit(), r.gender, r.weight));
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let mut header = |name: &str| -> Result<usize, String> {
            lines
                .next()
                .and_then(|l| l.strip_prefix(name))
                .and_then(|l| l.strip_prefix('\t'))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| format!("missing {name} header"))
        };
        let max_suffix_len = header("max_suffix_len")?;
        let dropped = header("dropped")?;
        let mut rules = Vec::new();
        for (n, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
            let f: Vec<&str> = line.split('\t').collect();
            let bad = || format!("rule line {}: malformed", n + 3);
            if f.len() != 5 {
                return Err(bad());
            }
            let weight: u32 = f[4].parse().map_err(|_| bad())?;
            if weight == 0 {
                return Err(bad());
            }
            rules.push(InducedRule {
                strip: f[0].to_string(),
                add: f[1].to_string(),
                person: f[2].chars().next().and_then(Person::from_digit).ok_or_else(bad)?,
                gender: f[3].chars().next().and_then(Gender::from_char).ok_or_else(bad)?,
                weight,
            });
        }
        Ok(CharTransducer::new(rules, max_suffix_len, dropped))
    }
}
