//! Out-of-context word rewriting: a corpus lookup, then hand-written suffix
//! rules, then induced suffix rules, each consulted only when every earlier
//! stage came back empty.

use std::collections::HashSet;
use std::fmt;

use crate::corpus::{CharTransducer, GenderLexicon, ModelBundle, BOUNDARY};
use crate::error::RuleError;
use crate::text::{normalize, Gender, GenderMark, Person, Token, TokenLabel};

/// Upper bound on candidates produced by any one stage.
pub const STAGE_CAP: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphRule {
    pub id: String,
    pub persons: Vec<Person>,
    pub from: Gender,
    pub to: Gender,
    pub strip: String,
    pub add: String,
    pub priority: i64,
}

/// Suffix rewrite rules, kept in ascending priority order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RuleTable {
    rules: Vec<MorphRule>,
}

impl RuleTable {
    pub fn new(mut rules: Vec<MorphRule>) -> Result<Self, RuleError> {
        let mut ids = HashSet::new();
        for r in &rules {
            if !ids.insert(r.id.clone()) {
                return Err(RuleError::DuplicateId(r.id.clone()));
            }
        }
        rules.sort_by_key(|r| r.priority);
        if let Some(w) = rules.windows(2).find(|w| w[0].priority == w[1].priority) {
            return Err(RuleError::DuplicatePriority(w[0].id.clone(), w[1].id.clone(), w[0].priority));
        }
        Ok(RuleTable { rules })
    }

    /// Parse the TSV rule format: `id persons from to strip add priority`,
    /// `#` comments, `-` for an empty suffix.
    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let mut rules = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: &str| RuleError::Parse { line: n + 1, message: message.to_string() };
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 7 {
                return Err(bad("expected 7 tab-separated fields"));
            }
            let persons = f[1]
                .split(',')
                .map(|p| p.trim().chars().next().and_then(Person::from_digit).filter(|_| p.trim().len() == 1))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("persons must be 1, 2 or 1,2"))?;
            let gender = |s: &str| match s {
                "M" => Some(Gender::M),
                "F" => Some(Gender::F),
                _ => None,
            };
            let from = gender(f[2]).ok_or_else(|| bad("from must be M or F"))?;
            let to = gender(f[3]).ok_or_else(|| bad("to must be M or F"))?;
            if from == to {
                return Err(bad("from and to genders must differ"));
            }
            let affix = |s: &str| if s == "-" { String::new() } else { normalize(s) };
            let (strip, add) = (affix(f[4]), affix(f[5]));
            if strip == add {
                return Err(bad("strip and add are identical"));
            }
            let priority = f[6].trim().parse().map_err(|_| bad("priority must be an integer"))?;
            rules.push(MorphRule { id: f[0].to_string(), persons, from, to, strip, add, priority });
        }
        RuleTable::new(rules)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# id\tpersons\tfrom\tto\tstrip\tadd\tpriority\n");
        let dash = |s: &str| if s.is_empty() { "-".to_string() } else { s.to_string() };
        for r in &self.rules {
            let persons: Vec<String> = r.persons.iter().map(|p| p.digit().to_string()).collect();
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.id,
                persons.join(","),
                r.from,
                r.to,
                dash(&r.strip),
                dash(&r.add),
                r.priority
            ));
        }
        out
    }

    pub fn rules(&self) -> &[MorphRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Corpus,
    Morph,
    Transducer,
    Identity,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Provenance::Corpus => "corpus",
            Provenance::Morph => "morph",
            Provenance::Transducer => "transducer",
            Provenance::Identity => "identity",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alternative {
    pub surface: String,
    pub provenance: Provenance,
    /// Stage-specific strength: a corpus count, a rule rank or an induced
    /// weight. Never used for sentence ranking.
    pub hint: f64,
}

/// Candidate surfaces for one token.
///
/// `targets` lists the marks the alternatives realize; it is empty for an
/// untouched token and has two entries when both persons were rewritten.
#[derive(Debug, Clone, PartialEq)]
pub struct AlternativeSet {
    pub source: Token,
    pub targets: Vec<GenderMark>,
    pub alternatives: Vec<Alternative>,
    /// Rewriting was requested but no stage produced a candidate.
    pub unrewritten: bool,
}

impl AlternativeSet {
    pub fn identity(source: &Token) -> Self {
        AlternativeSet {
            source: source.clone(),
            targets: Vec::new(),
            alternatives: vec![Alternative { surface: source.surface.clone(), provenance: Provenance::Identity, hint: 0.0 }],
            unrewritten: false,
        }
    }

    pub fn surfaces(&self) -> Vec<&str> {
        self.alternatives.iter().map(|a| a.surface.as_str()).collect()
    }

    pub fn provenance(&self) -> Provenance {
        self.alternatives[0].provenance
    }

    pub fn len(&self) -> usize {
        self.alternatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alternatives.is_empty()
    }
}

fn dedup_capped(candidates: impl IntoIterator<Item = String>, source: &str) -> Vec<String> {
    let mut seen = HashSet::new();
    candidates
        .into_iter()
        .filter(|c| !c.is_empty() && c != source && seen.insert(c.clone()))
        .take(STAGE_CAP)
        .collect()
}

/// Bigram key first, unigram key second, by descending count.
pub fn corpus_rewrite(prev: Option<&str>, token: &str, target: GenderMark, lexicon: &GenderLexicon) -> Vec<String> {
    dedup_capped(lexicon.lookup(prev.unwrap_or(BOUNDARY), token, target), token)
}

/// Every rule for the target person rewriting into `target.gender` whose
/// strip suffix ends the token, in priority order.
pub fn morph_rewrite(token: &str, target: GenderMark, rules: &RuleTable) -> Vec<String> {
    let candidates = rules
        .rules()
        .iter()
        .filter(|r| r.to == target.gender && r.persons.contains(&target.person) && token.ends_with(r.strip.as_str()))
        .map(|r| format!("{}{}", &token[..token.len() - r.strip.len()], r.add));
    dedup_capped(candidates, token)
}

pub fn transduce(token: &str, target: GenderMark, transducer: &CharTransducer) -> Vec<String> {
    let candidates = transducer
        .matching(token, target)
        .map(|r| format!("{}{}", &token[..token.len() - r.strip.len()], r.add));
    dedup_capped(candidates, token)
}

/// The backoff cascade for one token and one target mark.
pub fn generate_alternatives(
    prev: Option<&str>,
    token: &Token,
    label: &TokenLabel,
    target: GenderMark,
    models: &ModelBundle,
) -> AlternativeSet {
    match label.get(target.person) {
        Some(current) if current != target.gender => {}
        _ => return AlternativeSet::identity(token),
    }
    let surface = token.surface.as_str();
    let staged = |provenance: Provenance, found: Vec<String>| -> Option<Vec<Alternative>> {
        if found.is_empty() {
            return None;
        }
        let n = found.len();
        Some(
            found
                .into_iter()
                .enumerate()
                .map(|(i, s)| {
                    let hint = match provenance {
                        Provenance::Corpus => models
                            .lexicon
                            .bigram(prev.unwrap_or(BOUNDARY), surface, target)
                            .or_else(|| models.lexicon.unigram(surface, target))
                            .and_then(|m| m.get(&s))
                            .copied()
                            .unwrap_or(0) as f64,
                        _ => (n - i) as f64,
                    };
                    Alternative { surface: s, provenance, hint }
                })
                .collect(),
        )
    };
    let alternatives = staged(Provenance::Corpus, corpus_rewrite(prev, surface, target, &models.lexicon))
        .or_else(|| staged(Provenance::Morph, morph_rewrite(surface, target, &models.rules)))
        .or_else(|| staged(Provenance::Transducer, transduce(surface, target, &models.transducer)));
    match alternatives {
        Some(alternatives) => AlternativeSet { source: token.clone(), targets: vec![target], alternatives, unrewritten: false },
        None => AlternativeSet { targets: vec![target], unrewritten: true, ..AlternativeSet::identity(token) },
    }
}
