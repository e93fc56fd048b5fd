//! The parallel gender corpus and the model builders that train on it.
//!
//! Corpus files are blocks of tab-separated lines, one block per tuple (`<TAB>` marks a tab):
//!
//! ```text
//! #id <TAB> t0001
//! B <TAB> أنا طبيب وأنت ممرضة
//! L <TAB> N 1M N 2F
//! MM <TAB> أنا طبيب وأنت ممرض
//! MF <TAB> أنا طبيب وأنت ممرضة
//! FM <TAB> أنا طبيبة وأنت ممرض
//! FF <TAB> أنا طبيبة وأنت ممرضة
//! ```
//!
//! Variant keys give the speaker gender first and the listener gender second.

mod bundle;
mod lexicon;
mod lm;
mod transducer;

use std::collections::BTreeMap;
use std::path::Path;

pub use bundle::{load_bundle, save_bundle, ModelBundle, FORMAT_VERSION};
pub use lexicon::{build_lexicon, changed_person, GenderLexicon, BOUNDARY};
pub use lm::{build_lm, NGramLm, BACKOFF_ALPHA};
pub use transducer::{induce_char_rules, CharTransducer, InducedRule, MAX_SUFFIX_LEN};

use crate::error::CorpusError;
use crate::text::{normalize, tokenize, Gender, Sentence, TokenLabel};

/// Speaker gender, listener gender.
pub type GenderPair = (Gender, Gender);

pub const VARIANT_KEYS: [GenderPair; 4] = [(Gender::M, Gender::M), (Gender::M, Gender::F), (Gender::F, Gender::M), (Gender::F, Gender::F)];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusTuple {
    pub id: String,
    pub base: Sentence,
    pub labels: Vec<TokenLabel>,
    pub variants: BTreeMap<GenderPair, Sentence>,
}

impl CorpusTuple {
    pub fn variant(&self, speaker: Gender, listener: Gender) -> &Sentence {
        &self.variants[&(speaker, listener)]
    }

    /// Labels of the variant realized with the given genders.
    pub fn variant_labels(&self, speaker: Gender, listener: Gender) -> Vec<TokenLabel> {
        self.labels.iter().map(|l| l.retarget(speaker, listener)).collect()
    }

    /// The (speaker, listener) genders the base sentence is written in.
    /// A person with no marks in the sentence reports `None`.
    pub fn base_genders(&self) -> (Option<Gender>, Option<Gender>) {
        let speaker = self.labels.iter().find_map(|l| l.get(crate::text::Person::First));
        let listener = self.labels.iter().find_map(|l| l.get(crate::text::Person::Second));
        (speaker, listener)
    }

    /// True when no token carries a gender mark.
    pub fn is_neutral(&self) -> bool {
        self.labels.iter().all(TokenLabel::is_empty)
    }
}

pub fn parse_corpus(path: &Path) -> Result<Vec<CorpusTuple>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
    parse_corpus_str(&text)
}

pub fn parse_corpus_str(text: &str) -> Result<Vec<CorpusTuple>, CorpusError> {
    let mut tuples = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !block.is_empty() {
                tuples.push(parse_block(&block)?);
                block.clear();
            }
        } else {
            block.push((i + 1, line));
        }
    }
    if !block.is_empty() {
        tuples.push(parse_block(&block)?);
    }
    Ok(tuples)
}

fn err(line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Parse { line, message: message.into() }
}

fn field<'a>(line: usize, text: &'a str, tag: &str) -> Result<&'a str, CorpusError> {
    match text.split_once('\t') {
        Some((t, rest)) if t == tag => Ok(rest),
        _ => Err(err(line, format!("expected `{tag}<TAB>...`"))),
    }
}

fn parse_block(block: &[(usize, &str)]) -> Result<CorpusTuple, CorpusError> {
    let first_line = block[0].0;
    if block.len() != 7 {
        return Err(err(first_line, format!("tuple block has {} lines, expected 7", block.len())));
    }
    let (id_line, id_text) = block[0];
    let id = field(id_line, id_text, "#id")?.trim().to_string();
    if id.is_empty() {
        return Err(err(id_line, "empty tuple id"));
    }

    let (base_line, base_text) = block[1];
    let base = tokenize(&normalize(field(base_line, base_text, "B")?));
    if base.is_empty() {
        return Err(err(base_line, "base sentence has no tokens"));
    }

    let (label_line, label_text) = block[2];
    let labels = field(label_line, label_text, "L")?
        .split(' ')
        .map(|code| code.parse::<TokenLabel>().map_err(|e| err(label_line, e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    if labels.len() != base.len() {
        return Err(err(label_line, format!("{} labels for {} base tokens", labels.len(), base.len())));
    }

    let mut variants = BTreeMap::new();
    for &(line, text) in &block[3..] {
        let (key, rest) = text.split_once('\t').ok_or_else(|| err(line, "expected variant line"))?;
        let pair = parse_variant_key(key).ok_or_else(|| err(line, format!("unknown variant key {key:?}")))?;
        let sentence = tokenize(&normalize(rest));
        if sentence.len() != base.len() {
            return Err(err(line, format!("variant {key} has {} tokens, base has {}", sentence.len(), base.len())));
        }
        if variants.insert(pair, sentence).is_some() {
            return Err(err(line, format!("duplicate variant {key}")));
        }
    }
    for (s, l) in VARIANT_KEYS {
        if !variants.contains_key(&(s, l)) {
            return Err(err(first_line, format!("missing variant {s}{l}")));
        }
    }

    for (i, label) in labels.iter().enumerate() {
        if !label.is_empty() {
            continue;
        }
        let surface = &base.tokens[i].surface;
        for ((s, l), v) in &variants {
            if &v.tokens[i].surface != surface {
                return Err(err(
                    first_line,
                    format!("token {i} is labeled N but differs in variant {s}{l}"),
                ));
            }
        }
    }

    Ok(CorpusTuple { id, base, labels, variants })
}

fn parse_variant_key(key: &str) -> Option<GenderPair> {
    let mut chars = key.chars();
    match (chars.next(), chars.next(), chars.next()) {
        (Some(s), Some(l), None) if s.is_ascii_uppercase() && l.is_ascii_uppercase() => {
            Some((Gender::from_char(s)?, Gender::from_char(l)?))
        }
        _ => None,
    }
}

/// Deterministic train/held-out split: every fifth tuple is held out.
pub fn split_holdout(tuples: &[CorpusTuple]) -> (Vec<CorpusTuple>, Vec<CorpusTuple>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, t) in tuples.iter().enumerate() {
        if i % 5 == 4 {
            test.push(t.clone());
        } else {
            train.push(t.clone());
        }
    }
    (train, test)
}

#[cfg(test)]
pub(crate) mod fixtures {
    pub const DOCTOR_BLOCK: &str = "#id\tdoctor_nurse\n\
B\tأنا طبيب وأنت ممرضة\n\
L\tN 1M N 2F\n\
MM\tأنا طبيب وأنت ممرض\n\
MF\tأنا طبيب وأنت ممرضة\n\
FM\tأنا طبيبة وأنت ممرض\n\
FF\tأنا طبيبة وأنت ممرضة\n";

    pub const VERB_BLOCK: &str = "#id\tverb1\n\
B\tهل تكتبين رسالة ؟\n\
L\tN 2F N N\n\
MM\tهل تكتب رسالة ؟\n\
MF\tهل تكتبين رسالة ؟\n\
FM\tهل تكتب رسالة ؟\n\
FF\tهل تكتبين رسالة ؟\n";
}
