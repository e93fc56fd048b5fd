//! Sentence-by-sentence rewriting for every requested speaker/listener
//! combination.

use std::fmt;

use crate::corpus::ModelBundle;
use crate::generate::{generate_alternatives, Alternative, AlternativeSet, Provenance};
use crate::identify::identify;
use crate::rank::{select_best, CandidateLattice};
use crate::text::{normalize, tokenize, Gender, GenderMark, Person, Sentence, TargetSpec, TokenLabel};

/// One output variant's target genders; `None` leaves that person untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TargetCombo {
    pub speaker: Option<Gender>,
    pub listener: Option<Gender>,
}

impl TargetCombo {
    pub fn new(speaker: Option<Gender>, listener: Option<Gender>) -> Self {
        TargetCombo { speaker, listener }
    }

    pub fn get(&self, person: Person) -> Option<Gender> {
        match person {
            Person::First => self.speaker,
            Person::Second => self.listener,
        }
    }
}

impl fmt::Display for TargetCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |g: Option<Gender>| g.map(|g| g.to_string()).unwrap_or_else(|| "-".into());
        write!(f, "speaker={} listener={}", show(self.speaker), show(self.listener))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub combo: TargetCombo,
    pub sentences: Vec<Sentence>,
    /// Per sentence, per token: surface differs from the input token.
    pub changed: Vec<Vec<bool>>,
}

impl Variant {
    pub fn text(&self) -> String {
        self.sentences.iter().map(Sentence::text).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RewriteResult {
    pub identified: Vec<(Sentence, Vec<TokenLabel>)>,
    pub variants: Vec<Variant>,
}

impl RewriteResult {
    /// The input text as it was identified.
    pub fn input_text(&self) -> String {
        self.identified.iter().map(|(s, _)| s.text()).collect()
    }
}

/// Speaker F before M, then listener F before M; an empty selection
/// contributes a single absent entry.
pub fn enumerate_targets(spec: &TargetSpec) -> Vec<TargetCombo> {
    if spec.speaker.is_empty() && spec.listener.is_empty() {
        return Vec::new();
    }
    let options = |set: &std::collections::BTreeSet<Gender>| -> Vec<Option<Gender>> {
        if set.is_empty() {
            vec![None]
        } else {
            [Gender::F, Gender::M].into_iter().filter(|g| set.contains(g)).map(Some).collect()
        }
    };
    let listeners = options(&spec.listener);
    options(&spec.speaker)
        .into_iter()
        .flat_map(|s| listeners.iter().map(move |&l| TargetCombo::new(s, l)))
        .collect()
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '؟' | '۔')
}

/// Split at newlines and after terminal punctuation. The raw texts of the
/// returned sentences concatenate back to the input; whitespace following a
/// boundary stays with the sentence before it.
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    let mut pieces: Vec<&str> = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let boundary = c == '\n' || (is_terminator(c) && chars.peek().is_none_or(|&(_, n)| !is_terminator(n)));
        if !boundary {
            continue;
        }
        let mut end = i + c.len_utf8();
        while let Some(&(j, n)) = chars.peek() {
            if n.is_whitespace() {
                end = j + n.len_utf8();
                chars.next();
            } else {
                break;
            }
        }
        pieces.push(&text[start..end]);
        start = end;
    }
    if start < text.len() {
        pieces.push(&text[start..]);
    }

    // Whitespace-only pieces have no tokens; fold them into a neighbour.
    let mut merged: Vec<String> = Vec::new();
    let mut pending = String::new();
    for piece in pieces {
        if piece.trim().is_empty() {
            match merged.last_mut() {
                Some(last) => last.push_str(piece),
                None => pending.push_str(piece),
            }
        } else {
            merged.push(std::mem::take(&mut pending) + piece);
        }
    }
    merged.iter().map(|raw| tokenize(raw)).collect()
}

/// Immutable rewriting pipeline over a loaded model bundle.
#[derive(Debug, Clone)]
pub struct Engine {
    bundle: ModelBundle,
}

impl Engine {
    pub fn new(bundle: ModelBundle) -> Self {
        Engine { bundle }
    }

    pub fn bundle(&self) -> &ModelBundle {
        &self.bundle
    }

    pub fn identify(&self, sentence: &Sentence) -> Vec<TokenLabel> {
        identify(sentence, &self.bundle.identifier)
    }

    pub fn rewrite(&self, text: &str, spec: &TargetSpec) -> RewriteResult {
        self.rewrite_sentences(split_sentences(&normalize(text)), spec)
    }

    /// Rewrite already-split sentences, one output sentence per input sentence.
    pub fn rewrite_sentences(&self, sentences: Vec<Sentence>, spec: &TargetSpec) -> RewriteResult {
        let identified: Vec<(Sentence, Vec<TokenLabel>)> = sentences
            .into_iter()
            .map(|s| {
                let labels = self.identify(&s);
                (s, labels)
            })
            .collect();
        let variants = enumerate_targets(spec)
            .into_iter()
            .map(|combo| {
                let (sentences, changed) =
                    identified.iter().map(|(s, labels)| self.rewrite_labeled(s, labels, combo)).unzip();
                Variant { combo, sentences, changed }
            })
            .collect();
        RewriteResult { identified, variants }
    }

    /// Build the lattice for one sentence under one combination.
    pub fn lattice(&self, sentence: &Sentence, labels: &[TokenLabel], combo: TargetCombo) -> CandidateLattice {
        assert_eq!(sentence.len(), labels.len(), "one label per token");
        let slots = sentence
            .tokens
            .iter()
            .enumerate()
            .map(|(i, token)| {
                let prev = i.checked_sub(1).map(|p| sentence.tokens[p].surface.as_str());
                self.compose(prev, token, &labels[i], combo)
            })
            .collect();
        CandidateLattice::new(sentence.clone(), slots)
    }

    /// Rewrite with given labels; returns the selected sentence and the
    /// per-token changed flags.
    pub fn rewrite_labeled(&self, sentence: &Sentence, labels: &[TokenLabel], combo: TargetCombo) -> (Sentence, Vec<bool>) {
        let lattice = self.lattice(sentence, labels, combo);
        let (best, _) = select_best(&lattice, &self.bundle.lm);
        let changed = best.tokens.iter().zip(&sentence.tokens).map(|(a, b)| a.surface != b.surface).collect();
        (best, changed)
    }

    /// First-person rewrite, then second-person rewrite of each intermediate.
    fn compose(&self, prev: Option<&str>, token: &crate::text::Token, label: &TokenLabel, combo: TargetCombo) -> AlternativeSet {
        let mut current = AlternativeSet::identity(token);
        for person in Person::ALL {
            let Some(gender) = combo.get(person) else { continue };
            if label.get(person).is_none_or(|g| g == gender) {
                continue;
            }
            let target = GenderMark::new(person, gender);
            let mut alternatives: Vec<Alternative> = Vec::new();
            let mut unrewritten = false;
            for alt in &current.alternatives {
                let source = crate::text::Token { surface: alt.surface.clone(), ..token.clone() };
                let set = generate_alternatives(prev, &source, label, target, &self.bundle);
                unrewritten |= set.unrewritten;
                for a in set.alternatives {
                    if !alternatives.iter().any(|x| x.surface == a.surface) {
                        alternatives.push(a);
                    }
                }
            }
            let mut targets = current.targets.clone();
            targets.push(target);
            current = AlternativeSet { source: token.clone(), targets, alternatives, unrewritten };
        }
        current
    }
}

impl Engine {
    /// Provenance of the first candidate in each slot, for diagnostics.
    pub fn trace(&self, sentence: &Sentence, labels: &[TokenLabel], combo: TargetCombo) -> Vec<Provenance> {
        self.lattice(sentence, labels, combo).slots.iter().map(AlternativeSet::provenance).collect()
    }
}
