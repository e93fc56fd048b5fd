//! Text primitives and the gender vocabulary shared by every stage.
//!
//! Tokens keep byte offsets into the text they came from, so a rewritten
//! sentence can be spliced back into its original spacing exactly.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::TextError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gender {
    M,
    F,
}

impl Gender {
    pub const ALL: [Gender; 2] = [Gender::M, Gender::F];

    pub fn flip(self) -> Gender {
        match self {
            Gender::M => Gender::F,
            Gender::F => Gender::M,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Gender::M => 'M',
            Gender::F => 'F',
        }
    }

    pub fn from_char(c: char) -> Option<Gender> {
        match c {
            'M' | 'm' => Some(Gender::M),
            'F' | 'f' => Some(Gender::F),
            _ => None,
        }
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Grammatical person of a gender mark: the speaker or the listener.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Person {
    First,
    Second,
}

impl Person {
    pub const ALL: [Person; 2] = [Person::First, Person::Second];

    pub fn digit(self) -> u8 {
        match self {
            Person::First => 1,
            Person::Second => 2,
        }
    }

    pub fn from_digit(d: char) -> Option<Person> {
        match d {
            '1' => Some(Person::First),
            '2' => Some(Person::Second),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GenderMark {
    pub person: Person,
    pub gender: Gender,
}

impl GenderMark {
    pub fn new(person: Person, gender: Gender) -> Self {
        GenderMark { person, gender }
    }
}

impl fmt::Display for GenderMark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.person.digit(), self.gender)
    }
}

/// The gender marks carried by one token.
///
/// One slot per person, so a token can never hold two marks for the same
/// person. The empty label is written `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TokenLabel {
    first: Option<Gender>,
    second: Option<Gender>,
}

impl TokenLabel {
    pub const N: TokenLabel = TokenLabel { first: None, second: None };

    /// Every label code, in classifier class order.
    pub const ALL: [TokenLabel; 9] = [
        TokenLabel::N,
        TokenLabel { first: Some(Gender::M), second: None },
        TokenLabel { first: Some(Gender::F), second: None },
        TokenLabel { first: None, second: Some(Gender::M) },
        TokenLabel { first: None, second: Some(Gender::F) },
        TokenLabel { first: Some(Gender::M), second: Some(Gender::M) },
        TokenLabel { first: Some(Gender::M), second: Some(Gender::F) },
        TokenLabel { first: Some(Gender::F), second: Some(Gender::M) },
        TokenLabel { first: Some(Gender::F), second: Some(Gender::F) },
    ];

    pub fn new(first: Option<Gender>, second: Option<Gender>) -> Self {
        TokenLabel { first, second }
    }

    pub fn from_marks(marks: &[GenderMark]) -> Result<Self, TextError> {
        let mut label = TokenLabel::N;
        for mark in marks {
            if label.get(mark.person).is_some() {
                return Err(TextError::DuplicatePerson(mark.person.digit()));
            }
            label.set(mark.person, Some(mark.gender));
        }
        Ok(label)
    }

    pub fn get(&self, person: Person) -> Option<Gender> {
        match person {
            Person::First => self.first,
            Person::Second => self.second,
        }
    }

    pub fn set(&mut self, person: Person, gender: Option<Gender>) {
        match person {
            Person::First => self.first = gender,
            Person::Second => self.second = gender,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_none() && self.second.is_none()
    }

    pub fn marks(&self) -> impl Iterator<Item = GenderMark> + '_ {
        Person::ALL
            .into_iter()
            .filter_map(|p| self.get(p).map(|g| GenderMark::new(p, g)))
    }

    /// Position of this label in [`TokenLabel::ALL`].
    pub fn class_index(&self) -> usize {
        TokenLabel::ALL
            .iter()
            .position(|l| l == self)
            .expect("ALL enumerates every label")
    }

    /// The label this token would carry once each present person is
    /// realized with the given gender.
    pub fn retarget(&self, speaker: Gender, listener: Gender) -> TokenLabel {
        TokenLabel {
            first: self.first.map(|_| speaker),
            second: self.second.map(|_| listener),
        }
    }
}

impl fmt::Display for TokenLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("N");
        }
        let codes: Vec<String> = self.marks().map(|m| m.to_string()).collect();
        f.write_str(&codes.join("+"))
    }
}

impl FromStr for TokenLabel {
    type Err = TextError;

    fn from_str(code: &str) -> Result<Self, Self::Err> {
        if code == "N" {
            return Ok(TokenLabel::N);
        }
        let mut marks = Vec::new();
        for part in code.split('+') {
            let mut chars = part.chars();
            let (Some(p), Some(g), None) = (chars.next(), chars.next(), chars.next()) else {
                return Err(TextError::UnknownLabel(code.to_string()));
            };
            let person = Person::from_digit(p).ok_or_else(|| TextError::UnknownLabel(code.to_string()))?;
            let gender = match g {
                'M' => Gender::M,
                'F' => Gender::F,
                _ => return Err(TextError::UnknownLabel(code.to_string())),
            };
            marks.push(GenderMark::new(person, gender));
        }
        // Only the canonical speaker-first spelling is accepted.
        let label = TokenLabel::from_marks(&marks).map_err(|_| TextError::UnknownLabel(code.to_string()))?;
        if label.to_string() != code {
            return Err(TextError::UnknownLabel(code.to_string()));
        }
        Ok(label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub raw: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    /// Same offsets and raw text, new surfaces.
    pub fn with_surfaces<S: AsRef<str>>(&self, surfaces: &[S]) -> Sentence {
        assert_eq!(surfaces.len(), self.tokens.len(), "one surface per token");
        let tokens = self
            .tokens
            .iter()
            .zip(surfaces)
            .map(|(t, s)| Token { surface: s.as_ref().to_string(), start: t.start, end: t.end })
            .collect();
        Sentence { raw: self.raw.clone(), tokens }
    }

    /// The sentence text with current surfaces spliced into the original gaps.
    pub fn text(&self) -> String {
        detokenize(self).expect("sentence offsets are consistent")
    }
}

/// Speaker and listener gender selections; either may be empty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TargetSpec {
    pub speaker: BTreeSet<Gender>,
    pub listener: BTreeSet<Gender>,
}

impl TargetSpec {
    pub fn new(speaker: impl IntoIterator<Item = Gender>, listener: impl IntoIterator<Item = Gender>) -> Self {
        TargetSpec { speaker: speaker.into_iter().collect(), listener: listener.into_iter().collect() }
    }

    pub fn none() -> Self {
        TargetSpec::default()
    }

    pub fn all() -> Self {
        TargetSpec::new(Gender::ALL, Gender::ALL)
    }
}

/// NFC normalization and nothing else.
pub fn normalize(text: &str) -> String {
    text.nfc().collect()
}

pub fn normalize_bytes(bytes: &[u8]) -> Result<String, TextError> {
    let text = std::str::from_utf8(bytes).map_err(|e| TextError::Decode(e.valid_up_to()))?;
    Ok(normalize(text))
}

pub fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '،' | '؛' | '؟' | '٪' | '٫' | '٬' | '۔' | '«' | '»' | '…' | '“' | '”' | '‘' | '’' | '–' | '—' | '¡' | '¿'
        )
}

pub fn tokenize(text: &str) -> Sentence {
    let mut tokens = Vec::new();
    let mut word_start: Option<usize> = None;
    let flush = |start: &mut Option<usize>, end: usize, tokens: &mut Vec<Token>| {
        if let Some(s) = start.take() {
            tokens.push(Token { surface: text[s..end].to_string(), start: s, end });
        }
    };
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            flush(&mut word_start, i, &mut tokens);
        } else if is_punctuation(c) {
            flush(&mut word_start, i, &mut tokens);
            let end = i + c.len_utf8();
            tokens.push(Token { surface: text[i..end].to_string(), start: i, end });
        } else if word_start.is_none() {
            word_start = Some(i);
        }
    }
    flush(&mut word_start, text.len(), &mut tokens);
    Sentence { raw: text.to_string(), tokens }
}

/// Rebuild text from token surfaces and the gaps between the original
/// token offsets.
pub fn detokenize(sentence: &Sentence) -> Result<String, TextError> {
    let raw = &sentence.raw;
    let mut out = String::with_capacity(raw.len());
    let mut cursor = 0usize;
    for (i, token) in sentence.tokens.iter().enumerate() {
        let valid = token.start >= cursor
            && token.start < token.end
            && token.end <= raw.len()
            && raw.is_char_boundary(token.start)
            && raw.is_char_boundary(token.end);
        if !valid {
            return Err(TextError::Offsets { index: i, start: token.start, end: token.end });
        }
        out.push_str(&raw[cursor..token.start]);
        out.push_str(&token.surface);
        cursor = token.end;
    }
    out.push_str(&raw[cursor..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DOCTOR_NURSE: &str = "أنا طبيب وأنت ممرضة";

    #[test]
    fn normalize_fixed_points() {
        assert_eq!(normalize(""), "");
        assert_eq!(normalize(DOCTOR_NURSE), DOCTOR_NURSE);
        // tatweel and alef variants are not touched
        assert_eq!(normalize("إأآا ـ"), "إأآا ـ");
    }

    #[test]
    fn normalize_composes_decomposed_pairs() {
        // alef + combining hamza above composes to U+0623 under NFC
        assert_eq!(normalize("\u{0627}\u{0654}"), "\u{0623}");
        assert_eq!(normalize("e\u{0301}"), "\u{00e9}");
        // fatha after kaf has no precomposed form
        assert_eq!(normalize("كَ"), "كَ");
    }

    #[test]
    fn normalize_bytes_rejects_invalid_utf8() {
        assert_eq!(normalize_bytes(&[0x61, 0xff]), Err(TextError::Decode(1)));
        assert_eq!(normalize_bytes("ا".as_bytes()).unwrap(), "ا");
    }

    #[test]
    fn tokenize_examples() {
        let s = tokenize(DOCTOR_NURSE);
        assert_eq!(s.surfaces(), ["أنا", "طبيب", "وأنت", "ممرضة"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("مرحبا.").surfaces(), ["مرحبا", "."]);
        assert_eq!(tokenize("هل أنت مستعد؟").surfaces(), ["هل", "أنت", "مستعد", "؟"]);
        assert_eq!(tokenize("عزيزي، تعال").surfaces(), ["عزيزي", "،", "تعال"]);
    }

    #[test]
    fn detokenize_splices_replacements() {
        let s = tokenize(DOCTOR_NURSE);
        let mut surfaces: Vec<&str> = s.surfaces();
        surfaces[1] = "طبيبة";
        assert_eq!(s.with_surfaces(&surfaces).text(), "أنا طبيبة وأنت ممرضة");
    }

    #[test]
    fn detokenize_keeps_double_spaces() {
        let s = tokenize("أنا  طبيب");
        assert_eq!(detokenize(&s.with_surfaces(&["أنا", "طبيبة"])).unwrap(), "أنا  طبيبة");
    }

    #[test]
    fn detokenize_rejects_bad_offsets() {
        let mut s = tokenize("ab cd");
        s.tokens[1].start = 1;
        assert!(matches!(detokenize(&s), Err(TextError::Offsets { index: 1, .. })));
    }

    #[test]
    fn label_codes() {
        for label in TokenLabel::ALL {
            assert_eq!(label.to_string().parse::<TokenLabel>().unwrap(), label);
        }
        assert_eq!("1M+2F".parse::<TokenLabel>().unwrap().marks().count(), 2);
        assert!("2F+1M".parse::<TokenLabel>().is_err());
        assert!("1M+1F".parse::<TokenLabel>().is_err());
        assert!("3M".parse::<TokenLabel>().is_err());
        assert!("".parse::<TokenLabel>().is_err());
        let dup = [GenderMark::new(Person::First, Gender::M), GenderMark::new(Person::First, Gender::F)];
        assert!(TokenLabel::from_marks(&dup).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_byte_identical(text in "[ \\ta-z.,؟،أنتطبيمرضة\u{064e}\n]{0,40}") {
            let s = tokenize(&text);
            prop_assert_eq!(detokenize(&s).unwrap(), text.clone());
        }

        #[test]
        fn offsets_partition_non_gap_bytes(text in "\\PC{0,30}") {
            let s = tokenize(&text);
            let covered: usize = s.tokens.iter().map(|t| t.end - t.start).sum();
            let non_gap = text.chars().filter(|c| !c.is_whitespace()).map(char::len_utf8).sum::<usize>();
            prop_assert_eq!(covered, non_gap);
            for pair in s.tokens.windows(2) {
                prop_assert!(pair[0].end <= pair[1].start);
            }
            prop_assert_eq!(detokenize(&s).unwrap(), text);
        }

        #[test]
        fn normalize_is_idempotent(text in "\\PC{0,30}") {
            let once = normalize(&text);
            prop_assert_eq!(normalize(&once), once);
        }
    }
}
