//! Wire types and the transport-independent request handler.

use std::collections::BTreeSet;

use ginaz::engine::{split_sentences, Engine, TargetCombo};
use ginaz::error::TranslateError;
use ginaz::text::{normalize, tokenize};
use ginaz::translate::{detect_language, translate, Language, MtBackend};
use ginaz::{Gender, Person, Sentence, TargetSpec, TokenLabel};
use serde::{Deserialize, Serialize};

/// Maximum request text size in bytes.
pub const MAX_TEXT_BYTES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewriteRequest {
    pub text: String,
    #[serde(default)]
    pub speaker: Vec<String>,
    #[serde(default)]
    pub listener: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RewriteResponse {
    pub model_version: String,
    pub sentences: Vec<SentenceOut>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SentenceOut {
    /// The Arabic sentence that was identified and rewritten.
    pub text: String,
    /// Original English input when the sentence was machine translated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translated_from: Option<String>,
    pub tokens: Vec<TokenOut>,
    pub variants: Vec<VariantOut>,
}

/// Person 1 is the speaker, 2 the listener, 0 unmarked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenOut {
    pub surface: String,
    pub person: u8,
    pub gender: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<DualMark>,
}

/// Listener mark on a token that also carries a speaker mark.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualMark {
    pub person: u8,
    pub gender: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantOut {
    pub speaker: Option<String>,
    pub listener: Option<String>,
    pub text: String,
    pub tokens: Vec<VariantToken>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantToken {
    pub surface: String,
    pub changed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sentence: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApiError {
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("sentence {index} could not be translated: {detail}")]
    Untranslatable { index: usize, detail: String },
    #[error("translation backend unavailable: {0}")]
    Unavailable(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> u16 {
        match self {
            ApiError::BadRequest(_) => 400,
            ApiError::Untranslatable { .. } => 422,
            ApiError::Unavailable(_) => 503,
            ApiError::Internal(_) => 500,
        }
    }

    pub fn body(&self) -> ErrorBody {
        let (error, detail, sentence) = match self {
            ApiError::BadRequest(d) => ("bad_request", d.clone(), None),
            ApiError::Untranslatable { index, detail } => ("untranslatable", detail.clone(), Some(*index)),
            ApiError::Unavailable(d) => ("mt_unavailable", d.clone(), None),
            ApiError::Internal(d) => ("internal", d.clone(), None),
        };
        ErrorBody { error: error.to_string(), detail, sentence }
    }
}

pub fn gender_code(g: Gender) -> String {
    g.to_string().to_lowercase()
}

fn parse_genders(field: &str, codes: &[String]) -> Result<BTreeSet<Gender>, ApiError> {
    let mut set = BTreeSet::new();
    for code in codes {
        let gender = match code.as_str() {
            "m" => Gender::M,
            "f" => Gender::F,
            other => return Err(ApiError::BadRequest(format!("{field}: unknown gender code {other:?}"))),
        };
        if !set.insert(gender) {
            return Err(ApiError::BadRequest(format!("{field}: duplicate gender code {code:?}")));
        }
    }
    Ok(set)
}

impl RewriteRequest {
    pub fn from_json(body: &[u8]) -> Result<Self, ApiError> {
        serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(format!("malformed request: {e}")))
    }

    pub fn target_spec(&self) -> Result<TargetSpec, ApiError> {
        Ok(TargetSpec { speaker: parse_genders("speaker", &self.speaker)?, listener: parse_genders("listener", &self.listener)? })
    }
}

pub fn token_out(surface: &str, label: &TokenLabel) -> TokenOut {
    let first = label.get(Person::First);
    let second = label.get(Person::Second);
    let (person, gender, dual) = match (first, second) {
        (Some(f), Some(s)) => (1, Some(gender_code(f)), Some(DualMark { person: 2, gender: gender_code(s) })),
        (Some(f), None) => (1, Some(gender_code(f)), None),
        (None, Some(s)) => (2, Some(gender_code(s)), None),
        (None, None) => (0, None, None),
    };
    TokenOut { surface: surface.to_string(), person, gender, dual }
}

/// Translate English sentences; Arabic and mixed-script sentences pass through.
fn prepare(text: &str, backend: &MtBackend) -> Result<Vec<(Sentence, Option<String>)>, ApiError> {
    let mut out = Vec::new();
    for (index, sentence) in split_sentences(&normalize(text)).into_iter().enumerate() {
        let raw = sentence.raw.clone();
        if detect_language(&raw) != Language::English {
            out.push((sentence, None));
            continue;
        }
        match translate(raw.trim(), backend) {
            Ok(arabic) => {
                let separator = &raw[raw.trim_end().len()..];
                let translated = tokenize(&format!("{}{separator}", arabic.trim()));
                out.push((translated, Some(raw.trim().to_string())));
            }
            Err(TranslateError::Untranslatable(detail)) => {
                return Err(ApiError::Untranslatable { index, detail: format!("no translation for {detail:?}") })
            }
            Err(TranslateError::Transport(detail)) => return Err(ApiError::Unavailable(detail)),
            Err(e @ TranslateError::NotEnglish) => return Err(ApiError::Internal(e.to_string())),
        }
    }
    Ok(out)
}

/// Validate, translate, rewrite and serialize one request.
pub fn handle_request(engine: &Engine, backend: &MtBackend, request: &RewriteRequest) -> Result<RewriteResponse, ApiError> {
    if request.text.len() > MAX_TEXT_BYTES {
        return Err(ApiError::BadRequest(format!(
            "text is {} bytes, limit is {MAX_TEXT_BYTES}",
            request.text.len()
        )));
    }
    let spec = request.target_spec()?;
    let prepared = prepare(&request.text, backend)?;
    let (sentences, sources): (Vec<Sentence>, Vec<Option<String>>) = prepared.into_iter().unzip();
    let result = engine.rewrite_sentences(sentences, &spec);

    let sentences = result
        .identified
        .iter()
        .zip(sources)
        .enumerate()
        .map(|(i, ((sentence, labels), translated_from))| SentenceOut {
            text: sentence.text(),
            translated_from,
            tokens: sentence.tokens.iter().zip(labels).map(|(t, l)| token_out(&t.surface, l)).collect(),
            variants: result
                .variants
                .iter()
                .map(|v| variant_out(v.combo, &v.sentences[i], &v.changed[i]))
                .collect(),
        })
        .collect();
    Ok(RewriteResponse { model_version: engine.bundle().fingerprint(), sentences })
}

fn variant_out(combo: TargetCombo, sentence: &Sentence, changed: &[bool]) -> VariantOut {
    VariantOut {
        speaker: combo.speaker.map(gender_code),
        listener: combo.listener.map(gender_code),
        text: sentence.text(),
        tokens: sentence
            .tokens
            .iter()
            .zip(changed)
            .map(|(t, &changed)| VariantToken { surface: t.surface.clone(), changed })
            .collect(),
    }
}

/// Parse a raw JSON body and handle it.
pub fn handle_rewrite(engine: &Engine, backend: &MtBackend, body: &[u8]) -> Result<RewriteResponse, ApiError> {
    handle_request(engine, backend, &RewriteRequest::from_json(body)?)
}
