//! English to Arabic front stage: language detection plus a pluggable
//! machine translation backend.

use std::collections::HashMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::TranslateError;
use crate::text::normalize;

pub const MT_URL_VAR: &str = "GINAZ_MT_URL";
pub const MT_KEY_VAR: &str = "GINAZ_MT_KEY";
const DEFAULT_TIMEOUT_MS: u64 = 5000;

/// Share of letters one script needs before text counts as that language.
pub const SCRIPT_MAJORITY: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Language {
    Arabic,
    English,
    Mixed,
}

fn is_arabic_letter(c: char) -> bool {
    c.is_alphabetic()
        && matches!(c as u32, 0x0600..=0x06FF | 0x0750..=0x077F | 0x08A0..=0x08FF | 0xFB50..=0xFDFF | 0xFE70..=0xFEFF)
}

fn is_latin_letter(c: char) -> bool {
    c.is_alphabetic() && matches!(c as u32, 0x0041..=0x024F)
}

pub fn detect_language(text: &str) -> Language {
    let (mut arabic, mut latin, mut letters) = (0usize, 0usize, 0usize);
    for c in text.chars().filter(|c| c.is_alphabetic()) {
        letters += 1;
        if is_arabic_letter(c) {
            arabic += 1;
        } else if is_latin_letter(c) {
            latin += 1;
        }
    }
    if letters == 0 {
        return Language::Mixed;
    }
    let share = |n: usize| n as f64 / letters as f64;
    if share(arabic) >= SCRIPT_MAJORITY {
        Language::Arabic
    } else if share(latin) >= SCRIPT_MAJORITY {
        Language::English
    } else {
        Language::Mixed
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalConfig {
    pub url: String,
    pub key: Option<String>,
    pub timeout_ms: u64,
}

impl ExternalConfig {
    /// Reads `GINAZ_MT_URL` and `GINAZ_MT_KEY`; `None` when no URL is set.
    pub fn from_env() -> Option<Self> {
        let url = std::env::var(MT_URL_VAR).ok().filter(|u| !u.is_empty())?;
        Some(ExternalConfig { url, key: std::env::var(MT_KEY_VAR).ok(), timeout_ms: DEFAULT_TIMEOUT_MS })
    }
}

/// Offline exact-match phrase table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StubTable {
    phrases: HashMap<String, String>,
}

impl Default for StubTable {
    fn default() -> Self {
        let mut phrases = HashMap::new();
        for (en, ar) in [
            ("I am a doctor and you are a nurse", "أنا طبيب وأنت ممرضة"),
            ("I am a doctor", "أنا طبيب"),
            ("You are a nurse", "أنت ممرضة"),
            ("I am tired today", "أنا متعب اليوم ."),
            ("Are you ready?", "هل أنت مستعد ؟"),
            ("Thank you, my friend", "شكرا يا صديقي ."),
        ] {
            phrases.insert(en.to_string(), ar.to_string());
        }
        StubTable { phrases }
    }
}

impl StubTable {
    pub fn insert(&mut self, english: &str, arabic: &str) {
        self.phrases.insert(Self::key(english), normalize(arabic));
    }

    /// Trailing whitespace and one final period are ignored.
    fn key(text: &str) -> String {
        let t = text.trim();
        t.strip_suffix('.').unwrap_or(t).trim_end().to_string()
    }

    pub fn lookup(&self, text: &str) -> Option<&str> {
        self.phrases.get(&Self::key(text)).map(String::as_str)
    }

    /// Load `english<TAB>arabic` lines on top of the built-in fixtures.
    pub fn with_tsv(mut self, text: &str) -> Self {
        for line in text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
            if let Some((en, ar)) = line.split_once('\t') {
                self.insert(en, ar);
            }
        }
        self
    }
}

#[derive(Debug, Clone)]
pub enum MtBackend {
    External(ExternalConfig),
    Stub(StubTable),
}

impl Default for MtBackend {
    fn default() -> Self {
        MtBackend::Stub(StubTable::default())
    }
}

impl MtBackend {
    /// External when `GINAZ_MT_URL` is set, the stub otherwise.
    pub fn from_env() -> Self {
        ExternalConfig::from_env().map(MtBackend::External).unwrap_or_default()
    }
}

#[derive(Serialize)]
struct MtRequest<'a> {
    q: &'a str,
    source: &'a str,
    target: &'a str,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct MtResponse {
    translated_text: String,
}

/// Translate English text to Arabic. Blocking; call off the async runtime.
pub fn translate(text: &str, backend: &MtBackend) -> Result<String, TranslateError> {
    if detect_language(text) != Language::English {
        return Err(TranslateError::NotEnglish);
    }
    match backend {
        MtBackend::Stub(table) => {
            table.lookup(text).map(str::to_string).ok_or_else(|| TranslateError::Untranslatable(text.to_string()))
        }
        MtBackend::External(config) => call_external(text, config),
    }
}

fn call_external(text: &str, config: &ExternalConfig) -> Result<String, TranslateError> {
    let transport = |e: reqwest::Error| TranslateError::Transport(e.to_string());
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_millis(config.timeout_ms.max(1)))
        .build()
        .map_err(transport)?;
    let mut request = client.post(&config.url).json(&MtRequest { q: text, source: "en", target: "ar" });
    if let Some(key) = &config.key {
        request = request.bearer_auth(key);
    }
    let response = request.send().map_err(transport)?;
    if !response.status().is_success() {
        return Err(TranslateError::Transport(format!("backend returned {}", response.status())));
    }
    let body: MtResponse = response.json().map_err(transport)?;
    Ok(normalize(&body.translated_text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn language_detection() {
        assert_eq!(detect_language("مرحبا"), Language::Arabic);
        assert_eq!(detect_language("hello"), Language::English);
        // 5 Latin letters against 10 Arabic ones: 2/3 Arabic, below 0.8
        assert_eq!(detect_language("hello مرحبا عزيزي"), Language::Mixed);
        // 15 Arabic letters against 2 Latin: 0.88
        assert_eq!(detect_language("ok مرحبا عزيزي مرحبا"), Language::Arabic);
        assert_eq!(detect_language("123 ."), Language::Mixed);
    }

    #[test]
    fn stub_translates_fixture() {
        let backend = MtBackend::default();
        assert_eq!(translate("I am a doctor and you are a nurse", &backend).unwrap(), "أنا طبيب وأنت ممرضة");
        assert_eq!(translate("I am a doctor and you are a nurse.", &backend).unwrap(), "أنا طبيب وأنت ممرضة");
    }

    #[test]
    fn stub_miss_and_arabic_input() {
        let backend = MtBackend::default();
        assert!(matches!(translate("quantum pancake", &backend), Err(TranslateError::Untranslatable(_))));
        assert!(matches!(translate("أنا طبيب", &backend), Err(TranslateError::NotEnglish)));
    }

    #[test]
    fn stub_table_from_tsv_is_normalized() {
        let table = StubTable::default().with_tsv("# extra\nhi\t\u{0627}\u{0654}هلا\n");
        assert_eq!(table.lookup("hi"), Some("أهلا"));
    }

    #[test]
    fn unreachable_backend_is_a_transport_error() {
        let backend = MtBackend::External(ExternalConfig { url: "http://127.0.0.1:9/translate".into(), key: None, timeout_ms: 500 });
        assert!(matches!(translate("hello", &backend), Err(TranslateError::Transport(_))));
    }
}
