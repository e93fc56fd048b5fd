//! Word-level gender identification.
//!
//! A surface seen in training with exactly one label keeps that label.
//! Everything else goes to an averaged perceptron over character n-grams of
//! the word and its neighbours.
//!
//! Serialized layout (all integers `u32` little-endian, strings are a `u32`
//! byte length followed by UTF-8 bytes):
//!
//! ```text
//! magic "GZID" | version | class count (9)
//! lexicon entry count, then per entry: surface | label count | (class u8, count)*
//! feature count, then per feature: name | class-count f64 LE weights
//! ```

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::CorpusTuple;
use crate::error::CorpusError;
use crate::text::{Sentence, TokenLabel};

pub const EPOCHS: usize = 10;
pub const SHUFFLE_SEED: u64 = 0x6a7a_2022;
const CLASSES: usize = TokenLabel::ALL.len();
const MAGIC: &[u8; 4] = b"GZID";
const VERSION: u32 = 1;

type Weights = [f64; CLASSES];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IdentifierModel {
    pub label_lexicon: HashMap<String, BTreeMap<TokenLabel, u32>>,
    pub weights: HashMap<String, Weights>,
}

fn features(words: &[&str], i: usize) -> Vec<String> {
    let word = words[i];
    let mut feats = vec!["bias".to_string(), format!("w={word}")];
    let padded: Vec<char> = std::iter::once('^').chain(word.chars()).chain(std::iter::once('$')).collect();
    for n in 1..=4 {
        for gram in padded.windows(n) {
            feats.push(format!("g{n}={}", gram.iter().collect::<String>()));
        }
    }
    let prev = if i > 0 { words[i - 1] } else { "<s>" };
    let prev2 = if i > 1 { words[i - 2] } else { "<s>" };
    let next = words.get(i + 1).copied().unwrap_or("</s>");
    let tail: String = {
        let chars: Vec<char> = prev.chars().collect();
        chars[chars.len().saturating_sub(2)..].iter().collect()
    };
    feats.push(format!("prev={prev}"));
    feats.push(format!("prev2={prev2}"));
    feats.push(format!("next={next}"));
    feats.push(format!("prevtail={tail}"));
    feats.push(format!("prev+w={prev}|{word}"));
    if i == 0 {
        feats.push("first".into());
    }
    if i + 1 == words.len() {
        feats.push("last".into());
    }
    feats
}

fn has_letters(word: &str) -> bool {
    word.chars().any(char::is_alphabetic)
}

struct Perceptron {
    weights: HashMap<String, Weights>,
    totals: HashMap<String, Weights>,
    stamps: HashMap<String, [u64; CLASSES]>,
    instances: u64,
}

impl Perceptron {
    fn new() -> Self {
        Perceptron { weights: HashMap::new(), totals: HashMap::new(), stamps: HashMap::new(), instances: 0 }
    }

    fn predict(weights: &HashMap<String, Weights>, feats: &[String]) -> usize {
        let mut scores = [0.0f64; CLASSES];
        for f in feats {
            if let Some(w) = weights.get(f) {
                for (s, x) in scores.iter_mut().zip(w) {
                    *s += x;
                }
            }
        }
        // first maximum wins, so ties go to the lower class index
        let mut best = 0;
        for c in 1..CLASSES {
            if scores[c] > scores[best] {
                best = c;
            }
        }
        best
    }

    fn update(&mut self, truth: usize, guess: usize, feats: &[String]) {
        self.instances += 1;
        if truth == guess {
            return;
        }
        for f in feats {
            for (class, delta) in [(truth, 1.0), (guess, -1.0)] {
                let w = self.weights.entry(f.clone()).or_insert([0.0; CLASSES]);
                let total = self.totals.entry(f.clone()).or_insert([0.0; CLASSES]);
                let stamp = self.stamps.entry(f.clone()).or_insert([0; CLASSES]);
                total[class] += (self.instances - stamp[class]) as f64 * w[class];
                stamp[class] = self.instances;
                w[class] += delta;
            }
        }
    }

    fn averaged(self) -> HashMap<String, Weights> {
        let n = self.instances.max(1) as f64;
        let mut out = HashMap::new();
        for (f, w) in self.weights {
            let total = self.totals[&f];
            let stamp = self.stamps[&f];
            let mut avg = [0.0; CLASSES];
            for c in 0..CLASSES {
                avg[c] = (total[c] + (self.instances - stamp[c]) as f64 * w[c]) / n;
            }
            if avg.iter().any(|&x| x != 0.0) {
                out.insert(f, avg);
            }
        }
        out
    }
}

/// Every variant sentence of every tuple with its gold labels.
fn labeled_sentences(tuples: &[CorpusTuple]) -> Vec<(&Sentence, Vec<TokenLabel>)> {
    tuples
        .iter()
        .flat_map(|t| t.variants.iter().map(|(&(s, l), v)| (v, t.variant_labels(s, l))))
        .collect()
}

pub fn train_identifier(tuples: &[CorpusTuple]) -> Result<IdentifierModel, CorpusError> {
    if tuples.is_empty() {
        return Err(CorpusError::Empty);
    }
    let sentences = labeled_sentences(tuples);
    let mut label_lexicon: HashMap<String, BTreeMap<TokenLabel, u32>> = HashMap::new();
    let mut examples: Vec<(Vec<String>, usize)> = Vec::new();
    for (sentence, labels) in &sentences {
        let words = sentence.surfaces();
        for (i, label) in labels.iter().enumerate() {
            *label_lexicon.entry(words[i].to_string()).or_default().entry(*label).or_default() += 1;
            examples.push((features(&words, i), label.class_index()));
        }
    }

    let mut model = Perceptron::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SHUFFLE_SEED);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    for _ in 0..EPOCHS {
        order.shuffle(&mut rng);
        for &i in &order {
            let (feats, truth) = &examples[i];
            let guess = Perceptron::predict(&model.weights, feats);
            model.update(*truth, guess, feats);
        }
    }
    Ok(IdentifierModel { label_lexicon, weights: model.averaged() })
}

pub fn identify(sentence: &Sentence, model: &IdentifierModel) -> Vec<TokenLabel> {
    let words = sentence.surfaces();
    (0..words.len()).map(|i| model.label_at(&words, i)).collect()
}

impl IdentifierModel {
    fn label_at(&self, words: &[&str], i: usize) -> TokenLabel {
        if !has_letters(words[i]) {
            return TokenLabel::N;
        }
        if let Some(labels) = self.label_lexicon.get(words[i]) {
            if labels.len() == 1 {
                return *labels.keys().next().expect("non-empty");
            }
        }
        self.classify(words, i)
    }

    /// Classifier decision alone, bypassing the lexicon.
    pub fn classify(&self, words: &[&str], i: usize) -> TokenLabel {
        TokenLabel::ALL[Perceptron::predict(&self.weights, &features(words, i))]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let put_u32 = |out: &mut Vec<u8>, v: u32| out.extend_from_slice(&v.to_le_bytes());
        let put_str = |out: &mut Vec<u8>, s: &str| {
            out.extend_from_slice(&(s.len() as u32).to_le_bytes());
            out.extend_from_slice(s.as_bytes());
        };
        out.extend_from_slice(MAGIC);
        put_u32(&mut out, VERSION);
        put_u32(&mut out, CLASSES as u32);

        let mut surfaces: Vec<&String> = self.label_lexicon.keys().collect();
        surfaces.sort();
        put_u32(&mut out, surfaces.len() as u32);
        for s in surfaces {
            put_str(&mut out, s);
            let labels = &self.label_lexicon[s];
            put_u32(&mut out, labels.len() as u32);
            for (label, count) in labels {
                out.push(label.class_index() as u8);
                put_u32(&mut out, *count);
            }
        }

        let mut names: Vec<&String> = self.weights.keys().collect();
        names.sort();
        put_u32(&mut out, names.len() as u32);
        for name in names {
            put_str(&mut out, name);
            for w in &self.weights[name] {
                out.extend_from_slice(&w.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, String> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err("bad magic".into());
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(format!("identifier version {version}"));
        }
        if r.u32()? as usize != CLASSES {
            return Err("class count mismatch".into());
        }
        let mut label_lexicon = HashMap::new();
        for _ in 0..r.u32()? {
            let surface = r.string()?;
            let mut labels = BTreeMap::new();
            for _ in 0..r.u32()? {
                let class = r.take(1)?[0] as usize;
                let label = *TokenLabel::ALL.get(class).ok_or("class index out of range")?;
                let count = r.u32()?;
                if count == 0 {
                    return Err("zero label count".into());
                }
                labels.insert(label, count);
            }
            label_lexicon.insert(surface, labels);
        }
        let mut weights = HashMap::new();
        for _ in 0..r.u32()? {
            let name = r.string()?;
            let mut w = [0.0; CLASSES];
            for x in w.iter_mut() {
                *x = f64::from_le_bytes(r.take(8)?.try_into().expect("8 bytes"));
            }
            weights.insert(name, w);
        }
        if r.pos != bytes.len() {
            return Err("trailing bytes".into());
        }
        Ok(IdentifierModel { label_lexicon, weights })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or("truncated identifier")?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn string(&mut self) -> Result<String, String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixtures::*;
    use crate::corpus::parse_corpus_str;
    use crate::text::tokenize;

    fn model() -> IdentifierModel {
        train_identifier(&parse_corpus_str(&format!("{DOCTOR_BLOCK}\n{VERB_BLOCK}")).unwrap()).unwrap()
    }

    #[test]
    fn label_lexicon_counts_gold_labels() {
        let m = model();
        let doc = &m.label_lexicon["طبيب"];
        assert_eq!(doc.len(), 1);
        assert_eq!(doc[&"1M".parse().unwrap()], 2);
        assert_eq!(m.label_lexicon["أنا"][&TokenLabel::N], 4);
    }

    #[test]
    fn ambiguous_surfaces_keep_every_label() {
        let you_doc = "#id\tb\nB\tأنت طبيب\nL\tN 2M\nMM\tأنت طبيب\nMF\tأنت طبيبة\nFM\tأنت طبيب\nFF\tأنت طبيبة\n";
        let tuples = parse_corpus_str(&format!("{DOCTOR_BLOCK}\n{you_doc}")).unwrap();
        let m = train_identifier(&tuples).unwrap();
        let doc = &m.label_lexicon["طبيب"];
        assert_eq!(doc[&"1M".parse().unwrap()], 2);
        assert_eq!(doc[&"2M".parse().unwrap()], 2);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(train_identifier(&[]), Err(CorpusError::Empty)));
    }

    #[test]
    fn identifies_doctor_nurse_and_punctuation() {
        let m = model();
        let labels = identify(&tokenize("أنا طبيب وأنت ممرضة"), &m);
        assert_eq!(labels.len(), 4);
        assert_eq!(labels[1].to_string(), "1M");
        assert_eq!(labels[3].to_string(), "2F");
        let labels = identify(&tokenize("123 . ؟ 45"), &m);
        assert!(labels.iter().all(TokenLabel::is_empty));
    }

    #[test]
    fn training_is_deterministic() {
        assert_eq!(model(), model());
    }

    #[test]
    fn binary_round_trip() {
        let m = model();
        let bytes = m.to_bytes();
        assert_eq!(&bytes[..4], b"GZID");
        let back = IdentifierModel::from_bytes(&bytes).unwrap();
        assert_eq!(back, m);
        assert!(IdentifierModel::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }
}
