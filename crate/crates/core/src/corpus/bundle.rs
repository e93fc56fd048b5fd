use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{build_lexicon, build_lm, induce_char_rules, CharTransducer, CorpusTuple, GenderLexicon, NGramLm};
use crate::error::{BundleError, CorpusError};
use crate::generate::RuleTable;
use crate::identify::{train_identifier, IdentifierModel};

pub const FORMAT_VERSION: u32 = 1;

const MANIFEST: &str = "manifest.json";
const LEXICON: &str = "lexicon.tsv";
const LM: &str = "lm.tsv";
const TRANSDUCER: &str = "transducer.tsv";
const IDENTIFIER: &str = "identifier.bin";
const RULES: &str = "rules.tsv";

/// Every trained or hand-written model the pipeline needs.
#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub lexicon: GenderLexicon,
    pub lm: NGramLm,
    pub transducer: CharTransducer,
    pub identifier: IdentifierModel,
    pub rules: RuleTable,
    pub format_version: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    files: BTreeMap<String, String>,
}

impl ModelBundle {
    pub fn train(tuples: &[CorpusTuple], rules: RuleTable) -> Result<Self, CorpusError> {
        Ok(ModelBundle {
            lexicon: build_lexicon(tuples),
            lm: build_lm(tuples)?,
            transducer: induce_char_rules(tuples),
            identifier: train_identifier(tuples)?,
            rules,
            format_version: FORMAT_VERSION,
        })
    }

    /// A bundle with no knowledge: identity everywhere, uniform LM.
    pub fn empty() -> Self {
        ModelBundle {
            lexicon: GenderLexicon::default(),
            lm: NGramLm::from_tsv("alpha\t0.4\n1\t</s>\t1\n").expect("static LM"),
            transducer: CharTransducer::default(),
            identifier: IdentifierModel::default(),
            rules: RuleTable::default(),
            format_version: FORMAT_VERSION,
        }
    }

    /// Short content digest of the bundle files, for health reporting.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for bytes in self.component_bytes().values() {
            hasher.update(bytes);
        }
        hex::encode(hasher.finalize())[..12].to_string()
    }

    fn component_bytes(&self) -> BTreeMap<&'static str, Vec<u8>> {
        BTreeMap::from([
            (LEXICON, self.lexicon.to_tsv().into_bytes()),
            (LM, self.lm.to_tsv().into_bytes()),
            (TRANSDUCER, self.transducer.to_tsv().into_bytes()),
            (IDENTIFIER, self.identifier.to_bytes()),
            (RULES, self.rules.to_tsv().into_bytes()),
        ])
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BundleError + '_ {
    move |source| BundleError::Io { path: path.to_path_buf(), source }
}

pub fn save_bundle(bundle: &ModelBundle, dir: &Path) -> Result<(), BundleError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files = BTreeMap::new();
    for (name, bytes) in bundle.component_bytes() {
        let path = dir.join(name);
        fs::write(&path, &bytes).map_err(io_err(&path))?;
        files.insert(name.to_string(), hex::encode(Sha256::digest(&bytes)));
    }
    let manifest = Manifest { format_version: bundle.format_version, files };
    let path = dir.join(MANIFEST);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(io_err(&path))
}

pub fn load_bundle(dir: &Path) -> Result<ModelBundle, BundleError> {
    let manifest_path = dir.join(MANIFEST);
    let manifest_text = match fs::read_to_string(&manifest_path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(BundleError::Missing(MANIFEST.into())),
        Err(e) => return Err(io_err(&manifest_path)(e)),
    };
    let manifest: Manifest = serde_json::from_str(&manifest_text)
        .map_err(|e| BundleError::Malformed { file: MANIFEST.into(), message: e.to_string() })?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(BundleError::Version { found: manifest.format_version, expected: FORMAT_VERSION });
    }

    let read = |name: &str| -> Result<Vec<u8>, BundleError> {
        let expected = manifest.files.get(name).ok_or_else(|| BundleError::Missing(name.into()))?;
        let path = dir.join(name);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(BundleError::Missing(name.into())),
            Err(e) => return Err(io_err(&path)(e)),
        };
        if &hex::encode(Sha256::digest(&bytes)) != expected {
            return Err(BundleError::Checksum(name.into()));
        }
        Ok(bytes)
    };
    let text = |name: &str| -> Result<String, BundleError> {
        String::from_utf8(read(name)?).map_err(|e| BundleError::Malformed { file: name.into(), message: e.to_string() })
    };
    let malformed = |file: &str| {
        let file = file.to_string();
        move |message: String| BundleError::Malformed { file, message }
    };

    Ok(ModelBundle {
        lexicon: GenderLexicon::from_tsv(&text(LEXICON)?).map_err(malformed(LEXICON))?,
        lm: NGramLm::from_tsv(&text(LM)?).map_err(malformed(LM))?,
        transducer: CharTransducer::from_tsv(&text(TRANSDUCER)?).map_err(malformed(TRANSDUCER))?,
        identifier: IdentifierModel::from_bytes(&read(IDENTIFIER)?).map_err(malformed(IDENTIFIER))?,
        rules: RuleTable::parse(&text(RULES)?)?,
        format_version: manifest.format_version,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::parse_corpus_str;
    use super::*;

    fn trained() -> ModelBundle {
        let tuples = parse_corpus_str(&format!("{DOCTOR_BLOCK}\n{VERB_BLOCK}")).unwrap();
        let rules = RuleTable::parse("r1\t1,2\tM\tF\t-\tة\t1\n").unwrap();
        ModelBundle::train(&tuples, rules).unwrap()
    }

    #[test]
    fn save_then_load_is_observationally_identical() {
        let dir = tempfile::tempdir().unwrap();
        let bundle = trained();
        save_bundle(&bundle, dir.path()).unwrap();
        let back = load_bundle(dir.path()).unwrap();
        assert_eq!(back.lexicon, bundle.lexicon);
        assert_eq!(back.transducer, bundle.transducer);
        assert_eq!(back.identifier, bundle.identifier);
        assert_eq!(back.rules, bundle.rules);
        let s = ["أنا", "طبيبة", "وأنت", "ممرض"];
        assert_eq!(back.lm.score(&s).unwrap(), bundle.lm.score(&s).unwrap());
        assert_eq!(back.fingerprint(), bundle.fingerprint());
    }

    #[test]
    fn empty_dir_reports_missing_component() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_bundle(dir.path()), Err(BundleError::Missing(f)) if f == "manifest.json"));
        save_bundle(&trained(), dir.path()).unwrap();
        fs::remove_file(dir.path().join(LM)).unwrap();
        assert!(matches!(load_bundle(dir.path()), Err(BundleError::Missing(f)) if f == LM));
    }

    #[test]
    fn flipped_byte_fails_checksum() {
        let dir = tempfile::tempdir().unwrap();
        save_bundle(&trained(), dir.path()).unwrap();
        let path = dir.path().join(IDENTIFIER);
        let mut bytes = fs::read(&path).unwrap();
        bytes[10] ^= 0x01;
        fs::write(&path, bytes).unwrap();
        assert!(matches!(load_bundle(dir.path()), Err(BundleError::Checksum(f)) if f == IDENTIFIER));
    }

    #[test]
    fn version_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let mut bundle = trained();
        bundle.format_version = FORMAT_VERSION + 1;
        save_bundle(&bundle, dir.path()).unwrap();
        assert!(matches!(load_bundle(dir.path()), Err(BundleError::Version { .. })));
    }
}
