#![allow(dead_code)]

use std::path::PathBuf;

use ginaz::corpus::{parse_corpus, CorpusTuple, ModelBundle};
use ginaz::generate::RuleTable;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn corpus() -> Vec<CorpusTuple> {
    parse_corpus(&data_dir().join("corpus.tsv")).expect("bundled corpus parses")
}

pub fn rules() -> RuleTable {
    RuleTable::parse(&std::fs::read_to_string(data_dir().join("rules.tsv")).unwrap()).unwrap()
}

pub fn bundle(tuples: &[CorpusTuple]) -> ModelBundle {
    ModelBundle::train(tuples, rules()).unwrap()
}
