//! In-context selection over a lattice of per-token alternatives.

use std::cmp::Ordering;

use crate::corpus::NGramLm;
use crate::error::RankError;
use crate::generate::AlternativeSet;
use crate::text::Sentence;

/// Lattices with at most this many candidate sentences are searched exhaustively.
pub const EXHAUSTIVE_LIMIT: u128 = 4096;
pub const BEAM_WIDTH: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateLattice {
    pub base: Sentence,
    pub slots: Vec<AlternativeSet>,
}

impl CandidateLattice {
    pub fn new(base: Sentence, slots: Vec<AlternativeSet>) -> Self {
        assert_eq!(base.len(), slots.len(), "one slot per token");
        assert!(slots.iter().all(|s| !s.is_empty()), "every slot has an alternative");
        CandidateLattice { base, slots }
    }

    /// Number of candidate sentences, saturating.
    pub fn candidate_count(&self) -> u128 {
        self.slots.iter().fold(1u128, |n, s| n.saturating_mul(s.len() as u128))
    }

    pub fn surfaces(&self, choice: &[usize]) -> Vec<&str> {
        self.slots.iter().zip(choice).map(|(s, &i)| s.alternatives[i].surface.as_str()).collect()
    }

    fn edits(&self, choice: &[usize]) -> usize {
        self.slots
            .iter()
            .zip(choice)
            .zip(&self.base.tokens)
            .filter(|((s, &i), t)| s.alternatives[i].surface != t.surface)
            .count()
    }
}

pub fn lm_score<S: AsRef<str>>(tokens: &[S], lm: &NGramLm) -> Result<f64, RankError> {
    lm.score(tokens)
}

/// Higher score first, then fewer edits against the base, then the
/// lexicographically smaller token sequence.
fn compare(lattice: &CandidateLattice, a: (&[usize], f64), b: (&[usize], f64)) -> Ordering {
    b.1.total_cmp(&a.1)
        .then_with(|| lattice.edits(a.0).cmp(&lattice.edits(b.0)))
        .then_with(|| lattice.surfaces(a.0).cmp(&lattice.surfaces(b.0)))
}

pub fn select_best(lattice: &CandidateLattice, lm: &NGramLm) -> (Sentence, f64) {
    if lattice.base.is_empty() {
        return (lattice.base.clone(), 0.0);
    }
    let (choice, score) = if lattice.candidate_count() <= EXHAUSTIVE_LIMIT {
        exhaustive(lattice, lm)
    } else {
        beam(lattice, lm, BEAM_WIDTH)
    };
    (lattice.base.with_surfaces(&lattice.surfaces(&choice)), score)
}

fn slot_ids(lattice: &CandidateLattice, lm: &NGramLm) -> Vec<Vec<Option<u32>>> {
    lattice
        .slots
        .iter()
        .map(|s| s.alternatives.iter().map(|a| lm.word_id(&a.surface)).collect())
        .collect()
}

fn exhaustive(lattice: &CandidateLattice, lm: &NGramLm) -> (Vec<usize>, f64) {
    let ids = slot_ids(lattice, lm);
    let mut choice = vec![0usize; ids.len()];
    let mut seq: Vec<Option<u32>> = ids.iter().map(|s| s[0]).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        let score = lm.score_ids(&seq).expect("non-empty lattice");
        let better = match &best {
            None => true,
            Some((b, s)) => compare(lattice, (&choice, score), (b, *s)) == Ordering::Less,
        };
        if better {
            best = Some((choice.clone(), score));
        }
        // odometer increment, last slot fastest
        let mut k = ids.len();
        loop {
            if k == 0 {
                return best.expect("at least one candidate");
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < ids[k].len() {
                seq[k] = ids[k][choice[k]];
                break;
            }
            choice[k] = 0;
            seq[k] = ids[k][0];
        }
    }
}

struct BeamState {
    choice: Vec<usize>,
    score: f64,
    history: (Option<u32>, Option<u32>),
}

/// Left-to-right beam search; partial scores sum the same terms, in the same
/// order, as a full sentence score.
fn beam(lattice: &CandidateLattice, lm: &NGramLm, width: usize) -> (Vec<usize>, f64) {
    let ids = slot_ids(lattice, lm);
    let mut states = vec![BeamState { choice: Vec::new(), score: 0.0, history: (NGramLm::BOS, NGramLm::BOS) }];
    for slot in &ids {
        let mut next = Vec::with_capacity(states.len() * slot.len());
        for state in &states {
            let (u, v) = state.history;
            for (i, &w) in slot.iter().enumerate() {
                let mut choice = state.choice.clone();
                choice.push(i);
                next.push(BeamState { choice, score: state.score + lm.term(u, v, w), history: (v, w) });
            }
        }
        next.sort_by(|a, b| compare_prefix(lattice, a, b));
        next.truncate(width);
        states = next;
    }
    for state in &mut states {
        let (u, v) = state.history;
        state.score += lm.term(u, v, NGramLm::EOS);
    }
    states.sort_by(|a, b| compare(lattice, (&a.choice, a.score), (&b.choice, b.score)));
    let best = states.swap_remove(0);
    (best.choice, best.score)
}

fn compare_prefix(lattice: &CandidateLattice, a: &BeamState, b: &BeamState) -> Ordering {
    let edits = |c: &[usize]| {
        c.iter().enumerate().filter(|&(k, &i)| lattice.slots[k].alternatives[i].surface != lattice.base.tokens[k].surface).count()
    };
    let surfaces = |c: &[usize]| -> Vec<&str> {
        c.iter().enumerate().map(|(k, &i)| lattice.slots[k].alternatives[i].surface.as_str()).collect()
    };
    b.score
        .total_cmp(&a.score)
        .then_with(|| edits(&a.choice).cmp(&edits(&b.choice)))
        .then_with(|| surfaces(&a.choice).cmp(&surfaces(&b.choice)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_lm, parse_corpus_str};
    use crate::generate::{Alternative, Provenance};
    use crate::text::{tokenize, Token};

    fn set(token: &Token, alts: &[&str]) -> AlternativeSet {
        AlternativeSet {
            source: token.clone(),
            targets: Vec::new(),
            alternatives: alts
                .iter()
                .map(|s| Alternative { surface: s.to_string(), provenance: Provenance::Morph, hint: 1.0 })
                .collect(),
            unrewritten: false,
        }
    }

    fn lm() -> NGramLm {
        let block = |id: &str, s: &str| format!("#id\t{id}\nB\t{s}\nL\tN N N\nMM\t{s}\nMF\t{s}\nFM\t{s}\nFF\t{s}\n");
        let text = [block("1", "a b c"), block("2", "a b c"), block("3", "x y z"), block("4", "a y c")].join("\n");
        build_lm(&parse_corpus_str(&text).unwrap()).unwrap()
    }

    #[test]
    fn identity_lattice_returns_base() {
        let base = tokenize("a q c");
        let slots = base.tokens.iter().map(AlternativeSet::identity).collect();
        let (best, score) = select_best(&CandidateLattice::new(base.clone(), slots), &lm());
        assert_eq!(best, base);
        assert_eq!(score, lm().score(&["a", "q", "c"]).unwrap());
    }

    #[test]
    fn lm_prefers_trained_trigram() {
        let base = tokenize("a y c");
        let slots = vec![set(&base.tokens[0], &["a"]), set(&base.tokens[1], &["y", "b"]), set(&base.tokens[2], &["c"])];
        let lattice = CandidateLattice::new(base, slots);
        let (best, _) = select_best(&lattice, &lm());
        assert_eq!(best.text(), "a b c");
        // brute force over both candidates
        let lm = lm();
        assert!(lm.score(&["a", "b", "c"]).unwrap() > lm.score(&["a", "y", "c"]).unwrap());
    }

    #[test]
    fn ties_prefer_fewer_edits_then_lexicographic() {
        let lm = lm();
        let base = tokenize("q r");
        // every candidate is out of vocabulary, so scores tie
        let slots = vec![set(&base.tokens[0], &["q2", "q1"]), set(&base.tokens[1], &["r", "r0"])];
        let (best, _) = select_best(&CandidateLattice::new(base.clone(), slots), &lm);
        assert_eq!(best.surfaces(), ["q1", "r"]);
    }

    #[test]
    fn empty_sequence_cannot_be_scored() {
        let empty: [&str; 0] = [];
        assert_eq!(lm_score(&empty, &lm()), Err(RankError::EmptySequence));
    }

    #[test]
    fn scores_are_additive_over_tokens() {
        let lm = lm();
        let ids: Vec<_> = ["a", "b", "q"].iter().map(|w| lm.word_id(w)).collect();
        let prefix = lm.term(NGramLm::BOS, NGramLm::BOS, ids[0]) + lm.term(NGramLm::BOS, ids[0], ids[1]);
        let full = prefix + lm.term(ids[0], ids[1], ids[2]) + lm.term(ids[1], ids[2], NGramLm::EOS);
        assert!((lm_score(&["a", "b", "q"], &lm).unwrap() - full).abs() < 1e-12);
    }

    #[test]
    fn beam_agrees_with_exhaustive_on_small_lattice() {
        let lm = lm();
        let base = tokenize("a y c");
        let slots = vec![
            set(&base.tokens[0], &["x", "a"]),
            set(&base.tokens[1], &["y", "b", "q"]),
            set(&base.tokens[2], &["z", "c"]),
        ];
        let lattice = CandidateLattice::new(base, slots);
        let exhaustive = exhaustive(&lattice, &lm);
        let beamed = beam(&lattice, &lm, 64);
        assert_eq!(exhaustive.0, beamed.0);
        assert_eq!(exhaustive.1, beamed.1);
    }
}
