mod common;

use std::sync::OnceLock;

use common::*;
use ginaz::corpus::NGramLm;
use ginaz::generate::{Alternative, AlternativeSet, Provenance};
use ginaz::rank::{lm_score, select_best, CandidateLattice};
use ginaz::text::tokenize;
use proptest::prelude::*;

fn lm() -> &'static NGramLm {
    static LM: OnceLock<NGramLm> = OnceLock::new();
    LM.get_or_init(|| bundle(&corpus()).lm)
}

const WORDS: [&str; 10] = ["أنا", "طبيب", "طبيبة", "وأنت", "ممرض", "ممرضة", "هل", "أنت", "مستعد", "غريب"];

/// Slots of word indices into `WORDS` plus a hint per alternative.
fn lattice_strategy() -> impl Strategy<Value = Vec<Vec<(usize, f64)>>> {
    prop::collection::vec(prop::collection::vec((0..WORDS.len(), 0.0..10.0f64), 1..4), 1..6)
}

fn build(slots: &[Vec<(usize, f64)>], hint_scale: f64) -> CandidateLattice {
    let text: Vec<&str> = slots.iter().map(|s| WORDS[s[0].0]).collect();
    let base = tokenize(&text.join(" "));
    let slots = base
        .tokens
        .iter()
        .zip(slots)
        .map(|(token, alts)| {
            let mut alternatives: Vec<Alternative> = Vec::new();
            for &(w, hint) in alts {
                if !alternatives.iter().any(|a| a.surface == WORDS[w]) {
                    alternatives.push(Alternative { surface: WORDS[w].to_string(), provenance: Provenance::Morph, hint: hint * hint_scale });
                }
            }
            AlternativeSet { source: token.clone(), targets: Vec::new(), alternatives, unrewritten: false }
        })
        .collect();
    CandidateLattice::new(base, slots)
}

proptest! {
    #[test]
    fn hints_never_affect_selection(slots in lattice_strategy(), scale in 0.0..100.0f64) {
        let (a, _) = select_best(&build(&slots, 1.0), lm());
        let (b, _) = select_best(&build(&slots, scale), lm());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn selection_is_a_lattice_path_with_its_own_score(slots in lattice_strategy()) {
        let lattice = build(&slots, 1.0);
        let (best, score) = select_best(&lattice, lm());
        prop_assert_eq!(best.len(), lattice.slots.len());
        for (token, slot) in best.tokens.iter().zip(&lattice.slots) {
            prop_assert!(slot.surfaces().contains(&token.surface.as_str()));
        }
        prop_assert_eq!(score, lm_score(&best.surfaces(), lm()).unwrap());
        // The base path is a candidate, so the winner scores at least as well.
        prop_assert!(score >= lm_score(&lattice.base.surfaces(), lm()).unwrap());
    }

    #[test]
    fn alternative_order_does_not_matter(slots in lattice_strategy()) {
        let forward = build(&slots, 1.0);
        let mut reversed = forward.clone();
        for slot in &mut reversed.slots {
            slot.alternatives.reverse();
        }
        prop_assert_eq!(select_best(&forward, lm()), select_best(&reversed, lm()));
    }
}
