//! Edit-level F-beta and BLEU.

use std::collections::{BTreeSet, HashMap};

use crate::corpus::{CorpusTuple, VARIANT_KEYS};
use crate::engine::{Engine, TargetCombo};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edit {
    /// Source token index; for an insertion, the index it is inserted before.
    pub index: usize,
    pub from: String,
    pub to: String,
}

pub type EditSet = BTreeSet<Edit>;

fn edit(index: usize, from: &str, to: &str) -> Edit {
    Edit { index, from: from.to_string(), to: to.to_string() }
}

/// Token edits turning `source` into `target`: positional substitutions
/// when lengths match, a Levenshtein alignment otherwise.
pub fn extract_edits<S: AsRef<str>, T: AsRef<str>>(source: &[S], target: &[T]) -> EditSet {
    if source.len() == target.len() {
        return source
            .iter()
            .zip(target)
            .enumerate()
            .filter(|(_, (s, t))| s.as_ref() != t.as_ref())
            .map(|(i, (s, t))| edit(i, s.as_ref(), t.as_ref()))
            .collect();
    }
    let (n, m) = (source.len(), target.len());
    let mut dist = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in dist.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in dist[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub = dist[i - 1][j - 1] + usize::from(source[i - 1].as_ref() != target[j - 1].as_ref());
            dist[i][j] = sub.min(dist[i - 1][j] + 1).min(dist[i][j - 1] + 1);
        }
    }
    let mut edits = EditSet::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        if i > 0 && j > 0 {
            let same = source[i - 1].as_ref() == target[j - 1].as_ref();
            if dist[i][j] == dist[i - 1][j - 1] + usize::from(!same) {
                if !same {
                    edits.insert(edit(i - 1, source[i - 1].as_ref(), target[j - 1].as_ref()));
                }
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && dist[i][j] == dist[i - 1][j] + 1 {
            edits.insert(edit(i - 1, source[i - 1].as_ref(), ""));
            i -= 1;
        } else {
            edits.insert(edit(i, "", target[j - 1].as_ref()));
            j -= 1;
        }
    }
    edits
}

/// True/false positive and false negative edit counts, summable over a corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EditCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl EditCounts {
    pub fn compare(hyp: &EditSet, reference: &EditSet) -> Self {
        let tp = hyp.intersection(reference).count();
        EditCounts { tp, fp: hyp.len() - tp, fn_: reference.len() - tp }
    }

    pub fn add(&mut self, other: EditCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }

    pub fn precision(&self) -> f64 {
        if self.tp + self.fp == 0 {
            1.0
        } else {
            self.tp as f64 / (self.tp + self.fp) as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.tp + self.fn_ == 0 {
            1.0
        } else {
            self.tp as f64 / (self.tp + self.fn_) as f64
        }
    }

    pub fn f_beta(&self, beta: f64) -> f64 {
        if self.tp == 0 {
            return if self.fp == 0 && self.fn_ == 0 { 1.0 } else { 0.0 };
        }
        let (p, r) = (self.precision(), self.recall());
        let b2 = beta * beta;
        (1.0 + b2) * p * r / (b2 * p + r)
    }
}

pub fn f_beta(hyp: &EditSet, reference: &EditSet, beta: f64) -> f64 {
    EditCounts::compare(hyp, reference).f_beta(beta)
}

pub const BLEU_ORDER: usize = 4;

/// Clipped n-gram matches and totals, summable over a corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [usize; BLEU_ORDER],
    pub totals: [usize; BLEU_ORDER],
    pub hyp_len: usize,
    pub ref_len: usize,
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
        }
    }
    counts
}

impl BleuStats {
    pub fn sentence<S: AsRef<str>, T: AsRef<str>>(hyp: &[S], reference: &[T]) -> Self {
        let mut stats = BleuStats { hyp_len: hyp.len(), ref_len: reference.len(), ..Default::default() };
        for n in 1..=BLEU_ORDER {
            let h = ngram_counts(hyp, n);
            let r = ngram_counts(reference, n);
            stats.matches[n - 1] = h.iter().map(|(g, &c)| c.min(r.get(g).copied().unwrap_or(0))).sum();
            stats.totals[n - 1] = hyp.len().saturating_sub(n - 1);
        }
        stats
    }

    pub fn add(&mut self, other: &BleuStats) {
        for n in 0..BLEU_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// Uniform weights, brevity penalty, add-one smoothing for n >= 2.
    pub fn score(&self) -> f64 {
        if self.hyp_len == 0 || self.matches[0] == 0 {
            return 0.0;
        }
        let mut log_sum = (self.matches[0] as f64 / self.totals[0] as f64).ln();
        for n in 1..BLEU_ORDER {
            log_sum += ((self.matches[n] + 1) as f64 / (self.totals[n] + 1) as f64).ln();
        }
        let bp = if self.hyp_len > self.ref_len { 1.0 } else { (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp() };
        bp * (log_sum / BLEU_ORDER as f64).exp()
    }
}

pub fn bleu<S: AsRef<str>, T: AsRef<str>>(hyp: &[S], reference: &[T]) -> f64 {
    BleuStats::sentence(hyp, reference).score()
}

pub fn corpus_bleu<S: AsRef<str>, T: AsRef<str>>(pairs: &[(Vec<S>, Vec<T>)]) -> f64 {
    let mut stats = BleuStats::default();
    for (h, r) in pairs {
        stats.add(&BleuStats::sentence(h, r));
    }
    stats.score()
}

/// Corpus-level scores of the full pipeline against gold variants.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalReport {
    pub edits: EditCounts,
    pub bleu: f64,
    /// BLEU of the unmodified input against the gold variants.
    pub bleu_identity: f64,
    pub sentence_accuracy: f64,
    pub identification_accuracy: f64,
    pub sentences: usize,
}

impl EvalReport {
    /// `(metric, value)` pairs in a fixed order.
    pub fn metrics(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("f0.5", self.edits.f_beta(0.5)),
            ("precision", self.edits.precision()),
            ("recall", self.edits.recall()),
            ("bleu", self.bleu),
            ("bleu_identity", self.bleu_identity),
            ("sentence_accuracy", self.sentence_accuracy),
            ("identification_accuracy", self.identification_accuracy),
        ]
    }
}

/// Rewrite every tuple's base sentence to each of its four variants using
/// predicted labels, and score the output.
pub fn evaluate(engine: &Engine, tuples: &[CorpusTuple]) -> EvalReport {
    let mut report = EvalReport::default();
    let (mut bleu, mut identity) = (BleuStats::default(), BleuStats::default());
    let (mut exact, mut labels_ok, mut labels_total) = (0usize, 0usize, 0usize);
    for tuple in tuples {
        let labels = engine.identify(&tuple.base);
        labels_total += labels.len();
        labels_ok += labels.iter().zip(&tuple.labels).filter(|(a, b)| a == b).count();
        let source = tuple.base.surfaces();
        for (s, l) in VARIANT_KEYS {
            let (hyp, _) = engine.rewrite_labeled(&tuple.base, &labels, TargetCombo::new(Some(s), Some(l)));
            let hyp = hyp.surfaces();
            let gold = tuple.variant(s, l).surfaces();
            report.edits.add(EditCounts::compare(&extract_edits(&source, &hyp), &extract_edits(&source, &gold)));
            bleu.add(&BleuStats::sentence(&hyp, &gold));
            identity.add(&BleuStats::sentence(&source, &gold));
            exact += usize::from(hyp == gold);
            report.sentences += 1;
        }
    }
    report.bleu = bleu.score();
    report.bleu_identity = identity.score();
    let ratio = |a: usize, b: usize| if b == 0 { 1.0 } else { a as f64 / b as f64 };
    report.sentence_accuracy = ratio(exact, report.sentences);
    report.identification_accuracy = ratio(labels_ok, labels_total);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn positional_edits() {
        assert!(extract_edits(&["a", "b"], &["a", "b"]).is_empty());
        let edits = extract_edits(&["أنا", "طبيب", "وأنت", "ممرضة"], &["أنا", "طبيبة", "وأنت", "ممرضة"]);
        assert_eq!(edits, EditSet::from([edit(1, "طبيب", "طبيبة")]));
    }

    #[test]
    fn length_mismatch_uses_alignment() {
        let edits = extract_edits(&["a", "b", "c"], &["a", "b", "x", "c"]);
        assert_eq!(edits, EditSet::from([edit(2, "", "x")]));
        let edits = extract_edits(&["a", "b", "x", "c"], &["a", "y", "c"]);
        assert_eq!(edits.len(), 2);
        assert!(edits.contains(&edit(1, "b", "y")) || edits.contains(&edit(2, "x", "y")));
    }

    #[test]
    fn f_beta_fixtures() {
        let e = |i: usize| edit(i, "x", "y");
        let reference = EditSet::from([e(0)]);
        assert_eq!(f_beta(&reference, &reference, 0.5), 1.0);
        assert_eq!(f_beta(&EditSet::new(), &EditSet::new(), 0.5), 1.0);
        assert_eq!(f_beta(&EditSet::new(), &reference, 0.5), 0.0);
        let hyp = EditSet::from([e(0), e(1)]);
        let f = f_beta(&hyp, &reference, 0.5);
        // P = 1/2, R = 1: 1.25 * 0.5 / (0.25 * 0.5 + 1) = 0.5556
        assert!((f - 0.5556).abs() < 1e-4, "{f}");
        // swapped: P = 1, R = 1/2: 1.25 * 0.5 / (0.25 + 0.5) = 0.8333
        assert!((f_beta(&reference, &hyp, 0.5) - 0.8333).abs() < 1e-4);
    }

    #[test]
    fn bleu_fixtures() {
        assert_eq!(bleu(&["a", "b", "c", "d"], &["a", "b", "c", "d"]), 1.0);
        let empty: [&str; 0] = [];
        assert_eq!(bleu(&empty, &["a"]), 0.0);
        // p1 = 3/4, p2 = (1+1)/(3+1), p3 = (0+1)/(2+1), p4 = (0+1)/(1+1);
        // product 1/16, fourth root 0.5, no brevity penalty
        let b = bleu(&["a", "b", "c", "d"], &["a", "b", "x", "d"]);
        assert!((b - 0.5).abs() < 1e-12, "{b}");
        // brevity: hyp of 2 against ref of 4
        let b = bleu(&["a", "b"], &["a", "b", "c", "d"]);
        let expected = (1.0f64 - 2.0).exp() * (1.0f64 * (2.0 / 2.0) * 1.0 * 1.0).powf(0.25);
        assert!((b - expected).abs() < 1e-12);
    }

    #[test]
    fn corpus_bleu_aggregates_counts() {
        let pairs = vec![(vec!["a", "b"], vec!["a", "b"]), (vec!["c", "d"], vec!["c", "d"])];
        assert_eq!(corpus_bleu(&pairs), 1.0);
    }

    proptest! {
        #[test]
        fn bleu_of_self_is_one(tokens in prop::collection::vec("[a-e]{1,3}", 1..12)) {
            prop_assert!((bleu(&tokens, &tokens) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn bleu_non_increasing_under_corruption(
            tokens in prop::collection::vec("[a-e]{1,3}", 4..12),
            order in Just(()).prop_perturb(|_, mut rng| {
                let mut idx: Vec<usize> = (0..12).collect();
                for i in (1..idx.len()).rev() {
                    let j = (rng.next_u32() as usize) % (i + 1);
                    idx.swap(i, j);
                }
                idx
            }),
        ) {
            let positions: Vec<usize> = order.into_iter().filter(|&i| i < tokens.len()).collect();
            let mut hyp = tokens.clone();
            let mut last = bleu(&hyp, &tokens);
            for (k, &p) in positions.iter().enumerate() {
                hyp[p] = format!("#{k}");
                let now = bleu(&hyp, &tokens);
                prop_assert!(now <= last + 1e-12, "{now} > {last}");
                last = now;
            }
        }

        #[test]
        fn alignment_edits_never_identity(a in prop::collection::vec("[ab]", 0..6), b in prop::collection::vec("[ab]", 0..6)) {
            for e in extract_edits(&a, &b) {
                prop_assert_ne!(e.from, e.to);
            }
        }
    }
}
