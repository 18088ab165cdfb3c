//! Unordered representation counts and `B_h[g]` certification.
//!
//! Two solutions of `n = a_1 ∘ … ∘ a_h` are the same when they differ only in
//! the order of the terms, so representations are counted as multisets. A
//! multiset is handled in canonical form: a non-decreasing tuple of indices
//! into the sorted ground set.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::set::{Element, GroundSet, Mode};

/// `C(n + h - 1, h)`, the number of h-multisets over n elements.
pub fn multiset_count(n: usize, h: u32) -> BigUint {
    if h == 0 {
        return BigUint::from(1u32);
    }
    if n == 0 {
        return BigUint::zero();
    }
    let mut acc = BigUint::from(1u32);
    for i in 0..h as usize {
        acc *= BigUint::from(n + i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// Visits every non-decreasing index tuple of length `h` over `elements`
/// together with its value, starting from `seed` (the mode identity when the
/// multiset stands alone). Stops early when `visit` returns `false`.
pub(crate) fn walk_multisets<F>(
    elements: &[Element],
    h: usize,
    mode: Mode,
    seed: Element,
    mut visit: F,
) where
    F: FnMut(&[usize], &Element) -> bool,
{
    if h == 0 {
        visit(&[], &seed);
        return;
    }
    let n = elements.len();
    if n == 0 {
        return;
    }
    let mut idx = vec![0usize; h];
    // partial[d] is the value of the first d terms
    let mut partial = Vec::with_capacity(h + 1);
    partial.push(seed);
    for d in 0..h {
        let next = mode.combine(&partial[d], &elements[0]);
        partial.push(next);
    }
    loop {
        if !visit(&idx, &partial[h]) {
            return;
        }
        // advance the rightmost position that can still grow
        let mut d = h;
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            if idx[d] + 1 < n {
                break;
            }
        }
        idx[d] += 1;
        for j in d + 1..h {
            idx[j] = idx[d];
        }
        for j in d..h {
            let next = mode.combine(&partial[j], &elements[idx[j]]);
            partial[j + 1] = next;
        }
    }
}

fn check_budget(set: &GroundSet, h: u32, budget: u64) -> Result<()> {
    let needed = multiset_count(set.len(), h);
    if needed > BigUint::from(budget) {
        return Err(Error::capacity("multiset enumeration", needed, budget));
    }
    Ok(())
}

fn check_h(h: u32) -> Result<()> {
    if h == 0 {
        return Err(Error::Parameter("h must be at least 1".into()));
    }
    Ok(())
}

fn materialize(set: &GroundSet, idx: &[usize]) -> Vec<Element> {
    idx.iter().map(|&i| set.elements()[i].clone()).collect()
}

/// Number of h-multisets from the set with sum (or product) `n`.
pub fn unordered_rep_count(
    set: &GroundSet,
    h: u32,
    mode: Mode,
    n: &Element,
    budget: u64,
) -> Result<u64> {
    check_h(h)?;
    mode.check(set)?;
    check_budget(set, h, budget)?;
    let mut count = 0;
    walk_multisets(set.elements(), h as usize, mode, mode.identity(), |_, v| {
        if v == n {
            count += 1;
        }
        true
    });
    Ok(count)
}

/// Every h-multiset representing each value of `targets`, in canonical order.
pub(crate) fn collect_representations(
    set: &GroundSet,
    h: u32,
    mode: Mode,
    targets: &HashSet<Element>,
) -> HashMap<Element, Vec<Vec<Element>>> {
    let mut out: HashMap<Element, Vec<Vec<Element>>> = HashMap::new();
    if targets.is_empty() {
        return out;
    }
    walk_multisets(
        set.elements(),
        h as usize,
        mode,
        mode.identity(),
        |idx, v| {
            if targets.contains(v) {
                out.entry(v.clone())
                    .or_default()
                    .push(materialize(set, idx));
            }
            true
        },
    );
    out
}

fn bucket_counts(set: &GroundSet, h: u32, mode: Mode) -> HashMap<Element, u64> {
    let mut counts: HashMap<Element, u64> = HashMap::new();
    walk_multisets(set.elements(), h as usize, mode, mode.identity(), |_, v| {
        *counts.entry(v.clone()).or_insert(0) += 1;
        true
    });
    counts
}

/// The measured minimal `g` for which a set is `B_h[g]`, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidonCertificate {
    pub h: u32,
    pub mode: Mode,
    pub g_measured: u64,
    pub witness: Element,
    pub witness_multisets: Vec<Vec<Element>>,
}

impl SidonCertificate {
    /// Re-checks that the witness multisets are distinct, drawn from `set`,
    /// evaluate to the witness, and that there are `g_measured` of them.
    pub fn is_consistent_with(&self, set: &GroundSet) -> bool {
        let distinct: HashSet<&Vec<Element>> = self.witness_multisets.iter().collect();
        distinct.len() == self.witness_multisets.len()
            && self.witness_multisets.len() as u64 == self.g_measured
            && self.witness_multisets.iter().all(|m| {
                m.len() == self.h as usize
                    && m.windows(2).all(|w| w[0] <= w[1])
                    && m.iter().all(|x| set.contains(x))
                    && self.mode.fold(m) == self.witness
            })
    }
}

/// Computes `max_n` of the unordered count; the witness is the smallest maximizer.
pub fn measure_g(set: &GroundSet, h: u32, mode: Mode, budget: u64) -> Result<SidonCertificate> {
    check_h(h)?;
    if set.is_empty() {
        return Err(Error::Domain("measure_g of an empty set".into()));
    }
    mode.check(set)?;
    check_budget(set, h, budget)?;
    let counts = bucket_counts(set, h, mode);
    let (witness, g) = counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
        .expect("nonempty set has at least one multiset");
    let targets: HashSet<Element> = [witness.clone()].into();
    let mut reps = collect_representations(set, h, mode, &targets);
    Ok(SidonCertificate {
        h,
        mode,
        g_measured: g,
        witness_multisets: reps.remove(&witness).unwrap_or_default(),
        witness,
    })
}

/// A value with more than `g` distinct representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub value: Element,
    pub multisets: Vec<Vec<Element>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub violation: Option<Violation>,
}

/// Decides whether the set is `B_h[g]`. Stops at the first value whose bucket
/// exceeds `g` and reports `g + 1` of its representations.
pub fn is_bhg(set: &GroundSet, h: u32, g: u64, mode: Mode, budget: u64) -> Result<Verdict> {
    check_h(h)?;
    if g == 0 {
        return Err(Error::Parameter("g must be at least 1".into()));
    }
    if set.is_empty() {
        return Ok(Verdict {
            holds: true,
            violation: None,
        });
    }
    mode.check(set)?;
    check_budget(set, h, budget)?;
    let mut counts: HashMap<Element, u64> = HashMap::new();
    let mut offender: Option<Element> = None;
    walk_multisets(set.elements(), h as usize, mode, mode.identity(), |_, v| {
        let c = counts.entry(v.clone()).or_insert(0);
        *c += 1;
        if *c > g {
            offender = Some(v.clone());
            return false;
        }
        true
    });
    let Some(value) = offender else {
        return Ok(Verdict {
            holds: true,
            violation: None,
        });
    };
    let mut multisets = Vec::with_capacity(g as usize + 1);
    walk_multisets(
        set.elements(),
        h as usize,
        mode,
        mode.identity(),
        |idx, v| {
            if *v == value {
                multisets.push(materialize(set, idx));
            }
            (multisets.len() as u64) <= g
        },
    );
    Ok(Verdict {
        holds: false,
        violation: Some(Violation { value, multisets }),
    })
}

/// Every value with more than `g` representations, ascending, each with all
/// of its representing multisets.
pub fn violations(
    set: &GroundSet,
    h: u32,
    g: u64,
    mode: Mode,
    budget: u64,
) -> Result<Vec<Violation>> {
    check_h(h)?;
    if set.is_empty() {
        return Ok(Vec::new());
    }
    mode.check(set)?;
    check_budget(set, h, budget)?;
    let targets: HashSet<Element> = bucket_counts(set, h, mode)
        .into_iter()
        .filter(|&(_, c)| c > g)
        .map(|(v, _)| v)
        .collect();
    let mut out: Vec<Violation> = collect_representations(set, h, mode, &targets)
        .into_iter()
        .map(|(value, multisets)| Violation { value, multisets })
        .collect();
    out.sort_unstable_by(|a, b| a.value.cmp(&b.value));
    Ok(out)
}

/// Hard size cap for [`max_sidon_subset_exact`].
pub const EXACT_SEARCH_LIMIT: usize = 20;

struct ExactSearch<'a> {
    elements: &'a [Element],
    h: usize,
    g: u64,
    mode: Mode,
    chosen: Vec<usize>,
    counts: HashMap<Element, u64>,
    best: Vec<usize>,
}

impl ExactSearch<'_> {
    /// Values of the multisets that use `x` (the largest chosen element so far)
    /// at least once together with elements of the current selection.
    fn new_values(&self, x: usize) -> Vec<Element> {
        let pool: Vec<Element> = self
            .chosen
            .iter()
            .map(|&i| self.elements[i].clone())
            .collect();
        let mut out = Vec::new();
        let mut power = self.mode.identity();
        for copies in 1..=self.h {
            power = self.mode.combine(&power, &self.elements[x]);
            walk_multisets(&pool, self.h - copies, self.mode, power.clone(), |_, v| {
                out.push(v.clone());
                true
            });
        }
        out
    }

    fn try_add(&mut self, x: usize) -> Option<Vec<Element>> {
        let values = self.new_values(x);
        for (i, v) in values.iter().enumerate() {
            let c = self.counts.entry(v.clone()).or_insert(0);
            *c += 1;
            if *c > self.g {
                self.undo(&values[..=i]);
                return None;
            }
        }
        self.chosen.push(x);
        Some(values)
    }

    fn undo(&mut self, values: &[Element]) {
        for v in values {
            let c = self.counts.get_mut(v).expect("value was counted");
            *c -= 1;
            if *c == 0 {
                self.counts.remove(v);
            }
        }
    }

    fn search(&mut self, next: usize) {
        if self.chosen.len() > self.best.len() {
            self.best = self.chosen.clone();
        }
        if next == self.elements.len()
            || self.chosen.len() + (self.elements.len() - next) <= self.best.len()
        {
            return;
        }
        // include first so the first maximum found is lexicographically smallest
        if let Some(values) = self.try_add(next) {
            self.search(next + 1);
            self.chosen.pop();
            self.undo(&values);
        }
        self.search(next + 1);
    }
}

/// A maximum-cardinality `B_h[g]` subset by branch and bound; among maxima the
/// lexicographically smallest. Intended as a test oracle for small sets.
pub fn max_sidon_subset_exact(set: &GroundSet, h: u32, g: u64, mode: Mode) -> Result<GroundSet> {
    check_h(h)?;
    if g == 0 {
        return Err(Error::Parameter("g must be at least 1".into()));
    }
    if set.len() > EXACT_SEARCH_LIMIT {
        return Err(Error::capacity(
            "exact maximum subset search",
            format!("|A| = {}", set.len()),
            EXACT_SEARCH_LIMIT as u64,
        ));
    }
    mode.check(set)?;
    let mut search = ExactSearch {
        elements: set.elements(),
        h: h as usize,
        g,
        mode,
        chosen: Vec::new(),
        counts: HashMap::new(),
        best: Vec::new(),
    };
    search.search(0);
    let best: HashSet<usize> = search.best.into_iter().collect();
    Ok(set.select(|i| best.contains(&i)))
}

/// Number of distinct orderings of a multiset given in canonical form.
pub fn permutation_count(multiset: &[Element]) -> u64 {
    let mut total = 1u64;
    let mut denom = 1u64;
    let mut run = 0u64;
    for i in 0..multiset.len() {
        total *= i as u64 + 1;
        run = if i > 0 && multiset[i] == multiset[i - 1] {
            run + 1
        } else {
            1
        };
        denom *= run;
    }
    total / denom
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::MULTISET_BUDGET;
    use crate::representation::rep_profile;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    const B: u64 = MULTISET_BUDGET;

    fn set(items: &[i64]) -> GroundSet {
        GroundSet::new(items.iter().copied())
    }

    fn n(x: i64) -> Element {
        BigInt::from(x)
    }

    /// Enumerates all multisets via sorted ordered tuples.
    fn brute_unordered(items: &[i64], h: usize, mode: Mode, target: i128) -> u64 {
        let mut seen = HashSet::new();
        let k = items.len();
        if k == 0 {
            return 0;
        }
        let mut idx = vec![0usize; h];
        loop {
            let vals: Vec<i128> = idx.iter().map(|&i| items[i] as i128).collect();
            let v: i128 = match mode {
                Mode::Additive => vals.iter().sum(),
                Mode::Multiplicative => vals.iter().product(),
            };
            if v == target {
                let mut m = vals.clone();
                m.sort();
                seen.insert(m);
            }
            let mut p = 0;
            loop {
                if p == h {
                    return seen.len() as u64;
                }
                idx[p] += 1;
                if idx[p] < k {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multiset_count(4, 2), BigUint::from(10u32));
        assert_eq!(multiset_count(5, 2), BigUint::from(15u32));
        assert_eq!(multiset_count(0, 3), BigUint::zero());
        assert_eq!(multiset_count(50, 3), BigUint::from(22100u32));
    }

    #[test]
    fn unordered_examples() {
        assert_eq!(brute_unordered(&[1, 2, 3], 2, Mode::Additive, 4), 2);
        let a = set(&[1, 2, 3]);
        assert_eq!(
            unordered_rep_count(&a, 2, Mode::Additive, &n(4), B).unwrap(),
            2
        );
        assert_eq!(
            unordered_rep_count(&a, 2, Mode::Additive, &n(2), B).unwrap(),
            1
        );
        assert_eq!(
            unordered_rep_count(&set(&[2, 3]), 2, Mode::Multiplicative, &n(6), B).unwrap(),
            1
        );
    }

    #[test]
    fn measure_examples() {
        let c = measure_g(&set(&[1, 2, 4, 8]), 2, Mode::Additive, B).unwrap();
        assert_eq!(c.g_measured, 1);
        assert_eq!(c.witness, n(2));

        let a = set(&[1, 2, 3, 4, 5]);
        let c = measure_g(&a, 2, Mode::Additive, B).unwrap();
        assert_eq!(c.g_measured, 3);
        assert_eq!(c.witness, n(6));
        assert_eq!(
            c.witness_multisets,
            vec![vec![n(1), n(5)], vec![n(2), n(4)], vec![n(3), n(3)]]
        );
        assert!(c.is_consistent_with(&a));

        let c = measure_g(&set(&[2, 3, 5, 7]), 2, Mode::Multiplicative, B).unwrap();
        assert_eq!(c.g_measured, 1);
    }

    #[test]
    fn measure_errors() {
        assert!(matches!(
            measure_g(&GroundSet::empty(), 2, Mode::Additive, B),
            Err(Error::Domain(_))
        ));
        let a = GroundSet::new(0..100);
        assert!(matches!(
            measure_g(&a, 5, Mode::Additive, 1_000_000),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(
            measure_g(&set(&[0, 1]), 2, Mode::Multiplicative, B),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn verdict_examples() {
        assert!(
            is_bhg(&set(&[1, 2, 4, 8]), 2, 1, Mode::Additive, B)
                .unwrap()
                .holds
        );
        let v = is_bhg(&set(&[1, 2, 3, 4, 5]), 2, 2, Mode::Additive, B).unwrap();
        assert!(!v.holds);
        let w = v.violation.unwrap();
        assert_eq!(w.value, n(6));
        assert_eq!(w.multisets.len(), 3);
        assert!(
            is_bhg(&GroundSet::empty(), 3, 1, Mode::Multiplicative, B)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn violations_list() {
        assert!(violations(&set(&[1, 2, 4, 8]), 2, 1, Mode::Additive, B)
            .unwrap()
            .is_empty());
        let v = violations(&set(&[1, 2, 3, 4, 5]), 2, 1, Mode::Additive, B).unwrap();
        let values: Vec<Element> = v.iter().map(|w| w.value.clone()).collect();
        assert_eq!(values, vec![n(4), n(5), n(6), n(7), n(8)]);
        assert_eq!(v[2].multisets.len(), 3);
    }

    #[test]
    fn exact_search_examples() {
        // of the 16 subsets of {1,2,3,4}, none of size 4 or containing {1,2,3}
        // is Sidon, and {1,2,4} is the lexicographically first of size 3
        let best = max_sidon_subset_exact(&set(&[1, 2, 3, 4]), 2, 1, Mode::Additive).unwrap();
        assert_eq!(best, set(&[1, 2, 4]));
        let sidon = set(&[1, 2, 5, 11]);
        assert_eq!(
            max_sidon_subset_exact(&sidon, 2, 1, Mode::Additive).unwrap(),
            sidon
        );
        assert!(
            max_sidon_subset_exact(&GroundSet::empty(), 2, 1, Mode::Additive)
                .unwrap()
                .is_empty()
        );
        assert!(matches!(
            max_sidon_subset_exact(&GroundSet::new(1..=21), 2, 1, Mode::Additive),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn exact_search_matches_subset_enumeration() {
        let a = set(&[1, 2, 3, 5, 6, 8, 9, 12, 13]);
        for (h, g, mode) in [
            (2, 1, Mode::Additive),
            (2, 2, Mode::Additive),
            (3, 1, Mode::Additive),
            (2, 1, Mode::Multiplicative),
        ] {
            let mut best: Option<GroundSet> = None;
            for mask in 0u32..(1 << a.len()) {
                let sub = a.select(|i| mask & (1 << i) != 0);
                if !is_bhg(&sub, h, g, mode, B).unwrap().holds {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some(b) => {
                        sub.len() > b.len()
                            || (sub.len() == b.len() && sub.elements() < b.elements())
                    }
                };
                if better {
                    best = Some(sub);
                }
            }
            assert_eq!(
                max_sidon_subset_exact(&a, h, g, mode).unwrap(),
                best.unwrap(),
                "h={h} g={g} {mode}"
            );
        }
    }

    #[test]
    fn permutations() {
        assert_eq!(permutation_count(&[n(1), n(1), n(2)]), 3);
        assert_eq!(permutation_count(&[n(1), n(2), n(3)]), 6);
        assert_eq!(permutation_count(&[n(4), n(4), n(4)]), 1);
    }

    proptest! {
        #[test]
        fn measured_g_is_tight(items in prop::collection::vec(1i64..40, 1..10), h in 2u32..4, mul in any::<bool>()) {
            let mode = if mul { Mode::Multiplicative } else { Mode::Additive };
            let a = GroundSet::new(items);
            let c = measure_g(&a, h, mode, B).unwrap();
            prop_assert!(c.is_consistent_with(&a));
            prop_assert!(is_bhg(&a, h, c.g_measured, mode, B).unwrap().holds);
            if c.g_measured >= 2 {
                let v = is_bhg(&a, h, c.g_measured - 1, mode, B).unwrap();
                prop_assert!(!v.holds);
                prop_assert_eq!(v.violation.unwrap().multisets.len() as u64, c.g_measured);
            }
        }

        #[test]
        fn ordered_unordered_bridge(items in prop::collection::vec(-15i64..15, 1..10), h in 1u32..4) {
            let a = GroundSet::new(items);
            let ordered = rep_profile(&a, h, Mode::Additive).unwrap();
            let targets: HashSet<Element> = ordered.iter().map(|(k, _)| k.clone()).collect();
            let reps = collect_representations(&a, h, Mode::Additive, &targets);
            for (value, count) in ordered.iter() {
                let via_multisets: u64 = reps[value].iter().map(|m| permutation_count(m)).sum();
                prop_assert_eq!(via_multisets as u128, count);
                let small = i128::try_from(value).unwrap();
                let raw: Vec<i64> = a.iter().map(|x| i64::try_from(x).unwrap()).collect();
                prop_assert_eq!(reps[value].len() as u64, brute_unordered(&raw, h as usize, Mode::Additive, small));
            }
        }

        #[test]
        fn subsets_of_certified_sets_stay_certified(
            items in prop::collection::vec(1i64..200, 1..12),
            mask in any::<u16>(),
            h in 2u32..4,
        ) {
            let a = GroundSet::new(items);
            let g = measure_g(&a, h, Mode::Additive, B).unwrap().g_measured;
            let sub = a.select(|i| mask & (1 << i) != 0);
            prop_assert!(is_bhg(&sub, h, g, Mode::Additive, B).unwrap().holds);
        }

        #[test]
        fn arity_monotonicity(items in prop::collection::vec(1i64..5000, 1..9), s in 3u32..5) {
            let a = GroundSet::new(items);
            let sidon = max_sidon_subset_exact(&a, s, 1, Mode::Additive).unwrap();
            prop_assert!(is_bhg(&sidon, s, 1, Mode::Additive, B).unwrap().holds);
            prop_assert!(is_bhg(&sidon, s - 1, 1, Mode::Additive, B).unwrap().holds);
        }
    }
}
