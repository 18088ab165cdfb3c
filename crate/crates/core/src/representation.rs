//! Ordered representation functions, higher energies and iterated sum/product sets.
//!
//! Profiles are sparse maps keyed by exact values. The elements handled here
//! include powers of two and prime products, so a dense array over the value
//! range is not an option. Each fold of the convolution costs
//! `O(#keys * |A|)` big-integer operations.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::set::{Element, GroundSet, Mode};

/// `counts[n]` is the number of ordered `arity`-tuples of the set whose sum
/// (or product) is `n`. Keys with count zero are absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepProfile {
    pub mode: Mode,
    pub arity: u32,
    counts: HashMap<Element, u128>,
}

impl RepProfile {
    pub fn get(&self, value: &Element) -> u128 {
        self.counts.get(value).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, u128)> {
        self.counts.iter().map(|(k, &v)| (k, v))
    }

    /// Entries in increasing key order.
    pub fn sorted(&self) -> Vec<(Element, u128)> {
        let mut v: Vec<_> = self.counts.iter().map(|(k, &c)| (k.clone(), c)).collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// Total number of tuples, `|A|^arity`.
    pub fn mass(&self) -> BigUint {
        self.counts.values().map(|&c| BigUint::from(c)).sum()
    }

    /// `Σ_n counts[n]^k`.
    pub fn moment(&self, k: u32) -> BigUint {
        self.counts.values().map(|&c| BigUint::from(c).pow(k)).sum()
    }

    fn singleton_fold(set: &GroundSet) -> HashMap<Element, u128> {
        set.iter().map(|a| (a.clone(), 1u128)).collect()
    }
}

fn overflow() -> Error {
    Error::capacity("representation count", "more than 2^128 tuples", u64::MAX)
}

fn convolve(
    left: &HashMap<Element, u128>,
    right: &HashMap<Element, u128>,
    mode: Mode,
) -> Result<HashMap<Element, u128>> {
    let mut out: HashMap<Element, u128> = HashMap::with_capacity(left.len() * 2);
    for (x, &cx) in left {
        for (y, &cy) in right {
            let c = cx.checked_mul(cy).ok_or_else(overflow)?;
            let slot = out.entry(mode.combine(x, y)).or_insert(0);
            *slot = slot.checked_add(c).ok_or_else(overflow)?;
        }
    }
    Ok(out)
}

fn check_arity(name: &str, value: u32) -> Result<()> {
    if value == 0 {
        return Err(Error::Parameter(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// Ordered representation counts `r_s(A;n)` (additive) or `m_s(A;n)` (multiplicative).
pub fn rep_profile(set: &GroundSet, s: u32, mode: Mode) -> Result<RepProfile> {
    check_arity("s", s)?;
    mode.check(set)?;
    let base = RepProfile::singleton_fold(set);
    let mut counts = base.clone();
    for _ in 1..s {
        counts = convolve(&counts, &base, mode)?;
    }
    Ok(RepProfile {
        mode,
        arity: s,
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnergyValue {
    pub mode: Mode,
    pub s: u32,
    pub k: u32,
    pub value: BigUint,
}

/// `E_{s,k}(A)` in additive mode, `M_{s,k}(A)` in multiplicative mode.
pub fn energy(set: &GroundSet, s: u32, k: u32, mode: Mode) -> Result<EnergyValue> {
    check_arity("k", k)?;
    let profile = rep_profile(set, s, mode)?;
    Ok(EnergyValue {
        mode,
        s,
        k,
        value: profile.moment(k),
    })
}

/// The most popular value of the profile and its count, smallest value on ties.
pub fn sup_rep(set: &GroundSet, s: u32, mode: Mode) -> Result<(Element, u128)> {
    if set.is_empty() {
        return Err(Error::Domain("sup_rep of an empty set".into()));
    }
    let profile = rep_profile(set, s, mode)?;
    let best = profile
        .iter()
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(a.0)))
        .expect("nonempty set has a nonempty profile");
    Ok((best.0.clone(), best.1))
}

fn iterated(set: &GroundSet, h: u32, mode: Mode) -> GroundSet {
    assert!(h >= 1, "iterated set needs h >= 1");
    let mut current: HashSet<Element> = set.iter().cloned().collect();
    for _ in 1..h {
        current = current
            .iter()
            .flat_map(|x| set.iter().map(move |a| mode.combine(x, a)))
            .collect();
    }
    GroundSet::new(current)
}

/// `hA`, the set of h-fold sums.
pub fn iterated_sumset(set: &GroundSet, h: u32) -> GroundSet {
    iterated(set, h, Mode::Additive)
}

/// `A^{(h)}`, the set of h-fold products. Zero is allowed here.
pub fn iterated_productset(set: &GroundSet, h: u32) -> GroundSet {
    iterated(set, h, Mode::Multiplicative)
}

/// Number of `(a_1..a_{2s}) ∈ A_1×…×A_{2s}` with `a_1+…+a_s = a_{s+1}+…+a_{2s}`.
pub fn mixed_additive_count(sets: &[GroundSet]) -> Result<BigUint> {
    if sets.is_empty() || !sets.len().is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "mixed count needs 2s >= 2 sets, got {}",
            sets.len()
        )));
    }
    let s = sets.len() / 2;
    let fold = |group: &[GroundSet]| -> Result<HashMap<Element, u128>> {
        let mut acc = RepProfile::singleton_fold(&group[0]);
        for g in &group[1..] {
            acc = convolve(&acc, &RepProfile::singleton_fold(g), Mode::Additive)?;
        }
        Ok(acc)
    };
    let left = fold(&sets[..s])?;
    let right = fold(&sets[s..])?;
    let (small, large) = if left.len() <= right.len() {
        (&left, &right)
    } else {
        (&right, &left)
    };
    Ok(small
        .iter()
        .filter_map(|(n, &c)| large.get(n).map(|&d| BigUint::from(c) * BigUint::from(d)))
        .sum())
}

/// Both sides of an exact integer inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub lhs: BigUint,
    pub rhs: BigUint,
}

impl Comparison {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

fn size_pow(set: &GroundSet, e: u32) -> BigUint {
    BigUint::from(set.len()).pow(e)
}

/// `E_{s,2}(A) <= |A|^{2s-2l} E_{l,2}(A)` for `l < s` (and the multiplicative analogue).
pub fn energy_descent(set: &GroundSet, s: u32, l: u32, mode: Mode) -> Result<Comparison> {
    if l == 0 || l >= s {
        return Err(Error::Parameter(format!(
            "need 1 <= l < s, got l={l}, s={s}"
        )));
    }
    let lhs = energy(set, s, 2, mode)?.value;
    let rhs = size_pow(set, 2 * s - 2 * l) * energy(set, l, 2, mode)?.value;
    Ok(Comparison { lhs, rhs })
}

/// `mixed_additive_count(A_1..A_{2s})^{2s} <= Π_i E_{s,2}(A_i)`.
pub fn mixed_count_bound(sets: &[GroundSet]) -> Result<Comparison> {
    let count = mixed_additive_count(sets)?;
    let s = (sets.len() / 2) as u32;
    let mut rhs = BigUint::one();
    for set in sets {
        rhs *= energy(set, s, 2, Mode::Additive)?.value;
    }
    Ok(Comparison {
        lhs: count.pow(2 * s),
        rhs,
    })
}

/// `sup_n r_s(A;n) <= E_{s/2,2}(A)` for even `s`.
pub fn sup_rep_bound(set: &GroundSet, s: u32) -> Result<Comparison> {
    if s == 0 || !s.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "s must be even and positive, got {s}"
        )));
    }
    let sup = if set.is_empty() {
        BigUint::zero()
    } else {
        BigUint::from(sup_rep(set, s, Mode::Additive)?.1)
    };
    Ok(Comparison {
        lhs: sup,
        rhs: energy(set, s / 2, 2, Mode::Additive)?.value,
    })
}
