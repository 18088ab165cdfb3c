//! Hyperbolic incidences `(x1 - y1)(x2 - y2) = λ` and weighted Möbius incidences.
//!
//! Everything is exact over the rationals.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::set::{format_rational, Rational, RationalSet};

/// `x ↦ (u1 x + u2) / (x + u3)` with `u2 ≠ u1 u3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MobiusCoeffs {
    u1: Rational,
    u2: Rational,
    u3: Rational,
}

impl MobiusCoeffs {
    pub fn new(u1: Rational, u2: Rational, u3: Rational) -> Result<Self> {
        if u2 == &u1 * &u3 {
            return Err(Error::Domain(format!(
                "degenerate Möbius map: u2 = u1*u3 for u = ({}, {}, {})",
                format_rational(&u1),
                format_rational(&u2),
                format_rational(&u3)
            )));
        }
        Ok(MobiusCoeffs { u1, u2, u3 })
    }

    pub fn from_integers(u1: i64, u2: i64, u3: i64) -> Result<Self> {
        Self::new(
            Rational::from_integer(u1.into()),
            Rational::from_integer(u2.into()),
            Rational::from_integer(u3.into()),
        )
    }

    pub fn coeffs(&self) -> (&Rational, &Rational, &Rational) {
        (&self.u1, &self.u2, &self.u3)
    }
}

pub fn mobius_apply(u: &MobiusCoeffs, x: &Rational) -> Result<Rational> {
    let den = x + &u.u3;
    if den.is_zero() {
        return Err(Error::Domain(format!(
            "x = {} is the pole of the map",
            format_rational(x)
        )));
    }
    Ok((&u.u1 * x + &u.u2) / den)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceInstance {
    pub x: RationalSet,
    pub y: RationalSet,
    lambda: Rational,
}

impl IncidenceInstance {
    pub fn new(x: RationalSet, y: RationalSet, lambda: Rational) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::Parameter("lambda must be nonzero".into()));
        }
        Ok(IncidenceInstance { x, y, lambda })
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }
}

/// Direct enumeration of `X^2 × Y^2`.
pub fn hyperbolic_count_brute(inst: &IncidenceInstance, budget: u64) -> Result<BigUint> {
    let pairs = BigUint::from(inst.x.len()) * BigUint::from(inst.y.len());
    let required = &pairs * &pairs;
    if required > BigUint::from(budget) {
        return Err(Error::capacity("hyperbolic enumeration", required, budget));
    }
    let diffs: Vec<Rational> = inst
        .x
        .iter()
        .flat_map(|x| inst.y.iter().map(move |y| x - y))
        .collect();
    let mut count = 0u64;
    for d1 in &diffs {
        for d2 in &diffs {
            if &(d1 * d2) == inst.lambda() {
                count += 1;
            }
        }
    }
    Ok(BigUint::from(count))
}

/// `#{(x, y) ∈ X × Y : x - y = d}` for every difference `d`.
pub fn difference_map(x: &RationalSet, y: &RationalSet) -> HashMap<Rational, u64> {
    let mut map = HashMap::new();
    for a in x.iter() {
        for b in y.iter() {
            *map.entry(a - b).or_insert(0) += 1;
        }
    }
    map
}

/// `Σ_{d ≠ 0} r(d) r(λ/d)` from one difference map.
pub fn hyperbolic_count_fast(inst: &IncidenceInstance) -> BigUint {
    let map = difference_map(&inst.x, &inst.y);
    let mut total = BigUint::zero();
    for (d, &r) in &map {
        if d.is_zero() {
            continue;
        }
        if let Some(&r2) = map.get(&(inst.lambda() / d)) {
            total += BigUint::from(r) * BigUint::from(r2);
        }
    }
    total
}

/// `Σ_{x1, x2 ∈ X} Σ_u 1[x2 = M_u(x1)] w(u)`. Poles contribute nothing.
pub fn weighted_mobius_incidences(x: &RationalSet, maps: &[(MobiusCoeffs, u64)]) -> BigUint {
    let mut total = BigUint::zero();
    for (u, w) in maps {
        let hits = x
            .iter()
            .filter(|x1| mobius_apply(u, x1).is_ok_and(|x2| x.contains(&x2)))
            .count();
        total += BigUint::from(hits) * BigUint::from(*w);
    }
    total
}

/// `H` against `|X|^{7/6} |Y|^{3/2}`, compared through sixth powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremRatio {
    pub h: BigUint,
    /// `⌈(|X|^7 |Y|^9)^{1/6}⌉`
    pub bound: BigUint,
    /// `⌈H^6 / (|X|^7 |Y|^9)⌉`; `None` when `X` or `Y` is empty.
    pub k: Option<BigUint>,
    /// `|Y|^2 <= |X| <= |Y|^3`
    pub in_regime: bool,
}

fn ceil_root(v: &BigUint, n: u32) -> BigUint {
    let r = v.nth_root(n);
    if &r.pow(n) < v {
        r + 1u32
    } else {
        r
    }
}

pub fn theorem_ratio(inst: &IncidenceInstance) -> TheoremRatio {
    let h = hyperbolic_count_fast(inst);
    let nx = BigUint::from(inst.x.len());
    let ny = BigUint::from(inst.y.len());
    let scale = nx.pow(7) * ny.pow(9);
    let bound = ceil_root(&scale, 6);
    let k = (!scale.is_zero()).then(|| {
        let (q, r) = h.pow(6).div_rem(&scale);
        if r.is_zero() {
            q
        } else {
            q + BigUint::one()
        }
    });
    let ny2 = &ny * &ny;
    let in_regime = ny2 <= nx && nx <= &ny2 * &ny;
    TheoremRatio {
        h,
        bound,
        k,
        in_regime,
    }
}

/// `c · X` for a rational `c`.
pub fn dilate(set: &RationalSet, c: &Rational) -> RationalSet {
    set.map(|x| x * c)
}

/// `X + t`.
pub fn translate(set: &RationalSet, t: &Rational) -> RationalSet {
    set.map(|x| x + t)
}
