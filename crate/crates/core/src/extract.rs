//! Sampling and deletion: turning energy bounds into certified `B_s[g]` subsets.
//!
//! [`extract_sidon`] keeps each element independently with probability `p`,
//! then repeatedly enumerates the values with more than `g` representations
//! and deletes one element from each until none remain. The result always
//! carries a fresh certificate.
//!
//! When `p` is not given it is derived as `|A|^{1/s - 1 + δ}`. When `δ` is not
//! given either, the energy exponent gap `c` is measured on the input and
//! converted to `δ` following the deletion argument:
//!
//! | target          | energy       | `c`                                   | `δ`            |
//! |-----------------|--------------|---------------------------------------|----------------|
//! | `g = 1`         | `E_{s,2}`    | `2s - 2 + 1/s - log E / log|A|`       | `c / 2s`       |
//! | `s = 2, g ≥ 2`  | `E_{2,g+1}`  | `k + 1/2 - log E / log|A|`            | `c / 2k`       |
//! | `s ≥ 3, g ≥ 2`  | `E_{s,g+1}`  | `sk - k + 1/s - log E / log|A|`       | `c' / sk`      |
//!
//! with `k = g + 1`, `c' = min((k - 2s) c / k, 1/s)`, and `c`, `c'` floored at 0.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::representation::energy;
use crate::rng::{bernoulli, element_draw, SplitMix64};
use crate::set::{Element, GroundSet, Mode, Rational};
use crate::sidon::{is_bhg, measure_g, violations, SidonCertificate, Violation};
use crate::sigma::sigma_profile;

/// Denominator used when a derived probability is rounded to a rational.
pub const P_DENOMINATOR: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingParams {
    /// Inclusion probability in `(0, 1]`; derived from `delta` when absent.
    pub p: Option<Rational>,
    pub seed: u64,
    /// Exponent offset; measured from the energy when absent.
    pub delta: Option<Rational>,
}

impl SamplingParams {
    pub fn with_p(p: Rational, seed: u64) -> Self {
        SamplingParams {
            p: Some(p),
            seed,
            delta: None,
        }
    }

    /// Keep everything: the deletion loop alone does the work.
    pub fn full(seed: u64) -> Self {
        Self::with_p(Rational::one(), seed)
    }

    pub fn derived(seed: u64) -> Self {
        SamplingParams {
            p: None,
            seed,
            delta: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(p) = &self.p {
            if *p <= Rational::zero() || *p > Rational::one() {
                return Err(Error::Parameter(format!("p must lie in (0, 1], got {p}")));
            }
        }
        if let Some(d) = &self.delta {
            if *d < Rational::zero() {
                return Err(Error::Parameter(format!("delta must be >= 0, got {d}")));
            }
        }
        Ok(())
    }
}

/// Keeps element `i` iff `element_draw(seed, i)` falls below `p`.
pub fn sample_subset(set: &GroundSet, p: &Rational, seed: u64) -> GroundSet {
    set.select(|i| bernoulli(element_draw(seed, i as u64), p))
}

fn round_probability(x: f64) -> Rational {
    let scaled = (x * P_DENOMINATOR as f64).round();
    let num = scaled.clamp(1.0, P_DENOMINATOR as f64) as u64;
    Rational::new(BigInt::from(num), BigInt::from(P_DENOMINATOR))
}

fn ln_big(x: &BigUint) -> f64 {
    // exact enough for parameter choice; bits keep huge values finite
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().unwrap_or(f64::MAX).ln()
    } else {
        let shift = bits - 900;
        (x >> shift).to_f64().unwrap_or(f64::MAX).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn rational_to_f64(x: &Rational) -> f64 {
    x.numer().to_f64().unwrap_or(0.0) / x.denom().to_f64().unwrap_or(1.0)
}

/// The offset `δ` the deletion argument would use for this set (see module docs).
pub fn derived_delta(set: &GroundSet, s: u32, g: u64, mode: Mode) -> Result<f64> {
    if set.len() <= 1 {
        return Ok(0.0);
    }
    let ln_n = (set.len() as f64).ln();
    let (sf, kf) = (s as f64, (g + 1) as f64);
    let k = (g + 1) as u32;
    let delta = if g == 1 {
        let e = energy(set, s, 2, mode)?.value;
        let c = (2.0 * sf - 2.0 + 1.0 / sf - ln_big(&e) / ln_n).max(0.0);
        c / (2.0 * sf)
    } else if s == 2 {
        let e = energy(set, 2, k, mode)?.value;
        let c = (kf + 0.5 - ln_big(&e) / ln_n).max(0.0);
        c / (2.0 * kf)
    } else {
        let e = energy(set, s, k, mode)?.value;
        let c = (sf * kf - kf + 1.0 / sf - ln_big(&e) / ln_n).max(0.0);
        let c_prime = ((kf - 2.0 * sf) * c / kf).min(1.0 / sf).max(0.0);
        c_prime / (sf * kf)
    };
    Ok(delta)
}

/// `p = |A|^{1/s - 1 + δ}` rounded to a multiple of `1 / P_DENOMINATOR`, clamped to `(0, 1]`.
pub fn derived_probability(n: usize, s: u32, delta: f64) -> Rational {
    if n <= 1 {
        return Rational::one();
    }
    let exponent = 1.0 / s as f64 - 1.0 + delta;
    round_probability((n as f64).powf(exponent).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionOutcome {
    pub subset: GroundSet,
    pub s: u32,
    pub g: u64,
    pub mode: Mode,
    /// The probability actually used.
    pub p: Rational,
    pub seed: u64,
    pub sample_size: usize,
    pub deletions: usize,
    pub passes: usize,
    /// Violation witnesses seen across all passes.
    pub witnesses: usize,
    /// `None` only when the subset is empty (vacuously certified).
    pub certificate: Option<SidonCertificate>,
}

pub fn enumerate_violations(
    set: &GroundSet,
    s: u32,
    g: u64,
    mode: Mode,
    budget: u64,
) -> Result<Vec<Violation>> {
    violations(set, s, g, mode, budget)
}

/// Deletions for one pass: witnesses are visited in increasing value order and
/// each one still violating after the deletions made so far loses the largest
/// element among its surviving representations.
fn deletion_pass(found: &[Violation], g: u64) -> Vec<Element> {
    let mut deleted: HashSet<Element> = HashSet::new();
    let mut order = Vec::new();
    for w in found {
        let surviving: Vec<&Vec<Element>> = w
            .multisets
            .iter()
            .filter(|m| !m.iter().any(|x| deleted.contains(x)))
            .collect();
        if surviving.len() as u64 <= g {
            continue;
        }
        let victim = surviving
            .iter()
            .filter_map(|m| m.last())
            .max()
            .expect("multisets are nonempty")
            .clone();
        deleted.insert(victim.clone());
        order.push(victim);
    }
    order
}

pub fn extract_sidon(
    set: &GroundSet,
    s: u32,
    g: u64,
    mode: Mode,
    params: &SamplingParams,
    budget: u64,
) -> Result<ExtractionOutcome> {
    if s == 0 || g == 0 {
        return Err(Error::Parameter("s and g must be at least 1".into()));
    }
    params.validate()?;
    mode.check(set)?;
    let p = match (&params.p, &params.delta) {
        (Some(p), _) => p.clone(),
        (None, Some(delta)) => derived_probability(set.len(), s, rational_to_f64(delta)),
        (None, None) => derived_probability(set.len(), s, derived_delta(set, s, g, mode)?),
    };
    let sample = sample_subset(set, &p, params.seed);
    let sample_size = sample.len();
    let mut current = sample;
    let (mut passes, mut deletions, mut witnesses) = (0, 0, 0);
    loop {
        let found = violations(&current, s, g, mode, budget)?;
        if found.is_empty() {
            break;
        }
        passes += 1;
        witnesses += found.len();
        let victims = deletion_pass(&found, g);
        deletions += victims.len();
        current = current.without(&GroundSet::new(victims));
    }
    debug_assert!(is_bhg(&current, s, g, mode, budget)?.holds);
    let certificate = if current.is_empty() {
        None
    } else {
        Some(measure_g(&current, s, mode, budget)?)
    };
    Ok(ExtractionOutcome {
        subset: current,
        s,
        g,
        mode,
        p,
        seed: params.seed,
        sample_size,
        deletions,
        passes,
        witnesses,
        certificate,
    })
}

/// First-moment bookkeeping of the sampling argument at probability `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedCountReport {
    /// `p |A|`
    pub expected_size: Rational,
    /// `(l, p^l Σ_{l,s,k}(A))` for `2 <= l <= ks`.
    pub terms: Vec<(usize, Rational)>,
    /// `Σ_l p^l Σ_{l,s,k}(A)`
    pub expected_bad: Rational,
    /// `p|A| - 2 Σ_l p^l Σ_{l,s,k}(A)`
    pub margin: Rational,
}

pub fn expected_count_report(
    set: &GroundSet,
    s: u32,
    k: u32,
    mode: Mode,
    p: &Rational,
    budget: u64,
) -> Result<ExpectedCountReport> {
    if *p <= Rational::zero() || *p > Rational::one() {
        return Err(Error::Parameter(format!("p must lie in (0, 1], got {p}")));
    }
    let profile = sigma_profile(set, s as usize, k as usize, mode, budget)?;
    let expected_size = p * Rational::from_integer(BigInt::from(set.len()));
    let terms: Vec<(usize, Rational)> = profile
        .iter()
        .enumerate()
        .skip(2)
        .map(|(l, count)| {
            (
                l,
                Pow::pow(p, l as u32) * Rational::from_integer(BigInt::from(count.clone())),
            )
        })
        .collect();
    let expected_bad: Rational = terms.iter().map(|(_, t)| t.clone()).sum();
    let margin = &expected_size - Rational::from_integer(2.into()) * &expected_bad;
    Ok(ExpectedCountReport {
        expected_size,
        terms,
        expected_bad,
        margin,
    })
}

/// A bipartition `A = B ∪ C` aimed at low additive energy on `B` and low
/// multiplicative energy on `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionOutcome {
    pub b: GroundSet,
    pub c: GroundSet,
    pub e_value: BigUint,
    pub m_value: BigUint,
    /// `max(E_{s,2}(B), M_{s,2}(C))`. The normaliser `|A|^{2s-2+1/s}` is the
    /// same for every bipartition of `A`, so ranking uses this exact value.
    pub objective: BigUint,
    /// `objective / |A|^{2s-2+1/s}` in floating point, for display.
    pub normalized: f64,
    pub exhaustive: bool,
}

/// Largest set for which [`low_energy_decomposition`] may run exhaustively.
pub const EXHAUSTIVE_DECOMPOSITION_LIMIT: usize = 16;

struct Scorer<'a> {
    set: &'a GroundSet,
    s: u32,
    /// zero cannot take part in a product set, so it is pinned to `B`
    pinned: Option<usize>,
}

impl Scorer<'_> {
    fn split(&self, in_b: &[bool]) -> (GroundSet, GroundSet) {
        (self.set.select(|i| in_b[i]), self.set.select(|i| !in_b[i]))
    }

    fn score(&self, in_b: &[bool]) -> Result<(BigUint, BigUint)> {
        let (b, c) = self.split(in_b);
        let e = energy(&b, self.s, 2, Mode::Additive)?.value;
        let m = energy(&c, self.s, 2, Mode::Multiplicative)?.value;
        Ok((e, m))
    }

    fn key(score: &(BigUint, BigUint)) -> (BigUint, BigUint) {
        let (e, m) = score;
        if e >= m {
            (e.clone(), m.clone())
        } else {
            (m.clone(), e.clone())
        }
    }

    fn outcome(&self, in_b: &[bool], exhaustive: bool) -> Result<DecompositionOutcome> {
        let (b, c) = self.split(in_b);
        let (e_value, m_value) = self.score(in_b)?;
        let objective = e_value.clone().max(m_value.clone());
        let trivial = objective_is_zero(&e_value, &m_value);
        let n = self.set.len() as f64;
        let s = self.s as f64;
        let normalized = if self.set.len() <= 1 {
            objective.to_f64().unwrap_or(0.0)
        } else {
            (ln_big(&objective) - (2.0 * s - 2.0 + 1.0 / s) * n.ln()).exp()
        };
        Ok(DecompositionOutcome {
            b,
            c,
            e_value,
            m_value,
            objective,
            normalized: if trivial { 0.0 } else { normalized },
            exhaustive,
        })
    }
}

fn objective_is_zero(e: &BigUint, m: &BigUint) -> bool {
    e.is_zero() && m.is_zero()
}

/// Randomised local search over bipartitions; `exhaustive` enumerates all
/// `2^|A|` bipartitions instead (only for `|A| <= 16`). The objective is
/// compared lexicographically on `(max, min)` of the two energies.
pub fn low_energy_decomposition(
    set: &GroundSet,
    s: u32,
    trials: u32,
    seed: u64,
    exhaustive: bool,
) -> Result<DecompositionOutcome> {
    if s == 0 {
        return Err(Error::Parameter("s must be at least 1".into()));
    }
    let n = set.len();
    let scorer = Scorer {
        set,
        s,
        pinned: set.elements().binary_search(&BigInt::zero()).ok(),
    };
    if exhaustive {
        if n > EXHAUSTIVE_DECOMPOSITION_LIMIT {
            return Err(Error::capacity(
                "exhaustive decomposition",
                format!("|A| = {n}"),
                EXHAUSTIVE_DECOMPOSITION_LIMIT as u64,
            ));
        }
        let mut best: Option<(Vec<bool>, (BigUint, BigUint))> = None;
        for mask in 0u32..(1u32 << n) {
            let in_b: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
            if scorer.pinned.is_some_and(|z| !in_b[z]) {
                continue;
            }
            let key = Scorer::key(&scorer.score(&in_b)?);
            if best.as_ref().is_none_or(|(_, k)| key < *k) {
                best = Some((in_b, key));
            }
        }
        let in_b = best.map(|b| b.0).unwrap_or_default();
        return scorer.outcome(&in_b, true);
    }

    let mut best: Option<(Vec<bool>, (BigUint, BigUint))> = None;
    for trial in 0..trials.max(1) {
        let mut rng = SplitMix64::new(seed ^ (trial as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
        let mut in_b: Vec<bool> = (0..n).map(|_| rng.next_u64() & 1 == 1).collect();
        if let Some(z) = scorer.pinned {
            in_b[z] = true;
        }
        let mut current = Scorer::key(&scorer.score(&in_b)?);
        loop {
            let mut improved = false;
            for i in 0..n {
                if scorer.pinned == Some(i) {
                    continue;
                }
                in_b[i] = !in_b[i];
                let candidate = Scorer::key(&scorer.score(&in_b)?);
                if candidate < current {
                    current = candidate;
                    improved = true;
                } else {
                    in_b[i] = !in_b[i];
                }
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(_, k)| current < *k) {
            best = Some((in_b, current));
        }
    }
    let in_b = best.map(|b| b.0).unwrap_or_default();
    scorer.outcome(&in_b, false)
}

/// Where a pipeline candidate was extracted from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pool {
    /// `B` (additive side) or `C` (multiplicative side) of the decomposition.
    Part,
    /// The whole input set, i.e. the trivial decomposition.
    Whole,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutcome {
    pub best: ExtractionOutcome,
    pub side: Mode,
    pub pool: Pool,
    pub decomposition: DecompositionOutcome,
    /// `log|best| / log|A|`, zero when `|A| <= 1`. Display only.
    pub exponent: f64,
    pub runs: usize,
}

/// Decomposes `A`, then extracts a `B_h^+[g]` subset from `B` and a
/// `B_h^×[g]` subset from `C` and returns the larger one.
///
/// The trivial decompositions (`B = A` and `C = A`) are always tried as well.
/// Every pool is run once with `p = 1` and once per seed of the schedule with
/// the derived `p`.
pub fn theorem_pipeline(
    set: &GroundSet,
    h: u32,
    g: u64,
    seeds: &[u64],
    budget: u64,
) -> Result<PipelineOutcome> {
    if h < 2 {
        return Err(Error::Parameter("h must be at least 2".into()));
    }
    let first_seed = seeds.first().copied().unwrap_or(0);
    let decomposition = low_energy_decomposition(set, h, 4, first_seed, false)?;
    let zero_free = !set.contains(&BigInt::zero());
    let mut pools = vec![
        (decomposition.b.clone(), Mode::Additive, Pool::Part),
        (decomposition.c.clone(), Mode::Multiplicative, Pool::Part),
        (set.clone(), Mode::Additive, Pool::Whole),
    ];
    if zero_free {
        pools.push((set.clone(), Mode::Multiplicative, Pool::Whole));
    }
    let mut best: Option<(ExtractionOutcome, Pool)> = None;
    let mut runs = 0;
    for (pool, mode, origin) in &pools {
        let mut schedule = vec![SamplingParams::full(first_seed)];
        schedule.extend(seeds.iter().map(|&seed| SamplingParams::derived(seed)));
        for params in &schedule {
            let outcome = extract_sidon(pool, h, g, *mode, params, budget)?;
            runs += 1;
            if best
                .as_ref()
                .is_none_or(|(b, _)| outcome.subset.len() > b.subset.len())
            {
                best = Some((outcome, *origin));
            }
        }
    }
    let (best, pool) = best.expect("at least one pool is run");
    let exponent = if set.len() <= 1 || best.subset.is_empty() {
        0.0
    } else {
        (best.subset.len() as f64).ln() / (set.len() as f64).ln()
    };
    Ok(PipelineOutcome {
        side: best.mode,
        best,
        pool,
        decomposition,
        exponent,
        runs,
    })
}
