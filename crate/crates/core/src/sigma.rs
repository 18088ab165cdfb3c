//! Counting `(k,l)`-complex solutions of the equal-block system
//!
//! ```text
//! a_{1,1} ∘ … ∘ a_{1,s} = a_{2,1} ∘ … ∘ a_{2,s} = … = a_{k,1} ∘ … ∘ a_{k,s}
//! ```
//!
//! where the `ks` entries take exactly `l` distinct values and the `k` blocks
//! are pairwise distinct as multisets, plus the exact linear algebra used to
//! bound the number of solutions of a linear system in terms of its rank.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::representation::{energy, Comparison};
use crate::set::{Element, GroundSet, Mode, Rational};
use crate::sidon::{permutation_count, walk_multisets};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComplexityClass {
    pub k: usize,
    pub s: usize,
    pub l: usize,
    pub blocks_pairwise_distinct: bool,
}

fn sorted_block(block: &[Element]) -> Vec<&Element> {
    let mut b: Vec<&Element> = block.iter().collect();
    b.sort_unstable();
    b
}

pub fn classify_tuple(t: &[Element], s: usize, k: usize) -> Result<ComplexityClass> {
    if s == 0 || k == 0 || t.len() != s * k {
        return Err(Error::Parameter(format!(
            "tuple of length {} does not split into {k} blocks of {s}",
            t.len()
        )));
    }
    let l = t.iter().collect::<HashSet<_>>().len();
    let blocks: Vec<Vec<&Element>> = t.chunks(s).map(sorted_block).collect();
    let distinct = blocks.iter().collect::<HashSet<_>>().len() == k;
    Ok(ComplexityClass {
        k,
        s,
        l,
        blocks_pairwise_distinct: distinct,
    })
}

/// A block multiset inside one value bucket.
struct Block {
    indices: Vec<usize>,
    orderings: u128,
}

struct Stratifier<'a> {
    blocks: &'a [Block],
    k: usize,
    used: Vec<bool>,
    multiplicity: Vec<u32>,
    distinct: usize,
    by_l: &'a mut [u128],
}

impl Stratifier<'_> {
    fn run(&mut self, depth: usize, weight: u128) -> Result<()> {
        if depth == self.k {
            let slot = &mut self.by_l[self.distinct];
            *slot = slot.checked_add(weight).ok_or_else(overflow)?;
            return Ok(());
        }
        for b in 0..self.blocks.len() {
            if self.used[b] {
                continue;
            }
            self.used[b] = true;
            for &i in &self.blocks[b].indices {
                if self.multiplicity[i] == 0 {
                    self.distinct += 1;
                }
                self.multiplicity[i] += 1;
            }
            let w = weight
                .checked_mul(self.blocks[b].orderings)
                .ok_or_else(overflow)?;
            self.run(depth + 1, w)?;
            for &i in &self.blocks[b].indices {
                self.multiplicity[i] -= 1;
                if self.multiplicity[i] == 0 {
                    self.distinct -= 1;
                }
            }
            self.used[b] = false;
        }
        Ok(())
    }
}

fn overflow() -> Error {
    Error::capacity("sigma count", "more than 2^128 solutions", u64::MAX)
}

/// `Σ_{l,s,k}(A)` for every `l` at once: entry `l` of the result counts the
/// ordered `ks`-tuples with equal block values, pairwise distinct block
/// multisets, and exactly `l` distinct entries. Entry 0 is always zero.
pub fn sigma_profile(
    set: &GroundSet,
    s: usize,
    k: usize,
    mode: Mode,
    budget: u64,
) -> Result<Vec<BigUint>> {
    if s == 0 || k == 0 {
        return Err(Error::Parameter("s and k must be at least 1".into()));
    }
    mode.check(set)?;
    let blocks_needed = BigUint::from(set.len()).pow(s as u32);
    if blocks_needed > BigUint::from(budget) {
        return Err(Error::capacity(
            "sigma block enumeration",
            blocks_needed,
            budget,
        ));
    }
    let mut buckets: BTreeMap<Element, Vec<Block>> = BTreeMap::new();
    walk_multisets(set.elements(), s, mode, mode.identity(), |idx, v| {
        let values: Vec<Element> = idx.iter().map(|&i| set.elements()[i].clone()).collect();
        buckets.entry(v.clone()).or_default().push(Block {
            indices: idx.to_vec(),
            orderings: permutation_count(&values) as u128,
        });
        true
    });
    let mut by_l = vec![0u128; k * s + 1];
    for blocks in buckets.values() {
        if blocks.len() < k {
            continue;
        }
        Stratifier {
            blocks,
            k,
            used: vec![false; blocks.len()],
            multiplicity: vec![0; set.len()],
            distinct: 0,
            by_l: &mut by_l,
        }
        .run(0, 1)?;
    }
    Ok(by_l.into_iter().map(BigUint::from).collect())
}

/// `Σ_{l,s,k}(A)`; in multiplicative mode this is the product analogue `Π_{l,s,k}(A)`.
pub fn sigma_count(
    set: &GroundSet,
    l: usize,
    s: usize,
    k: usize,
    mode: Mode,
    budget: u64,
) -> Result<BigUint> {
    if l == 0 || l > k * s {
        return Err(Error::Parameter(format!("need 1 <= l <= ks, got l={l}")));
    }
    Ok(sigma_profile(set, s, k, mode, budget)?.swap_remove(l))
}

/// `Σ_{l,s,2}(A)^{2s} <= (4s+1)^{2sl} · E_{s,2}(A)^l`, additive mode.
pub fn sigma_pair_bound(set: &GroundSet, l: usize, s: usize, budget: u64) -> Result<Comparison> {
    let sigma = sigma_count(set, l, s, 2, Mode::Additive, budget)?;
    let e = energy(set, s as u32, 2, Mode::Additive)?.value;
    let (s32, l32) = (s as u32, l as u32);
    Ok(Comparison {
        lhs: sigma.pow(2 * s32),
        rhs: BigUint::from(4 * s32 + 1).pow(2 * s32 * l32) * e.pow(l32),
    })
}

/// `Σ_{2k-1,2,k}(A)^k <= k^k · E_{2,k}(A)^{k-1} · |A|`, additive mode.
pub fn sigma_near_diagonal_bound(set: &GroundSet, k: usize, budget: u64) -> Result<Comparison> {
    if k < 2 {
        return Err(Error::Parameter("k must be at least 2".into()));
    }
    let sigma = sigma_count(set, 2 * k - 1, 2, k, Mode::Additive, budget)?;
    let k32 = k as u32;
    let e = energy(set, 2, k32, Mode::Additive)?.value;
    Ok(Comparison {
        lhs: sigma.pow(k32),
        rhs: BigUint::from(k).pow(k32) * e.pow(k32 - 1) * BigUint::from(set.len()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl ExactMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(Error::Parameter(
                "matrix dimensions must be positive".into(),
            ));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parameter("ragged matrix rows".into()));
        }
        Ok(ExactMatrix {
            rows: m,
            cols: n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_integers<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| {
                    r.as_ref()
                        .iter()
                        .map(|&x| Rational::from_integer(x.into()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }
}

/// Rank over the rationals by Gaussian elimination.
pub fn matrix_rank(matrix: &ExactMatrix) -> usize {
    let (m, n) = (matrix.rows, matrix.cols);
    let mut a: Vec<Vec<Rational>> = (0..m).map(|r| matrix.row(r).to_vec()).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot) = (rank..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        let lead = a[rank][col].clone();
        for r in rank + 1..m {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &lead;
            let (top, bottom) = a.split_at_mut(r);
            for (x, p) in bottom[0][col..n].iter_mut().zip(&top[rank][col..n]) {
                *x -= &factor * p;
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}

/// Number of `a ∈ A^n` with `M a^T = u^T`, by enumeration.
pub fn linear_system_count(
    matrix: &ExactMatrix,
    rhs: &[Rational],
    set: &GroundSet,
    budget: u64,
) -> Result<BigUint> {
    if rhs.len() != matrix.rows {
        return Err(Error::Parameter(format!(
            "right-hand side has {} entries for {} rows",
            rhs.len(),
            matrix.rows
        )));
    }
    let n = matrix.cols;
    let tuples = BigUint::from(set.len()).pow(n as u32);
    if tuples > BigUint::from(budget) {
        return Err(Error::capacity("linear system enumeration", tuples, budget));
    }
    if set.is_empty() {
        return Ok(BigUint::zero());
    }
    let values: Vec<Rational> = set
        .iter()
        .map(|x| Rational::from_integer(x.clone()))
        .collect();
    // contributions[r][c][i] = M[r][c] * A[i]
    let contributions: Vec<Vec<Vec<Rational>>> = (0..matrix.rows)
        .map(|r| {
            (0..n)
                .map(|c| values.iter().map(|v| matrix.get(r, c) * v).collect())
                .collect()
        })
        .collect();
    let mut idx = vec![0usize; n];
    let mut count = 0u64;
    loop {
        let solves = (0..matrix.rows).all(|r| {
            let lhs: Rational = (0..n).map(|c| &contributions[r][c][idx[c]]).sum();
            lhs == rhs[r]
        });
        if solves {
            count += 1;
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(BigUint::from(count));
            }
            idx[pos] += 1;
            if idx[pos] < values.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// The `(k-1) × l` coefficient matrix of the equal-block system for a tuple,
/// in the variables given by its distinct values (ascending): row `i` holds
/// the multiplicity of each value in block `i` minus that in block `k`.
pub fn block_system(t: &[Element], s: usize, k: usize) -> Result<(ExactMatrix, Vec<Element>)> {
    let class = classify_tuple(t, s, k)?;
    if k < 2 {
        return Err(Error::Parameter("a block system needs k >= 2".into()));
    }
    let mut distinct: Vec<Element> = t.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    debug_assert_eq!(distinct.len(), class.l);
    let position: HashMap<&Element, usize> =
        distinct.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let counts = |block: &[Element]| {
        let mut row = vec![0i64; distinct.len()];
        for x in block {
            row[position[x]] += 1;
        }
        row
    };
    let last = counts(&t[(k - 1) * s..]);
    let rows: Vec<Vec<Rational>> = t
        .chunks(s)
        .take(k - 1)
        .map(|block| {
            counts(block)
                .iter()
                .zip(&last)
                .map(|(a, b)| Rational::from_integer(BigInt::from(a - b)))
                .collect()
        })
        .collect();
    Ok((ExactMatrix::new(rows)?, distinct))
}

/// `true` when every entry of the matrix is an integer bounded by `bound` in absolute value.
pub fn entries_bounded(matrix: &ExactMatrix, bound: i64) -> bool {
    let b = BigInt::from(bound);
    matrix
        .entries
        .iter()
        .all(|x| x.denom().is_one() && x.numer().abs() <= b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::{BLOCK_BUDGET, TUPLE_BUDGET};
    use proptest::prelude::*;

    fn set(items: &[i64]) -> GroundSet {
        GroundSet::new(items.iter().copied())
    }

    fn tuple(items: &[i64]) -> Vec<Element> {
        items.iter().map(|&x| Element::from(x)).collect()
    }

    fn q(x: i64) -> Rational {
        Rational::from_integer(x.into())
    }

    /// Enumerates A^{ks} directly and stratifies qualifying tuples by l.
    fn brute_sigma(items: &[i64], s: usize, k: usize) -> Vec<u64> {
        let mut by_l = vec![0u64; s * k + 1];
        let n = items.len();
        if n == 0 {
            return by_l;
        }
        let mut idx = vec![0usize; s * k];
        loop {
            let t: Vec<i64> = idx.iter().map(|&i| items[i]).collect();
            let sums: Vec<i64> = t.chunks(s).map(|b| b.iter().sum()).collect();
            if sums.iter().all(|&x| x == sums[0]) {
                let mut blocks: Vec<Vec<i64>> = t
                    .chunks(s)
                    .map(|b| {
                        let mut b = b.to_vec();
                        b.sort();
                        b
                    })
                    .collect();
                blocks.sort();
                blocks.dedup();
                if blocks.len() == k {
                    let l = t.iter().collect::<HashSet<_>>().len();
                    by_l[l] += 1;
                }
            }
            let mut p = 0;
            loop {
                if p == idx.len() {
                    return by_l;
                }
                idx[p] += 1;
                if idx[p] < n {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }

    #[test]
    fn classify_examples() {
        let c = classify_tuple(&tuple(&[1, 3, 2, 2]), 2, 2).unwrap();
        assert_eq!((c.l, c.blocks_pairwise_distinct), (3, true));
        let c = classify_tuple(&tuple(&[1, 2, 2, 1]), 2, 2).unwrap();
        assert_eq!((c.l, c.blocks_pairwise_distinct), (2, false));
        let c = classify_tuple(&tuple(&[5, 5, 5, 5]), 2, 2).unwrap();
        assert_eq!((c.l, c.blocks_pairwise_distinct), (1, false));
        assert!(classify_tuple(&tuple(&[1, 2, 3]), 2, 2).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(brute_sigma(&[1, 2, 3], 2, 2)[3], 4);
        let a = set(&[1, 2, 3]);
        assert_eq!(
            sigma_count(&a, 3, 2, 2, Mode::Additive, BLOCK_BUDGET).unwrap(),
            4u32.into()
        );
        assert!(sigma_count(&a, 2, 2, 2, Mode::Additive, BLOCK_BUDGET)
            .unwrap()
            .is_zero());
        assert!(
            sigma_count(&GroundSet::empty(), 3, 2, 2, Mode::Additive, BLOCK_BUDGET)
                .unwrap()
                .is_zero()
        );
        assert!(sigma_count(&a, 5, 2, 2, Mode::Additive, BLOCK_BUDGET).is_err());
        assert!(matches!(
            sigma_count(&GroundSet::new(1..=100), 2, 4, 2, Mode::Additive, 1000),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn multiplicative_sigma_counts_products() {
        // 2·6 = 3·4 is the only coincidence: 2 orderings per block, 2 block orders
        let p = sigma_profile(
            &set(&[2, 3, 4, 6]),
            2,
            2,
            Mode::Multiplicative,
            BLOCK_BUDGET,
        )
        .unwrap();
        let total: BigUint = p.iter().sum();
        assert_eq!(p[4], BigUint::from(8u32));
        assert_eq!(total, BigUint::from(8u32));
    }

    #[test]
    fn rank_examples() {
        let m = ExactMatrix::from_integers(&[[1, 1, -1, -1]]).unwrap();
        assert_eq!(matrix_rank(&m), 1);
        let m = ExactMatrix::from_integers(&[[1, 1, -1, -1], [2, 2, -2, -2]]).unwrap();
        assert_eq!(matrix_rank(&m), 1);
        let m = ExactMatrix::from_integers(&[[1, 1, -1, -1], [1, -1, 1, -1]]).unwrap();
        assert_eq!(matrix_rank(&m), 2);
        let m = ExactMatrix::from_integers(&[[0, 0], [0, 0]]).unwrap();
        assert_eq!(matrix_rank(&m), 0);
        assert!(ExactMatrix::from_integers::<[i64; 0]>(&[]).is_err());
    }

    #[test]
    fn rank_with_fractions() {
        let half = Rational::new(1.into(), 2.into());
        let m = ExactMatrix::new(vec![vec![half.clone(), q(1)], vec![q(1), q(2)]]).unwrap();
        assert_eq!(matrix_rank(&m), 1);
    }

    #[test]
    fn linear_system_examples() {
        let a = set(&[1, 2, 3]);
        let m = ExactMatrix::from_integers(&[[1, -1]]).unwrap();
        assert_eq!(
            linear_system_count(&m, &[q(0)], &a, TUPLE_BUDGET).unwrap(),
            3u32.into()
        );
        let m = ExactMatrix::from_integers(&[[1, 1]]).unwrap();
        assert_eq!(
            linear_system_count(&m, &[q(4)], &a, TUPLE_BUDGET).unwrap(),
            3u32.into()
        );
        let m = ExactMatrix::from_integers(&[[1, 0], [0, 1]]).unwrap();
        assert_eq!(
            linear_system_count(&m, &[q(1), q(2)], &set(&[1, 2]), TUPLE_BUDGET).unwrap(),
            1u32.into()
        );
        assert!(linear_system_count(&m, &[q(1)], &a, TUPLE_BUDGET).is_err());
    }

    #[test]
    fn block_system_annihilates_distinct_values() {
        let t = tuple(&[1, 4, 2, 3, 3, 2]);
        let (m, vars) = block_system(&t, 2, 3).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 4));
        assert!(entries_bounded(&m, 4));
        for r in 0..m.rows() {
            let dot: Rational = m
                .row(r)
                .iter()
                .zip(&vars)
                .map(|(c, v)| c * Rational::from_integer(v.clone()))
                .sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn explicit_constant_examples() {
        let a = set(&[1, 2, 3, 4, 5, 7]);
        for l in 2..=4 {
            assert!(sigma_pair_bound(&a, l, 2, BLOCK_BUDGET).unwrap().holds());
        }
        for k in 2..=3 {
            assert!(sigma_near_diagonal_bound(&a, k, BLOCK_BUDGET)
                .unwrap()
                .holds());
        }
    }

    proptest! {
        #[test]
        fn partition_identity(items in prop::collection::vec(0i64..12, 0..7), k in 2usize..4) {
            let a = GroundSet::new(items);
            let raw: Vec<i64> = a.iter().map(|x| i64::try_from(x).unwrap()).collect();
            let fast = sigma_profile(&a, 2, k, Mode::Additive, BLOCK_BUDGET).unwrap();
            let slow = brute_sigma(&raw, 2, k);
            let fast_u64: Vec<u64> = fast.iter().map(|x| u64::try_from(x).unwrap()).collect();
            prop_assert_eq!(&fast_u64, &slow);
            // two multisets of size 2 over two values with equal sums coincide
            prop_assert!(fast[2].is_zero());
        }

        #[test]
        fn rank_bound(
            entries in prop::collection::vec(-4i64..=4, 1..=12),
            cols in 1usize..=4,
            items in prop::collection::vec(-6i64..6, 1..7),
            pick in prop::collection::vec(any::<prop::sample::Index>(), 4),
        ) {
            let rows = (entries.len() / cols).clamp(1, 3);
            let mut entries = entries;
            entries.resize(rows * cols, 1);
            let grid: Vec<Vec<i64>> = entries.chunks(cols).map(|c| c.to_vec()).collect();
            let m = ExactMatrix::from_integers(&grid).unwrap();
            let a = GroundSet::new(items);
            // a right-hand side with at least one solution
            let point: Vec<i64> = (0..cols)
                .map(|c| i64::try_from(&a.elements()[pick[c].index(a.len())]).unwrap())
                .collect();
            let rhs: Vec<Rational> = grid.iter().map(|r| q(r.iter().zip(&point).map(|(x, y)| x * y).sum())).collect();
            let count = linear_system_count(&m, &rhs, &a, TUPLE_BUDGET).unwrap();
            let rank = matrix_rank(&m);
            prop_assert!(count >= BigUint::one());
            prop_assert!(count <= BigUint::from(a.len()).pow((cols - rank) as u32));
        }
    }
}
