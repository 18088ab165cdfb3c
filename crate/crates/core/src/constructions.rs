//! Explicit set families and the multiplication-graph device.
//!
//! `{1, 2, ..., 2^N}` is read as the geometric progression `{2^0, ..., 2^N}`
//! wherever it appears.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::set::{Element, GroundSet, Rational, RationalSet};

/// The first `n` primes. The sieve bound doubles until it holds `n` primes.
pub fn first_primes(n: usize) -> Vec<Element> {
    if n == 0 {
        return Vec::new();
    }
    let mut limit = 16usize;
    loop {
        let mut composite = vec![false; limit + 1];
        let mut primes = Vec::with_capacity(n);
        for i in 2..=limit {
            if composite[i] {
                continue;
            }
            primes.push(Element::from(i));
            if primes.len() == n {
                return primes;
            }
            for j in (i * i..=limit).step_by(i) {
                composite[j] = true;
            }
        }
        limit *= 2;
    }
}

fn require_positive(params: &[(&str, u32)]) -> Result<()> {
    for (name, v) in params {
        if *v == 0 {
            return Err(Error::Parameter(format!("{name} must be at least 1")));
        }
    }
    Ok(())
}

fn pow2(e: u32) -> Element {
    Element::one() << e
}

/// A set built as `{p ∘ q : p ∈ P, q ∈ Q}` together with its factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factored {
    pub a: GroundSet,
    pub p: GroundSet,
    pub q: GroundSet,
}

/// `P` = first `size_p` primes, `Q` = the next `size_q`, `A = P · Q`.
pub fn build_prime_product(size_p: u32, size_q: u32) -> Result<Factored> {
    require_positive(&[("size_p", size_p), ("size_q", size_q)])?;
    let primes = first_primes((size_p + size_q) as usize);
    let (p, q) = primes.split_at(size_p as usize);
    let a = p.iter().flat_map(|x| q.iter().map(move |y| x * y));
    Ok(Factored {
        a: GroundSet::new(a),
        p: GroundSet::new(p.to_vec()),
        q: GroundSet::new(q.to_vec()),
    })
}

/// `P = {2^0, ..., 2^N}`, `Q = {2^{N+1}, ..., 2^{N+M}}`, `A = P + Q`. `N = 0` is allowed.
pub fn build_power_sumset(n: u32, m: u32) -> Result<Factored> {
    require_positive(&[("M", m)])?;
    let p: Vec<Element> = (0..=n).map(pow2).collect();
    let q: Vec<Element> = (n + 1..=n + m).map(pow2).collect();
    let a = p.iter().flat_map(|x| q.iter().map(move |y| x + y));
    Ok(Factored {
        a: GroundSet::new(a),
        p: GroundSet::new(p),
        q: GroundSet::new(q),
    })
}

/// `{(2i + 1) 2^j : 1 <= i <= M, 1 <= j <= N}`.
pub fn build_balog_wooley(m: u32, n: u32) -> Result<GroundSet> {
    require_positive(&[("M", m), ("N", n)])?;
    let items = (1..=m).flat_map(|i| (1..=n).map(move |j| Element::from(2 * i + 1) << j));
    Ok(GroundSet::new(items))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceConstruction {
    pub x: RationalSet,
    pub y: RationalSet,
    pub lambda: Rational,
}

/// `Y = {1..N}`, `Z = {1..M}`, `X = Z ∪ (Y + 1/Z)`, `λ = 1`. Needs `M >= 2N >= 2`.
///
/// Each `l ∈ [N+1, M-N]` has `N` representations `l = x - y` with
/// `x ∈ Z`, and likewise `1/l = x - y` with `x ∈ Y + 1/Z`, so `H >= (M - 2N) N^2`.
pub fn build_incidence_lb_one(n: u32, m: u32) -> Result<IncidenceConstruction> {
    if n == 0 || m < 2 * n {
        return Err(Error::Parameter(format!(
            "need M >= 2N >= 2, got N = {n}, M = {m}"
        )));
    }
    let int = |v: u32| Rational::from_integer(BigInt::from(v));
    let y = RationalSet::new((1..=n).map(int));
    let z: Vec<Rational> = (1..=m).map(int).collect();
    let shifted = (1..=n).flat_map(|yy| (1..=m).map(move |zz| int(yy) + int(zz).recip()));
    let x = RationalSet::new(z.into_iter().chain(shifted));
    Ok(IncidenceConstruction {
        x,
        y,
        lambda: Rational::one(),
    })
}

/// `X = {2^0..2^N}`, `Y = {2^0..2^M}`, `λ = 2^M`. Needs `N >= M + 1`.
pub fn build_incidence_lb_two(n: u32, m: u32) -> Result<IncidenceConstruction> {
    if n < m + 1 {
        return Err(Error::Parameter(format!(
            "need N >= M + 1, got N = {n}, M = {m}"
        )));
    }
    let geo = |top: u32| RationalSet::new((0..=top).map(|e| Rational::from_integer(pow2(e))));
    Ok(IncidenceConstruction {
        x: geo(n),
        y: geo(m),
        lambda: Rational::from_integer(pow2(m)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    PrimeProduct,
    PowerSumset,
    BalogWooley,
    IncidenceLbOne,
    IncidenceLbTwo,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::PrimeProduct,
        Family::PowerSumset,
        Family::BalogWooley,
        Family::IncidenceLbOne,
        Family::IncidenceLbTwo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::PrimeProduct => "prime_product",
            Family::PowerSumset => "power_sumset",
            Family::BalogWooley => "balog_wooley",
            Family::IncidenceLbOne => "incidence_lb_one",
            Family::IncidenceLbTwo => "incidence_lb_two",
        }
    }

    /// Names of the two integer parameters, in order.
    pub fn param_names(self) -> (&'static str, &'static str) {
        match self {
            Family::PrimeProduct => ("size_p", "size_q"),
            Family::PowerSumset => ("N", "M"),
            Family::BalogWooley => ("M", "N"),
            Family::IncidenceLbOne | Family::IncidenceLbTwo => ("N", "M"),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_").to_ascii_lowercase();
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == norm)
            .ok_or_else(|| Error::Parameter(format!("unknown family {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructionSpec {
    pub family: Family,
    /// Parameters in the order of [`Family::param_names`].
    pub params: (u32, u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Construction {
    Integer(Factored),
    Single(GroundSet),
    Incidence(IncidenceConstruction),
}

impl ConstructionSpec {
    pub fn build(&self) -> Result<Construction> {
        let (a, b) = self.params;
        Ok(match self.family {
            Family::PrimeProduct => Construction::Integer(build_prime_product(a, b)?),
            Family::PowerSumset => Construction::Integer(build_power_sumset(a, b)?),
            Family::BalogWooley => Construction::Single(build_balog_wooley(a, b)?),
            Family::IncidenceLbOne => Construction::Incidence(build_incidence_lb_one(a, b)?),
            Family::IncidenceLbTwo => Construction::Incidence(build_incidence_lb_two(a, b)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub left: Vec<Element>,
    pub right: Vec<Element>,
    /// Sorted, no duplicates.
    edges: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(
        left: Vec<Element>,
        right: Vec<Element>,
        mut edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if let Some(&(l, r)) = edges
            .iter()
            .find(|(l, r)| *l >= left.len() || *r >= right.len())
        {
            return Err(Error::Parameter(format!("edge ({l}, {r}) out of range")));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(BipartiteGraph { left, right, edges })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertices `0..|left|` are left, the rest right.
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let m = self.left.len();
        let mut adj = vec![Vec::new(); m + self.right.len()];
        for &(l, r) in &self.edges {
            adj[l].push(m + r);
            adj[m + r].push(l);
        }
        adj
    }
}

/// Edge `(p, q)` whenever `pq ∈ C`.
pub fn multiplication_graph(c: &GroundSet, p: &GroundSet, q: &GroundSet) -> BipartiteGraph {
    let mut edges = Vec::new();
    for (i, x) in p.iter().enumerate() {
        for (j, y) in q.iter().enumerate() {
            if c.contains(&(x * y)) {
                edges.push((i, j));
            }
        }
    }
    BipartiteGraph {
        left: p.elements().to_vec(),
        right: q.elements().to_vec(),
        edges,
    }
}

/// Whether `G` has a cycle of length exactly `2h`.
///
/// Each cycle is searched from its smallest vertex, extending only through
/// larger vertices. `budget` caps the number of path extensions.
pub fn has_even_cycle(graph: &BipartiteGraph, h: u32, budget: u64) -> Result<bool> {
    if h < 2 {
        return Err(Error::Parameter("h must be at least 2".into()));
    }
    let adj = graph.adjacency();
    let len = 2 * h as usize;
    if len > adj.len() {
        return Ok(false);
    }
    let mut steps = 0u64;
    let mut on_path = vec![false; adj.len()];
    for start in 0..adj.len() {
        // stack of (vertex, next neighbour index)
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        on_path[start] = true;
        while let Some(top) = stack.last_mut() {
            let v = top.0;
            if top.1 >= adj[v].len() {
                on_path[v] = false;
                stack.pop();
                continue;
            }
            let w = adj[v][top.1];
            top.1 += 1;
            if stack.len() == len {
                if w == start {
                    on_path.iter_mut().for_each(|b| *b = false);
                    return Ok(true);
                }
                continue;
            }
            if w <= start || on_path[w] {
                continue;
            }
            steps += 1;
            if steps > budget {
                return Err(Error::capacity(
                    "cycle search",
                    format!("more than {budget} extensions"),
                    budget,
                ));
            }
            on_path[w] = true;
            stack.push((w, 0));
        }
    }
    Ok(false)
}

/// The Turán-type edge bound for `C_{2h}`-free `m × n` bipartite graphs, `m <= n`:
/// `(2h-3)((mn)^{(h+1)/2h} + m + n)` for odd `h`,
/// `(2h-3)(m^{(h+2)/2h} n^{1/2} + m + n)` for even `h`.
///
/// Checked exactly: with `D = E - (2h-3)(m+n)`, compare `D^{2h}` against
/// `(2h-3)^{2h} (mn)^{h+1}` or `(2h-3)^{2h} m^{h+2} n^h`.
pub fn cycle_free_edge_bound_holds(edges: u64, m: u64, n: u64, h: u32) -> Result<bool> {
    if h < 2 {
        return Err(Error::Parameter("h must be at least 2".into()));
    }
    let (m, n) = (m.min(n), m.max(n));
    let c = BigInt::from(2 * h - 3);
    let d = BigInt::from(edges) - &c * BigInt::from(m + n);
    if d <= BigInt::zero() {
        return Ok(true);
    }
    let d = d.to_biguint().expect("positive");
    let c = c.to_biguint().expect("positive");
    let (bm, bn) = (BigUint::from(m), BigUint::from(n));
    let rhs = if h % 2 == 1 {
        c.pow(2 * h) * (bm * bn).pow(h + 1)
    } else {
        c.pow(2 * h) * bm.pow(h + 2) * bn.pow(h)
    };
    Ok(d.pow(2 * h) <= rhs)
}

/// Checks a graph against [`cycle_free_edge_bound_holds`].
pub fn graph_edge_bound_holds(graph: &BipartiteGraph, h: u32) -> Result<bool> {
    cycle_free_edge_bound_holds(
        graph.edge_count() as u64,
        graph.left.len() as u64,
        graph.right.len() as u64,
        h,
    )
}

/// Projects a subset of a [`Factored`] product back to its multiplication graph.
pub fn product_graph(subset: &GroundSet, factored: &Factored) -> BipartiteGraph {
    multiplication_graph(subset, &factored.p, &factored.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::{CYCLE_BUDGET, INCIDENCE_BUDGET, MULTISET_BUDGET};
    use crate::extract::{extract_sidon, SamplingParams};
    use crate::incidence::{hyperbolic_count_brute, IncidenceInstance};
    use crate::set::Mode;
    use crate::sidon::{is_bhg, measure_g};
    use proptest::prelude::*;

    fn set(items: &[i64]) -> GroundSet {
        GroundSet::new(items.iter().copied())
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn primes() {
        assert_eq!(first_primes(5), [2, 3, 5, 7, 11].map(Element::from));
        assert_eq!(first_primes(1), [Element::from(2)]);
        assert_eq!(first_primes(25).last(), Some(&Element::from(97)));
        assert_eq!(first_primes(1000).last(), Some(&Element::from(7919)));
    }

    #[test]
    fn prime_product_examples() {
        let f = build_prime_product(2, 3).unwrap();
        assert_eq!(f.p, set(&[2, 3]));
        assert_eq!(f.q, set(&[5, 7, 11]));
        assert_eq!(f.a, set(&[10, 14, 15, 21, 22, 33]));
        assert_eq!(build_prime_product(1, 1).unwrap().a, set(&[6]));
        assert!(build_prime_product(0, 1).is_err());
    }

    #[test]
    fn power_sumset_examples() {
        let f = build_power_sumset(1, 1).unwrap();
        assert_eq!((f.p, f.q, f.a), (set(&[1, 2]), set(&[4]), set(&[5, 6])));
        let f = build_power_sumset(0, 3).unwrap();
        assert_eq!(f.a, set(&[3, 5, 9]));
    }

    #[test]
    fn balog_wooley_examples() {
        assert_eq!(build_balog_wooley(2, 2).unwrap(), set(&[6, 10, 12, 20]));
        assert_eq!(build_balog_wooley(1, 1).unwrap(), set(&[6]));
    }

    #[test]
    fn cardinalities() {
        for a in 1..=6 {
            for b in 1..=6 {
                assert_eq!(build_balog_wooley(a, b).unwrap().len(), (a * b) as usize);
                assert_eq!(build_prime_product(a, b).unwrap().a.len(), (a * b) as usize);
            }
        }
        for n in 0..=8 {
            for m in 1..=8 {
                assert_eq!(
                    build_power_sumset(n, m).unwrap().a.len(),
                    ((n + 1) * m) as usize
                );
            }
        }
    }

    #[test]
    fn incidence_constructions() {
        let c = build_incidence_lb_one(1, 2).unwrap();
        assert_eq!(c.y, RationalSet::from_integers([1]));
        assert_eq!(c.x, RationalSet::new([q(1, 1), q(3, 2), q(2, 1)]));
        assert!(matches!(
            build_incidence_lb_one(2, 3),
            Err(Error::Parameter(_))
        ));
        assert!(build_incidence_lb_one(0, 3).is_err());

        for (n, m) in [(2u32, 6u32), (3, 10), (4, 20)] {
            let c = build_incidence_lb_one(n, m).unwrap();
            assert_eq!(c.y.len(), n as usize);
            let inst = IncidenceInstance::new(c.x, c.y, c.lambda).unwrap();
            let h = hyperbolic_count_brute(&inst, INCIDENCE_BUDGET).unwrap();
            assert!(h >= BigUint::from((m - 2 * n) * n * n), "N={n} M={m} H={h}");
        }

        let c = build_incidence_lb_two(3, 2).unwrap();
        assert_eq!(c.lambda, q(4, 1));
        assert_eq!(c.x.len(), 4);
        assert_eq!(c.y.len(), 3);
        assert!(matches!(
            build_incidence_lb_two(2, 2),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn spec_dispatch() {
        for f in Family::ALL {
            assert_eq!(f.as_str().parse::<Family>().unwrap(), f);
        }
        assert_eq!(
            "balog-wooley".parse::<Family>().unwrap(),
            Family::BalogWooley
        );
        assert!("nope".parse::<Family>().is_err());
        let built = ConstructionSpec {
            family: Family::BalogWooley,
            params: (2, 2),
        }
        .build()
        .unwrap();
        assert_eq!(built, Construction::Single(set(&[6, 10, 12, 20])));
    }

    #[test]
    fn graph_examples() {
        let f = build_prime_product(2, 3).unwrap();
        assert_eq!(multiplication_graph(&f.a, &f.p, &f.q).edge_count(), 6);
        assert_eq!(
            multiplication_graph(&GroundSet::empty(), &f.p, &f.q).edge_count(),
            0
        );
        let g = multiplication_graph(&set(&[10]), &f.p, &f.q);
        assert_eq!(g.edges(), &[(0, 0)]);
    }

    #[test]
    fn cycle_examples() {
        let k22 = BipartiteGraph::new(
            vec![1.into(), 2.into()],
            vec![3.into(), 4.into()],
            vec![(0, 0), (0, 1), (1, 0), (1, 1)],
        )
        .unwrap();
        assert!(has_even_cycle(&k22, 2, CYCLE_BUDGET).unwrap());
        assert!(!has_even_cycle(&k22, 3, CYCLE_BUDGET).unwrap());
        // a path is a forest
        let path = BipartiteGraph::new(
            (0..4).map(Element::from).collect(),
            (0..4).map(Element::from).collect(),
            vec![(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3)],
        )
        .unwrap();
        for h in 2..=4 {
            assert!(!has_even_cycle(&path, h, CYCLE_BUDGET).unwrap());
        }
        // a 6-cycle but no 4-cycle
        let hex = BipartiteGraph::new(
            (0..3).map(Element::from).collect(),
            (0..3).map(Element::from).collect(),
            vec![(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (0, 2)],
        )
        .unwrap();
        assert!(!has_even_cycle(&hex, 2, CYCLE_BUDGET).unwrap());
        assert!(has_even_cycle(&hex, 3, CYCLE_BUDGET).unwrap());
        assert!(BipartiteGraph::new(vec![], vec![], vec![(0, 0)]).is_err());
        let f = build_prime_product(6, 6).unwrap();
        let full = multiplication_graph(&f.a, &f.p, &f.q);
        assert!(matches!(
            has_even_cycle(&full, 6, 5),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn edge_bound_arithmetic() {
        // K_{2,2} has a 4-cycle and 4 edges; (2h-3)(m^{1}n^{1/2}+m+n) = 2*sqrt2+4 ≈ 6.8
        assert!(cycle_free_edge_bound_holds(4, 2, 2, 2).unwrap());
        assert!(!cycle_free_edge_bound_holds(7, 2, 2, 2).unwrap());
        assert!(cycle_free_edge_bound_holds(6, 2, 2, 2).unwrap());
        // h = 3, m = n = 4: 3 (16^{2/3} + 8) ≈ 43.2
        assert!(cycle_free_edge_bound_holds(43, 4, 4, 3).unwrap());
        assert!(!cycle_free_edge_bound_holds(44, 4, 4, 3).unwrap());
        // order of m and n does not matter
        assert_eq!(
            cycle_free_edge_bound_holds(30, 3, 9, 2).unwrap(),
            cycle_free_edge_bound_holds(30, 9, 3, 2).unwrap()
        );
    }

    #[test]
    fn prime_product_sidon_cross_check() {
        let f = build_prime_product(3, 4).unwrap();
        let cert = measure_g(&f.a, 2, Mode::Multiplicative, MULTISET_BUDGET).unwrap();
        assert!(cert.g_measured <= 2);
        let primes = GroundSet::new(f.p.iter().chain(f.q.iter()).cloned());
        assert!(
            is_bhg(&primes, 2, 1, Mode::Multiplicative, MULTISET_BUDGET)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn extracted_subsets_give_cycle_free_graphs() {
        for (sp, sq, h) in [(4, 6, 2), (5, 5, 2), (4, 5, 3)] {
            let f = build_prime_product(sp, sq).unwrap();
            for seed in 0..4 {
                let out = extract_sidon(
                    &f.a,
                    h,
                    1,
                    Mode::Multiplicative,
                    &SamplingParams::full(seed),
                    MULTISET_BUDGET,
                )
                .unwrap();
                let g = product_graph(&out.subset, &f);
                assert_eq!(g.edge_count(), out.subset.len());
                assert!(!has_even_cycle(&g, h, CYCLE_BUDGET).unwrap());
                assert!(graph_edge_bound_holds(&g, h).unwrap());
            }
        }
    }

    fn brute_has_cycle(g: &BipartiteGraph, h: u32) -> bool {
        // all ordered choices of h distinct left and h distinct right vertices
        fn perms(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in 0..n {
                if !cur.contains(&i) {
                    cur.push(i);
                    perms(n, k, cur, out);
                    cur.pop();
                }
            }
        }
        let h = h as usize;
        let (mut ls, mut rs) = (Vec::new(), Vec::new());
        perms(g.left.len(), h, &mut Vec::new(), &mut ls);
        perms(g.right.len(), h, &mut Vec::new(), &mut rs);
        let has = |l: usize, r: usize| g.edges().binary_search(&(l, r)).is_ok();
        ls.iter().any(|l| {
            rs.iter()
                .any(|r| (0..h).all(|i| has(l[i], r[i]) && has(l[(i + 1) % h], r[i])))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cycle_search_matches_brute(
            m in 1usize..=4,
            n in 1usize..=4,
            raw in prop::collection::vec((0usize..4, 0usize..4), 0..12),
            h in 2u32..=3,
        ) {
            let edges: Vec<_> = raw.into_iter().filter(|(l, r)| *l < m && *r < n).collect();
            let g = BipartiteGraph::new(
                (0..m).map(Element::from).collect(),
                (0..n).map(Element::from).collect(),
                edges,
            ).unwrap();
            prop_assert_eq!(has_even_cycle(&g, h, CYCLE_BUDGET).unwrap(), brute_has_cycle(&g, h));
        }
    }
}
