//! Application hypergraph builders.
//!
//! Turns the counting problems into induced-edge-weight problems on an
//! auxiliary hypergraph:
//!
//! - copies of a pattern `H` in the complete s-uniform host on `[n]` become
//!   an `e_H`-uniform hypergraph on the `C(n,s)` host edges, one unit-weight
//!   hyperedge per unlabelled copy;
//! - k-term arithmetic progressions in `[n]` become a k-uniform hypergraph
//!   on `[n]`.
//!
//! Also home to the pattern densities `m_s` (as exact rationals, so ties
//! like 5/2 vs 7/3 never hit float comparison), automorphism counts, the
//! host degree audits, and the explicit theorem constants.

use crate::hypergraph::{VertexSet, WeightedHypergraph};
use crate::math;
use crate::{Error, Result};
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

/// Default cap on generated hyperedges.
pub const DEFAULT_EDGE_BUDGET: u64 = 10_000_000;

/// An unweighted s-uniform pattern (the object whose copies are counted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternHypergraph {
    s: usize,
    vertex_count: usize,
    edges: Vec<Vec<u32>>, // sorted, distinct
}

impl PatternHypergraph {
    pub fn new(s: usize, vertex_count: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidEdge("pattern uniformity must be positive"));
        }
        if edges.is_empty() {
            return Err(Error::InvalidEdge("pattern must have at least one edge"));
        }
        let mut sorted: Vec<Vec<u32>> = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            if e.len() != s || e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidEdge("pattern edge is not an s-set"));
            }
            if e.last().is_some_and(|&m| m as usize >= vertex_count) {
                return Err(Error::InvalidEdge("pattern vertex out of range"));
            }
            sorted.push(e);
        }
        sorted.sort();
        let before = sorted.len();
        sorted.dedup();
        if sorted.len() != before {
            return Err(Error::InvalidEdge("pattern edges must be distinct"));
        }
        Ok(PatternHypergraph {
            s,
            vertex_count,
            edges: sorted,
        })
    }

    /// The complete graph K_m as a 2-uniform pattern.
    pub fn complete_graph(m: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..m as u32 {
            for j in (i + 1)..m as u32 {
                edges.push(alloc::vec![i, j]);
            }
        }
        PatternHypergraph::new(2, m, edges)
    }

    pub fn uniformity(&self) -> usize {
        self.s
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }
}

/// Exact small rational, always reduced with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn denominator(self) -> i64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl core::fmt::Display for Rational {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Result of an `m_s` computation: the exact value and a subpattern
/// attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub value: Rational,
    /// Edge list of the achieving subpattern (the full pattern restricted
    /// to the achieving support); a single edge when `e_H = 1`.
    pub achieving_edges: Vec<Vec<u32>>,
    /// Number of non-isolated vertices of the achieving subpattern.
    pub achieving_vertices: usize,
}

/// `m_2(H)` for a graph pattern.
pub fn two_density(pattern: &PatternHypergraph) -> Result<DensityReport> {
    if pattern.s != 2 {
        return Err(Error::InvalidParameter(
            "two_density requires a 2-uniform pattern",
        ));
    }
    s_density(pattern)
}

/// `m_s(H) = max { (e_F - 1)/(v_F - s) : F subset H, e_F >= 2 }`, or `1/s`
/// when the pattern has a single edge.
///
/// The maximum over subpatterns with a given support is attained by taking
/// every edge inside the support, so only vertex supports are enumerated.
pub fn s_density(pattern: &PatternHypergraph) -> Result<DensityReport> {
    let s = pattern.s;
    if pattern.edge_count() == 1 {
        return Ok(DensityReport {
            value: Rational::new(1, s as i64),
            achieving_edges: pattern.edges.clone(),
            achieving_vertices: s,
        });
    }
    let v = pattern.vertex_count;
    if v > 20 {
        return Err(Error::BudgetExceeded {
            what: "density subpattern search",
            limit: 20,
            requested: v as u64,
        });
    }
    let edge_masks: Vec<u64> = pattern
        .edges
        .iter()
        .map(|e| e.iter().fold(0u64, |m, &x| m | (1 << x)))
        .collect();
    let mut best: Option<(Rational, u64)> = None;
    for support in 0u64..(1 << v) {
        let size = support.count_ones() as usize;
        if size <= s {
            continue; // fewer than two distinct s-edges fit
        }
        let e_f = edge_masks.iter().filter(|&&m| m & !support == 0).count();
        if e_f < 2 {
            continue;
        }
        // drop isolated vertices: they only shrink the ratio
        let used = edge_masks
            .iter()
            .filter(|&&m| m & !support == 0)
            .fold(0u64, |acc, &m| acc | m);
        let v_f = used.count_ones() as usize;
        if v_f <= s {
            continue;
        }
        let ratio = Rational::new(e_f as i64 - 1, (v_f - s) as i64);
        if best.as_ref().is_none_or(|(b, _)| ratio > *b) {
            best = Some((ratio, used));
        }
    }
    let (value, support) = best.expect("pattern with >= 2 edges has a valid subpattern");
    let achieving_edges: Vec<Vec<u32>> = pattern
        .edges
        .iter()
        .zip(edge_masks.iter())
        .filter(|(_, &m)| m & !support == 0)
        .map(|(e, _)| e.clone())
        .collect();
    Ok(DensityReport {
        value,
        achieving_edges,
        achieving_vertices: support.count_ones() as usize,
    })
}

/// Lexicographic rank of a sorted `s`-subset of `0..n` among all
/// `C(n, s)` subsets.
pub fn subset_rank(n: usize, subset: &[u32]) -> u32 {
    let s = subset.len();
    let mut rank = 0u64;
    let mut prev = 0u32;
    for (i, &x) in subset.iter().enumerate() {
        for y in prev..x {
            rank += math::binomial((n as u64) - (y as u64) - 1, (s - i - 1) as u64) as u64;
        }
        prev = x + 1;
    }
    rank as u32
}

/// Inverse of [`subset_rank`].
pub fn subset_unrank(n: usize, s: usize, mut rank: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(s);
    let mut next = 0u32;
    for i in 0..s {
        let mut y = next;
        loop {
            let block = math::binomial((n as u64) - (y as u64) - 1, (s - i - 1) as u64) as u32;
            if rank < block {
                break;
            }
            rank -= block;
            y += 1;
        }
        out.push(y);
        next = y + 1;
    }
    out
}

/// Number of injections `[k] -> [n]`, saturating.
fn falling_factorial(n: u64, k: u64) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i);
    }
    acc
}

/// Enumerates injective maps from pattern vertices into `0..n`, invoking
/// `visit` with the full image slice once per injection.
fn for_each_injection(v_h: usize, n: usize, visit: &mut impl FnMut(&[u32])) {
    fn rec(
        v_h: usize,
        n: usize,
        image: &mut Vec<u32>,
        used: &mut [bool],
        visit: &mut impl FnMut(&[u32]),
    ) {
        if image.len() == v_h {
            visit(image);
            return;
        }
        for x in 0..n as u32 {
            if !used[x as usize] {
                used[x as usize] = true;
                image.push(x);
                rec(v_h, n, image, used, visit);
                image.pop();
                used[x as usize] = false;
            }
        }
    }
    let mut image = Vec::with_capacity(v_h);
    let mut used = alloc::vec![false; n];
    rec(v_h, n, &mut image, &mut used, visit);
}

/// `|Aut(H)|` by brute-force permutation search; patterns up to 8 vertices.
pub fn automorphism_count(pattern: &PatternHypergraph) -> Result<u64> {
    let v = pattern.vertex_count;
    if v > 8 {
        return Err(Error::BudgetExceeded {
            what: "automorphism search",
            limit: 8,
            requested: v as u64,
        });
    }
    let edge_set: BTreeSet<Vec<u32>> = pattern.edges.iter().cloned().collect();
    let mut count = 0u64;
    for_each_injection(v, v, &mut |perm| {
        let ok = pattern.edges.iter().all(|e| {
            let mut mapped: Vec<u32> = e.iter().map(|&x| perm[x as usize]).collect();
            mapped.sort_unstable();
            edge_set.contains(&mapped)
        });
        if ok {
            count += 1;
        }
    });
    Ok(count)
}

/// The copy hypergraph of a pattern in the complete s-uniform host on `[n]`:
/// vertices are the `C(n,s)` host edges (lexicographically ranked), and each
/// unlabelled copy of the pattern contributes one unit-weight hyperedge of
/// size `e_H`.
pub fn copy_hypergraph(pattern: &PatternHypergraph, n: usize) -> Result<WeightedHypergraph> {
    copy_hypergraph_with_budget(pattern, n, DEFAULT_EDGE_BUDGET)
}

pub fn copy_hypergraph_with_budget(
    pattern: &PatternHypergraph,
    n: usize,
    budget: u64,
) -> Result<WeightedHypergraph> {
    let v_h = pattern.vertex_count;
    if n < v_h {
        return Err(Error::InvalidParameter("host is smaller than the pattern"));
    }
    let injections = falling_factorial(n as u64, v_h as u64);
    if injections > budget.saturating_mul(64) {
        return Err(Error::BudgetExceeded {
            what: "copy enumeration injections",
            limit: budget.saturating_mul(64),
            requested: injections,
        });
    }
    let host_vertices = math::binomial(n as u64, pattern.s as u64) as usize;
    let mut copies: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut over_budget = false;
    for_each_injection(v_h, n, &mut |image| {
        if over_budget {
            return;
        }
        let mut hyperedge: Vec<u32> = pattern
            .edges
            .iter()
            .map(|e| {
                let mut mapped: Vec<u32> = e.iter().map(|&x| image[x as usize]).collect();
                mapped.sort_unstable();
                subset_rank(n, &mapped)
            })
            .collect();
        hyperedge.sort_unstable();
        copies.insert(hyperedge);
        if copies.len() as u64 > budget {
            over_budget = true;
        }
    });
    if over_budget {
        return Err(Error::BudgetExceeded {
            what: "copy hypergraph edges",
            limit: budget,
            requested: budget + 1,
        });
    }
    WeightedHypergraph::unit(host_vertices, pattern.edge_count(), copies)
}

/// Number of unlabelled copies of `pattern` whose edges all lie in the host
/// edge set `host` (sorted s-subsets of `0..n`). Enumerated directly, which
/// gives an independent counting route from the copy hypergraph.
pub fn count_copies(pattern: &PatternHypergraph, n: usize, host: &[Vec<u32>]) -> Result<u64> {
    let v_h = pattern.vertex_count;
    if n < v_h {
        return Ok(0);
    }
    let injections = falling_factorial(n as u64, v_h as u64);
    if injections > 100_000_000 {
        return Err(Error::BudgetExceeded {
            what: "copy counting injections",
            limit: 100_000_000,
            requested: injections,
        });
    }
    let mut host_set: BTreeSet<Vec<u32>> = BTreeSet::new();
    for e in host {
        let mut e = e.clone();
        e.sort_unstable();
        host_set.insert(e);
    }
    let mut copies: BTreeSet<Vec<Vec<u32>>> = BTreeSet::new();
    for_each_injection(v_h, n, &mut |image| {
        let mut mapped_edges: Vec<Vec<u32>> = Vec::with_capacity(pattern.edge_count());
        for e in &pattern.edges {
            let mut mapped: Vec<u32> = e.iter().map(|&x| image[x as usize]).collect();
            mapped.sort_unstable();
            if !host_set.contains(&mapped) {
                return;
            }
            mapped_edges.push(mapped);
        }
        mapped_edges.sort();
        copies.insert(mapped_edges);
    });
    Ok(copies.len() as u64)
}

/// The k-uniform hypergraph on `[n]` (0-indexed as `0..n`) whose edges are
/// the k-term arithmetic progressions.
pub fn ap_hypergraph(k: usize, n: usize) -> Result<WeightedHypergraph> {
    if k < 3 {
        return Err(Error::InvalidParameter("progressions need k >= 3"));
    }
    if n < k {
        return Err(Error::InvalidParameter("ground set smaller than k"));
    }
    let mut edges = Vec::new();
    let mut d = 1usize;
    while (k - 1) * d < n {
        for x in 0..(n - (k - 1) * d) {
            edges.push((0..k).map(|i| (x + i * d) as u32).collect::<Vec<_>>());
        }
        d += 1;
    }
    WeightedHypergraph::unit(n, k, edges)
}

/// Number of k-term arithmetic progressions inside `set` (a subset of `0..n`).
pub fn count_aps(k: usize, n: usize, set: &VertexSet) -> u64 {
    if k < 2 {
        return 0;
    }
    let mut member = alloc::vec![false; n];
    for v in set.iter() {
        if (v as usize) < n {
            member[v as usize] = true;
        }
    }
    let mut count = 0u64;
    let mut d = 1usize;
    while (k - 1) * d < n {
        for x in 0..(n - (k - 1) * d) {
            if (0..k).all(|i| member[x + i * d]) {
                count += 1;
            }
        }
        d += 1;
    }
    count
}

/// One row of the copy-hypergraph degree audit.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeAuditRow {
    pub u: usize,
    pub delta_u: f64,
    /// `(n^(-1/m_s))^(u-1) * n^(v_H - s)`.
    pub bound: f64,
    /// `bound / delta_u` (infinite when `delta_u = 0`).
    pub slack: f64,
}

/// Degree audit of the copy hypergraph: the symmetry identity
/// `Delta_1 = e_H e(H)/v(H)` and the density-driven bound on `Delta_u`
/// for `u >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeAudit {
    pub delta_1: f64,
    pub delta_1_formula: f64,
    pub rows: Vec<DegreeAuditRow>,
    /// True when the identity is exact and every bound holds.
    pub holds: bool,
}

pub fn degree_bound_audit(pattern: &PatternHypergraph, n: usize) -> Result<DegreeAudit> {
    let host = copy_hypergraph(pattern, n)?;
    let delta_1 = host.max_degree(1);
    let delta_1_formula =
        pattern.edge_count() as f64 * host.total_weight() / host.vertex_count() as f64;
    let ms = s_density(pattern)?.value.to_f64();
    let v_h = pattern.vertex_count() as f64;
    let s = pattern.uniformity() as f64;
    let nf = n as f64;
    let mut holds = delta_1 == delta_1_formula;
    let mut rows = Vec::new();
    for u in 2..=pattern.edge_count() {
        let delta_u = host.max_degree(u);
        let bound = math::powf(nf, v_h - s - (u as f64 - 1.0) / ms);
        let ok = delta_u <= bound * (1.0 + 1e-12);
        holds &= ok;
        rows.push(DegreeAuditRow {
            u,
            delta_u,
            bound,
            slack: bound / delta_u,
        });
    }
    Ok(DegreeAudit {
        delta_1,
        delta_1_formula,
        rows,
        holds,
    })
}

/// The explicit constants from the main degree-condition theorem:
/// `lambda = 1e-5 K^-2 r^-4 eps^9 (1-p0)` and
/// `C = 1e6 K^2 r^5 eps^-9 (1-p0)^-1 log(1/(1-p0))`.
pub fn theorem_constants(r: usize, p0: f64, epsilon: f64, k: f64) -> Result<(f64, f64)> {
    if r == 0 {
        return Err(Error::InvalidParameter("uniformity must be positive"));
    }
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::InvalidParameter("p0 must lie in (0,1)"));
    }
    if !(epsilon > 0.0 && k > 0.0) {
        return Err(Error::InvalidParameter("epsilon and K must be positive"));
    }
    let rf = r as f64;
    let eps9 = math::powi(epsilon, 9);
    let lambda = 1e-5 / (k * k) / math::powi(rf, 4) * eps9 * (1.0 - p0);
    let c = 1e6 * k * k * math::powi(rf, 5) / eps9 / (1.0 - p0) * math::ln(1.0 / (1.0 - p0));
    Ok((lambda, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn k3() -> PatternHypergraph {
        PatternHypergraph::complete_graph(3).unwrap()
    }

    fn k4() -> PatternHypergraph {
        PatternHypergraph::complete_graph(4).unwrap()
    }

    fn single_edge() -> PatternHypergraph {
        PatternHypergraph::new(2, 2, alloc::vec![alloc::vec![0, 1]]).unwrap()
    }

    #[test]
    fn densities_match_known_values() {
        assert_eq!(two_density(&k3()).unwrap().value, Rational::new(2, 1));
        assert_eq!(
            two_density(&single_edge()).unwrap().value,
            Rational::new(1, 2)
        );
        let report = two_density(&k4()).unwrap();
        assert_eq!(report.value, Rational::new(5, 2));
        assert_eq!(report.achieving_vertices, 4);
        assert_eq!(report.achieving_edges.len(), 6);
    }

    #[test]
    fn s_density_cases() {
        // single s-edge: 1/s
        let single3 = PatternHypergraph::new(3, 3, alloc::vec![alloc::vec![0, 1, 2]]).unwrap();
        assert_eq!(s_density(&single3).unwrap().value, Rational::new(1, 3));
        // two s-edges sharing s-1 vertices: (2-1)/(s+1-s) = 1
        let pair = PatternHypergraph::new(
            3,
            4,
            alloc::vec![alloc::vec![0, 1, 2], alloc::vec![0, 1, 3]],
        )
        .unwrap();
        assert_eq!(s_density(&pair).unwrap().value, Rational::new(1, 1));
        // graph specialization agrees
        assert_eq!(
            s_density(&k3()).unwrap().value,
            two_density(&k3()).unwrap().value
        );
    }

    #[test]
    fn density_invariant_under_relabelling() {
        // K3 with vertices permuted and an isolated vertex appended
        let relabeled = PatternHypergraph::new(
            2,
            5,
            alloc::vec![alloc::vec![4, 2], alloc::vec![2, 0], alloc::vec![0, 4]],
        )
        .unwrap();
        assert_eq!(two_density(&relabeled).unwrap().value, Rational::new(2, 1));
    }

    #[test]
    fn subset_rank_roundtrip() {
        for n in [4usize, 6, 8] {
            for s in 1..=3usize {
                let total = math::binomial(n as u64, s as u64) as u32;
                for r in 0..total {
                    let sub = subset_unrank(n, s, r);
                    assert_eq!(subset_rank(n, &sub), r);
                }
            }
        }
        // lexicographic: {0,1} ranks first, {3,4} last among pairs of [5]
        assert_eq!(subset_rank(5, &[0, 1]), 0);
        assert_eq!(subset_rank(5, &[3, 4]), 9);
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphism_count(&k3()).unwrap(), 6);
        assert_eq!(automorphism_count(&k4()).unwrap(), 24);
        assert_eq!(automorphism_count(&single_edge()).unwrap(), 2);
        // path on 3 vertices: swap endpoints
        let path = PatternHypergraph::new(2, 3, alloc::vec![alloc::vec![0, 1], alloc::vec![1, 2]])
            .unwrap();
        assert_eq!(automorphism_count(&path).unwrap(), 2);
    }

    #[test]
    fn copy_hypergraph_triangle_cases() {
        let h = copy_hypergraph(&k3(), 4).unwrap();
        assert_eq!(h.vertex_count(), 6);
        assert_eq!(h.edge_count(), 4);
        assert_eq!(h.uniformity(), 3);

        let h5 = copy_hypergraph(&k3(), 5).unwrap();
        assert_eq!(h5.edge_count(), 10); // 3!/|Aut| * C(5,3)
    }

    #[test]
    fn copy_hypergraph_single_edge_pattern() {
        let h = copy_hypergraph(&single_edge(), 6).unwrap();
        assert_eq!(h.uniformity(), 1);
        assert_eq!(h.edge_count(), 15); // C(6,2)
    }

    #[test]
    fn copy_count_matches_aut_formula() {
        let patterns = [
            k3(),
            k4(),
            single_edge(),
            PatternHypergraph::new(2, 3, alloc::vec![alloc::vec![0, 1], alloc::vec![1, 2]])
                .unwrap(),
            PatternHypergraph::new(
                2,
                4,
                alloc::vec![
                    alloc::vec![0, 1],
                    alloc::vec![1, 2],
                    alloc::vec![2, 3],
                    alloc::vec![0, 3],
                ],
            )
            .unwrap(), // C4
        ];
        for pattern in &patterns {
            for n in pattern.vertex_count()..=6 {
                let h = copy_hypergraph(pattern, n).unwrap();
                let aut = automorphism_count(pattern).unwrap();
                let labelled = falling_factorial(n as u64, pattern.vertex_count() as u64);
                assert_eq!(
                    h.edge_count() as u64,
                    labelled / aut,
                    "count mismatch for n={n}"
                );
            }
        }
    }

    #[test]
    fn count_copies_cases() {
        // complete host on 4 vertices: 4 triangles
        let host: Vec<Vec<u32>> = k4().edges().to_vec();
        assert_eq!(count_copies(&k3(), 4, &host).unwrap(), 4);
        // the pattern embedded in itself
        let tri_host: Vec<Vec<u32>> = k3().edges().to_vec();
        assert_eq!(count_copies(&k3(), 4, &tri_host).unwrap(), 1);
        // empty host
        assert_eq!(count_copies(&k3(), 4, &[]).unwrap(), 0);
    }

    #[test]
    fn count_copies_agrees_with_induced_weight_route() {
        let mut rng = CounterRng::new(0x90);
        let n = 5;
        let hmat = copy_hypergraph(&k3(), n).unwrap();
        let all_pairs: Vec<Vec<u32>> = (0..n as u32)
            .flat_map(|i| ((i + 1)..n as u32).map(move |j| alloc::vec![i, j]))
            .collect();
        for _ in 0..25 {
            let host: Vec<Vec<u32>> = all_pairs
                .iter()
                .filter(|_| rng.next_bool(0.5))
                .cloned()
                .collect();
            let direct = count_copies(&k3(), n, &host).unwrap();
            let as_set: VertexSet = host.iter().map(|e| subset_rank(n, e)).collect();
            let via_induced = hmat.induced_weight(&as_set);
            assert_eq!(direct as f64, via_induced);
        }
    }

    #[test]
    fn ap_hypergraph_cases() {
        let h = ap_hypergraph(3, 5).unwrap();
        assert_eq!(h.edge_count(), 4);
        // vertex "3" is 0-indexed 2: progressions {1,2,3},{2,3,4},{3,4,5},{1,3,5}
        assert_eq!(h.degree(&VertexSet::new(alloc::vec![2])), 4.0);
        assert_eq!(h.max_degree(1), 4.0);
        // k = n: single edge
        let single = ap_hypergraph(4, 4).unwrap();
        assert_eq!(single.edge_count(), 1);
    }

    #[test]
    fn ap_edge_count_formula() {
        for k in 3..=5usize {
            for n in k..=16 {
                let h = ap_hypergraph(k, n).unwrap();
                let mut expected = 0usize;
                let mut d = 1usize;
                while (k - 1) * d < n {
                    expected += n - (k - 1) * d;
                    d += 1;
                }
                assert_eq!(h.edge_count(), expected);
                // every edge has k distinct elements by construction
                for (e, _) in h.edges() {
                    assert_eq!(e.len(), k);
                }
                // max degree bounded by kn
                assert!(h.max_degree(1) <= (k * n) as f64);
            }
        }
    }

    #[test]
    fn count_aps_cases() {
        let h = ap_hypergraph(3, 7).unwrap();
        assert_eq!(count_aps(3, 7, &VertexSet::full(7)), h.edge_count() as u64);
        assert_eq!(count_aps(3, 7, &VertexSet::new(alloc::vec![0, 2])), 0);
        // {1,3,5} in [n] is 0-indexed {0,2,4}
        assert_eq!(count_aps(3, 7, &VertexSet::new(alloc::vec![0, 2, 4])), 1);
        // consistency with the hypergraph route on random subsets
        let mut rng = CounterRng::new(0xA9);
        for _ in 0..30 {
            let set: VertexSet = (0..7u32).filter(|_| rng.next_bool(0.5)).collect();
            assert_eq!(count_aps(3, 7, &set) as f64, h.induced_weight(&set));
        }
    }

    #[test]
    fn degree_audit_triangle_on_k6() {
        let audit = degree_bound_audit(&k3(), 6).unwrap();
        assert_eq!(audit.delta_1, 4.0); // each K6-edge lies in 4 triangles
        assert_eq!(audit.delta_1_formula, 4.0);
        assert!(audit.holds);
        // u = 2: actual 1, bound sqrt(6)
        let row = &audit.rows[0];
        assert_eq!(row.u, 2);
        assert_eq!(row.delta_u, 1.0);
        assert!((row.bound - math::sqrt(6.0)).abs() < 1e-12);
        // u = e_H: distinct unit-weight copies give Delta = 1
        let last = audit.rows.last().unwrap();
        assert_eq!(last.u, 3);
        assert_eq!(last.delta_u, 1.0);
    }

    #[test]
    fn theorem_constants_cases() {
        let p0 = 1.0 - 1.0 / core::f64::consts::E;
        let (lambda, c) = theorem_constants(1, p0, 1.0, 1.0).unwrap();
        assert!((lambda - 3.6787944117144236e-6).abs() < 1e-18);
        assert!((c - 2718281.828459045).abs() < 1e-6);
        // eps doubled: lambda scales by 2^9, C by 2^-9
        let (l1, c1) = theorem_constants(2, 0.5, 0.3, 2.0).unwrap();
        let (l2, c2) = theorem_constants(2, 0.5, 0.6, 2.0).unwrap();
        assert!((l2 / l1 - 512.0).abs() < 1e-9);
        assert!((c2 / c1 - 1.0 / 512.0).abs() < 1e-12);
        // K doubled: lambda by 1/4, C by 4
        let (l3, c3) = theorem_constants(2, 0.5, 0.3, 4.0).unwrap();
        assert!((l3 / l1 - 0.25).abs() < 1e-12);
        assert!((c3 / c1 - 4.0).abs() < 1e-12);
        assert!(theorem_constants(0, 0.5, 0.3, 1.0).is_err());
        assert!(theorem_constants(2, 1.0, 0.3, 1.0).is_err());
    }
}
