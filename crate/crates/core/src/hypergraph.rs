//! Weighted r-uniform hypergraphs.
//!
//! Vertices are dense indices `0..v`. Edges are r-element vertex sets with
//! positive weights; duplicate edge sets are merged by weight addition at
//! construction. For `v <= 64` every edge also carries a bitmask, which is
//! the fast path for the subset tests done by the enumeration oracles.

use crate::math;
use crate::{Error, Result};
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

/// A subset of the vertex range, stored sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexSet {
    indices: Vec<u32>,
}

impl VertexSet {
    pub fn new(mut indices: Vec<u32>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        VertexSet { indices }
    }

    pub fn empty() -> Self {
        VertexSet::default()
    }

    pub fn full(v: usize) -> Self {
        VertexSet {
            indices: (0..v as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.indices.iter().copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.indices
    }

    pub fn contains(&self, v: u32) -> bool {
        self.indices.binary_search(&v).is_ok()
    }

    /// Bitmask representation when every index fits in a `u64`.
    pub fn mask(&self) -> Option<u64> {
        if self.indices.last().is_none_or(|&m| m < 64) {
            Some(self.indices.iter().fold(0u64, |acc, &i| acc | (1 << i)))
        } else {
            None
        }
    }

    /// True when `self` is a subset of `other` (both sorted).
    pub fn subset_of(&self, other: &VertexSet) -> bool {
        is_sorted_subset(&self.indices, &other.indices)
    }
}

impl FromIterator<u32> for VertexSet {
    fn from_iter<T: IntoIterator<Item = u32>>(iter: T) -> Self {
        VertexSet::new(iter.into_iter().collect())
    }
}

fn is_sorted_subset(small: &[u32], big: &[u32]) -> bool {
    let mut it = big.iter();
    'outer: for &s in small {
        for &b in it.by_ref() {
            match b.cmp(&s) {
                core::cmp::Ordering::Equal => continue 'outer,
                core::cmp::Ordering::Greater => return false,
                core::cmp::Ordering::Less => {}
            }
        }
        return false;
    }
    true
}

/// Independent retention probabilities, one per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMeasure {
    q: Vec<f64>,
}

impl ProductMeasure {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        for &x in &q {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidParameter(
                    "retention probability outside [0,1]",
                ));
            }
        }
        Ok(ProductMeasure { q })
    }

    pub fn constant(v: usize, p: f64) -> Result<Self> {
        ProductMeasure::new(alloc::vec![p; v])
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Edge {
    vertices: Vec<u32>, // sorted, distinct
    weight: f64,
    mask: u64, // valid only when the ambient v <= 64
}

/// An r-uniform hypergraph with positive edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHypergraph {
    vertex_count: usize,
    uniformity: usize,
    edges: Vec<Edge>,
}

/// Outcome of the container-style degree condition check.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeConditionReport {
    /// True when `max_s ratio_s <= K`.
    pub holds: bool,
    /// The `s` attaining the largest ratio.
    pub worst_s: usize,
    /// `max_s Delta_s / ((lambda p)^(s-1) e(H)/v(H))`.
    pub ratio: f64,
    /// Per-s `(Delta_s, ratio_s)`.
    pub per_s: Vec<(usize, f64, f64)>,
}

impl WeightedHypergraph {
    /// Builds a hypergraph, validating edges and merging duplicates.
    ///
    /// Every edge must consist of exactly `uniformity` distinct vertices
    /// inside `0..vertex_count` and have a positive finite weight.
    pub fn new(
        vertex_count: usize,
        uniformity: usize,
        raw_edges: impl IntoIterator<Item = (Vec<u32>, f64)>,
    ) -> Result<Self> {
        if uniformity == 0 {
            return Err(Error::InvalidEdge("uniformity must be positive"));
        }
        let mut edges: Vec<Edge> = Vec::new();
        for (mut vertices, weight) in raw_edges {
            vertices.sort_unstable();
            if vertices.len() != uniformity {
                return Err(Error::InvalidEdge("edge size differs from uniformity"));
            }
            if vertices.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidEdge("repeated vertex inside an edge"));
            }
            if vertices.last().is_some_and(|&m| m as usize >= vertex_count) {
                return Err(Error::InvalidEdge("vertex index out of range"));
            }
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::InvalidEdge(
                    "edge weight must be positive and finite",
                ));
            }
            edges.push(Edge {
                vertices,
                weight,
                mask: 0,
            });
        }
        edges.sort_by(|a, b| a.vertices.cmp(&b.vertices));
        let mut merged: Vec<Edge> = Vec::with_capacity(edges.len());
        for e in edges {
            match merged.last_mut() {
                Some(last) if last.vertices == e.vertices => last.weight += e.weight,
                _ => merged.push(e),
            }
        }
        if vertex_count <= 64 {
            for e in merged.iter_mut() {
                e.mask = e.vertices.iter().fold(0u64, |acc, &i| acc | (1 << i));
            }
        }
        Ok(WeightedHypergraph {
            vertex_count,
            uniformity,
            edges: merged,
        })
    }

    /// Unit-weight convenience constructor.
    pub fn unit(
        vertex_count: usize,
        uniformity: usize,
        edges: impl IntoIterator<Item = Vec<u32>>,
    ) -> Result<Self> {
        WeightedHypergraph::new(
            vertex_count,
            uniformity,
            edges.into_iter().map(|e| (e, 1.0)),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn uniformity(&self) -> usize {
        self.uniformity
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_edgeless(&self) -> bool {
        self.edges.is_empty()
    }

    /// Iterates `(vertex set, weight)` pairs in sorted edge order.
    pub fn edges(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.edges.iter().map(|e| (e.vertices.as_slice(), e.weight))
    }

    /// `e(H)`, the total edge weight.
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// `deg_H(B)`: total weight of edges containing `B`.
    pub fn degree(&self, b: &VertexSet) -> f64 {
        match b.mask() {
            Some(bm) if self.vertex_count <= 64 => self
                .edges
                .iter()
                .filter(|e| e.mask & bm == bm)
                .map(|e| e.weight)
                .sum(),
            _ => self
                .edges
                .iter()
                .filter(|e| is_sorted_subset(b.as_slice(), &e.vertices))
                .map(|e| e.weight)
                .sum(),
        }
    }

    /// `Delta_s(H)`: the largest degree over size-`s` vertex sets.
    ///
    /// Only subsets of edges are enumerated (a set with positive degree
    /// lies inside an edge), so the cost is `sum_A C(r,s)` degrees rather
    /// than `C(v,s)`.
    pub fn max_degree(&self, s: usize) -> f64 {
        assert!(s >= 1 && s <= self.uniformity, "s must lie in [1, r]");
        let mut candidates: BTreeSet<Vec<u32>> = BTreeSet::new();
        for e in &self.edges {
            for_each_combination(&e.vertices, s, &mut |subset| {
                candidates.insert(subset.to_vec());
            });
        }
        candidates
            .into_iter()
            .map(|c| self.degree(&VertexSet { indices: c }))
            .fold(0.0, f64::max)
    }

    /// `e(H[R])`: total weight of edges fully inside `R`.
    pub fn induced_weight(&self, r_set: &VertexSet) -> f64 {
        match r_set.mask() {
            Some(rm) if self.vertex_count <= 64 => self
                .edges
                .iter()
                .filter(|e| e.mask & !rm == 0)
                .map(|e| e.weight)
                .sum(),
            _ => self
                .edges
                .iter()
                .filter(|e| is_sorted_subset(&e.vertices, r_set.as_slice()))
                .map(|e| e.weight)
                .sum(),
        }
    }

    /// `f(q) = sum_A d_A prod_{v in A} q_v`, the expected induced weight
    /// under the product measure `q`.
    pub fn expected_induced_weight(&self, q: &ProductMeasure) -> Result<f64> {
        if q.len() != self.vertex_count {
            return Err(Error::InvalidParameter(
                "measure length differs from vertex count",
            ));
        }
        Ok(self.expected_induced_weight_raw(q.values()))
    }

    pub(crate) fn expected_induced_weight_raw(&self, q: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|e| e.weight * e.vertices.iter().map(|&v| q[v as usize]).product::<f64>())
            .sum()
    }

    /// Gradient of `f` at `q`, accumulated into `out` (len = vertex count).
    ///
    /// Uses prefix/suffix products per edge so zero coordinates are handled
    /// without division.
    pub(crate) fn gradient_raw(&self, q: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        let mut prefix: Vec<f64> = Vec::new();
        for e in &self.edges {
            let k = e.vertices.len();
            prefix.clear();
            prefix.resize(k + 1, 1.0);
            for i in 0..k {
                prefix[i + 1] = prefix[i] * q[e.vertices[i] as usize];
            }
            let mut suffix = 1.0;
            for i in (0..k).rev() {
                out[e.vertices[i] as usize] += e.weight * prefix[i] * suffix;
                suffix *= q[e.vertices[i] as usize];
            }
        }
    }

    /// `partial_B f` evaluated at the all-ones point, computed term-wise:
    /// each edge monomial differentiates to `d_A` when `B` is inside `A`
    /// and to zero otherwise, so the value coincides with `deg_H(B)`.
    pub fn partial_derivative_at_one(&self, b: &VertexSet) -> f64 {
        self.degree(b)
    }

    /// `H - W`: the restriction to `V \ W`, with vertices relabelled to
    /// dense indices preserving order. Edges meeting `W` are dropped.
    pub fn restriction(&self, w: &VertexSet) -> WeightedHypergraph {
        let mut relabel: Vec<Option<u32>> = alloc::vec![None; self.vertex_count];
        let mut next = 0u32;
        for v in 0..self.vertex_count as u32 {
            if !w.contains(v) {
                relabel[v as usize] = Some(next);
                next += 1;
            }
        }
        let surviving = self
            .edges
            .iter()
            .filter(|e| e.vertices.iter().all(|&v| relabel[v as usize].is_some()))
            .map(|e| {
                (
                    e.vertices
                        .iter()
                        .map(|&v| relabel[v as usize].unwrap())
                        .collect::<Vec<_>>(),
                    e.weight,
                )
            })
            .collect::<Vec<_>>();
        WeightedHypergraph::new(next as usize, self.uniformity, surviving)
            .expect("restriction preserves invariants")
    }

    /// Checks `Delta_s(H) <= K (lambda p)^(s-1) e(H)/v(H)` for all `s` in
    /// `[1, r]`, reporting the worst ratio `Delta_s / ((lambda p)^(s-1) e/v)`.
    pub fn degree_condition_check(
        &self,
        p: f64,
        k: f64,
        lambda: f64,
    ) -> Result<DegreeConditionReport> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter("p must lie in (0,1)"));
        }
        if !(k > 0.0 && lambda > 0.0) {
            return Err(Error::InvalidParameter("K and lambda must be positive"));
        }
        if self.vertex_count == 0 || self.is_edgeless() {
            return Err(Error::InvalidParameter(
                "degree condition needs a nonempty hypergraph",
            ));
        }
        let density = self.total_weight() / self.vertex_count as f64;
        let mut per_s = Vec::with_capacity(self.uniformity);
        let mut worst_s = 1;
        let mut worst_ratio = f64::NEG_INFINITY;
        for s in 1..=self.uniformity {
            let delta = self.max_degree(s);
            let scale = math::powi(lambda * p, (s - 1) as u32) * density;
            let ratio = delta / scale;
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst_s = s;
            }
            per_s.push((s, delta, ratio));
        }
        Ok(DegreeConditionReport {
            holds: worst_ratio <= k * (1.0 + 1e-12),
            worst_s,
            ratio: worst_ratio,
            per_s,
        })
    }

    /// `alpha(H)`: the largest vertex set inducing no edge, by exact
    /// branch-and-bound on the highest-degree undecided vertex.
    ///
    /// Instances with more than 40 vertices are rejected rather than
    /// silently approximated.
    pub fn independence_number(&self) -> Result<usize> {
        Ok(self.maximum_independent_set()?.len())
    }

    /// A maximum independent set witnessing `alpha(H)`.
    pub fn maximum_independent_set(&self) -> Result<VertexSet> {
        const BUDGET: usize = 40;
        if self.vertex_count > BUDGET {
            return Err(Error::BudgetExceeded {
                what: "independence number search",
                limit: BUDGET as u64,
                requested: self.vertex_count as u64,
            });
        }
        if self.edges.is_empty() {
            return Ok(VertexSet::full(self.vertex_count));
        }

        // branch on vertices in order of decreasing degree
        let mut order: Vec<u32> = (0..self.vertex_count as u32).collect();
        let degs: Vec<f64> = (0..self.vertex_count as u32)
            .map(|v| self.degree(&VertexSet::new(alloc::vec![v])))
            .collect();
        order.sort_by(|&a, &b| {
            degs[b as usize]
                .partial_cmp(&degs[a as usize])
                .unwrap()
                .then(a.cmp(&b))
        });

        let mut incident: Vec<Vec<usize>> = alloc::vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            for &v in &e.vertices {
                incident[v as usize].push(i);
            }
        }

        struct Search<'a> {
            h: &'a WeightedHypergraph,
            order: Vec<u32>,
            incident: Vec<Vec<usize>>,
            chosen_in_edge: Vec<usize>,
            current: Vec<u32>,
            best: Vec<u32>,
        }

        impl Search<'_> {
            fn run(&mut self, pos: usize) {
                if pos == self.order.len() {
                    if self.current.len() > self.best.len() {
                        self.best = self.current.clone();
                    }
                    return;
                }
                if self.current.len() + (self.order.len() - pos) <= self.best.len() {
                    return; // cannot beat the incumbent
                }
                let v = self.order[pos] as usize;
                // include v when it completes no edge
                let completes = self.incident[v]
                    .iter()
                    .any(|&e| self.chosen_in_edge[e] + 1 == self.h.edges[e].vertices.len());
                if !completes {
                    for &e in &self.incident[v] {
                        self.chosen_in_edge[e] += 1;
                    }
                    self.current.push(v as u32);
                    self.run(pos + 1);
                    self.current.pop();
                    for &e in &self.incident[v] {
                        self.chosen_in_edge[e] -= 1;
                    }
                }
                self.run(pos + 1);
            }
        }

        let mut search = Search {
            h: self,
            order,
            incident,
            chosen_in_edge: alloc::vec![0; self.edges.len()],
            current: Vec::new(),
            best: Vec::new(),
        };
        search.run(0);
        Ok(VertexSet::new(search.best))
    }
}

/// Visits every size-`k` combination of `items` (assumed sorted).
fn for_each_combination(items: &[u32], k: usize, visit: &mut impl FnMut(&[u32])) {
    fn rec(
        items: &[u32],
        k: usize,
        start: usize,
        buf: &mut Vec<u32>,
        visit: &mut impl FnMut(&[u32]),
    ) {
        if buf.len() == k {
            visit(buf);
            return;
        }
        let needed = k - buf.len();
        for i in start..=items.len().saturating_sub(needed) {
            buf.push(items[i]);
            rec(items, k, i + 1, buf, visit);
            buf.pop();
        }
    }
    if k == 0 || k > items.len() {
        return;
    }
    let mut buf = Vec::with_capacity(k);
    rec(items, k, 0, &mut buf, visit);
}

/// Residual of the telescoping identity for set functions: for
/// `F : P(A) -> R`, indexed by bitmask over `|A|` elements,
///
/// ```text
/// F(A) - prod_a F({a})
///   = sum_{B subset A, |B| >= 2} sum_{b in B}
///       [F(B) - F(B\{b}) F({b})] prod_{a in A\B} F({a}) / (C(|A|,|B|) |B|)
/// ```
///
/// Returns left minus right; the identity makes this zero for every `F`,
/// which is precisely what the tests assert.
pub fn telescoping_identity_residual(f_values: &[f64], set_size: usize) -> Result<f64> {
    if set_size == 0 || set_size > 12 {
        return Err(Error::BudgetExceeded {
            what: "telescoping identity base set",
            limit: 12,
            requested: set_size as u64,
        });
    }
    let full: usize = (1 << set_size) - 1;
    if f_values.len() != full + 1 {
        return Err(Error::InvalidParameter("need one value per subset of A"));
    }
    let singleton = |a: usize| f_values[1 << a];
    let mut singles_prod = 1.0;
    for a in 0..set_size {
        singles_prod *= singleton(a);
    }
    let lhs = f_values[full] - singles_prod;

    let mut rhs = 0.0;
    for b_mask in 0usize..=full {
        let size = b_mask.count_ones() as usize;
        if size < 2 {
            continue;
        }
        let mut outside_prod = 1.0;
        for a in 0..set_size {
            if b_mask & (1 << a) == 0 {
                outside_prod *= singleton(a);
            }
        }
        let coeff = 1.0 / (math::binomial(set_size as u64, size as u64) * size as f64);
        for b in 0..set_size {
            if b_mask & (1 << b) != 0 {
                let inner = f_values[b_mask] - f_values[b_mask & !(1 << b)] * singleton(b);
                rhs += coeff * inner * outside_prod;
            }
        }
    }
    Ok(lhs - rhs)
}
