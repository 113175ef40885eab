//! Ground-truth and certified estimates of lower-tail probabilities.
//!
//! Three routes to `log Pr(e(H[R]) <= threshold)` under `R ~ Ber(p)^V`:
//!
//! - exact subset enumeration in Gray-code order, maintaining the induced
//!   weight incrementally through per-edge missing-vertex counters
//!   (`O(2^v * avg degree)` time, `O(e)` memory, log-space accumulation);
//! - plain Monte Carlo with a Wilson 95% interval (rule-of-three upper
//!   bound when no hits are seen);
//! - the exponential-tilting certificate: for a product measure `q*`
//!   feasible at the shrunk level `(1-eps) eta`, the importance weight
//!   `J(y)` and a variance bound on `J(Y')` turn one probability estimate
//!   under `q*` into a one-sided bound on the original tail probability.
//!
//! Also exact conditional moments and conditional divergence profiles of
//! the tail-conditioned law, used by the correlation and chain-rule audits.

use crate::entropy::{ip_derivative_raw, ip_raw};
use crate::hypergraph::{ProductMeasure, VertexSet, WeightedHypergraph};
use crate::math;
use crate::rng::CounterRng;
use crate::variational::TailSpec;
use crate::{Error, Result};
use alloc::vec::Vec;

/// Vertex budget for full subset enumeration.
pub const EXACT_BUDGET: usize = 28;
/// Vertex budget for exact conditional computations.
pub const CONDITIONAL_BUDGET: usize = 20;
/// z for a two-sided 95% normal interval.
const Z95: f64 = 1.959963984540054;

/// How a tail estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    Exact,
    MonteCarlo,
    TiltedCertificate,
}

impl EstimateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateMethod::Exact => "exact",
            EstimateMethod::MonteCarlo => "mc",
            EstimateMethod::TiltedCertificate => "tilted_certificate",
        }
    }
}

/// A log-probability estimate with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct TailEstimate {
    /// Natural-log probability (`-inf` for an empirical zero).
    pub log_prob: f64,
    pub method: EstimateMethod,
    /// 95% bounds on `log_prob`, present for Monte Carlo estimates.
    pub ci: Option<(f64, f64)>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

/// Incremental subset walker: tracks the induced weight of the current
/// subset under single-vertex flips.
///
/// The complete-edge count is integral, so the induced weight snaps back
/// to exactly zero whenever no edge is complete; the float accumulator is
/// Kahan-compensated in between.
struct SubsetWalker {
    incident: Vec<Vec<u32>>,
    weights: Vec<f64>,
    missing: Vec<u32>,
    complete: usize,
    acc: f64,
    comp: f64,
    in_set: Vec<bool>,
    size: usize,
}

impl SubsetWalker {
    fn new(h: &WeightedHypergraph) -> Self {
        let mut incident: Vec<Vec<u32>> = alloc::vec![Vec::new(); h.vertex_count()];
        let mut weights = Vec::with_capacity(h.edge_count());
        let mut missing = Vec::with_capacity(h.edge_count());
        for (i, (vs, w)) in h.edges().enumerate() {
            for &v in vs {
                incident[v as usize].push(i as u32);
            }
            weights.push(w);
            missing.push(vs.len() as u32);
        }
        SubsetWalker {
            incident,
            weights,
            missing,
            complete: 0,
            acc: 0.0,
            comp: 0.0,
            in_set: alloc::vec![false; h.vertex_count()],
            size: 0,
        }
    }

    #[inline]
    fn kahan_add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.acc + y;
        self.comp = (t - self.acc) - y;
        self.acc = t;
    }

    fn flip(&mut self, v: usize) {
        let entering = !self.in_set[v];
        self.in_set[v] = entering;
        if entering {
            self.size += 1;
            for i in 0..self.incident[v].len() {
                let e = self.incident[v][i] as usize;
                self.missing[e] -= 1;
                if self.missing[e] == 0 {
                    self.complete += 1;
                    let w = self.weights[e];
                    self.kahan_add(w);
                }
            }
        } else {
            self.size -= 1;
            for i in 0..self.incident[v].len() {
                let e = self.incident[v][i] as usize;
                if self.missing[e] == 0 {
                    self.complete -= 1;
                    let w = self.weights[e];
                    self.kahan_add(-w);
                }
                self.missing[e] += 1;
            }
        }
        if self.complete == 0 {
            self.acc = 0.0;
            self.comp = 0.0;
        }
    }

    #[inline]
    fn induced(&self) -> f64 {
        if self.complete == 0 {
            0.0
        } else {
            self.acc
        }
    }
}

fn check_exact_budget(v: usize, budget: usize, what: &'static str) -> Result<()> {
    if v > budget {
        return Err(Error::BudgetExceeded {
            what,
            limit: budget as u64,
            requested: v as u64,
        });
    }
    Ok(())
}

fn tail_tol(threshold: f64) -> f64 {
    1e-9 * (1.0 + math::abs(threshold))
}

/// Exact `log Pr(e(H[R]) <= threshold)` by full subset enumeration
/// (up to 28 vertices).
pub fn exact_lower_tail(h: &WeightedHypergraph, p: f64, spec: TailSpec) -> Result<TailEstimate> {
    let log_probs = exact_lower_tail_many(h, p, &[spec])?;
    Ok(TailEstimate {
        log_prob: log_probs[0],
        method: EstimateMethod::Exact,
        ci: None,
        samples: None,
        seed: None,
    })
}

/// One enumeration pass, many thresholds: returns `log Pr(tail)` for each
/// spec in input order.
pub fn exact_lower_tail_many(
    h: &WeightedHypergraph,
    p: f64,
    specs: &[TailSpec],
) -> Result<Vec<f64>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter("p must lie in (0,1)"));
    }
    let v = h.vertex_count();
    check_exact_budget(v, EXACT_BUDGET, "exact tail enumeration")?;
    let thresholds: Vec<f64> = specs.iter().map(|s| s.threshold(h, p)).collect();
    // bucket by sorted threshold; a subset counts toward every threshold at
    // or above its induced weight, i.e. a prefix sum over buckets
    let mut order: Vec<usize> = (0..thresholds.len()).collect();
    order.sort_by(|&a, &b| thresholds[a].partial_cmp(&thresholds[b]).unwrap());
    let sorted: Vec<f64> = order
        .iter()
        .map(|&i| thresholds[i] + tail_tol(thresholds[i]))
        .collect();

    let ln_p = math::ln(p);
    let ln_1p = math::ln(1.0 - p);
    let mut buckets = alloc::vec![math::LogSumExp::new(); sorted.len() + 1];
    let mut walker = SubsetWalker::new(h);
    let total = 1u64 << v;
    let visit = |walker: &SubsetWalker, buckets: &mut [math::LogSumExp]| {
        let x = walker.induced();
        let bucket = sorted.partition_point(|&t| t < x);
        let lw = walker.size as f64 * ln_p + (v - walker.size) as f64 * ln_1p;
        buckets[bucket].add(lw);
    };
    visit(&walker, &mut buckets);
    for i in 1..total {
        walker.flip(i.trailing_zeros() as usize);
        visit(&walker, &mut buckets);
    }

    // prefix-merge buckets: tail(threshold_j) sums buckets 0..=j
    let mut prefix = math::LogSumExp::new();
    let mut sorted_logs = alloc::vec![f64::NEG_INFINITY; sorted.len()];
    for (j, bucket) in buckets.iter().take(sorted.len()).enumerate() {
        prefix.merge(bucket);
        sorted_logs[j] = prefix.value().min(0.0);
    }
    let mut out = alloc::vec![0.0; sorted.len()];
    for (rank, &original) in order.iter().enumerate() {
        out[original] = sorted_logs[rank];
    }
    Ok(out)
}

/// Monte Carlo estimate of the lower-tail probability with a Wilson 95%
/// interval mapped to log scale. A zero empirical frequency is reported
/// with the rule-of-three upper bound `log(3/n)`.
///
/// Sample `i` uses the substream `(seed, i)`, so the estimate is
/// bit-identical for a fixed seed regardless of evaluation order.
pub fn mc_lower_tail(
    h: &WeightedHypergraph,
    p: f64,
    spec: TailSpec,
    samples: u64,
    seed: u64,
) -> Result<TailEstimate> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter("p must lie in (0,1)"));
    }
    if samples < 100 {
        return Err(Error::InvalidParameter("need at least 100 samples"));
    }
    let v = h.vertex_count();
    let threshold = spec.threshold(h, p);
    let tol = tail_tol(threshold);
    let mut hits = 0u64;
    let mut membership = alloc::vec![false; v];
    for i in 0..samples {
        let mut rng = CounterRng::substream(seed, i);
        for slot in membership.iter_mut() {
            *slot = rng.next_bool(p);
        }
        let mut induced = 0.0;
        for (vs, w) in h.edges() {
            if vs.iter().all(|&x| membership[x as usize]) {
                induced += w;
            }
        }
        if induced <= threshold + tol {
            hits += 1;
        }
    }
    let n = samples as f64;
    let (lo, hi) = wilson_interval(hits as f64, n);
    let (log_prob, ci) = if hits == 0 {
        (f64::NEG_INFINITY, (f64::NEG_INFINITY, math::ln(3.0 / n)))
    } else {
        (
            math::ln(hits as f64 / n),
            (math::ln(lo), math::ln(hi.min(1.0))),
        )
    };
    Ok(TailEstimate {
        log_prob,
        method: EstimateMethod::MonteCarlo,
        ci: Some(ci),
        samples: Some(samples),
        seed: Some(seed),
    })
}

/// Wilson score interval for `k` successes out of `n`, on the linear scale.
fn wilson_interval(k: f64, n: f64) -> (f64, f64) {
    let phat = k / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * math::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// The exponential-tilting weight
/// `J(y) = sum_{y_v=1} log(q_v/p) + sum_{y_v=0} log((1-q_v)/(1-p))`,
/// so that `exp(J(y)) = Pr(Y'=y)/Pr(Y=y)`. A coordinate with `q_v = 0`
/// taken at value one yields `-inf`.
pub fn importance_weight(q: &ProductMeasure, p: f64, y: &VertexSet) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter("p must lie in (0,1)"));
    }
    if q.values().iter().any(|&x| x >= 1.0) {
        return Err(Error::InvalidParameter("tilting needs q_v < 1"));
    }
    let mut j = 0.0;
    for (v, &qv) in q.values().iter().enumerate() {
        if y.contains(v as u32) {
            if qv == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            j += math::ln(qv / p);
        } else {
            j += math::ln((1.0 - qv) / (1.0 - p));
        }
    }
    Ok(j)
}

/// An explicit constant `K(p0)` with `Var(X) <= K(p0) i_p(q)` for all
/// `0 < p <= p0` and `0 <= q <= p`, where `X` is the single-coordinate
/// tilting weight (so `Var(X) = q(1-q) i_p'(q)^2` and `E[X] = i_p(q)`).
///
/// The two branches come from the cases `q >= p/2` and `q < p/2` of the
/// variance analysis.
pub fn variance_bound_constant(p0: f64) -> Result<f64> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::InvalidParameter("p0 must lie in (0,1)"));
    }
    let near = 2.0 * ((2.0 - p0) / (1.0 - p0)) * ((2.0 - p0) / (1.0 - p0));
    let l = math::ln(1.0 / (1.0 - p0));
    let far = 8.0 * (8.0 / (core::f64::consts::E * core::f64::consts::E) + l * l);
    Ok(near.max(far))
}

/// Variance of the single-coordinate tilting weight: `q(1-q) i_p'(q)^2`.
pub fn tilt_variance(q: f64, p: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        return 0.0;
    }
    let d = ip_derivative_raw(q, p);
    q * (1.0 - q) * d * d
}

/// Output of the tilting certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltCertificate {
    pub q_star: ProductMeasure,
    pub epsilon: f64,
    /// `sum_v i_p(q*_v)`, the tilting cost of `q*`.
    pub phi_hat: f64,
    /// Variance-bound constant at `p0 = p`.
    pub k_var: f64,
    /// `K / (2 eps^2)`.
    pub c_prime: f64,
    /// `C' + log(2/eps)`.
    pub c: f64,
    /// Valid lower bound for `log Pr(X <= eta E[X])`.
    pub log_lower_bound: f64,
    /// `Pr(Y' in Y1 inter Y2)` (exact or a lower confidence bound).
    pub empirical_y1y2: f64,
    /// True when the probability was computed by exact enumeration; false
    /// when it is a one-sided 95% Clopper-Pearson lower confidence bound,
    /// in which case the certificate holds with that confidence.
    pub exact_probability: bool,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
}

/// Exponential-tilting lower-bound certificate for the tail probability.
///
/// Requires `q*` feasible at the shrunk level: `f(q*) <= (1-eps) *
/// threshold(spec)`. Defines `Y1` as the tail event itself and `Y2` as
/// `{J(y) <= (1+eps) phi_hat + C'}`; then
///
/// ```text
/// log Pr(tail) >= log Pr(Y' in Y1 inter Y2) - (1+eps) phi_hat - C'
/// ```
///
/// with `Y' ~ q*`. The probability is computed exactly when `v <= 20`
/// and otherwise lower-bounded from `samples` draws (Clopper-Pearson).
/// When the feasibility precondition holds and `q* <= p` coordinatewise,
/// `Pr(Y' in Y1 inter Y2) >= eps/2` (Markov plus Chebyshev with the
/// variance-bound constant).
pub fn tilted_lower_bound_certificate(
    h: &WeightedHypergraph,
    p: f64,
    spec: TailSpec,
    epsilon: f64,
    q_star: &ProductMeasure,
    samples: u64,
    seed: u64,
) -> Result<TiltCertificate> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter("p must lie in (0,1)"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter("epsilon must lie in (0,1)"));
    }
    if q_star.len() != h.vertex_count() {
        return Err(Error::InvalidParameter(
            "q* length differs from vertex count",
        ));
    }
    if q_star.values().iter().any(|&x| x >= 1.0) {
        return Err(Error::InvalidParameter("tilting needs q_v < 1"));
    }
    let threshold = spec.threshold(h, p);
    let shrunk = (1.0 - epsilon) * threshold;
    let constraint = h.expected_induced_weight(q_star)?;
    if constraint > shrunk + 1e-9 * (1.0 + shrunk) {
        return Err(Error::InfeasibleTilt {
            constraint,
            threshold: shrunk,
        });
    }

    let phi_hat: f64 = q_star.values().iter().map(|&qv| ip_raw(qv, p)).sum();
    let k_var = variance_bound_constant(p)?;
    let c_prime = k_var / (2.0 * epsilon * epsilon);
    let c = c_prime + math::ln(2.0 / epsilon);
    let y2_cut = (1.0 + epsilon) * phi_hat + c_prime;

    let v = h.vertex_count();
    let (prob, exact, used_samples, used_seed) = if v <= CONDITIONAL_BUDGET {
        (
            exact_tilted_mass(h, p, q_star, threshold, y2_cut),
            true,
            None,
            None,
        )
    } else {
        let hits = sample_tilted_mass(h, p, q_star, threshold, y2_cut, samples, seed)?;
        let lower = clopper_pearson_lower(hits, samples, 0.05);
        (lower, false, Some(samples), Some(seed))
    };
    if prob <= 0.0 {
        return Err(Error::VacuousCertificate);
    }
    Ok(TiltCertificate {
        q_star: q_star.clone(),
        epsilon,
        phi_hat,
        k_var,
        c_prime,
        c,
        log_lower_bound: math::ln(prob) - (1.0 + epsilon) * phi_hat - c_prime,
        empirical_y1y2: prob,
        exact_probability: exact,
        samples: used_samples,
        seed: used_seed,
    })
}

/// Exact `Pr(Y' in Y1 inter Y2)` by enumeration: walks subsets in Gray
/// order maintaining the induced weight, `J`, and `log Pr(Y'=y)`
/// incrementally. States touching a `q_v = 0` coordinate carry no mass and
/// are excluded through an impossibility counter.
fn exact_tilted_mass(
    h: &WeightedHypergraph,
    p: f64,
    q_star: &ProductMeasure,
    threshold: f64,
    y2_cut: f64,
) -> f64 {
    let v = h.vertex_count();
    let q = q_star.values();
    let mut delta_j = alloc::vec![0.0; v];
    let mut delta_lp = alloc::vec![0.0; v];
    let mut j = 0.0;
    let mut lp = 0.0;
    for (i, &qv) in q.iter().enumerate() {
        j += math::ln((1.0 - qv) / (1.0 - p));
        lp += math::ln(1.0 - qv);
        if qv > 0.0 {
            delta_j[i] = math::ln(qv / p) - math::ln((1.0 - qv) / (1.0 - p));
            delta_lp[i] = math::ln(qv) - math::ln(1.0 - qv);
        }
    }
    let ttol = tail_tol(threshold);
    let jtol = 1e-12 * (1.0 + math::abs(y2_cut));
    let mut walker = SubsetWalker::new(h);
    let mut impossible = 0u32;
    let mut acc = math::LogSumExp::new();
    if walker.induced() <= threshold + ttol && j <= y2_cut + jtol {
        acc.add(lp);
    }
    for i in 1u64..(1 << v) {
        let flip = i.trailing_zeros() as usize;
        let entering = !walker.in_set[flip];
        walker.flip(flip);
        if q[flip] == 0.0 {
            if entering {
                impossible += 1;
            } else {
                impossible -= 1;
            }
        } else {
            let sign = if entering { 1.0 } else { -1.0 };
            j += sign * delta_j[flip];
            lp += sign * delta_lp[flip];
        }
        if impossible == 0 && walker.induced() <= threshold + ttol && j <= y2_cut + jtol {
            acc.add(lp);
        }
    }
    math::exp(acc.value().min(0.0))
}

/// Sampled hit count for `Pr(Y' in Y1 inter Y2)`.
fn sample_tilted_mass(
    h: &WeightedHypergraph,
    p: f64,
    q_star: &ProductMeasure,
    threshold: f64,
    y2_cut: f64,
    samples: u64,
    seed: u64,
) -> Result<u64> {
    if samples < 100 {
        return Err(Error::InvalidParameter("need at least 100 samples"));
    }
    let v = h.vertex_count();
    let q = q_star.values();
    let ttol = tail_tol(threshold);
    let jtol = 1e-12 * (1.0 + math::abs(y2_cut));
    let mut membership = alloc::vec![false; v];
    let mut hits = 0u64;
    for i in 0..samples {
        let mut rng = CounterRng::substream(seed, i);
        let mut j = 0.0;
        for (slot, &qv) in membership.iter_mut().zip(q.iter()) {
            *slot = rng.next_bool(qv);
            j += if *slot {
                math::ln(qv / p)
            } else {
                math::ln((1.0 - qv) / (1.0 - p))
            };
        }
        if j > y2_cut + jtol {
            continue;
        }
        let mut induced = 0.0;
        for (vs, w) in h.edges() {
            if vs.iter().all(|&x| membership[x as usize]) {
                induced += w;
            }
        }
        if induced <= threshold + ttol {
            hits += 1;
        }
    }
    Ok(hits)
}

/// One-sided Clopper-Pearson lower confidence bound for a binomial
/// proportion: the `p` solving `Pr(Bin(n,p) >= k) = alpha`, i.e. the
/// `alpha` quantile of `Beta(k, n-k+1)`; zero when `k = 0`.
pub fn clopper_pearson_lower(k: u64, n: u64, alpha: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    if k >= n {
        return math::powf(alpha, 1.0 / n as f64);
    }
    let a = k as f64;
    let b = (n - k + 1) as f64;
    // bisect I_x(a, b) = alpha
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if regularized_incomplete_beta(a, b, mid) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Regularized incomplete beta `I_x(a, b)` by the standard continued
/// fraction (Lentz), accurate to ~1e-14 for moderate a, b.
fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * math::ln(x) + b * math::ln(1.0 - x);
    let front = math::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if math::abs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if math::abs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if math::abs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if math::abs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if math::abs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if math::abs(del - 1.0) < EPS {
            break;
        }
    }
    h
}

/// Lanczos log-gamma (g = 7, 9 coefficients).
#[allow(clippy::excessive_precision)]
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        let pi = core::f64::consts::PI;
        return math::ln(pi / sin_pi(x)) - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEFFS[0];
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * math::ln(2.0 * core::f64::consts::PI) + (x + 0.5) * math::ln(t) - t + math::ln(acc)
}

#[cfg(feature = "std")]
fn sin_pi(x: f64) -> f64 {
    (core::f64::consts::PI * x).sin()
}

#[cfg(not(feature = "std"))]
fn sin_pi(x: f64) -> f64 {
    libm::sin(core::f64::consts::PI * x)
}

/// Exact conditional moment `E[prod_{a in A} Y_a | tail, (Y_w) = y_w]`
/// under the tail-conditioned law, by enumerating the `2^{|V \ W|}`
/// completions. `y_w` lists the members of `W` fixed to one; `A` must be
/// disjoint from `W`. Under lower-tail conditioning this never exceeds
/// `p^{|A|}` (positive-correlation inequality).
pub fn conditional_moment(
    h: &WeightedHypergraph,
    p: f64,
    spec: TailSpec,
    w: &VertexSet,
    y_w: &VertexSet,
    a: &VertexSet,
) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter("p must lie in (0,1)"));
    }
    let v = h.vertex_count();
    check_exact_budget(v, CONDITIONAL_BUDGET, "conditional moment enumeration")?;
    if !y_w.subset_of(w) {
        return Err(Error::InvalidParameter("y_w must assign values inside W"));
    }
    if a.iter().any(|x| w.contains(x)) {
        return Err(Error::InvalidParameter(
            "A must avoid the conditioning set W",
        ));
    }
    if a.iter().chain(w.iter()).any(|x| x as usize >= v) {
        return Err(Error::InvalidParameter("vertex index out of range"));
    }
    let threshold = spec.threshold(h, p);
    let tol = tail_tol(threshold);
    let free: Vec<u32> = (0..v as u32).filter(|&x| !w.contains(x)).collect();

    let mut walker = SubsetWalker::new(h);
    for x in y_w.iter() {
        walker.flip(x as usize);
    }
    let mut a_missing = a.len();
    let mut weight = math::powi(1.0 - p, free.len() as u32);
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    if walker.induced() <= threshold + tol {
        denominator += weight;
        if a_missing == 0 {
            numerator += weight;
        }
    }
    for i in 1u64..(1 << free.len()) {
        let idx = i.trailing_zeros() as usize;
        let vertex = free[idx];
        let entering = !walker.in_set[vertex as usize];
        walker.flip(vertex as usize);
        if entering {
            weight *= p / (1.0 - p);
            if a.contains(vertex) {
                a_missing -= 1;
            }
        } else {
            weight *= (1.0 - p) / p;
            if a.contains(vertex) {
                a_missing += 1;
            }
        }
        if walker.induced() <= threshold + tol {
            denominator += weight;
            if a_missing == 0 {
                numerator += weight;
            }
        }
    }
    if denominator <= 0.0 {
        return Err(Error::ZeroProbabilityConditioning);
    }
    Ok(numerator / denominator)
}

/// Exact conditional divergence profile
/// `H(W) = sum_{v not in W} I_p(Y_v | (Y_w)_{w in W})` of the
/// tail-conditioned law. Bounded above by `-log Pr(tail)` (chain rule),
/// and `H(empty) = sum_v i_p(E[Y_v])`.
pub fn conditional_divergence_profile(
    h: &WeightedHypergraph,
    p: f64,
    spec: TailSpec,
    w: &VertexSet,
) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter("p must lie in (0,1)"));
    }
    let v = h.vertex_count();
    check_exact_budget(v, CONDITIONAL_BUDGET, "conditional divergence enumeration")?;
    if w.iter().any(|x| x as usize >= v) {
        return Err(Error::InvalidParameter("vertex index out of range"));
    }
    let threshold = spec.threshold(h, p);
    let tol = tail_tol(threshold);
    let free: Vec<u32> = (0..v as u32).filter(|&x| !w.contains(x)).collect();
    let w_bit: Vec<Option<usize>> = (0..v as u32)
        .map(|x| w.iter().position(|y| y == x))
        .collect();

    let patterns = 1usize << w.len();
    let nf = free.len();
    let mut pattern_mass = alloc::vec![0.0f64; patterns];
    let mut one_mass = alloc::vec![0.0f64; patterns * nf.max(1)];

    let mut walker = SubsetWalker::new(h);
    let mut w_pattern = 0usize;
    let mut weight = math::powi(1.0 - p, v as u32);
    let mut total = 0.0;
    let tally = |walker: &SubsetWalker,
                 w_pattern: usize,
                 weight: f64,
                 pattern_mass: &mut [f64],
                 one_mass: &mut [f64],
                 total: &mut f64| {
        if walker.induced() <= threshold + tol {
            *total += weight;
            pattern_mass[w_pattern] += weight;
            for (idx, &fv) in free.iter().enumerate() {
                if walker.in_set[fv as usize] {
                    one_mass[w_pattern * nf + idx] += weight;
                }
            }
        }
    };
    tally(
        &walker,
        w_pattern,
        weight,
        &mut pattern_mass,
        &mut one_mass,
        &mut total,
    );
    for i in 1u64..(1 << v) {
        let flip = i.trailing_zeros() as usize;
        let entering = !walker.in_set[flip];
        walker.flip(flip);
        if entering {
            weight *= p / (1.0 - p);
        } else {
            weight *= (1.0 - p) / p;
        }
        if let Some(bit) = w_bit[flip] {
            w_pattern ^= 1 << bit;
        }
        tally(
            &walker,
            w_pattern,
            weight,
            &mut pattern_mass,
            &mut one_mass,
            &mut total,
        );
    }
    if total <= 0.0 {
        return Err(Error::ZeroProbabilityConditioning);
    }
    let mut hw = 0.0;
    for pat in 0..patterns {
        let pm = pattern_mass[pat];
        if pm <= 0.0 {
            continue;
        }
        for idx in 0..nf {
            let mean = one_mass[pat * nf + idx] / pm;
            hw += pm / total * ip_raw(mean, p);
        }
    }
    Ok(hw)
}
