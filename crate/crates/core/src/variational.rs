//! The mean-field variational problem.
//!
//! Minimizes the total tilting cost `sum_v i_p(q_v)` over product measures
//! `q` whose expected induced weight `f(q)` stays at or below a threshold.
//! Stationary points of the Lagrangian have the logistic fixed-point form
//!
//! ```text
//! q_v = logistic(logit(p) - theta * df/dq_v(q)),     theta >= 0,
//! ```
//!
//! so the solver runs a damped fixed-point iteration at fixed `theta` inside
//! an outer bisection that makes the constraint active (or returns
//! `theta = 0` when it is slack). The objective is convex but the feasible
//! set `{f(q) <= c}` need not be, so a multi-start is used and the contract
//! is "best KKT point found"; the grid oracle guards global optimality on
//! tiny instances.

use crate::entropy::ip_raw;
use crate::hypergraph::{ProductMeasure, VertexSet, WeightedHypergraph};
use crate::math;
use crate::rng::CounterRng;
use crate::{Error, Result};
use alloc::boxed::Box;
use alloc::vec::Vec;

/// Fixed-point damping factor.
const OMEGA: f64 = 0.5;
/// Sup-norm tolerance for fixed-point convergence.
const FIX_TOL: f64 = 1e-12;
/// Iteration cap per fixed-point solve.
const MAX_ITER: usize = 50_000;
/// Coordinates driven below this are pinned to exactly zero.
const PIN_TOL: f64 = 1e-14;
/// Number of seeded random starts besides the deterministic ones.
const RANDOM_STARTS: usize = 8;
/// Default seed for the random starts.
const START_SEED: u64 = 0x10E5_7A11;

/// The lower-tail event `e(H[R]) <= threshold`, in relative or absolute form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSpec {
    kind: TailKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum TailKind {
    /// Threshold `eta * p^r * e(H)`.
    Relative(f64),
    /// Threshold `t` directly.
    Absolute(f64),
}

impl TailSpec {
    pub fn relative(eta: f64) -> Result<Self> {
        if eta.is_nan() || eta < 0.0 {
            return Err(Error::InvalidParameter("eta must be nonnegative"));
        }
        Ok(TailSpec {
            kind: TailKind::Relative(eta),
        })
    }

    pub fn absolute(t: f64) -> Result<Self> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidParameter("threshold must be nonnegative"));
        }
        Ok(TailSpec {
            kind: TailKind::Absolute(t),
        })
    }

    /// The absolute threshold for a given hypergraph and retention p.
    pub fn threshold(&self, h: &WeightedHypergraph, p: f64) -> f64 {
        match self.kind {
            TailKind::Relative(eta) => {
                eta * math::powi(p, h.uniformity() as u32) * h.total_weight()
            }
            TailKind::Absolute(t) => t,
        }
    }

    /// The relative level `threshold / (p^r e(H))` for a given instance.
    pub fn eta(&self, h: &WeightedHypergraph, p: f64) -> f64 {
        match self.kind {
            TailKind::Relative(eta) => eta,
            TailKind::Absolute(t) => t / (math::powi(p, h.uniformity() as u32) * h.total_weight()),
        }
    }

    /// The same event with the threshold scaled by `factor` (used for the
    /// `(1 - eps) eta` feasibility level of the tilting certificate).
    pub fn scaled(&self, factor: f64) -> TailSpec {
        TailSpec {
            kind: match self.kind {
                TailKind::Relative(eta) => TailKind::Relative(eta * factor),
                TailKind::Absolute(t) => TailKind::Absolute(t * factor),
            },
        }
    }
}

/// How the solver terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Interior KKT point with the constraint active.
    Optimal,
    /// Some coordinates pinned at the `q_v = 0` boundary.
    BoundaryZero,
    /// Threshold at or above `p^r e(H)`: `q = p` is feasible and `Phi = 0`.
    InfeasibilityTrivial,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::BoundaryZero => "boundary_zero",
            SolveStatus::InfeasibilityTrivial => "infeasibility_trivial",
        }
    }
}

/// Output of [`solve_phi`].
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalSolution {
    /// The minimizing product measure found (every coordinate `<= p`).
    pub q_star: ProductMeasure,
    /// Dual multiplier of the induced-weight constraint.
    pub theta: f64,
    /// Objective value `sum_v i_p(q_v)`.
    pub phi: f64,
    /// `f(q_star)`.
    pub constraint_value: f64,
    /// Stationarity plus complementary-slackness defect at the solution.
    pub kkt_residual: f64,
    pub status: SolveStatus,
}

fn validate_p(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter("p must lie in (0,1)"));
    }
    Ok(p)
}

fn feasibility_tol(threshold: f64) -> f64 {
    1e-8 * threshold + 1e-12
}

/// Damped logistic fixed point at a fixed multiplier. Coordinates that
/// drop below `PIN_TOL` are pinned to exactly zero for the rest of the run
/// (stationarity does not apply to pinned coordinates).
fn fixed_point(
    h: &WeightedHypergraph,
    p: f64,
    theta: f64,
    start: &[f64],
    q: &mut Vec<f64>,
    grad: &mut Vec<f64>,
) -> bool {
    let logit_p = math::logit(p);
    q.clear();
    q.extend_from_slice(start);
    let n = q.len();
    let mut pinned = alloc::vec![false; n];
    for (qi, pin) in q.iter_mut().zip(pinned.iter_mut()) {
        if *qi < PIN_TOL {
            *qi = 0.0;
            *pin = true;
        }
    }
    grad.resize(n, 0.0);
    for _ in 0..MAX_ITER {
        h.gradient_raw(q, grad);
        let mut delta: f64 = 0.0;
        for v in 0..n {
            if pinned[v] {
                continue;
            }
            let target = math::logistic(logit_p - theta * grad[v]);
            let next = (1.0 - OMEGA) * q[v] + OMEGA * target;
            delta = delta.max(math::abs(next - q[v]));
            if next < PIN_TOL {
                q[v] = 0.0;
                pinned[v] = true;
            } else {
                q[v] = next;
            }
        }
        if delta < FIX_TOL {
            return true;
        }
    }
    false
}

struct Candidate {
    q: Vec<f64>,
    theta: f64,
    phi: f64,
    constraint: f64,
    converged: bool,
}

/// Runs the outer bisection on theta for one start vector; returns the
/// feasible candidate when one is found.
fn solve_from_start(
    h: &WeightedHypergraph,
    p: f64,
    threshold: f64,
    start: &[f64],
) -> Option<Candidate> {
    let mut q = Vec::new();
    let mut grad = Vec::new();
    let phi_of = |q: &[f64]| q.iter().map(|&x| ip_raw(x, p)).sum::<f64>();

    // theta = 0: unconstrained stationary point
    let conv0 = fixed_point(h, p, 0.0, start, &mut q, &mut grad);
    let f0 = h.expected_induced_weight_raw(&q);
    if f0 <= threshold {
        return Some(Candidate {
            phi: phi_of(&q),
            constraint: f0,
            q,
            theta: 0.0,
            converged: conv0,
        });
    }

    // grow theta until feasible
    let mut theta_lo = 0.0f64;
    let mut theta_hi = 1.0f64;
    let mut hi_state: Option<(Vec<f64>, f64, bool)> = None;
    for _ in 0..80 {
        let conv = fixed_point(h, p, theta_hi, start, &mut q, &mut grad);
        let f = h.expected_induced_weight_raw(&q);
        if f <= threshold {
            hi_state = Some((q.clone(), f, conv));
            break;
        }
        theta_lo = theta_hi;
        theta_hi *= 2.0;
    }
    let (mut best_q, mut best_f, mut best_conv) = hi_state?;

    // bisect to make the constraint active
    for _ in 0..200 {
        if theta_hi - theta_lo <= 1e-13 * theta_hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (theta_lo + theta_hi);
        let conv = fixed_point(h, p, mid, start, &mut q, &mut grad);
        let f = h.expected_induced_weight_raw(&q);
        if f <= threshold {
            theta_hi = mid;
            best_q.clone_from(&q);
            best_f = f;
            best_conv = conv;
            if math::abs(f - threshold) <= 1e-14 * threshold.max(1.0) {
                break;
            }
        } else {
            theta_lo = mid;
        }
    }
    Some(Candidate {
        phi: phi_of(&best_q),
        constraint: best_f,
        q: best_q,
        theta: theta_hi,
        converged: best_conv,
    })
}

/// Solves `Phi_p^H` for the given tail event.
///
/// Multi-start: `q = p`, the symmetric ansatz `q = p eta^(1/r)`, eight
/// seeded random starts in `[0,p]^V`, and (on instances small enough for
/// the exact independence-number search) the boundary profile that zeroes
/// a minimum vertex cover, which is the exact optimum as the threshold
/// approaches zero. The best feasible candidate wins; ties go to the
/// earliest start.
pub fn solve_phi(h: &WeightedHypergraph, p: f64, spec: TailSpec) -> Result<VariationalSolution> {
    solve_phi_seeded(h, p, spec, START_SEED)
}

pub fn solve_phi_seeded(
    h: &WeightedHypergraph,
    p: f64,
    spec: TailSpec,
    seed: u64,
) -> Result<VariationalSolution> {
    let p = validate_p(p)?;
    if h.is_edgeless() {
        return Err(Error::InvalidParameter("hypergraph has no edges"));
    }
    let n = h.vertex_count();
    let threshold = spec.threshold(h, p);
    let scale = math::powi(p, h.uniformity() as u32) * h.total_weight();

    // Trivial case: q = p is already feasible.
    if scale <= threshold + feasibility_tol(threshold) {
        let q = alloc::vec![p; n];
        let constraint = h.expected_induced_weight_raw(&q);
        return Ok(VariationalSolution {
            q_star: ProductMeasure::new(q)?,
            theta: 0.0,
            phi: 0.0,
            constraint_value: constraint,
            kkt_residual: 0.0,
            status: SolveStatus::InfeasibilityTrivial,
        });
    }

    let mut starts: Vec<Vec<f64>> = Vec::new();
    starts.push(alloc::vec![p; n]);
    let eta = (threshold / scale).clamp(0.0, 1.0);
    let symmetric = p * math::powf(eta, 1.0 / h.uniformity() as f64);
    starts.push(alloc::vec![symmetric.max(0.0); n]);
    let mut rng = CounterRng::new(seed);
    for _ in 0..RANDOM_STARTS {
        starts.push((0..n).map(|_| p * rng.next_f64()).collect());
    }
    // Boundary profile: p on a maximum independent set, 0 on its
    // complement. Feasible for every threshold and exactly optimal at 0.
    if n <= 40 {
        if let Ok(alpha_set) = maximum_independent_profile(h, p) {
            starts.push(alpha_set);
        }
    }

    let mut best: Option<Candidate> = None;
    for start in &starts {
        if let Some(cand) = solve_from_start(h, p, threshold, start) {
            let better = match &best {
                None => true,
                Some(b) => cand.phi < b.phi - 0.0,
            };
            if better {
                best = Some(cand);
            }
        }
    }

    let Some(cand) = best else {
        return Err(Error::NonConvergence(Box::new(VariationalSolution {
            q_star: ProductMeasure::new(alloc::vec![p; n])?,
            theta: 0.0,
            phi: f64::INFINITY,
            constraint_value: scale,
            kkt_residual: f64::INFINITY,
            status: SolveStatus::Optimal,
        })));
    };

    let status = if cand.q.contains(&0.0) {
        SolveStatus::BoundaryZero
    } else {
        SolveStatus::Optimal
    };
    let solution = VariationalSolution {
        kkt_residual: kkt_residual_raw(h, p, threshold, &cand.q, cand.theta),
        q_star: ProductMeasure::new(cand.q)?,
        theta: cand.theta,
        phi: cand.phi,
        constraint_value: cand.constraint,
        status,
    };
    if !cand.converged {
        return Err(Error::NonConvergence(Box::new(solution)));
    }
    Ok(solution)
}

/// The boundary start used by the multi-start: `p` on a maximum independent
/// set, zero elsewhere. Feasible for every threshold (it induces no edge)
/// and exactly optimal as the threshold approaches zero.
fn maximum_independent_profile(h: &WeightedHypergraph, p: f64) -> Result<Vec<f64>> {
    let set: VertexSet = h.maximum_independent_set()?;
    Ok((0..h.vertex_count() as u32)
        .map(|v| if set.contains(v) { p } else { 0.0 })
        .collect())
}

fn kkt_residual_raw(h: &WeightedHypergraph, p: f64, threshold: f64, q: &[f64], theta: f64) -> f64 {
    let logit_p = math::logit(p);
    let mut grad = alloc::vec![0.0; q.len()];
    h.gradient_raw(q, &mut grad);
    let mut stationarity: f64 = 0.0;
    for v in 0..q.len() {
        if q[v] == 0.0 {
            continue; // pinned boundary coordinate
        }
        let target = math::logistic(logit_p - theta * grad[v]);
        stationarity = stationarity.max(math::abs(q[v] - target));
    }
    let f = h.expected_induced_weight_raw(q);
    stationarity + math::abs(theta * (f - threshold))
}

/// Stationarity and complementary-slackness defect of a solution object.
pub fn kkt_residual(
    h: &WeightedHypergraph,
    p: f64,
    spec: TailSpec,
    solution: &VariationalSolution,
) -> Result<f64> {
    let p = validate_p(p)?;
    if solution.q_star.len() != h.vertex_count() {
        return Err(Error::InvalidParameter(
            "solution size differs from vertex count",
        ));
    }
    Ok(kkt_residual_raw(
        h,
        p,
        spec.threshold(h, p),
        solution.q_star.values(),
        solution.theta,
    ))
}

/// Symmetric-ansatz upper bound: bisects the constant measure `q 1` onto
/// the constraint boundary and reports `(q, v(H) * i_p(q))`.
pub fn solve_phi_symmetric(h: &WeightedHypergraph, p: f64, spec: TailSpec) -> Result<(f64, f64)> {
    let p = validate_p(p)?;
    if h.is_edgeless() {
        return Err(Error::InvalidParameter("hypergraph has no edges"));
    }
    let threshold = spec.threshold(h, p);
    let n = h.vertex_count() as f64;
    let f_const = |q: f64| {
        let v = alloc::vec![q; h.vertex_count()];
        h.expected_induced_weight_raw(&v)
    };
    if f_const(p) <= threshold + feasibility_tol(threshold) {
        return Ok((p, 0.0));
    }
    // f is monotone in q; keep lo feasible, hi infeasible
    let mut lo = 0.0f64;
    let mut hi = p;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f_const(mid) <= threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, n * ip_raw(lo, p)))
}

/// Brute-force grid oracle for tiny instances: minimizes the objective over
/// the feasible points of a uniform grid on `[0, p]^V` (grid step at least
/// 0.005, at most 4 vertices). Upper-bounds the true minimum within the
/// grid resolution; independent of the fixed-point solver.
pub fn phi_grid_oracle(
    h: &WeightedHypergraph,
    p: f64,
    spec: TailSpec,
    grid_step: f64,
) -> Result<f64> {
    let p = validate_p(p)?;
    if h.vertex_count() > 4 {
        return Err(Error::BudgetExceeded {
            what: "grid oracle vertices",
            limit: 4,
            requested: h.vertex_count() as u64,
        });
    }
    if grid_step.is_nan() || grid_step < 0.005 {
        return Err(Error::InvalidParameter(
            "grid step below budget (min 0.005)",
        ));
    }
    let threshold = spec.threshold(h, p);
    let ftol = 1e-12 * threshold.max(1.0);
    let mut levels: Vec<f64> = Vec::new();
    let mut x = 0.0;
    while x < p {
        levels.push(x);
        x += grid_step;
    }
    levels.push(p);
    let costs: Vec<f64> = levels.iter().map(|&q| ip_raw(q, p)).collect();

    struct GridSearch<'a> {
        h: &'a WeightedHypergraph,
        levels: &'a [f64],
        costs: &'a [f64],
        threshold: f64,
        ftol: f64,
        best: f64,
    }

    impl GridSearch<'_> {
        // depth-first over the grid with a partial-objective prune
        fn run(&mut self, q: &mut [f64], depth: usize, partial: f64) {
            if partial >= self.best {
                return;
            }
            if depth == q.len() {
                if self.h.expected_induced_weight_raw(q) <= self.threshold + self.ftol {
                    self.best = partial;
                }
                return;
            }
            for (i, &lv) in self.levels.iter().enumerate() {
                q[depth] = lv;
                self.run(q, depth + 1, partial + self.costs[i]);
            }
            q[depth] = 0.0;
        }
    }

    let mut q = alloc::vec![0.0; h.vertex_count()];
    let mut search = GridSearch {
        h,
        levels: &levels,
        costs: &costs,
        threshold,
        ftol,
        best: f64::INFINITY,
    };
    search.run(&mut q, 0, 0.0);
    if search.best.is_infinite() {
        return Err(Error::InvalidParameter("no feasible grid point"));
    }
    Ok(search.best)
}

/// `Phi_p^H(0) = (v(H) - alpha(H)) log(1/(1-p))` via the exact
/// independence number.
pub fn phi_zero(h: &WeightedHypergraph, p: f64) -> Result<f64> {
    let p = validate_p(p)?;
    let alpha = h.independence_number()?;
    Ok((h.vertex_count() - alpha) as f64 * math::ln(1.0 / (1.0 - p)))
}

/// Lower certificate at level `eta = 1 - eps`:
/// `Phi_p^H(1-eps) >= eps^2/(2K^2) v(H) p` with the tightest admissible
/// `K = v(H) Delta_1(H) / e(H)`.
pub fn phi_lower_certificate(h: &WeightedHypergraph, p: f64, epsilon: f64) -> Result<f64> {
    let p = validate_p(p)?;
    if h.is_edgeless() {
        return Err(Error::InvalidParameter("hypergraph has no edges"));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter("epsilon must lie in (0,1]"));
    }
    let k = h.vertex_count() as f64 * h.max_degree(1) / h.total_weight();
    Ok(epsilon * epsilon / (2.0 * k * k) * h.vertex_count() as f64 * p)
}
