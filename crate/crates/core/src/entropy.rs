//! Information-theoretic primitives.
//!
//! Relative entropies, divergences, and the inequality bounds used by the
//! rest of the crate, each exposed as an evaluatable quantity or gap:
//!
//! - `i_p(q) = q log(q/p) + (1-q) log((1-q)/(1-p))`, the Bernoulli
//!   relative entropy, with its first two derivatives;
//! - KL divergence, Shannon entropy, conditional entropy, total variation;
//! - the Pinsker gap `d_TV((X,Z), X x Z)^2 <= 2 (H(X) - H(X|Z))`;
//! - the log-sum inequality gap;
//! - the conditional p-divergence `I_p(X|Z) = E[i_p(Pr(X=1|Z))]` and the
//!   event-family strengthening of Pinsker for rare events;
//! - the entropy-based binomial tail bound
//!   `Pr(Bin(n,p) <= nq) <= exp(-n i_p(q))`.
//!
//! All logarithms are natural. `0 log 0 = 0` is enforced by explicit
//! branching, never left to floating-point accident.

use crate::math;
use crate::{Error, Result};
use alloc::vec::Vec;

/// Sum tolerance for probability-vector invariants.
const MASS_TOL: f64 = 1e-12;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliParam(f64);

impl BernoulliParam {
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidParameter("Bernoulli parameter outside [0,1]"));
        }
        Ok(BernoulliParam(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    fn require_interior(self, what: &'static str) -> Result<f64> {
        if self.0 <= 0.0 || self.0 >= 1.0 {
            return Err(Error::InvalidParameter(what));
        }
        Ok(self.0)
    }
}

/// A distribution on a finite set, stored as a mass vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    mass: Vec<f64>,
}

impl FiniteDistribution {
    /// Validates nonnegativity and total mass `1` (within `1e-12`).
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution("empty support"));
        }
        let mut total = 0.0;
        for &m in &mass {
            if m.is_nan() || m < 0.0 {
                return Err(Error::InvalidDistribution("negative or NaN mass"));
            }
            total += m;
        }
        if math::abs(total - 1.0) > MASS_TOL {
            return Err(Error::InvalidDistribution("masses do not sum to 1"));
        }
        Ok(FiniteDistribution { mass })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("empty support"));
        }
        let w = 1.0 / n as f64;
        Ok(FiniteDistribution {
            mass: alloc::vec![w; n],
        })
    }

    pub fn bernoulli(p: BernoulliParam) -> Self {
        FiniteDistribution {
            mass: alloc::vec![1.0 - p.value(), p.value()],
        }
    }

    pub fn support_size(&self) -> usize {
        self.mass.len()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// This distribution conditioned on the event `{x : keep(x)}`.
    ///
    /// The divergence of the result from `self` equals `-log Pr(event)`,
    /// which is what the conditioning identity tests exercise.
    pub fn conditioned_on(&self, keep: impl Fn(usize) -> bool) -> Result<FiniteDistribution> {
        let total: f64 = self
            .mass
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, &m)| m)
            .sum();
        if total <= 0.0 {
            return Err(Error::ZeroProbabilityConditioning);
        }
        let mass = self
            .mass
            .iter()
            .enumerate()
            .map(|(i, &m)| if keep(i) { m / total } else { 0.0 })
            .collect();
        Ok(FiniteDistribution { mass })
    }

    /// Probability of the event `{x : keep(x)}`.
    pub fn event_probability(&self, keep: impl Fn(usize) -> bool) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, &m)| m)
            .sum()
    }
}

/// Joint law of a binary variable `X` and a finite variable `Z`.
///
/// `mass[z] = [Pr(X=0, Z=z), Pr(X=1, Z=z)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointBinaryDistribution {
    mass: Vec<[f64; 2]>,
}

impl JointBinaryDistribution {
    pub fn new(mass: Vec<[f64; 2]>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution("empty conditioning alphabet"));
        }
        let mut total = 0.0;
        for cell in &mass {
            for &m in cell {
                if m.is_nan() || m < 0.0 {
                    return Err(Error::InvalidDistribution("negative or NaN mass"));
                }
                total += m;
            }
        }
        if math::abs(total - 1.0) > MASS_TOL {
            return Err(Error::InvalidDistribution("masses do not sum to 1"));
        }
        Ok(JointBinaryDistribution { mass })
    }

    /// Product of independent marginals with the given laws.
    pub fn independent(x_one: f64, z_mass: &[f64]) -> Result<Self> {
        if !(0.0..=1.0).contains(&x_one) {
            return Err(Error::InvalidParameter("Pr(X=1) outside [0,1]"));
        }
        JointBinaryDistribution::new(
            z_mass
                .iter()
                .map(|&pz| [pz * (1.0 - x_one), pz * x_one])
                .collect(),
        )
    }

    pub fn alphabet_size(&self) -> usize {
        self.mass.len()
    }

    /// Pr(Z = z).
    pub fn z_mass(&self, z: usize) -> f64 {
        self.mass[z][0] + self.mass[z][1]
    }

    /// Pr(X = 1).
    pub fn x_mean(&self) -> f64 {
        self.mass.iter().map(|c| c[1]).sum()
    }

    /// Pr(X = 1 | Z = z); `None` when Pr(Z = z) = 0.
    pub fn conditional_mean(&self, z: usize) -> Option<f64> {
        let pz = self.z_mass(z);
        if pz > 0.0 {
            Some(self.mass[z][1] / pz)
        } else {
            None
        }
    }
}

/// `x log x` with the `0 log 0 = 0` convention.
#[inline]
fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * math::ln(x)
    } else {
        0.0
    }
}

/// `x log (x/y)` with the `0 log 0 = 0` convention (requires `y > 0` when `x > 0`).
#[inline]
fn xlogxy(x: f64, y: f64) -> f64 {
    if x > 0.0 {
        x * math::ln(x / y)
    } else {
        0.0
    }
}

/// Binary entropy `h(q)` in nats.
#[inline]
fn binary_entropy(q: f64) -> f64 {
    -xlogx(q) - xlogx(1.0 - q)
}

/// Unvalidated Bernoulli relative entropy kernel; assumes `0 < p < 1`,
/// `0 <= q <= 1`. Hot path for the variational solver.
#[inline]
pub(crate) fn ip_raw(q: f64, p: f64) -> f64 {
    xlogxy(q, p) + xlogxy(1.0 - q, 1.0 - p)
}

/// `i_p(q) = D_KL(Ber(q) || Ber(p))`.
///
/// Zero exactly when `q = p`; rejects `p` in `{0, 1}` where the divergence
/// is degenerate or infinite.
pub fn relative_entropy_bernoulli(q: BernoulliParam, p: BernoulliParam) -> Result<f64> {
    let p = p.require_interior("reference parameter p must lie in (0,1)")?;
    Ok(ip_raw(q.value(), p))
}

/// `(i_p'(q), i_p''(q))` for interior `q` and `p`.
pub fn relative_entropy_bernoulli_derivatives(
    q: BernoulliParam,
    p: BernoulliParam,
) -> Result<(f64, f64)> {
    let p = p.require_interior("reference parameter p must lie in (0,1)")?;
    let q = q.require_interior("derivative undefined at q in {0,1}")?;
    let first = math::ln(q / p) - math::ln((1.0 - q) / (1.0 - p));
    let second = 1.0 / q + 1.0 / (1.0 - q);
    Ok((first, second))
}

pub(crate) fn ip_derivative_raw(q: f64, p: f64) -> f64 {
    math::ln(q / p) - math::ln((1.0 - q) / (1.0 - p))
}

/// `D_KL(P || Q)` on a shared finite support.
pub fn kl_divergence(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    if p.support_size() != q.support_size() {
        return Err(Error::SupportMismatch {
            left: p.support_size(),
            right: q.support_size(),
        });
    }
    let mut total = 0.0;
    for (i, (&pm, &qm)) in p.mass.iter().zip(q.mass.iter()).enumerate() {
        if pm > 0.0 {
            if qm <= 0.0 {
                return Err(Error::AbsoluteContinuity { index: i });
            }
            total += pm * math::ln(pm / qm);
        }
    }
    Ok(total.max(0.0))
}

/// Shannon entropy `H(P)` in nats; lies in `[0, log |support|]`.
pub fn shannon_entropy(p: &FiniteDistribution) -> f64 {
    -p.mass.iter().map(|&m| xlogx(m)).sum::<f64>()
}

/// `H(X | Z)` for a binary `X`; zero-mass `z` contribute zero.
pub fn conditional_entropy(joint: &JointBinaryDistribution) -> f64 {
    (0..joint.alphabet_size())
        .filter_map(|z| {
            let pz = joint.z_mass(z);
            joint.conditional_mean(z).map(|m| pz * binary_entropy(m))
        })
        .sum()
}

/// Total variation distance `1/2 sum |p - q|`.
pub fn total_variation(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    if p.support_size() != q.support_size() {
        return Err(Error::SupportMismatch {
            left: p.support_size(),
            right: q.support_size(),
        });
    }
    Ok(0.5
        * p.mass
            .iter()
            .zip(q.mass.iter())
            .map(|(&a, &b)| math::abs(a - b))
            .sum::<f64>())
}

/// Pinsker's inequality as a gap: returns
/// `(d_TV((X,Z), X x Z)^2, 2 (H(X) - H(X|Z)))`; the first is at most the second.
pub fn pinsker_gap(joint: &JointBinaryDistribution) -> (f64, f64) {
    let mu = joint.x_mean();
    let mut tv = 0.0;
    for z in 0..joint.alphabet_size() {
        let pz = joint.z_mass(z);
        tv += math::abs(joint.mass[z][0] - pz * (1.0 - mu));
        tv += math::abs(joint.mass[z][1] - pz * mu);
    }
    tv *= 0.5;
    let rhs = 2.0 * (binary_entropy(mu) - conditional_entropy(joint));
    (tv * tv, rhs)
}

/// Log-sum inequality gap `sum a_i log(a_i/b_i) - a log(a/b) >= 0`.
///
/// Zero exactly when `a` is proportional to `b` on the joint support.
pub fn log_sum_gap(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SupportMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    let mut lhs = 0.0;
    for (i, (&ai, &bi)) in a.iter().zip(b.iter()).enumerate() {
        if ai.is_nan() || bi.is_nan() || ai < 0.0 || bi < 0.0 {
            return Err(Error::InvalidParameter("log-sum terms must be nonnegative"));
        }
        if ai > 0.0 && bi <= 0.0 {
            return Err(Error::AbsoluteContinuity { index: i });
        }
        sum_a += ai;
        sum_b += bi;
        lhs += xlogxy(ai, bi);
    }
    let rhs = if sum_a > 0.0 {
        if sum_b <= 0.0 {
            return Err(Error::InvalidParameter(
                "total of b vanishes while a does not",
            ));
        }
        sum_a * math::ln(sum_a / sum_b)
    } else {
        0.0
    };
    Ok(lhs - rhs)
}

/// Conditional p-divergence `I_p(X | Z) = E_Z[i_p(Pr(X=1 | Z))]`.
///
/// Always at least `i_p(Pr(X=1))`, with equality iff `X` and `Z` are
/// independent.
pub fn conditional_p_divergence(joint: &JointBinaryDistribution, p: BernoulliParam) -> Result<f64> {
    let p = p.require_interior("reference parameter p must lie in (0,1)")?;
    Ok((0..joint.alphabet_size())
        .filter_map(|z| {
            let pz = joint.z_mass(z);
            joint.conditional_mean(z).map(|m| pz * ip_raw(m, p))
        })
        .sum())
}

/// The rare-event strengthening of Pinsker for an event family.
///
/// For `Z`-measurable events `E_1, ..., E_m` (subsets of the `Z` alphabet)
/// and `Pr(X=1 | Z) <= p'` pointwise, returns `(lhs, rhs)` with
///
/// ```text
/// lhs = I_p(X|Z) - I_p(X)
/// rhs = 1/(2p') sum_i (Pr(X=1|E_i) - mu)^2 Pr(E_i)
///       - p'/2 sum_{i<j} Pr(E_i inter E_j)
/// ```
///
/// and `lhs >= rhs`. Events may overlap arbitrarily.
pub fn event_family_gap(
    joint: &JointBinaryDistribution,
    events: &[Vec<usize>],
    p: BernoulliParam,
    p_prime: f64,
) -> Result<(f64, f64)> {
    let pv = p.require_interior("reference parameter p must lie in (0,1)")?;
    if !(p_prime > 0.0 && p_prime.is_finite()) {
        return Err(Error::InvalidParameter("p' must be positive"));
    }
    let n = joint.alphabet_size();
    for z in 0..n {
        if let Some(m) = joint.conditional_mean(z) {
            if m > p_prime + 1e-12 {
                return Err(Error::InvalidParameter(
                    "conditional mean exceeds p' (gap precondition)",
                ));
            }
        }
    }
    let mut membership: Vec<Vec<bool>> = Vec::with_capacity(events.len());
    for ev in events {
        let mut row = alloc::vec![false; n];
        for &z in ev {
            if z >= n {
                return Err(Error::InvalidParameter(
                    "event refers to symbol outside alphabet",
                ));
            }
            row[z] = true;
        }
        membership.push(row);
    }

    let mu = joint.x_mean();
    let lhs = conditional_p_divergence(joint, p)? - ip_raw(mu, pv);

    let mut first = 0.0;
    for row in &membership {
        let mut pe = 0.0;
        let mut me = 0.0;
        for (z, &member) in row.iter().enumerate() {
            if member {
                pe += joint.z_mass(z);
                me += joint.mass[z][1];
            }
        }
        if pe > 0.0 {
            let diff = me / pe - mu;
            first += diff * diff * pe;
        }
    }
    let mut pairs = 0.0;
    for (i, row_i) in membership.iter().enumerate() {
        for row_j in membership.iter().skip(i + 1) {
            for z in 0..n {
                if row_i[z] && row_j[z] {
                    pairs += joint.z_mass(z);
                }
            }
        }
    }
    let rhs = first / (2.0 * p_prime) - p_prime / 2.0 * pairs;
    Ok((lhs, rhs))
}

/// Entropy tail bound for the binomial distribution.
///
/// Returns `(bound, exact)` with `bound = exp(-n i_p(q))` and
/// `exact = Pr(Bin(n,p) <= nq)`; the exact tail never exceeds the bound.
/// Requires `q <= p` (the bound direction is one-sided).
pub fn binomial_tail_bound(n: u32, p: BernoulliParam, q: BernoulliParam) -> Result<(f64, f64)> {
    let pv = p.require_interior("reference parameter p must lie in (0,1)")?;
    let qv = q.value();
    if qv > pv {
        return Err(Error::InvalidParameter("bound requires q <= p"));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive"));
    }
    let bound = math::exp(-(n as f64) * ip_raw(qv, pv));
    let cutoff = math::floor(n as f64 * qv + 1e-9) as u64;
    let ln_p = math::ln(pv);
    let ln_1p = math::ln(1.0 - pv);
    let mut acc = math::LogSumExp::new();
    for k in 0..=cutoff.min(n as u64) {
        let term =
            math::ln(math::binomial(n as u64, k)) + k as f64 * ln_p + (n as u64 - k) as f64 * ln_1p;
        acc.add(term);
    }
    let exact = math::exp(acc.value());
    Ok((bound, exact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn bp(x: f64) -> BernoulliParam {
        BernoulliParam::new(x).unwrap()
    }

    fn random_joint(rng: &mut CounterRng, alphabet: usize) -> JointBinaryDistribution {
        let mut mass = alloc::vec![[0.0; 2]; alphabet];
        let mut total = 0.0;
        for cell in mass.iter_mut() {
            for m in cell.iter_mut() {
                *m = rng.next_f64();
                total += *m;
            }
        }
        for cell in mass.iter_mut() {
            for m in cell.iter_mut() {
                *m /= total;
            }
        }
        JointBinaryDistribution::new(mass).unwrap()
    }

    #[test]
    fn bernoulli_relative_entropy_matches_frozen_values() {
        assert_eq!(relative_entropy_bernoulli(bp(0.5), bp(0.5)).unwrap(), 0.0);
        let at_zero = relative_entropy_bernoulli(bp(0.0), bp(0.5)).unwrap();
        assert!((at_zero - core::f64::consts::LN_2).abs() < 1e-15);
        let quarter = relative_entropy_bernoulli(bp(0.25), bp(0.5)).unwrap();
        assert!((quarter - 0.13081203594113697).abs() < 1e-15);
    }

    #[test]
    fn bernoulli_relative_entropy_rejects_degenerate_reference() {
        assert!(relative_entropy_bernoulli(bp(0.3), bp(0.0)).is_err());
        assert!(relative_entropy_bernoulli(bp(0.3), bp(1.0)).is_err());
    }

    #[test]
    fn derivatives_match_frozen_values() {
        let (d1, d2) = relative_entropy_bernoulli_derivatives(bp(0.3), bp(0.3)).unwrap();
        assert!(d1.abs() < 1e-15);
        assert!((d2 - 4.761904761904762).abs() < 1e-12);
        let (d1, _) = relative_entropy_bernoulli_derivatives(bp(0.25), bp(0.5)).unwrap();
        assert!((d1 - (-1.0986122886681096)).abs() < 1e-12);
        let (_, d2) = relative_entropy_bernoulli_derivatives(bp(0.5), bp(0.7)).unwrap();
        assert_eq!(d2, 4.0);
        assert!(relative_entropy_bernoulli_derivatives(bp(0.0), bp(0.5)).is_err());
    }

    #[test]
    fn derivative_matches_central_finite_difference() {
        let h = 1e-6;
        for qi in 1..=9 {
            for pi in 1..=9 {
                let q = qi as f64 / 10.0;
                let p = pi as f64 / 10.0;
                let (d1, _) = relative_entropy_bernoulli_derivatives(bp(q), bp(p)).unwrap();
                let up = relative_entropy_bernoulli(bp(q + h), bp(p)).unwrap();
                let dn = relative_entropy_bernoulli(bp(q - h), bp(p)).unwrap();
                assert!(
                    (d1 - (up - dn) / (2.0 * h)).abs() < 1e-6,
                    "finite difference mismatch at q={q} p={p}"
                );
            }
        }
    }

    #[test]
    fn distribution_invariants_enforced() {
        assert!(FiniteDistribution::new(alloc::vec![]).is_err());
        assert!(FiniteDistribution::new(alloc::vec![0.5, -0.1, 0.6]).is_err());
        assert!(FiniteDistribution::new(alloc::vec![0.5, 0.4]).is_err());
        assert!(FiniteDistribution::new(alloc::vec![0.5, 0.5 + 1e-13]).is_ok());
        assert!(JointBinaryDistribution::new(alloc::vec![[0.5, 0.6]]).is_err());
        assert!(BernoulliParam::new(1.1).is_err());
        assert!(BernoulliParam::new(f64::NAN).is_err());
    }

    #[test]
    fn kl_divergence_basic_cases() {
        let u = FiniteDistribution::uniform(4).unwrap();
        assert_eq!(kl_divergence(&u, &u).unwrap(), 0.0);

        // Bernoulli-shaped distributions agree with the scalar form.
        let p = FiniteDistribution::bernoulli(bp(0.25));
        let q = FiniteDistribution::bernoulli(bp(0.5));
        let kl = kl_divergence(&p, &q).unwrap();
        let scalar = relative_entropy_bernoulli(bp(0.25), bp(0.5)).unwrap();
        assert!((kl - scalar).abs() < 1e-15);

        // Point mass against uniform on n points: log n.
        let mut mass = alloc::vec![0.0; 8];
        mass[3] = 1.0;
        let point = FiniteDistribution::new(mass).unwrap();
        let u8s = FiniteDistribution::uniform(8).unwrap();
        assert!((kl_divergence(&point, &u8s).unwrap() - math::ln(8.0)).abs() < 1e-15);
    }

    #[test]
    fn kl_divergence_reports_absolute_continuity() {
        let p = FiniteDistribution::new(alloc::vec![0.5, 0.5, 0.0]).unwrap();
        let q = FiniteDistribution::new(alloc::vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            kl_divergence(&p, &q),
            Err(Error::AbsoluteContinuity { index: 1 })
        ));
    }

    #[test]
    fn conditioning_identity_prop() {
        // D_KL(Q^A || Q) = -log Pr(Q in A)
        let mut rng = CounterRng::new(0xA11CE);
        for _ in 0..50 {
            let n = 2 + rng.next_below(30);
            let mut mass: Vec<f64> = (0..n).map(|_| rng.next_f64() + 1e-3).collect();
            let tot: f64 = mass.iter().sum();
            mass.iter_mut().for_each(|m| *m /= tot);
            let q = FiniteDistribution::new(mass).unwrap();
            let cut = 1 + rng.next_below(n - 1);
            let cond = q.conditioned_on(|i| i < cut).unwrap();
            let pr = q.event_probability(|i| i < cut);
            let kl = kl_divergence(&cond, &q).unwrap();
            assert!((kl - (-math::ln(pr))).abs() <= 1e-10 * (1.0 + kl.abs()));
        }
    }

    #[test]
    fn shannon_entropy_cases() {
        let mut mass = alloc::vec![0.0; 5];
        mass[2] = 1.0;
        let point = FiniteDistribution::new(mass).unwrap();
        assert_eq!(shannon_entropy(&point), 0.0);
        let two = FiniteDistribution::uniform(2).unwrap();
        assert!((shannon_entropy(&two) - core::f64::consts::LN_2).abs() < 1e-15);
        let ber = FiniteDistribution::bernoulli(bp(0.25));
        assert!((shannon_entropy(&ber) - 0.5623351446188083).abs() < 1e-15);
    }

    #[test]
    fn conditional_entropy_cases() {
        // independent: H(X|Z) = H(X)
        let joint = JointBinaryDistribution::independent(0.3, &[0.2, 0.5, 0.3]).unwrap();
        let hx = shannon_entropy(&FiniteDistribution::bernoulli(bp(0.3)));
        assert!((conditional_entropy(&joint) - hx).abs() < 1e-14);

        // X a deterministic function of Z: zero
        let det = JointBinaryDistribution::new(alloc::vec![[0.4, 0.0], [0.0, 0.6]]).unwrap();
        assert_eq!(conditional_entropy(&det), 0.0);

        // definitional brute force on a random 2x3 joint
        let mut rng = CounterRng::new(7);
        let joint = random_joint(&mut rng, 3);
        let mut direct = 0.0;
        for z in 0..3 {
            let pz = joint.z_mass(z);
            if pz > 0.0 {
                for x in 0..2 {
                    let pxz = joint.mass[z][x];
                    if pxz > 0.0 {
                        direct -= pxz * math::ln(pxz / pz);
                    }
                }
            }
        }
        assert!((conditional_entropy(&joint) - direct).abs() < 1e-13);
    }

    #[test]
    fn total_variation_cases() {
        let a = FiniteDistribution::bernoulli(bp(0.2));
        let b = FiniteDistribution::bernoulli(bp(0.5));
        assert!((total_variation(&a, &b).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(total_variation(&a, &a).unwrap(), 0.0);
        let p0 = FiniteDistribution::new(alloc::vec![1.0, 0.0]).unwrap();
        let p1 = FiniteDistribution::new(alloc::vec![0.0, 1.0]).unwrap();
        assert_eq!(total_variation(&p0, &p1).unwrap(), 1.0);
    }

    #[test]
    fn pinsker_gap_cases() {
        let ind = JointBinaryDistribution::independent(0.5, &[0.5, 0.5]).unwrap();
        let (lhs, rhs) = pinsker_gap(&ind);
        assert!(lhs.abs() < 1e-15 && rhs.abs() < 1e-12);

        // perfectly correlated fair bits
        let corr = JointBinaryDistribution::new(alloc::vec![[0.5, 0.0], [0.0, 0.5]]).unwrap();
        let (lhs, rhs) = pinsker_gap(&corr);
        assert!((lhs - 0.25).abs() < 1e-15);
        assert!((rhs - 1.3862943611198906).abs() < 1e-14);

        let mut rng = CounterRng::new(0xD1CE);
        for _ in 0..100 {
            let alphabet = 2 + rng.next_below(6);
            let joint = random_joint(&mut rng, alphabet);
            let (lhs, rhs) = pinsker_gap(&joint);
            assert!(lhs <= rhs + 1e-12, "Pinsker violated: {lhs} > {rhs}");
        }
    }

    #[test]
    fn log_sum_gap_cases() {
        let a = [0.3, 1.2, 0.5];
        assert!(log_sum_gap(&a, &a).unwrap().abs() < 1e-15);
        let g = log_sum_gap(&[2.0, 2.0], &[1.0, 3.0]).unwrap();
        assert!((g - 0.5753641449035617).abs() < 1e-14);
        let b = [0.6, 2.4, 1.0]; // proportional
        assert!(log_sum_gap(&a, &b).unwrap().abs() < 1e-12);
        assert!(log_sum_gap(&[1.0, 0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn conditional_p_divergence_cases() {
        let ind = JointBinaryDistribution::independent(0.3, &[0.4, 0.6]).unwrap();
        let d = conditional_p_divergence(&ind, bp(0.5)).unwrap();
        assert!((d - ip_raw(0.3, 0.5)).abs() < 1e-14);

        // X = Z fair bits at p = 1/2: both conditionals degenerate, value log 2
        let corr = JointBinaryDistribution::new(alloc::vec![[0.5, 0.0], [0.0, 0.5]]).unwrap();
        let d = conditional_p_divergence(&corr, bp(0.5)).unwrap();
        assert!((d - core::f64::consts::LN_2).abs() < 1e-14);

        let mut rng = CounterRng::new(0xBEEF);
        for _ in 0..100 {
            let alphabet = 2 + rng.next_below(5);
            let joint = random_joint(&mut rng, alphabet);
            let p = bp(0.1 + 0.8 * rng.next_f64());
            let lhs = conditional_p_divergence(&joint, p).unwrap();
            let marginal = ip_raw(joint.x_mean(), p.value());
            assert!(lhs >= marginal - 1e-12);
        }
    }

    #[test]
    fn event_family_gap_cases() {
        let mut rng = CounterRng::new(0xFEED);
        // empty event list: rhs = 0 <= lhs
        let joint = random_joint(&mut rng, 4);
        let pmax = (0..4)
            .filter_map(|z| joint.conditional_mean(z))
            .fold(0.0f64, f64::max);
        let (lhs, rhs) = event_family_gap(&joint, &[], bp(0.4), pmax.max(1e-6)).unwrap();
        assert_eq!(rhs, 0.0);
        assert!(lhs >= -1e-12);

        // X identically zero: first sum vanishes, inequality holds
        let zero = JointBinaryDistribution::new(alloc::vec![[0.5, 0.0], [0.5, 0.0]]).unwrap();
        let (lhs, rhs) =
            event_family_gap(&zero, &[alloc::vec![0], alloc::vec![1]], bp(0.3), 0.5).unwrap();
        assert!(lhs >= rhs - 1e-12);

        // randomized property: random joints, random (possibly overlapping) events
        for _ in 0..100 {
            let n = 2 + rng.next_below(6);
            let joint = random_joint(&mut rng, n);
            let p_prime = (0..n)
                .filter_map(|z| joint.conditional_mean(z))
                .fold(0.0f64, f64::max)
                .max(1e-3);
            let n_events = rng.next_below(4);
            let events: Vec<Vec<usize>> = (0..n_events)
                .map(|_| (0..n).filter(|_| rng.next_bool(0.4)).collect())
                .collect();
            let p = bp(0.1 + 0.8 * rng.next_f64());
            let (lhs, rhs) = event_family_gap(&joint, &events, p, p_prime).unwrap();
            assert!(
                lhs >= rhs - 1e-12,
                "event-family gap violated: {lhs} < {rhs}"
            );
        }
    }

    #[test]
    fn event_family_gap_rejects_precondition_violation() {
        let joint = JointBinaryDistribution::new(alloc::vec![[0.1, 0.4], [0.4, 0.1]]).unwrap();
        // conditional mean at z=0 is 0.8 > 0.5
        assert!(event_family_gap(&joint, &[], bp(0.5), 0.5).is_err());
    }

    #[test]
    fn binomial_tail_bound_cases() {
        // q = 0: exact = (1-p)^n = bound
        let (bound, exact) = binomial_tail_bound(12, bp(0.3), bp(0.0)).unwrap();
        assert!((bound - exact).abs() <= 1e-12 * bound);

        // q = p with np integral: bound = 1 >= exact
        let (bound, exact) = binomial_tail_bound(10, bp(0.5), bp(0.5)).unwrap();
        assert!((bound - 1.0).abs() < 1e-12);
        assert!(exact <= bound);

        // frozen case n=20, p=0.5, q=0.25
        let (bound, exact) = binomial_tail_bound(20, bp(0.5), bp(0.25)).unwrap();
        assert!((exact - 0.020694732666015625).abs() < 1e-15);
        assert!((bound - 0.07307706433667734).abs() < 1e-14);
        assert!(exact <= bound);

        assert!(binomial_tail_bound(10, bp(0.3), bp(0.5)).is_err());
    }

    #[test]
    fn superadditivity_of_p_divergence_on_binary_pairs() {
        // I_p(X,Y) >= I_p(X) + I_p(Y) with equality iff independent
        let mut rng = CounterRng::new(0xAB);
        for trial in 0..200 {
            let mut m = [0.0f64; 4];
            let mut tot = 0.0;
            for v in m.iter_mut() {
                *v = rng.next_f64() + 1e-6;
                tot += *v;
            }
            m.iter_mut().for_each(|v| *v /= tot);
            let p = 0.1 + 0.8 * rng.next_f64();
            let joint = FiniteDistribution::new(m.to_vec()).unwrap();
            let base = FiniteDistribution::new(alloc::vec![
                (1.0 - p) * (1.0 - p),
                (1.0 - p) * p,
                p * (1.0 - p),
                p * p,
            ])
            .unwrap();
            let ip_xy = kl_divergence(&joint, &base).unwrap();
            let x_mean = m[2] + m[3];
            let y_mean = m[1] + m[3];
            let sum = ip_raw(x_mean, p) + ip_raw(y_mean, p);
            assert!(
                ip_xy >= sum - 1e-12,
                "superadditivity failed at trial {trial}"
            );
        }
    }
}
