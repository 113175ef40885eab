//! Property-based checks of the crate-wide inequalities and identities.

use lowertail_core::builders;
use lowertail_core::entropy::{self, BernoulliParam, FiniteDistribution, JointBinaryDistribution};
use lowertail_core::hypergraph::{telescoping_identity_residual, VertexSet, WeightedHypergraph};
use lowertail_core::oracle;
use lowertail_core::variational::{self, TailSpec};
use proptest::prelude::*;

fn bp(x: f64) -> BernoulliParam {
    BernoulliParam::new(x).unwrap()
}

fn normalized(weights: Vec<f64>) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Mass vectors with strictly positive entries.
fn distribution(n: usize) -> impl Strategy<Value = FiniteDistribution> {
    prop::collection::vec(1e-6..1.0f64, n)
        .prop_map(|w| FiniteDistribution::new(normalized(w)).unwrap())
}

fn joint(alphabet: usize) -> impl Strategy<Value = JointBinaryDistribution> {
    prop::collection::vec((1e-6..1.0f64, 1e-6..1.0f64), alphabet).prop_map(|cells| {
        let total: f64 = cells.iter().map(|(a, b)| a + b).sum();
        JointBinaryDistribution::new(cells.iter().map(|(a, b)| [a / total, b / total]).collect())
            .unwrap()
    })
}

/// Random small hypergraph: 2 <= r <= 3, up to 8 vertices.
fn small_hypergraph() -> impl Strategy<Value = WeightedHypergraph> {
    (2usize..=3, 4usize..=8).prop_flat_map(|(r, v)| {
        prop::collection::vec(
            (prop::collection::vec(0u32..v as u32, r), 0.25..2.0f64),
            1..8,
        )
        .prop_filter_map("edges need distinct vertices", move |edges| {
            let cleaned: Vec<(Vec<u32>, f64)> = edges
                .into_iter()
                .filter(|(e, _)| {
                    let mut s = e.clone();
                    s.sort_unstable();
                    s.dedup();
                    s.len() == r
                })
                .collect();
            if cleaned.is_empty() {
                return None;
            }
            WeightedHypergraph::new(v, r, cleaned).ok()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kl_divergence_nonnegative_zero_iff_equal(p in distribution(6), q in distribution(6)) {
        let d = entropy::kl_divergence(&p, &q).unwrap();
        prop_assert!(d >= 0.0);
        let self_d = entropy::kl_divergence(&p, &p).unwrap();
        prop_assert!(self_d.abs() <= 1e-12);
    }

    #[test]
    fn pinsker_holds(j in joint(5)) {
        let (lhs, rhs) = entropy::pinsker_gap(&j);
        prop_assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn conditioning_never_decreases_divergence(j in joint(4), p in 0.05..0.95f64) {
        let cond = entropy::conditional_p_divergence(&j, bp(p)).unwrap();
        let marginal = entropy::relative_entropy_bernoulli(bp(j.x_mean()), bp(p)).unwrap();
        prop_assert!(cond >= marginal - 1e-12);
    }

    #[test]
    fn log_sum_gap_nonnegative(pairs in prop::collection::vec((0.0..2.0f64, 1e-6..2.0f64), 1..8)) {
        let a: Vec<f64> = pairs.iter().map(|(x, _)| *x).collect();
        let b: Vec<f64> = pairs.iter().map(|(_, y)| *y).collect();
        prop_assert!(entropy::log_sum_gap(&a, &b).unwrap() >= -1e-12);
    }

    #[test]
    fn log_sum_gap_zero_on_proportional(b in prop::collection::vec(1e-3..2.0f64, 1..8), c in 0.1..5.0f64) {
        let a: Vec<f64> = b.iter().map(|x| c * x).collect();
        prop_assert!(entropy::log_sum_gap(&a, &b).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn binomial_tail_dominated(n in 1u32..=30, p in 0.05..0.95f64, frac in 0.0..1.0f64) {
        let q = p * frac;
        let (bound, exact) = entropy::binomial_tail_bound(n, bp(p), bp(q)).unwrap();
        prop_assert!(exact <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn telescoping_residual_vanishes(
        n in 2usize..=6,
        raw in prop::collection::vec(-1.0..1.0f64, 64),
    ) {
        let values: Vec<f64> = raw.iter().cycle().take(1 << n).copied().collect();
        let res = telescoping_identity_residual(&values, n).unwrap();
        prop_assert!(res.abs() <= 1e-9);
    }

    #[test]
    fn induced_weight_monotone_under_growth(h in small_hypergraph(), mask in 0u64..256) {
        let v = h.vertex_count() as u32;
        let small: VertexSet = (0..v).filter(|&x| mask >> x & 1 == 1).collect();
        let big = VertexSet::full(v as usize);
        prop_assert!(h.induced_weight(&small) <= h.induced_weight(&big) + 1e-12);
        // expected induced weight interpolates them
        let p = 0.5;
        let q = lowertail_core::ProductMeasure::constant(v as usize, p).unwrap();
        let f = h.expected_induced_weight(&q).unwrap();
        prop_assert!(f <= h.total_weight() + 1e-12);
    }

    #[test]
    fn solver_below_symmetric_ansatz(h in small_hypergraph(), eta in 0.05..0.95f64, p in 0.2..0.7f64) {
        let spec = TailSpec::relative(eta).unwrap();
        if let Ok(sol) = variational::solve_phi(&h, p, spec) {
            let (_, upper) = variational::solve_phi_symmetric(&h, p, spec).unwrap();
            prop_assert!(sol.phi <= upper + 1e-8);
            // feasibility and clipping
            prop_assert!(sol.constraint_value <= spec.threshold(&h, p) + 1e-8 * (1.0 + spec.threshold(&h, p)));
            for &q in sol.q_star.values() {
                prop_assert!(q <= p + 1e-12);
            }
        }
    }

    #[test]
    fn exact_tail_against_direct_sum(h in small_hypergraph(), eta in 0.0..1.2f64, p in 0.2..0.8f64) {
        let spec = TailSpec::relative(eta).unwrap();
        let est = oracle::exact_lower_tail(&h, p, spec).unwrap();
        // independent reference: direct summation without Gray updates
        let v = h.vertex_count();
        let threshold = spec.threshold(&h, p);
        let mut total = 0.0;
        for mask in 0u64..(1 << v) {
            let set: VertexSet = (0..v as u32).filter(|&x| mask >> x & 1 == 1).collect();
            if h.induced_weight(&set) <= threshold + 1e-9 * (1.0 + threshold) {
                let k = set.len() as u32;
                total += p.powi(k as i32) * (1.0 - p).powi((v as u32 - k) as i32);
            }
        }
        prop_assert!((est.log_prob - total.ln()).abs() < 1e-10);
    }

    #[test]
    fn ap_count_equals_induced_weight(k in 3usize..=4, n in 6usize..=14, mask in 0u64..16384) {
        let h = builders::ap_hypergraph(k, n).unwrap();
        let set: VertexSet = (0..n as u32).filter(|&x| mask >> x & 1 == 1).collect();
        prop_assert_eq!(builders::count_aps(k, n, &set) as f64, h.induced_weight(&set));
    }
}
