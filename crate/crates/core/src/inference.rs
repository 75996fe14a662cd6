//! Hypothesis tests: permutation null distributions, normal
//! approximations, and p-values.
//!
//! The permutation null holds the network topology fixed and randomly
//! reassigns the outcome vector to nodes. Replicate `r` of a plan draws its
//! permutation from ChaCha stream `r` of the plan seed, so the null vector
//! is a pure function of (data, weights, plan) and is assembled in
//! replicate order — results are bit-identical regardless of how many
//! worker threads run the replicates.
//!
//! Monte Carlo p-values use the add-one convention
//! p = (1 + #{draws beyond observed}) / (M + 1), which keeps the test valid
//! at finite M and never returns 0.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::stats::{
    join_count_sums, moran_from_pairs, moran_moments_from_summary, moran_pair_sum, phi_from_pairs,
    phi_moments, phi_pair_sum, standardize, CategoricalSample, ContinuousSample, MoranMoments,
    PhiMoments, VarianceVariant,
};
use crate::weights::{
    diagnostics_from_pairs, summary_from_pairs, NormalityDiagnostics, WeightMatrix,
    DEFAULT_NORMALITY_THRESHOLD,
};

/// Which tail of the null distribution counts as evidence.
///
/// Dependence inflates both Moran's I and Φ, so the default is `Upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    #[default]
    Upper,
    Lower,
    TwoSided,
}

/// Monte Carlo permutation plan: replicate count, seed, and tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationPlan {
    pub m: usize,
    pub seed: u64,
    pub tail: Tail,
}

/// Default replicate count for permutation tests.
pub const DEFAULT_PERMUTATIONS: usize = 500;

impl PermutationPlan {
    pub fn new(m: usize, seed: u64) -> Self {
        PermutationPlan {
            m,
            seed,
            tail: Tail::Upper,
        }
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidInput("permutation count must be >= 1".into()));
        }
        Ok(())
    }
}

/// Test configuration beyond the permutation plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    /// Null model for the Moran variance.
    pub variance_variant: VarianceVariant,
    /// `ratio_max` threshold for the normality diagnostics.
    pub normality_threshold: f64,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            variance_variant: VarianceVariant::Randomization,
            normality_threshold: DEFAULT_NORMALITY_THRESHOLD,
        }
    }
}

/// Null moments attached to a test result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NullMoments {
    Moran(MoranMoments),
    Phi(PhiMoments),
}

/// Outcome of a single hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub z: Option<f64>,
    pub p_permutation: Option<f64>,
    pub p_normal: Option<f64>,
    pub moments: Option<NullMoments>,
    pub m_used: usize,
    pub seed: u64,
    pub tail: Tail,
    pub diagnostics: NormalityDiagnostics,
}

/// Per-category join-count test. `test` is `None` (with `n_k` = 0) when the
/// category never occurs in the sample, marking the test as skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinCountResult {
    pub category: u32,
    pub n_k: usize,
    pub test: Option<TestResult>,
}

/// Run `stat` on `m` independent uniformly-random permutations of `base`,
/// in replicate order.
fn permutation_map<T, R, F>(base: &[T], plan: &PermutationPlan, stat: F) -> Vec<R>
where
    T: Clone + Send + Sync,
    R: Send,
    F: Fn(&[T]) -> R + Sync,
{
    (0..plan.m)
        .into_par_iter()
        .with_min_len(8)
        .map(|r| {
            let mut rng = stream_rng(plan.seed, r as u64);
            let mut v = base.to_vec();
            v.shuffle(&mut rng);
            stat(&v)
        })
        .collect()
}

/// Permutation null distribution of Moran's I: M values of I, each on a
/// uniformly random reassignment of `y` to nodes.
pub fn permutation_null_moran(
    y: &ContinuousSample,
    w: &WeightMatrix,
    plan: &PermutationPlan,
) -> Result<Vec<f64>> {
    plan.validate()?;
    let pairs = w.symmetric_pairs();
    // Errors (dimension, zero variance) surface before any replicate runs.
    moran_from_pairs(y, &pairs)?;
    let e = y.centered();
    let ss: f64 = e.iter().map(|v| v * v).sum();
    let scale = 2.0 / (pairs.s0() * ss / y.len() as f64);
    Ok(permutation_map(&e, plan, |p| scale * moran_pair_sum(p, &pairs)))
}

/// Permutation null distribution of Φ.
pub fn permutation_null_phi(
    s: &CategoricalSample,
    w: &WeightMatrix,
    plan: &PermutationPlan,
) -> Result<Vec<f64>> {
    plan.validate()?;
    let pairs = w.symmetric_pairs();
    phi_from_pairs(s, &pairs)?;
    let inv_p = s.inverse_proportions();
    let scale = 2.0 / pairs.s0();
    Ok(permutation_map(s.labels(), plan, |p| {
        scale * phi_pair_sum(p, &inv_p, &pairs)
    }))
}

/// Permutation null distribution of the join-count vector: M draws, each a
/// length-K vector of per-category weighted join counts.
pub fn permutation_null_joincounts(
    s: &CategoricalSample,
    w: &WeightMatrix,
    plan: &PermutationPlan,
) -> Result<Vec<Vec<f64>>> {
    plan.validate()?;
    let pairs = w.symmetric_pairs();
    if s.len() != pairs.n() {
        return Err(Error::Dimension {
            expected: pairs.n(),
            got: s.len(),
        });
    }
    let k = s.k();
    Ok(permutation_map(s.labels(), plan, |p| {
        join_count_sums(p, k, &pairs)
    }))
}

/// Monte Carlo p-value with the add-one convention; always in
/// [1/(M+1), 1]. The two-sided value doubles the smaller tail, capped at 1.
pub fn p_value_permutation(observed: f64, null_draws: &[f64], tail: Tail) -> Result<f64> {
    if null_draws.is_empty() {
        return Err(Error::InvalidInput("empty null sample".into()));
    }
    let m = null_draws.len() as f64;
    let upper =
        (1.0 + null_draws.iter().filter(|&&d| d >= observed).count() as f64) / (m + 1.0);
    let lower =
        (1.0 + null_draws.iter().filter(|&&d| d <= observed).count() as f64) / (m + 1.0);
    Ok(match tail {
        Tail::Upper => upper,
        Tail::Lower => lower,
        Tail::TwoSided => (2.0 * upper.min(lower)).min(1.0),
    })
}

/// Normal-approximation p-value for a standardized statistic.
pub fn p_value_normal(z: f64, tail: Tail) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite z: {z}")));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(match tail {
        Tail::Upper => 1.0 - normal.cdf(z),
        Tail::Lower => normal.cdf(z),
        Tail::TwoSided => 2.0 * (1.0 - normal.cdf(z.abs())),
    })
}

/// Moran's I test: statistic, permutation p-value, and the
/// normal-approximation p-value from the configured variance variant.
pub fn run_moran_test(
    y: &ContinuousSample,
    w: &WeightMatrix,
    plan: &PermutationPlan,
    config: &TestConfig,
) -> Result<TestResult> {
    plan.validate()?;
    let pairs = w.symmetric_pairs();
    let summary = summary_from_pairs(&pairs);
    let diagnostics = diagnostics_from_pairs(&pairs, config.normality_threshold);

    let statistic = moran_from_pairs(y, &pairs)?;
    let moments = moran_moments_from_summary(&summary, y, config.variance_variant)?;
    let z = standardize(statistic, moments.mu, moments.variance)?;
    let p_normal = p_value_normal(z, plan.tail)?;

    let e = y.centered();
    let ss: f64 = e.iter().map(|v| v * v).sum();
    let scale = 2.0 / (summary.s0 * ss / y.len() as f64);
    let draws = permutation_map(&e, plan, |p| scale * moran_pair_sum(p, &pairs));
    let p_permutation = p_value_permutation(statistic, &draws, plan.tail)?;

    Ok(TestResult {
        statistic,
        z: Some(z),
        p_permutation: Some(p_permutation),
        p_normal: Some(p_normal),
        moments: Some(NullMoments::Moran(moments)),
        m_used: plan.m,
        seed: plan.seed,
        tail: plan.tail,
        diagnostics,
    })
}

/// Φ test: permutation p-value always; z and normal p-value when the
/// permutation-null moments apply (sample proportions, n ≥ 4, positive
/// variance). Externally supplied proportions disable the z-test.
pub fn run_phi_test(
    s: &CategoricalSample,
    w: &WeightMatrix,
    plan: &PermutationPlan,
    config: &TestConfig,
) -> Result<TestResult> {
    plan.validate()?;
    let pairs = w.symmetric_pairs();
    let summary = summary_from_pairs(&pairs);
    let diagnostics = diagnostics_from_pairs(&pairs, config.normality_threshold);

    let statistic = phi_from_pairs(s, &pairs)?;

    let mut moments = None;
    let mut z = None;
    let mut p_normal = None;
    if s.proportions_estimated() && s.len() >= 4 {
        let m = phi_moments(s, &summary)?;
        moments = Some(NullMoments::Phi(m));
        if m.variance > 0.0 {
            let zv = standardize(statistic, m.mu, m.variance)?;
            p_normal = Some(p_value_normal(zv, plan.tail)?);
            z = Some(zv);
        }
    }

    let inv_p = s.inverse_proportions();
    let scale = 2.0 / summary.s0;
    let draws = permutation_map(s.labels(), plan, |p| scale * phi_pair_sum(p, &inv_p, &pairs));
    let p_permutation = p_value_permutation(statistic, &draws, plan.tail)?;

    Ok(TestResult {
        statistic,
        z,
        p_permutation: Some(p_permutation),
        p_normal,
        moments,
        m_used: plan.m,
        seed: plan.seed,
        tail: plan.tail,
        diagnostics,
    })
}

/// One permutation test per category on the join counts J_k. No normal
/// approximation; a category absent from the sample yields a skipped
/// marker instead of a test.
pub fn run_joincount_tests(
    s: &CategoricalSample,
    w: &WeightMatrix,
    plan: &PermutationPlan,
) -> Result<Vec<JoinCountResult>> {
    plan.validate()?;
    let pairs = w.symmetric_pairs();
    if s.len() != pairs.n() {
        return Err(Error::Dimension {
            expected: pairs.n(),
            got: s.len(),
        });
    }
    let diagnostics = diagnostics_from_pairs(&pairs, DEFAULT_NORMALITY_THRESHOLD);
    let k = s.k();
    let observed = join_count_sums(s.labels(), k, &pairs);
    let counts = s.counts();

    let draws: Vec<Vec<f64>> = permutation_map(s.labels(), plan, |p| join_count_sums(p, k, &pairs));

    let mut results = Vec::with_capacity(k);
    for cat in 0..k {
        if counts[cat] == 0 {
            results.push(JoinCountResult {
                category: cat as u32,
                n_k: 0,
                test: None,
            });
            continue;
        }
        let cat_draws: Vec<f64> = draws.iter().map(|d| d[cat]).collect();
        let p_permutation = p_value_permutation(observed[cat], &cat_draws, plan.tail)?;
        results.push(JoinCountResult {
            category: cat as u32,
            n_k: counts[cat],
            test: Some(TestResult {
                statistic: observed[cat],
                z: None,
                p_permutation: Some(p_permutation),
                p_normal: None,
                moments: None,
                m_used: plan.m,
                seed: plan.seed,
                tail: plan.tail,
                diagnostics,
            }),
        });
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::adjacency_from_edges;

    fn path(n: usize) -> WeightMatrix {
        adjacency_from_edges(&(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>(), n).unwrap()
    }

    #[test]
    fn p_value_permutation_conventions() {
        let draws = vec![1.0, 2.0, 3.0, 4.0];
        // observed above every draw
        assert_eq!(p_value_permutation(9.0, &draws, Tail::Upper).unwrap(), 0.2);
        // observed equal to every draw
        let flat = vec![5.0; 499];
        assert_eq!(p_value_permutation(5.0, &flat, Tail::Upper).unwrap(), 1.0);
        // the floor is 1/(M+1): 1/500 = 0.002 at M = 499
        assert_eq!(
            p_value_permutation(f64::MAX, &vec![0.0; 499], Tail::Upper).unwrap(),
            0.002
        );
        // two-sided doubles the smaller tail, capped at 1
        assert_eq!(
            p_value_permutation(2.5, &draws, Tail::TwoSided).unwrap(),
            1.0
        );
        assert!(p_value_permutation(0.0, &[], Tail::Upper).is_err());
    }

    #[test]
    fn p_value_normal_reference_points() {
        assert!((p_value_normal(0.0, Tail::Upper).unwrap() - 0.5).abs() < 1e-12);
        assert!((p_value_normal(1.96, Tail::TwoSided).unwrap() - 0.05).abs() < 1e-4);
        assert!(p_value_normal(40.0, Tail::Upper).unwrap() < 1e-10);
        assert!(p_value_normal(f64::NAN, Tail::Upper).is_err());
    }

    #[test]
    fn constant_y_fails_before_replicates() {
        let y = ContinuousSample::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let plan = PermutationPlan::new(10, 3);
        assert!(permutation_null_moran(&y, &path(4), &plan).is_err());
    }

    #[test]
    fn two_node_phi_null_is_constant() {
        // both orderings of two distinct labels are concordance-identical
        let s = CategoricalSample::from_labels(vec![0, 1]).unwrap();
        let w = adjacency_from_edges(&[(0, 1)], 2).unwrap();
        let plan = PermutationPlan::new(25, 11);
        let draws = permutation_null_phi(&s, &w, &plan).unwrap();
        assert!(draws.iter().all(|&d| (d + 4.0).abs() < 1e-12));
        let p = p_value_permutation(-4.0, &draws, Tail::Upper).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn null_draws_deterministic_and_order_stable() {
        let s = CategoricalSample::from_labels(vec![0, 0, 1, 1, 2, 2, 0, 1]).unwrap();
        let w = path(8);
        let plan = PermutationPlan::new(64, 99);
        let a = permutation_null_phi(&s, &w, &plan).unwrap();
        let b = permutation_null_phi(&s, &w, &plan).unwrap();
        assert_eq!(a, b);

        // single-thread pool must give the identical vector
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| permutation_null_phi(&s, &w, &plan).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn run_moran_test_shape() {
        let y = ContinuousSample::new(vec![0.4, -1.0, 0.3, 1.8, -0.6, 0.1]).unwrap();
        let w = path(6);
        let plan = PermutationPlan::new(99, 5);
        let r = run_moran_test(&y, &w, &plan, &TestConfig::default()).unwrap();
        assert!(r.z.is_some());
        assert!(r.p_normal.is_some());
        let p = r.p_permutation.unwrap();
        assert!((0.01 - 1e-12..=1.0).contains(&p));
        assert_eq!(r.m_used, 99);
        assert!(matches!(r.moments, Some(NullMoments::Moran(_))));
    }

    #[test]
    fn run_phi_test_disables_z_for_supplied_proportions() {
        let s =
            CategoricalSample::with_proportions(vec![0, 1, 0, 1, 1, 0], vec![0.4, 0.6]).unwrap();
        let w = path(6);
        let plan = PermutationPlan::new(49, 7);
        let r = run_phi_test(&s, &w, &plan, &TestConfig::default()).unwrap();
        assert!(r.z.is_none());
        assert!(r.p_normal.is_none());
        assert!(r.moments.is_none());
        assert!(r.p_permutation.is_some());
    }

    #[test]
    fn joincount_results_per_category_with_skip_marker() {
        // category 2 has a proportion but no observations: skipped
        let s = CategoricalSample::with_proportions(
            vec![0, 0, 1, 1, 0, 1],
            vec![0.5, 0.3, 0.2],
        )
        .unwrap();
        let w = path(6);
        let plan = PermutationPlan::new(39, 13);
        let rs = run_joincount_tests(&s, &w, &plan).unwrap();
        assert_eq!(rs.len(), 3);
        assert!(rs[0].test.is_some());
        assert!(rs[1].test.is_some());
        assert!(rs[2].test.is_none());
        assert_eq!(rs[2].n_k, 0);
        assert_eq!(rs[0].n_k, 3);
    }

    #[test]
    fn upper_tail_p_is_monotone_in_observed() {
        let draws: Vec<f64> = (0..200).map(|i| (i as f64) * 0.01).collect();
        let mut last = 1.0;
        for obs in [-1.0, 0.0, 0.5, 1.0, 2.0, 3.0] {
            let p = p_value_permutation(obs, &draws, Tail::Upper).unwrap();
            assert!(p <= last);
            last = p;
        }
    }
}
