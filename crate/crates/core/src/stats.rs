//! Autocorrelation statistics and their exact null moments.
//!
//! For a continuous variable the statistic is Moran's I:
//!
//! ```text
//! I = Σ_{i,j} w_ij (y_i − ȳ)(y_j − ȳ) / (S0 · Σ_i (y_i − ȳ)²/n)
//! ```
//!
//! For a K-level categorical variable the statistic is the concordance
//! index Φ, which weights concordant/discordant pairs inversely by the
//! product of their category probabilities:
//!
//! ```text
//! Φ = Σ_{i,j} w_ij (2·1(y_i = y_j) − 1) / (p_{y_i} p_{y_j}) / S0
//! ```
//!
//! Both statistics depend on the weights only through the symmetrized
//! pairs m_ij = (w_ij + w_ji)/2, and both have closed-form mean and
//! variance under the permutation null (the outcome vector randomly
//! reassigned to nodes with topology fixed). The moment formulas here are
//! validated against exhaustive permutation enumeration in the test suite
//! rather than trusted from transcription.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::{summary_from_pairs, SymmetricPairs, WeightMatrix, WeightSummary};

/// Real-valued observations over n nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSample {
    values: Vec<f64>,
}

impl ContinuousSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty sample".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite value at position {i}"
            )));
        }
        Ok(ContinuousSample { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Deviations from the mean.
    pub fn centered(&self) -> Vec<f64> {
        let m = self.mean();
        self.values.iter().map(|v| v - m).collect()
    }
}

/// Category labels over n nodes with the per-category probabilities p_k.
///
/// Proportions are either estimated from the sample (the default, and the
/// assumption behind the permutation-null moment formulas) or supplied
/// externally as known population values.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalSample {
    labels: Vec<u32>,
    k: usize,
    proportions: Vec<f64>,
    proportions_estimated: bool,
}

impl CategoricalSample {
    /// Build from dense labels in [0, K), estimating p_k by sample
    /// proportions. Every category in the range must actually occur and
    /// K must be at least 2.
    pub fn from_labels(labels: Vec<u32>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidInput("empty sample".into()));
        }
        let k = *labels.iter().max().unwrap() as usize + 1;
        if k < 2 {
            return Err(Error::Degenerate(
                "fewer than 2 categories present (K < 2)".into(),
            ));
        }
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l as usize] += 1;
        }
        if let Some(missing) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidInput(format!(
                "category {missing} has no observations; relabel densely or supply proportions"
            )));
        }
        let n = labels.len() as f64;
        let proportions = counts.iter().map(|&c| c as f64 / n).collect();
        Ok(CategoricalSample {
            labels,
            k,
            proportions,
            proportions_estimated: true,
        })
    }

    /// Build with externally known population proportions (one per
    /// category; strictly positive; summing to 1 within 1e-12). Labels must
    /// lie in [0, proportions.len()); categories may be unobserved.
    pub fn with_proportions(labels: Vec<u32>, proportions: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidInput("empty sample".into()));
        }
        let k = proportions.len();
        if k < 2 {
            return Err(Error::Degenerate(
                "fewer than 2 categories supplied (K < 2)".into(),
            ));
        }
        if proportions.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::InvalidInput(
                "all category proportions must be strictly positive".into(),
            ));
        }
        let total: f64 = proportions.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "proportions sum to {total}, expected 1"
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= k) {
            return Err(Error::InvalidInput(format!(
                "label {bad} out of range for K = {k}"
            )));
        }
        Ok(CategoricalSample {
            labels,
            k,
            proportions,
            proportions_estimated: false,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn proportions(&self) -> &[f64] {
        &self.proportions
    }

    pub fn proportions_estimated(&self) -> bool {
        self.proportions_estimated
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.k];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    pub(crate) fn inverse_proportions(&self) -> Vec<f64> {
        self.proportions.iter().map(|p| 1.0 / p).collect()
    }
}

/// Compact arbitrary labels to dense ids 0..K'-1.
///
/// Returns the dense labels and the sorted list of original ids that were
/// present (so `kept[new_label]` recovers the original id).
pub fn compact_labels(raw: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut kept: Vec<u32> = raw.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let dense = raw
        .iter()
        .map(|l| kept.binary_search(l).expect("label present") as u32)
        .collect();
    (dense, kept)
}

/// Permutation-null moments of Moran's I.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoranMoments {
    pub mu: f64,
    pub variance: f64,
    pub variant: VarianceVariant,
}

/// Which null model the Moran variance is computed under.
///
/// `Randomization` conditions on the observed values (it is the exact
/// variance of I over random permutations of y, and involves the sample
/// kurtosis); `Normality` assumes i.i.d. Gaussian observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceVariant {
    Randomization,
    Normality,
}

/// Permutation-null moments of Φ, with the inverse-proportion sums
/// Q_m = Σ_l 1/p_l^m and Q22 = (Σ_l 1/p_l)² that enter them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiMoments {
    pub mu: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q22: f64,
}

// ---------------------------------------------------------------------------
// statistic kernels over symmetrized pairs
// ---------------------------------------------------------------------------

pub(crate) fn moran_pair_sum(centered: &[f64], pairs: &SymmetricPairs) -> f64 {
    let (rows, cols, weights) = pairs.indices();
    let mut acc = 0.0;
    for ((&i, &j), &m) in rows.iter().zip(cols).zip(weights) {
        acc += m * centered[i as usize] * centered[j as usize];
    }
    acc
}

pub(crate) fn phi_pair_sum(labels: &[u32], inv_p: &[f64], pairs: &SymmetricPairs) -> f64 {
    let (rows, cols, weights) = pairs.indices();
    let mut acc = 0.0;
    for ((&i, &j), &m) in rows.iter().zip(cols).zip(weights) {
        let a = labels[i as usize];
        let b = labels[j as usize];
        let term = m * inv_p[a as usize] * inv_p[b as usize];
        acc += if a == b { term } else { -term };
    }
    acc
}

pub(crate) fn join_count_sums(labels: &[u32], k: usize, pairs: &SymmetricPairs) -> Vec<f64> {
    let (rows, cols, weights) = pairs.indices();
    let mut counts = vec![0.0f64; k];
    for ((&i, &j), &m) in rows.iter().zip(cols).zip(weights) {
        let a = labels[i as usize];
        if a == labels[j as usize] {
            counts[a as usize] += m;
        }
    }
    counts
}

pub(crate) fn moran_from_pairs(y: &ContinuousSample, pairs: &SymmetricPairs) -> Result<f64> {
    let n = y.len();
    if n != pairs.n() {
        return Err(Error::Dimension {
            expected: pairs.n(),
            got: n,
        });
    }
    let e = y.centered();
    let ss: f64 = e.iter().map(|v| v * v).sum();
    if ss <= 0.0 {
        return Err(Error::Degenerate(
            "sample variance is zero; Moran's I undefined".into(),
        ));
    }
    Ok(2.0 * moran_pair_sum(&e, pairs) / (pairs.s0() * ss / n as f64))
}

pub(crate) fn phi_from_pairs(s: &CategoricalSample, pairs: &SymmetricPairs) -> Result<f64> {
    if s.len() != pairs.n() {
        return Err(Error::Dimension {
            expected: pairs.n(),
            got: s.len(),
        });
    }
    let inv_p = s.inverse_proportions();
    Ok(2.0 * phi_pair_sum(s.labels(), &inv_p, pairs) / pairs.s0())
}

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

/// Moran's I. Errors on a dimension mismatch or a constant sample.
pub fn morans_i(y: &ContinuousSample, w: &WeightMatrix) -> Result<f64> {
    moran_from_pairs(y, &w.symmetric_pairs())
}

/// Permutation-null mean and variance of Moran's I.
///
/// The mean is −1/(n−1) exactly. The `Randomization` variance is the exact
/// variance over random permutations of `y` (it uses the sample kurtosis
/// b2 and requires n ≥ 4); the `Normality` variance assumes Gaussian data
/// and requires n ≥ 3.
pub fn moran_moments(
    w: &WeightMatrix,
    y: &ContinuousSample,
    variant: VarianceVariant,
) -> Result<MoranMoments> {
    moran_moments_from_summary(&weight_summary(w), y, variant)
}

pub(crate) fn moran_moments_from_summary(
    summary: &WeightSummary,
    y: &ContinuousSample,
    variant: VarianceVariant,
) -> Result<MoranMoments> {
    let n = summary.n;
    if y.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: y.len(),
        });
    }
    let min_n = match variant {
        VarianceVariant::Randomization => 4,
        VarianceVariant::Normality => 3,
    };
    if n < min_n {
        return Err(Error::InvalidInput(format!(
            "Moran null moments ({variant:?}) require n >= {min_n}, got {n}"
        )));
    }
    let nf = n as f64;
    let mu = -1.0 / (nf - 1.0);
    let (s0, s1, s2) = (summary.s0, summary.s1, summary.s2);
    let variance = match variant {
        VarianceVariant::Randomization => {
            let e = y.centered();
            let m2: f64 = e.iter().map(|v| v * v).sum::<f64>() / nf;
            if m2 <= 0.0 {
                return Err(Error::Degenerate(
                    "sample variance is zero; Moran null moments undefined".into(),
                ));
            }
            let m4: f64 = e.iter().map(|v| v * v * v * v).sum::<f64>() / nf;
            let b2 = m4 / (m2 * m2);
            let num = nf * ((nf * nf - 3.0 * nf + 3.0) * s1 - nf * s2 + 3.0 * s0 * s0)
                - b2 * ((nf * nf - nf) * s1 - 2.0 * nf * s2 + 6.0 * s0 * s0);
            let den = (nf - 1.0) * (nf - 2.0) * (nf - 3.0) * s0 * s0;
            num / den - mu * mu
        }
        VarianceVariant::Normality => {
            (nf * nf * s1 - nf * s2 + 3.0 * s0 * s0) / ((nf * nf - 1.0) * s0 * s0) - mu * mu
        }
    };
    Ok(MoranMoments {
        mu,
        variance,
        variant,
    })
}

/// z = (stat − mu)/√variance. Errors when the variance is not positive.
pub fn standardize(stat: f64, mu: f64, variance: f64) -> Result<f64> {
    if !(variance > 0.0) {
        return Err(Error::Degenerate(format!(
            "null variance must be positive to standardize, got {variance}"
        )));
    }
    Ok((stat - mu) / variance.sqrt())
}

/// The categorical concordance statistic Φ.
pub fn phi(s: &CategoricalSample, w: &WeightMatrix) -> Result<f64> {
    phi_from_pairs(s, &w.symmetric_pairs())
}

/// Permutation-null mean, second moment, and variance of Φ.
///
/// Valid when the proportions are the sample proportions (the null holds
/// the empirical label multiset fixed); the second moment requires n ≥ 4.
pub fn phi_moments(s: &CategoricalSample, summary: &WeightSummary) -> Result<PhiMoments> {
    if s.len() != summary.n {
        return Err(Error::Dimension {
            expected: summary.n,
            got: s.len(),
        });
    }
    if !s.proportions_estimated() {
        return Err(Error::InvalidInput(
            "permutation-null moments of Φ require sample proportions; \
             externally supplied proportions break the fixed-multiset null"
            .into(),
        ));
    }
    let n = summary.n;
    if n < 4 {
        return Err(Error::InvalidInput(format!(
            "the second moment of Φ requires n >= 4, got {n}"
        )));
    }
    let nf = n as f64;
    let k = s.k() as f64;
    let inv_p = s.inverse_proportions();
    let q1: f64 = inv_p.iter().sum();
    let q2: f64 = inv_p.iter().map(|v| v * v).sum();
    let q3: f64 = inv_p.iter().map(|v| v * v * v).sum();
    let q22 = q1 * q1;
    let (s0, s1, s2) = (summary.s0, summary.s1, summary.s2);

    let mu = (nf * nf * k * (2.0 - k) - nf * q1) / (nf * (nf - 1.0));

    // Second moment: pair-of-pairs decomposition into coincident pairs
    // (S1), pairs sharing one index (S2 − 2S1), and disjoint pairs
    // (S0² − S2 + S1).
    let coincident = s1 / (nf * (nf - 1.0)) * (nf * nf * q22 - nf * q3);
    let one_shared = (s2 - 2.0 * s1) / (nf * (nf - 1.0) * (nf - 2.0))
        * (((k - 4.0) * k + 4.0) * nf.powi(3) * q1
            + nf * (nf * ((2.0 * k - 4.0) * q2 - q22) + 2.0 * q3));
    let disjoint = (s0 * s0 - s2 + s1) / (nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0))
        * (nf
            * (-4.0 * q3 + 2.0 * nf * q22 - 6.0 * k * nf * q2 + 12.0 * nf * q2
                - 3.0 * k * k * nf * nf * q1
                + 14.0 * k * nf * nf * q1
                - 16.0 * nf * nf * q1
                + k.powi(4) * nf.powi(3)
                - 4.0 * k.powi(3) * nf.powi(3)
                + 4.0 * k * k * nf.powi(3))
            - ((2.0 * k - 4.0) * nf * nf * q2 + nf * nf * (k * nf * (2.0 * q1 - k * q1) - q22)
                + 2.0 * nf * q3));
    let second_moment = (coincident + one_shared + disjoint) / (s0 * s0);

    let mut variance = second_moment - mu * mu;
    if variance < 0.0 {
        // Exact-zero permutation variance (e.g. uniform weights on a
        // complete graph) shows up as cancellation noise.
        if variance > -1e-9 * second_moment.abs().max(1.0) {
            variance = 0.0;
        } else {
            return Err(Error::Degenerate(format!(
                "negative Φ variance {variance}; inconsistent moments"
            )));
        }
    }
    Ok(PhiMoments {
        mu,
        second_moment,
        variance,
        q1,
        q2,
        q3,
        q22,
    })
}

/// Weighted same-category join counts: J_k = Σ_{i<j} (w_ij + w_ji)/2 over
/// pairs with y_i = y_j = k, one value per category.
///
/// For a binary symmetric weight matrix each undirected join counts once,
/// so the J_k are integers.
pub fn join_counts(s: &CategoricalSample, w: &WeightMatrix) -> Result<Vec<f64>> {
    let pairs = w.symmetric_pairs();
    if s.len() != pairs.n() {
        return Err(Error::Dimension {
            expected: pairs.n(),
            got: s.len(),
        });
    }
    Ok(join_count_sums(s.labels(), s.k(), &pairs))
}

/// For binary data the standardized Φ and the standardized Moran's I are
/// the same test; this computes both under the permutation null and
/// returns (z_I, z_Φ). They agree to floating-point accuracy.
pub fn binary_equivalence_check(s: &CategoricalSample, w: &WeightMatrix) -> Result<(f64, f64)> {
    if s.k() != 2 {
        return Err(Error::InvalidInput(format!(
            "binary equivalence requires exactly 2 categories, got {}",
            s.k()
        )));
    }
    if !s.proportions_estimated() {
        return Err(Error::InvalidInput(
            "binary equivalence is a permutation-null statement; use sample proportions".into(),
        ));
    }
    let pairs = w.symmetric_pairs();
    let summary = summary_from_pairs(&pairs);
    let y = ContinuousSample::new(s.labels().iter().map(|&l| l as f64).collect())?;

    let i_stat = moran_from_pairs(&y, &pairs)?;
    let i_mom = moran_moments_from_summary(&summary, &y, VarianceVariant::Randomization)?;
    let z_i = standardize(i_stat, i_mom.mu, i_mom.variance)?;

    let phi_stat = phi_from_pairs(s, &pairs)?;
    let phi_mom = phi_moments(s, &summary)?;
    let z_phi = standardize(phi_stat, phi_mom.mu, phi_mom.variance)?;
    Ok((z_i, z_phi))
}

use crate::weights::weight_summary;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::adjacency_from_edges;

    fn path(n: usize) -> WeightMatrix {
        adjacency_from_edges(&(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>(), n).unwrap()
    }

    #[test]
    fn moran_path_examples() {
        let y = ContinuousSample::new(vec![0.0, 1.0, 2.0]).unwrap();
        let i = morans_i(&y, &path(3)).unwrap();
        assert!(i.abs() < 1e-15); // numerator cancels by symmetry

        let y = ContinuousSample::new(vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let i = morans_i(&y, &path(4)).unwrap();
        assert!((i - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn moran_affine_invariance() {
        let w = path(5);
        let y = ContinuousSample::new(vec![0.3, -1.2, 2.0, 0.7, -0.4]).unwrap();
        let ya = ContinuousSample::new(y.values().iter().map(|v| -3.5 * v + 11.0).collect())
            .unwrap();
        let a = morans_i(&y, &w).unwrap();
        let b = morans_i(&ya, &w).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn moran_rejects_degenerate() {
        let w = path(3);
        let konst = ContinuousSample::new(vec![2.0, 2.0, 2.0]).unwrap();
        assert!(morans_i(&konst, &w).is_err());
        let short = ContinuousSample::new(vec![1.0, 2.0]).unwrap();
        assert!(morans_i(&short, &w).is_err());
    }

    #[test]
    fn moran_moments_mu_exact() {
        let w = path(4);
        let y = ContinuousSample::new(vec![0.1, 0.9, 0.4, 0.7]).unwrap();
        let m = moran_moments(&w, &y, VarianceVariant::Randomization).unwrap();
        assert_eq!(m.mu, -1.0 / 3.0);
        assert!(m.variance > 0.0);
        let mn = moran_moments(&w, &y, VarianceVariant::Normality).unwrap();
        assert_eq!(mn.mu, -1.0 / 3.0);
        assert!(mn.variance > 0.0);
    }

    #[test]
    fn moments_depend_only_on_transpose_invariant_summaries() {
        let w = WeightMatrix::from_triplets(
            5,
            vec![(0, 1, 1.5), (1, 2, 0.5), (3, 1, 2.0), (4, 0, 1.0), (2, 4, 0.25)],
        )
        .unwrap();
        let y = ContinuousSample::new(vec![0.2, -0.8, 1.4, 0.5, -1.1]).unwrap();
        let a = moran_moments(&w, &y, VarianceVariant::Randomization).unwrap();
        let b = moran_moments(&w.transpose(), &y, VarianceVariant::Randomization).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn standardize_basics() {
        assert_eq!(standardize(0.5, 0.5, 2.0).unwrap(), 0.0);
        assert_eq!(standardize(1.5, 0.5, 1.0).unwrap(), 1.0);
        assert!(standardize(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn phi_two_node_and_path_examples() {
        // one edge, discordant labels, p = (1/2, 1/2): Φ = -4
        let s = CategoricalSample::from_labels(vec![0, 1]).unwrap();
        let w = adjacency_from_edges(&[(0, 1)], 2).unwrap();
        assert!((phi(&s, &w).unwrap() + 4.0).abs() < 1e-14);

        // 4-path, labels (a,a,b,b): Φ = 4/3
        let s = CategoricalSample::from_labels(vec![0, 0, 1, 1]).unwrap();
        assert!((phi(&s, &path(4)).unwrap() - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn phi_invariant_under_category_relabeling() {
        let w = path(6);
        let s = CategoricalSample::from_labels(vec![0, 1, 1, 0, 2, 1]).unwrap();
        let swapped: Vec<u32> = s
            .labels()
            .iter()
            .map(|&l| match l {
                0 => 1,
                1 => 0,
                other => other,
            })
            .collect();
        let s2 = CategoricalSample::from_labels(swapped).unwrap();
        let a = phi(&s, &w).unwrap();
        let b = phi(&s2, &w).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn phi_moments_two_node_mean_matches_constant_statistic() {
        // n = 2, K = 2, p = (1/2, 1/2): μ_Φ = −4 = the constant Φ value.
        // The second moment needs n ≥ 4, so check the mean path only.
        let s = CategoricalSample::from_labels(vec![0, 1]).unwrap();
        let nf = 2.0;
        let k = 2.0;
        let q1 = 4.0;
        let mu = (nf * nf * k * (2.0 - k) - nf * q1) / (nf * (nf - 1.0));
        assert_eq!(mu, -4.0);
        let w = adjacency_from_edges(&[(0, 1)], 2).unwrap();
        assert!(phi_moments(&s, &weight_summary(&w)).is_err()); // n < 4
    }

    #[test]
    fn phi_moments_q22_identity_and_sign() {
        let s = CategoricalSample::from_labels(vec![0, 0, 1, 1, 2, 2, 2]).unwrap();
        let w = path(7);
        let m = phi_moments(&s, &weight_summary(&w)).unwrap();
        assert!((m.q22 - m.q1 * m.q1).abs() <= 1e-9 * m.q22);
        assert!(m.variance >= 0.0);
        assert!(m.second_moment >= m.mu * m.mu - 1e-9);
    }

    #[test]
    fn phi_moments_reject_supplied_proportions() {
        let s =
            CategoricalSample::with_proportions(vec![0, 1, 0, 1], vec![0.5, 0.5]).unwrap();
        let w = path(4);
        assert!(phi_moments(&s, &weight_summary(&w)).is_err());
    }

    #[test]
    fn join_count_examples() {
        let s = CategoricalSample::from_labels(vec![0, 0, 1, 1]).unwrap();
        let j = join_counts(&s, &path(4)).unwrap();
        assert_eq!(j, vec![1.0, 1.0]);

        // all labels distinct: every J_k = 0
        let s = CategoricalSample::from_labels(vec![0, 1, 2, 3]).unwrap();
        let j = join_counts(&s, &path(4)).unwrap();
        assert_eq!(j, vec![0.0; 4]);

        // complete graph on 3 nodes, all same category: 3 unordered joins.
        // from_labels refuses K = 1, so supply proportions explicitly.
        let complete = adjacency_from_edges(&[(0, 1), (0, 2), (1, 2)], 3).unwrap();
        let s = CategoricalSample::with_proportions(vec![0, 0, 0], vec![0.9, 0.1]).unwrap();
        let j = join_counts(&s, &complete).unwrap();
        assert_eq!(j, vec![3.0, 0.0]);
    }

    #[test]
    fn binary_equivalence_on_path() {
        let s = CategoricalSample::from_labels(vec![0, 0, 1, 1]).unwrap();
        let (z_i, z_phi) = binary_equivalence_check(&s, &path(4)).unwrap();
        assert!((z_i - z_phi).abs() <= 1e-8, "z_I = {z_i}, z_Φ = {z_phi}");

        let s3 = CategoricalSample::from_labels(vec![0, 1, 2, 0]).unwrap();
        assert!(binary_equivalence_check(&s3, &path(4)).is_err());
    }

    #[test]
    fn categorical_sample_validation() {
        assert!(CategoricalSample::from_labels(vec![0, 0, 0]).is_err()); // K < 2
        assert!(CategoricalSample::from_labels(vec![0, 2]).is_err()); // gap at 1
        assert!(CategoricalSample::with_proportions(vec![0, 1], vec![0.6, 0.39]).is_err());
        assert!(CategoricalSample::with_proportions(vec![0, 3], vec![0.5, 0.5]).is_err());
        let s = CategoricalSample::from_labels(vec![1, 0, 1, 1]).unwrap();
        assert_eq!(s.proportions(), &[0.25, 0.75]);
        assert_eq!(s.counts(), vec![1, 3]);
    }

    #[test]
    fn compact_labels_preserves_order() {
        let (dense, kept) = compact_labels(&[7, 2, 7, 9, 2]);
        assert_eq!(kept, vec![2, 7, 9]);
        assert_eq!(dense, vec![1, 0, 1, 2, 0]);
    }
}
