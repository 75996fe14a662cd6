//! Synthetic data with controlled spatial/network dependence.
//!
//! Three families of generators, all pure functions of their configuration
//! including the seed:
//!
//! - a simultaneous-autoregressive (SAR) model y = (I − ρŴ)⁻¹ε on a random
//!   graph with binomial degrees, where Ŵ is the row-normalized weight
//!   matrix so |ρ| < 1 guarantees invertibility;
//! - a correlated-error model y = Bξ with BBᵀ a distance-decay covariance;
//! - direct-transmission processes on a social network (neighbor averaging
//!   for continuous outcomes, random-neighbor copying for categorical
//!   ones) that induce dependence along ties over iterations.
//!
//! Continuous outputs can be discretized into K categories at empirical
//! quantile cutoffs.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::stats::{compact_labels, CategoricalSample, ContinuousSample};
use crate::weights::{adjacency_from_edges, row_normalize, CoordinateSet, WeightMatrix};

/// Quantile cutoffs for four categories.
pub const QUARTILE_CUTOFFS: [f64; 3] = [0.25, 0.5, 0.75];
/// Quantile cutoffs for five unevenly sized categories.
pub const FIVE_CATEGORY_CUTOFFS: [f64; 4] = [0.1, 0.3, 0.6, 0.85];
/// Reference marginals for the five-category transmission simulations.
pub const FIVE_CATEGORY_MARGINALS: [f64; 5] = [0.1, 0.2, 0.3, 0.25, 0.15];

/// SAR generator configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarConfig {
    pub n: usize,
    /// Mean-degree parameter: node degrees are 1 + Binomial(2(d−1), 1/2).
    pub d: usize,
    pub rho: f64,
    pub seed: u64,
    /// Empirical quantile cutoffs for categorization; empty keeps the
    /// outcome continuous.
    pub cutoffs: Vec<f64>,
}

/// Correlated-error generator configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrErrConfig {
    pub n: usize,
    /// Distance-decay rate of the covariance exp(−q·d/D).
    pub q: f64,
    pub seed: u64,
    pub cutoffs: Vec<f64>,
}

/// Random graph model for the transmission simulations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GraphModel {
    /// Ring lattice with k neighbors per node and rewiring probability
    /// beta.
    WattsStrogatz { k: usize, beta: f64 },
    ErdosRenyi { p: f64 },
}

impl Default for GraphModel {
    fn default() -> Self {
        GraphModel::WattsStrogatz { k: 4, beta: 0.1 }
    }
}

/// Direct-transmission configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionConfig {
    pub n: usize,
    /// Number of synchronous transmission iterations.
    pub t: usize,
    pub graph: GraphModel,
    /// Continuous: mixing weight toward the neighbor mean, in (0, 1].
    /// Categorical: per-iteration adoption probability, in [0, 1].
    pub rate: f64,
    /// Categorical starting marginals; ignored for continuous outcomes.
    pub marginals: Vec<f64>,
    pub seed: u64,
}

/// A generated dataset together with everything needed to replay it.
#[derive(Debug, Clone)]
pub struct SimDataset {
    pub weights: WeightMatrix,
    pub coords: Option<CoordinateSet>,
    pub outcome: SimOutcome,
    /// Echo of the generating configuration.
    pub truth: serde_json::Value,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub enum SimOutcome {
    Continuous(ContinuousSample),
    Categorical(CategoricalSample),
}

fn standard_normal_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// n i.i.d. standard normal draws; the raw noise stream every continuous
/// generator reduces to when its dependence parameter is zero.
pub fn gen_iid_normal(n: usize, seed: u64) -> Result<ContinuousSample> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ContinuousSample::new(standard_normal_vec(n, &mut rng))
}

/// i.i.d. categorical draws from the given marginals.
pub fn gen_iid_labels(marginals: &[f64], n: usize, seed: u64) -> Result<Vec<u32>> {
    validate_marginals(marginals)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (k, &p) in marginals.iter().enumerate() {
                acc += p;
                if u < acc {
                    return k as u32;
                }
            }
            (marginals.len() - 1) as u32
        })
        .collect())
}

fn validate_marginals(marginals: &[f64]) -> Result<()> {
    if marginals.len() < 2 {
        return Err(Error::InvalidInput("need at least 2 categories".into()));
    }
    if marginals.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::InvalidInput("marginals must be strictly positive".into()));
    }
    let total: f64 = marginals.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "marginals sum to {total}, expected 1"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// graph generation
// ---------------------------------------------------------------------------

/// Random binary symmetric graph whose degrees are drawn as
/// 1 + Binomial(2(d−1), 1/2), wired by Havel–Hakimi construction and then
/// shuffled with degree-preserving double edge swaps.
///
/// If the drawn degree sum is odd, one random degree is incremented. A
/// non-graphical draw is re-drawn; after a bounded number of attempts the
/// sequence is declared infeasible.
pub fn gen_neighbor_matrix(n: usize, d: usize, seed: u64) -> Result<WeightMatrix> {
    if d < 1 {
        return Err(Error::InvalidInput("d must be >= 1".into()));
    }
    if n <= 2 * (d - 1) + 1 {
        return Err(Error::InvalidInput(format!(
            "n = {n} too small for maximum degree 2(d-1)+1 = {}",
            2 * (d - 1) + 1
        )));
    }
    let trials = 2 * (d - 1) as u64;
    for attempt in 0..20u64 {
        let mut rng = stream_rng(seed, attempt);
        let binom = Binomial::new(trials, 0.5).expect("valid binomial");
        let mut degrees: Vec<usize> =
            (0..n).map(|_| 1 + binom.sample(&mut rng) as usize).collect();
        if degrees.iter().sum::<usize>() % 2 == 1 {
            // parity repair: bump one random node that can take another edge
            loop {
                let i = rng.gen_range(0..n);
                if degrees[i] < n - 1 {
                    degrees[i] += 1;
                    break;
                }
            }
        }
        if let Some(mut edges) = havel_hakimi(&degrees) {
            shuffle_edges(&mut edges, n, &mut rng);
            return adjacency_from_edges(&edges, n);
        }
    }
    Err(Error::Degenerate(
        "could not realize a graphical degree sequence after repeated draws".into(),
    ))
}

/// Havel–Hakimi: returns an edge list realizing the degree sequence, or
/// `None` if the sequence is not graphical.
fn havel_hakimi(degrees: &[usize]) -> Option<Vec<(usize, usize)>> {
    let mut remaining: Vec<(usize, usize)> =
        degrees.iter().cloned().zip(0..).map(|(d, i)| (d, i)).collect();
    let mut edges = Vec::with_capacity(degrees.iter().sum::<usize>() / 2);
    loop {
        remaining.sort_unstable_by(|a, b| b.cmp(a));
        let (d, v) = remaining[0];
        if d == 0 {
            return Some(edges);
        }
        if d >= remaining.len() {
            return None;
        }
        remaining[0].0 = 0;
        for idx in 1..=d {
            let (du, u) = remaining[idx];
            if du == 0 {
                return None;
            }
            remaining[idx].0 = du - 1;
            edges.push((v, u));
        }
    }
}

/// Degree-preserving randomization: repeated double edge swaps.
fn shuffle_edges(edges: &mut Vec<(usize, usize)>, _n: usize, rng: &mut ChaCha8Rng) {
    let ne = edges.len();
    if ne < 2 {
        return;
    }
    let mut present: BTreeSet<(usize, usize)> = edges
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    for _ in 0..4 * ne {
        let x = rng.gen_range(0..ne);
        let y = rng.gen_range(0..ne);
        if x == y {
            continue;
        }
        let (a, b) = edges[x];
        let (c, d) = edges[y];
        // propose (a,d), (c,b)
        if a == d || c == b || a == c || b == d {
            continue;
        }
        let nd1 = (a.min(d), a.max(d));
        let nd2 = (c.min(b), c.max(b));
        if present.contains(&nd1) || present.contains(&nd2) {
            continue;
        }
        present.remove(&(a.min(b), a.max(b)));
        present.remove(&(c.min(d), c.max(d)));
        present.insert(nd1);
        present.insert(nd2);
        edges[x] = (a, d);
        edges[y] = (c, b);
    }
}

/// Random connected simple undirected graph. Disconnected draws are
/// resampled; exhausting the retry budget is an error (easily reached by,
/// say, a sub-critical Erdős–Rényi density).
pub fn gen_network(n: usize, model: GraphModel, seed: u64) -> Result<WeightMatrix> {
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 nodes".into()));
    }
    const MAX_TRIES: u64 = 100;
    for attempt in 0..MAX_TRIES {
        let mut rng = stream_rng(seed, attempt);
        let edges = match model {
            GraphModel::WattsStrogatz { k, beta } => watts_strogatz_edges(n, k, beta, &mut rng)?,
            GraphModel::ErdosRenyi { p } => erdos_renyi_edges(n, p, &mut rng)?,
        };
        if !edges.is_empty() && is_connected(n, &edges) {
            return adjacency_from_edges(&edges, n);
        }
    }
    Err(Error::Degenerate(format!(
        "no connected graph from {model:?} within {MAX_TRIES} attempts"
    )))
}

fn watts_strogatz_edges(
    n: usize,
    k: usize,
    beta: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(usize, usize)>> {
    if k < 2 || k % 2 != 0 || k >= n {
        return Err(Error::InvalidInput(format!(
            "Watts-Strogatz needs even 2 <= k < n, got k = {k}, n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidInput(format!("beta must be in [0, 1], got {beta}")));
    }
    let mut neighbors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for s in 1..=k / 2 {
            let j = (i + s) % n;
            neighbors[i].insert(j);
            neighbors[j].insert(i);
        }
    }
    // rewire the far endpoint of each lattice edge with probability beta
    for i in 0..n {
        for s in 1..=k / 2 {
            let j = (i + s) % n;
            if rng.gen::<f64>() < beta && neighbors[i].contains(&j) {
                // choose a new endpoint avoiding self-loops and duplicates
                let mut tries = 0;
                loop {
                    let h = rng.gen_range(0..n);
                    if h != i && !neighbors[i].contains(&h) {
                        neighbors[i].remove(&j);
                        neighbors[j].remove(&i);
                        neighbors[i].insert(h);
                        neighbors[h].insert(i);
                        break;
                    }
                    tries += 1;
                    if tries > 4 * n {
                        break; // node saturated; keep the lattice edge
                    }
                }
            }
        }
    }
    let mut edges = Vec::new();
    for (i, ns) in neighbors.iter().enumerate() {
        for &j in ns {
            if i < j {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}

fn erdos_renyi_edges(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!("p must be in [0, 1], got {p}")));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Ok(edges)
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    count == n
}

// ---------------------------------------------------------------------------
// outcome generation
// ---------------------------------------------------------------------------

/// Draw y solving (I − ρŴ) y = ε with Ŵ the row-normalized weights and
/// ε i.i.d. standard normal. ρ = 0 returns the raw noise stream exactly.
pub fn gen_sar(w: &WeightMatrix, rho: f64, seed: u64) -> Result<ContinuousSample> {
    if !(rho.is_finite() && rho.abs() < 1.0) {
        return Err(Error::InvalidInput(format!(
            "|rho| must be < 1 for the row-normalized SAR operator, got {rho}"
        )));
    }
    let n = w.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = standard_normal_vec(n, &mut rng);
    if rho == 0.0 {
        return ContinuousSample::new(eps);
    }
    let wn = row_normalize(w)?;
    let mut a = DMatrix::<f64>::identity(n, n);
    for (i, j, v) in wn.entries() {
        a[(i, j)] = -rho * v;
    }
    let lu = a.lu();
    let y = lu
        .solve(&DVector::from_vec(eps))
        .ok_or_else(|| Error::Degenerate("SAR system is singular".into()))?;
    ContinuousSample::new(y.data.into())
}

/// A covariance factor B with BBᵀ = Σ, for repeated correlated-error
/// draws. Built once, sampled many times.
#[derive(Debug, Clone)]
pub struct CovarianceFactor {
    b: DMatrix<f64>,
    identity: bool,
    n: usize,
}

/// Relative eigenvalue floor below which the PSD repair clips to zero.
const PSD_CLIP_RTOL: f64 = 1e-10;
/// Relative eigenvalue bound below which the matrix is rejected as
/// indefinite rather than repaired.
const PSD_REJECT_RTOL: f64 = 1e-8;

impl CovarianceFactor {
    /// Treat a weight matrix as a correlation matrix: off-diagonal entries
    /// are the stored weights, the diagonal is restored to 1. The input
    /// must be symmetric and (numerically) positive semi-definite;
    /// eigenvalues below `1e-10 · λ_max` are clipped to zero.
    pub fn from_weight_matrix(pi: &WeightMatrix) -> Result<Self> {
        if !pi.is_symmetric() {
            return Err(Error::InvalidInput(
                "covariance construction requires a symmetric weight matrix".into(),
            ));
        }
        let n = pi.n();
        let mut cov = DMatrix::<f64>::identity(n, n);
        for (i, j, v) in pi.entries() {
            cov[(i, j)] = v;
        }
        Self::from_dense(cov)
    }

    /// Factor a dense symmetric PSD matrix via its eigendecomposition.
    pub fn from_dense(cov: DMatrix<f64>) -> Result<Self> {
        let n = cov.nrows();
        if cov.ncols() != n || n == 0 {
            return Err(Error::InvalidInput("covariance must be square and non-empty".into()));
        }
        if cov == DMatrix::identity(n, n) {
            return Ok(CovarianceFactor {
                b: DMatrix::identity(n, n),
                identity: true,
                n,
            });
        }
        let eig = nalgebra::SymmetricEigen::try_new(cov, f64::EPSILON, 0)
            .ok_or_else(|| Error::Degenerate("eigendecomposition did not converge".into()))?;
        let lam_max = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
        if !(lam_max > 0.0) {
            return Err(Error::Degenerate("covariance has no positive eigenvalue".into()));
        }
        let lam_min = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
        if lam_min < -PSD_REJECT_RTOL * lam_max {
            return Err(Error::Degenerate(format!(
                "covariance is not positive semi-definite (λ_min = {lam_min:.3e}, λ_max = {lam_max:.3e})"
            )));
        }
        let mut b = eig.eigenvectors;
        for c in 0..n {
            let lam = eig.eigenvalues[c];
            let s = if lam < PSD_CLIP_RTOL * lam_max { 0.0 } else { lam.sqrt() };
            for r in 0..n {
                b[(r, c)] *= s;
            }
        }
        Ok(CovarianceFactor {
            b,
            identity: false,
            n,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Draw y = Bξ with ξ i.i.d. standard normal. An identity covariance
    /// returns the noise stream bit-exactly.
    pub fn sample(&self, seed: u64) -> ContinuousSample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = standard_normal_vec(self.n, &mut rng);
        if self.identity {
            return ContinuousSample::new(xi).expect("finite normal draws");
        }
        let y = &self.b * DVector::from_vec(xi);
        ContinuousSample::new(y.data.into()).expect("finite linear combination")
    }
}

/// Correlated errors from a weight matrix read as a correlation matrix
/// (unit diagonal restored).
pub fn gen_correlated_error(pi: &WeightMatrix, seed: u64) -> Result<ContinuousSample> {
    Ok(CovarianceFactor::from_weight_matrix(pi)?.sample(seed))
}

/// Discretize at empirical quantile cutoffs: the category of y_i is the
/// number of thresholds ≤ y_i, giving K = cutoffs.len() + 1 categories.
///
/// Heavy ties can leave quantile classes empty; in that case the realized
/// categories are compacted (and a warning logged) rather than failing.
/// Full collapse to a single category is an error.
pub fn categorize_by_quantiles(y: &ContinuousSample, cutoffs: &[f64]) -> Result<CategoricalSample> {
    if cutoffs.is_empty() {
        return Err(Error::InvalidInput("need at least one cutoff".into()));
    }
    if cutoffs.windows(2).any(|c| c[0] >= c[1])
        || cutoffs.iter().any(|&c| !(0.0 < c && c < 1.0))
    {
        return Err(Error::InvalidInput(
            "cutoffs must be strictly increasing within (0, 1)".into(),
        ));
    }
    let n = y.len();
    let k = cutoffs.len() + 1;
    if n < k {
        return Err(Error::InvalidInput(format!(
            "n = {n} is smaller than the number of categories {k}"
        )));
    }
    let mut sorted = y.values().to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let thresholds: Vec<f64> = cutoffs.iter().map(|&c| empirical_quantile(&sorted, c)).collect();

    let labels: Vec<u32> = y
        .values()
        .iter()
        .map(|&v| thresholds.iter().filter(|&&t| t <= v).count() as u32)
        .collect();

    let mut occupied = vec![false; k];
    for &l in &labels {
        occupied[l as usize] = true;
    }
    if occupied.iter().all(|&o| o) {
        CategoricalSample::from_labels(labels)
    } else {
        let realized = occupied.iter().filter(|&&o| o).count();
        log::warn!(
            "categorize_by_quantiles: ties collapsed {k} quantile classes to {realized}; \
             relabeling densely"
        );
        let (dense, _) = compact_labels(&labels);
        CategoricalSample::from_labels(dense)
    }
}

/// Linear-interpolation empirical quantile on pre-sorted values.
fn empirical_quantile(sorted: &[f64], c: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * c;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Synchronous neighbor-mean mixing: each of the `t` iterations replaces
/// y_i by (1 − alpha)·y_i + alpha · (weighted mean of y over i's
/// neighbors). t = 0 returns the input unchanged.
pub fn transmit_continuous(
    y0: &ContinuousSample,
    a: &WeightMatrix,
    t: usize,
    alpha: f64,
) -> Result<ContinuousSample> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "alpha must be in (0, 1], got {alpha}"
        )));
    }
    let n = a.n();
    if y0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: y0.len(),
        });
    }
    let row_sums = a.row_sums();
    if let Some(i) = row_sums.iter().position(|&s| s <= 0.0) {
        return Err(Error::Degenerate(format!(
            "node {i} is isolated; transmission undefined"
        )));
    }
    let mut y = y0.values().to_vec();
    let mut next = vec![0.0f64; n];
    for _ in 0..t {
        for i in 0..n {
            let (cols, vals) = a.row(i);
            let acc: f64 = cols
                .iter()
                .zip(vals)
                .map(|(&j, &w)| w * y[j as usize])
                .sum();
            next[i] = (1.0 - alpha) * y[i] + alpha * acc / row_sums[i];
        }
        std::mem::swap(&mut y, &mut next);
    }
    ContinuousSample::new(y)
}

/// Synchronous random-neighbor copying on raw labels: per iteration each
/// node independently adopts (with probability `p_adopt`) the
/// previous-state label of a uniformly chosen neighbor.
pub fn transmit_labels(
    labels0: &[u32],
    a: &WeightMatrix,
    t: usize,
    p_adopt: f64,
    seed: u64,
) -> Result<Vec<u32>> {
    if !(0.0..=1.0).contains(&p_adopt) {
        return Err(Error::InvalidInput(format!(
            "p_adopt must be in [0, 1], got {p_adopt}"
        )));
    }
    let n = a.n();
    if labels0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: labels0.len(),
        });
    }
    if p_adopt > 0.0 {
        if let Some(i) = (0..n).position(|i| a.row(i).0.is_empty()) {
            return Err(Error::Degenerate(format!(
                "node {i} is isolated; transmission undefined"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = labels0.to_vec();
    let mut next = labels.clone();
    for _ in 0..t {
        for i in 0..n {
            if rng.gen::<f64>() < p_adopt {
                let (cols, _) = a.row(i);
                let pick = cols[rng.gen_range(0..cols.len())] as usize;
                next[i] = labels[pick];
            } else {
                next[i] = labels[i];
            }
        }
        std::mem::swap(&mut labels, &mut next);
    }
    Ok(labels)
}

/// [`transmit_labels`] wrapped into a categorical sample with sample
/// proportions. Categories that died out during transmission are
/// compacted away with a warning.
pub fn transmit_categorical(
    labels0: &[u32],
    a: &WeightMatrix,
    t: usize,
    p_adopt: f64,
    seed: u64,
) -> Result<CategoricalSample> {
    let labels = transmit_labels(labels0, a, t, p_adopt, seed)?;
    let k_orig = labels0.iter().max().map_or(0, |&m| m as usize + 1);
    let k_now = labels.iter().collect::<BTreeSet<_>>().len();
    if k_now < k_orig {
        log::warn!("transmit_categorical: {k_orig} categories reduced to {k_now} by copying");
        let (dense, _) = compact_labels(&labels);
        CategoricalSample::from_labels(dense)
    } else {
        CategoricalSample::from_labels(labels)
    }
}

// ---------------------------------------------------------------------------
// dataset-level drivers
// ---------------------------------------------------------------------------

/// Uniform coordinates on a 100 × 60 rectangle; a synthetic stand-in for
/// facility locations when no real coordinate file is supplied.
pub fn synthetic_coordinates(n: usize, seed: u64) -> Result<CoordinateSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CoordinateSet::new(
        (0..n)
            .map(|_| vec![rng.gen::<f64>() * 100.0, rng.gen::<f64>() * 60.0])
            .collect(),
    )
}

/// Generate a SAR dataset: random graph, SAR outcome, optional quantile
/// categorization.
pub fn simulate_sar(cfg: &SarConfig) -> Result<SimDataset> {
    let w = gen_neighbor_matrix(cfg.n, cfg.d, crate::rng::derive_seed(cfg.seed, &[1]))?;
    let y = gen_sar(&w, cfg.rho, crate::rng::derive_seed(cfg.seed, &[2]))?;
    let outcome = if cfg.cutoffs.is_empty() {
        SimOutcome::Continuous(y)
    } else {
        SimOutcome::Categorical(categorize_by_quantiles(&y, &cfg.cutoffs)?)
    };
    Ok(SimDataset {
        weights: w,
        coords: None,
        outcome,
        truth: serde_json::to_value(cfg).expect("serializable config"),
        seed: cfg.seed,
    })
}

/// Generate a correlated-error dataset on synthetic (or supplied)
/// coordinates, with the exp-decay correlation as the truth.
pub fn simulate_correlated_error(
    cfg: &CorrErrConfig,
    coords: Option<CoordinateSet>,
) -> Result<SimDataset> {
    let coords = match coords {
        Some(c) => {
            if c.n() != cfg.n {
                return Err(Error::Dimension {
                    expected: cfg.n,
                    got: c.n(),
                });
            }
            c
        }
        None => synthetic_coordinates(cfg.n, crate::rng::derive_seed(cfg.seed, &[1]))?,
    };
    let pi = crate::weights::exp_decay_weights(&coords, cfg.q)?;
    let y = gen_correlated_error(&pi, crate::rng::derive_seed(cfg.seed, &[2]))?;
    let outcome = if cfg.cutoffs.is_empty() {
        SimOutcome::Continuous(y)
    } else {
        SimOutcome::Categorical(categorize_by_quantiles(&y, &cfg.cutoffs)?)
    };
    Ok(SimDataset {
        weights: pi,
        coords: Some(coords),
        outcome,
        truth: serde_json::to_value(cfg).expect("serializable config"),
        seed: cfg.seed,
    })
}

/// Generate a continuous direct-transmission dataset.
pub fn simulate_transmission_continuous(cfg: &TransmissionConfig) -> Result<SimDataset> {
    let w = gen_network(cfg.n, cfg.graph, crate::rng::derive_seed(cfg.seed, &[1]))?;
    let y0 = gen_iid_normal(cfg.n, crate::rng::derive_seed(cfg.seed, &[2]))?;
    let y = if cfg.t == 0 {
        y0
    } else {
        transmit_continuous(&y0, &w, cfg.t, cfg.rate)?
    };
    Ok(SimDataset {
        weights: w,
        coords: None,
        outcome: SimOutcome::Continuous(y),
        truth: serde_json::to_value(cfg).expect("serializable config"),
        seed: cfg.seed,
    })
}

/// Generate a categorical direct-transmission dataset.
pub fn simulate_transmission_categorical(cfg: &TransmissionConfig) -> Result<SimDataset> {
    validate_marginals(&cfg.marginals)?;
    let w = gen_network(cfg.n, cfg.graph, crate::rng::derive_seed(cfg.seed, &[1]))?;
    let labels0 = gen_iid_labels(&cfg.marginals, cfg.n, crate::rng::derive_seed(cfg.seed, &[2]))?;
    let s = transmit_categorical(
        &labels0,
        &w,
        cfg.t,
        cfg.rate,
        crate::rng::derive_seed(cfg.seed, &[3]),
    )?;
    Ok(SimDataset {
        weights: w,
        coords: None,
        outcome: SimOutcome::Categorical(s),
        truth: serde_json::to_value(cfg).expect("serializable config"),
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iid_and_sar_rho_zero_share_the_noise_stream() {
        let w = gen_neighbor_matrix(30, 3, 7).unwrap();
        let iid = gen_iid_normal(30, 123).unwrap();
        let sar = gen_sar(&w, 0.0, 123).unwrap();
        assert_eq!(iid.values(), sar.values());
    }

    #[test]
    fn sar_is_seed_deterministic_and_rho_bounded() {
        let w = gen_neighbor_matrix(40, 3, 11).unwrap();
        let a = gen_sar(&w, 0.4, 5).unwrap();
        let b = gen_sar(&w, 0.4, 5).unwrap();
        assert_eq!(a.values(), b.values());
        assert!(gen_sar(&w, 1.0, 5).is_err());
        assert!(gen_sar(&w, -1.2, 5).is_err());
    }

    #[test]
    fn neighbor_matrix_degrees_match_the_binomial_law() {
        // d = 3: degrees 1 + Binomial(4, 1/2), mean 3, max 5
        let mut total = 0.0;
        let reps = 60;
        let n = 100;
        for seed in 0..reps {
            let w = gen_neighbor_matrix(n, 3, seed).unwrap();
            let sums = w.row_sums();
            assert!(sums.iter().all(|&s| (1.0..=6.0).contains(&s))); // +1 slack for parity bump
            total += sums.iter().sum::<f64>() / n as f64;
        }
        let mean = total / reps as f64;
        // sd of the per-graph mean degree is 1/sqrt(n); 3 mc sigma band
        assert!(
            (mean - 3.0).abs() < 3.0 / (reps as f64 * n as f64).sqrt() + 0.02,
            "mean degree {mean}"
        );
    }

    #[test]
    fn neighbor_matrix_d1_is_a_perfect_matching() {
        let w = gen_neighbor_matrix(20, 1, 3).unwrap();
        let sums = w.row_sums();
        assert!(sums.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn identity_covariance_returns_the_noise_stream() {
        let f = CovarianceFactor::from_dense(DMatrix::identity(25, 25)).unwrap();
        let y = f.sample(99);
        let xi = gen_iid_normal(25, 99).unwrap();
        assert_eq!(y.values(), xi.values());
    }

    #[test]
    fn perfect_correlation_collapses_to_one_value() {
        // 2x2 with off-diagonal 1: rank-1, both coordinates equal a.s.
        let pi = WeightMatrix::from_triplets(2, vec![(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let y = gen_correlated_error(&pi, 4).unwrap();
        assert!((y.values()[0] - y.values()[1]).abs() < 1e-12);
    }

    #[test]
    fn covariance_rejects_asymmetric_input() {
        let pi = WeightMatrix::from_triplets(2, vec![(0, 1, 0.9)]).unwrap();
        assert!(CovarianceFactor::from_weight_matrix(&pi).is_err());
    }

    #[test]
    fn categorize_quartiles_balanced_sizes() {
        // 100 distinct values: quartile cutoffs give four classes of 25
        let y = ContinuousSample::new((0..100).map(|i| i as f64 * 1.37).collect()).unwrap();
        let s = categorize_by_quantiles(&y, &QUARTILE_CUTOFFS).unwrap();
        assert_eq!(s.counts(), vec![25, 25, 25, 25]);
    }

    #[test]
    fn categorize_median_and_degenerate_cases() {
        let y = ContinuousSample::new(vec![1.0, 2.0]).unwrap();
        let s = categorize_by_quantiles(&y, &[0.5]).unwrap();
        assert_eq!(s.labels(), &[0, 1]);

        let tied = ContinuousSample::new(vec![3.0; 10]).unwrap();
        assert!(categorize_by_quantiles(&tied, &[0.5]).is_err());

        let y = ContinuousSample::new(vec![0.0, 1.0]).unwrap();
        assert!(categorize_by_quantiles(&y, &QUARTILE_CUTOFFS).is_err()); // n < K
        assert!(categorize_by_quantiles(&y, &[0.5, 0.5]).is_err());
        assert!(categorize_by_quantiles(&y, &[0.0]).is_err());
    }

    #[test]
    fn categorize_is_monotone() {
        let vals = vec![0.3, -1.0, 2.5, 0.3, 0.9, -0.2, 1.1, 0.0];
        let y = ContinuousSample::new(vals.clone()).unwrap();
        let s = categorize_by_quantiles(&y, &[0.3, 0.7]).unwrap();
        for i in 0..vals.len() {
            for j in 0..vals.len() {
                if vals[i] <= vals[j] {
                    assert!(s.labels()[i] <= s.labels()[j]);
                }
            }
        }
    }

    #[test]
    fn watts_strogatz_is_connected_with_mean_degree_k() {
        let w = gen_network(200, GraphModel::WattsStrogatz { k: 4, beta: 0.1 }, 42).unwrap();
        assert_eq!(w.n(), 200);
        let mean_degree = w.row_sums().iter().sum::<f64>() / 200.0;
        assert_eq!(mean_degree, 4.0); // rewiring preserves the edge count
        let edges: Vec<(usize, usize)> = w.entries().filter(|&(i, j, _)| i < j).map(|(i, j, _)| (i, j)).collect();
        assert!(is_connected(200, &edges));
    }

    #[test]
    fn subcritical_erdos_renyi_exhausts_retries() {
        let r = gen_network(60, GraphModel::ErdosRenyi { p: 0.005 }, 1);
        assert!(r.is_err());
    }

    #[test]
    fn transmission_identity_cases() {
        let w = gen_network(30, GraphModel::WattsStrogatz { k: 4, beta: 0.0 }, 9).unwrap();
        let y0 = gen_iid_normal(30, 77).unwrap();
        let out = transmit_continuous(&y0, &w, 0, 0.5).unwrap();
        assert_eq!(out.values(), y0.values());

        let labels0 = gen_iid_labels(&FIVE_CATEGORY_MARGINALS, 30, 5).unwrap();
        let same = transmit_labels(&labels0, &w, 7, 0.0, 3).unwrap();
        assert_eq!(same, labels0);
        let same0 = transmit_labels(&labels0, &w, 0, 0.9, 3).unwrap();
        assert_eq!(same0, labels0);
    }

    #[test]
    fn averaging_contracts_range_and_variance() {
        let edges: Vec<(usize, usize)> = (0..12).flat_map(|i| ((i + 1)..12).map(move |j| (i, j))).collect();
        let w = adjacency_from_edges(&edges, 12).unwrap();
        let y0 = gen_iid_normal(12, 88).unwrap();
        let (lo0, hi0) = (
            y0.values().iter().cloned().fold(f64::MAX, f64::min),
            y0.values().iter().cloned().fold(f64::MIN, f64::max),
        );
        let mut prev_var = f64::MAX;
        for t in 1..6 {
            let y = transmit_continuous(&y0, &w, t, 1.0).unwrap();
            let lo = y.values().iter().cloned().fold(f64::MAX, f64::min);
            let hi = y.values().iter().cloned().fold(f64::MIN, f64::max);
            assert!(lo >= lo0 && hi <= hi0);
            let m = y.mean();
            let var: f64 = y.values().iter().map(|v| (v - m) * (v - m)).sum();
            assert!(var < prev_var);
            prev_var = var;
        }
    }

    #[test]
    fn regular_graph_preserves_the_mean() {
        let n = 24;
        let ring: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let w = adjacency_from_edges(&ring, n).unwrap();
        let y0 = gen_iid_normal(n, 15).unwrap();
        let y = transmit_continuous(&y0, &w, 4, 0.6).unwrap();
        assert!((y.mean() - y0.mean()).abs() < 1e-12);
    }

    #[test]
    fn drivers_are_replayable() {
        let cfg = SarConfig {
            n: 50,
            d: 3,
            rho: 0.4,
            seed: 21,
            cutoffs: QUARTILE_CUTOFFS.to_vec(),
        };
        let a = simulate_sar(&cfg).unwrap();
        let b = simulate_sar(&cfg).unwrap();
        assert_eq!(a.weights, b.weights);
        match (&a.outcome, &b.outcome) {
            (SimOutcome::Categorical(x), SimOutcome::Categorical(y)) => {
                assert_eq!(x.labels(), y.labels())
            }
            _ => panic!("expected categorical outcomes"),
        }

        let cfg = TransmissionConfig {
            n: 40,
            t: 2,
            graph: GraphModel::default(),
            rate: 0.1,
            marginals: FIVE_CATEGORY_MARGINALS.to_vec(),
            seed: 33,
        };
        let a = simulate_transmission_categorical(&cfg).unwrap();
        let b = simulate_transmission_categorical(&cfg).unwrap();
        match (&a.outcome, &b.outcome) {
            (SimOutcome::Categorical(x), SimOutcome::Categorical(y)) => {
                assert_eq!(x.labels(), y.labels())
            }
            _ => panic!("expected categorical outcomes"),
        }
    }

    use crate::weights::adjacency_from_edges;
}
