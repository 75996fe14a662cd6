//! Weight matrices: construction, validation, summaries, and normality
//! diagnostics.
//!
//! A [`WeightMatrix`] holds sparse nonnegative closeness weights between `n`
//! observations. The adjacency matrix of a network is the binary special
//! case. Weights are stored in compressed sparse row form with columns
//! sorted within each row; the diagonal is structurally zero (self-weights
//! are rejected at construction) and at least one off-diagonal weight must
//! be strictly positive.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse nonnegative weight matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
    symmetric: bool,
}

impl WeightMatrix {
    /// Build from (row, col, weight) triplets.
    ///
    /// Rejects out-of-range indices, diagonal entries, duplicate positions,
    /// and non-finite or negative weights. Zero weights are dropped; at
    /// least one strictly positive off-diagonal weight must remain.
    pub fn from_triplets(
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut entries: Vec<(u32, u32, f64)> = Vec::new();
        for (i, j, w) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!(
                    "weight index ({i}, {j}) out of range for n = {n}"
                )));
            }
            if i == j {
                return Err(Error::InvalidInput(format!(
                    "self-weight at node {i} is not allowed"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "weight at ({i}, {j}) must be finite and nonnegative, got {w}"
                )));
            }
            if w > 0.0 {
                entries.push((i as u32, j as u32, w));
            }
        }
        if entries.is_empty() {
            return Err(Error::Degenerate(
                "weight matrix has no positive off-diagonal weights (S0 = 0)".into(),
            ));
        }
        entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        if entries.windows(2).any(|p| (p[0].0, p[0].1) == (p[1].0, p[1].1)) {
            return Err(Error::InvalidInput("duplicate weight entry".into()));
        }

        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _, _) in &entries {
            row_ptr[i as usize + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx: Vec<u32> = entries.iter().map(|e| e.1).collect();
        let values: Vec<f64> = entries.iter().map(|e| e.2).collect();

        let mut m = WeightMatrix {
            n,
            row_ptr,
            col_idx,
            values,
            symmetric: false,
        };
        m.symmetric = m.check_symmetric();
        Ok(m)
    }

    fn check_symmetric(&self) -> bool {
        self.entries().all(|(i, j, w)| self.get(j, i) == w)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// True iff w_ij = w_ji for all pairs.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Stored weight at (i, j); zero if the position is not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match cols.binary_search(&(j as u32)) {
            Ok(pos) => self.values[self.row_ptr[i] + pos],
            Err(_) => 0.0,
        }
    }

    /// Iterate stored entries as (i, j, w) in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            self.col_idx[lo..hi]
                .iter()
                .zip(&self.values[lo..hi])
                .map(move |(&j, &w)| (i, j as usize, w))
        })
    }

    /// Column indices and weights of row `i`.
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).1.iter().sum())
            .collect()
    }

    pub fn transpose(&self) -> WeightMatrix {
        WeightMatrix::from_triplets(self.n, self.entries().map(|(i, j, w)| (j, i, w)))
            .expect("transpose of a valid matrix is valid")
    }

    /// Unordered-pair view of the symmetrized matrix (w + wᵀ)/2.
    ///
    /// Every statistic in this crate depends on the weights only through
    /// these pairs, so they are computed once and reused across permutation
    /// replicates.
    pub fn symmetric_pairs(&self) -> SymmetricPairs {
        let mut rows = Vec::new();
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        for (i, j, w) in self.entries() {
            if i < j {
                rows.push(i as u32);
                cols.push(j as u32);
                weights.push((w + self.get(j, i)) / 2.0);
            } else if self.get(j, i) == 0.0 {
                // (j, i) not stored: this lower-triangle entry is the only
                // record of the unordered pair {j, i}.
                rows.push(j as u32);
                cols.push(i as u32);
                weights.push(w / 2.0);
            }
        }
        SymmetricPairs {
            n: self.n,
            rows,
            cols,
            weights,
        }
    }

    /// Binary OR-symmetrization: w_ij := max(w_ij, w_ji).
    ///
    /// Used to turn an asymmetric k-nearest-neighbor relation into a plain
    /// undirected adjacency before join-count analysis.
    pub fn or_symmetrized(&self) -> WeightMatrix {
        let mut triplets = Vec::with_capacity(2 * self.nnz());
        for (i, j, w) in self.entries() {
            let m = w.max(self.get(j, i));
            triplets.push((i, j, m));
            if self.get(j, i) == 0.0 {
                triplets.push((j, i, m));
            }
        }
        WeightMatrix::from_triplets(self.n, triplets)
            .expect("or-symmetrization of a valid matrix is valid")
    }
}

/// Unordered pairs {i, j} with m_ij = (w_ij + w_ji)/2 > 0.
#[derive(Debug, Clone)]
pub struct SymmetricPairs {
    n: usize,
    rows: Vec<u32>,
    cols: Vec<u32>,
    weights: Vec<f64>,
}

impl SymmetricPairs {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .zip(&self.cols)
            .zip(&self.weights)
            .map(|((&i, &j), &w)| (i as usize, j as usize, w))
    }

    /// S0 = Σ_{i,j} (w_ij + w_ji)/2 over ordered pairs = 2 Σ pairs m.
    pub fn s0(&self) -> f64 {
        2.0 * self.weights.iter().sum::<f64>()
    }

    pub(crate) fn indices(&self) -> (&[u32], &[u32], &[f64]) {
        (&self.rows, &self.cols, &self.weights)
    }
}

/// Locations of `n` points in Euclidean space of dimension ≥ 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateSet {
    coords: Vec<Vec<f64>>,
}

impl CoordinateSet {
    pub fn new(coords: Vec<Vec<f64>>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidInput(
                "a coordinate set needs at least 2 points".into(),
            ));
        }
        let dim = coords[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("coordinate dimension must be >= 1".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: c.len(),
                });
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite coordinate at point {i}"
                )));
            }
        }
        Ok(CoordinateSet { coords })
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn dim(&self) -> usize {
        self.coords[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.coords[i]
            .iter()
            .zip(&self.coords[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest pairwise distance.
    pub fn max_distance(&self) -> f64 {
        let n = self.n();
        let mut d = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                d = d.max(self.distance(i, j));
            }
        }
        d
    }
}

/// The scalar weight summaries entering every null-moment formula:
///
/// - S0 = Σ_{i,j} (w_ij + w_ji)/2
/// - S1 = Σ_{i,j} (w_ij + w_ji)²/2
/// - S2 = Σ_i (w_i· + w_·i)²
///
/// with sums over i ≠ j, w_i· a row sum and w_·i a column sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSummary {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub n: usize,
}

/// Compute S0, S1, S2 for a weight matrix.
pub fn weight_summary(w: &WeightMatrix) -> WeightSummary {
    summary_from_pairs(&w.symmetric_pairs())
}

pub(crate) fn summary_from_pairs(pairs: &SymmetricPairs) -> WeightSummary {
    let n = pairs.n();
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut sym_row = vec![0.0f64; n];
    for (i, j, m) in pairs.iter() {
        s0 += 2.0 * m;
        s1 += 4.0 * m * m; // (w_ij+w_ji)² counted once per ordered pair, /2
        sym_row[i] += m;
        sym_row[j] += m;
    }
    // w_i· + w_·i = 2 · (symmetrized row sum)
    let s2 = sym_row.iter().map(|r| 4.0 * r * r).sum();
    WeightSummary { s0, s1, s2, n }
}

/// Verdict of the asymptotic-normality screen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalityVerdict {
    Plausible,
    Suspect,
}

/// Finite-sample check of the two vanishing-ratio conditions under which
/// standardized statistics on this weight matrix are asymptotically normal.
///
/// Both ratios are computed on the symmetrized weights d = (w + wᵀ)/2 with
/// row sums d_i·:
///
/// - `ratio_sum` = Σ_{i≠j} d²_ij / Σ_i d²_i·
/// - `ratio_max` = max_i d²_i· / Σ_k d²_k·
///
/// Asymptotic normality needs both to vanish as n grows; a large
/// `ratio_max` (a hub dominating the weight mass) is the usual failure
/// mode, so the verdict is driven by it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityDiagnostics {
    pub ratio_sum: f64,
    pub ratio_max: f64,
    pub threshold: f64,
    pub verdict: NormalityVerdict,
}

/// Default `ratio_max` threshold above which the normal approximation is
/// flagged as suspect. Heuristic; the theory only gives limits.
pub const DEFAULT_NORMALITY_THRESHOLD: f64 = 0.1;

pub fn normality_diagnostics(w: &WeightMatrix, threshold: f64) -> NormalityDiagnostics {
    diagnostics_from_pairs(&w.symmetric_pairs(), threshold)
}

pub(crate) fn diagnostics_from_pairs(
    pairs: &SymmetricPairs,
    threshold: f64,
) -> NormalityDiagnostics {
    let n = pairs.n();
    let mut sum_sq = 0.0;
    let mut row = vec![0.0f64; n];
    for (i, j, m) in pairs.iter() {
        sum_sq += 2.0 * m * m;
        row[i] += m;
        row[j] += m;
    }
    let row_sq: Vec<f64> = row.iter().map(|r| r * r).collect();
    let total: f64 = row_sq.iter().sum();
    let max: f64 = row_sq.iter().cloned().fold(0.0, f64::max);
    let ratio_sum = sum_sq / total;
    let ratio_max = max / total;
    let verdict = if ratio_max > threshold {
        NormalityVerdict::Suspect
    } else {
        NormalityVerdict::Plausible
    };
    NormalityDiagnostics {
        ratio_sum,
        ratio_max,
        threshold,
        verdict,
    }
}

/// Build a binary symmetric adjacency matrix from an undirected edge list.
///
/// Node ids must lie in `[0, n)`; self-loops are rejected; duplicate edges
/// (in either orientation) collapse to weight 1. At least one edge is
/// required.
pub fn adjacency_from_edges(edges: &[(usize, usize)], n: usize) -> Result<WeightMatrix> {
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::InvalidInput(format!(
                "edge ({a}, {b}) out of range for n = {n}"
            )));
        }
        if a == b {
            return Err(Error::InvalidInput(format!("self-loop at node {a}")));
        }
        seen.insert((a.min(b), a.max(b)));
    }
    if seen.is_empty() {
        return Err(Error::Degenerate("edge list is empty (S0 = 0)".into()));
    }
    let triplets = seen
        .iter()
        .flat_map(|&(a, b)| [(a, b, 1.0), (b, a, 1.0)]);
    WeightMatrix::from_triplets(n, triplets)
}

/// Binary k-nearest-neighbor weights: w_ij = 1 iff j is among i's k closest
/// points by Euclidean distance. Generally asymmetric. Distance ties break
/// toward the lower node index, which makes the ranking deterministic.
///
/// Exactly coincident points are permitted but logged as a warning, since
/// they make the neighbor ranking ambiguous up to the index tiebreak.
pub fn knn_weights(coords: &CoordinateSet, k: usize) -> Result<WeightMatrix> {
    let n = coords.n();
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    if k >= n {
        return Err(Error::InvalidInput(format!(
            "k = {k} must be smaller than the number of points {n}"
        )));
    }
    let mut duplicate_pairs = 0usize;
    let mut triplets = Vec::with_capacity(n * k);
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        dist.clear();
        for j in 0..n {
            if j != i {
                let d = coords.distance(i, j);
                if d == 0.0 && i < j {
                    duplicate_pairs += 1;
                }
                dist.push((d, j));
            }
        }
        dist.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite distances"));
        for &(_, j) in dist.iter().take(k) {
            triplets.push((i, j, 1.0));
        }
    }
    if duplicate_pairs > 0 {
        log::warn!(
            "knn_weights: {duplicate_pairs} coincident point pair(s); neighbor ranking \
             falls back to the node-index tiebreak"
        );
    }
    WeightMatrix::from_triplets(n, triplets)
}

/// Truncated inverse-distance weights: w_ij = min(D/d_ij, cap) with
/// D = max_{i,j} d_ij, so the smallest off-diagonal weight is exactly 1
/// (attained at the maximal-distance pair) and the largest is `cap`.
pub fn inverse_distance_weights(coords: &CoordinateSet, cap: f64) -> Result<WeightMatrix> {
    if !(cap > 1.0) {
        return Err(Error::InvalidInput(format!("cap must be > 1, got {cap}")));
    }
    let n = coords.n();
    let dmax = coords.max_distance();
    let mut capped = 0usize;
    let mut triplets = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in (i + 1)..n {
            let d = coords.distance(i, j);
            if d == 0.0 {
                return Err(Error::Degenerate(format!(
                    "coincident points {i} and {j}: inverse-distance weight undefined"
                )));
            }
            let w = (dmax / d).min(cap);
            if w == cap {
                capped += 1;
            }
            triplets.push((i, j, w));
            triplets.push((j, i, w));
        }
    }
    log::info!(
        "inverse_distance_weights: {:.1}% of pair weights capped at {cap}",
        100.0 * capped as f64 / (n * (n - 1) / 2) as f64
    );
    WeightMatrix::from_triplets(n, triplets)
}

/// Fraction of unordered pairs whose inverse-distance weight hits the cap.
pub fn inverse_distance_capped_share(coords: &CoordinateSet, cap: f64) -> Result<f64> {
    if !(cap > 1.0) {
        return Err(Error::InvalidInput(format!("cap must be > 1, got {cap}")));
    }
    let n = coords.n();
    let dmax = coords.max_distance();
    let mut capped = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = coords.distance(i, j);
            if d == 0.0 {
                return Err(Error::Degenerate(format!(
                    "coincident points {i} and {j}: inverse-distance weight undefined"
                )));
            }
            if dmax / d >= cap {
                capped += 1;
            }
        }
    }
    Ok(capped as f64 / (n * (n - 1) / 2) as f64)
}

/// Exponential distance decay: w_ij = exp(−q · d_ij / D) ∈ (0, 1] with
/// D = max_{i,j} d_ij; the diagonal stays zero by convention. q = 0 gives
/// all off-diagonal weights exactly 1; larger q decays faster.
pub fn exp_decay_weights(coords: &CoordinateSet, q: f64) -> Result<WeightMatrix> {
    if !(q >= 0.0) {
        return Err(Error::InvalidInput(format!("q must be >= 0, got {q}")));
    }
    let n = coords.n();
    let dmax = coords.max_distance();
    if dmax == 0.0 {
        return Err(Error::Degenerate(
            "all coordinate points coincide; decay scale undefined".into(),
        ));
    }
    let mut triplets = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in (i + 1)..n {
            let w = (-q * coords.distance(i, j) / dmax).exp();
            triplets.push((i, j, w));
            triplets.push((j, i, w));
        }
    }
    WeightMatrix::from_triplets(n, triplets)
}

/// Scale each row to sum to 1, preserving the sparsity pattern.
///
/// Errors on an isolated node (zero row sum). Idempotent.
pub fn row_normalize(w: &WeightMatrix) -> Result<WeightMatrix> {
    let sums = w.row_sums();
    if let Some(i) = sums.iter().position(|&s| s <= 0.0) {
        return Err(Error::Degenerate(format!(
            "node {i} has zero row sum; cannot row-normalize"
        )));
    }
    WeightMatrix::from_triplets(w.n(), w.entries().map(|(i, j, v)| (i, j, v / sums[i])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> WeightMatrix {
        adjacency_from_edges(&[(0, 1), (1, 2), (2, 3)], 4).unwrap()
    }

    #[test]
    fn single_edge_adjacency() {
        let w = adjacency_from_edges(&[(0, 1)], 2).unwrap();
        assert_eq!(w.get(0, 1), 1.0);
        assert_eq!(w.get(1, 0), 1.0);
        assert_eq!(w.nnz(), 2);
        assert!(w.is_symmetric());
        // duplicates (either orientation) collapse
        let w2 = adjacency_from_edges(&[(0, 1), (1, 0)], 2).unwrap();
        assert_eq!(w2.nnz(), 2);
        assert_eq!(w2.get(0, 1), 1.0);
    }

    #[test]
    fn adjacency_rejects_bad_input() {
        assert!(adjacency_from_edges(&[(0, 2)], 2).is_err());
        assert!(adjacency_from_edges(&[(1, 1)], 3).is_err());
        assert!(adjacency_from_edges(&[], 3).is_err());
    }

    #[test]
    fn summary_single_edge_and_path() {
        let s = weight_summary(&adjacency_from_edges(&[(0, 1)], 2).unwrap());
        assert_eq!((s.s0, s.s1, s.s2), (2.0, 4.0, 8.0));

        // path 0-1-2-3: degrees (1,2,2,1); S2 = 4+16+16+4 = 40
        let s = weight_summary(&path4());
        assert_eq!((s.s0, s.s1, s.s2), (6.0, 12.0, 40.0));
    }

    #[test]
    fn summary_binary_symmetric_is_edge_count_multiple() {
        // S0 = 2E, S1 = 4E for binary symmetric matrices
        let w = adjacency_from_edges(&[(0, 1), (0, 2), (0, 3), (2, 3)], 5).unwrap();
        let s = weight_summary(&w);
        assert_eq!(s.s0, 8.0);
        assert_eq!(s.s1, 16.0);
    }

    #[test]
    fn summary_invariant_under_transpose() {
        let w = WeightMatrix::from_triplets(
            3,
            vec![(0, 1, 2.0), (1, 0, 0.5), (2, 0, 1.25), (1, 2, 3.0)],
        )
        .unwrap();
        let a = weight_summary(&w);
        let b = weight_summary(&w.transpose());
        assert_eq!(a, b);
    }

    #[test]
    fn knn_collinear_example() {
        // points at x = 0, 1, 3 with k = 1
        let c = CoordinateSet::new(vec![vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let w = knn_weights(&c, 1).unwrap();
        assert_eq!(w.get(0, 1), 1.0);
        assert_eq!(w.get(1, 0), 1.0);
        assert_eq!(w.get(2, 1), 1.0);
        assert_eq!(w.get(1, 2), 0.0);
        assert!(!w.is_symmetric());
    }

    #[test]
    fn knn_complete_and_two_point() {
        let c = CoordinateSet::new(vec![vec![0.0], vec![1.0], vec![5.0]]).unwrap();
        let w = knn_weights(&c, 2).unwrap();
        assert_eq!(w.nnz(), 6); // k = n-1: complete
        let c2 = CoordinateSet::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let w2 = knn_weights(&c2, 1).unwrap();
        assert_eq!(w2.get(0, 1), 1.0);
        assert_eq!(w2.get(1, 0), 1.0);
        assert!(knn_weights(&c2, 0).is_err());
        assert!(knn_weights(&c2, 1).is_ok());
        assert!(knn_weights(&c2, 2).is_err());
    }

    #[test]
    fn inverse_distance_examples() {
        let two = CoordinateSet::new(vec![vec![0.0], vec![4.0]]).unwrap();
        let w = inverse_distance_weights(&two, 10.0).unwrap();
        assert_eq!(w.get(0, 1), 1.0);

        // x = 0, 1, 10: distances 1, 9, 10; D = 10
        let c = CoordinateSet::new(vec![vec![0.0], vec![1.0], vec![10.0]]).unwrap();
        let w = inverse_distance_weights(&c, 10.0).unwrap();
        assert_eq!(w.get(0, 1), 10.0); // capped from 10/1
        assert!((w.get(1, 2) - 10.0 / 9.0).abs() < 1e-15);
        assert_eq!(w.get(0, 2), 1.0);
        assert!(w.is_symmetric());

        assert!(inverse_distance_weights(&c, 1.0).is_err());
        let dup = CoordinateSet::new(vec![vec![0.0], vec![0.0], vec![1.0]]).unwrap();
        assert!(inverse_distance_weights(&dup, 10.0).is_err());
    }

    #[test]
    fn exp_decay_examples() {
        let c = CoordinateSet::new(vec![vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let w0 = exp_decay_weights(&c, 0.0).unwrap();
        assert_eq!(w0.get(0, 1), 1.0);
        assert_eq!(w0.get(0, 2), 1.0);

        let w = exp_decay_weights(&c, std::f64::consts::LN_2).unwrap();
        assert!((w.get(0, 2) - 0.5).abs() < 1e-15); // d = D ⇒ exp(-ln 2)

        assert!(exp_decay_weights(&c, -0.1).is_err());
    }

    #[test]
    fn row_normalize_path_and_star() {
        let w = adjacency_from_edges(&[(0, 1), (1, 2)], 3).unwrap();
        let r = row_normalize(&w).unwrap();
        assert_eq!(r.get(1, 0), 0.5);
        assert_eq!(r.get(1, 2), 0.5);
        assert_eq!(r.get(0, 1), 1.0);
        // idempotent
        let rr = row_normalize(&r).unwrap();
        assert_eq!(r, rr);

        let star = adjacency_from_edges(&[(0, 1), (0, 2), (0, 3), (0, 4)], 5).unwrap();
        let rs = row_normalize(&star).unwrap();
        assert_eq!(rs.get(0, 1), 0.25);
    }

    #[test]
    fn diagnostics_star_ring_edge() {
        let star = adjacency_from_edges(&[(0, 1), (0, 2), (0, 3), (0, 4)], 5).unwrap();
        let d = normality_diagnostics(&star, DEFAULT_NORMALITY_THRESHOLD);
        assert!((d.ratio_max - 0.8).abs() < 1e-15);
        assert_eq!(d.verdict, NormalityVerdict::Suspect);

        let n = 40;
        let ring: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let w = adjacency_from_edges(&ring, n).unwrap();
        let d = normality_diagnostics(&w, DEFAULT_NORMALITY_THRESHOLD);
        assert!((d.ratio_max - 1.0 / n as f64).abs() < 1e-15);
        assert_eq!(d.verdict, NormalityVerdict::Plausible);

        let e = adjacency_from_edges(&[(0, 1)], 2).unwrap();
        let d = normality_diagnostics(&e, DEFAULT_NORMALITY_THRESHOLD);
        assert!((d.ratio_max - 0.5).abs() < 1e-15);
        assert_eq!(d.verdict, NormalityVerdict::Suspect);
    }

    #[test]
    fn symmetric_pairs_cover_one_sided_entries() {
        let w =
            WeightMatrix::from_triplets(3, vec![(1, 0, 4.0), (0, 2, 2.0), (2, 0, 2.0)]).unwrap();
        let pairs = w.symmetric_pairs();
        assert_eq!(pairs.len(), 2);
        let collected: Vec<_> = pairs.iter().collect();
        assert!(collected.contains(&(0, 1, 2.0)));
        assert!(collected.contains(&(0, 2, 2.0)));
        assert_eq!(pairs.s0(), 8.0);
    }

    #[test]
    fn or_symmetrized_knn_view() {
        let w = WeightMatrix::from_triplets(3, vec![(0, 1, 1.0), (2, 1, 1.0)]).unwrap();
        let s = w.or_symmetrized();
        assert!(s.is_symmetric());
        assert_eq!(s.get(1, 0), 1.0);
        assert_eq!(s.get(1, 2), 1.0);
        assert_eq!(s.nnz(), 4);
    }
}
