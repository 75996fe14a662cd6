//! Simulation studies: rejection curves and i.i.d.-method failure under
//! dependence.
//!
//! Four experiments, each a grid of settings with many Monte Carlo
//! replicates per setting:
//!
//! - `rejection_curve_sar`: Φ permutation-test rejection rates on
//!   SAR-generated, quantile-categorized data over a (d, ρ) grid;
//! - `rejection_curve_correrr`: Φ rejection rates on correlated-error data
//!   over a decay grid, testing with the true correlation weights and with
//!   truncated inverse-distance weights estimated from coordinates;
//! - `coverage_experiment_continuous`: coverage of i.i.d. 95% confidence
//!   intervals for the mean and Moran permutation power as transmission
//!   dependence grows;
//! - `coverage_experiment_categorical`: simultaneous multinomial CI
//!   coverage and Φ power (z and permutation) as transmission dependence
//!   grows.
//!
//! Replicate `rep` of setting `si` derives every random ingredient from
//! `derive_seed(seed, [experiment, si, rep, role])`; replicates run in
//! parallel and aggregate in replicate order, so a report is a pure
//! function of its configuration regardless of thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::Result;
use crate::inference::{run_moran_test, run_phi_test, PermutationPlan, TestConfig};
use crate::rng::derive_seed;
use crate::simgen::{
    categorize_by_quantiles, gen_iid_labels, gen_iid_normal, gen_neighbor_matrix, gen_network,
    gen_sar, synthetic_coordinates, transmit_continuous, transmit_labels, CovarianceFactor,
    GraphModel, FIVE_CATEGORY_CUTOFFS, FIVE_CATEGORY_MARGINALS, QUARTILE_CUTOFFS,
};
use crate::stats::{compact_labels, CategoricalSample};
use crate::weights::{exp_decay_weights, inverse_distance_weights, WeightMatrix};

const EXP_SAR: u64 = 1;
const EXP_CORRERR: u64 = 2;
const EXP_COVERAGE_CONT: u64 = 3;
const EXP_COVERAGE_CAT: u64 = 4;

const ROLE_GRAPH: u64 = 1;
const ROLE_NOISE: u64 = 2;
const ROLE_PLAN: u64 = 3;
const ROLE_TRANSMIT: u64 = 4;

/// One setting's aggregated results. Fields not applicable to an
/// experiment stay `None` and are omitted from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingSummary {
    pub setting: String,
    pub params: serde_json::Value,
    pub reps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejections_permutation: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejection_rate_permutation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_se_permutation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejections_z: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejection_rate_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_se_z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_se_coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grand_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grand_mean_mc_se: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capped_share: Option<f64>,
}

impl SettingSummary {
    fn new(setting: String, params: serde_json::Value, reps: usize) -> Self {
        SettingSummary {
            setting,
            params,
            reps,
            rejections_permutation: None,
            rejection_rate_permutation: None,
            mc_se_permutation: None,
            rejections_z: None,
            rejection_rate_z: None,
            mc_se_z: None,
            coverage_count: None,
            coverage_rate: None,
            mc_se_coverage: None,
            grand_mean: None,
            grand_mean_mc_se: None,
            capped_share: None,
        }
    }

    fn with_permutation_rejections(mut self, rejections: usize) -> Self {
        let rate = rejections as f64 / self.reps as f64;
        self.rejections_permutation = Some(rejections);
        self.rejection_rate_permutation = Some(rate);
        self.mc_se_permutation = Some(binomial_se(rate, self.reps));
        self
    }

    fn with_z_rejections(mut self, rejections: usize) -> Self {
        let rate = rejections as f64 / self.reps as f64;
        self.rejections_z = Some(rejections);
        self.rejection_rate_z = Some(rate);
        self.mc_se_z = Some(binomial_se(rate, self.reps));
        self
    }

    fn with_coverage(mut self, covered: usize) -> Self {
        let rate = covered as f64 / self.reps as f64;
        self.coverage_count = Some(covered);
        self.coverage_rate = Some(rate);
        self.mc_se_coverage = Some(binomial_se(rate, self.reps));
        self
    }
}

/// One experiment's full report: config echo, per-setting summaries, and
/// wall clock. Everything except `wall_clock_secs` is deterministic given
/// the config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub alpha: f64,
    pub settings: Vec<SettingSummary>,
    pub wall_clock_secs: f64,
}

impl ExperimentReport {
    /// The deterministic part of the report, as canonical JSON. Two runs of
    /// the same config must agree on this byte-for-byte.
    pub fn deterministic_json(&self) -> String {
        let mut clone = self.clone();
        clone.wall_clock_secs = 0.0;
        serde_json::to_string_pretty(&clone).expect("serializable report")
    }
}

/// Per-replicate record for the tidy CSV output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TidyRow {
    pub experiment: String,
    pub setting: String,
    pub replicate: usize,
    pub statistic: f64,
    pub z: Option<f64>,
    pub p_permutation: Option<f64>,
    pub p_normal: Option<f64>,
    pub covered: Option<bool>,
    pub rejected: bool,
}

fn binomial_se(rate: f64, reps: usize) -> f64 {
    (rate * (1.0 - rate) / reps as f64).sqrt()
}

/// (statistic, z, p_permutation, p_normal) for one replicate test.
type TestOut = (f64, Option<f64>, f64, Option<f64>);

fn push_tidy(
    tidy: &mut Vec<TidyRow>,
    experiment: &str,
    setting: &str,
    outcomes: &[TestOut],
    covered: Option<&[bool]>,
    alpha: f64,
) {
    for (rep, (stat, z, pp, pn)) in outcomes.iter().enumerate() {
        tidy.push(TidyRow {
            experiment: experiment.into(),
            setting: setting.into(),
            replicate: rep,
            statistic: *stat,
            z: *z,
            p_permutation: Some(*pp),
            p_normal: *pn,
            covered: covered.map(|c| c[rep]),
            rejected: *pp <= alpha,
        });
    }
}

// ---------------------------------------------------------------------------
// SAR rejection curve
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarCurveConfig {
    pub d_values: Vec<usize>,
    pub rho_values: Vec<f64>,
    pub n: usize,
    pub reps: usize,
    pub m: usize,
    pub seed: u64,
    pub alpha: f64,
    pub cutoffs: Vec<f64>,
}

impl Default for SarCurveConfig {
    fn default() -> Self {
        SarCurveConfig {
            d_values: vec![3, 5, 7, 10],
            rho_values: vec![0.0, 0.2, 0.4, 0.6],
            n: 100,
            reps: 500,
            m: 500,
            seed: 0,
            alpha: 0.05,
            cutoffs: QUARTILE_CUTOFFS.to_vec(),
        }
    }
}

impl SarCurveConfig {
    pub fn quick(mut self) -> Self {
        self.reps = 100;
        self.m = 199;
        self
    }
}

/// Φ permutation-test rejection rate for each (d, ρ) on the grid. Each
/// replicate draws a fresh degree-sequence graph, solves the SAR system,
/// categorizes at the quantile cutoffs, and tests at level alpha.
pub fn rejection_curve_sar(cfg: &SarCurveConfig) -> Result<(ExperimentReport, Vec<TidyRow>)> {
    let started = std::time::Instant::now();
    let mut settings = Vec::new();
    let mut tidy = Vec::new();
    for (di, &d) in cfg.d_values.iter().enumerate() {
        for (ri, &rho) in cfg.rho_values.iter().enumerate() {
            let si = (di * cfg.rho_values.len() + ri) as u64;
            let outcomes: Result<Vec<TestOut>> = (0..cfg.reps)
                .into_par_iter()
                .map(|rep| {
                    let tags = |role: u64| [EXP_SAR, si, rep as u64, role];
                    let w =
                        gen_neighbor_matrix(cfg.n, d, derive_seed(cfg.seed, &tags(ROLE_GRAPH)))?;
                    let y = gen_sar(&w, rho, derive_seed(cfg.seed, &tags(ROLE_NOISE)))?;
                    let s = categorize_by_quantiles(&y, &cfg.cutoffs)?;
                    let plan =
                        PermutationPlan::new(cfg.m, derive_seed(cfg.seed, &tags(ROLE_PLAN)));
                    let r = run_phi_test(&s, &w, &plan, &TestConfig::default())?;
                    Ok((r.statistic, r.z, r.p_permutation.expect("p present"), r.p_normal))
                })
                .collect();
            let outcomes = outcomes?;
            let rejections = outcomes.iter().filter(|o| o.2 <= cfg.alpha).count();
            let name = format!("d={d},rho={rho}");
            push_tidy(&mut tidy, "sar_rejection_curve", &name, &outcomes, None, cfg.alpha);
            settings.push(
                SettingSummary::new(name, serde_json::json!({ "d": d, "rho": rho }), cfg.reps)
                    .with_permutation_rejections(rejections),
            );
        }
    }
    let report = ExperimentReport {
        experiment: "sar_rejection_curve".into(),
        config: serde_json::to_value(cfg).expect("serializable config"),
        seed: cfg.seed,
        alpha: cfg.alpha,
        settings,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    Ok((report, tidy))
}

// ---------------------------------------------------------------------------
// correlated-error rejection curve
// ---------------------------------------------------------------------------

/// Which weight matrix the Φ test uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// The data-generating exp-decay correlation matrix.
    TruePi,
    /// Truncated inverse-distance weights estimated from coordinates.
    EstimatedW,
}

impl WeightMode {
    fn label(self) -> &'static str {
        match self {
            WeightMode::TruePi => "true_pi",
            WeightMode::EstimatedW => "estimated_w",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrErrCurveConfig {
    pub q_values: Vec<f64>,
    pub n: usize,
    pub reps: usize,
    pub m: usize,
    pub seed: u64,
    pub alpha: f64,
    pub cutoffs: Vec<f64>,
    /// Truncation cap for the estimated inverse-distance weights.
    pub cap: f64,
    /// Also run a no-dependence (i.i.d.) setting. The true correlation is
    /// the identity there, which carries no pair weights, so the null row
    /// is tested with the estimated weights only.
    pub include_null: bool,
    pub modes: Vec<WeightMode>,
}

impl Default for CorrErrCurveConfig {
    fn default() -> Self {
        CorrErrCurveConfig {
            q_values: vec![25.0, 50.0, 100.0],
            n: 473,
            reps: 200,
            m: 500,
            seed: 0,
            alpha: 0.05,
            cutoffs: FIVE_CATEGORY_CUTOFFS.to_vec(),
            cap: 10.0,
            include_null: true,
            modes: vec![WeightMode::TruePi, WeightMode::EstimatedW],
        }
    }
}

impl CorrErrCurveConfig {
    pub fn quick(mut self) -> Self {
        self.n = 150;
        self.reps = 50;
        self.m = 199;
        self
    }
}

/// Φ rejection rates for correlated-error data. One synthetic coordinate
/// cloud per run; per decay setting the covariance is factorized once and
/// every replicate draws fresh noise. All weight modes score the same
/// replicate data, mirroring how the tests would be compared in practice.
pub fn rejection_curve_correrr(
    cfg: &CorrErrCurveConfig,
) -> Result<(ExperimentReport, Vec<TidyRow>)> {
    let started = std::time::Instant::now();
    let coords = synthetic_coordinates(cfg.n, derive_seed(cfg.seed, &[EXP_CORRERR, 0]))?;
    let w_est = inverse_distance_weights(&coords, cfg.cap)?;
    let capped_share = crate::weights::inverse_distance_capped_share(&coords, cfg.cap)?;

    let mut settings = Vec::new();
    let mut tidy = Vec::new();

    // setting index 0 is the i.i.d. null; q settings start at 1 so that
    // toggling the null row does not reseed them
    let mut jobs: Vec<(u64, Option<f64>)> = Vec::new();
    if cfg.include_null {
        jobs.push((0, None));
    }
    for (qi, &q) in cfg.q_values.iter().enumerate() {
        jobs.push((qi as u64 + 1, Some(q)));
    }

    for (si, q) in jobs {
        let (factor, pi_weights) = match q {
            Some(q) => {
                let pi = exp_decay_weights(&coords, q)?;
                (Some(CovarianceFactor::from_weight_matrix(&pi)?), Some(pi))
            }
            None => (None, None),
        };
        let mode_weights: Vec<(WeightMode, &WeightMatrix)> = cfg
            .modes
            .iter()
            .filter_map(|&mode| match mode {
                WeightMode::TruePi => pi_weights.as_ref().map(|w| (mode, w)),
                WeightMode::EstimatedW => Some((mode, &w_est)),
            })
            .collect();

        let outcomes: Result<Vec<Vec<TestOut>>> = (0..cfg.reps)
            .into_par_iter()
            .map(|rep| {
                let tags = |role: u64| [EXP_CORRERR, si, rep as u64, role];
                let y = match &factor {
                    Some(f) => f.sample(derive_seed(cfg.seed, &tags(ROLE_NOISE))),
                    None => gen_iid_normal(cfg.n, derive_seed(cfg.seed, &tags(ROLE_NOISE)))?,
                };
                let s = categorize_by_quantiles(&y, &cfg.cutoffs)?;
                let plan = PermutationPlan::new(cfg.m, derive_seed(cfg.seed, &tags(ROLE_PLAN)));
                mode_weights
                    .iter()
                    .map(|(_, w)| {
                        let r = run_phi_test(&s, w, &plan, &TestConfig::default())?;
                        Ok((r.statistic, r.z, r.p_permutation.expect("p present"), r.p_normal))
                    })
                    .collect()
            })
            .collect();
        let outcomes = outcomes?;

        let q_label = q.map_or("null".to_string(), |q| format!("q={q}"));
        for (mi, (mode, _)) in mode_weights.iter().enumerate() {
            let per_mode: Vec<TestOut> = outcomes.iter().map(|reps| reps[mi]).collect();
            let rejections = per_mode.iter().filter(|o| o.2 <= cfg.alpha).count();
            let name = format!("{q_label},mode={}", mode.label());
            push_tidy(&mut tidy, "correrr_rejection_curve", &name, &per_mode, None, cfg.alpha);
            let mut summary = SettingSummary::new(
                name,
                serde_json::json!({ "q": q, "mode": mode.label() }),
                cfg.reps,
            )
            .with_permutation_rejections(rejections);
            if *mode == WeightMode::EstimatedW {
                summary.capped_share = Some(capped_share);
            }
            settings.push(summary);
        }
    }

    let report = ExperimentReport {
        experiment: "correrr_rejection_curve".into(),
        config: serde_json::to_value(cfg).expect("serializable config"),
        seed: cfg.seed,
        alpha: cfg.alpha,
        settings,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    Ok((report, tidy))
}

// ---------------------------------------------------------------------------
// continuous coverage experiment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageContConfig {
    pub t_values: Vec<usize>,
    pub n: usize,
    pub reps: usize,
    pub m: usize,
    pub seed: u64,
    pub alpha: f64,
    /// Mixing weight toward the neighbor mean per transmission step.
    pub alpha_mix: f64,
    pub graph: GraphModel,
}

impl Default for CoverageContConfig {
    fn default() -> Self {
        CoverageContConfig {
            t_values: vec![0, 2, 4, 6],
            n: 200,
            reps: 500,
            m: 500,
            seed: 0,
            alpha: 0.05,
            alpha_mix: 0.15,
            graph: GraphModel::default(),
        }
    }
}

impl CoverageContConfig {
    pub fn quick(mut self) -> Self {
        self.reps = 100;
        self.m = 199;
        self
    }
}

/// Direct-transmission continuous outcomes: per dependence level t, the
/// coverage of the i.i.d. 95% interval ȳ ± 1.96·se for the true mean 0
/// (the standard error ignores all covariances) and the power of the
/// Moran permutation test.
pub fn coverage_experiment_continuous(
    cfg: &CoverageContConfig,
) -> Result<(ExperimentReport, Vec<TidyRow>)> {
    let started = std::time::Instant::now();
    let mut settings = Vec::new();
    let mut tidy = Vec::new();

    for (ti, &t) in cfg.t_values.iter().enumerate() {
        let si = ti as u64;
        let outcomes: Result<Vec<(TestOut, bool, f64)>> = (0..cfg.reps)
            .into_par_iter()
            .map(|rep| {
                let tags = |role: u64| [EXP_COVERAGE_CONT, si, rep as u64, role];
                let w = gen_network(cfg.n, cfg.graph, derive_seed(cfg.seed, &tags(ROLE_GRAPH)))?;
                let y0 = gen_iid_normal(cfg.n, derive_seed(cfg.seed, &tags(ROLE_NOISE)))?;
                let y = if t == 0 {
                    y0
                } else {
                    transmit_continuous(&y0, &w, t, cfg.alpha_mix)?
                };
                let n = cfg.n as f64;
                let mean = y.mean();
                let sd = (y.values().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (n - 1.0))
                    .sqrt();
                let covered = mean.abs() <= 1.96 * sd / n.sqrt();

                let plan = PermutationPlan::new(cfg.m, derive_seed(cfg.seed, &tags(ROLE_PLAN)));
                let r = run_moran_test(&y, &w, &plan, &TestConfig::default())?;
                Ok((
                    (r.statistic, r.z, r.p_permutation.expect("p present"), r.p_normal),
                    covered,
                    mean,
                ))
            })
            .collect();
        let outcomes = outcomes?;

        let tests: Vec<TestOut> = outcomes.iter().map(|o| o.0).collect();
        let covered_flags: Vec<bool> = outcomes.iter().map(|o| o.1).collect();
        let rejections = tests.iter().filter(|o| o.2 <= cfg.alpha).count();
        let covered = covered_flags.iter().filter(|&&c| c).count();
        let means: Vec<f64> = outcomes.iter().map(|o| o.2).collect();
        let grand_mean = means.iter().sum::<f64>() / means.len() as f64;
        let gm_var = means
            .iter()
            .map(|m| (m - grand_mean) * (m - grand_mean))
            .sum::<f64>()
            / (means.len() as f64 - 1.0);
        let grand_mean_mc_se = (gm_var / means.len() as f64).sqrt();

        let name = format!("t={t}");
        push_tidy(
            &mut tidy,
            "coverage_continuous",
            &name,
            &tests,
            Some(&covered_flags),
            cfg.alpha,
        );
        let mut summary = SettingSummary::new(name, serde_json::json!({ "t": t }), cfg.reps)
            .with_permutation_rejections(rejections)
            .with_coverage(covered);
        summary.grand_mean = Some(grand_mean);
        summary.grand_mean_mc_se = Some(grand_mean_mc_se);
        settings.push(summary);
    }

    let report = ExperimentReport {
        experiment: "coverage_continuous".into(),
        config: serde_json::to_value(cfg).expect("serializable config"),
        seed: cfg.seed,
        alpha: cfg.alpha,
        settings,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    Ok((report, tidy))
}

// ---------------------------------------------------------------------------
// categorical coverage experiment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCatConfig {
    pub t_values: Vec<usize>,
    pub n: usize,
    pub reps: usize,
    pub m: usize,
    pub seed: u64,
    pub alpha: f64,
    /// Per-iteration probability that a node copies a random neighbor.
    pub p_adopt: f64,
    pub marginals: Vec<f64>,
    pub graph: GraphModel,
}

impl Default for CoverageCatConfig {
    fn default() -> Self {
        CoverageCatConfig {
            t_values: vec![0, 1, 2, 3],
            n: 200,
            reps: 500,
            m: 500,
            seed: 0,
            alpha: 0.05,
            p_adopt: 0.1,
            marginals: FIVE_CATEGORY_MARGINALS.to_vec(),
            graph: GraphModel::default(),
        }
    }
}

impl CoverageCatConfig {
    pub fn quick(mut self) -> Self {
        self.reps = 100;
        self.m = 199;
        self
    }
}

/// Simultaneous (1 − alpha) Wilson score intervals with a Bonferroni
/// split of alpha across the K categories; one (lo, hi) per category.
pub fn bonferroni_wilson_intervals(counts: &[usize], n: usize, alpha: f64) -> Vec<(f64, f64)> {
    let k = counts.len();
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(1.0 - alpha / (2.0 * k as f64));
    let nf = n as f64;
    counts
        .iter()
        .map(|&c| {
            let p = c as f64 / nf;
            let z2 = z * z;
            let center = (p + z2 / (2.0 * nf)) / (1.0 + z2 / nf);
            let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / (1.0 + z2 / nf);
            (center - half, center + half)
        })
        .collect()
}

/// Direct-transmission categorical outcomes: per dependence level t, the
/// simultaneous coverage of i.i.d. multinomial confidence intervals for
/// the marginals and the power of the Φ test (both the z and the
/// permutation version).
pub fn coverage_experiment_categorical(
    cfg: &CoverageCatConfig,
) -> Result<(ExperimentReport, Vec<TidyRow>)> {
    let started = std::time::Instant::now();
    let k = cfg.marginals.len();
    let mut settings = Vec::new();
    let mut tidy = Vec::new();

    for (ti, &t) in cfg.t_values.iter().enumerate() {
        let si = ti as u64;
        let outcomes: Result<Vec<(TestOut, bool)>> = (0..cfg.reps)
            .into_par_iter()
            .map(|rep| {
                let tags = |role: u64| [EXP_COVERAGE_CAT, si, rep as u64, role];
                let w = gen_network(cfg.n, cfg.graph, derive_seed(cfg.seed, &tags(ROLE_GRAPH)))?;
                let labels0 =
                    gen_iid_labels(&cfg.marginals, cfg.n, derive_seed(cfg.seed, &tags(ROLE_NOISE)))?;
                let labels = transmit_labels(
                    &labels0,
                    &w,
                    t,
                    cfg.p_adopt,
                    derive_seed(cfg.seed, &tags(ROLE_TRANSMIT)),
                )?;

                // i.i.d. simultaneous CIs in the original category space
                let mut counts = vec![0usize; k];
                for &l in &labels {
                    counts[l as usize] += 1;
                }
                let intervals = bonferroni_wilson_intervals(&counts, cfg.n, cfg.alpha);
                let covered = intervals
                    .iter()
                    .zip(&cfg.marginals)
                    .all(|(&(lo, hi), &p)| lo <= p && p <= hi);

                // Φ on the realized categories
                let (dense, _) = compact_labels(&labels);
                let s = CategoricalSample::from_labels(dense)?;
                let plan = PermutationPlan::new(cfg.m, derive_seed(cfg.seed, &tags(ROLE_PLAN)));
                let r = run_phi_test(&s, &w, &plan, &TestConfig::default())?;
                Ok((
                    (r.statistic, r.z, r.p_permutation.expect("p present"), r.p_normal),
                    covered,
                ))
            })
            .collect();
        let outcomes = outcomes?;

        let tests: Vec<TestOut> = outcomes.iter().map(|o| o.0).collect();
        let covered_flags: Vec<bool> = outcomes.iter().map(|o| o.1).collect();
        let rej_perm = tests.iter().filter(|o| o.2 <= cfg.alpha).count();
        let rej_z = tests
            .iter()
            .filter(|o| o.3.map_or(false, |p| p <= cfg.alpha))
            .count();
        let covered = covered_flags.iter().filter(|&&c| c).count();

        let name = format!("t={t}");
        push_tidy(
            &mut tidy,
            "coverage_categorical",
            &name,
            &tests,
            Some(&covered_flags),
            cfg.alpha,
        );
        settings.push(
            SettingSummary::new(name, serde_json::json!({ "t": t }), cfg.reps)
                .with_permutation_rejections(rej_perm)
                .with_z_rejections(rej_z)
                .with_coverage(covered),
        );
    }

    let report = ExperimentReport {
        experiment: "coverage_categorical".into(),
        config: serde_json::to_value(cfg).expect("serializable config"),
        seed: cfg.seed,
        alpha: cfg.alpha,
        settings,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    Ok((report, tidy))
}
