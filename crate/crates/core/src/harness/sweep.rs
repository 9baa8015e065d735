use num_complex::Complex64;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::asymptotics::{compute_k2, predict_lambda, Existence};
use crate::quadrature::linear_slope;
use crate::solver::{find_bound_state, BoundStateOutcome};
use crate::{Error, Result};

/// One row of an ε-sweep: prediction against the direct solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub eps: f64,
    pub k2: Complex64,
    pub lambda_pred: Complex64,
    pub lambda_num: Option<Complex64>,
    /// `|λ_num − λ_pred| / |λ_pred|`.
    pub rel_err: Option<f64>,
    /// `|λ_num − λ_pred| / ε⁵`.
    pub remainder_ratio: Option<f64>,
    pub verdict: Existence,
    pub converged: bool,
    /// Solver residual, or why no eigenvalue was reported.
    pub diagnostics: String,
}

impl SweepRecord {
    fn new(eps: f64, k2: Complex64, verdict: Existence) -> Self {
        Self {
            eps,
            k2,
            lambda_pred: predict_lambda(k2, eps),
            lambda_num: None,
            rel_err: None,
            remainder_ratio: None,
            verdict,
            converged: false,
            diagnostics: String::new(),
        }
    }

    fn with_lambda(mut self, lambda: Complex64) -> Self {
        let diff = (lambda - self.lambda_pred).norm();
        self.lambda_num = Some(lambda);
        self.rel_err = Some(diff / self.lambda_pred.norm());
        self.remainder_ratio = Some(diff / self.eps.powi(5));
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    /// Slope of `log|λ_num|` against `log ε` over converged rows.
    pub slope: Option<f64>,
    pub mean_remainder_ratio: Option<f64>,
    /// `max/min` of the remainder ratio over converged rows.
    pub ratio_spread: Option<f64>,
    pub converged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub summary: SweepSummary,
}

/// Predicts and solves at every `ε` of the config; rows are computed in
/// parallel and returned in input order.
///
/// Solver failures mark their row and never abort the sweep.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    let report = compute_k2(&cfg.potential, cfg.k2_tolerance)?;
    if report.classification == Existence::Inconclusive {
        return Err(Error::InvalidArgument(format!(
            "Re k₂ = {:e} is within the degeneracy tolerance {:e}; sweep needs a decided verdict",
            report.value.re, report.degeneracy_tol
        )));
    }
    let k2 = report.value;
    let verdict = report.classification;
    let query = cfg.query(Some(k2));

    let records: Vec<SweepRecord> = cfg
        .epsilons
        .par_iter()
        .map(|&eps| {
            let base = SweepRecord::new(eps, k2, verdict);
            match find_bound_state(&cfg.potential, eps, &query, &cfg.solver) {
                Ok(BoundStateOutcome::Found(r)) => {
                    let mut rec = base.with_lambda(r.lambda);
                    rec.converged = r.converged;
                    rec.diagnostics = format!("residual {:e} after {} iterations", r.mismatch_residual, r.iterations);
                    rec
                }
                Ok(BoundStateOutcome::Absent(a)) => SweepRecord {
                    // A cleanly certified absence is a converged outcome.
                    converged: verdict == Existence::Absent,
                    diagnostics: a.reason,
                    ..base
                },
                Err(e) => SweepRecord {
                    diagnostics: e.to_string(),
                    ..base
                },
            }
        })
        .collect();

    let summary = summarize(&records);
    Ok(SweepOutcome { records, summary })
}

pub fn summarize(records: &[SweepRecord]) -> SweepSummary {
    let good: Vec<&SweepRecord> = records.iter().filter(|r| r.converged && r.lambda_num.is_some()).collect();
    let slope = (good.len() >= 2).then(|| {
        let xs: Vec<f64> = good.iter().map(|r| r.eps.ln()).collect();
        let ys: Vec<f64> = good.iter().map(|r| r.lambda_num.unwrap().norm().ln()).collect();
        linear_slope(&xs, &ys)
    });
    let ratios: Vec<f64> = good.iter().filter_map(|r| r.remainder_ratio).collect();
    let (mean, spread) = if ratios.is_empty() {
        (None, None)
    } else {
        let max = ratios.iter().copied().fold(f64::MIN, f64::max);
        let min = ratios.iter().copied().fold(f64::MAX, f64::min);
        (Some(ratios.iter().sum::<f64>() / ratios.len() as f64), Some(max / min))
    };
    SweepSummary {
        slope,
        mean_remainder_ratio: mean,
        ratio_spread: spread,
        converged: good.len(),
    }
}
