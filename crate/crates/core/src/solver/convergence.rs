use num_complex::Complex64;

use super::roots::{locate, BoundStateOutcome, BoundStateQuery};
use super::{Propagator, SolverConfig};
use crate::potentials::TwoScaleFunction;
use crate::{Error, Result};

/// Eigenvalue under step halving with a Richardson estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    /// `(h, λ(h))`; `λ` is `None` where no root was found.
    pub points: Vec<(f64, Option<Complex64>)>,
    /// `log₂(|λ(4h) − λ(2h)| / |λ(2h) − λ(h)|)` from the last three steps.
    pub observed_order: f64,
    pub extrapolated: Option<Complex64>,
    pub error_bar: f64,
}

/// Solves at every step in `steps` (halving sequence, at least three) and
/// extrapolates with the observed order.
pub fn convergence_study(
    potential: &TwoScaleFunction,
    eps: f64,
    steps: &[f64],
    query: &BoundStateQuery,
    cfg: &SolverConfig,
) -> Result<ConvergenceStudy> {
    if steps.len() < 3 {
        return Err(Error::InvalidArgument("convergence study needs at least 3 steps".into()));
    }
    let points = steps
        .iter()
        .map(|&h| {
            let prop = Propagator::with_step(potential, eps, h, potential.support_hull(), cfg.formulation)?;
            let lam = match locate(&prop, potential, eps, query, cfg)? {
                BoundStateOutcome::Found(r) => Some(r.lambda),
                BoundStateOutcome::Absent(_) => None,
            };
            Ok((h, lam))
        })
        .collect::<Result<Vec<_>>>()?;

    let tail: Vec<Complex64> = points.iter().rev().take(3).filter_map(|p| p.1).collect();
    if tail.len() < 3 {
        return Ok(ConvergenceStudy {
            points,
            observed_order: f64::NAN,
            extrapolated: None,
            error_bar: f64::INFINITY,
        });
    }
    // tail = [λ(h), λ(2h), λ(4h)]
    let fine = (tail[0] - tail[1]).norm();
    let coarse = (tail[1] - tail[2]).norm();
    let observed_order = (coarse / fine).log2();
    let (extrapolated, error_bar) = if observed_order.is_finite() && observed_order > 0.0 {
        let corr = (tail[0] - tail[1]) / (2f64.powf(observed_order) - 1.0);
        (tail[0] + corr, corr.norm())
    } else {
        (tail[0], fine)
    };
    Ok(ConvergenceStudy {
        points,
        observed_order,
        extrapolated: Some(extrapolated),
        error_bar,
    })
}
