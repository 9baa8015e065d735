//! Numerical check of the averaging property
//! `∫u(x, x/ε)dx = ∫⟨u(x,·)⟩dx + O(εⁿ)` for every `n`.

use num_complex::Complex64;

use crate::potentials::TwoScaleFunction;
use crate::quadrature::{self, GaussLegendre};
use crate::{Error, Result};

/// Panel layout for integrals of `x ↦ u(x, x/ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub panels_per_period: usize,
    pub nodes_per_panel: usize,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            panels_per_period: 8,
            nodes_per_panel: 6,
            max_panels: 4_000_000,
        }
    }
}

impl QuadratureConfig {
    /// Panels of width `≤ ε/panels_per_period` over `breaks`, split at every breakpoint.
    pub fn panels(&self, breaks: &[f64], eps: f64) -> Result<Vec<(f64, f64)>> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
        }
        let width = eps / self.panels_per_period as f64;
        let needed = quadrature::panel_count(breaks, width);
        if needed > self.max_panels {
            return Err(Error::ResolutionBudget {
                needed,
                max: self.max_panels,
            });
        }
        Ok(quadrature::panels(breaks, width))
    }
}

/// Integrates `f` over the support hull of `u`, with panels synchronized to
/// the fast period `ε` and split at every profile endpoint.
pub(crate) fn integrate_fast<F: FnMut(f64) -> Complex64>(
    u: &TwoScaleFunction,
    eps: f64,
    cfg: &QuadratureConfig,
    f: F,
) -> Result<Complex64> {
    let breaks = u.breakpoints();
    if breaks.len() < 2 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let panels = cfg.panels(&breaks, eps)?;
    let rule = GaussLegendre::new(cfg.nodes_per_panel);
    Ok(quadrature::composite(&rule, &panels, f))
}

/// `∫ u(x, x/ε) dx` by composite Gauss–Legendre quadrature.
pub fn oscillatory_integral(
    u: &TwoScaleFunction,
    eps: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    integrate_fast(u, eps, cfg, |x| u.eval(x, x / eps))
}

/// Same as [`oscillatory_integral`], plus an error estimate from a rerun with
/// twice as many panels per period.
pub fn oscillatory_integral_with_estimate(
    u: &TwoScaleFunction,
    eps: f64,
    cfg: &QuadratureConfig,
) -> Result<(Complex64, f64)> {
    let coarse = oscillatory_integral(u, eps, cfg)?;
    let fine_cfg = QuadratureConfig {
        panels_per_period: 2 * cfg.panels_per_period,
        ..*cfg
    };
    let fine = oscillatory_integral(u, eps, &fine_cfg)?;
    Ok((fine, (fine - coarse).norm()))
}

/// `∫ ⟨u(x,·)⟩ dx`; Beta closed form for polynomial bumps.
pub fn averaged_integral(u: &TwoScaleFunction) -> Complex64 {
    u.mean_over_period().integral()
}

/// Log–log decay fit of the averaging error.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub epsilons: Vec<f64>,
    pub errors: Vec<f64>,
    pub fitted_order: f64,
    /// Some errors fell to the quadrature/round-off floor and were excluded from the fit.
    pub floor_flag: bool,
    pub floor: f64,
}

/// Fits `|∫u(x,x/ε)dx − ∫⟨u⟩dx| ~ C·ε^order` over the supplied `ε` values.
pub fn decay_order_fit(
    u: &TwoScaleFunction,
    epsilons: &[f64],
    cfg: &QuadratureConfig,
) -> Result<DecayFit> {
    if !u.has_zero_mean() {
        return Err(Error::NonZeroMean);
    }
    if epsilons.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 values of ε, got {}",
            epsilons.len()
        )));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) || epsilons.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument(
            "ε values must be positive and strictly decreasing".into(),
        ));
    }
    let target = averaged_integral(u);
    let errors = epsilons
        .iter()
        .map(|&eps| oscillatory_integral(u, eps, cfg).map(|v| (v - target).norm()))
        .collect::<Result<Vec<_>>>()?;

    // Round-off floor of a compensated sum of O(|u|) terms over the hull.
    let (a, b) = u.support_hull();
    let floor = 1e-13 * (1.0 + u.sup_bound() * (b - a));

    let (xs, ys): (Vec<f64>, Vec<f64>) = epsilons
        .iter()
        .zip(&errors)
        .filter(|(_, &e)| e > floor)
        .map(|(&eps, &e)| (eps.ln(), e.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::InsufficientDynamicRange { usable: xs.len() });
    }
    Ok(DecayFit {
        fitted_order: quadrature::linear_slope(&xs, &ys),
        floor_flag: xs.len() < epsilons.len(),
        epsilons: epsilons.to_vec(),
        errors,
        floor,
    })
}
