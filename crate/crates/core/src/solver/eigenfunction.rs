use num_complex::Complex64;

use super::{Formulation, Propagator, SolverConfig};
use crate::potentials::TwoScaleFunction;
use crate::{Error, Result};

/// Sampled bound state: RK4 nodes inside the support, exponential tails outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenfunction {
    pub x: Vec<f64>,
    pub u: Vec<Complex64>,
    pub kappa: Complex64,
    pub support: (f64, f64),
    /// `|u′(x₁) + κu(x₁)| / (|u′(x₁)| + |κu(x₁)|)` before normalization.
    pub match_residual: f64,
}

/// Largest relative tail mismatch accepted at `x₁`.
pub const MATCH_TOLERANCE: f64 = 1e-8;

/// Reconstructs the eigenfunction for a root `κ`, normalized in `L₂(ℝ)`.
///
/// Left of `x₀` it is `e^{κ(x−x₀)}`, right of `x₁` it is `u(x₁)e^{−κ(x−x₁)}`;
/// both tails extend `padding` beyond the support on the RK4 step.
pub fn eigenfunction(
    potential: &TwoScaleFunction,
    eps: f64,
    kappa: Complex64,
    padding: f64,
    cfg: &SolverConfig,
) -> Result<Eigenfunction> {
    if !(kappa.re > 0.0) {
        return Err(Error::NotPhysical(kappa));
    }
    let cfg = SolverConfig {
        formulation: Formulation::Direct,
        ..cfg.clone()
    };
    let prop = Propagator::new(potential, eps, &cfg)?;
    let (x0, x1) = prop.interval();
    let h = prop.step();
    let one = Complex64::new(1.0, 0.0);

    let mut inner = Vec::with_capacity(prop.steps() + 1);
    let end = prop.integrate(-kappa * kappa, [one, kappa], |_, y| inner.push(y[0]));
    let match_residual = (end[1] + kappa * end[0]).norm() / (end[1].norm() + (kappa * end[0]).norm());
    if !(match_residual <= MATCH_TOLERANCE) {
        return Err(Error::NotARoot {
            kappa,
            residual: match_residual,
        });
    }

    // ∫|u|² over the support by composite Simpson (even step count) plus exact tails.
    let mut interior = 0.0;
    for (i, u) in inner.iter().enumerate() {
        let w = if i == 0 || i + 1 == inner.len() {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        interior += w * u.norm_sqr();
    }
    interior *= h / 3.0;
    let u1 = inner[inner.len() - 1];
    let tails = (1.0 + u1.norm_sqr()) / (2.0 * kappa.re);
    let scale = 1.0 / (interior + tails).sqrt();

    let tail_steps = if h > 0.0 { (padding / h).ceil() as usize } else { 0 };
    let step = if h > 0.0 { h } else { padding / tail_steps.max(1) as f64 };
    let mut x = Vec::with_capacity(inner.len() + 2 * tail_steps);
    let mut u = Vec::with_capacity(x.capacity());
    for j in (1..=tail_steps).rev() {
        let d = -(j as f64) * step;
        x.push(x0 + d);
        u.push((kappa * d).exp() * scale);
    }
    for (i, v) in inner.iter().enumerate() {
        x.push(if i + 1 == inner.len() { x1 } else { x0 + i as f64 * h });
        u.push(v * scale);
    }
    for j in 1..=tail_steps {
        let d = j as f64 * step;
        x.push(x1 + d);
        u.push(u1 * (-kappa * d).exp() * scale);
    }
    Ok(Eigenfunction {
        x,
        u,
        kappa,
        support: (x0, x1),
        match_residual,
    })
}

impl Eigenfunction {
    /// `‖u‖_{L₂(ℝ)}`: Simpson on the support samples plus the analytic tails.
    pub fn l2_norm(&self) -> f64 {
        let (x0, x1) = self.support;
        let inside: Vec<(f64, Complex64)> = self
            .x
            .iter()
            .zip(&self.u)
            .filter(|(&x, _)| x >= x0 && x <= x1)
            .map(|(&x, &u)| (x, u))
            .collect();
        let n = inside.len();
        let mut acc = 0.0;
        if n >= 3 {
            let h = (x1 - x0) / (n - 1) as f64;
            for (i, (_, u)) in inside.iter().enumerate() {
                let w = if i == 0 || i + 1 == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * u.norm_sqr();
            }
            acc *= h / 3.0;
        }
        let ends = inside.first().map_or(0.0, |p| p.1.norm_sqr()) + inside.last().map_or(0.0, |p| p.1.norm_sqr());
        (acc + ends / (2.0 * self.kappa.re)).sqrt()
    }

    /// Slope of `ln|u|` across the sampled right tail.
    pub fn right_tail_log_slope(&self) -> Option<f64> {
        let (_, x1) = self.support;
        let first = self.x.iter().position(|&x| x >= x1)?;
        let last = self.x.len() - 1;
        if last == first {
            return None;
        }
        Some((self.u[last].norm().ln() - self.u[first].norm().ln()) / (self.x[last] - self.x[first]))
    }

    /// Sample value nearest to `x`.
    pub fn value_near(&self, x: f64) -> Complex64 {
        let i = self
            .x
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.u[i]
    }
}
