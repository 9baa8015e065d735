use num_complex::Complex64;

use super::{Formulation, SolverConfig, MIN_POINTS_PER_PERIOD};
use crate::gauge::build_gauge;
use crate::potentials::TwoScaleFunction;
use crate::{Error, Result};

/// 2×2 propagator of `(u, u′)` across the support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m: [[Complex64; 2]; 2],
}

impl TransferMatrix {
    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self { m: [[o, z], [z, o]] }
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, y: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * y[0] + self.m[0][1] * y[1],
            self.m[1][0] * y[0] + self.m[1][1] * y[1],
        ]
    }
}

/// Fixed-step classical Runge–Kutta integrator for
/// `u″ = −p(x)u′ + (w(x) − λ)u` on `[x₀, x₁]`.
///
/// The coefficients are sampled once at every half step and reused for each
/// spectral parameter. For the direct problem `p = 0`, `w = V(x, x/ε)`; the
/// gauged problem integrates `ψ = φ/q̃` with `p = 2q̃′/q̃`, `w = εf̃/q̃` and
/// converts `(φ, φ′) ↔ (ψ, ψ′)` at the ends.
#[derive(Debug, Clone)]
pub struct Propagator {
    x0: f64,
    x1: f64,
    h: f64,
    steps: usize,
    zeroth: Vec<Complex64>,
    first: Option<Vec<Complex64>>,
    /// `(q̃, q̃′)` at `x₀` and `x₁` for the gauged formulation.
    ends: Option<[(Complex64, Complex64); 2]>,
}

impl Propagator {
    /// Step no larger than `ε/points_per_fast_period`, over the support hull.
    pub fn new(potential: &TwoScaleFunction, eps: f64, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let h = eps / cfg.points_per_fast_period as f64;
        Self::with_step(potential, eps, h, potential.support_hull(), cfg.formulation)
    }

    /// Direct or gauged propagator with step at most `h` over `interval`.
    /// The actual step divides the interval into an even number of steps.
    pub fn with_step(
        potential: &TwoScaleFunction,
        eps: f64,
        h: f64,
        interval: (f64, f64),
        formulation: Formulation,
    ) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
        }
        let required = eps / MIN_POINTS_PER_PERIOD as f64;
        if !(h > 0.0) || h > required * (1.0 + 1e-12) {
            return Err(Error::StepTooLarge { step: h, required });
        }
        let (x0, x1) = interval;
        if x1 < x0 {
            return Err(Error::InvalidArgument(format!("empty interval [{x0}, {x1}]")));
        }
        let len = x1 - x0;
        let mut steps = (len / h).ceil() as usize;
        steps += steps % 2;
        let h = if steps == 0 { 0.0 } else { len / steps as f64 };
        let half = |k: usize| {
            if k == 2 * steps {
                x1
            } else {
                x0 + 0.5 * h * k as f64
            }
        };
        match formulation {
            Formulation::Direct => {
                let zeroth = (0..=2 * steps)
                    .map(|k| {
                        let x = half(k);
                        potential.eval(x, x / eps)
                    })
                    .collect();
                Ok(Self { x0, x1, h, steps, zeroth, first: None, ends: None })
            }
            Formulation::Gauged => {
                let gauge = build_gauge(potential, eps)?;
                let (zeroth, first) = (0..=2 * steps)
                    .map(|k| {
                        let c = gauge.coefficients(half(k));
                        (eps * c.f / c.q, 2.0 * c.dq / c.q)
                    })
                    .unzip();
                let end = |x: f64| {
                    let c = gauge.coefficients(x);
                    (c.q, c.dq)
                };
                Ok(Self {
                    x0,
                    x1,
                    h,
                    steps,
                    zeroth,
                    first: Some(first),
                    ends: Some([end(x0), end(x1)]),
                })
            }
        }
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.x0, self.x1)
    }

    fn rhs(&self, k: usize, lambda: Complex64, y: [Complex64; 2]) -> [Complex64; 2] {
        let mut d = (self.zeroth[k] - lambda) * y[0];
        if let Some(p) = &self.first {
            d -= p[k] * y[1];
        }
        [y[1], d]
    }

    /// Runs RK4 from `x₀`, calling `visit(i, y)` at every node `x₀ + i·h`.
    pub(crate) fn integrate<F: FnMut(usize, [Complex64; 2])>(
        &self,
        lambda: Complex64,
        mut y: [Complex64; 2],
        mut visit: F,
    ) -> [Complex64; 2] {
        let h = self.h;
        let axpy = |y: [Complex64; 2], s: f64, k: [Complex64; 2]| [y[0] + k[0] * s, y[1] + k[1] * s];
        visit(0, y);
        for i in 0..self.steps {
            let k1 = self.rhs(2 * i, lambda, y);
            let k2 = self.rhs(2 * i + 1, lambda, axpy(y, 0.5 * h, k1));
            let k3 = self.rhs(2 * i + 1, lambda, axpy(y, 0.5 * h, k2));
            let k4 = self.rhs(2 * i + 2, lambda, axpy(y, h, k3));
            for c in 0..2 {
                y[c] += (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]) * (h / 6.0);
            }
            visit(i + 1, y);
        }
        y
    }

    fn to_inner(&self, y: [Complex64; 2]) -> [Complex64; 2] {
        match self.ends {
            None => y,
            Some([(q, dq), _]) => [y[0] / q, (y[1] - y[0] * dq / q) / q],
        }
    }

    fn to_outer(&self, y: [Complex64; 2]) -> [Complex64; 2] {
        match self.ends {
            None => y,
            Some([_, (q, dq)]) => [q * y[0], dq * y[0] + q * y[1]],
        }
    }

    /// `(φ, φ′)(x₁)` from `(φ, φ′)(x₀)` at spectral parameter `λ`.
    pub fn propagate(&self, lambda: Complex64, y0: [Complex64; 2]) -> [Complex64; 2] {
        let y = self.integrate(lambda, self.to_inner(y0), |_, _| {});
        self.to_outer(y)
    }

    pub fn transfer(&self, lambda: Complex64) -> TransferMatrix {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let c0 = self.propagate(lambda, [o, z]);
        let c1 = self.propagate(lambda, [z, o]);
        TransferMatrix {
            m: [[c0[0], c1[0]], [c0[1], c1[1]]],
        }
    }

    /// `F(κ) = w₂ + κw₁` with `w = T(−κ²)·(1, κ)ᵀ`, continued analytically to all κ.
    pub fn mismatch_unchecked(&self, kappa: Complex64) -> Complex64 {
        let w = self.propagate(-kappa * kappa, [Complex64::new(1.0, 0.0), kappa]);
        w[1] + kappa * w[0]
    }
}

/// `T(λ)` across the support hull of `potential`.
pub fn transfer_matrix(
    potential: &TwoScaleFunction,
    eps: f64,
    lambda: Complex64,
    h: f64,
) -> Result<TransferMatrix> {
    transfer_matrix_on(potential, eps, lambda, h, potential.support_hull())
}

/// `T(λ)` across an explicit interval.
pub fn transfer_matrix_on(
    potential: &TwoScaleFunction,
    eps: f64,
    lambda: Complex64,
    h: f64,
    interval: (f64, f64),
) -> Result<TransferMatrix> {
    let prop = Propagator::with_step(potential, eps, h, interval, Formulation::Direct)?;
    Ok(prop.transfer(lambda))
}

/// `F(κ)` for `Re κ > 0`; zeros are eigenvalues `λ = −κ²` with decaying eigenfunctions.
pub fn mismatch(
    potential: &TwoScaleFunction,
    eps: f64,
    kappa: Complex64,
    cfg: &SolverConfig,
) -> Result<Complex64> {
    if !(kappa.re > 0.0) {
        return Err(Error::NotPhysical(kappa));
    }
    Ok(Propagator::new(potential, eps, cfg)?.mismatch_unchecked(kappa))
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::potentials::{canonical_potential, SlowProfile};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn free_propagator_closed_form() {
        let zero = TwoScaleFunction::zero();
        let (k, l) = (0.7, 1.3);
        let t = transfer_matrix_on(&zero, 0.1, c(-k * k), 0.001, (0.2, 0.2 + l)).unwrap();
        let expected = [
            [(k * l).cosh(), (k * l).sinh() / k],
            [k * (k * l).sinh(), (k * l).cosh()],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert!((t.m[i][j] - c(expected[i][j])).norm() < 1e-12, "{i}{j}");
            }
        }
    }

    #[test]
    fn zero_energy_free_particle() {
        let t = transfer_matrix_on(&TwoScaleFunction::zero(), 0.1, c(0.0), 0.004, (0.0, 2.0)).unwrap();
        let expected = [[1.0, 2.0], [0.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((t.m[i][j] - c(expected[i][j])).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn unit_determinant() {
        let v = canonical_potential();
        for h in [0.1 / 40.0, 0.1 / 400.0] {
            let t = transfer_matrix(&v, 0.1, c(-1e-6), h).unwrap();
            assert!((t.det() - 1.0).norm() < 1e-10, "h = {h}: {}", t.det());
        }
    }

    #[test]
    fn step_too_large_rejected() {
        let v = canonical_potential();
        assert!(matches!(
            transfer_matrix(&v, 0.1, c(-1e-6), 0.1 / 10.0),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn free_mismatch_never_vanishes() {
        let zero = TwoScaleFunction::zero();
        let prop = Propagator::with_step(&zero, 0.1, 0.001, (0.0, 1.0), Formulation::Direct).unwrap();
        for k in [1e-4f64, 0.01, 0.3, 2.0] {
            // w = (e^{κℓ}, κe^{κℓ}) so F = 2κe^{κℓ}
            let expected = 2.0 * k * k.exp();
            let f = prop.mismatch_unchecked(c(k));
            assert!((f.re - expected).abs() < 1e-10 * expected);
        }
    }

    #[test]
    fn physical_half_plane_enforced() {
        let cfg = SolverConfig::default();
        assert!(matches!(
            mismatch(&canonical_potential(), 0.1, Complex64::new(-1e-3, 0.0), &cfg),
            Err(Error::NotPhysical(_))
        ));
    }

    #[test]
    fn conjugation_symmetry_for_real_potential() {
        let cfg = SolverConfig::default();
        let v = canonical_potential();
        let k = Complex64::new(2e-3, 7e-4);
        let a = mismatch(&v, 0.1, k, &cfg).unwrap();
        let b = mismatch(&v, 0.1, k.conj(), &cfg).unwrap();
        assert!((a.conj() - b).norm() < 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn gauged_and_direct_transfer_agree() {
        let v = TwoScaleFunction::cosine(1, SlowProfile::polynomial_bump(50.0, 3, 0.0, 1.0));
        let eps = 0.05;
        let h = eps / 400.0;
        let d = Propagator::with_step(&v, eps, h, (0.0, 1.0), Formulation::Direct).unwrap();
        let g = Propagator::with_step(&v, eps, h, (0.0, 1.0), Formulation::Gauged).unwrap();
        let (td, tg) = (d.transfer(c(-1e-4)), g.transfer(c(-1e-4)));
        for i in 0..2 {
            for j in 0..2 {
                assert!((td.m[i][j] - tg.m[i][j]).norm() < 1e-9);
            }
        }
    }
}
