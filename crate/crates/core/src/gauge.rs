//! Gauge factor `q_ε = 1 + ε²v` and the transformed operator `H₀ − εL_ε`.
//!
//! Multiplying by `q̃(x) = q_ε(x, x/ε)` conjugates
//! `H_ε = -d²/dx² + V(x, x/ε)` into `H₀ − εL_ε` with
//!
//! ```text
//! L_ε = ε·(2/q̃)·(d/dx v(x, x/ε))·d/dx − f̃/q̃,   f_ε = εVv − ε∂²v/∂x² − 2∂²v/∂x∂ξ.
//! ```
//!
//! `d/dx v(x, x/ε)` is the total derivative along the diagonal, `v_x + v_ξ/ε`;
//! the partial `v_x` alone does not reproduce the identity.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::averaging::{integrate_fast, QuadratureConfig};
use crate::potentials::{build_corrector, fourier_phase, CorrectorBundle, TwoScaleFunction};
use crate::{Error, Result};

/// Everything along the diagonal `ξ = x/ε` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeCoefficients {
    pub potential: Complex64,
    pub v: Complex64,
    /// `d/dx v(x, x/ε) = v_x + v_ξ/ε`
    pub dv_total: Complex64,
    pub q: Complex64,
    pub dq: Complex64,
    pub d2q: Complex64,
    pub f: Complex64,
}

impl GaugeCoefficients {
    fn identity() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            potential: zero,
            v: zero,
            dv_total: zero,
            q: Complex64::new(1.0, 0.0),
            dq: zero,
            d2q: zero,
            f: zero,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GaugeData {
    eps: f64,
    corrector: CorrectorBundle,
}

/// Wires `q̃`, its derivatives and `f̃` to the corrector of `potential`.
///
/// Rejects `ε` for which `ε²·sup|v| ≥ 1/2`, so `q̃` stays safely invertible.
pub fn build_gauge(potential: &TwoScaleFunction, eps: f64) -> Result<GaugeData> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
    }
    let corrector = build_corrector(potential)?;
    let bound = eps * eps * corrector.sup_bound();
    if bound >= 0.5 {
        return Err(Error::GaugeNotInvertible { eps, bound });
    }
    Ok(GaugeData { eps, corrector })
}

impl GaugeData {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn corrector(&self) -> &CorrectorBundle {
        &self.corrector
    }

    pub fn potential(&self) -> &TwoScaleFunction {
        self.corrector.potential()
    }

    pub fn support(&self) -> (f64, f64) {
        self.potential().support_hull()
    }

    /// One pass over the modes of `v` and `V` at `(x, x/ε)`.
    pub fn coefficients(&self, x: f64) -> GaugeCoefficients {
        let (a, b) = self.support();
        if self.potential().is_zero() || x < a || x > b {
            return GaugeCoefficients::identity();
        }
        let eps = self.eps;
        let xi = x / eps;
        let zero = Complex64::new(0.0, 0.0);
        let (mut v, mut v_xi, mut v_x, mut v_xx, mut v_xxi) = (zero, zero, zero, zero, zero);
        for (&n, profile) in self.corrector.v().modes() {
            let [c, dc, ddc] = profile.jet(x);
            let e = fourier_phase(n, xi);
            let k = Complex64::new(0.0, 2.0 * PI * n as f64);
            v += c * e;
            v_xi += c * k * e;
            v_x += dc * e;
            v_xx += ddc * e;
            v_xxi += dc * k * e;
        }
        let potential = self.potential().eval(x, xi);
        let dv_total = v_x + v_xi / eps;
        GaugeCoefficients {
            potential,
            v,
            dv_total,
            q: 1.0 + eps * eps * v,
            dq: eps * eps * dv_total,
            d2q: eps * eps * v_xx + 2.0 * eps * v_xxi + potential,
            f: eps * potential * v - eps * v_xx - 2.0 * v_xxi,
        }
    }

    pub fn q(&self, x: f64) -> Complex64 {
        self.coefficients(x).q
    }

    pub fn f(&self, x: f64) -> Complex64 {
        self.coefficients(x).f
    }

    /// `L_ε[1](x) = −f̃/q̃`.
    pub fn l_of_one(&self, x: f64) -> Complex64 {
        let c = self.coefficients(x);
        -c.f / c.q
    }

    /// `(L_ε φ)(x)` from the value and first derivative of `φ`.
    pub fn apply_l_at(&self, x: f64, phi: Complex64, dphi: Complex64) -> Complex64 {
        let (a, b) = self.support();
        if x < a || x > b {
            return Complex64::new(0.0, 0.0);
        }
        let c = self.coefficients(x);
        self.eps * 2.0 * c.dv_total * dphi / c.q - c.f * phi / c.q
    }

    fn check_grid(&self, grid: &SampleGrid) -> Result<()> {
        let required = self.eps / 20.0;
        if grid.step() > required {
            return Err(Error::UnderResolved {
                step: grid.step(),
                required,
            });
        }
        Ok(())
    }
}

/// Closed-form scalar test functions with exact first and second derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Constant,
    /// `((x−c)/w)^degree · exp(−((x−c)/w)²)`; `degree = 0` is a plain Gaussian.
    PolyGaussian { center: f64, width: f64, degree: u32 },
    /// `sin(2π·frequency·x + phase)`
    Sinusoid { frequency: f64, phase: f64 },
    Combination(Vec<(Complex64, TestFunction)>),
}

impl TestFunction {
    pub fn gaussian(center: f64, width: f64) -> Self {
        Self::PolyGaussian {
            center,
            width,
            degree: 0,
        }
    }

    pub fn jet(&self, x: f64) -> [Complex64; 3] {
        let real = |[a, b, c]: [f64; 3]| [a, b, c].map(|v| Complex64::new(v, 0.0));
        match self {
            Self::Constant => real([1.0, 0.0, 0.0]),
            Self::PolyGaussian {
                center,
                width,
                degree,
            } => {
                let s = (x - center) / width;
                let k = *degree as i32;
                let kf = k as f64;
                let g = (-s * s).exp();
                let pw = |m: i32| if m < 0 { 0.0 } else { s.powi(m) };
                let f = pw(k) * g;
                let df = (kf * pw(k - 1) - 2.0 * pw(k + 1)) * g;
                let ddf = (kf * (kf - 1.0) * pw(k - 2) - (4.0 * kf + 2.0) * pw(k) + 4.0 * pw(k + 2)) * g;
                real([f, df / width, ddf / (width * width)])
            }
            Self::Sinusoid { frequency, phase } => {
                let w = 2.0 * PI * frequency;
                let (s, c) = (w * x + phase).sin_cos();
                real([s, w * c, -w * w * s])
            }
            Self::Combination(terms) => {
                let zero = Complex64::new(0.0, 0.0);
                terms.iter().fold([zero; 3], |acc, (coef, f)| {
                    let j = f.jet(x);
                    [acc[0] + coef * j[0], acc[1] + coef * j[1], acc[2] + coef * j[2]]
                })
            }
        }
    }
}

/// Ten fixed test functions centred on and around `[a, b]`.
pub fn default_catalog(a: f64, b: f64) -> Vec<TestFunction> {
    let len = b - a;
    let at = |t: f64| a + t * len;
    vec![
        TestFunction::Constant,
        TestFunction::gaussian(at(0.5), 0.3 * len),
        TestFunction::gaussian(at(0.2), 0.1 * len),
        TestFunction::gaussian(at(1.1), 0.5 * len),
        TestFunction::PolyGaussian { center: at(0.5), width: 0.4 * len, degree: 1 },
        TestFunction::PolyGaussian { center: at(0.3), width: 0.25 * len, degree: 2 },
        TestFunction::PolyGaussian { center: at(0.7), width: 0.6 * len, degree: 3 },
        TestFunction::Sinusoid { frequency: 1.0 / len, phase: 0.3 },
        TestFunction::Sinusoid { frequency: 2.5 / len, phase: 1.1 },
        TestFunction::Combination(vec![
            (Complex64::new(1.0, 0.5), TestFunction::gaussian(at(0.4), 0.2 * len)),
            (Complex64::new(-0.3, 0.0), TestFunction::Sinusoid { frequency: 0.5 / len, phase: 0.0 }),
        ]),
    ]
}

/// `count` randomly placed test functions drawn from a seeded generator.
pub fn random_catalog(a: f64, b: f64, count: usize, seed: u64) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = b - a;
    (0..count)
        .map(|i| match i % 3 {
            0 => TestFunction::gaussian(a + rng.gen_range(-0.2..1.2) * len, rng.gen_range(0.1..0.8) * len),
            1 => TestFunction::PolyGaussian {
                center: a + rng.gen_range(0.0..1.0) * len,
                width: rng.gen_range(0.15..0.8) * len,
                degree: rng.gen_range(1..=3),
            },
            _ => TestFunction::Sinusoid {
                frequency: rng.gen_range(0.2..3.0) / len,
                phase: rng.gen_range(0.0..2.0 * PI),
            },
        })
        .collect()
}

/// Uniform sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    points: Vec<f64>,
    step: f64,
}

impl SampleGrid {
    pub fn uniform(a: f64, b: f64, intervals: usize) -> Self {
        assert!(intervals >= 1 && b > a);
        let step = (b - a) / intervals as f64;
        let points = (0..=intervals)
            .map(|i| if i == intervals { b } else { a + i as f64 * step })
            .collect();
        Self { points, step }
    }

    /// Uniform grid on `[a, b]` with `points_per_period` points per fast period.
    pub fn resolving(a: f64, b: f64, eps: f64, points_per_period: usize) -> Self {
        let intervals = ((b - a) * points_per_period as f64 / eps).ceil() as usize;
        Self::uniform(a, b, intervals.max(1))
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn step(&self) -> f64 {
        self.step
    }
}

/// `L_ε φ` sampled on the grid; exactly zero outside the support.
pub fn apply_l(g: &GaugeData, phi: &TestFunction, grid: &SampleGrid) -> Result<Vec<Complex64>> {
    g.check_grid(grid)?;
    Ok(grid
        .points()
        .iter()
        .map(|&x| {
            let [p, dp, _] = phi.jet(x);
            g.apply_l_at(x, p, dp)
        })
        .collect())
}

/// `sup |H_ε(q̃φ) − q̃·(H₀φ − εL_εφ)| / (1 + |φ| + |φ″|)` over the grid.
pub fn identity_residual(g: &GaugeData, phi: &TestFunction, grid: &SampleGrid) -> Result<f64> {
    g.check_grid(grid)?;
    let eps = g.eps();
    Ok(grid
        .points()
        .iter()
        .map(|&x| {
            let c = g.coefficients(x);
            let [p, dp, ddp] = phi.jet(x);
            let qp = c.q * p;
            let d2_qp = c.d2q * p + 2.0 * c.dq * dp + c.q * ddp;
            let lhs = -d2_qp + c.potential * qp;
            let l_phi = g.apply_l_at(x, p, dp);
            let rhs = c.q * (-ddp - eps * l_phi);
            (lhs - rhs).norm() / (1.0 + p.norm() + ddp.norm())
        })
        .fold(0.0, f64::max))
}

/// `max_φ ‖L_εφ‖_{L₂} / ‖φ‖_{W₂²(M)}` over the catalog.
pub fn l_bound_sample(g: &GaugeData, catalog: &[TestFunction]) -> Result<f64> {
    if g.potential().is_zero() {
        return Ok(0.0);
    }
    let cfg = QuadratureConfig::default();
    let u = g.potential();
    let mut best: f64 = 0.0;
    for phi in catalog {
        let l_norm2 = integrate_fast(u, g.eps(), &cfg, |x| {
            let [p, dp, _] = phi.jet(x);
            Complex64::new(g.apply_l_at(x, p, dp).norm_sqr(), 0.0)
        })?;
        let w_norm2 = integrate_fast(u, g.eps(), &cfg, |x| {
            let [p, dp, ddp] = phi.jet(x);
            Complex64::new(p.norm_sqr() + dp.norm_sqr() + ddp.norm_sqr(), 0.0)
        })?;
        if w_norm2.re > 0.0 {
            best = best.max((l_norm2.re / w_norm2.re).sqrt());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{canonical_potential, SlowProfile};

    #[test]
    fn zero_potential_is_identity_gauge() {
        let g = build_gauge(&TwoScaleFunction::zero(), 0.1).unwrap();
        for x in [-1.0, 0.0, 0.4, 2.0] {
            assert_eq!(g.q(x), Complex64::new(1.0, 0.0));
            assert_eq!(g.f(x), Complex64::new(0.0, 0.0));
        }
        let grid = SampleGrid::resolving(-0.5, 1.5, 0.1, 40);
        let out = apply_l(&g, &TestFunction::gaussian(0.3, 0.2), &grid).unwrap();
        assert!(out.iter().all(|z| z.norm() == 0.0));
        assert_eq!(identity_residual(&g, &TestFunction::gaussian(0.3, 0.2), &grid).unwrap(), 0.0);
        assert_eq!(l_bound_sample(&g, &default_catalog(0.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn q_deviation_bounded_by_explicit_corrector() {
        let eps = 0.1;
        let g = build_gauge(&canonical_potential(), eps).unwrap();
        let bound = eps * eps * (100.0 / 16.0) / (4.0 * PI * PI);
        let grid = SampleGrid::resolving(0.0, 1.0, eps, 50);
        let max_dev = grid.points().iter().map(|&x| (g.q(x) - 1.0).norm()).fold(0.0, f64::max);
        assert!(max_dev <= bound * (1.0 + 1e-12), "{max_dev} vs {bound}");
        assert!(max_dev > 0.9 * bound);
    }

    #[test]
    fn q_second_derivative_matches_finite_differences() {
        let eps = 0.1;
        let g = build_gauge(&canonical_potential(), eps).unwrap();
        for x in [0.23, 0.5, 0.71] {
            let mut errs = Vec::new();
            for h in [1e-4, 5e-5] {
                let fd = (g.q(x + h) - 2.0 * g.q(x) + g.q(x - h)) / (h * h);
                errs.push((fd - g.coefficients(x).d2q).norm());
                let fd1 = (g.q(x + h) - g.q(x - h)) / (2.0 * h);
                assert!((fd1 - g.coefficients(x).dq).norm() < 1e-6);
            }
            assert!(errs[0] < 1e-3 && errs[1] < errs[0], "{errs:?}");
        }
    }

    #[test]
    fn rejects_large_eps() {
        assert!(matches!(
            build_gauge(&canonical_potential(), 5.0),
            Err(Error::GaugeNotInvertible { .. })
        ));
    }

    #[test]
    fn constant_maps_to_minus_f_over_q() {
        let g = build_gauge(&canonical_potential(), 0.05).unwrap();
        let grid = SampleGrid::resolving(0.0, 1.0, 0.05, 20);
        let out = apply_l(&g, &TestFunction::Constant, &grid).unwrap();
        for (&x, y) in grid.points().iter().zip(&out) {
            assert!((y - g.l_of_one(x)).norm() < 1e-15);
        }
    }

    #[test]
    fn apply_l_is_linear() {
        let g = build_gauge(&canonical_potential(), 0.1).unwrap();
        let grid = SampleGrid::resolving(-0.2, 1.2, 0.1, 20);
        let f1 = TestFunction::gaussian(0.4, 0.2);
        let f2 = TestFunction::Sinusoid { frequency: 1.5, phase: 0.2 };
        let (al, be) = (Complex64::new(2.0, -1.0), Complex64::new(0.5, 3.0));
        let combo = TestFunction::Combination(vec![(al, f1.clone()), (be, f2.clone())]);
        let l1 = apply_l(&g, &f1, &grid).unwrap();
        let l2 = apply_l(&g, &f2, &grid).unwrap();
        let lc = apply_l(&g, &combo, &grid).unwrap();
        for i in 0..lc.len() {
            assert!((lc[i] - (al * l1[i] + be * l2[i])).norm() < 1e-12 * (1.0 + lc[i].norm()));
        }
    }

    #[test]
    fn outside_support_is_exactly_zero() {
        let g = build_gauge(&canonical_potential(), 0.1).unwrap();
        let grid = SampleGrid::resolving(-1.0, 2.0, 0.1, 25);
        let out = apply_l(&g, &TestFunction::gaussian(0.5, 1.0), &grid).unwrap();
        for (&x, y) in grid.points().iter().zip(&out) {
            if !(0.0..=1.0).contains(&x) {
                assert!(y.re == 0.0 && y.im == 0.0);
            }
        }
    }

    #[test]
    fn under_resolved_grid_rejected() {
        let g = build_gauge(&canonical_potential(), 0.1).unwrap();
        let grid = SampleGrid::uniform(0.0, 1.0, 100);
        assert!(matches!(
            apply_l(&g, &TestFunction::Constant, &grid),
            Err(Error::UnderResolved { .. })
        ));
        assert!(identity_residual(&g, &TestFunction::Constant, &grid).is_err());
    }

    #[test]
    fn f_matches_alternative_expansion() {
        // ε·f̃ = V·q̃ − q̃″
        let eps = 0.07;
        let pot = TwoScaleFunction::from_modes([
            (1, SlowProfile::polynomial_bump(Complex64::new(30.0, 5.0), 3, 0.0, 1.0)),
            (-2, SlowProfile::smooth_bump(4.0, 0.2, 0.9)),
        ])
        .unwrap();
        let g = build_gauge(&pot, eps).unwrap();
        for j in 0..50 {
            let x = j as f64 / 49.0;
            let c = g.coefficients(x);
            let lhs = eps * c.f;
            let rhs = c.potential * c.q - c.d2q;
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + c.potential.norm()));
        }
    }

    #[test]
    fn test_function_derivatives() {
        for phi in default_catalog(0.0, 1.0) {
            for x in [0.1, 0.45, 0.8] {
                let h = 1e-4;
                let fd1 = (phi.jet(x + h)[0] - phi.jet(x - h)[0]) / (2.0 * h);
                let fd2 = (phi.jet(x + h)[0] - 2.0 * phi.jet(x)[0] + phi.jet(x - h)[0]) / (h * h);
                assert!((fd1 - phi.jet(x)[1]).norm() < 1e-5 * (1.0 + phi.jet(x)[1].norm()), "{phi:?}");
                assert!((fd2 - phi.jet(x)[2]).norm() < 1e-3 * (1.0 + phi.jet(x)[2].norm()), "{phi:?}");
            }
        }
    }

    #[test]
    fn bound_ratio_is_scale_invariant() {
        let g = build_gauge(&canonical_potential(), 0.1).unwrap();
        let phi = TestFunction::gaussian(0.5, 0.3);
        let scaled = TestFunction::Combination(vec![(Complex64::new(10.0, 0.0), phi.clone())]);
        let a = l_bound_sample(&g, &[phi]).unwrap();
        let b = l_bound_sample(&g, &[scaled]).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn random_catalog_is_seeded() {
        assert_eq!(random_catalog(0.0, 1.0, 6, 7), random_catalog(0.0, 1.0, 6, 7));
        assert_ne!(random_catalog(0.0, 1.0, 6, 7), random_catalog(0.0, 1.0, 6, 8));
    }
}
