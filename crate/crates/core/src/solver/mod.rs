//! Direct search for the bound state of `H_ε = −d²/dx² + V(x, x/ε)` near the
//! spectral edge.
//!
//! With `λ = −κ²`, `Re κ > 0`, a decaying solution is `e^{κ(x−x₀)}` left of the
//! support, so `(u, u′)(x₀) = (1, κ)`. After propagating across the support
//! with the transfer matrix, the right tail `e^{−κx}` requires
//! `u′(x₁) + κu(x₁) = 0`. The potential vanishes outside the support, so the
//! tails are exact and only `[x₀, x₁]` is integrated.

use num_complex::Complex64;

mod convergence;
mod eigenfunction;
mod propagate;
mod roots;

pub use convergence::{convergence_study, ConvergenceStudy};
pub use eigenfunction::{eigenfunction, Eigenfunction, MATCH_TOLERANCE};
pub use propagate::{mismatch, transfer_matrix, transfer_matrix_on, Propagator, TransferMatrix};
pub use roots::{
    find_bound_state, min_mismatch_on_disk, scan_roots, AbsenceReport, BoundStateOutcome,
    BoundStateQuery, DiskScan, RootScan,
};

use crate::{Error, Result};

pub const MIN_POINTS_PER_PERIOD: usize = 20;

/// Which equation is integrated across the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Formulation {
    /// `φ″ = (V − λ)φ`.
    #[default]
    Direct,
    /// `ψ = φ/q̃`, integrating `(H₀ − εL_ε)ψ = λψ`. Zero-mean potentials only.
    Gauged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub points_per_fast_period: usize,
    /// On `|F|`.
    pub root_tol: f64,
    /// Roots with `Re κ ≤ kappa_floor` are not accepted.
    pub kappa_floor: f64,
    pub scan_window: (f64, f64),
    pub scan_samples: usize,
    pub max_iter: usize,
    pub formulation: Formulation,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            points_per_fast_period: 400,
            root_tol: 1e-13,
            kappa_floor: 1e-9,
            scan_window: (1e-6, 0.5),
            scan_samples: 2000,
            max_iter: 200,
            formulation: Formulation::Direct,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_fast_period < MIN_POINTS_PER_PERIOD {
            return Err(Error::InvalidArgument(format!(
                "points_per_fast_period = {} is below the minimum {MIN_POINTS_PER_PERIOD}",
                self.points_per_fast_period
            )));
        }
        Ok(())
    }

    pub fn with_points_per_period(&self, points: usize) -> Self {
        Self {
            points_per_fast_period: points,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundStateResult {
    pub kappa: Complex64,
    /// Always `−κ²`.
    pub lambda: Complex64,
    pub mismatch_residual: f64,
    pub iterations: usize,
    pub step: f64,
    pub converged: bool,
}

impl BoundStateResult {
    pub fn new(kappa: Complex64, mismatch_residual: f64, iterations: usize, step: f64, converged: bool) -> Self {
        Self {
            kappa,
            lambda: -kappa * kappa,
            mismatch_residual,
            iterations,
            step,
            converged,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::compute_k2;
    use crate::potentials::{canonical_potential, SlowProfile, TwoScaleFunction};

    const W0: f64 = 5.0;

    /// `V = −W₀` on `[0, 1]` as a single mean mode.
    fn finite_well() -> TwoScaleFunction {
        TwoScaleFunction::from_modes([(0, SlowProfile::polynomial_bump(-W0, 0, 0.0, 1.0))]).unwrap()
    }

    /// Even ground state: `k·tan(k/2) = κ`, `k² + κ² = W₀`.
    fn finite_well_kappa() -> f64 {
        let g = |kap: f64| {
            let k = (W0 - kap * kap).sqrt();
            k * (k / 2.0).tan() - kap
        };
        let (mut lo, mut hi) = (1e-6, W0.sqrt() - 1e-9);
        assert!(g(lo) < 0.0 && g(hi) > 0.0 || g(lo) > 0.0 && g(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid).signum() == g(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn canonical_query() -> BoundStateQuery {
        BoundStateQuery::from_k2(compute_k2(&canonical_potential(), 1e-12).unwrap().value)
    }

    #[test]
    fn finite_well_matches_transcendental_equation() {
        let want = finite_well_kappa();
        let out = find_bound_state(&finite_well(), 0.1, &BoundStateQuery::bracket(0.5, 2.2), &SolverConfig::default()).unwrap();
        let r = out.found().expect("root");
        assert!((r.kappa.re - want).abs() <= 1e-8 * want, "{} vs {want}", r.kappa.re);
        assert!(r.converged);
    }

    #[test]
    fn canonical_potential_has_a_tiny_bound_state() {
        let out = find_bound_state(&canonical_potential(), 0.1, &canonical_query(), &SolverConfig::default()).unwrap();
        let r = out.found().expect("root");
        assert!(r.converged, "{r:?}");
        assert!(r.lambda.re < 0.0 && r.lambda.re > -1e-5, "{r:?}");
        assert!(r.lambda.im.abs() <= 1e-12 * r.lambda.norm());
    }

    #[test]
    fn imaginary_potential_has_no_bound_state() {
        let v = canonical_potential().scaled(Complex64::new(0.0, 1.0));
        let k2 = compute_k2(&v, 1e-12).unwrap().value;
        assert!(k2.re < 0.0);
        let out = find_bound_state(&v, 0.1, &BoundStateQuery::from_k2(k2), &SolverConfig::default()).unwrap();
        assert!(out.is_absent(), "{out:?}");
    }

    #[test]
    fn zero_potential_has_no_bound_state() {
        let out = find_bound_state(&TwoScaleFunction::zero(), 0.1, &BoundStateQuery::default(), &SolverConfig::default()).unwrap();
        assert!(out.is_absent());
    }

    #[test]
    fn scan_finds_exactly_one_root() {
        let v = canonical_potential();
        let cfg = SolverConfig::default();
        let a = scan_roots(&v, 0.1, (1e-5, 0.5), cfg.scan_samples, &cfg).unwrap();
        let b = scan_roots(&v, 0.1, (1e-5, 0.5), 2 * cfg.scan_samples, &cfg).unwrap();
        assert_eq!(a.count(), 1, "{a:?}");
        assert_eq!(b.count(), 1);
    }

    #[test]
    fn gauged_formulation_agrees() {
        let v = canonical_potential();
        let q = canonical_query();
        let direct = find_bound_state(&v, 0.1, &q, &SolverConfig::default()).unwrap();
        let gauged = find_bound_state(
            &v,
            0.1,
            &q,
            &SolverConfig {
                formulation: Formulation::Gauged,
                ..Default::default()
            },
        )
        .unwrap();
        let (a, b) = (direct.found().unwrap().lambda, gauged.found().unwrap().lambda);
        assert!((a - b).norm() <= 1e-8 * a.norm(), "{a} vs {b}");
    }

    #[test]
    fn step_refinement_is_invisible() {
        let v = canonical_potential();
        let q = canonical_query();
        let cfg = SolverConfig::default();
        let a = find_bound_state(&v, 0.1, &q, &cfg).unwrap();
        let b = find_bound_state(&v, 0.1, &q, &cfg.with_points_per_period(2 * cfg.points_per_fast_period)).unwrap();
        let (a, b) = (a.found().unwrap().lambda, b.found().unwrap().lambda);
        assert!((a - b).norm() <= 1e-8 * a.norm(), "{a} vs {b}");
    }

    #[test]
    fn rejects_coarse_configs() {
        assert!(SolverConfig::default().with_points_per_period(10).validate().is_err());
        assert!(SolverConfig::default().validate().is_ok());
    }

    #[test]
    fn finite_well_eigenfunction_matches_closed_form() {
        let kap = finite_well_kappa();
        let k = (W0 - kap * kap).sqrt();
        let ef = eigenfunction(&finite_well(), 0.1, Complex64::new(kap, 0.0), 1.0, &SolverConfig::default()).unwrap();
        assert!((ef.l2_norm() - 1.0).abs() < 1e-10);
        // Unnormalized: u = cos(k(x−½))/cos(k/2) inside, e^{−κ|x−½|+κ/2} outside.
        let norm2 = 0.5 * (1.0 + k.sin() / k) / (k / 2.0).cos().powi(2) + 1.0 / kap;
        let c = 1.0 / norm2.sqrt();
        for (&x, u) in ef.x.iter().zip(&ef.u) {
            let exact = if (0.0..=1.0).contains(&x) {
                (k * (x - 0.5)).cos() / (k / 2.0).cos()
            } else {
                (-kap * ((x - 0.5).abs() - 0.5)).exp()
            };
            assert!((u.re - c * exact).abs() < 1e-6, "x = {x}");
        }
        let slope = ef.right_tail_log_slope().unwrap();
        assert!((slope + kap).abs() < 1e-10);
    }

    #[test]
    fn eigenfunction_rejects_non_roots() {
        let err = eigenfunction(&finite_well(), 0.1, Complex64::new(0.3, 0.0), 1.0, &SolverConfig::default());
        assert!(matches!(err, Err(Error::NotARoot { .. })));
    }

    #[test]
    fn rk4_is_fourth_order_on_the_well() {
        let steps = [0.1 / 20.0, 0.1 / 40.0, 0.1 / 80.0];
        let study = convergence_study(
            &finite_well(),
            0.1,
            &steps,
            &BoundStateQuery::bracket(0.5, 2.2),
            &SolverConfig::default(),
        )
        .unwrap();
        assert!((3.5..=4.5).contains(&study.observed_order), "{study:?}");
    }

    #[test]
    fn canonical_step_halving_at_default_step() {
        let eps = 0.1;
        let h = eps / SolverConfig::default().points_per_fast_period as f64;
        let study = convergence_study(
            &canonical_potential(),
            eps,
            &[2.0 * h, h, h / 2.0],
            &canonical_query(),
            &SolverConfig::default(),
        )
        .unwrap();
        let l = study.points[1].1.unwrap();
        let l_half = study.points[2].1.unwrap();
        assert!((l - l_half).norm() <= 1e-6 * l.norm(), "{study:?}");
        assert!(study.error_bar <= 1e-6 * l.norm());
    }

    #[test]
    fn finite_well_is_step_independent_when_resolved() {
        let steps = [0.1 / 400.0, 0.1 / 800.0, 0.1 / 1600.0];
        let study = convergence_study(
            &finite_well(),
            0.1,
            &steps,
            &BoundStateQuery::bracket(0.5, 2.2),
            &SolverConfig::default(),
        )
        .unwrap();
        let l0 = study.points[0].1.unwrap();
        for (_, l) in &study.points {
            assert!((l.unwrap() - l0).norm() <= 1e-12 * l0.norm());
        }
    }

    #[test]
    fn zero_potential_scan_is_empty() {
        let cfg = SolverConfig::default();
        let scan = scan_roots(&TwoScaleFunction::zero(), 0.1, (1e-6, 0.5), 500, &cfg).unwrap();
        assert_eq!(scan.count(), 0);
    }

    #[test]
    fn scan_refuses_complex_potentials() {
        let v = canonical_potential().scaled(Complex64::new(0.0, 1.0));
        let cfg = SolverConfig::default();
        assert!(matches!(scan_roots(&v, 0.1, (1e-6, 0.5), 100, &cfg), Err(Error::ComplexPotential)));
    }

    #[test]
    fn complex_potential_with_positive_re_k2_has_a_root() {
        let v = canonical_potential().scaled(Complex64::new(1.0, 0.3));
        let k2 = compute_k2(&v, 1e-12).unwrap().value;
        assert!(k2.re > 0.0 && k2.im != 0.0);
        let eps = 0.05;
        let out = find_bound_state(&v, eps, &BoundStateQuery::from_k2(k2), &SolverConfig::default()).unwrap();
        let r = out.found().expect("root");
        assert!(r.converged && r.kappa.re > 0.0);
        assert!((r.kappa - eps * eps * k2).norm() <= 0.2 * (eps * eps * k2).norm(), "{r:?}");
    }
}
