use num_complex::Complex64;
use std::f64::consts::PI;

use super::{BoundStateResult, Propagator, SolverConfig};
use crate::potentials::TwoScaleFunction;
use crate::{Error, Result};

/// What the caller knows about where the root is.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundStateQuery {
    /// `k₂`; the initial guess is `κ₀ = ε²k₂`.
    pub k2_hint: Option<Complex64>,
    /// Explicit real κ-bracket, for real potentials (any mean).
    pub bracket: Option<(f64, f64)>,
}

impl BoundStateQuery {
    pub fn from_k2(k2: Complex64) -> Self {
        Self {
            k2_hint: Some(k2),
            bracket: None,
        }
    }

    pub fn bracket(lo: f64, hi: f64) -> Self {
        Self {
            k2_hint: None,
            bracket: Some((lo, hi)),
        }
    }
}

/// Why no admissible root was reported.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsenceReport {
    pub reason: String,
    pub iterations: usize,
    /// Last iterate or best sample, if any.
    pub best_kappa: Option<Complex64>,
    pub best_residual: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundStateOutcome {
    Found(BoundStateResult),
    Absent(AbsenceReport),
}

impl BoundStateOutcome {
    pub fn found(&self) -> Option<&BoundStateResult> {
        match self {
            Self::Found(r) => Some(r),
            Self::Absent(_) => None,
        }
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, Self::Absent(_))
    }
}

/// Locates the eigenvalue near the spectral edge.
///
/// Real potentials bracket a sign change of `F` on the real κ-axis, starting
/// from `[κ₀/10, 10κ₀]` (or the explicit bracket) and widening by decades,
/// then polish with Brent's method. Complex potentials run Newton from
/// `κ₀ = ε²k₂` and accept the limit only inside `Re κ > kappa_floor`.
pub fn find_bound_state(
    potential: &TwoScaleFunction,
    eps: f64,
    query: &BoundStateQuery,
    cfg: &SolverConfig,
) -> Result<BoundStateOutcome> {
    let prop = Propagator::new(potential, eps, cfg)?;
    locate(&prop, potential, eps, query, cfg)
}

pub(crate) fn locate(
    prop: &Propagator,
    potential: &TwoScaleFunction,
    eps: f64,
    query: &BoundStateQuery,
    cfg: &SolverConfig,
) -> Result<BoundStateOutcome> {
    if potential.is_real() {
        real_path(prop, eps, query, cfg)
    } else {
        let k2 = query.k2_hint.ok_or_else(|| {
            Error::InvalidArgument("complex potentials need a k₂ hint for the Newton start".into())
        })?;
        Ok(newton_path(prop, eps * eps * k2, cfg))
    }
}

fn real_f(prop: &Propagator, k: f64) -> f64 {
    prop.mismatch_unchecked(Complex64::new(k, 0.0)).re
}

fn real_path(
    prop: &Propagator,
    eps: f64,
    query: &BoundStateQuery,
    cfg: &SolverConfig,
) -> Result<BoundStateOutcome> {
    let floor = cfg.kappa_floor;
    let absent = |reason: String, iterations, best: Option<f64>, residual| {
        Ok(BoundStateOutcome::Absent(AbsenceReport {
            reason,
            iterations,
            best_kappa: best.map(|k| Complex64::new(k, 0.0)),
            best_residual: residual,
            step: prop.step(),
        }))
    };

    let (mut lo, mut hi, expand) = match (query.bracket, query.k2_hint) {
        (Some((a, b)), _) => {
            if !(a > 0.0 && b > a) {
                return Err(Error::InvalidArgument(format!("bad κ bracket [{a}, {b}]")));
            }
            (a.max(floor), b, false)
        }
        (None, Some(k2)) => {
            let k0 = eps * eps * k2.re;
            if !(k0 > floor) {
                return absent(
                    format!("initial guess κ₀ = ε²·Re k₂ = {k0:e} is not above the κ floor"),
                    0,
                    None,
                    f64::INFINITY,
                );
            }
            ((k0 / 10.0).max(floor), 10.0 * k0, true)
        }
        (None, None) => (cfg.scan_window.0.max(floor), cfg.scan_window.1, false),
    };
    let hi_limit = cfg.scan_window.1.max(hi);

    let mut f_lo = real_f(prop, lo);
    let mut f_hi = real_f(prop, hi);
    let mut widenings = 0;
    while f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
        if !expand || widenings >= 8 || (lo <= floor && hi >= hi_limit) {
            let (best, res) = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
            return absent(
                format!("no sign change of F on [{lo:e}, {hi:e}]"),
                widenings,
                Some(best),
                res.abs(),
            );
        }
        lo = (lo / 10.0).max(floor);
        hi = (hi * 10.0).min(hi_limit);
        f_lo = real_f(prop, lo);
        f_hi = real_f(prop, hi);
        widenings += 1;
    }

    let (root, iterations) = brent(|k| real_f(prop, k), lo, hi, f_lo, f_hi, cfg.root_tol, cfg.max_iter);
    let kappa = Complex64::new(root, 0.0);
    let residual = prop.mismatch_unchecked(kappa).norm();
    Ok(BoundStateOutcome::Found(BoundStateResult::new(
        kappa,
        residual,
        iterations,
        prop.step(),
        residual <= cfg.root_tol && root > floor,
    )))
}

/// Brent's method on a sign-changing bracket; stops when `|f| ≤ ftol` or the
/// bracket collapses to round-off.
pub(crate) fn brent<F: Fn(f64) -> f64>(
    f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    ftol: f64,
    max_iter: usize,
) -> (f64, usize) {
    if fa == 0.0 {
        return (a, 0);
    }
    if fb == 0.0 {
        return (b, 0);
    }
    let (mut c, mut fc) = (a, fa);
    let (mut d, mut e) = (b - a, b - a);
    for iter in 1..=max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs();
        let m = 0.5 * (c - b);
        if fb.abs() <= ftol || m.abs() <= tol {
            return (b, iter);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    (b, max_iter)
}

fn newton_path(prop: &Propagator, k0: Complex64, cfg: &SolverConfig) -> BoundStateOutcome {
    let mut k = k0;
    let mut fk = prop.mismatch_unchecked(k);
    let mut iterations = 0;
    let mut settled = fk.norm() <= cfg.root_tol;
    while !settled && iterations < cfg.max_iter {
        iterations += 1;
        let dk = 1e-6 * k.norm() + 1e-14;
        let df = (prop.mismatch_unchecked(k + dk) - prop.mismatch_unchecked(k - dk)) / (2.0 * dk);
        if df.norm() == 0.0 || !df.is_finite() {
            break;
        }
        let mut step = fk / df;
        // damp steps that jump more than the current scale
        let cap = 0.5 * k.norm().max(1e-12);
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        k -= step;
        fk = prop.mismatch_unchecked(k);
        settled = fk.norm() <= cfg.root_tol || step.norm() <= 4.0 * f64::EPSILON * k.norm();
    }
    let residual = fk.norm();
    let admissible = k.re > cfg.kappa_floor;
    if settled && admissible && residual <= cfg.root_tol {
        return BoundStateOutcome::Found(BoundStateResult::new(k, residual, iterations, prop.step(), true));
    }
    let reason = if !settled {
        format!("Newton did not converge in {iterations} iterations")
    } else if !admissible {
        format!("Newton settled at κ = {k:e}, outside the physical half-plane")
    } else {
        format!("Newton stalled with |F| = {residual:e} above the root tolerance")
    };
    BoundStateOutcome::Absent(AbsenceReport {
        reason,
        iterations,
        best_kappa: Some(k),
        best_residual: residual,
        step: prop.step(),
    })
}

/// Sign-change scan of `F` on the real κ-axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RootScan {
    pub roots: Vec<f64>,
    pub samples: usize,
    pub window: (f64, f64),
}

impl RootScan {
    pub fn count(&self) -> usize {
        self.roots.len()
    }
}

/// Samples `F` at log-spaced κ in `window`, counts sign changes and polishes
/// each with Brent's method.
pub fn scan_roots(
    potential: &TwoScaleFunction,
    eps: f64,
    window: (f64, f64),
    samples: usize,
    cfg: &SolverConfig,
) -> Result<RootScan> {
    if !potential.is_real() {
        return Err(Error::ComplexPotential);
    }
    let (lo, hi) = window;
    if !(lo >= cfg.kappa_floor && hi > lo) || samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "scan window ({lo}, {hi}] with {samples} samples must lie above the κ floor {}",
            cfg.kappa_floor
        )));
    }
    let prop = Propagator::new(potential, eps, cfg)?;
    let ratio = (hi / lo).ln() / (samples - 1) as f64;
    let ks: Vec<f64> = (0..samples)
        .map(|i| if i + 1 == samples { hi } else { lo * (ratio * i as f64).exp() })
        .collect();
    let fs: Vec<f64> = ks.iter().map(|&k| real_f(&prop, k)).collect();
    let mut roots = Vec::new();
    for i in 0..samples - 1 {
        if fs[i] == 0.0 {
            roots.push(ks[i]);
        } else if fs[i].signum() != fs[i + 1].signum() && fs[i + 1] != 0.0 {
            let (r, _) = brent(|k| real_f(&prop, k), ks[i], ks[i + 1], fs[i], fs[i + 1], cfg.root_tol, cfg.max_iter);
            roots.push(r);
        }
    }
    if fs[samples - 1] == 0.0 {
        roots.push(hi);
    }
    Ok(RootScan {
        roots,
        samples,
        window,
    })
}

/// Smallest `|F|` on a polar grid over a disk in the κ-plane, restricted to
/// `Re κ > kappa_floor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskScan {
    pub min_abs_f: f64,
    pub argmin: Option<Complex64>,
    pub evaluated: usize,
}

pub fn min_mismatch_on_disk(
    potential: &TwoScaleFunction,
    eps: f64,
    center: Complex64,
    radius: f64,
    rings: usize,
    rays: usize,
    cfg: &SolverConfig,
) -> Result<DiskScan> {
    let prop = Propagator::new(potential, eps, cfg)?;
    let mut out = DiskScan {
        min_abs_f: f64::INFINITY,
        argmin: None,
        evaluated: 0,
    };
    let mut consider = |k: Complex64| {
        if k.re <= cfg.kappa_floor {
            return;
        }
        let f = prop.mismatch_unchecked(k).norm();
        out.evaluated += 1;
        if f < out.min_abs_f {
            out.min_abs_f = f;
            out.argmin = Some(k);
        }
    };
    consider(center);
    for i in 1..=rings {
        let r = radius * i as f64 / rings as f64;
        for j in 0..rays {
            let th = 2.0 * PI * j as f64 / rays as f64;
            consider(center + Complex64::from_polar(r, th));
        }
    }
    Ok(out)
}
