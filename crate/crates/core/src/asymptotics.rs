//! The constant `k₂`, the existence classification it drives, the leading-order
//! eigenvalue predictor `λ(ε) ≈ −ε⁴k₂²`, and the `k_ε` chain built from the
//! gauge-transformed operator.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::averaging::QuadratureConfig;
use crate::gauge::build_gauge;
use crate::potentials::{beta_symmetric, ProfileKind, TwoScaleFunction};
use crate::quadrature::{self, CompensatedSum, GaussLegendre};
use crate::{Error, Result};

/// Whether an eigenvalue emerges from the edge of the essential spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Existence {
    /// `Re k₂ > 0`: a unique, simple eigenvalue tends to zero.
    Exists,
    /// `Re k₂ < 0`: no eigenvalue tends to zero.
    Absent,
    /// `Re k₂` within the degeneracy tolerance of zero; not decided.
    Inconclusive,
}

impl fmt::Display for Existence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exists => "Exists",
            Self::Absent => "Absent",
            Self::Inconclusive => "Inconclusive",
        })
    }
}

impl FromStr for Existence {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "Exists" => Ok(Self::Exists),
            "Absent" => Ok(Self::Absent),
            "Inconclusive" => Ok(Self::Inconclusive),
            other => Err(format!("unknown verdict {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct K2Report {
    pub value: Complex64,
    pub by_quadrature: Complex64,
    /// `None` when some mode pair has no Beta closed form.
    pub by_closed_form: Option<Complex64>,
    /// `|quadrature − closed form| / |value|`; zero when no closed form exists.
    pub agreement: f64,
    /// Set when `agreement` exceeds the requested tolerance.
    pub flagged: bool,
    pub classification: Existence,
    pub degeneracy_tol: f64,
}

const TINY: f64 = 1e-300;

/// `k₂ = ½∫⟨(P[V](x,·))²⟩dx`, computed two ways.
///
/// `⟨(P[V])²⟩ = Σ_n P_n P_{−n}` is taken in mode space, so no ξ-quadrature is
/// involved. Note that this is the square, not the squared modulus: complex
/// potentials give complex `k₂`.
pub fn compute_k2(potential: &TwoScaleFunction, tol: f64) -> Result<K2Report> {
    let p = potential.p_transform()?;
    let breaks = potential.breakpoints();

    let by_quadrature = integrate_segments(&breaks, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&n, prof) in p.modes() {
            acc += prof.value(x) * p.mode(-n).value(x);
        }
        0.5 * acc
    });

    let mut closed = Some(Complex64::new(0.0, 0.0));
    let mut scale = 0.0;
    for (&n, c_pos) in potential.modes().range(1..) {
        let c_neg = potential.mode(-n);
        let weight = 1.0 / (2.0 * PI * PI * (n * n) as f64);
        scale += 0.5
            * weight
            * integrate_segments(&breaks, |x| {
                Complex64::new(c_pos.value(x).norm() * c_neg.value(x).norm(), 0.0)
            })
            .re;
        if c_neg.is_zero() {
            continue;
        }
        let pair = match (c_pos.kind(), c_neg.kind()) {
            (ProfileKind::PolynomialBump { power: p1 }, ProfileKind::PolynomialBump { power: p2 })
                if c_pos.support() == c_neg.support() =>
            {
                let (a, b) = c_pos.support();
                Some(c_pos.amplitude() * c_neg.amplitude() * (b - a) * beta_symmetric(p1 + p2 + 1))
            }
            _ => None,
        };
        closed = match (closed, pair) {
            (Some(acc), Some(term)) => Some(acc + 0.5 * weight * term),
            _ => None,
        };
    }

    let value = closed.unwrap_or(by_quadrature);
    let agreement = closed
        .map(|c| (by_quadrature - c).norm() / (value.norm() + TINY))
        .unwrap_or(0.0);
    let degeneracy_tol = 1e-12 * scale;
    Ok(K2Report {
        value,
        by_quadrature,
        by_closed_form: closed,
        agreement,
        flagged: agreement > tol,
        classification: classify_existence(value, degeneracy_tol),
        degeneracy_tol,
    })
}

fn integrate_segments<F: Fn(f64) -> Complex64>(breaks: &[f64], f: F) -> Complex64 {
    let mut acc = CompensatedSum::default();
    for w in breaks.windows(2) {
        acc.add(quadrature::adaptive(w[0], w[1], 1e-15, &f));
    }
    acc.value()
}

/// `λ̂(ε) = −ε⁴k₂²`.
pub fn predict_lambda(k2: Complex64, eps: f64) -> Complex64 {
    -eps.powi(4) * k2 * k2
}

pub fn classify_existence(k2: Complex64, degeneracy_tol: f64) -> Existence {
    if k2.re > degeneracy_tol {
        Existence::Exists
    } else if k2.re < -degeneracy_tol {
        Existence::Absent
    } else {
        Existence::Inconclusive
    }
}

/// `m⁽¹⁾`, `m⁽²⁾` and `k_ε = (ε/2)m⁽¹⁾ + (ε²/2)m⁽²⁾` at one `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KEpsReport {
    pub eps: f64,
    pub m1: Complex64,
    pub m2: Complex64,
    pub k_eps: Complex64,
}

/// `m⁽¹⁾ = ∫L_ε[1]dx` and `m⁽²⁾ = ∫L_ε[G]dx` with `G(x) = ∫|x−t|·L_ε[1](t)dt`.
///
/// `L_ε[1] = −f̃/q̃` since the derivative term annihilates constants.
/// `G` and `G′` come from running integrals `C(x) = ∫_{x₀}^x L_ε[1]` and
/// `D(x) = ∫_{x₀}^x t·L_ε[1]`:
/// `G = 2xC − 2D + D(x₁) − xC(x₁)`, `G′ = 2C − C(x₁)`.
pub fn compute_k_eps(
    potential: &TwoScaleFunction,
    eps: f64,
    cfg: &QuadratureConfig,
) -> Result<KEpsReport> {
    let gauge = build_gauge(potential, eps)?;
    let zero = Complex64::new(0.0, 0.0);
    let breaks = potential.breakpoints();
    if breaks.len() < 2 {
        return Ok(KEpsReport { eps, m1: zero, m2: zero, k_eps: zero });
    }
    let panels = cfg.panels(&breaks, eps)?;
    let rule = GaussLegendre::new(cfg.nodes_per_panel);

    struct Node {
        x: f64,
        w: f64,
        l1: Complex64,
        drift: Complex64,
        c: Complex64,
        d: Complex64,
    }

    let mut nodes = Vec::with_capacity(panels.len() * rule.len());
    let mut c_run = CompensatedSum::default();
    let mut d_run = CompensatedSum::default();
    for &(a, b) in &panels {
        let (c0, d0) = (c_run.value(), d_run.value());
        for (x, w) in rule.mapped(a, b) {
            let coef = gauge.coefficients(x);
            let l1 = -coef.f / coef.q;
            let mut c_in = CompensatedSum::default();
            let mut d_in = CompensatedSum::default();
            for (t, wt) in rule.mapped(a, x) {
                let l1t = gauge.l_of_one(t);
                c_in.add(l1t * wt);
                d_in.add(l1t * t * wt);
            }
            nodes.push(Node {
                x,
                w,
                l1,
                drift: 2.0 * eps * coef.dv_total / coef.q,
                c: c0 + c_in.value(),
                d: d0 + d_in.value(),
            });
            c_run.add(l1 * w);
            d_run.add(l1 * x * w);
        }
    }
    let (c_total, d_total) = (c_run.value(), d_run.value());

    let mut m2 = CompensatedSum::default();
    for n in &nodes {
        let g = 2.0 * n.x * n.c - 2.0 * n.d + d_total - n.x * c_total;
        let dg = 2.0 * n.c - c_total;
        m2.add((n.drift * dg + n.l1 * g) * n.w);
    }
    let m1 = c_total;
    let m2 = m2.value();
    Ok(KEpsReport {
        eps,
        m1,
        m2,
        k_eps: 0.5 * eps * m1 + 0.5 * eps * eps * m2,
    })
}

/// `k_ε` over a sequence of `ε`, fitted by least squares to
/// `εc₁ + ε²c₂ + ε³c₃ + ε⁴c₄`.
///
/// The `ε³`, `ε⁴` columns are nuisance terms that soak up the remainder so it
/// does not leak into `c₁`, `c₂`. They are included as far as the data allows
/// while leaving one degree of freedom: 3 values fit `c₁, c₂`; 4 values add
/// `c₃`; 5 or more add `c₄`.
#[derive(Debug, Clone, PartialEq)]
pub struct KEpsChain {
    pub reports: Vec<KEpsReport>,
    pub c1: Complex64,
    pub c2: Complex64,
    /// Coefficients of `ε³, ε⁴, …` actually fitted.
    pub higher: Vec<Complex64>,
}

pub fn fit_k_eps(
    potential: &TwoScaleFunction,
    epsilons: &[f64],
    cfg: &QuadratureConfig,
) -> Result<KEpsChain> {
    if epsilons.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "the k_ε fit needs at least 3 values of ε, got {}",
            epsilons.len()
        )));
    }
    let reports = epsilons
        .iter()
        .map(|&e| compute_k_eps(potential, e, cfg))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<Complex64> = reports.iter().map(|r| r.k_eps).collect();
    let terms = (epsilons.len() - 1).min(4) as i32;
    let powers: Vec<i32> = (1..=terms).collect();
    let c = fit_powers(epsilons, &values, &powers);
    Ok(KEpsChain {
        reports,
        c1: c[0],
        c2: c[1],
        higher: c[2..].to_vec(),
    })
}

/// Least-squares coefficients of `Σ_j c_j·ε^{p_j}` (real basis, complex data),
/// with columns rescaled to unit norm before solving the normal equations.
pub fn fit_powers(epsilons: &[f64], values: &[Complex64], powers: &[i32]) -> Vec<Complex64> {
    let m = powers.len();
    let cols: Vec<Vec<f64>> = powers
        .iter()
        .map(|&p| epsilons.iter().map(|e| e.powi(p)).collect())
        .collect();
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let mut a = vec![vec![0.0; m]; m];
    let mut rhs = vec![Complex64::new(0.0, 0.0); m];
    for i in 0..m {
        for j in 0..m {
            a[i][j] = cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum::<f64>() / (norms[i] * norms[j]);
        }
        rhs[i] = cols[i].iter().zip(values).map(|(x, v)| v * *x).sum::<Complex64>() / norms[i];
    }
    let sol = solve_dense(a, rhs);
    sol.into_iter().zip(&norms).map(|(s, n)| s / *n).collect()
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (top, bottom) = a.split_at_mut(row);
            for (t, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *t -= f * p;
            }
            let bc = b[col];
            b[row] -= bc * f;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= x[k] * a[row][k];
        }
        x[row] = s / a[row][row];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{canonical_potential, SlowProfile};

    #[test]
    fn canonical_k2_closed_form() {
        let r = compute_k2(&canonical_potential(), 1e-10).unwrap();
        let expected = 1e4 / (10080.0 * PI * PI);
        assert!((r.value.re - expected).abs() < 1e-14 * expected);
        assert!((r.value.re - 1.0052e-1).abs() < 1e-5);
        assert!(r.agreement < 1e-10, "{r:?}");
        assert!(!r.flagged);
        assert_eq!(r.classification, Existence::Exists);
    }

    #[test]
    fn imaginary_potential_negates_k2() {
        let v = canonical_potential();
        let a = compute_k2(&v, 1e-10).unwrap();
        let b = compute_k2(&v.scaled(Complex64::new(0.0, 1.0)), 1e-10).unwrap();
        assert!((a.value + b.value).norm() < 1e-14);
        assert_eq!(b.classification, Existence::Absent);
    }

    #[test]
    fn zero_potential_is_inconclusive() {
        let r = compute_k2(&TwoScaleFunction::zero(), 1e-10).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
        assert_eq!(r.classification, Existence::Inconclusive);
    }

    #[test]
    fn rejects_nonzero_mean() {
        let v = TwoScaleFunction::from_modes([(0, SlowProfile::smooth_bump(1.0, 0.0, 1.0))]).unwrap();
        assert!(matches!(compute_k2(&v, 1e-10), Err(Error::NonZeroMean)));
    }

    #[test]
    fn smooth_profiles_fall_back_to_quadrature() {
        let v = TwoScaleFunction::cosine(2, SlowProfile::smooth_bump(3.0, 0.0, 1.0));
        let r = compute_k2(&v, 1e-10).unwrap();
        assert!(r.by_closed_form.is_none());
        assert_eq!(r.value, r.by_quadrature);
        assert!(r.value.re > 0.0);
    }

    #[test]
    fn predictor_values() {
        assert!((predict_lambda(Complex64::new(0.5, 0.0), 0.1).re + 2.5e-5).abs() < 1e-14 * 2.5e-5);
        let k2 = 1e4 / (10080.0 * PI * PI);
        let l = predict_lambda(Complex64::new(k2, 0.0), 0.1);
        assert!((l.re + 1.0104e-6).abs() < 1e-10);
        assert_eq!(predict_lambda(Complex64::new(0.0, 0.0), 0.3), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn classification() {
        assert_eq!(classify_existence(Complex64::new(0.1, 0.0), 1e-12), Existence::Exists);
        assert_eq!(classify_existence(Complex64::new(-0.1, 0.0), 1e-12), Existence::Absent);
        assert_eq!(classify_existence(Complex64::new(0.0, 0.3), 1e-12), Existence::Inconclusive);
    }

    #[test]
    fn zero_potential_k_eps() {
        let r = compute_k_eps(&TwoScaleFunction::zero(), 0.1, &QuadratureConfig::default()).unwrap();
        assert_eq!(r.m1, Complex64::new(0.0, 0.0));
        assert_eq!(r.m2, Complex64::new(0.0, 0.0));
        assert_eq!(r.k_eps, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn fit_recovers_exact_polynomial() {
        let eps = [0.1, 0.05, 0.025, 0.0125];
        let (c1, c2, c3) = (Complex64::new(0.3, -0.1), Complex64::new(2.0, 1.0), Complex64::new(-5.0, 0.0));
        let vals: Vec<Complex64> = eps.iter().map(|&e| c1 * e + c2 * e * e + c3 * e * e * e).collect();
        let c = fit_powers(&eps, &vals, &[1, 2, 3]);
        assert!((c[0] - c1).norm() < 1e-10);
        assert!((c[1] - c2).norm() < 1e-9);
        assert!((c[2] - c3).norm() < 1e-7);
    }
}
