use num_complex::Complex64;
use std::fmt;

use crate::quadrature;

/// Shape of a slow amplitude `c(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// `[t(1-t)]^power` with `t` the affine map of the support onto `[0, 1]`.
    /// `power = 0` is the indicator of the closed support (a box).
    PolynomialBump { power: u32 },
    /// `exp(1 - 1/(1 - s²))` with `s` the affine map of the support onto `[-1, 1]`.
    SmoothBump,
    Zero,
}

/// A compactly supported amplitude with exact value, first and second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowProfile {
    kind: ProfileKind,
    amplitude: Complex64,
    support: (f64, f64),
}

impl SlowProfile {
    pub fn polynomial_bump(amplitude: impl Into<Complex64>, power: u32, a: f64, b: f64) -> Self {
        assert!(b > a, "support [{a}, {b}] is empty");
        Self {
            kind: ProfileKind::PolynomialBump { power },
            amplitude: amplitude.into(),
            support: (a, b),
        }
    }

    pub fn smooth_bump(amplitude: impl Into<Complex64>, a: f64, b: f64) -> Self {
        assert!(b > a, "support [{a}, {b}] is empty");
        Self {
            kind: ProfileKind::SmoothBump,
            amplitude: amplitude.into(),
            support: (a, b),
        }
    }

    pub fn zero() -> Self {
        Self {
            kind: ProfileKind::Zero,
            amplitude: Complex64::new(0.0, 0.0),
            support: (0.0, 0.0),
        }
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn is_zero(&self) -> bool {
        self.kind == ProfileKind::Zero || self.amplitude == Complex64::new(0.0, 0.0)
    }

    /// Same shape, amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        if self.kind == ProfileKind::Zero {
            return *self;
        }
        Self {
            amplitude: self.amplitude * factor,
            ..*self
        }
    }

    /// True when this profile and `other` differ only in amplitude.
    pub fn same_shape(&self, other: &Self) -> bool {
        self.kind == other.kind && self.support == other.support
    }

    pub fn has_exact_second_derivative(&self) -> bool {
        match self.kind {
            ProfileKind::PolynomialBump { power } => power >= 2,
            ProfileKind::SmoothBump | ProfileKind::Zero => true,
        }
    }

    /// `[c(x), c'(x), c''(x)]`; all zero outside the support.
    pub fn jet(&self, x: f64) -> [Complex64; 3] {
        let zero = Complex64::new(0.0, 0.0);
        let (a, b) = self.support;
        if self.kind == ProfileKind::Zero || x < a || x > b {
            return [zero; 3];
        }
        let len = b - a;
        let [f, df, ddf] = match self.kind {
            ProfileKind::PolynomialBump { power } => poly_jet(power, (x - a) / len, len),
            ProfileKind::SmoothBump => smooth_jet(2.0 * (x - a) / len - 1.0, len),
            ProfileKind::Zero => unreachable!(),
        };
        [self.amplitude * f, self.amplitude * df, self.amplitude * ddf]
    }

    pub fn value(&self, x: f64) -> Complex64 {
        self.jet(x)[0]
    }

    pub fn first_derivative(&self, x: f64) -> Complex64 {
        self.jet(x)[1]
    }

    pub fn second_derivative(&self, x: f64) -> Complex64 {
        self.jet(x)[2]
    }

    /// Derivative of the requested order (0, 1 or 2).
    pub fn derivative(&self, x: f64, order: usize) -> Complex64 {
        self.jet(x)[order]
    }

    /// `sup |c(x)|`.
    pub fn sup_abs(&self) -> f64 {
        match self.kind {
            ProfileKind::PolynomialBump { power } => self.amplitude.norm() * 0.25f64.powi(power as i32),
            ProfileKind::SmoothBump => self.amplitude.norm(),
            ProfileKind::Zero => 0.0,
        }
    }

    /// `∫ c(x) dx`, in Beta-function closed form for polynomial bumps.
    pub fn integral(&self) -> Complex64 {
        let (a, b) = self.support;
        match self.kind {
            ProfileKind::PolynomialBump { power } => {
                self.amplitude * (b - a) * beta_symmetric(power + 1)
            }
            ProfileKind::SmoothBump => quadrature::adaptive(a, b, 1e-15, |x| self.value(x)),
            ProfileKind::Zero => Complex64::new(0.0, 0.0),
        }
    }
}

impl fmt::Display for SlowProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.support;
        match self.kind {
            ProfileKind::PolynomialBump { power } => {
                write!(f, "PolynomialBump(A={}, p={power}, [{a}, {b}])", self.amplitude)
            }
            ProfileKind::SmoothBump => write!(f, "SmoothBump(A={}, [{a}, {b}])", self.amplitude),
            ProfileKind::Zero => write!(f, "Zero"),
        }
    }
}

/// `B(m, m) = ((m-1)!)² / (2m-1)!`, evaluated as a running product.
pub fn beta_symmetric(m: u32) -> f64 {
    let m = m as f64;
    let mut acc = 1.0 / (2.0 * m - 1.0);
    let mut k = 1.0;
    while k < m {
        acc *= k / (m - 1.0 + k);
        k += 1.0;
    }
    acc
}

fn poly_jet(power: u32, t: f64, len: f64) -> [f64; 3] {
    if power == 0 {
        return [1.0, 0.0, 0.0];
    }
    let p = power as i32;
    let pf = power as f64;
    let w = t * (1.0 - t);
    let w1 = (1.0 - 2.0 * t) / len;
    let w2 = -2.0 / (len * len);
    let value = w.powi(p);
    let d1 = pf * w.powi(p - 1) * w1;
    let mut d2 = pf * w.powi(p - 1) * w2;
    if power >= 2 {
        d2 += pf * (pf - 1.0) * w.powi(p - 2) * w1 * w1;
    }
    [value, d1, d2]
}

fn smooth_jet(s: f64, len: f64) -> [f64; 3] {
    let r = 1.0 - s * s;
    if r <= 0.0 {
        return [0.0; 3];
    }
    let g = (1.0 - 1.0 / r).exp();
    if g == 0.0 {
        return [0.0; 3];
    }
    let r2 = r * r;
    let gs = -2.0 * s * g / r2;
    let gss = g * (-2.0 / r2 - 8.0 * s * s / (r2 * r) + 4.0 * s * s / (r2 * r2));
    let ds = 2.0 / len;
    [g, gs * ds, gss * ds * ds]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(p: &SlowProfile, xs: &[f64]) {
        for &x in xs {
            let mut prev = (f64::INFINITY, f64::INFINITY);
            let mut orders = Vec::new();
            for h in [1e-3, 5e-4] {
                let d1 = (p.value(x + h) - p.value(x - h)) / (2.0 * h);
                let d2 = (p.value(x + h) - 2.0 * p.value(x) + p.value(x - h)) / (h * h);
                let e1 = (d1 - p.first_derivative(x)).norm();
                let e2 = (d2 - p.second_derivative(x)).norm();
                if prev.0.is_finite() && e1 > 1e-9 && e2 > 1e-9 {
                    orders.push(((prev.0 / e1).log2(), (prev.1 / e2).log2()));
                }
                prev = (e1, e2);
                assert!(e1 < 1e-4 * (1.0 + p.sup_abs()), "first derivative at {x}: {e1}");
                assert!(e2 < 1e-2 * (1.0 + p.sup_abs()), "second derivative at {x}: {e2}");
            }
            for (o1, o2) in orders {
                assert!(o1 > 1.8 && o2 > 1.8, "orders {o1}, {o2} at {x}");
            }
        }
    }

    #[test]
    fn zero_outside_support() {
        for p in [
            SlowProfile::polynomial_bump(2.0, 3, 0.2, 0.7),
            SlowProfile::smooth_bump(1.5, 0.2, 0.7),
        ] {
            for x in [-1.0, 0.19, 0.71, 3.0] {
                assert_eq!(p.jet(x), [Complex64::new(0.0, 0.0); 3]);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let xs = [0.13, 0.31, 0.5, 0.77, 0.9];
        fd_check(&SlowProfile::polynomial_bump(Complex64::new(1.0, -2.0), 2, 0.0, 1.0), &xs);
        fd_check(&SlowProfile::polynomial_bump(3.0, 5, 0.1, 0.95), &xs);
        fd_check(&SlowProfile::smooth_bump(1.0, 0.0, 1.0), &xs);
    }

    #[test]
    fn polynomial_bump_smoothness_at_endpoints() {
        // power p: derivatives up to p-1 vanish at the endpoints
        let p2 = SlowProfile::polynomial_bump(1.0, 2, 0.0, 1.0);
        assert_eq!(p2.value(0.0).norm(), 0.0);
        assert_eq!(p2.first_derivative(0.0).norm(), 0.0);
        assert!((p2.second_derivative(0.0).re - 2.0).abs() < 1e-14);
        let p3 = SlowProfile::polynomial_bump(1.0, 3, 0.0, 1.0);
        assert_eq!(p3.second_derivative(1.0).norm(), 0.0);
    }

    #[test]
    fn canonical_shape_value() {
        let p = SlowProfile::polynomial_bump(1.0, 2, 0.0, 1.0);
        assert!((p.value(0.5).re - 0.0625).abs() < 1e-16);
        assert!((p.sup_abs() - 0.0625).abs() < 1e-16);
    }

    #[test]
    fn beta_closed_forms() {
        assert!((beta_symmetric(3) - 1.0 / 30.0).abs() < 1e-16);
        assert!((beta_symmetric(5) - 1.0 / 630.0).abs() < 1e-17);
        assert!((beta_symmetric(1) - 1.0).abs() < 1e-16);
        let p = SlowProfile::polynomial_bump(2.0, 2, 0.0, 2.0);
        let fine = quadrature::adaptive(0.0, 2.0, 1e-15, |x| p.value(x));
        assert!((p.integral() - fine).norm() < 1e-12);
        assert!((p.integral().re - 4.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn box_profile() {
        let p = SlowProfile::polynomial_bump(-5.0, 0, 0.0, 1.0);
        assert_eq!(p.value(0.0).re, -5.0);
        assert_eq!(p.value(1.0).re, -5.0);
        assert_eq!(p.value(1.0 + 1e-12).re, 0.0);
        assert!(!p.has_exact_second_derivative());
        assert!((p.integral().re + 5.0).abs() < 1e-15);
    }
}
