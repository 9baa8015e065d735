use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::SlowProfile;
use crate::{Error, Result};

/// `u(x, ξ) = Σ_n c_n(x)·e^{2πinξ}`: 1-periodic in `ξ`, compactly supported in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoScaleFunction {
    modes: BTreeMap<i32, SlowProfile>,
    support_hull: (f64, f64),
    real: bool,
}

/// `e^{2πinξ}` with `ξ` reduced to `[0, 1)` first.
pub fn fourier_phase(n: i32, xi: f64) -> Complex64 {
    let frac = xi - xi.floor();
    let turns = (n as f64 * frac).fract();
    let (s, c) = (2.0 * PI * turns).sin_cos();
    Complex64::new(c, s)
}

impl TwoScaleFunction {
    /// Builds the function from `(n, c_n)` pairs. Repeated `n` are summed when the
    /// profiles share a shape; profiles that are identically zero are dropped.
    pub fn from_modes<I>(modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, SlowProfile)>,
    {
        let mut map: BTreeMap<i32, SlowProfile> = BTreeMap::new();
        for (n, profile) in modes {
            if profile.is_zero() {
                continue;
            }
            match map.get_mut(&n) {
                None => {
                    map.insert(n, profile);
                }
                Some(existing) if existing.same_shape(&profile) => {
                    let sum = existing.amplitude() + profile.amplitude();
                    *existing = existing.scaled(sum / existing.amplitude());
                }
                Some(existing) => {
                    return Err(Error::InvalidArgument(format!(
                        "mode n = {n} given twice with different shapes ({existing} and {profile})"
                    )))
                }
            }
        }
        map.retain(|_, p| !p.is_zero());
        Ok(Self::from_map(map))
    }

    fn from_map(modes: BTreeMap<i32, SlowProfile>) -> Self {
        let support_hull = modes
            .values()
            .map(|p| p.support())
            .reduce(|(a0, b0), (a1, b1)| (a0.min(a1), b0.max(b1)))
            .unwrap_or((0.0, 0.0));
        let mut out = Self {
            modes,
            support_hull,
            real: false,
        };
        out.real = out.check_conjugate_symmetry();
        out
    }

    pub fn zero() -> Self {
        Self::from_map(BTreeMap::new())
    }

    /// `a(x)·cos(2πnξ)`, stored as the conjugate pair `±n` with `a/2` each.
    pub fn cosine(n: i32, amplitude: SlowProfile) -> Self {
        assert!(n != 0, "cosine mode needs n ≠ 0");
        let half = amplitude.scaled(Complex64::new(0.5, 0.0));
        Self::from_map(BTreeMap::from([(n, half), (-n, half)]))
    }

    /// `a(x)·sin(2πnξ)`, stored as `n ↦ a/(2i)`, `-n ↦ -a/(2i)`.
    pub fn sine(n: i32, amplitude: SlowProfile) -> Self {
        assert!(n != 0, "sine mode needs n ≠ 0");
        let f = Complex64::new(0.0, -0.5);
        Self::from_map(BTreeMap::from([(n, amplitude.scaled(f)), (-n, amplitude.scaled(-f))]))
    }

    pub fn modes(&self) -> &BTreeMap<i32, SlowProfile> {
        &self.modes
    }

    pub fn mode(&self, n: i32) -> SlowProfile {
        self.modes.get(&n).copied().unwrap_or_else(SlowProfile::zero)
    }

    pub fn support_hull(&self) -> (f64, f64) {
        self.support_hull
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    /// True when `c_{-n}(x) = conj(c_n(x))` on sample points, i.e. `u` is real-valued.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn has_zero_mean(&self) -> bool {
        !self.modes.contains_key(&0)
    }

    /// Sorted distinct support endpoints of all modes.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .modes
            .values()
            .flat_map(|p| {
                let (a, b) = p.support();
                [a, b]
            })
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `Σ_n sup|c_n|`, an upper bound for `sup|u|`.
    pub fn sup_bound(&self) -> f64 {
        self.modes.values().map(SlowProfile::sup_abs).sum()
    }

    pub fn eval(&self, x: f64, xi: f64) -> Complex64 {
        self.eval_partial(x, xi, 0, 0)
    }

    /// `∂_x^{dx} ∂_ξ^{dxi} u(x, ξ)` for `dx ≤ 2`; exactly zero outside the hull.
    pub fn eval_partial(&self, x: f64, xi: f64, dx: usize, dxi: u32) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        if x < self.support_hull.0 || x > self.support_hull.1 {
            return acc;
        }
        for (&n, profile) in &self.modes {
            let c = profile.derivative(x, dx);
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let factor = Complex64::new(0.0, 2.0 * PI * n as f64).powu(dxi);
            acc += c * factor * fourier_phase(n, xi);
        }
        acc
    }

    /// `⟨u(x,·)⟩ = c_0`.
    pub fn mean_over_period(&self) -> SlowProfile {
        self.mode(0)
    }

    /// Samples `ξ ↦ u(x, ξ)` at `ξ_j = j/m`.
    pub fn sample_period(&self, x: f64, m: usize) -> Vec<Complex64> {
        (0..m).map(|j| self.eval(x, j as f64 / m as f64)).collect()
    }

    /// Mean over the period by the `m`-point trapezoid rule (exact for |n| < m).
    pub fn mean_by_quadrature(&self, x: f64, m: usize) -> Complex64 {
        self.sample_period(x, m).iter().sum::<Complex64>() / m as f64
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::from_map(
            self.modes
                .iter()
                .map(|(&n, p)| (n, p.scaled(factor)))
                .filter(|(_, p)| !p.is_zero())
                .collect(),
        )
    }

    /// Mode-wise sum; fails when a shared mode has differing shapes.
    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::from_modes(self.modes.iter().chain(&other.modes).map(|(&n, &p)| (n, p)))
    }

    /// Maps every mode through `f(n, c_n)`.
    pub(crate) fn map_modes(&self, f: impl Fn(i32, &SlowProfile) -> SlowProfile) -> Self {
        Self::from_map(
            self.modes
                .iter()
                .map(|(&n, p)| (n, f(n, p)))
                .filter(|(_, p)| !p.is_zero())
                .collect(),
        )
    }

    /// `P[u](x, ξ) = ∫₀^ξ u dτ + ∫₀¹ τu dτ`, i.e. `c_n ↦ c_n/(2πin)`.
    pub fn p_transform(&self) -> Result<Self> {
        if !self.has_zero_mean() {
            return Err(Error::NonZeroMean);
        }
        Ok(self.map_modes(|n, p| p.scaled(Complex64::new(0.0, 2.0 * PI * n as f64).inv())))
    }

    fn check_conjugate_symmetry(&self) -> bool {
        let (a, b) = self.support_hull;
        if self.modes.is_empty() {
            return true;
        }
        const SAMPLES: usize = 33;
        for (&n, p) in &self.modes {
            let partner = self.mode(-n);
            for j in 0..SAMPLES {
                let x = a + (b - a) * (j as f64 + 0.5) / SAMPLES as f64;
                let c = p.value(x);
                let d = partner.value(x);
                if (d - c.conj()).norm() > 1e-14 * (1.0 + c.norm()) {
                    return false;
                }
            }
        }
        true
    }
}

/// Discrete Fourier coefficients of one period of samples, indexed `-m/2 < n ≤ m/2`.
pub fn modes_from_samples(samples: &[Complex64]) -> BTreeMap<i32, Complex64> {
    let m = samples.len();
    let half = m as i32 / 2;
    let lo = half + 1 - m as i32;
    (lo..=half)
        .map(|n| {
            let c = samples
                .iter()
                .enumerate()
                .map(|(j, &s)| s * fourier_phase(-n, j as f64 / m as f64))
                .sum::<Complex64>()
                / m as f64;
            (n, c)
        })
        .collect()
}
