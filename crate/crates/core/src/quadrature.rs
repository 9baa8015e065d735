//! Gauss–Legendre rules and composite panel integration.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let mut acc = CompensatedSum::default();
        for (x, w) in self.mapped(a, b) {
            acc.add(f(x) * w);
        }
        acc.value()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

impl CompensatedSum {
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (sum, comp) = acc;
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

/// Splits `[breaks[0], breaks[last]]` into panels no wider than `max_width`,
/// never straddling an interior breakpoint.
pub fn panels(breaks: &[f64], max_width: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b <= a {
            continue;
        }
        let n = ((b - a) / max_width).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        for k in 0..n {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == n { b } else { a + (k + 1) as f64 * h };
            out.push((lo, hi));
        }
    }
    out
}

/// Number of panels [`panels`] would produce, without allocating.
pub fn panel_count(breaks: &[f64], max_width: f64) -> usize {
    breaks
        .windows(2)
        .filter(|p| p[1] > p[0])
        .map(|p| ((p[1] - p[0]) / max_width).ceil().max(1.0) as usize)
        .sum()
}

/// Composite Gauss–Legendre integral over the given panels.
pub fn composite<F: FnMut(f64) -> Complex64>(
    rule: &GaussLegendre,
    panels: &[(f64, f64)],
    mut f: F,
) -> Complex64 {
    let mut acc = CompensatedSum::default();
    for &(a, b) in panels {
        for (x, w) in rule.mapped(a, b) {
            acc.add(f(x) * w);
        }
    }
    acc.value()
}

/// Integrates a smooth integrand over `[a, b]` by doubling the panel count of
/// a 10-point composite rule until two successive results agree.
pub fn adaptive<F: Fn(f64) -> Complex64>(a: f64, b: f64, tol: f64, f: F) -> Complex64 {
    let rule = GaussLegendre::new(10);
    let mut n = 4usize;
    let mut prev = composite(&rule, &panels(&[a, b], (b - a) / n as f64), &f);
    while n < 1 << 16 {
        n *= 2;
        let next = composite(&rule, &panels(&[a, b], (b - a) / n as f64), &f);
        if (next - prev).norm() <= tol * (1.0 + next.norm()) {
            return next;
        }
        prev = next;
    }
    prev
}

/// Least-squares slope of `ys` against `xs`.
pub fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
