use num_complex::Complex64;
use std::f64::consts::PI;

use super::TwoScaleFunction;
use crate::{Error, Result};

/// The zero-mean second antiderivative `v` of `V` in the fast variable,
/// `∂²v/∂ξ² = V`, together with the partial derivatives the gauge transform uses.
#[derive(Debug, Clone)]
pub struct CorrectorBundle {
    v: TwoScaleFunction,
    potential: TwoScaleFunction,
}

/// Builds `v` with modes `c_n ↦ -c_n/(4π²n²)`.
///
/// The particular slow term is chosen so that `⟨v(x,·)⟩ = 0`; with it,
/// `∂v/∂ξ = P[V]` holds pointwise.
pub fn build_corrector(potential: &TwoScaleFunction) -> Result<CorrectorBundle> {
    if !potential.has_zero_mean() {
        return Err(Error::NonZeroMean);
    }
    if let Some(p) = potential
        .modes()
        .values()
        .find(|p| !p.has_exact_second_derivative())
    {
        return Err(Error::MissingSecondDerivative(p.to_string()));
    }
    let v = potential.map_modes(|n, p| {
        let k = 2.0 * PI * n as f64;
        p.scaled(Complex64::new(-1.0 / (k * k), 0.0))
    });
    Ok(CorrectorBundle {
        v,
        potential: potential.clone(),
    })
}

impl CorrectorBundle {
    pub fn v(&self) -> &TwoScaleFunction {
        &self.v
    }

    pub fn potential(&self) -> &TwoScaleFunction {
        &self.potential
    }

    pub fn value(&self, x: f64, xi: f64) -> Complex64 {
        self.v.eval(x, xi)
    }

    pub fn d_xi(&self, x: f64, xi: f64) -> Complex64 {
        self.v.eval_partial(x, xi, 0, 1)
    }

    pub fn d_x(&self, x: f64, xi: f64) -> Complex64 {
        self.v.eval_partial(x, xi, 1, 0)
    }

    pub fn d_xx(&self, x: f64, xi: f64) -> Complex64 {
        self.v.eval_partial(x, xi, 2, 0)
    }

    pub fn d_x_xi(&self, x: f64, xi: f64) -> Complex64 {
        self.v.eval_partial(x, xi, 1, 1)
    }

    /// `sup|v|` bound, `Σ sup|c_n|/(4π²n²)`.
    pub fn sup_bound(&self) -> f64 {
        self.v.sup_bound()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::SlowProfile;

    #[test]
    fn cosine_corrector_closed_form() {
        let a = SlowProfile::polynomial_bump(100.0, 2, 0.0, 1.0);
        let c = build_corrector(&TwoScaleFunction::cosine(1, a)).unwrap();
        for (x, xi) in [(0.2, 0.1), (0.5, 0.6), (0.81, 0.93)] {
            let expected = -a.value(x) * (2.0 * PI * xi).cos() / (4.0 * PI * PI);
            assert!((c.value(x, xi) - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn second_xi_derivative_recovers_potential() {
        let pot = TwoScaleFunction::from_modes([
            (1, SlowProfile::polynomial_bump(Complex64::new(2.0, 1.0), 3, 0.0, 1.0)),
            (-2, SlowProfile::smooth_bump(4.0, 0.1, 0.9)),
        ])
        .unwrap();
        let c = build_corrector(&pot).unwrap();
        for j in 0..20 {
            let x = 0.05 * j as f64;
            let xi = 0.37 * j as f64;
            let v_xixi = c.v().eval_partial(x, xi, 0, 2);
            assert!((v_xixi - pot.eval(x, xi)).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_nonzero_mean_and_rough_profiles() {
        let bump = SlowProfile::polynomial_bump(1.0, 2, 0.0, 1.0);
        let with_mean = TwoScaleFunction::from_modes([(0, bump), (1, bump)]).unwrap();
        assert!(matches!(build_corrector(&with_mean), Err(Error::NonZeroMean)));

        let kink = TwoScaleFunction::cosine(1, SlowProfile::polynomial_bump(1.0, 1, 0.0, 1.0));
        assert!(matches!(
            build_corrector(&kink),
            Err(Error::MissingSecondDerivative(_))
        ));
    }
}
