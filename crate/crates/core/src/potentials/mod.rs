//! Two-scale functions `u(x, ξ)`: finite Fourier sums in the fast variable
//! with compactly supported slow amplitudes, plus the `P` transform and the
//! corrector `v` built from them.

mod corrector;
mod profile;
mod two_scale;

pub use corrector::{build_corrector, CorrectorBundle};
pub use profile::{beta_symmetric, ProfileKind, SlowProfile};
pub use two_scale::{fourier_phase, modes_from_samples, TwoScaleFunction};

/// `100·x²(1-x)²·cos 2πξ` on `[0, 1]`, the reference potential used throughout
/// the tests and examples.
pub fn canonical_potential() -> TwoScaleFunction {
    TwoScaleFunction::cosine(1, SlowProfile::polynomial_bump(100.0, 2, 0.0, 1.0))
}
