//! Complex scalars, dense complex matrices and truncated bivariate Taylor
//! series ("jets").

mod jet;
mod matrix;

pub use jet::{jet_det, jet_reciprocal_kernel, BivariateJet};
pub use matrix::{Lu, Matrix};

/// Binary64 complex number used for every weight and partition-function value.
pub type Scalar = num_complex::Complex64;

/// Shorthand for a real-valued [`Scalar`].
#[inline]
pub fn re(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

/// `|a - b| / |b|`, falling back to the absolute difference when `b == 0`.
pub fn rel_diff(a: Scalar, b: Scalar) -> f64 {
    let d = (a - b).norm();
    let s = b.norm();
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

/// Largest pairwise relative difference in a set of values, normalised by the
/// largest modulus in the set.
pub fn max_pairwise_rel(values: &[Scalar]) -> f64 {
    let scale = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for (k, a) in values.iter().enumerate() {
        for b in &values[k + 1..] {
            worst = worst.max((a - b).norm());
        }
    }
    if scale == 0.0 {
        worst
    } else {
        worst / scale
    }
}

pub fn is_finite(z: Scalar) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `n!` as a float; exact for the small orders used here.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Two sides of an identity, compared by [`rel_diff`] against the right side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sides {
    pub lhs: Scalar,
    pub rhs: Scalar,
}

impl Sides {
    pub fn residual(&self) -> f64 {
        rel_diff(self.lhs, self.rhs)
    }
}
