//! Gauge fixing: the normalized slice `a_1 / a_0 = n(n-1)/2` and the
//! projection of deformation directions tangent to it.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cone::{ConeVariety, ReebVector};
use crate::error::{Error, Result};
use crate::index_character::build_index_character;
use crate::rational::{int, Rational};

/// A Reeb field on the normalized slice together with the exact value of
/// `a_1 / a_0` certifying it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedReeb {
    pub xi: ReebVector,
    #[serde(with = "crate::rational::serde_str")]
    pub certificate: Rational,
    /// Factor applied to the input field.
    #[serde(with = "crate::rational::serde_str")]
    pub scale: Rational,
}

/// `n(n-1)/2`.
pub fn target_ratio(n: usize) -> Rational {
    int((n * (n - 1) / 2) as i64)
}

/// Scales `xi` onto the normalized slice.
pub fn normalize_reeb(v: &ConeVariety, xi: &ReebVector) -> Result<NormalizedReeb> {
    if !v.reeb_cone_contains(xi) {
        return Err(Error::OutsideReebCone(format!("{xi} is not a Reeb field of {}", v.name)));
    }
    let ratio = build_index_character(v, xi, None)?.laurent_coefficients()?.ratio();
    if !ratio.is_positive() {
        return Err(Error::NotLogTerminal(format!("a1/a0 = {ratio} at {xi}")));
    }
    let scale = target_ratio(v.dim()) / ratio;
    let scaled = xi.scaled(&scale);
    let certificate = verify_normalized(v, &scaled)?;
    Ok(NormalizedReeb { xi: scaled, certificate, scale })
}

/// Exact check of the normalization condition; returns `a_1 / a_0`.
pub fn verify_normalized(v: &ConeVariety, xi: &ReebVector) -> Result<Rational> {
    let ratio = build_index_character(v, xi, None)?.laurent_coefficients()?.ratio();
    let expected = target_ratio(v.dim());
    if ratio != expected {
        return Err(Error::NotNormalized { found: ratio.to_string(), expected: expected.to_string() });
    }
    Ok(ratio)
}

/// A direction whose first-order change of `a_1 / a_0` vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedDirection {
    /// Ambient weights of `w' = w - 2 D_w(a_1/a_0) / (n(n-1)) xi`.
    #[serde(with = "crate::rational::serde_vec")]
    pub w: Vec<Rational>,
    /// `D_w (a_1 / a_0)(xi)` for the input direction.
    #[serde(with = "crate::rational::serde_str")]
    pub ratio_derivative: Rational,
}

/// Projects the ambient direction `w` along `xi` onto the tangent space of
/// the normalized slice of `y`. `xi` is given in the torus of `y`.
pub fn normalize_direction(y: &ConeVariety, xi: &NormalizedReeb, w: &[Rational]) -> Result<NormalizedDirection> {
    let n = y.dim();
    let f = build_index_character(y, &xi.xi, Some(w))?;
    let (_, derivative) = f.ratio_and_derivative()?;
    let a = y.coordinate_weights(&xi.xi);
    let c = int(2) * &derivative / int((n * (n - 1)) as i64);
    let projected = w.iter().zip(&a).map(|(wi, ai)| wi - &c * ai).collect();
    Ok(NormalizedDirection { w: projected, ratio_derivative: derivative })
}

/// `D_w (a_1/a_0)(xi)` along an ambient direction.
pub fn ratio_derivative(y: &ConeVariety, xi: &ReebVector, w: &[Rational]) -> Result<Rational> {
    Ok(build_index_character(y, xi, Some(w))?.ratio_and_derivative()?.1)
}

/// True when `D_w (a_1/a_0)(xi)` vanishes.
pub fn is_tangent(y: &ConeVariety, xi: &ReebVector, w: &[Rational]) -> Result<bool> {
    Ok(ratio_derivative(y, xi, w)?.is_zero())
}
