//! Standard normal density, distribution function and quantile.

use crate::real::{Pos, Real};

#[inline]
pub fn norm_pdf<F: Real>(z: F) -> F {
    let inv_sqrt_2pi = F::one() / (F::two() * F::PI()).sqrt();
    inv_sqrt_2pi * (-(z * z) * F::half()).exp()
}

/// `Phi(z)` for `z <= 0`, `1 - Phi(z)` mirrored otherwise.
#[inline]
fn lower_tail<F: Real>(z: F) -> F {
    // Phi(z) = erfc(-z / sqrt 2) / 2
    F::half() * (-z / F::SQRT_2()).erfc()
}

#[inline]
pub fn norm_cdf<F: Real>(z: F) -> F {
    if z <= F::zero() {
        lower_tail(z)
    } else {
        F::one() - lower_tail(-z)
    }
}

/// `Phi(z)` with the representation that keeps full precision near 0 and 1.
#[inline]
pub fn norm_cdf_pos<F: Real>(z: F) -> Pos<F> {
    if z <= F::zero() {
        Pos::lower(lower_tail(z))
    } else {
        Pos::upper(lower_tail(-z))
    }
}

const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.38357751867269e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];

fn horner<F: Real>(coeffs: &[f64], x: F) -> F {
    coeffs.iter().fold(F::zero(), |acc, &c| acc * x + F::lit(c))
}

/// Quantile for `p` in `(0, 1/2]`, returning a non-positive value.
///
/// Rational starting point followed by two Halley steps against `erfc`.
pub fn norm_ppf_lower<F: Real>(p: F) -> F {
    if p <= F::zero() {
        return F::neg_infinity();
    }
    if p >= F::half() {
        return F::zero();
    }
    let p_low = F::lit(0.02425);
    let mut x = if p < p_low {
        let q = (-F::two() * p.ln()).sqrt();
        horner(&C, q) / (horner(&D, q) * q + F::one())
    } else {
        let q = p - F::half();
        let r = q * q;
        horner(&A, r) * q / (horner(&B, r) * r + F::one())
    };
    let sqrt_2pi = (F::two() * F::PI()).sqrt();
    for _ in 0..2 {
        let e = lower_tail(x) - p;
        let u = e * sqrt_2pi * (x * x * F::half()).exp();
        if !u.is_finite() {
            break;
        }
        x = x - u / (F::one() + x * u * F::half());
    }
    x.min(F::zero())
}

/// `Phi^{-1}` evaluated from a two-sided position.
#[inline]
pub fn norm_ppf_pos<F: Real>(p: Pos<F>) -> F {
    if p.is_upper() {
        -norm_ppf_lower(p.comp)
    } else {
        norm_ppf_lower(p.x)
    }
}

#[inline]
pub fn norm_ppf<F: Real>(p: F) -> F {
    norm_ppf_pos(Pos::from_x(p))
}
