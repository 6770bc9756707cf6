//! The acceptability index `alpha(X) = sup { t >= 0 : E^{Psi_t}[X] >= 0 }`
//! and the classical performance ratios it is compared with.

use serde::Serialize;

use crate::choquet::{distorted_expectation, increments_at, weighted_sum, EmpiricalDistribution};
use crate::distortion::Distortion;
use crate::error::{Error, Result};
use crate::real::{Pos, Real};
use crate::semigroup::{DistortionFamily, Semigroup};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_T_MAX: f64 = 50.0;
pub const DEFAULT_RAROC_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaStatus {
    /// Mean below zero, or zero mean with every probed `t > 0` unacceptable.
    Zero,
    Interior,
    /// Still acceptable at `t_max`; the value is a lower bound.
    AtCap,
    /// No sample is negative.
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaResult<F> {
    pub value: F,
    pub status: AlphaStatus,
    /// `(t_lo, t_hi)` with `f(t_lo) >= 0 > f(t_hi)` when interior.
    pub bracket: (F, F),
    /// Number of distorted-expectation evaluations.
    pub evaluations: usize,
}

fn check_controls<F: Real>(tol: F, t_max: F) -> Result<()> {
    if !(tol >= F::lit(1e-10) && tol <= F::lit(1e-2)) {
        return Err(Error::Config(format!("tolerance must lie in [1e-10, 1e-2], got {tol}")));
    }
    if !(t_max > F::zero()) || !t_max.is_finite() {
        return Err(Error::Config(format!("t_max must be positive and finite, got {t_max}")));
    }
    Ok(())
}

/// `alpha` under the semigroup `s`.
///
/// `H(P_i)` is computed once, so each probe of `t` costs one table inversion
/// per atom.
pub fn alpha<F: Real>(s: &Semigroup<F>, d: &EmpiricalDistribution<F>, tol: F, t_max: F) -> Result<AlphaResult<F>> {
    check_controls(tol, t_max)?;
    let times: Vec<Option<F>> = d.cum_pos().iter().map(|&p| s.h_pos(p)).collect();
    let cum = d.cum_pos();
    let f = |t: F| {
        let mut prev = Pos::zero();
        let mut acc = F::zero();
        for (i, &p) in cum.iter().enumerate() {
            let y = flow_from_time(s, times[i], t, p);
            acc = acc + d.values()[i] * y.minus(prev).max(F::zero());
            prev = y;
        }
        acc
    };
    bisect_index(d, f, tol, t_max)
}

fn flow_from_time<F: Real>(s: &Semigroup<F>, h: Option<F>, t: F, p: Pos<F>) -> Pos<F> {
    if t == F::zero() || p.comp <= F::zero() {
        return p;
    }
    match h {
        None => p,
        Some(h) => {
            let target = h + t;
            if target >= s.h_high() {
                Pos::one()
            } else {
                let y = s.h_inverse(target);
                if y.x < p.x {
                    p
                } else {
                    y
                }
            }
        }
    }
}

/// `alpha` under any family; semigroup-only callers should prefer [`alpha`].
pub fn alpha_family<F: Real, D: DistortionFamily<F> + ?Sized>(
    family: &D,
    d: &EmpiricalDistribution<F>,
    tol: F,
    t_max: F,
) -> Result<AlphaResult<F>> {
    check_controls(tol, t_max)?;
    let f = |t: F| weighted_sum(d.values(), &increments_at(d.cum_pos(), |p| family.value_pos(t, p)));
    bisect_index(d, f, tol, t_max)
}

fn bisect_index<F: Real>(
    d: &EmpiricalDistribution<F>,
    f: impl Fn(F) -> F,
    tol: F,
    t_max: F,
) -> Result<AlphaResult<F>> {
    let zero = F::zero();
    if d.min_value() >= zero {
        return Ok(AlphaResult { value: F::infinity(), status: AlphaStatus::Infinite, bracket: (t_max, F::infinity()), evaluations: 0 });
    }
    let mut evals = 0usize;
    let mut f = |t: F| {
        evals += 1;
        f(t)
    };
    let mean = f(zero);
    if !mean.is_finite() {
        return Err(Error::numeric(0.0, "distorted expectation is not finite"));
    }
    if mean < zero {
        return Ok(AlphaResult { value: zero, status: AlphaStatus::Zero, bracket: (zero, zero), evaluations: evals });
    }
    if mean == zero && f(tol) < zero {
        return Ok(AlphaResult { value: zero, status: AlphaStatus::Zero, bracket: (zero, tol), evaluations: evals });
    }
    let (mut lo, mut hi) = (zero, F::one().min(t_max));
    loop {
        if f(hi) < zero {
            break;
        }
        lo = hi;
        if hi >= t_max {
            return Ok(AlphaResult { value: t_max, status: AlphaStatus::AtCap, bracket: (t_max, F::infinity()), evaluations: evals });
        }
        hi = (hi * F::two()).min(t_max);
    }
    while hi - lo > tol {
        let mid = lo + (hi - lo) * F::half();
        if !(mid > lo && mid < hi) {
            break;
        }
        if f(mid) >= zero {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(AlphaResult { value: lo + (hi - lo) * F::half(), status: AlphaStatus::Interior, bracket: (lo, hi), evaluations: evals })
}

fn variance<F: Real>(d: &EmpiricalDistribution<F>) -> F {
    let m = d.mean();
    d.values().iter().zip(d.probs()).fold(F::zero(), |a, (&v, &p)| a + p * (v - m) * (v - m))
}

/// `E X / sigma(X)` with the population standard deviation.
pub fn sharpe<F: Real>(d: &EmpiricalDistribution<F>) -> Result<F> {
    let var = variance(d);
    if !(var > F::zero()) {
        return Err(Error::Undefined("Sharpe ratio needs a nonzero standard deviation".into()));
    }
    Ok(d.mean() / var.sqrt())
}

/// An extended-real ratio and whether it came from a degenerate denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio<F> {
    pub value: F,
    pub numerator: F,
    pub denominator: F,
    /// Set when the denominator is not positive and the value is a convention.
    pub degenerate: bool,
}

fn ratio<F: Real>(num: F, den: F) -> Ratio<F> {
    if den > F::zero() {
        return Ratio { value: num / den, numerator: num, denominator: den, degenerate: false };
    }
    let value = if num > F::zero() { F::infinity() } else { F::zero() };
    Ratio { value, numerator: num, denominator: den, degenerate: true }
}

/// `E X / V@R_lambda` with `V@R_lambda = -q^-_lambda`, the lower quantile.
pub fn raroc<F: Real>(d: &EmpiricalDistribution<F>, lambda: F) -> Result<Ratio<F>> {
    if !(lambda > F::zero() && lambda < F::one()) {
        return Err(Error::Domain(format!("RAROC level must lie in (0, 1), got {lambda}")));
    }
    Ok(ratio(d.mean(), -d.lower_quantile(lambda)))
}

/// `E X / E X^-`.
pub fn glr<F: Real>(d: &EmpiricalDistribution<F>) -> Ratio<F> {
    let loss = d.values().iter().zip(d.probs()).fold(F::zero(), |a, (&v, &p)| a + p * (-v).max(F::zero()));
    ratio(d.mean(), loss)
}

/// `E X / rho(X)` with `rho = -E^{Psi}[X]`.
pub fn craroc<F: Real>(d: &EmpiricalDistribution<F>, psi: &Distortion<F>) -> Ratio<F> {
    ratio(d.mean(), -distorted_expectation(d, psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{Builtin, Generator};
    use crate::semigroup::{build_semigroup, ClosedForm};

    fn dist(v: &[f64]) -> EmpiricalDistribution<f64> {
        EmpiricalDistribution::from_samples(v, None).unwrap()
    }

    #[test]
    fn index_of_two_point_sample_under_cvar() {
        let s = build_semigroup(&Generator::builtin(Builtin::Cvar), 1e-9).unwrap();
        let r = alpha(&s, &dist(&[-1.0, 3.0]), 1e-9, 50.0).unwrap();
        assert_eq!(r.status, AlphaStatus::Interior);
        assert!((r.value - 1.5f64.ln()).abs() < 1e-8, "{}", r.value);
        assert!(r.bracket.1 - r.bracket.0 <= 1e-9);
        let c = alpha_family(&ClosedForm(Builtin::Cvar), &dist(&[-1.0, 3.0]), 1e-9, 50.0).unwrap();
        assert!((c.value - 1.5f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn consistency_cases() {
        let s = build_semigroup(&Generator::builtin(Builtin::Aimax), 1e-9).unwrap();
        assert_eq!(alpha(&s, &dist(&[0.0, 1.0]), 1e-9, 50.0).unwrap().status, AlphaStatus::Infinite);
        let z = alpha(&s, &dist(&[-2.0, 1.0]), 1e-9, 50.0).unwrap();
        assert_eq!((z.value, z.status), (0.0, AlphaStatus::Zero));
        let z = alpha(&s, &dist(&[-1.0, 1.0]), 1e-9, 50.0).unwrap();
        assert_eq!(z.status, AlphaStatus::Zero);
        assert!(alpha(&s, &dist(&[-1.0, 1.0]), 1.0, 50.0).is_err());
    }

    #[test]
    fn cap_is_reported() {
        let s = build_semigroup(&Generator::builtin(Builtin::Aimax), 1e-9).unwrap();
        let r = alpha(&s, &dist(&[-1e-9, 1.0]), 1e-6, 0.5).unwrap();
        assert_eq!((r.status, r.value), (AlphaStatus::AtCap, 0.5));
    }

    #[test]
    fn classical_ratios() {
        let d = dist(&[-1.0, 3.0]);
        assert_eq!(sharpe(&d).unwrap(), 0.5);
        assert!(matches!(sharpe(&dist(&[2.0, 2.0])), Err(Error::Undefined(_))));
        assert_eq!(raroc(&d, 0.25).unwrap().value, 1.0);
        assert_eq!(raroc(&dist(&[1.0, 2.0]), 0.05).unwrap().value, f64::INFINITY);
        assert_eq!(glr(&d).value, 2.0);
        assert_eq!(glr(&dist(&[-1.0, 1.0])).value, 0.0);
        let c = craroc(&dist(&[-1.0, 0.0, 1.0, 2.0]), &Distortion::clamp(2.0).unwrap());
        assert_eq!(c.value, 1.0);
        assert_eq!(craroc(&dist(&[1.0, 2.0]), &Distortion::identity()).value, f64::INFINITY);
    }
}
