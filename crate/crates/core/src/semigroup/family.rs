//! Families `t -> Psi_t` evaluated without a generator table: the closed forms,
//! the CRAROC mixture family, and the two limit constructions that connect a
//! family to its generator.

use std::sync::Arc;

use crate::distortion::Distortion;
use crate::error::{Error, Result};
use crate::generator::{Builtin, Generator};
use crate::real::{Pos, Real};
use crate::special::{norm_cdf_pos, norm_ppf_pos};

use super::Semigroup;

/// A one-parameter family of distortions.
pub trait DistortionFamily<F: Real>: Send + Sync {
    /// `Psi_t(x)` at a two-sided position.
    fn value_pos(&self, t: F, x: Pos<F>) -> Pos<F>;

    fn value(&self, t: F, x: F) -> F {
        if x <= F::zero() {
            return F::zero();
        }
        self.value_pos(t, Pos::from_x(x.min(F::one()))).x
    }

    /// Whether `Psi_s o Psi_t = Psi_{s+t}` holds; semigroup-only operations
    /// reject families where it does not.
    fn is_semigroup(&self) -> bool;

    fn label(&self) -> String;
}

/// The exact families `(e^t x) ∧ 1`, `1-(1-x)^{e^t}`, `x^{e^{-t}}` and
/// `Phi(Phi^{-1}(x) + t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosedForm(pub Builtin);

/// Closed-form family generated by the builtin `name`.
pub fn closed_form_family(name: &str) -> Result<ClosedForm> {
    Ok(ClosedForm(Builtin::from_name(name)?))
}

impl ClosedForm {
    /// `Psi_t` as a standalone distortion.
    pub fn at<F: Real>(self, t: F) -> Result<Distortion<F>> {
        if !(t >= F::zero()) {
            return Err(Error::Domain(format!("t = {t} must be nonnegative")));
        }
        Ok(match self.0 {
            Builtin::Cvar => Distortion::clamp(t.exp())?,
            Builtin::Aimin => Distortion::min_of_draws(t.exp())?,
            Builtin::Aimax => Distortion::power((-t).exp())?,
            Builtin::Wang => Distortion::wang(t)?,
        })
    }
}

impl<F: Real> DistortionFamily<F> for ClosedForm {
    fn value_pos(&self, t: F, p: Pos<F>) -> Pos<F> {
        if t == F::zero() {
            return p;
        }
        match self.0 {
            Builtin::Cvar => {
                let y = t.exp() * p.x;
                if y >= F::one() {
                    Pos::one()
                } else {
                    Pos::from_x(y)
                }
            }
            Builtin::Aimin => {
                let ln_comp = if p.is_upper() { p.comp.ln() } else { (-p.x).ln_1p() };
                let l = t.exp() * ln_comp;
                Pos { x: -l.exp_m1(), comp: l.exp() }
            }
            Builtin::Aimax => {
                let ln_x = if p.is_upper() { (-p.comp).ln_1p() } else { p.x.ln() };
                let l = (-t).exp() * ln_x;
                Pos { x: l.exp(), comp: -l.exp_m1() }
            }
            Builtin::Wang => norm_cdf_pos(norm_ppf_pos(p) + t),
        }
    }

    fn is_semigroup(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        self.0.name().to_string()
    }
}

impl<F: Real> DistortionFamily<F> for Semigroup<F> {
    fn value_pos(&self, t: F, x: Pos<F>) -> Pos<F> {
        self.psi_pos(t, x)
    }

    fn is_semigroup(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        self.generator().describe()
    }
}

impl<F: Real, T: DistortionFamily<F> + ?Sized> DistortionFamily<F> for Arc<T> {
    fn value_pos(&self, t: F, x: Pos<F>) -> Pos<F> {
        (**self).value_pos(t, x)
    }

    fn is_semigroup(&self) -> bool {
        (**self).is_semigroup()
    }

    fn label(&self) -> String {
        (**self).label()
    }
}

/// `Psi_t = (x + t Psi(x)) / (1 + t)`; tends to `Psi`, not to 1, so it is not
/// a semigroup.
#[derive(Debug, Clone)]
pub struct CrarocFamily<F: Real> {
    base: Arc<Distortion<F>>,
}

pub fn craroc_family<F: Real>(base: &Distortion<F>) -> CrarocFamily<F> {
    CrarocFamily { base: Arc::new(base.clone()) }
}

impl<F: Real> CrarocFamily<F> {
    pub fn base(&self) -> &Distortion<F> {
        &self.base
    }

    pub fn at(&self, t: F) -> Result<Distortion<F>> {
        Distortion::craroc(self.base.clone(), t)
    }
}

impl<F: Real> DistortionFamily<F> for CrarocFamily<F> {
    fn value_pos(&self, t: F, p: Pos<F>) -> Pos<F> {
        if t.is_infinite() {
            return self.base.eval_pos(p);
        }
        let q = self.base.eval_pos(p);
        let w = F::one() + t;
        Pos { x: (p.x + t * q.x) / w, comp: (p.comp + t * q.comp) / w }
    }

    fn is_semigroup(&self) -> bool {
        false
    }

    fn label(&self) -> String {
        format!("craroc({})", self.base.describe())
    }
}

/// Generator estimate with the difference quotients it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction<F> {
    pub value: F,
    /// `(t, (Psi_t(x) - x) / t)` for `t = 2^-k`.
    pub quotients: Vec<(F, F)>,
    /// Change between the last two extrapolated values.
    pub error_estimate: F,
}

const EXTRACT_FIRST: i32 = 6;
const EXTRACT_LAST: i32 = 16;
const RICHARDSON_LEVELS: usize = 3;

/// `G(x) = lim_{t -> 0} (Psi_t(x) - x) / t`, by Richardson extrapolation over
/// `t = 2^-k`.
pub fn extract_generator<F: Real, D: DistortionFamily<F> + ?Sized>(family: &D, x: F) -> Result<Extraction<F>> {
    if !(x > F::zero() && x < F::one()) {
        return Err(Error::Domain(format!("x = {x} is outside (0, 1)")));
    }
    let p = Pos::from_x(x);
    let quotients: Vec<(F, F)> = (EXTRACT_FIRST..=EXTRACT_LAST)
        .map(|k| {
            let t = F::two().powi(-k);
            let y = family.value_pos(t, p);
            (t, y.minus(p) / t)
        })
        .collect();
    // Richardson table for an expansion in integer powers of t.
    let mut rows: Vec<Vec<F>> = Vec::new();
    for (i, &(_, q)) in quotients.iter().enumerate() {
        let mut row = vec![q];
        for j in 1..=RICHARDSON_LEVELS.min(i) {
            let factor = F::two().powi(j as i32) - F::one();
            let prev = rows[i - 1][j - 1];
            row.push(row[j - 1] + (row[j - 1] - prev) / factor);
        }
        rows.push(row);
    }
    let n = rows.len();
    let value = rows[n - 1][RICHARDSON_LEVELS];
    let error_estimate = (value - rows[n - 2][RICHARDSON_LEVELS]).abs();
    let scale = value.abs().max(F::lit(1e-12));
    if !value.is_finite() || error_estimate > F::lit(1e-5) * scale {
        return Err(Error::Estimation(format!(
            "difference quotients at x = {x} do not settle: last estimates {} and {}",
            rows[n - 2][RICHARDSON_LEVELS],
            value
        )));
    }
    Ok(Extraction { value, quotients, error_estimate })
}

/// `(I + (t/n) G)^n (x)`, with `G` extended by 0 outside `(0, 1)` and iterates
/// clamped to `[0, 1]`.
pub fn euler_composition<F: Real>(g: &Generator<F>, t: F, n: usize, x: F) -> Result<F> {
    if n == 0 {
        return Err(Error::Domain("number of steps must be positive".into()));
    }
    if !(t >= F::zero()) {
        return Err(Error::Domain(format!("t = {t} must be nonnegative")));
    }
    if !(x > F::zero() && x <= F::one()) {
        return Err(Error::Domain(format!("x = {x} is outside (0, 1]")));
    }
    let h = t / F::from_usize_lossy(n);
    let mut y = x;
    for _ in 0..n {
        y = (y + h * g.eval(y)).max(F::zero()).min(F::one());
    }
    Ok(y)
}

/// Alternating composition `(Psi^a_{t/n} o Psi^b_{t/n})^n (x)`.
pub fn lie_trotter<F: Real>(a: &Semigroup<F>, b: &Semigroup<F>, t: F, n: usize, x: F) -> Result<F> {
    if n == 0 {
        return Err(Error::Domain("number of steps must be positive".into()));
    }
    let h = t / F::from_usize_lossy(n);
    let mut p = Pos::from_x(x);
    for _ in 0..n {
        p = a.psi_pos(h, b.psi_pos(h, p));
    }
    Ok(p.x)
}
