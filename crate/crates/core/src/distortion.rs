//! Single concave distortions `Psi: [0, 1] -> [0, 1]`.
//!
//! Evaluation goes through [`Pos`] in both directions, so `1 - Psi(x)` stays
//! accurate when `Psi(x)` is close to 1. `Psi(0) = 0` always; a positive right
//! limit `Psi(0+)` is reported by [`Distortion::d0plus`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::{Pos, Real};
use crate::semigroup::Semigroup;
use crate::special::{norm_cdf_pos, norm_pdf, norm_ppf_pos};

#[derive(Clone)]
enum Kind<F: Real> {
    Identity,
    /// `min(c x, 1)`, `c >= 1`.
    Clamp(F),
    /// `x^p`, `0 < p <= 1`.
    Power(F),
    /// `1 - (1 - x)^k`, `k >= 1`.
    MinOfDraws(F),
    /// `Phi(Phi^{-1}(x) + t)`.
    Wang(F),
    /// Linear interpolation through `(0, y0), ..., (1, 1)`, `y0 = Psi(0+)`.
    Linear { xs: Vec<F>, ys: Vec<F> },
    Flow(Arc<Semigroup<F>>, F),
    /// `(x + t Psi(x)) / (1 + t)`.
    Craroc(Arc<Distortion<F>>, F),
    /// `1 - Psi^{-1}(1 - x)`.
    Dual(Arc<Distortion<F>>),
}

/// A concave nondecreasing map of `[0, 1]` onto `[0, 1]`.
#[derive(Clone)]
pub struct Distortion<F: Real = f64> {
    kind: Kind<F>,
}

impl<F: Real> fmt::Debug for Distortion<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Distortion({})", self.describe())
    }
}

impl<F: Real> Distortion<F> {
    pub fn identity() -> Self {
        Distortion { kind: Kind::Identity }
    }

    pub fn clamp(c: F) -> Result<Self> {
        if !(c >= F::one()) || !c.is_finite() {
            return Err(Error::Domain(format!("clamp factor must be at least 1, got {c}")));
        }
        Ok(Distortion { kind: Kind::Clamp(c) })
    }

    pub fn power(p: F) -> Result<Self> {
        if !(p > F::zero() && p <= F::one()) {
            return Err(Error::Domain(format!("power must lie in (0, 1], got {p}")));
        }
        Ok(Distortion { kind: Kind::Power(p) })
    }

    pub fn min_of_draws(k: F) -> Result<Self> {
        if !(k >= F::one()) || !k.is_finite() {
            return Err(Error::Domain(format!("number of draws must be at least 1, got {k}")));
        }
        Ok(Distortion { kind: Kind::MinOfDraws(k) })
    }

    pub fn wang(t: F) -> Result<Self> {
        if !(t >= F::zero()) || !t.is_finite() {
            return Err(Error::Domain(format!("Wang shift must be nonnegative, got {t}")));
        }
        Ok(Distortion { kind: Kind::Wang(t) })
    }

    /// Piecewise-linear distortion through `points`. `(1, 1)` is appended and
    /// `(0, 0)` prepended when absent; a point `(0, y0)` with `y0 > 0` gives a
    /// jump at 0.
    pub fn piecewise_linear(points: &[(F, F)]) -> Result<Self> {
        let mut pts: Vec<(F, F)> = points.to_vec();
        for (i, &(x, y)) in pts.iter().enumerate() {
            if !(x >= F::zero() && x <= F::one()) || !(y >= F::zero() && y <= F::one()) {
                return Err(Error::Domain(format!("point {i} = ({x}, {y}) is outside the unit square")));
            }
            if i > 0 && !(x > pts[i - 1].0) {
                return Err(Error::Validation(format!("abscissae must increase strictly (point {i})")));
            }
        }
        if pts.first().is_none_or(|p| p.0 > F::zero()) {
            pts.insert(0, (F::zero(), F::zero()));
        }
        match pts.last() {
            Some(&(x, y)) if x == F::one() => {
                if y != F::one() {
                    return Err(Error::Validation(format!("Psi(1) must be 1, got {y}")));
                }
            }
            _ => pts.push((F::one(), F::one())),
        }
        let slopes: Vec<F> = pts.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        for (i, &s) in slopes.iter().enumerate() {
            if s < F::zero() {
                return Err(Error::Validation(format!("distortion decreases after x = {}", pts[i].0)));
            }
            if i > 0 {
                let slack = F::lit(64.0) * F::epsilon() * s.abs().max(slopes[i - 1].abs()).max(F::one());
                if s > slopes[i - 1] + slack {
                    return Err(Error::Validation(format!(
                        "distortion is not concave at ({}, {}), ({}, {}), ({}, {})",
                        pts[i - 1].0,
                        pts[i - 1].1,
                        pts[i].0,
                        pts[i].1,
                        pts[i + 1].0,
                        pts[i + 1].1
                    )));
                }
            }
        }
        let (xs, ys) = pts.into_iter().unzip();
        Ok(Distortion { kind: Kind::Linear { xs, ys } })
    }

    pub(crate) fn flow(s: Arc<Semigroup<F>>, t: F) -> Self {
        if t == F::zero() {
            return Self::identity();
        }
        Distortion { kind: Kind::Flow(s, t) }
    }

    /// CRAROC member `(x + t Psi(x)) / (1 + t)`.
    pub fn craroc(base: Arc<Distortion<F>>, t: F) -> Result<Self> {
        if !(t >= F::zero()) {
            return Err(Error::Domain(format!("t = {t} must be nonnegative")));
        }
        if t == F::zero() {
            return Ok(Self::identity());
        }
        Ok(Distortion { kind: Kind::Craroc(base, t) })
    }

    /// `1 - Psi^{-1}(1 - x)`.
    pub fn dual(&self) -> Self {
        match &self.kind {
            Kind::Identity => Self::identity(),
            Kind::Dual(inner) => (**inner).clone(),
            _ => Distortion { kind: Kind::Dual(Arc::new(self.clone())) },
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.kind {
            Kind::Identity => true,
            Kind::Clamp(c) | Kind::Power(c) | Kind::MinOfDraws(c) => *c == F::one(),
            Kind::Wang(t) => *t == F::zero(),
            _ => false,
        }
    }

    /// Spec-style description.
    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Identity => "identity".into(),
            Kind::Clamp(c) => format!("clamp({c})"),
            Kind::Power(p) => format!("pow({p})"),
            Kind::MinOfDraws(k) => format!("draws({k})"),
            Kind::Wang(t) => format!("wang({t})"),
            Kind::Linear { xs, .. } => format!("linear({} points)", xs.len()),
            Kind::Flow(s, t) => format!("flow({}, t={t})", s.generator().describe()),
            Kind::Craroc(b, t) => format!("craroc({}, t={t})", b.describe()),
            Kind::Dual(b) => format!("dual({})", b.describe()),
        }
    }

    /// `Psi(x)`; `Psi(0) = 0`.
    pub fn eval(&self, x: F) -> F {
        if !(x > F::zero()) {
            return F::zero();
        }
        if x >= F::one() {
            return F::one();
        }
        self.eval_pos(Pos::from_x(x)).x
    }

    /// `Psi` on `(0, 1]` at a two-sided position.
    pub fn eval_pos(&self, p: Pos<F>) -> Pos<F> {
        if p.comp <= F::zero() {
            return Pos::one();
        }
        if p.x <= F::zero() {
            return Pos::from_x(self.d0plus());
        }
        match &self.kind {
            Kind::Identity => p,
            Kind::Clamp(c) => {
                let y = *c * p.x;
                if y >= F::one() {
                    Pos::one()
                } else if *c == F::one() {
                    p
                } else {
                    Pos::from_x(y)
                }
            }
            Kind::Power(e) => {
                let ln_x = if p.is_upper() { (-p.comp).ln_1p() } else { p.x.ln() };
                let l = *e * ln_x;
                Pos { x: l.exp(), comp: -l.exp_m1() }
            }
            Kind::MinOfDraws(k) => {
                let ln_c = if p.is_upper() { p.comp.ln() } else { (-p.x).ln_1p() };
                let l = *k * ln_c;
                Pos { x: -l.exp_m1(), comp: l.exp() }
            }
            Kind::Wang(t) => norm_cdf_pos(norm_ppf_pos(p) + *t),
            Kind::Linear { xs, ys } => {
                let j = xs.partition_point(|&v| v <= p.x).clamp(1, xs.len() - 1);
                let (x0, x1, y0, y1) = (xs[j - 1], xs[j], ys[j - 1], ys[j]);
                let w = (p.x - x0) / (x1 - x0);
                let y = y0 + (y1 - y0) * w;
                if y > F::half() {
                    // 1 - y from the complements of the segment end points.
                    let c = (F::one() - y1) + (y1 - y0) * (x1 - p.x) / (x1 - x0);
                    Pos { x: y, comp: c }
                } else {
                    Pos::lower(y)
                }
            }
            Kind::Flow(s, t) => s.psi_pos(*t, p),
            Kind::Craroc(b, t) => {
                let q = b.eval_pos(p);
                let w = F::one() + *t;
                Pos { x: (p.x + *t * q.x) / w, comp: (p.comp + *t * q.comp) / w }
            }
            Kind::Dual(b) => b.inverse_pos(p.reflect()).reflect(),
        }
    }

    /// Generalised inverse `inf { x : Psi(x) >= y }` for `y` in `(0, 1]`.
    pub fn inverse(&self, y: F) -> F {
        if !(y > F::zero()) {
            return F::zero();
        }
        self.inverse_pos(Pos::from_x(y.min(F::one()))).x
    }

    pub fn inverse_pos(&self, y: Pos<F>) -> Pos<F> {
        if y.x <= F::zero() || y.x <= self.d0plus() {
            return Pos::zero();
        }
        match &self.kind {
            Kind::Identity => y,
            Kind::Clamp(c) => {
                let x = y.x / *c;
                if *c == F::one() {
                    y
                } else {
                    Pos::from_x(x)
                }
            }
            Kind::Power(e) => {
                if y.comp <= F::zero() {
                    return Pos::one();
                }
                let ln_y = if y.is_upper() { (-y.comp).ln_1p() } else { y.x.ln() };
                let l = ln_y / *e;
                Pos { x: l.exp(), comp: -l.exp_m1() }
            }
            Kind::MinOfDraws(k) => {
                if y.comp <= F::zero() {
                    return Pos::one();
                }
                let ln_c = if y.is_upper() { y.comp.ln() } else { (-y.x).ln_1p() };
                let l = ln_c / *k;
                Pos { x: -l.exp_m1(), comp: l.exp() }
            }
            Kind::Wang(t) => {
                if y.comp <= F::zero() {
                    return Pos::one();
                }
                norm_cdf_pos(norm_ppf_pos(y) - *t)
            }
            Kind::Linear { xs, ys } => {
                // First segment whose right end reaches y.
                let j = ys.partition_point(|&v| v < y.x).clamp(1, xs.len() - 1);
                let (x0, x1, y0, y1) = (xs[j - 1], xs[j], ys[j - 1], ys[j]);
                if y1 == y0 {
                    return Pos::from_x(x0);
                }
                Pos::from_x(x0 + (x1 - x0) * (y.x - y0) / (y1 - y0))
            }
            Kind::Flow(s, t) => s.psi_inverse_pos(*t, y),
            Kind::Craroc(..) => self.inverse_by_bisection(y),
            Kind::Dual(b) => b.eval_pos(y.reflect()).reflect(),
        }
    }

    fn inverse_by_bisection(&self, y: Pos<F>) -> Pos<F> {
        let (mut lo, mut hi) = (F::zero(), F::one());
        for _ in 0..200 {
            let mid = lo + (hi - lo) * F::half();
            if !(mid > lo && mid < hi) {
                break;
            }
            if self.eval(mid) >= y.x {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Pos::from_x(hi)
    }

    /// `Psi(0+)`.
    pub fn d0plus(&self) -> F {
        match &self.kind {
            Kind::Linear { ys, .. } => ys[0],
            Kind::Flow(s, t) => s.d0plus(*t),
            Kind::Craroc(b, t) => *t * b.d0plus() / (F::one() + *t),
            Kind::Dual(b) => {
                // 1 - lim_{y -> 1-} Psi^{-1}(y).
                let top = b.inverse_pos(Pos::one());
                top.comp
            }
            _ => F::zero(),
        }
    }

    /// `Psi'_-(1)`.
    pub fn left_slope_at_1(&self) -> F {
        match &self.kind {
            Kind::Identity => F::one(),
            Kind::Clamp(c) => {
                if *c == F::one() {
                    F::one()
                } else {
                    F::zero()
                }
            }
            Kind::Power(e) => *e,
            Kind::MinOfDraws(k) => {
                if *k == F::one() {
                    F::one()
                } else {
                    F::zero()
                }
            }
            Kind::Wang(t) => {
                if *t == F::zero() {
                    F::one()
                } else {
                    F::zero()
                }
            }
            Kind::Linear { xs, ys } => {
                let n = xs.len();
                (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2])
            }
            Kind::Flow(s, t) => s.left_slope_at_1(*t),
            Kind::Craroc(b, t) => (F::one() + *t * b.left_slope_at_1()) / (F::one() + *t),
            Kind::Dual(b) => {
                let s = b.right_slope_at_0();
                if s.is_infinite() {
                    F::zero()
                } else {
                    F::one() / s
                }
            }
        }
    }

    /// `Psi'_+(0)` (may be infinite).
    pub fn right_slope_at_0(&self) -> F {
        if self.d0plus() > F::zero() {
            return F::infinity();
        }
        match &self.kind {
            Kind::Identity => F::one(),
            Kind::Clamp(c) => *c,
            Kind::Power(e) => {
                if *e == F::one() {
                    F::one()
                } else {
                    F::infinity()
                }
            }
            Kind::MinOfDraws(k) => *k,
            Kind::Wang(t) => {
                if *t == F::zero() {
                    F::one()
                } else {
                    F::infinity()
                }
            }
            Kind::Linear { xs, ys } => (ys[1] - ys[0]) / (xs[1] - xs[0]),
            Kind::Flow(s, t) => {
                let e = s.generator().endpoints();
                if e.g0() > F::zero() {
                    F::infinity()
                } else {
                    (e.s0() * *t).exp()
                }
            }
            Kind::Craroc(b, t) => (F::one() + *t * b.right_slope_at_0()) / (F::one() + *t),
            Kind::Dual(b) => {
                let s = b.left_slope_at_1();
                if s == F::zero() {
                    F::infinity()
                } else {
                    F::one() / s
                }
            }
        }
    }

    /// Analytic derivative `Psi'(x)` on `(0, 1)` where available. At a kink
    /// of a piecewise-linear distortion the right derivative is returned.
    pub fn derivative(&self, p: Pos<F>) -> Option<F> {
        let one = F::one();
        Some(match &self.kind {
            Kind::Identity => one,
            Kind::Clamp(c) => {
                if *c * p.x < one {
                    *c
                } else {
                    F::zero()
                }
            }
            Kind::Power(e) => {
                let ln_x = if p.is_upper() { (-p.comp).ln_1p() } else { p.x.ln() };
                *e * ((*e - one) * ln_x).exp()
            }
            Kind::MinOfDraws(k) => {
                let ln_c = if p.is_upper() { p.comp.ln() } else { (-p.x).ln_1p() };
                *k * ((*k - one) * ln_c).exp()
            }
            Kind::Wang(t) => {
                let z = norm_ppf_pos(p);
                norm_pdf(z + *t) / norm_pdf(z)
            }
            Kind::Linear { xs, ys } => {
                let j = xs.partition_point(|&v| v <= p.x).clamp(1, xs.len() - 1);
                (ys[j] - ys[j - 1]) / (xs[j] - xs[j - 1])
            }
            Kind::Flow(s, t) => s.derivative(*t, p),
            Kind::Craroc(b, t) => (one + *t * b.derivative(p)?) / (one + *t),
            Kind::Dual(b) => {
                let q = b.inverse_pos(p.reflect());
                let d = b.derivative(q)?;
                if d == F::zero() {
                    F::infinity()
                } else {
                    one / d
                }
            }
        })
    }

    /// Points where `Psi` has a kink, for knot scans.
    pub fn knots(&self) -> Vec<F> {
        match &self.kind {
            Kind::Clamp(c) if *c > F::one() => vec![F::one() / *c],
            Kind::Linear { xs, .. } => xs.clone(),
            Kind::Craroc(b, _) => b.knots(),
            Kind::Dual(b) => {
                let mut v: Vec<F> = b.knots().into_iter().map(|x| F::one() - b.eval(x)).collect();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v
            }
            _ => Vec::new(),
        }
    }

    /// True for piecewise-linear distortions, whose conjugate is exact at knots.
    pub fn is_piecewise_linear(&self) -> bool {
        match &self.kind {
            Kind::Identity | Kind::Linear { .. } => true,
            Kind::Clamp(_) => true,
            Kind::Craroc(b, _) => b.is_piecewise_linear(),
            Kind::Dual(b) => b.is_piecewise_linear(),
            _ => false,
        }
    }

    /// The semigroup and time of a flow distortion.
    pub fn as_flow(&self) -> Option<(&Arc<Semigroup<F>>, F)> {
        match &self.kind {
            Kind::Flow(s, t) => Some((s, *t)),
            _ => None,
        }
    }
}
