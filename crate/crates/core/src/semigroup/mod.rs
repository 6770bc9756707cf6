//! Distortion semigroups realised from a generator through the time
//! coordinate `H(x) = int_{1/2}^x ds / G(s)`, with `Psi_t(x) = H^{-1}(H(x) + t)`.
//!
//! `H` is tabulated on two half-tables, one per endpoint. Each half-table is
//! parameterised by `u = ln d`, where `d` is the distance to its endpoint, so
//! that the logarithmic singularities of `1/G` become smooth, slowly varying
//! functions of `u`. Cells start as binary octaves (split at generator
//! breakpoints) and are bisected until both the Gauss–Legendre cell integral
//! and the cubic Hermite interpolant through the nodes are within tolerance.
//! Forward and inverse evaluation use the same monotone piecewise cubic, so
//! `Psi_s o Psi_t = Psi_{s+t}` holds up to root-solve precision.

mod family;

use std::fmt;
use std::sync::Arc;

pub use family::{
    closed_form_family, craroc_family, euler_composition, extract_generator, lie_trotter, ClosedForm, CrarocFamily,
    DistortionFamily, Extraction,
};

use crate::distortion::Distortion;
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::quadrature::gauss15;
use crate::real::{Pos, Real};
use crate::tail::{classify_series, Confidence};

/// Default target accuracy of `Psi_t` evaluation.
pub const DEFAULT_ACCURACY: f64 = 1e-9;

/// A still-growing tail integral above this value is declared divergent.
const TAIL_CAP: f64 = 1e6;

/// Tables stop growing once the accumulated integral exceeds this value; such
/// times are far beyond any horizon the flow is queried at.
const TABLE_CAP: f64 = 1e12;

const MAX_CELL_DEPTH: usize = 40;

/// Whether `int 1/G` diverges at one endpoint, and the limit of `|H|` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailReport<F> {
    pub divergent: bool,
    pub confidence: Confidence,
    /// `|H|` at the endpoint: `int 1/G` from `1/2`, infinite when divergent.
    pub limit: F,
}

#[derive(Debug, Clone)]
struct HalfTable<F> {
    upper: bool,
    /// Distances to the endpoint, decreasing from `1/2`.
    d: Vec<F>,
    u: Vec<F>,
    /// `I(d) = int_d^{1/2} dv / f(v)`, increasing.
    i: Vec<F>,
    /// `dI/du = -d / f(d)` at the nodes.
    m: Vec<F>,
    /// Integral over each octave `[2^-(k+1), 2^-k]`.
    octaves: Vec<F>,
    truncated: bool,
}

struct Builder<'a, F: Real> {
    g: &'a Generator<F>,
    upper: bool,
    tol_q: F,
    tol_h: F,
    d: Vec<F>,
    u: Vec<F>,
    i: Vec<F>,
    m: Vec<F>,
}

impl<'a, F: Real> Builder<'a, F> {
    fn f(&self, d: F) -> Result<F> {
        let p = if self.upper { Pos::upper(d) } else { Pos::lower(d) };
        let v = self.g.eval_pos(p);
        if !(v > F::zero()) || !v.is_finite() {
            return Err(Error::numeric(p.x.as_f64(), format!("generator value {v} is not positive and finite")));
        }
        Ok(v)
    }

    /// Integrand of `I` in the `u` variable.
    fn w(&self, u: F) -> F {
        let d = u.exp();
        let p = if self.upper { Pos::upper(d) } else { Pos::lower(d) };
        d / self.g.eval_pos(p)
    }

    fn quad(&self, lo: F, hi: F) -> Result<F> {
        let v = gauss15(&|u| self.w(u), lo, hi);
        if !v.is_finite() || v < F::zero() {
            let at = if self.upper { F::one() - lo.exp() } else { lo.exp() };
            return Err(Error::numeric(at.as_f64(), "quadrature of 1/G is not finite"));
        }
        Ok(v)
    }

    /// Append nodes covering `[db, da]` (`da` is the last pushed node).
    fn cell(&mut self, ub: F, db: F, whole: F, depth: usize) -> Result<()> {
        let j = self.u.len() - 1;
        let (ua, ia, ma) = (self.u[j], self.i[j], self.m[j]);
        let um = ua + (ub - ua) * F::half();
        let near = self.quad(um, ua)?;
        let far = self.quad(ub, um)?;
        let both = near + far;
        let fb = self.f(db)?;
        let mb = -db / fb;
        let dm = um.exp();
        let ib = ia + both;
        let im = ia + near;
        let h = ub - ua;
        let herm_mid = (ia + ib) * F::half() + (ma - mb) * h / F::lit(8.0);
        let floor = F::lit(64.0) * F::epsilon();
        let quad_ok = (both - whole).abs() <= self.tol_q.max(floor * both.abs());
        let herm_ok = (herm_mid - im).abs() <= self.tol_h.max(floor * im.abs());
        let splittable = um < ua && um > ub;
        if depth == 0 || !splittable || (quad_ok && herm_ok) {
            self.push(db, ub, ib, mb);
            return Ok(());
        }
        // Refine the near half first so nodes stay ordered.
        self.cell(um, dm, near, depth - 1)?;
        self.cell(ub, db, far, depth - 1)
    }

    fn push(&mut self, d: F, u: F, i: F, m: F) {
        self.d.push(d);
        self.u.push(u);
        self.i.push(i);
        self.m.push(m);
    }
}

impl<F: Real> HalfTable<F> {
    fn build(g: &Generator<F>, upper: bool, accuracy: F) -> Result<Self> {
        let half = F::half();
        let mut b = Builder {
            g,
            upper,
            tol_q: accuracy * F::lit(1e-3),
            tol_h: accuracy * F::lit(0.1),
            d: Vec::new(),
            u: Vec::new(),
            i: Vec::new(),
            m: Vec::new(),
        };
        let f_half = b.f(half)?;
        b.push(half, half.ln(), F::zero(), -half / f_half);

        let depth = F::octave_depth();
        let mut dists: Vec<F> = g
            .breakpoints()
            .iter()
            .map(|&x| if upper { F::one() - x } else { x })
            .filter(|&d| d > F::zero() && d < half)
            .collect();
        dists.sort_by(|a, b| b.partial_cmp(a).unwrap());

        let mut octaves = Vec::with_capacity(depth);
        let mut truncated = false;
        let mut extra = dists.into_iter().peekable();
        let mut octave_start = F::zero();
        for k in 2..=depth {
            let end = F::two().powi(-(k as i32));
            // Breakpoints strictly inside this octave become cell boundaries.
            let mut stops = Vec::new();
            while let Some(&d) = extra.peek() {
                if d > end {
                    if d < *b.d.last().unwrap() {
                        stops.push(d);
                    }
                    extra.next();
                } else {
                    break;
                }
            }
            stops.push(end);
            for db in stops {
                let ua = *b.u.last().unwrap();
                let ub = db.ln();
                let whole = b.quad(ub, ua)?;
                b.cell(ub, db, whole, MAX_CELL_DEPTH)?;
            }
            let acc = *b.i.last().unwrap();
            octaves.push(acc - octave_start);
            octave_start = acc;
            if acc > F::lit(TABLE_CAP) {
                truncated = true;
                break;
            }
        }
        Ok(HalfTable { upper, d: b.d, u: b.u, i: b.i, m: b.m, octaves, truncated })
    }

    fn last_d(&self) -> F {
        *self.d.last().unwrap()
    }

    fn last_i(&self) -> F {
        *self.i.last().unwrap()
    }

    /// Cubic Hermite data of the cell between nodes `j` and `j + 1`.
    fn cell(&self, j: usize) -> (F, F, F, F, F) {
        let h = self.u[j + 1] - self.u[j];
        let (y0, y1) = (self.i[j], self.i[j + 1]);
        let sec = y1 - y0;
        let cap = F::lit(3.0) * sec;
        let d0 = (self.m[j] * h).max(F::zero()).min(cap);
        let d1 = (self.m[j + 1] * h).max(F::zero()).min(cap);
        (h, y0, y1, d0, d1)
    }

    /// `I(d)`, or `None` beyond the tabulated range.
    fn eval(&self, d: F) -> Option<F> {
        if d >= self.d[0] {
            return Some(F::zero());
        }
        if d < self.last_d() {
            return None;
        }
        if d == self.last_d() {
            return Some(self.last_i());
        }
        let u = d.ln();
        let idx = self.d.partition_point(|&v| v > d);
        let j = idx.clamp(1, self.d.len() - 1) - 1;
        if self.d[j + 1] == d {
            return Some(self.i[j + 1]);
        }
        let (h, y0, y1, d0, d1) = self.cell(j);
        let s = ((u - self.u[j]) / h).max(F::zero()).min(F::one());
        Some(hermite(s, y0, y1, d0, d1))
    }

    /// Distance `d` with `I(d) = target`; `None` beyond the tabulated range.
    fn invert(&self, target: F) -> Option<F> {
        if target <= F::zero() {
            return Some(self.d[0]);
        }
        if target > self.last_i() {
            return None;
        }
        let idx = self.i.partition_point(|&v| v <= target);
        let j = idx.clamp(1, self.i.len() - 1) - 1;
        if self.i[j] == target {
            return Some(self.d[j]);
        }
        if self.i[j + 1] == target {
            return Some(self.d[j + 1]);
        }
        let (h, y0, y1, d0, d1) = self.cell(j);
        let s = solve_hermite(target, y0, y1, d0, d1);
        if s <= F::zero() {
            return Some(self.d[j]);
        }
        if s >= F::one() {
            return Some(self.d[j + 1]);
        }
        Some((self.u[j] + s * h).exp())
    }

    fn pos(&self, d: F) -> Pos<F> {
        if self.upper {
            Pos::upper(d)
        } else {
            Pos::lower(d)
        }
    }
}

fn hermite<F: Real>(s: F, y0: F, y1: F, d0: F, d1: F) -> F {
    let one = F::one();
    let two = F::two();
    let three = F::lit(3.0);
    let r = one - s;
    y0 * (one + two * s) * r * r + d0 * s * r * r + y1 * s * s * (three - two * s) - d1 * s * s * r
}

fn hermite_slope<F: Real>(s: F, y0: F, y1: F, d0: F, d1: F) -> F {
    let six = F::lit(6.0);
    let (three, four, two) = (F::lit(3.0), F::lit(4.0), F::two());
    (y1 - y0) * six * s * (F::one() - s) + d0 * (three * s * s - four * s + F::one()) + d1 * (three * s * s - two * s)
}

/// Root of the monotone cubic on `[0, 1]` by safeguarded Newton.
fn solve_hermite<F: Real>(target: F, y0: F, y1: F, d0: F, d1: F) -> F {
    let (mut lo, mut hi) = (F::zero(), F::one());
    let mut s = ((target - y0) / (y1 - y0)).max(F::zero()).min(F::one());
    for _ in 0..100 {
        let v = hermite(s, y0, y1, d0, d1) - target;
        if v == F::zero() {
            return s;
        }
        if v < F::zero() {
            lo = s;
        } else {
            hi = s;
        }
        let slope = hermite_slope(s, y0, y1, d0, d1);
        let mut next = if slope > F::zero() { s - v / slope } else { F::nan() };
        if !(next > lo && next < hi) {
            next = lo + (hi - lo) * F::half();
        }
        if (next - s).abs() <= F::epsilon() * F::lit(2.0) || !(hi > lo) {
            return next;
        }
        s = next;
    }
    s
}

/// A distortion semigroup `(Psi_t)_{t >= 0}` realised from its generator.
#[derive(Clone)]
pub struct Semigroup<F: Real = f64> {
    gen: Arc<Generator<F>>,
    accuracy: F,
    low: HalfTable<F>,
    high: HalfTable<F>,
    low_tail: TailReport<F>,
    high_tail: TailReport<F>,
}

impl<F: Real> fmt::Debug for Semigroup<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Semigroup")
            .field("generator", &self.gen.describe())
            .field("accuracy", &self.accuracy)
            .field("h_low", &self.h_low())
            .field("h_high", &self.h_high())
            .field("nodes", &(self.low.d.len() + self.high.d.len()))
            .finish()
    }
}

/// Build the semigroup of `g` with target accuracy in `[1e-12, 1e-3]`.
pub fn build_semigroup<F: Real>(g: &Generator<F>, accuracy: F) -> Result<Semigroup<F>> {
    Semigroup::new(g, accuracy)
}

impl<F: Real> Semigroup<F> {
    pub fn new(g: &Generator<F>, accuracy: F) -> Result<Self> {
        if !(accuracy >= F::lit(1e-12) && accuracy <= F::lit(1e-3)) {
            return Err(Error::Config(format!("accuracy must lie in [1e-12, 1e-3], got {accuracy}")));
        }
        let low = HalfTable::build(g, false, accuracy)?;
        let high = HalfTable::build(g, true, accuracy)?;
        let (bl, bh) = match g.as_builtin() {
            Some(b) => {
                let (l, h) = b.tail_divergence();
                (Some(l), Some(h))
            }
            None => (None, None),
        };
        let e = g.endpoints();
        let low_tail = tail_report(&low, bl, e.low.value, e.low.slope, e.low.confidence, g.knot_table().is_some());
        let high_tail =
            tail_report(&high, bh, e.high.value, -e.high.slope, e.high.confidence, g.knot_table().is_some());
        Ok(Semigroup { gen: Arc::new(g.clone()), accuracy, low, high, low_tail, high_tail })
    }

    pub fn generator(&self) -> &Generator<F> {
        &self.gen
    }

    pub fn accuracy(&self) -> F {
        self.accuracy
    }

    /// `H(0+)`, `-inf` iff `int_0 1/G` diverges.
    pub fn h_low(&self) -> F {
        -self.low_tail.limit
    }

    /// `H(1-)`, `+inf` iff `int^1 1/G` diverges.
    pub fn h_high(&self) -> F {
        self.high_tail.limit
    }

    pub fn lower_tail(&self) -> &TailReport<F> {
        &self.low_tail
    }

    pub fn upper_tail(&self) -> &TailReport<F> {
        &self.high_tail
    }

    /// Time coordinate `H(x)`; `None` for points beyond the tabulated range.
    pub fn h_pos(&self, p: Pos<F>) -> Option<F> {
        if p.x <= F::zero() {
            return Some(self.h_low());
        }
        if p.comp <= F::zero() {
            return Some(self.h_high());
        }
        if p.is_upper() {
            self.high.eval(p.comp)
        } else {
            self.low.eval(p.x).map(|v| -v)
        }
    }

    pub fn h(&self, x: F) -> Option<F> {
        self.h_pos(Pos::from_x(x))
    }

    /// `H^{-1}(tau)` for `tau` in `[h_low, h_high]`, clamped to the table.
    pub fn h_inverse(&self, tau: F) -> Pos<F> {
        if tau >= self.h_high() {
            return Pos::one();
        }
        if tau <= self.h_low() {
            return Pos::zero();
        }
        if tau > F::zero() {
            match self.high.invert(tau) {
                Some(d) => self.high.pos(d),
                None => self.high.pos(self.high.last_d()),
            }
        } else {
            match self.low.invert(-tau) {
                Some(d) => self.low.pos(d),
                None => self.low.pos(self.low.last_d()),
            }
        }
    }

    /// `Psi_t` at a two-sided position. `Psi_t(0)` is the right limit.
    pub fn psi_pos(&self, t: F, p: Pos<F>) -> Pos<F> {
        if t == F::zero() || p.comp <= F::zero() {
            return p;
        }
        let h = match self.h_pos(p) {
            Some(h) => h,
            // Deeper than the table: the flow is slower than any resolvable time.
            None => return p,
        };
        if h == F::neg_infinity() {
            return Pos::zero();
        }
        let target = h + t;
        if target >= self.h_high() {
            return Pos::one();
        }
        let out = self.h_inverse(target);
        // Guard monotonicity against rounding in the table lookup.
        if out.x < p.x {
            p
        } else {
            out
        }
    }

    /// `Psi_t(x)` for `x` in `[0, 1]`; at `x = 0` the right limit `Psi_t(0+)`.
    pub fn psi(&self, t: F, x: F) -> Result<F> {
        check_t(t)?;
        if !(x >= F::zero() && x <= F::one()) {
            return Err(Error::Domain(format!("x = {x} is outside [0, 1]")));
        }
        Ok(self.psi_pos(t, Pos::from_x(x)).x)
    }

    /// `inf { x : Psi_t(x) >= y }` at a two-sided position.
    pub fn psi_inverse_pos(&self, t: F, y: Pos<F>) -> Pos<F> {
        if t == F::zero() {
            return y;
        }
        let h = if y.comp <= F::zero() {
            if self.h_high().is_infinite() {
                return Pos::one();
            }
            self.h_high()
        } else {
            match self.h_pos(y) {
                Some(h) => h,
                None => return y,
            }
        };
        let target = h - t;
        if target <= self.h_low() {
            return Pos::zero();
        }
        self.h_inverse(target)
    }

    pub fn psi_inverse(&self, t: F, y: F) -> Result<F> {
        check_t(t)?;
        if !(y > F::zero() && y <= F::one()) {
            return Err(Error::Domain(format!("y = {y} is outside (0, 1]")));
        }
        Ok(self.psi_inverse_pos(t, Pos::from_x(y)).x)
    }

    /// The single distortion `Psi_t`.
    pub fn distortion_at(self: &Arc<Self>, t: F) -> Result<Distortion<F>> {
        check_t(t)?;
        Ok(Distortion::flow(self.clone(), t))
    }

    /// `Psi_t(0+)`.
    pub fn d0plus(&self, t: F) -> F {
        if t == F::zero() || self.h_low().is_infinite() {
            return F::zero();
        }
        self.h_inverse(self.h_low() + t).x
    }

    /// `Psi'_-(1)` of `Psi_t`: `exp(G'_-(1) t)` when `G(1-) = 0`, and `0`
    /// when the flow is absorbed at 1 in finite time.
    pub fn left_slope_at_1(&self, t: F) -> F {
        if t == F::zero() {
            return F::one();
        }
        if self.h_high().is_finite() {
            return F::zero();
        }
        let e = self.gen.endpoints();
        if e.g1() > F::zero() {
            return F::zero();
        }
        (e.s1() * t).exp()
    }

    /// `Psi_t'(x) = G(Psi_t(x)) / G(x)`.
    pub fn derivative(&self, t: F, p: Pos<F>) -> F {
        let y = self.psi_pos(t, p);
        if y.comp <= F::zero() {
            return F::zero();
        }
        self.gen.eval_pos(y) / self.gen.eval_pos(p)
    }
}

fn check_t<F: Real>(t: F) -> Result<()> {
    if !(t >= F::zero()) {
        return Err(Error::Domain(format!("t = {t} must be nonnegative")));
    }
    Ok(())
}

/// Decide divergence of one tail integral of `1/G`.
///
/// `slope` is the one-sided slope pointing into the interval. Builtins and
/// knot generators are decided analytically; composites use the endpoint
/// estimates and, failing a shortcut, the octave-increment series test.
fn tail_report<F: Real>(
    table: &HalfTable<F>,
    builtin: Option<bool>,
    g_end: F,
    slope: F,
    end_conf: Confidence,
    knots: bool,
) -> TailReport<F> {
    let observed = table.last_i();
    let verdict = classify_series(&table.octaves, F::lit(TAIL_CAP));
    let (divergent, confidence) = if let Some(div) = builtin {
        (div, Confidence::Analytic)
    } else if table.truncated {
        (true, Confidence::NumericConfident)
    } else if g_end > F::zero() {
        // Bounded integrand.
        (false, if knots { Confidence::Analytic } else { end_conf })
    } else if slope.is_finite() {
        // G(s) <= G'(0) s makes the integral at least logarithmic.
        (true, if knots { Confidence::Analytic } else { end_conf })
    } else {
        (verdict.divergent, verdict.confidence.min(end_conf))
    };
    let limit = if divergent {
        F::infinity()
    } else {
        let rem = if verdict.remainder.is_finite() { verdict.remainder } else { F::zero() };
        observed + if g_end > F::zero() { table.last_d() / g_end } else { rem }
    };
    TailReport { divergent, confidence, limit }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{Builtin, Generator};

    fn sg(b: Builtin) -> Semigroup<f64> {
        build_semigroup(&Generator::builtin(b), 1e-9).unwrap()
    }

    #[test]
    fn cvar_absorption_time() {
        let s = sg(Builtin::Cvar);
        assert!((s.h_high() - std::f64::consts::LN_2).abs() < 1e-9, "{}", s.h_high());
        assert_eq!(s.h_low(), f64::NEG_INFINITY);
        assert!((s.psi(std::f64::consts::LN_2, 0.3).unwrap() - 0.6).abs() < 1e-9);
        assert_eq!(s.psi(1.0, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn infinite_limits_for_aimax_and_wang() {
        for b in [Builtin::Aimax, Builtin::Wang] {
            let s = sg(b);
            assert_eq!(s.h_low(), f64::NEG_INFINITY);
            assert_eq!(s.h_high(), f64::INFINITY);
        }
    }

    #[test]
    fn wang_time_coordinate_is_the_normal_quantile() {
        let s = sg(Builtin::Wang);
        for &x in &[1e-300, 1e-12, 0.01, 0.3, 0.7, 0.99, 1.0 - 1e-12] {
            let h = s.h(x).unwrap();
            let z = crate::special::norm_ppf(x);
            assert!((h - z).abs() < 1e-9 * (1.0 + z.abs()), "x={x}: {h} vs {z}");
        }
    }

    #[test]
    fn inverse_conventions() {
        let s = sg(Builtin::Cvar);
        let ln2 = std::f64::consts::LN_2;
        assert!((s.psi_inverse(ln2, 0.6).unwrap() - 0.3).abs() < 1e-9);
        assert!((s.psi_inverse(ln2, 1.0).unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(s.psi_inverse(0.0, 0.37).unwrap(), 0.37);
        assert!(s.psi_inverse(1.0, 0.0).is_err());
        assert!(s.psi(1.0, 1.5).is_err());
        assert!(s.psi(-1.0, 0.5).is_err());
    }

    #[test]
    fn accuracy_range_is_enforced() {
        let g = Generator::<f64>::builtin(Builtin::Cvar);
        assert!(matches!(build_semigroup(&g, 1e-2), Err(Error::Config(_))));
        assert!(matches!(build_semigroup(&g, 1e-13), Err(Error::Config(_))));
    }

    #[test]
    fn complement_precision_near_one() {
        // aimin: 1 - Psi_t(x) = (1 - x)^{e^t}.
        let s = sg(Builtin::Aimin);
        let p = s.psi_pos(1.0, Pos::upper(1e-5));
        let exact = (1e-5f64).powf(std::f64::consts::E);
        assert!((p.comp - exact).abs() < 1e-6 * exact, "{} vs {exact}", p.comp);
    }

    #[test]
    fn hermite_root_solve_inverts() {
        let (y0, y1, d0, d1) = (0.0, 1.0, 0.4, 2.0);
        for k in 1..10 {
            let target = k as f64 / 10.0;
            let s = solve_hermite(target, y0, y1, d0, d1);
            assert!((hermite(s, y0, y1, d0, d1) - target).abs() < 1e-14);
        }
    }

    #[test]
    fn f32_semigroup_is_usable() {
        let s = build_semigroup(&Generator::<f32>::builtin(Builtin::Aimin), 1e-6).unwrap();
        let v = s.psi(1.0, 0.5).unwrap();
        assert!((v - 0.848_044).abs() < 1e-4, "{v}");
    }
}
