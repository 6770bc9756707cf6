//! Concave generators `G: (0, 1) -> (0, inf)` and their algebra.
//!
//! A generator determines a distortion semigroup through the time coordinate
//! `H(x) = int_{1/2}^x ds / G(s)` (see [`crate::semigroup`]). This module
//! provides the four closed-form generators, user-supplied piecewise-linear
//! ones, and the operations that are closed on the class: positive scaling,
//! reflection (dual), pointwise sum (mixture), pointwise minimum and the least
//! concave majorant of a pointwise maximum.
//!
//! Every generator is evaluated at a [`Pos`], which carries both `x` and
//! `1 - x`, so values next to either endpoint keep full relative precision.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull;
use crate::real::{Pos, Real};
use crate::special::{norm_pdf, norm_ppf_pos};
use crate::tail::{classify_series, extrapolate_limit, Confidence};

/// Number of points of the concavity / positivity validation grid.
pub const VALIDATION_POINTS: usize = 1001;

/// Uniform points used by the concave-majorant scan.
const MAJORANT_GRID: usize = 4097;

/// Slope estimates beyond this magnitude that still grow by
/// [`SLOPE_GROWTH`] per halving are classified as infinite.
const SLOPE_DIVERGENCE: f64 = 1e8;
const SLOPE_GROWTH: f64 = 1.5;

/// The four closed-form generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Builtin {
    /// `G(x) = x`, the CV@R family `(e^t x) ∧ 1`.
    Cvar,
    /// `G(x) = -(1-x) ln(1-x)`, the family `1 - (1-x)^{e^t}`.
    Aimin,
    /// `G(x) = -x ln x`, the family `x^{e^{-t}}`.
    Aimax,
    /// `G(x) = phi(Phi^{-1}(x))`, the Wang transform.
    Wang,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::Cvar, Builtin::Aimin, Builtin::Aimax, Builtin::Wang];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Cvar => "cvar",
            Builtin::Aimin => "aimin",
            Builtin::Aimax => "aimax",
            Builtin::Wang => "wang",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim() {
            "cvar" => Ok(Builtin::Cvar),
            "aimin" => Ok(Builtin::Aimin),
            "aimax" => Ok(Builtin::Aimax),
            "wang" => Ok(Builtin::Wang),
            other => Err(Error::Config(format!("unknown builtin generator `{other}`"))),
        }
    }

    fn eval<F: Real>(self, p: Pos<F>) -> F {
        match self {
            Builtin::Cvar => p.x,
            Builtin::Aimin => {
                if p.is_upper() {
                    -p.comp * p.comp.ln()
                } else {
                    -p.comp * (-p.x).ln_1p()
                }
            }
            Builtin::Aimax => {
                if p.is_upper() {
                    -p.x * (-p.comp).ln_1p()
                } else {
                    -p.x * p.x.ln()
                }
            }
            Builtin::Wang => norm_pdf(norm_ppf_pos(p)),
        }
    }

    fn endpoints<F: Real>(self) -> Endpoints<F> {
        let (z, one, inf) = (F::zero(), F::one(), F::infinity());
        let a = Confidence::Analytic;
        let side = |value, slope| EndSide { value, slope, confidence: a };
        match self {
            Builtin::Cvar => Endpoints { low: side(z, one), high: side(one, one) },
            Builtin::Aimin => Endpoints { low: side(z, one), high: side(z, -inf) },
            Builtin::Aimax => Endpoints { low: side(z, inf), high: side(z, -one) },
            Builtin::Wang => Endpoints { low: side(z, inf), high: side(z, -inf) },
        }
    }

    /// Whether `int 1/G` diverges at (0, 1), from the closed forms.
    pub fn tail_divergence(self) -> (bool, bool) {
        match self {
            Builtin::Cvar => (true, false),
            Builtin::Aimin | Builtin::Aimax | Builtin::Wang => (true, true),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Limit, one-sided slope and the confidence of one endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndSide<F> {
    pub value: F,
    pub slope: F,
    pub confidence: Confidence,
}

/// `G(0+)`, `G'_+(0)`, `G(1-)`, `G'_-(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Endpoints<F> {
    pub low: EndSide<F>,
    pub high: EndSide<F>,
}

impl<F: Real> Endpoints<F> {
    pub fn g0(&self) -> F {
        self.low.value
    }
    pub fn g1(&self) -> F {
        self.high.value
    }
    pub fn s0(&self) -> F {
        self.low.slope
    }
    pub fn s1(&self) -> F {
        self.high.slope
    }
}

/// Piecewise-linear generator data.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotTable<F> {
    xs: Vec<F>,
    gs: Vec<F>,
    slopes: Vec<F>,
}

impl<F: Real> KnotTable<F> {
    pub fn knots(&self) -> impl Iterator<Item = (F, F)> + '_ {
        self.xs.iter().copied().zip(self.gs.iter().copied())
    }

    fn eval(&self, p: Pos<F>) -> F {
        let n = self.xs.len();
        let x = p.x;
        let v = if x <= self.xs[0] {
            self.gs[0] + self.slopes[0] * p.minus(Pos::from_x(self.xs[0]))
        } else if x >= self.xs[n - 1] {
            self.gs[n - 1] + self.slopes[n - 2] * p.minus(Pos::from_x(self.xs[n - 1]))
        } else {
            let j = self.xs.partition_point(|&k| k <= x).min(n - 1);
            self.gs[j - 1] + self.slopes[j - 1] * (x - self.xs[j - 1])
        };
        v.max(F::positivity_floor())
    }

    fn endpoints(&self) -> Endpoints<F> {
        let n = self.xs.len();
        let a = Confidence::Analytic;
        let at0 = self.gs[0] - self.slopes[0] * self.xs[0];
        let low = if at0 >= F::zero() {
            EndSide { value: at0, slope: self.slopes[0], confidence: a }
        } else {
            // Clipped at the positivity floor before reaching 0.
            EndSide { value: F::zero(), slope: F::zero(), confidence: a }
        };
        let s_last = self.slopes[n - 2];
        let at1 = self.gs[n - 1] + s_last * (F::one() - self.xs[n - 1]);
        let high = if at1 >= F::zero() {
            EndSide { value: at1, slope: s_last, confidence: a }
        } else {
            EndSide { value: F::zero(), slope: F::zero(), confidence: a }
        };
        Endpoints { low, high }
    }
}

/// A straight bridge `[p, q]` of a concave majorant.
#[derive(Debug, Clone, PartialEq)]
struct Bridge<F> {
    p: Pos<F>,
    q: Pos<F>,
    gp: F,
    gq: F,
}

impl<F: Real> Bridge<F> {
    fn contains(&self, x: Pos<F>) -> bool {
        x.x > self.p.x && x.x < self.q.x
    }

    fn eval(&self, x: Pos<F>) -> F {
        let w = x.minus(self.p) / self.q.minus(self.p);
        self.gp + (self.gq - self.gp) * w
    }
}

#[derive(Debug, Clone)]
struct MajorantData<F: Real> {
    a: Arc<Generator<F>>,
    b: Arc<Generator<F>>,
    bridges: Vec<Bridge<F>>,
}

impl<F: Real> MajorantData<F> {
    fn eval(&self, p: Pos<F>) -> F {
        let base = self.a.eval_pos(p).max(self.b.eval_pos(p));
        let j = self.bridges.partition_point(|br| br.q.x <= p.x);
        match self.bridges.get(j) {
            Some(br) if br.contains(p) => br.eval(p).max(base),
            _ => base,
        }
    }
}

#[derive(Debug, Clone)]
enum Kind<F: Real> {
    Builtin(Builtin),
    Knots { table: KnotTable<F>, label: String },
    Scale(F, Arc<Generator<F>>),
    Dual(Arc<Generator<F>>),
    Sum(Arc<Generator<F>>, Arc<Generator<F>>),
    Min(Arc<Generator<F>>, Arc<Generator<F>>),
    Majorant(Arc<MajorantData<F>>),
}

/// A validated concave generator.
#[derive(Debug, Clone)]
pub struct Generator<F: Real = f64> {
    kind: Kind<F>,
    endpoints: Endpoints<F>,
    peak: F,
    breakpoints: Vec<F>,
}

/// Build one of the closed-form generators by name.
pub fn make_builtin_generator<F: Real>(name: &str) -> Result<Generator<F>> {
    Ok(Generator::builtin(Builtin::from_name(name)?))
}

/// Piecewise-linear generator through `knots`, linearly extrapolated to the
/// endpoints and clipped below at a positivity floor.
pub fn make_knot_generator<F: Real>(knots: &[(F, F)]) -> Result<Generator<F>> {
    Generator::from_knots(knots, "inline")
}

pub fn scale_generator<F: Real>(lambda: F, g: &Generator<F>) -> Result<Generator<F>> {
    if !(lambda > F::zero()) || !lambda.is_finite() {
        return Err(Error::Domain(format!("scale factor must be positive, got {lambda}")));
    }
    Generator::composite(Kind::Scale(lambda, Arc::new(g.clone())), g.breakpoints.clone())
}

/// `G~(x) = G(1 - x)`.
pub fn dual_generator<F: Real>(g: &Generator<F>) -> Generator<F> {
    let bps = g.breakpoints.iter().rev().map(|&b| F::one() - b).collect();
    Generator::composite(Kind::Dual(Arc::new(g.clone())), bps).expect("reflection preserves concavity")
}

/// Pointwise sum; its semigroup is the mixture of the two semigroups.
pub fn sum_generators<F: Real>(a: &Generator<F>, b: &Generator<F>) -> Generator<F> {
    let bps = merge_breakpoints(&a.breakpoints, &b.breakpoints);
    Generator::composite(Kind::Sum(Arc::new(a.clone()), Arc::new(b.clone())), bps)
        .expect("sum of concave functions is concave")
}

/// Pointwise minimum; its semigroup is the largest one dominated by both.
pub fn min_generators<F: Real>(a: &Generator<F>, b: &Generator<F>) -> Generator<F> {
    let mut bps = merge_breakpoints(&a.breakpoints, &b.breakpoints);
    bps.extend(crossings(a, b));
    bps.sort_by(|x, y| x.partial_cmp(y).unwrap());
    bps.dedup();
    Generator::composite(Kind::Min(Arc::new(a.clone()), Arc::new(b.clone())), bps)
        .expect("minimum of concave functions is concave")
}

/// Least concave majorant of `max(a, b)`; its semigroup is the smallest one
/// dominating both.
pub fn concave_majorant_max<F: Real>(a: &Generator<F>, b: &Generator<F>) -> Result<Generator<F>> {
    let a = Arc::new(a.clone());
    let b = Arc::new(b.clone());
    let data = build_majorant(a.clone(), b.clone());
    let mut bps: Vec<F> = merge_breakpoints(&a.breakpoints, &b.breakpoints)
        .into_iter()
        .filter(|&x| !data.bridges.iter().any(|br| br.contains(Pos::from_x(x))))
        .collect();
    for br in &data.bridges {
        for e in [br.p.x, br.q.x] {
            if e > F::zero() && e < F::one() {
                bps.push(e);
            }
        }
    }
    bps.sort_by(|x, y| x.partial_cmp(y).unwrap());
    bps.dedup();
    Generator::composite(Kind::Majorant(Arc::new(data)), bps)
}

impl<F: Real> Generator<F> {
    pub fn builtin(b: Builtin) -> Self {
        let mut g = Generator { kind: Kind::Builtin(b), endpoints: b.endpoints(), peak: F::one(), breakpoints: Vec::new() };
        g.peak = g.grid_peak();
        g
    }

    pub fn from_knots(knots: &[(F, F)], label: &str) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::Validation(format!("need at least 2 knots, got {}", knots.len())));
        }
        for (i, &(x, g)) in knots.iter().enumerate() {
            if !(x > F::zero() && x < F::one()) {
                return Err(Error::Domain(format!("knot {i}: x = {x} is outside (0, 1)")));
            }
            if !(g > F::zero()) || !g.is_finite() {
                return Err(Error::Domain(format!("knot {i}: g = {g} must be positive")));
            }
            if i > 0 && !(x > knots[i - 1].0) {
                return Err(Error::Validation(format!("knot abscissae must increase strictly (knot {i})")));
            }
        }
        let xs: Vec<F> = knots.iter().map(|k| k.0).collect();
        let gs: Vec<F> = knots.iter().map(|k| k.1).collect();
        let slopes: Vec<F> = (1..xs.len()).map(|i| (gs[i] - gs[i - 1]) / (xs[i] - xs[i - 1])).collect();
        for i in 1..slopes.len() {
            let slack = F::lit(64.0) * F::epsilon() * slopes[i].abs().max(slopes[i - 1].abs()).max(F::one());
            if slopes[i] > slopes[i - 1] + slack {
                return Err(Error::Validation(format!(
                    "knots are not concave: slope rises from {} to {} across ({}, {}), ({}, {}), ({}, {})",
                    slopes[i - 1],
                    slopes[i],
                    xs[i - 1],
                    gs[i - 1],
                    xs[i],
                    gs[i],
                    xs[i + 1],
                    gs[i + 1]
                )));
            }
        }
        let table = KnotTable { xs: xs.clone(), gs, slopes };
        let endpoints = table.endpoints();
        let mut g = Generator { kind: Kind::Knots { table, label: label.to_string() }, endpoints, peak: F::one(), breakpoints: xs };
        g.peak = g.grid_peak();
        Ok(g)
    }

    fn composite(kind: Kind<F>, breakpoints: Vec<F>) -> Result<Self> {
        let mut g = Generator {
            kind,
            endpoints: Builtin::Cvar.endpoints(),
            peak: F::one(),
            breakpoints,
        };
        g.peak = g.grid_peak();
        g.validate()?;
        g.endpoints = estimate_endpoints(&g);
        Ok(g)
    }

    /// The same function with its closed-form knowledge hidden: endpoints and
    /// tails are then decided numerically.
    pub fn opaque(&self) -> Self {
        Generator::composite(Kind::Scale(F::one(), Arc::new(self.clone())), self.breakpoints.clone())
            .expect("already validated")
    }

    /// `G(x)`, extended by 0 outside `(0, 1)`.
    pub fn eval(&self, x: F) -> F {
        if !(x > F::zero() && x < F::one()) {
            return F::zero();
        }
        self.eval_pos(Pos::from_x(x))
    }

    /// `G` at a two-sided position.
    pub fn eval_pos(&self, p: Pos<F>) -> F {
        match &self.kind {
            Kind::Builtin(b) => b.eval(p),
            Kind::Knots { table, .. } => table.eval(p),
            Kind::Scale(l, g) => *l * g.eval_pos(p),
            Kind::Dual(g) => g.eval_pos(p.reflect()),
            Kind::Sum(a, b) => a.eval_pos(p) + b.eval_pos(p),
            Kind::Min(a, b) => a.eval_pos(p).min(b.eval_pos(p)),
            Kind::Majorant(m) => m.eval(p),
        }
    }

    pub fn endpoints(&self) -> &Endpoints<F> {
        &self.endpoints
    }

    /// Maximum over the validation grid.
    pub fn peak(&self) -> F {
        self.peak
    }

    /// Points in `(0, 1)` where `G` may have a kink.
    pub fn breakpoints(&self) -> &[F] {
        &self.breakpoints
    }

    pub fn as_builtin(&self) -> Option<Builtin> {
        match self.kind {
            Kind::Builtin(b) => Some(b),
            _ => None,
        }
    }

    pub fn knot_table(&self) -> Option<&KnotTable<F>> {
        match &self.kind {
            Kind::Knots { table, .. } => Some(table),
            _ => None,
        }
    }

    /// Short human-readable description in the spec grammar.
    pub fn describe(&self) -> String {
        match &self.kind {
            Kind::Builtin(b) => b.name().to_string(),
            Kind::Knots { label, .. } => format!("knots:{label}"),
            Kind::Scale(l, g) => format!("scale({l},{})", g.describe()),
            Kind::Dual(g) => format!("dual({})", g.describe()),
            Kind::Sum(a, b) => format!("mix({},{})", a.describe(), b.describe()),
            Kind::Min(a, b) => format!("min({},{})", a.describe(), b.describe()),
            Kind::Majorant(m) => format!("max({},{})", m.a.describe(), m.b.describe()),
        }
    }

    /// Check positivity and concavity on the validation grid.
    ///
    /// Concavity is tested on consecutive triples `a < m < b` as
    /// `(G(m)-G(a))/(m-a) >= (G(b)-G(m))/(b-m) - 1e-10 * max G`.
    pub fn validate(&self) -> Result<()> {
        let xs = validation_grid::<F>();
        let gs: Vec<F> = xs.iter().map(|&x| self.eval(x)).collect();
        for (&x, &g) in xs.iter().zip(&gs) {
            if !(g > F::zero()) || !g.is_finite() {
                return Err(Error::numeric(x.as_f64(), format!("generator value {g} is not positive and finite")));
            }
        }
        let tol = F::lit(1e-10) * self.peak;
        if let Some((i, excess)) = worst_concavity_violation(&xs, &gs) {
            if excess > tol {
                return Err(Error::Validation(format!(
                    "generator is not concave at ({}, {}), ({}, {}), ({}, {}): slope rises by {}",
                    xs[i - 1],
                    gs[i - 1],
                    xs[i],
                    gs[i],
                    xs[i + 1],
                    gs[i + 1],
                    excess
                )));
            }
        }
        Ok(())
    }

    fn grid_peak(&self) -> F {
        validation_grid::<F>().into_iter().map(|x| self.eval(x)).fold(F::zero(), F::max)
    }
}

/// `x_i = i / 1002`, `i = 1..=1001`.
pub fn validation_grid<F: Real>() -> Vec<F> {
    let n = VALIDATION_POINTS;
    (1..=n).map(|i| F::from_usize_lossy(i) / F::from_usize_lossy(n + 1)).collect()
}

/// Largest increase of consecutive difference quotients, with the index of the
/// middle point.
pub fn worst_concavity_violation<F: Real>(xs: &[F], gs: &[F]) -> Option<(usize, F)> {
    let mut worst: Option<(usize, F)> = None;
    for i in 1..xs.len().saturating_sub(1) {
        let left = (gs[i] - gs[i - 1]) / (xs[i] - xs[i - 1]);
        let right = (gs[i + 1] - gs[i]) / (xs[i + 1] - xs[i]);
        let excess = right - left;
        if worst.is_none_or(|(_, w)| excess > w) {
            worst = Some((i, excess));
        }
    }
    worst
}

/// Endpoint limits and slopes, estimated from evaluations at `2^-k`.
pub fn endpoint_slopes<F: Real>(g: &Generator<F>) -> Endpoints<F> {
    match &g.kind {
        Kind::Builtin(_) | Kind::Knots { .. } => g.endpoints,
        _ => estimate_endpoints(g),
    }
}

fn estimate_endpoints<F: Real>(g: &Generator<F>) -> Endpoints<F> {
    let low = estimate_side(|h| g.eval_pos(Pos::lower(h)));
    let mut high = estimate_side(|h| g.eval_pos(Pos::upper(h)));
    // At 1 the slope is G'_-(1) = -lim (G(1-h) - G(1-)) / h.
    high.slope = -high.slope;
    Endpoints { low, high }
}

/// Limit of `f(h)` and of `(f(h) - f(0+)) / h` as `h -> 0`.
fn estimate_side<F: Real>(f: impl Fn(F) -> F) -> EndSide<F> {
    let depth = F::octave_depth();
    let hs: Vec<F> = (1..=depth).map(|k| F::two().powi(-(k as i32))).collect();
    let vals: Vec<F> = hs.iter().map(|&h| f(h)).collect();
    let n = vals.len();
    let deepest = vals[n - 1];
    let value = if deepest <= F::min_positive_value().sqrt() {
        F::zero()
    } else {
        (F::two() * vals[n - 1] - vals[n - 2]).max(F::zero())
    };

    let quotients: Vec<F> = if value == F::zero() {
        vals.iter().zip(&hs).map(|(&v, &h)| v / h).collect()
    } else {
        let resolvable = F::lit(1e-9) * value;
        let mut q = Vec::new();
        for k in 0..n - 1 {
            let dv = vals[k] - vals[k + 1];
            if dv.abs() <= resolvable && k >= 3 {
                break;
            }
            q.push(dv / (hs[k] - hs[k + 1]));
        }
        q
    };

    let m = quotients.len();
    if m == 0 {
        return EndSide { value, slope: F::zero(), confidence: Confidence::NumericBorderline };
    }
    let last = quotients[m - 1];
    let spec_rule = m >= 2
        && last > F::lit(SLOPE_DIVERGENCE)
        && quotients[m - 2] > F::zero()
        && last / quotients[m - 2] >= F::lit(SLOPE_GROWTH);
    let incs: Vec<F> = quotients.windows(2).map(|w| w[1] - w[0]).collect();
    let verdict = classify_series(&incs, F::lit(SLOPE_DIVERGENCE));
    if spec_rule || verdict.divergent {
        let confidence = if spec_rule { Confidence::NumericConfident } else { verdict.confidence };
        EndSide { value, slope: F::infinity(), confidence }
    } else {
        EndSide { value, slope: extrapolate_limit(&quotients), confidence: verdict.confidence }
    }
}

fn merge_breakpoints<F: Real>(a: &[F], b: &[F]) -> Vec<F> {
    let mut v: Vec<F> = a.iter().chain(b).copied().collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v.dedup();
    v
}

/// Sign changes of `a - b` on the majorant grid, refined by bisection.
fn crossings<F: Real>(a: &Generator<F>, b: &Generator<F>) -> Vec<F> {
    let grid = uniform_grid::<F>(MAJORANT_GRID);
    let diff = |x: F| a.eval(x) - b.eval(x);
    let mut out = Vec::new();
    for w in grid.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (dlo, dhi) = (diff(lo), diff(hi));
        if dlo == F::zero() || dlo.signum() == dhi.signum() {
            continue;
        }
        for _ in 0..80 {
            let mid = lo + (hi - lo) * F::half();
            if !(mid > lo && mid < hi) {
                break;
            }
            if diff(mid).signum() == dlo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(lo + (hi - lo) * F::half());
    }
    out
}

fn uniform_grid<F: Real>(n: usize) -> Vec<F> {
    (1..=n).map(|i| F::from_usize_lossy(i) / F::from_usize_lossy(n + 1)).collect()
}

fn build_majorant<F: Real>(a: Arc<Generator<F>>, b: Arc<Generator<F>>) -> MajorantData<F> {
    let f = |p: Pos<F>| a.eval_pos(p).max(b.eval_pos(p));
    let mut xs: Vec<F> = uniform_grid(MAJORANT_GRID);
    for k in 13..=40 {
        let h = F::two().powi(-k);
        xs.push(h);
        xs.push(F::one() - h);
    }
    xs.extend(a.breakpoints.iter().chain(&b.breakpoints).copied());
    xs.retain(|&x| x > F::zero() && x < F::one());
    xs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    xs.dedup();

    let mut pos: Vec<Pos<F>> = Vec::with_capacity(xs.len() + 2);
    pos.push(Pos::zero());
    pos.extend(xs.iter().map(|&x| Pos::from_x(x)));
    pos.push(Pos::one());
    let g0 = a.endpoints.g0().max(b.endpoints.g0());
    let g1 = a.endpoints.g1().max(b.endpoints.g1());
    let n = pos.len();
    let vals: Vec<F> = pos
        .iter()
        .enumerate()
        .map(|(i, &p)| if i == 0 { g0 } else if i == n - 1 { g1 } else { f(p) })
        .collect();
    let pts: Vec<(F, F)> = pos.iter().zip(&vals).map(|(p, &v)| (p.x, v)).collect();
    let idx = hull::upper_hull_indices(&pts);

    let mut bridges = Vec::new();
    for w in idx.windows(2) {
        let (i, j) = (w[0], w[1]);
        if j == i + 1 {
            continue;
        }
        // Skip stretches where the function already lies on the chord.
        let chord = |k: usize| vals[i] + (vals[j] - vals[i]) * pos[k].minus(pos[i]) / pos[j].minus(pos[i]);
        let gap = (i + 1..j).map(|k| chord(k) - vals[k]).fold(F::zero(), F::max);
        if gap <= F::lit(1e-14) * vals[i].abs().max(vals[j].abs()).max(F::min_positive_value()) {
            continue;
        }
        bridges.push(refine_bridge(&f, &pos, &vals, i, j));
    }
    MajorantData { a, b, bridges }
}

/// Move the hull vertices of a bridge to the true tangent points.
fn refine_bridge<F: Real>(f: &impl Fn(Pos<F>) -> F, pos: &[Pos<F>], vals: &[F], i: usize, j: usize) -> Bridge<F> {
    let n = pos.len();
    let (mut p, mut gp) = (pos[i], vals[i]);
    let (mut q, mut gq) = (pos[j], vals[j]);
    for _ in 0..30 {
        let slope = (gq - gp) / q.minus(p);
        let mut moved = false;
        if i > 0 {
            let (np, ngp) = tangent_point(f, pos[i - 1], pos[(i + 1).min(j)], slope);
            if ngp - slope * np.minus(p) > gp {
                moved |= np != p;
                p = np;
                gp = ngp;
            }
        }
        let slope = (gq - gp) / q.minus(p);
        if j < n - 1 {
            let (nq, ngq) = tangent_point(f, pos[(j - 1).max(i)], pos[j + 1], slope);
            if ngq - slope * nq.minus(q) > gq {
                moved |= nq != q;
                q = nq;
                gq = ngq;
            }
        }
        if !moved {
            break;
        }
    }
    Bridge { p, q, gp, gq }
}

/// Maximise `f(x) - slope * x` over `[lo, hi]` by golden-section search.
fn tangent_point<F: Real>(f: &impl Fn(Pos<F>) -> F, lo: Pos<F>, hi: Pos<F>, slope: F) -> (Pos<F>, F) {
    let phi = |x: F| {
        let p = Pos::from_x(x);
        f(p) - slope * x
    };
    let ratio = F::lit(0.618_033_988_749_894_8);
    let (mut a, mut b) = (lo.x, hi.x);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..120 {
        if !(b - a > F::epsilon() * F::lit(4.0) * b.abs().max(F::min_positive_value())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = phi(d);
        }
    }
    let x = if fc >= fd { c } else { d };
    let p = Pos::from_x(x);
    (p, f(p))
}
