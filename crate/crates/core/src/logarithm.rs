//! Recovering the generator of a semigroup from its time-one map.
//!
//! Along the flow, `y(tau) = Psi_tau(x)` solves `y' = G(y)`, and the chain
//! rule gives `G(x) = G(y_n) / prod_{k<n} Psi'(y_k)` for the iterates
//! `y_k = Psi^k(x)`. The product is accumulated in log space; `G(y_n)` deep in
//! the upper tail is read off the iterates in the coordinate
//! `r = ln(-ln(1 - y))`, in which the flow is asymptotically affine:
//! `G(y) = (1 - y) s r'(tau)` with `s = -ln(1 - y)`, and `r'` is taken by
//! central differences over the integer times `k`.
//!
//! When `Psi'_-(1) > 0` the tail factor tends to `-ln Psi'_-(1) (1 - y_n)` and
//! the estimate is the classical limit formula; the uniqueness statement only
//! covers that case, and the report says whether it applies.

use serde::Serialize;

use crate::distortion::Distortion;
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::hull::upper_hull_indices;
use crate::real::{Pos, Real};
use crate::semigroup::{build_semigroup, Semigroup};

/// Central first-derivative stencils of orders 2, 4, 6 and 8 (right halves).
const STENCILS: [&[f64]; 4] = [
    &[0.5],
    &[2.0 / 3.0, -1.0 / 12.0],
    &[3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0],
    &[4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0],
];

/// Tuning of the recovery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogOptions<F> {
    /// Hard cap on the number of compositions per point.
    pub max_iter: usize,
    /// Iteration stops once `1 - Psi^n(x)` falls below this value.
    pub tail_cutoff: F,
    /// Relative agreement of successive stencil orders counted as converged.
    pub rel_tol: F,
    /// Relative chord slack (times `max G`) tolerated by the concavity check.
    pub concavity_tol: F,
    /// Roundtrip error above which existence is rejected.
    pub roundtrip_limit: F,
    /// Accuracy of the semigroup rebuilt from the recovered knots.
    pub rebuild_accuracy: F,
}

impl<F: Real> Default for LogOptions<F> {
    fn default() -> Self {
        LogOptions {
            max_iter: 10_000,
            tail_cutoff: F::lit(1e-200).max(F::min_positive_value().sqrt()),
            rel_tol: F::lit(1e-6),
            concavity_tol: F::lit(1e-6),
            roundtrip_limit: F::lit(1e-3),
            rebuild_accuracy: F::lit(1e-9),
        }
    }
}

/// Steps of `0.005`, the thousandths next to either endpoint, and `2^-k`,
/// `1 - 2^-k` for `k = 7..=14`.
pub fn default_grid<F: Real>() -> Vec<F> {
    let mut g: Vec<F> = (1..200).map(|i| F::from_usize_lossy(i) / F::lit(200.0)).collect();
    for i in (1..10).chain(991..1000) {
        g.push(F::from_usize_lossy(i) / F::lit(1000.0));
    }
    for k in 7..=14 {
        let h = F::two().powi(-k);
        g.push(h);
        g.push(F::one() - h);
    }
    g.sort_by(|a, b| a.partial_cmp(b).unwrap());
    g.dedup();
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointEstimate<F> {
    pub x: F,
    pub g: F,
    /// Number of compositions used.
    pub iterations: usize,
    /// Change between the two highest stencil orders, relative.
    pub rel_change: F,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityReport<F> {
    pub passed: bool,
    /// Consecutive grid triple with the largest chord excess.
    pub worst_triple: Option<[(F, F); 3]>,
    /// `chord(m) - G(m)` at that triple, positive when concavity fails.
    pub violation: F,
    pub tolerance: F,
}

/// A multiplicative jump of the estimates between two nearby points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpEvidence<F> {
    pub location: F,
    /// `max(G(a+)/G(a-), G(a-)/G(a+))`.
    pub factor: F,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogRecovery<F> {
    pub grid: Vec<F>,
    pub estimates: Vec<PointEstimate<F>>,
    /// `Psi'_-(1)` used to decide whether the uniqueness hypothesis holds.
    pub psi_prime_at_1: F,
    pub hypothesis_holds: bool,
    /// `Psi` is the identity: the generator vanishes, outside the admissible class.
    pub trivial: bool,
    pub concavity: ConcavityReport<F>,
    pub jump: Option<JumpEvidence<F>>,
    /// `max |Psi_1^{rebuilt} - Psi|` over the grid.
    pub roundtrip_error: F,
    /// Knots of the exported generator (concave hull of the estimates).
    pub knots: Vec<(F, F)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Plausible,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceReport<F> {
    pub verdict: Verdict,
    pub reasons: Vec<String>,
    pub recovery: LogRecovery<F>,
}

/// Derivative rule used for `Psi'` along the orbit.
pub type DerivativeRule<'a, F> = &'a dyn Fn(Pos<F>) -> F;

struct Orbit<'a, F: Real> {
    psi: &'a Distortion<F>,
    deriv: Box<dyn Fn(Pos<F>) -> F + 'a>,
    opts: LogOptions<F>,
}

impl<'a, F: Real> Orbit<'a, F> {
    fn estimate(&self, x: F) -> Result<PointEstimate<F>> {
        let mut p = Pos::from_x(x);
        // r_k and the accumulated log-derivative L_k = sum_{j<k} ln Psi'(y_j).
        let mut r = Vec::new();
        let mut c = Vec::new();
        let mut s = Vec::new();
        let mut logprod = Vec::new();
        let mut acc = F::zero();
        loop {
            let sk = if p.is_upper() { -p.comp.ln() } else { -(-p.x).ln_1p() };
            r.push(sk.ln());
            s.push(sk);
            c.push(p.comp);
            logprod.push(acc);
            let n = r.len() - 1;
            if p.comp < self.opts.tail_cutoff || n >= self.opts.max_iter {
                break;
            }
            let d = (self.deriv)(p);
            if d == F::zero() && n > 0 {
                // Psi' has underflowed: the orbit is past the representable range.
                break;
            }
            if !(d > F::zero()) || !d.is_finite() {
                return Err(Error::numeric(p.x.as_f64(), format!("derivative product diverges: Psi' = {d}")));
            }
            let next = self.psi.eval_pos(p);
            if !(next.comp >= F::min_positive_value()) {
                // The next iterate is no longer representable away from 1.
                break;
            }
            if !(next.comp < p.comp) {
                return Err(Error::numeric(p.x.as_f64(), "orbit does not move towards 1"));
            }
            acc = acc + d.ln();
            p = next;
        }
        let last = r.len() - 1;
        // Highest-order stencils first; each needs m points on either side.
        let mut ests: Vec<F> = Vec::new();
        for m in (1..=STENCILS.len()).rev() {
            if last < 2 * m {
                continue;
            }
            let n = last - m;
            let mut dr = F::zero();
            for (j, &w) in STENCILS[m - 1].iter().enumerate() {
                dr = dr + F::lit(w) * (r[n + j + 1] - r[n - j - 1]);
            }
            if !(dr > F::zero()) {
                continue;
            }
            let ln_g = c[n].ln() + s[n].ln() + dr.ln() - logprod[n];
            ests.push(ln_g.exp());
            if ests.len() == 2 {
                break;
            }
        }
        if ests.is_empty() && last >= 1 {
            // Two points only: forward difference.
            let dr = r[1] - r[0];
            if dr > F::zero() {
                ests.push((c[0].ln() + s[0].ln() + dr.ln()).exp());
            }
        }
        let g = *ests.first().ok_or_else(|| {
            Error::numeric(x.as_f64(), "orbit too short to estimate the generator")
        })?;
        let rel_change = if ests.len() > 1 { ((ests[0] - ests[1]) / ests[0]).abs() } else { F::infinity() };
        Ok(PointEstimate {
            x,
            g,
            iterations: last,
            rel_change,
            converged: rel_change <= self.opts.rel_tol,
        })
    }
}

/// Central difference of `Psi` with a step scaled to the distance from the
/// nearer endpoint.
fn numeric_derivative<F: Real>(psi: &Distortion<F>, p: Pos<F>) -> F {
    let delta = F::lit(1e-5);
    if p.is_upper() {
        let h = p.comp * delta;
        let a = psi.eval_pos(Pos::upper(p.comp + h)).comp;
        let b = psi.eval_pos(Pos::upper(p.comp - h)).comp;
        (a - b) / (F::two() * h)
    } else {
        let h = p.x * delta;
        let a = psi.eval_pos(Pos::lower(p.x + h)).x;
        let b = psi.eval_pos(Pos::lower(p.x - h)).x;
        (a - b) / (F::two() * h)
    }
}

/// `Psi'_-(1)`: analytic when known, otherwise the one-sided quotients
/// `(1 - Psi(1 - h)) / h` at `h = 2^-k` with Richardson extrapolation.
pub fn left_slope_at_one<F: Real>(psi: &Distortion<F>) -> F {
    let analytic = psi.left_slope_at_1();
    if analytic.is_finite() {
        return analytic;
    }
    let q = |k: i32| {
        let h = F::two().powi(-k);
        psi.eval_pos(Pos::upper(h)).comp / h
    };
    F::two() * q(40) - q(39)
}

/// Estimate the generator of `psi` on `grid`.
pub fn recover_generator<F: Real>(
    psi: &Distortion<F>,
    psi_deriv: Option<DerivativeRule<'_, F>>,
    grid: &[F],
    opts: &LogOptions<F>,
) -> Result<LogRecovery<F>> {
    validate_grid(grid)?;
    let slope1 = left_slope_at_one(psi);
    let probe = psi.eval_pos(Pos::upper(F::two().powi(-40)));
    if slope1 <= F::epsilon() && probe.comp <= F::zero() {
        return Err(Error::Precondition(format!(
            "the logarithm needs Psi'_-(1) > 0; here Psi'_-(1) = {slope1} and Psi reaches 1 before x = 1"
        )));
    }
    let gap = grid.iter().map(|&x| psi.eval(x) - x).fold(F::zero(), F::max);
    if gap <= F::lit(1e-14) {
        return Ok(trivial_recovery(grid, slope1));
    }

    let deriv: Box<dyn Fn(Pos<F>) -> F + '_> = match psi_deriv {
        Some(rule) => Box::new(rule),
        None => Box::new(move |p: Pos<F>| match psi.derivative(p) {
            Some(d) => d,
            None => numeric_derivative(psi, p),
        }),
    };
    let orbit = Orbit { psi, deriv, opts: *opts };
    let estimates = grid.iter().map(|&x| orbit.estimate(x)).collect::<Result<Vec<_>>>()?;
    let gs: Vec<F> = estimates.iter().map(|e| e.g).collect();

    let concavity = concavity_report(grid, &gs, opts.concavity_tol);
    let jump = if concavity.passed { None } else { locate_jump(&orbit, grid, &gs) };

    let pts: Vec<(F, F)> = grid.iter().copied().zip(gs.iter().copied()).collect();
    let knots: Vec<(F, F)> = upper_hull_indices(&pts).into_iter().map(|i| pts[i]).collect();
    let roundtrip_error = roundtrip(psi, &knots, grid, opts.rebuild_accuracy)?;

    Ok(LogRecovery {
        grid: grid.to_vec(),
        estimates,
        psi_prime_at_1: slope1,
        hypothesis_holds: slope1 > F::epsilon(),
        trivial: false,
        concavity,
        jump,
        roundtrip_error,
        knots,
    })
}

/// Necessary-condition diagnostic for the existence of a logarithm.
pub fn existence_check<F: Real>(
    psi: &Distortion<F>,
    psi_deriv: Option<DerivativeRule<'_, F>>,
    grid: &[F],
    opts: &LogOptions<F>,
) -> Result<ExistenceReport<F>> {
    let recovery = recover_generator(psi, psi_deriv, grid, opts)?;
    let mut reasons = Vec::new();
    if recovery.trivial {
        reasons.push("identity distortion: generator is identically zero (trivial semigroup)".to_string());
    }
    if !recovery.concavity.passed {
        let mut r = format!("estimates are not concave (chord excess {})", recovery.concavity.violation);
        if let Some(j) = recovery.jump {
            r.push_str(&format!("; jump by factor {} at x = {}", j.factor, j.location));
        }
        reasons.push(r);
    }
    if !(recovery.roundtrip_error <= opts.roundtrip_limit) {
        reasons.push(format!(
            "rebuilt semigroup misses Psi by {} > {}",
            recovery.roundtrip_error, opts.roundtrip_limit
        ));
    }
    let rejected = !recovery.concavity.passed || !(recovery.roundtrip_error <= opts.roundtrip_limit);
    Ok(ExistenceReport { verdict: if rejected { Verdict::Rejected } else { Verdict::Plausible }, reasons, recovery })
}

/// The recovered generator as a knot generator.
pub fn recovered_generator<F: Real>(rec: &LogRecovery<F>) -> Result<Generator<F>> {
    if rec.trivial {
        return Err(Error::Domain("the identity has the zero generator, which is not admissible".into()));
    }
    Generator::from_knots(&rec.knots, "recovered")
}

fn validate_grid<F: Real>(grid: &[F]) -> Result<()> {
    if grid.len() < 3 {
        return Err(Error::Validation("grid needs at least 3 points".into()));
    }
    for (i, &x) in grid.iter().enumerate() {
        if !(x > F::zero() && x < F::one()) {
            return Err(Error::Domain(format!("grid point {i} = {x} is outside (0, 1)")));
        }
        if i > 0 && !(x > grid[i - 1]) {
            return Err(Error::Validation(format!("grid must increase strictly (point {i})")));
        }
    }
    Ok(())
}

fn trivial_recovery<F: Real>(grid: &[F], slope1: F) -> LogRecovery<F> {
    LogRecovery {
        grid: grid.to_vec(),
        estimates: grid
            .iter()
            .map(|&x| PointEstimate { x, g: F::zero(), iterations: 0, rel_change: F::zero(), converged: true })
            .collect(),
        psi_prime_at_1: slope1,
        hypothesis_holds: slope1 > F::epsilon(),
        trivial: true,
        concavity: ConcavityReport { passed: true, worst_triple: None, violation: F::zero(), tolerance: F::zero() },
        jump: None,
        roundtrip_error: F::zero(),
        knots: Vec::new(),
    }
}

fn concavity_report<F: Real>(xs: &[F], gs: &[F], rel_tol: F) -> ConcavityReport<F> {
    let peak = gs.iter().copied().fold(F::zero(), F::max);
    let tolerance = rel_tol * peak;
    let mut worst: Option<(usize, F)> = None;
    for i in 1..xs.len() - 1 {
        let w = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
        let chord = gs[i - 1] + (gs[i + 1] - gs[i - 1]) * w;
        let excess = chord - gs[i];
        if worst.is_none_or(|(_, e)| excess > e) {
            worst = Some((i, excess));
        }
    }
    let (i, violation) = worst.expect("grid has at least 3 points");
    ConcavityReport {
        passed: violation <= tolerance,
        worst_triple: Some([(xs[i - 1], gs[i - 1]), (xs[i], gs[i]), (xs[i + 1], gs[i + 1])]),
        violation,
        tolerance,
    }
}

/// Localise the largest ratio between neighbouring estimates by bisection.
fn locate_jump<F: Real>(orbit: &Orbit<'_, F>, xs: &[F], gs: &[F]) -> Option<JumpEvidence<F>> {
    let ratio = |a: F, b: F| (a / b).ln().abs();
    let (mut i, mut best) = (0, F::zero());
    for k in 0..xs.len() - 1 {
        let r = ratio(gs[k + 1], gs[k]);
        if r > best {
            best = r;
            i = k;
        }
    }
    let (mut lo, mut hi) = (xs[i], xs[i + 1]);
    let (mut glo, mut ghi) = (gs[i], gs[i + 1]);
    for _ in 0..45 {
        let mid = lo + (hi - lo) * F::half();
        if !(mid > lo && mid < hi) {
            break;
        }
        let gm = orbit.estimate(mid).ok()?.g;
        if ratio(gm, glo) >= ratio(ghi, gm) {
            hi = mid;
            ghi = gm;
        } else {
            lo = mid;
            glo = gm;
        }
    }
    let f = (ghi / glo).max(glo / ghi);
    Some(JumpEvidence { location: lo + (hi - lo) * F::half(), factor: f })
}

fn roundtrip<F: Real>(psi: &Distortion<F>, knots: &[(F, F)], grid: &[F], accuracy: F) -> Result<F> {
    let g = match Generator::from_knots(knots, "recovered") {
        Ok(g) => g,
        Err(_) => return Ok(F::infinity()),
    };
    let s: Semigroup<F> = build_semigroup(&g, accuracy)?;
    let mut worst = F::zero();
    for &x in grid {
        let a = s.psi_pos(F::one(), Pos::from_x(x));
        let b = psi.eval_pos(Pos::from_x(x));
        worst = worst.max(a.minus(b).abs());
    }
    Ok(worst)
}
