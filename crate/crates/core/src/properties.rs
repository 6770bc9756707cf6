//! Properties I-IV of a distortion semigroup, decided from its generator:
//!
//! * I   `Psi_t(0+) = 0`: `G(0+) = 0` and `int_0 ds/G = inf`;
//! * II  strict concavity of `G`;
//! * III `G'_+(0) = +inf`;
//! * IV  `Psi_t'_-(1) = 0`: `int^1 ds/G < inf` or `G'_-(1) = -inf`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::{Builtin, Generator};
use crate::real::{Pos, Real};
use crate::semigroup::{Semigroup, DEFAULT_ACCURACY};
use crate::tail::Confidence;

/// Chord slack margin relative to `max G`.
pub const STRICTNESS_MARGIN: f64 = 1e-9;
const CONCAVITY_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroAtZero<F> {
    pub holds: bool,
    pub confidence: Confidence,
    pub g0: F,
    pub lower_tail_divergent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictConcavity<F> {
    pub holds: bool,
    pub confidence: Confidence,
    /// Smallest `G(m) - chord(m)` over consecutive grid triples.
    pub min_slack: F,
    pub margin: F,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfiniteSlopeAtZero<F> {
    pub holds: bool,
    pub confidence: Confidence,
    pub slope: F,
    /// `(h, (G(h) - G(0+)) / h)` for shrinking `h`.
    pub trace: Vec<(F, F)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeBranch {
    IntegralConverges,
    SlopeMinusInfinity,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroSlopeAtOne<F> {
    pub holds: bool,
    pub confidence: Confidence,
    pub branch: SlopeBranch,
    /// `int_{1/2}^1 ds/G`, infinite when divergent.
    pub upper_integral: F,
    pub slope: F,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport<F> {
    pub generator: String,
    pub zero_at_zero: ZeroAtZero<F>,
    pub strict_concavity: StrictConcavity<F>,
    pub infinite_slope_at_zero: InfiniteSlopeAtZero<F>,
    pub zero_slope_at_one: ZeroSlopeAtOne<F>,
    pub notes: Vec<String>,
}

impl<F: Real> PropertyReport<F> {
    /// Verdicts in the order I, II, III, IV.
    pub fn verdicts(&self) -> [(bool, Confidence); 4] {
        [
            (self.zero_at_zero.holds, self.zero_at_zero.confidence),
            (self.strict_concavity.holds, self.strict_concavity.confidence),
            (self.infinite_slope_at_zero.holds, self.infinite_slope_at_zero.confidence),
            (self.zero_slope_at_one.holds, self.zero_slope_at_one.confidence),
        ]
    }

    /// `+`/`-` per property, e.g. `"++-+"`.
    pub fn signs(&self) -> String {
        self.verdicts().iter().map(|&(h, _)| if h { '+' } else { '-' }).collect()
    }
}

/// Decide I-IV, using closed-form knowledge where the generator has it.
pub fn diagnose<F: Real>(g: &Generator<F>) -> Result<PropertyReport<F>> {
    let mut r = decide(g)?;
    r.notes = notes(g.as_builtin());
    Ok(r)
}

/// Decide I-IV from point evaluations only, ignoring closed forms.
pub fn diagnose_numeric<F: Real>(g: &Generator<F>) -> Result<PropertyReport<F>> {
    let mut r = decide(&g.opaque())?;
    r.generator = g.describe();
    r.notes = notes(g.as_builtin());
    Ok(r)
}

fn notes(b: Option<Builtin>) -> Vec<String> {
    match b {
        Some(b @ (Builtin::Cvar | Builtin::Aimin)) => vec![format!(
            "{b}: property IV holds by the endpoint criteria (Psi_t'(1-) = 0), although the published table marks it '-'"
        )],
        _ => Vec::new(),
    }
}

fn decide<F: Real>(g: &Generator<F>) -> Result<PropertyReport<F>> {
    let s = Semigroup::new(g, F::lit(DEFAULT_ACCURACY))?;
    let e = *g.endpoints();
    let (lo, hi) = (*s.lower_tail(), *s.upper_tail());

    let zero_at_zero = ZeroAtZero {
        holds: e.g0() == F::zero() && lo.divergent,
        confidence: e.low.confidence.min(lo.confidence),
        g0: e.g0(),
        lower_tail_divergent: lo.divergent,
    };

    let strict_concavity = strictness(g);

    let depth = F::octave_depth() as i32;
    let trace = (1..=depth)
        .step_by(4)
        .map(|k| {
            let h = F::two().powi(-k);
            (h, (g.eval_pos(Pos::lower(h)) - e.g0()) / h)
        })
        .collect();
    let infinite_slope_at_zero =
        InfiniteSlopeAtZero { holds: e.s0() == F::infinity(), confidence: e.low.confidence, slope: e.s0(), trace };

    let steep = e.s1() == F::neg_infinity();
    let branch = if !hi.divergent {
        SlopeBranch::IntegralConverges
    } else if steep {
        SlopeBranch::SlopeMinusInfinity
    } else {
        SlopeBranch::Neither
    };
    let confidence = match branch {
        SlopeBranch::IntegralConverges => hi.confidence,
        SlopeBranch::SlopeMinusInfinity => e.high.confidence,
        SlopeBranch::Neither => hi.confidence.min(e.high.confidence),
    };
    let zero_slope_at_one = ZeroSlopeAtOne {
        holds: branch != SlopeBranch::Neither,
        confidence,
        branch,
        upper_integral: hi.limit,
        slope: e.s1(),
    };

    Ok(PropertyReport {
        generator: g.describe(),
        zero_at_zero,
        strict_concavity,
        infinite_slope_at_zero,
        zero_slope_at_one,
        notes: Vec::new(),
    })
}

fn strictness<F: Real>(g: &Generator<F>) -> StrictConcavity<F> {
    let n = CONCAVITY_POINTS;
    let xs: Vec<F> = (1..n).map(|i| F::from_usize_lossy(i) / F::from_usize_lossy(n)).collect();
    let gs: Vec<F> = xs.iter().map(|&x| g.eval(x)).collect();
    let peak = gs.iter().copied().fold(F::zero(), F::max);
    let margin = F::lit(STRICTNESS_MARGIN) * peak;
    let min_slack = (1..xs.len() - 1)
        .map(|i| gs[i] - (gs[i - 1] + gs[i + 1]) * F::half())
        .fold(F::infinity(), F::min);
    let numeric = min_slack > margin;
    let (holds, confidence) = match g.as_builtin() {
        Some(b) => (b != Builtin::Cvar, Confidence::Analytic),
        // Affine between knots.
        None if g.knot_table().is_some() => (false, Confidence::Analytic),
        None => {
            let close = min_slack > margin * F::lit(0.1) && min_slack < margin * F::lit(10.0);
            (numeric, if close { Confidence::NumericBorderline } else { Confidence::NumericConfident })
        }
    };
    StrictConcavity { holds, confidence, min_slack, margin }
}

/// Table of verdicts for several generators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyTable<F> {
    pub rows: Vec<PropertyReport<F>>,
}

impl<F: Real> PropertyTable<F> {
    /// Tab-separated rows; each cell is `+` or `-` followed by the confidence
    /// marker (`a` analytic, `n` numeric, `?` borderline). Notes follow as
    /// `#` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("generator\tI\tII\tIII\tIV\n");
        for r in &self.rows {
            out.push_str(&r.generator);
            for (h, c) in r.verdicts() {
                let _ = write!(out, "\t{}{}", if h { '+' } else { '-' }, c.marker());
            }
            out.push('\n');
        }
        for r in &self.rows {
            for n in &r.notes {
                let _ = writeln!(out, "# {n}");
            }
        }
        out
    }
}

pub fn table_report<F: Real>(gens: &[Generator<F>]) -> Result<PropertyTable<F>> {
    if gens.is_empty() {
        return Err(Error::Validation("table needs at least one generator".into()));
    }
    Ok(PropertyTable { rows: gens.iter().map(diagnose).collect::<Result<_>>()? })
}
