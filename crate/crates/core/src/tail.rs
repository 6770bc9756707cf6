//! Numerical decision between "finite limit" and "diverges" for monotone
//! sequences sampled at geometrically shrinking offsets.
//!
//! Both the endpoint slopes of a generator and the endpoint integrals of
//! `1/G` reduce to the same question: given nonnegative increments
//! `c_1, c_2, ...` collected over successive halvings, is `sum c_k` finite?
//! The rule combines an absolute cap with a power-law fit `c_k ~ k^-p`:
//! `p <= 1.1` is taken as divergence, `p >= 1.5` as convergence, and the band
//! in between is decided at `p = 1.25` and flagged borderline. This is a
//! heuristic; exact dichotomies cannot be decided from point values.

use serde::Serialize;

use crate::real::Real;

/// How a yes/no classification was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    Analytic,
    NumericConfident,
    NumericBorderline,
}

impl Confidence {
    /// The weaker of two confidences.
    pub fn min(self, other: Confidence) -> Confidence {
        use Confidence::*;
        match (self, other) {
            (NumericBorderline, _) | (_, NumericBorderline) => NumericBorderline,
            (NumericConfident, _) | (_, NumericConfident) => NumericConfident,
            _ => Analytic,
        }
    }

    pub fn marker(self) -> &'static str {
        match self {
            Confidence::Analytic => "a",
            Confidence::NumericConfident => "n",
            Confidence::NumericBorderline => "?",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailVerdict<F> {
    pub divergent: bool,
    pub confidence: Confidence,
    /// Sum of the increments that were observed.
    pub observed: F,
    /// Estimate of the unobserved remainder (0 when divergent).
    pub remainder: F,
    /// Fitted decay exponent `p`.
    pub exponent: F,
}

const DIVERGE_BELOW: f64 = 1.1;
const CONVERGE_ABOVE: f64 = 1.5;
const BORDER_SPLIT: f64 = 1.25;

/// Classify the series `sum increments`. `cap` is the absolute threshold above
/// which a still-growing sum is declared divergent outright.
pub fn classify_series<F: Real>(increments: &[F], cap: F) -> TailVerdict<F> {
    let incs: Vec<F> = increments.iter().map(|c| if c.is_nan() { F::zero() } else { c.max(F::zero()) }).collect();
    let observed = incs.iter().fold(F::zero(), |a, &c| a + c);
    let n = incs.len();
    let verdict = |divergent, confidence, remainder, exponent| TailVerdict {
        divergent,
        confidence,
        observed,
        remainder,
        exponent,
    };
    if n == 0 {
        return verdict(false, Confidence::NumericBorderline, F::zero(), F::nan());
    }
    if !observed.is_finite() {
        return verdict(true, Confidence::NumericConfident, F::zero(), F::zero());
    }
    let last = incs[n - 1];
    if observed > cap && last > F::epsilon() * observed {
        return verdict(true, Confidence::NumericConfident, F::zero(), F::zero());
    }
    if n < 8 {
        // Too short for a trend; only a vanishing tail is informative.
        let dead = last <= F::epsilon() * observed.max(F::min_positive_value());
        return verdict(!dead && last > F::zero(), Confidence::NumericBorderline, F::zero(), F::nan());
    }
    let w = (n / 8).max(1);
    let mean = |lo: usize, hi: usize| {
        let s = incs[lo..hi].iter().fold(F::zero(), |a, &c| a + c);
        s / F::from_usize_lossy(hi - lo)
    };
    let mid = n / 2;
    let early = mean(mid - w / 2, mid - w / 2 + w);
    let late = mean(n - w, n);
    let tiny = F::epsilon() * observed.max(F::min_positive_value());
    if late <= tiny || late == F::zero() {
        return verdict(false, Confidence::NumericConfident, F::zero(), F::infinity());
    }
    if early <= F::zero() {
        // Increments appeared only late: treat as growth.
        return verdict(true, Confidence::NumericBorderline, F::zero(), F::zero());
    }
    let k_early = F::from_usize_lossy(mid + 1);
    let k_late = F::from_usize_lossy(n - w / 2);
    let exponent = (early / late).ln() / (k_late / k_early).ln();
    let p = exponent.as_f64();
    if p <= DIVERGE_BELOW {
        verdict(true, Confidence::NumericConfident, F::zero(), exponent)
    } else if p >= CONVERGE_ABOVE {
        let remainder = tail_remainder(late, k_late, exponent);
        verdict(false, Confidence::NumericConfident, remainder, exponent)
    } else if p < BORDER_SPLIT {
        verdict(true, Confidence::NumericBorderline, F::zero(), exponent)
    } else {
        let remainder = tail_remainder(late, k_late, exponent);
        verdict(false, Confidence::NumericBorderline, remainder, exponent)
    }
}

/// `sum_{j>k} c k^p j^-p` for a power-law tail, `~ c k / (p - 1)`.
fn tail_remainder<F: Real>(c: F, k: F, p: F) -> F {
    if !p.is_finite() || p > F::lit(60.0) {
        return F::zero();
    }
    // Geometric decay shows up as a large exponent; the power-law bound is
    // then an overestimate but still tiny because `c` is tiny.
    c * k / (p - F::one())
}

/// Limit of a monotone sequence with a finite limit: Aitken extrapolation over
/// the last three terms when it is well conditioned.
pub fn extrapolate_limit<F: Real>(seq: &[F]) -> F {
    let n = seq.len();
    if n == 0 {
        return F::nan();
    }
    if n < 3 {
        return seq[n - 1];
    }
    let (a, b, c) = (seq[n - 3], seq[n - 2], seq[n - 1]);
    let denom = (c - b) - (b - a);
    if denom == F::zero() || !denom.is_finite() {
        return c;
    }
    let aitken = c - (c - b) * (c - b) / denom;
    // Only trust the correction when it stays close to the last term.
    if (aitken - c).abs() <= (c - b).abs() * F::lit(10.0) {
        aitken
    } else {
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64, n: usize) -> Vec<f64> {
        (1..=n).map(|k| f(k as f64)).collect()
    }

    #[test]
    fn constant_increments_diverge() {
        let v = classify_series(&series(|_| std::f64::consts::LN_2, 1000), 1e6);
        assert!(v.divergent);
        assert_eq!(v.confidence, Confidence::NumericConfident);
    }

    #[test]
    fn harmonic_increments_diverge() {
        assert!(classify_series(&series(|k| 1.0 / k, 1000), 1e6).divergent);
        assert!(classify_series(&series(|k| 1.0 / k.sqrt(), 1000), 1e6).divergent);
    }

    #[test]
    fn geometric_and_square_decay_converge() {
        let g = classify_series(&series(|k| 0.5f64.powf(k), 1000), 1e6);
        assert!(!g.divergent);
        let q = classify_series(&series(|k| 1.0 / (k * k), 1000), 1e6);
        assert!(!q.divergent);
        assert_eq!(q.confidence, Confidence::NumericConfident);
    }

    #[test]
    fn cap_triggers_divergence() {
        let v = classify_series(&series(|_| 1e5, 20), 1e6);
        assert!(v.divergent);
    }

    #[test]
    fn aitken_recovers_geometric_limit() {
        let seq: Vec<f64> = (0..10).map(|k| 1.0 + 0.5f64.powi(k)).collect();
        assert!((extrapolate_limit(&seq) - 1.0).abs() < 1e-12);
    }
}
