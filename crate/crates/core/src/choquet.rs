//! Distorted (Choquet) expectations of finite distributions.

use crate::distortion::Distortion;
use crate::error::{Error, Result};
use crate::real::{Pos, Real};

/// Finite distribution with sorted, distinct atoms.
///
/// Cumulative probabilities are stored as [`Pos`] so both `P_i` and `1 - P_i`
/// are exact sums of the input weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution<F: Real = f64> {
    values: Vec<F>,
    probs: Vec<F>,
    cum: Vec<Pos<F>>,
}

impl<F: Real> EmpiricalDistribution<F> {
    /// Sort `values`, merge ties and normalise `weights` (equal by default).
    pub fn from_samples(values: &[F], weights: Option<&[F]>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Validation("sample is empty".into()));
        }
        let ones;
        let weights = match weights {
            Some(w) => {
                if w.len() != values.len() {
                    return Err(Error::Validation(format!(
                        "{} values but {} weights",
                        values.len(),
                        w.len()
                    )));
                }
                w
            }
            None => {
                ones = vec![F::one(); values.len()];
                &ones
            }
        };
        for (i, (&v, &w)) in values.iter().zip(weights).enumerate() {
            if !v.is_finite() {
                return Err(Error::Domain(format!("sample {i} is not finite")));
            }
            if !(w > F::zero()) || !w.is_finite() {
                return Err(Error::Domain(format!("weight {i} = {w} must be positive")));
            }
        }
        let mut pairs: Vec<(F, F)> = values.iter().copied().zip(weights.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(F, F)> = Vec::with_capacity(pairs.len());
        for (v, w) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 = last.1 + w,
                _ => merged.push((v, w)),
            }
        }
        Ok(Self::from_sorted_atoms(merged))
    }

    /// Atoms already sorted by strictly increasing value with positive weights.
    fn from_sorted_atoms(atoms: Vec<(F, F)>) -> Self {
        let total = atoms.iter().fold(F::zero(), |a, p| a + p.1);
        let n = atoms.len();
        let mut prefix = vec![F::zero(); n];
        let mut suffix = vec![F::zero(); n];
        let mut acc = F::zero();
        for i in 0..n {
            acc = acc + atoms[i].1;
            prefix[i] = acc;
        }
        acc = F::zero();
        for i in (0..n).rev() {
            suffix[i] = acc;
            acc = acc + atoms[i].1;
        }
        let cum = (0..n)
            .map(|i| {
                if i == n - 1 {
                    Pos::one()
                } else {
                    Pos { x: prefix[i] / total, comp: suffix[i] / total }
                }
            })
            .collect();
        let values = atoms.iter().map(|a| a.0).collect();
        let probs = atoms.iter().map(|a| a.1 / total).collect();
        EmpiricalDistribution { values, probs, cum }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    /// Atom probabilities `P_i - P_{i-1}`.
    pub fn probs(&self) -> &[F] {
        &self.probs
    }

    pub fn cum_probs(&self) -> Vec<F> {
        self.cum.iter().map(|p| p.x).collect()
    }

    pub(crate) fn cum_pos(&self) -> &[Pos<F>] {
        &self.cum
    }

    pub fn mean(&self) -> F {
        self.values.iter().zip(&self.probs).fold(F::zero(), |a, (&v, &p)| a + v * p)
    }

    pub fn min_value(&self) -> F {
        self.values[0]
    }

    /// Same atoms with every value multiplied by `lambda`.
    pub fn scaled(&self, lambda: F) -> Result<Self> {
        if !(lambda > F::zero()) || !lambda.is_finite() {
            return Err(Error::Domain(format!("scale must be positive, got {lambda}")));
        }
        let mut d = self.clone();
        for v in &mut d.values {
            *v = *v * lambda;
        }
        Ok(d)
    }

    /// Lower quantile `inf { v : P(X <= v) >= level }`.
    pub fn lower_quantile(&self, level: F) -> F {
        let j = self.cum.partition_point(|p| p.x < level);
        self.values[j.min(self.values.len() - 1)]
    }
}

/// `Psi(P_i) - Psi(P_{i-1})` with `Psi(P_0) = 0`, computed from complements
/// when both ends are close to 1.
pub fn increments_at<F: Real>(cum: &[Pos<F>], psi_at: impl Fn(Pos<F>) -> Pos<F>) -> Vec<F> {
    let mut prev = Pos::zero();
    cum.iter()
        .map(|&p| {
            let y = psi_at(p);
            let inc = y.minus(prev).max(F::zero());
            prev = y;
            inc
        })
        .collect()
}

/// `sum_i v_i * inc_i`.
pub fn weighted_sum<F: Real>(values: &[F], incs: &[F]) -> F {
    values.iter().zip(incs).fold(F::zero(), |a, (&v, &w)| a + v * w)
}

/// `int x d(Psi(D_X(x)))` for the empirical distribution `d`.
///
/// A jump `Psi(0+) > 0` is carried by the smallest atom.
pub fn distorted_expectation<F: Real>(d: &EmpiricalDistribution<F>, psi: &Distortion<F>) -> F {
    let incs = increments_at(d.cum_pos(), |p| psi.eval_pos(p));
    weighted_sum(d.values(), &incs)
}

/// Density `dQ*/dP` of the extreme measure at each atom.
pub fn extreme_density<F: Real>(d: &EmpiricalDistribution<F>, psi: &Distortion<F>) -> Vec<F> {
    let incs = increments_at(d.cum_pos(), |p| psi.eval_pos(p));
    incs.iter().zip(d.probs()).map(|(&i, &p)| i / p).collect()
}

/// `Phi(x) = sup_{y in [0, 1]} (Psi(y) - x y)` for `x >= 0`.
pub fn conjugate_phi<F: Real>(psi: &Distortion<F>, x: F) -> Result<F> {
    if !(x >= F::zero()) {
        return Err(Error::Domain(format!("x = {x} must be nonnegative")));
    }
    let objective = |y: F| psi.eval(y) - x * y;
    // y = 0 contributes Psi(0) = 0 and, through the right limit, Psi(0+).
    let mut best = F::zero().max(psi.d0plus()).max(F::one() - x);
    for k in psi.knots() {
        if k > F::zero() && k < F::one() {
            best = best.max(objective(k));
        }
    }
    if psi.is_piecewise_linear() {
        return Ok(best);
    }
    // Concave objective: golden section finds the global maximum.
    let ratio = F::lit(0.618_033_988_749_894_8);
    let (mut a, mut b) = (F::zero(), F::one());
    let mut c = b - ratio * (b - a);
    let mut e = a + ratio * (b - a);
    let (mut fc, mut fe) = (objective(c), objective(e));
    for _ in 0..200 {
        if b - a <= F::epsilon() {
            break;
        }
        if fc >= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - ratio * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + ratio * (b - a);
            fe = objective(e);
        }
    }
    Ok(best.max(fc).max(fe))
}
