//! Maximising the acceptability index over portfolio directions.
//!
//! `alpha(<h, S_1 - S_0>)` is invariant under `h -> lambda h` for
//! `lambda > 0`, so the search runs on the unit sphere. The objective is only
//! piecewise smooth in `h`, so a compass search with shrinking angular steps
//! is used from several deterministic starts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::acceptability::{alpha, AlphaStatus, DEFAULT_TOL, DEFAULT_T_MAX};
use crate::choquet::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::semigroup::Semigroup;
use crate::special::norm_ppf;

/// Angular agreement required of converged rays for the uniqueness flag.
pub const UNIQUENESS_TOL: f64 = 1e-2;

/// Scenario gains `S_1^i - S_0^i` (rows: scenarios, columns: assets).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioMatrix<F> {
    gains: Vec<Vec<F>>,
    probs: Vec<F>,
    zero_columns: Vec<usize>,
}

impl<F: Real> ScenarioMatrix<F> {
    /// `probs` must be positive; they are normalised if their sum is within
    /// `1e-9` of 1 and rejected otherwise.
    pub fn new(gains: Vec<Vec<F>>, probs: Vec<F>) -> Result<Self> {
        let n = gains.len();
        if n < 2 {
            return Err(Error::Domain(format!("need at least 2 scenarios, got {n}")));
        }
        let d = gains[0].len();
        if d == 0 {
            return Err(Error::Domain("need at least one asset".into()));
        }
        if probs.len() != n {
            return Err(Error::Validation(format!("{n} scenarios but {} probabilities", probs.len())));
        }
        for (i, row) in gains.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Validation(format!("scenario {i} has {} assets, expected {d}", row.len())));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("scenario {i} has a non-finite gain")));
            }
        }
        if probs.iter().any(|&p| !(p > F::zero()) || !p.is_finite()) {
            return Err(Error::Domain("scenario probabilities must be positive".into()));
        }
        let total = probs.iter().fold(F::zero(), |a, &p| a + p);
        if (total - F::one()).abs() > F::lit(1e-9) {
            return Err(Error::Validation(format!("scenario probabilities sum to {total}, not 1")));
        }
        let probs = probs.into_iter().map(|p| p / total).collect();
        let zero_columns = (0..d).filter(|&j| gains.iter().all(|r| r[j] == F::zero())).collect();
        Ok(ScenarioMatrix { gains, probs, zero_columns })
    }

    /// Equally likely scenarios.
    pub fn uniform(gains: Vec<Vec<F>>) -> Result<Self> {
        let n = gains.len();
        let p = F::one() / F::from_usize_lossy(n.max(1));
        Self::new(gains, vec![p; n])
    }

    pub fn scenarios(&self) -> usize {
        self.gains.len()
    }

    pub fn assets(&self) -> usize {
        self.gains[0].len()
    }

    pub fn gains(&self) -> &[Vec<F>] {
        &self.gains
    }

    pub fn probs(&self) -> &[F] {
        &self.probs
    }

    /// Assets whose gain is 0 in every scenario.
    pub fn zero_columns(&self) -> &[usize] {
        &self.zero_columns
    }

    pub fn mean_vector(&self) -> Vec<F> {
        (0..self.assets())
            .map(|j| self.gains.iter().zip(&self.probs).fold(F::zero(), |a, (r, &p)| a + p * r[j]))
            .collect()
    }

    /// The distribution of `<h, gains>`.
    pub fn portfolio(&self, h: &[F]) -> Result<EmpiricalDistribution<F>> {
        if h.len() != self.assets() {
            return Err(Error::Validation(format!("direction has {} entries, expected {}", h.len(), self.assets())));
        }
        let v: Vec<F> = self.gains.iter().map(|r| dot(r, h)).collect();
        EmpiricalDistribution::from_samples(&v, Some(&self.probs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortfolioOptions<F> {
    pub starts: usize,
    pub seed: u64,
    /// Index tolerance passed to `alpha`.
    pub tol: F,
    pub t_max: F,
    /// Compass search stops once the angular step falls below this.
    pub angular_tol: F,
}

impl<F: Real> Default for PortfolioOptions<F> {
    fn default() -> Self {
        PortfolioOptions {
            starts: 16,
            seed: 0,
            tol: F::lit(DEFAULT_TOL),
            t_max: F::lit(DEFAULT_T_MAX),
            angular_tol: F::lit(1e-6),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StartRecord<F> {
    pub start: Vec<F>,
    pub direction: Vec<F>,
    pub alpha: F,
    pub status: AlphaStatus,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortfolioSolution<F> {
    pub direction: Vec<F>,
    pub alpha_star: F,
    pub status: AlphaStatus,
    pub starts: Vec<StartRecord<F>>,
    /// All interior-converged rays agree within [`UNIQUENESS_TOL`].
    pub uniqueness_flag: bool,
    /// Some direction has nonnegative gains everywhere and a positive gain somewhere.
    pub arbitrage: bool,
    /// Every start ended with `alpha = 0`.
    pub all_zero: bool,
}

/// Value of a direction: the index, then the mean to climb out of `alpha = 0`.
#[derive(Debug, Clone, Copy)]
struct Score<F> {
    alpha: F,
    mean: F,
    status: AlphaStatus,
}

impl<F: Real> Score<F> {
    fn beats(&self, other: &Score<F>) -> bool {
        self.alpha > other.alpha || (self.alpha == other.alpha && self.mean > other.mean)
    }
}

struct Objective<'a, F: Real> {
    s: &'a Semigroup<F>,
    m: &'a ScenarioMatrix<F>,
    opts: PortfolioOptions<F>,
}

impl<F: Real> Objective<'_, F> {
    fn score(&self, h: &[F]) -> Result<Score<F>> {
        let d = self.m.portfolio(h)?;
        let top = d.values()[d.len() - 1];
        if top <= F::zero() && d.min_value() >= F::zero() {
            // Orthogonal to every scenario.
            return Ok(Score { alpha: F::zero(), mean: F::zero(), status: AlphaStatus::Zero });
        }
        let r = alpha(self.s, &d, self.opts.tol, self.opts.t_max)?;
        Ok(Score { alpha: r.value, mean: d.mean(), status: r.status })
    }

    fn search(&self, start: &[F]) -> Result<StartRecord<F>> {
        let mut h = start.to_vec();
        let mut best = self.score(&h)?;
        let mut evals = 1;
        let dim = h.len();
        if dim == 1 {
            let flipped = [-h[0]];
            let other = self.score(&flipped)?;
            evals += 1;
            if other.beats(&best) {
                h = flipped.to_vec();
                best = other;
            }
        } else {
            let mut step = F::half();
            while step >= self.opts.angular_tol && best.status != AlphaStatus::Infinite {
                let mut moved = false;
                for j in 0..dim {
                    let Some(v) = tangent(&h, j) else { continue };
                    for sign in [F::one(), -F::one()] {
                        let cand = rotate(&h, &v, sign * step);
                        let sc = self.score(&cand)?;
                        evals += 1;
                        if sc.beats(&best) {
                            h = cand;
                            best = sc;
                            moved = true;
                            break;
                        }
                    }
                    if best.status == AlphaStatus::Infinite {
                        break;
                    }
                }
                if !moved {
                    step = step * F::half();
                }
            }
        }
        Ok(StartRecord { start: start.to_vec(), direction: h, alpha: best.alpha, status: best.status, evaluations: evals })
    }
}

fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

fn normalize<F: Real>(v: &mut [F]) -> F {
    let n = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x = *x / n;
    }
    n
}

/// Unit projection of the `j`-th basis vector onto the tangent space at `h`.
fn tangent<F: Real>(h: &[F], j: usize) -> Option<Vec<F>> {
    let mut v: Vec<F> = h.iter().map(|&x| -h[j] * x).collect();
    v[j] = v[j] + F::one();
    let n = normalize(&mut v);
    (n > F::lit(1e-8)).then_some(v)
}

/// `cos(a) h + sin(a) v`, renormalised.
fn rotate<F: Real>(h: &[F], v: &[F], a: F) -> Vec<F> {
    let (s, c) = a.sin_cos();
    let mut out: Vec<F> = h.iter().zip(v).map(|(&x, &y)| c * x + s * y).collect();
    normalize(&mut out);
    out
}

/// Angle between two unit vectors.
pub fn angle<F: Real>(a: &[F], b: &[F]) -> F {
    dot(a, b).max(-F::one()).min(F::one()).acos()
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let (mut inv, mut f) = (0.0, 1.0 / base as f64);
    while i > 0 {
        inv += f * (i % base) as f64;
        i /= base;
        f /= base as f64;
    }
    inv
}

fn primes(count: usize) -> Vec<u64> {
    let mut ps = Vec::with_capacity(count);
    let mut c = 2u64;
    while ps.len() < count {
        if ps.iter().all(|&p| !c.is_multiple_of(p)) {
            ps.push(c);
        }
        c += 1;
    }
    ps
}

/// Halton points with a seeded Cranley-Patterson shift, pushed through the
/// normal quantile and normalised onto the sphere.
pub fn sphere_starts<F: Real>(count: usize, dim: usize, seed: u64) -> Vec<Vec<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let bases = primes(dim);
    (1..=count as u64)
        .map(|i| {
            let mut v: Vec<F> = bases
                .iter()
                .zip(&shift)
                .map(|(&b, &s)| {
                    let u = (radical_inverse(i, b) + s).fract().clamp(1e-12, 1.0 - 1e-12);
                    F::lit(norm_ppf(u))
                })
                .collect();
            if dim == 1 {
                v[0] = v[0].signum();
            } else if normalize(&mut v) < F::lit(1e-12) {
                v = (0..dim).map(|j| if j == 0 { F::one() } else { F::zero() }).collect();
            }
            v
        })
        .collect()
}

/// Maximise `alpha(<h, gains>)` over unit `h`.
pub fn optimize<F: Real>(s: &Semigroup<F>, m: &ScenarioMatrix<F>, opts: &PortfolioOptions<F>) -> Result<PortfolioSolution<F>> {
    if opts.starts == 0 {
        return Err(Error::Config("need at least one start".into()));
    }
    let obj = Objective { s, m, opts: *opts };
    let starts = sphere_starts::<F>(opts.starts, m.assets(), opts.seed);
    // Collecting preserves start order regardless of completion order.
    let records = starts.par_iter().map(|h| obj.search(h)).collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (i, r) in records.iter().enumerate().skip(1) {
        if r.alpha > records[best].alpha {
            best = i;
        }
    }
    let top = &records[best];
    let arbitrage = top.status == AlphaStatus::Infinite;
    let all_zero = records.iter().all(|r| r.alpha == F::zero());
    let interior: Vec<&StartRecord<F>> = records.iter().filter(|r| r.status == AlphaStatus::Interior).collect();
    let uniqueness_flag = !interior.is_empty()
        && interior.iter().all(|r| angle(&r.direction, &top.direction) <= F::lit(UNIQUENESS_TOL));
    Ok(PortfolioSolution {
        direction: top.direction.clone(),
        alpha_star: top.alpha,
        status: top.status,
        uniqueness_flag,
        arbitrage,
        all_zero,
        starts: records,
    })
}
