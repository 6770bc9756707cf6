//! Gauss–Legendre quadrature and a small adaptive driver.

use std::sync::OnceLock;

use crate::real::Real;

const ORDER: usize = 15;

struct Rule {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
}

/// Nodes and weights on `[-1, 1]`, computed once by Newton iteration on the
/// Legendre recurrence.
fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    })
}

/// Fixed 15-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss15<F: Real>(f: &impl Fn(F) -> F, a: F, b: F) -> F {
    let r = rule();
    let half = (b - a) * F::half();
    let mid = a + half;
    let mut sum = F::zero();
    for i in 0..ORDER {
        sum = sum + F::lit(r.weights[i]) * f(mid + half * F::lit(r.nodes[i]));
    }
    sum * half
}

/// Adaptive bisection driven by the 15-point rule.
///
/// Every accepted subinterval is reported through `emit(a, b, integral)` in
/// order from `a` to `b`, so callers can build cumulative tables.
pub fn adaptive<F: Real>(
    f: &impl Fn(F) -> F,
    a: F,
    b: F,
    abs_tol: F,
    max_depth: usize,
    emit: &mut impl FnMut(F, F, F),
) {
    let whole = gauss15(f, a, b);
    refine(f, a, b, whole, abs_tol, max_depth, emit);
}

fn refine<F: Real>(
    f: &impl Fn(F) -> F,
    a: F,
    b: F,
    whole: F,
    abs_tol: F,
    depth: usize,
    emit: &mut impl FnMut(F, F, F),
) {
    let m = a + (b - a) * F::half();
    let left = gauss15(f, a, m);
    let right = gauss15(f, m, b);
    let both = left + right;
    let err = (both - whole).abs();
    let rel = F::epsilon() * F::lit(64.0) * both.abs();
    if depth == 0 || err <= abs_tol.max(rel) || !(m > a && m < b) {
        emit(a, b, both);
        return;
    }
    let half_tol = abs_tol * F::half();
    refine(f, a, m, left, half_tol, depth - 1, emit);
    refine(f, m, b, right, half_tol, depth - 1, emit);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let s: f64 = rule().weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_polynomial_of_degree_29_exactly() {
        let v = gauss15(&|x: f64| x.powi(29) + x.powi(28), 0.0, 1.0);
        assert!((v - (1.0 / 30.0 + 1.0 / 29.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_a_kink() {
        let mut total = 0.0;
        let mut cells = 0;
        adaptive(&|x: f64| (x - 0.3).abs(), 0.0, 1.0, 1e-13, 60, &mut |_, _, v| {
            total += v;
            cells += 1;
        });
        assert!((total - (0.045 + 0.245)).abs() < 1e-12, "{total}");
        assert!(cells > 1);
    }
}
