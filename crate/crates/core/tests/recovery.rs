use distortia::generator::{Builtin, Generator};
use distortia::logarithm::{default_grid, existence_check, recover_generator, LogOptions, Verdict};
use distortia::semigroup::ClosedForm;
use distortia::{Distortion, Pos};

fn closed(b: Builtin) -> Distortion<f64> {
    ClosedForm(b).at(1.0).unwrap()
}

fn max_drift(b: Builtin, a: &LogOptions<f64>, c: &LogOptions<f64>) -> f64 {
    let psi = closed(b);
    let grid = default_grid();
    let ra = recover_generator(&psi, None, &grid, a).unwrap();
    let rc = recover_generator(&psi, None, &grid, c).unwrap();
    ra.estimates.iter().zip(&rc.estimates).map(|(p, q)| ((p.g - q.g) / p.g).abs()).fold(0.0, f64::max)
}

#[test]
fn estimates_are_stable_under_a_larger_iteration_cap() {
    let base = LogOptions::default();
    let doubled = LogOptions { max_iter: 2 * base.max_iter, ..base };
    for b in [Builtin::Aimin, Builtin::Aimax, Builtin::Wang] {
        let d = max_drift(b, &base, &doubled);
        assert!(d <= 1e-6, "{b}: {d}");
    }
}

#[test]
fn estimates_are_stable_under_the_tail_cutoff() {
    let base = LogOptions::default();
    for cutoff in [1e-150, 1e-250] {
        let other = LogOptions { tail_cutoff: cutoff, ..base };
        for b in [Builtin::Aimin, Builtin::Aimax, Builtin::Wang] {
            let d = max_drift(b, &base, &other);
            assert!(d <= 1e-6, "{b} cutoff {cutoff:e}: {d}");
        }
    }
}

#[test]
fn analytic_and_numeric_derivatives_agree() {
    // With Psi'(1) > 0 the generator is unique, so both rules must land on the same G.
    let psi = closed(Builtin::Aimax);
    let grid = default_grid();
    let opts = LogOptions::default();
    let analytic = |p: Pos<f64>| psi.derivative(p).unwrap();
    // Central quotient on the complement, valid all the way to 1.
    let numeric = |p: Pos<f64>| {
        let h = 1e-5 * p.comp.min(p.x);
        (psi.eval_pos(Pos::upper(p.comp + h)).comp - psi.eval_pos(Pos::upper(p.comp - h)).comp) / (2.0 * h)
    };
    let a = recover_generator(&psi, Some(&analytic), &grid, &opts).unwrap();
    let n = recover_generator(&psi, Some(&numeric), &grid, &opts).unwrap();
    assert!(a.hypothesis_holds);
    let g = Generator::<f64>::builtin(Builtin::Aimax);
    for (ea, en) in a.estimates.iter().zip(&n.estimates) {
        let exact = g.eval(ea.x);
        assert!(((ea.g - exact) / exact).abs() < 1e-6, "x={}", ea.x);
        assert!(((en.g - ea.g) / ea.g).abs() < 1e-6, "x={}: {} vs {}", ea.x, en.g, ea.g);
    }
}

#[test]
fn recovered_knots_rebuild_the_distortion() {
    for b in [Builtin::Aimin, Builtin::Aimax, Builtin::Wang] {
        let r = existence_check(&closed(b), None, &default_grid(), &LogOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Plausible, "{b}: {:?}", r.reasons);
        assert!(r.recovery.roundtrip_error < 1e-3);
        assert!(Generator::from_knots(&r.recovery.knots, "rebuilt").is_ok());
    }
}

#[test]
fn powers_are_flows_of_the_entropy_generator() {
    // x^p = Psi_t for G(x) = -x ln x with t = -ln p.
    let psi = Distortion::power((-1f64).exp()).unwrap();
    let r = recover_generator(&psi, None, &default_grid(), &LogOptions::default()).unwrap();
    for e in &r.estimates {
        let exact = -e.x * e.x.ln();
        assert!(((e.g - exact) / exact).abs() < 1e-6, "x={}", e.x);
    }
}

#[test]
fn kinked_table_is_rejected() {
    let psi = Distortion::piecewise_linear(&[(0.5, 0.75)]).unwrap();
    let r = existence_check(&psi, None, &default_grid(), &LogOptions::default()).unwrap();
    assert_eq!(r.verdict, Verdict::Rejected);
    assert!(!r.reasons.is_empty());
}
