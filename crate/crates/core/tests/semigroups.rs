use distortia::generator::{dual_generator, sum_generators, Builtin, Generator};
use distortia::semigroup::{build_semigroup, lie_trotter, ClosedForm, DistortionFamily, Semigroup};
use proptest::prelude::*;

const TIMES: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

fn grid() -> Vec<f64> {
    let mut xs: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    xs.extend((1..20).map(|k| k as f64 * 0.05));
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs
}

fn sg(g: &Generator) -> Semigroup {
    build_semigroup(g, 1e-9).unwrap()
}

#[test]
fn builtins_match_their_closed_forms_on_the_fine_grid() {
    for b in Builtin::ALL {
        let s = sg(&Generator::builtin(b));
        for &t in &TIMES {
            for &x in &grid() {
                let d = (s.psi(t, x).unwrap() - ClosedForm(b).value(t, x)).abs();
                assert!(d <= 1e-6, "{b} t={t} x={x}: {d}");
            }
        }
    }
}

#[test]
fn monotone_in_time() {
    for b in Builtin::ALL {
        let s = sg(&Generator::builtin(b));
        for &x in &grid() {
            let mut prev = x;
            for t in (0..=40).map(|k| k as f64 * 0.125) {
                let y = s.psi(t, x).unwrap();
                assert!(y >= prev, "{b} x={x} t={t}");
                prev = y;
            }
        }
    }
}

#[test]
fn dual_semigroup_is_the_conjugated_flow() {
    for b in Builtin::ALL {
        let s = sg(&Generator::builtin(b));
        let d = sg(&dual_generator(&Generator::builtin(b)));
        for &t in &TIMES {
            for &x in grid().iter().filter(|&&x| x > 0.0 && x < 1.0) {
                let expect = 1.0 - s.psi_inverse(t, 1.0 - x).unwrap();
                let got = d.psi(t, x).unwrap();
                assert!((got - expect).abs() <= 1e-6, "{b} t={t} x={x}: {got} vs {expect}");
            }
        }
    }
}

#[test]
fn alternating_flows_converge_to_the_mixture() {
    let (a, b) = (Generator::builtin(Builtin::Cvar), Generator::builtin(Builtin::Aimax));
    let (sa, sb) = (sg(&a), sg(&b));
    let mix = sg(&sum_generators(&a, &b));
    for &x in &[0.05, 0.2, 0.5, 0.8] {
        let got = lie_trotter(&sa, &sb, 1.0, 4096, x).unwrap();
        let err = (got - mix.psi(1.0, x).unwrap()).abs();
        assert!(err <= 1e-3, "x={x}: {err}");
    }
}

#[test]
fn single_precision_tracks_double() {
    for b in Builtin::ALL {
        let s32 = build_semigroup(&Generator::<f32>::builtin(b), 1e-6f32).unwrap();
        for &x in &[0.1f32, 0.5, 0.9] {
            let d = (s32.psi(1.0, x).unwrap() as f64 - ClosedForm(b).value(1.0, x as f64)).abs();
            assert!(d < 1e-4, "{b} x={x}: {d}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_law(b in prop::sample::select(Builtin::ALL.to_vec()), s in 0.0f64..3.0, t in 0.0f64..3.0, x in 0.0f64..=1.0) {
        let g = sg(&Generator::builtin(b));
        let lhs = g.psi(s, g.psi(t, x).unwrap()).unwrap();
        prop_assert!((lhs - g.psi(s + t, x).unwrap()).abs() <= 1e-6);
    }

    #[test]
    fn inverse_undoes_the_flow(b in prop::sample::select(Builtin::ALL.to_vec()), t in 0.0f64..3.0, x in 0.001f64..0.999) {
        let g = sg(&Generator::builtin(b));
        let y = g.psi(t, x).unwrap();
        if y < 1.0 {
            prop_assert!((g.psi_inverse(t, y).unwrap() - x).abs() <= 1e-6);
        }
    }
}
