use distortia::generator::Builtin;
use distortia::{DistortionSpec, GeneratorSpec};
use proptest::prelude::*;

fn generator_spec() -> impl Strategy<Value = GeneratorSpec> {
    let leaf = prop_oneof![
        prop::sample::select(Builtin::ALL.to_vec()).prop_map(GeneratorSpec::Builtin),
        "[a-z]{1,6}".prop_map(|s| GeneratorSpec::Knots(format!("{s}.csv").into())),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (0.001f64..1000.0, inner.clone()).prop_map(|(l, g)| GeneratorSpec::Scale(l, Box::new(g))),
            inner.clone().prop_map(|g| GeneratorSpec::Dual(Box::new(g))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| GeneratorSpec::Mix(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| GeneratorSpec::Min(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| GeneratorSpec::Max(Box::new(a), Box::new(b))),
        ]
    })
}

fn distortion_spec() -> impl Strategy<Value = DistortionSpec> {
    prop_oneof![
        Just(DistortionSpec::Identity),
        (0.01f64..1.0).prop_map(DistortionSpec::Power),
        (1.0f64..50.0).prop_map(DistortionSpec::Clamp),
        (1.0f64..10.0).prop_map(DistortionSpec::Draws),
        (0.0f64..4.0).prop_map(DistortionSpec::Wang),
        (generator_spec(), 0.0f64..5.0).prop_map(|(g, t)| DistortionSpec::Flow(g, t)),
        (0.01f64..1.0).prop_map(|p| DistortionSpec::Dual(Box::new(DistortionSpec::Power(p)))),
    ]
}

proptest! {
    #[test]
    fn generator_canonical_form_is_a_fixed_point(spec in generator_spec()) {
        let canon = spec.to_string();
        let parsed: GeneratorSpec = canon.parse().unwrap();
        prop_assert_eq!(&parsed, &spec);
        prop_assert_eq!(parsed.to_string(), canon);
    }

    #[test]
    fn distortion_canonical_form_is_a_fixed_point(spec in distortion_spec()) {
        let canon = spec.to_string();
        let parsed: DistortionSpec = canon.parse().unwrap();
        prop_assert_eq!(&parsed, &spec);
        prop_assert_eq!(parsed.to_string(), canon);
    }
}
