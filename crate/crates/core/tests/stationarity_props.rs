use ivopt_core::polycone::ConeUnion;
use ivopt_core::sets::{BoxSparsitySet, ComplementaritySet, StructuredSet};
use ivopt_core::stationarity::{abstract_b, check_all, StationarityCase};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `M = R^n` and `dom K` a structured set, so the abstract, implicit and
/// dom K cones coincide.
fn case_on(set: &StructuredSet, z: &[f64], grad: Vec<f64>) -> StationarityCase {
    let n = z.len();
    let t = set.tangent_cone(z).unwrap();
    let l = set.limiting_normal_cone(z).unwrap();
    let r: ConeUnion = set.regular_normal_cone(z).unwrap().into();
    StationarityCase {
        name: "random".into(),
        grad_f: grad,
        m_tangent: Some(ConeUnion::full(n)),
        m_regular: Some(ConeUnion::zero(n)),
        m_limiting: Some(ConeUnion::zero(n)),
        domk_tangent: Some(t.clone()),
        domk_regular: Some(r.clone()),
        domk_limiting: Some(l.clone()),
        abstract_tangent: Some(t),
        abstract_regular: Some(r),
        abstract_limiting: Some(l),
        ..StationarityCase::default()
    }
}

fn planar_sets() -> Vec<StructuredSet> {
    vec![
        StructuredSet::BoxSparsity(BoxSparsitySet::unbounded(2, 1).unwrap()),
        StructuredSet::BoxSparsity(BoxSparsitySet::new(1, vec![-1.0, 0.0], vec![1.0, 1.0]).unwrap()),
        StructuredSet::Complementarity(ComplementaritySet::new(vec![1.0], vec![f64::INFINITY]).unwrap()),
    ]
}

/// Feasible directions found by projecting nearby points back onto the set.
fn sampled_directions(set: &StructuredSet, z: &[f64], rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..10_000)
        .map(|i| {
            let r = 1e-3 * (1 + i % 3) as f64;
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let p = set.project(&[z[0] + r * a.cos(), z[1] + r * a.sin()]).unwrap();
            vec![p[0] - z[0], p[1] - z[1]]
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn verdicts_respect_implications(
        which in 0usize..3,
        x in prop::collection::vec(prop_oneof![Just(0.0), Just(0.5), Just(1.0), Just(-0.5)], 2),
        grad in prop::collection::vec(-2i32..=2, 2),
    ) {
        let set = &planar_sets()[which];
        let z = set.project(&x).unwrap();
        let case = case_on(set, &z, grad.iter().map(|g| *g as f64).collect());
        let r = check_all(&case).unwrap();
        prop_assert!(r.consistent(), "{:?}", r.violations);
        if r.implicit_s == Some(true) {
            prop_assert_eq!(r.implicit_b, Some(true));
            prop_assert_eq!(r.implicit_m, Some(true));
        }
        if r.abstract_m == Some(false) {
            prop_assert_ne!(r.abstract_b, Some(true));
        }
    }

    #[test]
    fn b_stationarity_matches_sampled_directions(
        which in 0usize..3,
        x in prop::collection::vec(prop_oneof![Just(0.0), Just(0.5), Just(1.0), Just(-0.5), Just(2.0)], 2),
        grad in prop::collection::vec(-2i32..=2, 2),
        seed in 0u64..1000,
    ) {
        let set = &planar_sets()[which];
        let z = set.project(&x).unwrap();
        let g: Vec<f64> = grad.iter().map(|v| *v as f64).collect();
        let b = abstract_b(&case_on(set, &z, g.clone())).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let descent = sampled_directions(set, &z, &mut rng)
            .iter()
            .any(|d| g[0] * d[0] + g[1] * d[1] < -1e-9);
        prop_assert_eq!(b, !descent, "z = {:?}, grad = {:?}", z, g);
    }
}
