use bitideal::variety::{builtin, BUILTIN_NAMES};
use bitideal::{
    all_congruences, principal_congruence, Budget, FiniteAlgebra, IdealEngine, Subset, Variant, VarietySpec,
};
use proptest::prelude::*;

fn models() -> Vec<(VarietySpec, FiniteAlgebra)> {
    BUILTIN_NAMES
        .iter()
        .flat_map(|n| {
            let spec = builtin(n).unwrap();
            spec.bundled.clone().into_iter().map(move |a| (spec.clone(), a))
        })
        .collect()
}

fn subset_of(bits: u64, size: usize) -> Subset {
    Subset::from_bits(bits & ((1 << size) - 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closure_is_least_ideal_above_seed(model in 0usize..64, bits in any::<u64>(), v in 0usize..4) {
        let models = models();
        let (spec, alg) = &models[model % models.len()];
        let budget = Budget::unlimited();
        let engine = IdealEngine::new(spec, alg, &budget).unwrap();
        let seed = subset_of(bits, alg.size());
        let closure = engine.ideal_closure(&seed, Variant::ALL[v], false).unwrap();
        let oracle = engine.oracle().unwrap();
        prop_assert!(oracle.is_ideal(&closure));
        prop_assert!(seed.is_subset(&closure));
        for ideal in oracle.ideals() {
            if seed.is_subset(&ideal) {
                prop_assert!(closure.is_subset(&ideal));
            }
        }
    }

    #[test]
    fn principal_congruence_is_least(model in 0usize..64, a in 0usize..8, b in 0usize..8) {
        let models = models();
        let (_, alg) = &models[model % models.len()];
        let (a, b) = (a % alg.size(), b % alg.size());
        let budget = Budget::unlimited();
        let p = principal_congruence(alg, a, b, &budget).unwrap();
        prop_assert!(p.related(a, b));
        for c in all_congruences(alg, &budget).unwrap() {
            if c.related(a, b) {
                prop_assert!(p.refines(&c));
            }
        }
    }

    #[test]
    fn images_contain_their_base(model in 0usize..64, bits in any::<u64>(), a in 0usize..8) {
        let models = models();
        let (spec, alg) = &models[model % models.len()];
        let budget = Budget::unlimited();
        let engine = IdealEngine::new(spec, alg, &budget).unwrap();
        let mut h = subset_of(bits, alg.size());
        h.insert(engine.zero());
        let a = a % alg.size();
        prop_assert!(engine.theta_image(&h, a).unwrap().contains(a));
        prop_assert!(engine.eq_class(&h, a).unwrap().contains(a));
    }

    #[test]
    fn verdicts_do_not_depend_on_subset_order(model in 0usize..64, mut elems in proptest::collection::vec(0usize..8, 1..6)) {
        let models = models();
        let (spec, alg) = &models[model % models.len()];
        let budget = Budget::unlimited();
        let engine = IdealEngine::new(spec, alg, &budget).unwrap();
        for e in elems.iter_mut() {
            *e %= alg.size();
        }
        let forward: Subset = elems.iter().copied().collect();
        let backward: Subset = elems.iter().rev().copied().collect();
        let text = elems.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",");
        prop_assert_eq!(&forward, &backward);
        prop_assert_eq!(&Subset::parse(&text).unwrap(), &forward);
        for v in Variant::ALL {
            prop_assert_eq!(
                engine.check_termset(&forward, v, false).unwrap().holds,
                engine.check_oracle(&forward).unwrap().holds
            );
        }
    }
}

#[test]
fn kernels_are_exactly_the_ideals() {
    let budget = Budget::unlimited();
    for (spec, alg) in models() {
        let engine = IdealEngine::new(&spec, &alg, &budget).unwrap();
        let zero = engine.zero();
        let oracle = engine.oracle().unwrap();
        for c in oracle.congruences() {
            let kernel = c.block_of(zero);
            assert!(oracle.is_ideal(&kernel));
            assert_eq!(engine.sim_relation(&kernel).unwrap(), *c, "{} {kernel}", alg.name());
            assert_eq!(engine.eq_class(&kernel, zero).unwrap(), kernel);
        }
        assert_eq!(oracle.ideals().len(), oracle.congruences().len());
    }
}
