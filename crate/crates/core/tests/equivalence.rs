use bitideal::ideal::{nonempty_subsets, IdealEngine, Method};
use bitideal::variety::{builtin, BUILTIN_NAMES};
use bitideal::Budget;

#[test]
fn all_methods_agree_on_every_bundled_algebra() {
    let budget = Budget::unlimited();
    for name in BUILTIN_NAMES {
        let spec = builtin(name).unwrap();
        for alg in &spec.bundled {
            let engine = IdealEngine::new(&spec, alg, &budget).unwrap();
            let mut ideals = 0;
            for h in nonempty_subsets(alg.size()) {
                for sa in [false, true] {
                    let r = engine.report(&h, Method::All, sa).unwrap();
                    assert!(r.agreement, "{name}/{} {h} sa={sa}: {:?}", alg.name(), r.verdicts);
                    if sa && r.verdicts.get("oracle") == Some(true) {
                        ideals += 1;
                    }
                }
            }
            assert_eq!(ideals, engine.oracle().unwrap().ideals().len());
        }
    }
}
