use bitideal::selftest::{run_selftest, SUITES};
use bitideal::Budget;

#[test]
fn every_suite_passes_on_bundled_fixtures() {
    let report = run_selftest(None, None, Budget::default()).unwrap();
    for s in &report.suites {
        println!("{:<26} cases={:<7} failed={} {:?}", s.name, s.cases, s.failed, s.notes);
        assert!(s.ok(), "{}: {:?}", s.name, s.failures);
        assert!(s.cases > 0, "{} checked nothing", s.name);
    }
    assert_eq!(report.suites.len(), SUITES.len());
    assert!(report.ok);
}
