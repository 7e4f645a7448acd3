//! Property suites over the bundled varieties and models.

use std::path::Path;

use serde::Serialize;

use crate::algebra::{holds_identity, is_zero_ideal_term, FiniteAlgebra};
use crate::congruence::{all_congruences, is_congruence, kernel_of, principal_congruence};
use crate::error::{Error, Result};
use crate::eval::Budget;
use crate::ideal::{nonempty_subsets, CompiledSet, Condition, IdealEngine, Method};
use crate::parse::parse_term;
use crate::reference::reference_sets;
use crate::subset::{Partition, Subset};
use crate::term::Term;
use crate::termset::{dedupe_semantic, dedupe_syntactic, extend_termset, gen_termset, ExtensionMode, TermSet, Variant};
use crate::variety::{builtin, load_variety_dir, VarietySpec, BUILTIN_NAMES};
use crate::witness::{verify_witness, BitWitness};

const CENSUS: &str = include_str!("../fixtures/census.txt");

/// `(name, alias)` of every suite, in run order.
pub const SUITES: [(&str, Option<&str>); 20] = [
    ("load", None),
    ("witness", None),
    ("axioms", None),
    ("census", None),
    ("congruence-lattice", None),
    ("term-soundness", None),
    ("equivalence", None),
    ("semiabelian", None),
    ("variant-independence", None),
    ("reference-lists", None),
    ("dedupe", None),
    ("inclusion-counterexample", None),
    ("class-in-image", Some("lemma22")),
    ("image-of-zero", Some("lemma23")),
    ("image-equivalence", Some("lemma24")),
    ("kernel-criteria", Some("prop21")),
    ("closure-minimality", None),
    ("extension", None),
    ("same-signature", None),
    ("right-cancellable", None),
];

const MAX_RECORDED: usize = 10;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: u64,
    pub failed: u64,
    /// The first few failures.
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteResult {
    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.fail(describe());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < MAX_RECORDED {
            self.failures.push(msg);
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub ok: bool,
    pub suites: Vec<SuiteResult>,
}

/// Resolves a filter to a suite name; suites match by name or alias.
pub fn resolve_filter(filter: &str) -> Result<&'static str> {
    SUITES
        .iter()
        .find(|(name, alias)| *name == filter || *alias == Some(filter))
        .map(|(name, _)| *name)
        .ok_or_else(|| Error::Signature(format!("unknown selftest suite `{filter}`")))
}

struct Loaded {
    registry: &'static str,
    spec: VarietySpec,
}

struct Ctx {
    varieties: Vec<Loaded>,
    census: Vec<(String, String, usize)>,
    budget: Budget,
}

fn parse_census(text: &str) -> Result<Vec<(String, String, usize)>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            let w: Vec<&str> = l.split_whitespace().collect();
            match w.as_slice() {
                [v, a, c] => c
                    .parse()
                    .map(|c| (v.to_string(), a.to_string(), c))
                    .map_err(|_| Error::Algebra(format!("bad census line `{l}`"))),
                _ => Err(Error::Algebra(format!("bad census line `{l}`"))),
            }
        })
        .collect()
}

/// Runs every suite (or only `filter`) on the bundled fixtures, or on the
/// fixture tree under `fixtures` when given.
pub fn run_selftest(filter: Option<&str>, fixtures: Option<&Path>, budget: Budget) -> Result<SelftestReport> {
    let only = filter.map(resolve_filter).transpose()?;
    let mut load = SuiteResult {
        name: "load".into(),
        ..Default::default()
    };
    let mut varieties = Vec::new();
    for name in BUILTIN_NAMES {
        let loaded = match fixtures {
            None => builtin(name).map(|s| (s, Vec::new())),
            Some(dir) => load_variety_dir(dir, name),
        };
        load.cases += 1;
        match loaded {
            Ok((spec, errors)) => {
                for (file, e) in errors {
                    load.fail(format!("{file}: {e}"));
                }
                varieties.push(Loaded { registry: name, spec });
            }
            Err(e) => load.fail(format!("{name}: {e}")),
        }
    }
    let census_text = match fixtures {
        None => CENSUS.to_string(),
        Some(dir) => std::fs::read_to_string(dir.join("census.txt")).unwrap_or_else(|_| CENSUS.to_string()),
    };
    let census = match parse_census(&census_text) {
        Ok(c) => c,
        Err(e) => {
            load.fail(e.to_string());
            Vec::new()
        }
    };
    let ctx = Ctx {
        varieties,
        census,
        budget,
    };

    let mut suites = Vec::new();
    for (name, _) in SUITES {
        if only.is_some_and(|o| o != name) {
            continue;
        }
        let result = if name == "load" {
            load.clone()
        } else {
            let mut r = SuiteResult {
                name: name.into(),
                ..Default::default()
            };
            if let Err(e) = run_suite(&ctx, name, &mut r) {
                r.fail(format!("aborted: {e}"));
            }
            r
        };
        suites.push(result);
    }
    Ok(SelftestReport {
        ok: suites.iter().all(SuiteResult::ok),
        suites,
    })
}

fn run_suite(ctx: &Ctx, name: &str, r: &mut SuiteResult) -> Result<()> {
    match name {
        "witness" => witness(ctx, r),
        "axioms" => axioms(ctx, r),
        "census" => census(ctx, r),
        "congruence-lattice" => congruence_lattice(ctx, r),
        "term-soundness" => term_soundness(ctx, r),
        "equivalence" => equivalence(ctx, r),
        "semiabelian" => semiabelian(ctx, r),
        "variant-independence" => variant_independence(ctx, r),
        "reference-lists" => reference_lists(ctx, r),
        "dedupe" => dedupe(ctx, r),
        "inclusion-counterexample" => inclusion_counterexample(ctx, r),
        "class-in-image" => class_in_image(ctx, r),
        "image-of-zero" => image_of_zero(ctx, r),
        "image-equivalence" => image_equivalence(ctx, r),
        "kernel-criteria" => kernel_criteria(ctx, r),
        "closure-minimality" => closure_minimality(ctx, r),
        "extension" => extension(ctx, r),
        "same-signature" => same_signature(ctx, r),
        "right-cancellable" => right_cancellable(ctx, r),
        _ => unreachable!("suite list and dispatch agree"),
    }
}

/// Runs `f` with an engine for every bundled algebra of every variety.
fn each_engine(
    ctx: &Ctx,
    r: &mut SuiteResult,
    mut f: impl FnMut(&Loaded, &IdealEngine<'_>, &mut SuiteResult) -> Result<()>,
) -> Result<()> {
    for v in &ctx.varieties {
        for alg in &v.spec.bundled {
            match IdealEngine::new(&v.spec, alg, &ctx.budget) {
                Ok(engine) => f(v, &engine, r)?,
                Err(e) => r.fail(format!("{}/{}: {e}", v.spec.name(), alg.name())),
            }
        }
    }
    Ok(())
}

fn tag(engine: &IdealEngine<'_>) -> String {
    format!("{}/{}", engine.spec().name(), engine.algebra().name())
}

fn witness(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    for v in &ctx.varieties {
        for alg in &v.spec.bundled {
            let report = verify_witness(alg, &v.spec.witness, &ctx.budget)?;
            r.check(report.ok, || format!("{}/{}: {:?}", v.spec.name(), alg.name(), report.failures));
        }
    }
    // a projection breaks x/x = e on every nontrivial model
    if let Some(g) = ctx.varieties.iter().find(|v| v.registry == "group") {
        let sig = &g.spec.sig;
        let broken = BitWitness::new(
            sig,
            g.spec.witness.zero().clone(),
            vec![parse_term("x1", sig)?],
            g.spec.witness.theta().clone(),
        )?;
        for alg in g.spec.bundled.iter().filter(|a| a.size() > 1) {
            let report = verify_witness(alg, &broken, &ctx.budget)?;
            let has_assignment = report.failures.first().is_some_and(|f| !f.assignment.is_empty());
            r.check(!report.ok && has_assignment, || {
                format!("broken witness accepted on {}", alg.name())
            });
        }
    }
    Ok(())
}

fn axioms(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    for v in &ctx.varieties {
        for alg in &v.spec.bundled {
            for (lhs, rhs) in &v.spec.axioms {
                let c = holds_identity(alg, lhs, rhs, &ctx.budget)?;
                r.check(c.holds, || format!("{}/{}: {lhs} = {rhs} fails at {:?}", v.spec.name(), alg.name(), c.counterexample));
            }
        }
    }
    if let Some(l) = ctx.varieties.iter().find(|v| v.registry == "loop") {
        let assoc_l = parse_term("mul(mul(x1,x2),x3)", &l.spec.sig)?;
        let assoc_r = parse_term("mul(x1,mul(x2,x3))", &l.spec.sig)?;
        for alg in l.spec.bundled.iter().filter(|a| a.size() == 5) {
            let c = holds_identity(alg, &assoc_l, &assoc_r, &ctx.budget)?;
            r.check(!c.holds, || format!("{} is associative", alg.name()));
        }
    }
    Ok(())
}

fn census(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    for v in &ctx.varieties {
        for alg in &v.spec.bundled {
            let expected = ctx
                .census
                .iter()
                .find(|(var, a, _)| var == v.spec.name() && a == alg.name())
                .map(|&(_, _, c)| c);
            let Some(expected) = expected else {
                r.notes.push(format!("{}/{}: no recorded count", v.spec.name(), alg.name()));
                continue;
            };
            let found = all_congruences(alg, &ctx.budget)?.len();
            r.check(found == expected, || {
                format!("{}/{}: {found} congruences, expected {expected}", v.spec.name(), alg.name())
            });
        }
    }
    Ok(())
}

fn congruence_lattice(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |_, e, r| {
        let alg = e.algebra();
        let m = alg.size();
        let lattice = e.oracle()?.congruences().to_vec();
        r.check(lattice.contains(&Partition::discrete(m)), || format!("{}: no identity relation", tag(e)));
        r.check(lattice.contains(&Partition::indiscrete(m)), || format!("{}: no all relation", tag(e)));
        r.check(kernel_of(&Partition::discrete(m), e.zero()) == Subset::singleton(e.zero()), || tag(e));
        r.check(kernel_of(&Partition::indiscrete(m), e.zero()) == Subset::full(m), || tag(e));
        for c in &lattice {
            r.check(is_congruence(alg, c).is_ok(), || format!("{}: {c} is not compatible", tag(e)));
            for d in &lattice {
                r.check(lattice.contains(&c.join(d)), || format!("{}: join of {c} and {d} missing", tag(e)));
            }
        }
        for a in 0..m {
            for b in a + 1..m {
                let p = principal_congruence(alg, a, b, &ctx.budget)?;
                for c in lattice.iter().filter(|c| c.related(a, b)) {
                    r.check(p.refines(c), || format!("{}: principal ({a},{b}) not below {c}", tag(e)));
                }
            }
        }
        Ok(())
    })
}

fn all_termsets(spec: &VarietySpec) -> Result<Vec<TermSet>> {
    let mut out = Vec::new();
    for v in Variant::ALL {
        out.push(gen_termset(spec, v, false)?);
        if spec.semiabelian {
            out.push(gen_termset(spec, v, true)?);
        }
    }
    Ok(out)
}

fn term_soundness(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |v, e, r| {
        for ts in all_termsets(&v.spec)? {
            for (t, p) in ts.iter() {
                let ok = is_zero_ideal_term(e.algebra(), e.zero(), t, &ctx.budget)?;
                r.check(ok, || format!("{}: {t} ({p}) is not an ideal term", tag(e)));
            }
        }
        Ok(())
    })
}

fn equivalence(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |_, e, r| {
        for h in nonempty_subsets(e.algebra().size()) {
            let report = e.report(&h, Method::All, false)?;
            r.check(report.agreement, || format!("{}: {h} {:?}", tag(e), report.verdicts));
        }
        Ok(())
    })
}

fn semiabelian(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |v, e, r| {
        if !v.spec.semiabelian {
            return Ok(());
        }
        for h in nonempty_subsets(e.algebra().size()) {
            for c in Condition::ALL {
                let plain = e.check_condition(&h, c, false)?.holds;
                let refined = e.check_condition(&h, c, true)?.holds;
                r.check(plain == refined, || format!("{}: {h} {c} changes under the subalgebra test", tag(e)));
            }
            for var in Variant::ALL {
                let plain = e.check_termset(&h, var, false)?.holds;
                let refined = e.check_termset(&h, var, true)?.holds;
                r.check(plain == refined, || format!("{}: {h} termset-{var} changes with replacement terms", tag(e)));
            }
        }
        Ok(())
    })
}

fn variant_independence(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |_, e, r| {
        for h in nonempty_subsets(e.algebra().size()) {
            let verdicts = Variant::ALL
                .iter()
                .map(|&v| Ok(e.check_termset(&h, v, false)?.holds))
                .collect::<Result<Vec<bool>>>()?;
            r.check(verdicts.windows(2).all(|w| w[0] == w[1]), || format!("{}: {h} {verdicts:?}", tag(e)));
        }
        Ok(())
    })
}

fn reference_lists(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |v, e, r| {
        for reference in reference_sets(&v.spec)? {
            let listed = CompiledSet::from_terms(e.algebra(), &reference.terms)?;
            for h in nonempty_subsets(e.algebra().size()) {
                let raw = e.check_termset(&h, reference.variant, false)?.holds;
                let other = listed.closed(&h, &ctx.budget)?.holds;
                r.check(raw == other, || {
                    format!("{}: {h} raw set {} says {raw}, {} says {other}", tag(e), reference.variant, reference.name)
                });
            }
        }
        Ok(())
    })
}

fn dedupe(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |v, e, r| {
        for ts in all_termsets(&v.spec)? {
            let syn = dedupe_syntactic(&ts);
            r.check(dedupe_syntactic(&syn) == syn, || format!("{}: syntactic dedupe not idempotent", tag(e)));
            let (sem, _) = dedupe_semantic(&ts, e.algebra(), &ctx.budget)?;
            let full = CompiledSet::from_termset(e.algebra(), &ts)?;
            let reduced = CompiledSet::from_termset(e.algebra(), &sem)?;
            for h in nonempty_subsets(e.algebra().size()) {
                let a = full.closed(&h, &ctx.budget)?.holds;
                let b = reduced.closed(&h, &ctx.budget)?.holds;
                r.check(a == b, || format!("{}: {h} verdict changes after semantic dedupe", tag(e)));
            }
        }
        Ok(())
    })?;
    if let Some(l) = ctx.varieties.iter().find(|v| v.registry == "loop") {
        let ts = gen_termset(&l.spec, Variant::I, false)?;
        let removed = ts.len() - dedupe_syntactic(&ts).len();
        r.check(removed == 1, || format!("loop set i: {removed} syntactic duplicates, expected 1"));
    }
    Ok(())
}

fn inclusion_counterexample(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    let mut found = 0;
    each_engine(ctx, r, |_, e, r| {
        for h in nonempty_subsets(e.algebra().size()) {
            let inclusion = e.image_alpha_inclusion(&h)?.holds;
            let ideal = e.check_oracle(&h)?.holds;
            r.check(!ideal || inclusion, || format!("{}: ideal {h} violates the image inclusion", tag(e)));
            if inclusion && !ideal {
                found += 1;
            }
        }
        Ok(())
    })?;
    r.notes.push(format!("{found} subsets satisfy the inclusion without being ideals"));
    if let Some(g) = ctx.varieties.iter().find(|v| v.registry == "group") {
        if let Some(s3) = g.spec.bundled.iter().find(|a| a.name() == "S3") {
            let e = IdealEngine::new(&g.spec, s3, &ctx.budget)?;
            // {e, (0 1)}: a non-normal subgroup
            let h: Subset = [0, 3].into_iter().collect();
            r.check(e.image_alpha_inclusion(&h)?.holds, || "S3 {0,3}: inclusion fails".into());
            for c in Condition::ALL {
                r.check(!e.check_condition(&h, c, false)?.holds, || format!("S3 {{0,3}} passes {c}"));
            }
            for v in Variant::ALL {
                r.check(!e.check_termset(&h, v, false)?.holds, || format!("S3 {{0,3}} passes termset-{v}"));
            }
        }
    }
    r.check(found > 0, || "no subset satisfies the inclusion without being an ideal".into());
    Ok(())
}

fn class_in_image(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |_, e, r| {
        for h in nonempty_subsets(e.algebra().size()) {
            let c = e.class_in_image(&h)?;
            if c.applies {
                r.check(c.holds, || format!("{}: {h}", tag(e)));
            }
        }
        Ok(())
    })
}

fn image_of_zero(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |_, e, r| {
        for h in nonempty_subsets(e.algebra().size()) {
            let c = e.image_of_zero(&h)?;
            if c.applies {
                r.check(c.holds, || format!("{}: {h}", tag(e)));
            }
        }
        Ok(())
    })
}

fn image_equivalence(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |_, e, r| {
        for h in nonempty_subsets(e.algebra().size()) {
            let c = e.image_equivalence(&h)?;
            r.check(c.consistent(), || format!("{}: {h} {c:?}", tag(e)));
        }
        Ok(())
    })
}

fn kernel_criteria(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |_, e, r| {
        let m = e.algebra().size();
        for h in e.oracle()?.ideals() {
            r.check(e.congruence_is_sim(&h)?, || format!("{}: {h} congruence differs from image relation", tag(e)));
            for a in 0..m {
                for b in 0..m {
                    let v = e.kernel_criteria(&h, a, b)?;
                    r.check(v.iter().all(|&x| x == v[0]), || format!("{}: {h} ({a},{b}) {v:?}", tag(e)));
                }
            }
        }
        Ok(())
    })
}

fn closure_minimality(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |_, e, r| {
        let m = e.algebra().size();
        let ideals = e.oracle()?.ideals();
        for bits in 0u64..1 << m {
            let seed = Subset::from_bits(bits);
            let expected = ideals
                .iter()
                .filter(|i| seed.is_subset(i))
                .fold(Subset::full(m), |acc, i| acc.intersection(i));
            for v in Variant::ALL {
                let got = e.ideal_closure(&seed, v, false)?;
                r.check(got == expected, || format!("{}: closure of {seed} under set {v} is {got}, expected {expected}", tag(e)));
            }
        }
        Ok(())
    })
}

/// Varieties of `ctx` whose signature properly extends `spec`'s with the
/// same witness.
fn extensions_of<'a>(ctx: &'a Ctx, spec: &VarietySpec) -> impl Iterator<Item = &'a Loaded> {
    let base = spec.clone();
    ctx.varieties.iter().filter(move |v| {
        v.spec.witness == base.witness
            && base.sig.is_subsignature_of(&v.spec.sig)
            && v.spec.sig.ops().len() > base.sig.ops().len()
    })
}

fn extension(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    for base in &ctx.varieties {
        for ext in extensions_of(ctx, &base.spec) {
            r.notes.push(format!("{} extends {}", ext.spec.name(), base.spec.name()));
            for alg in &ext.spec.bundled {
                let e = IdealEngine::new(&ext.spec, alg, &ctx.budget)?;
                let mut sets = Vec::new();
                for v in Variant::ALL {
                    let ts = gen_termset(&base.spec, v, false)?;
                    for mode in [ExtensionMode::A, ExtensionMode::B] {
                        let extended = extend_termset(&ts, &ext.spec, mode)?;
                        sets.push((format!("{v}/{mode}"), CompiledSet::from_termset(alg, &extended)?));
                    }
                }
                for h in nonempty_subsets(alg.size()) {
                    let direct = e.check_oracle(&h)?.holds;
                    for (label, set) in &sets {
                        let got = set.closed(&h, &ctx.budget)?.holds;
                        r.check(got == direct, || format!("{}/{}: {h} extended set {label} says {got}", ext.spec.name(), alg.name()));
                    }
                    let [composite, single] = e.extension_conditions(&h, &base.spec)?;
                    r.check(composite == direct && single == direct, || {
                        format!("{}/{}: {h} base ideal plus transport gives {composite}/{single}", ext.spec.name(), alg.name())
                    });
                }
            }
        }
    }
    Ok(())
}

/// Models of one variety reinterpreted in another variety of the same
/// signature shape: when both sets of axioms hold, both families of
/// generated sets give the same verdicts.
fn same_signature(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    let shape = |s: &VarietySpec| s.sig.ops().iter().map(|o| o.arity).collect::<Vec<_>>();
    for src in &ctx.varieties {
        for dst in &ctx.varieties {
            if src.registry == dst.registry || shape(&src.spec) != shape(&dst.spec) {
                continue;
            }
            for alg in &src.spec.bundled {
                let moved = alg.relabel(alg.name(), &dst.spec.sig)?;
                if !satisfies(&moved, &dst.spec.axioms, &ctx.budget)? {
                    continue;
                }
                let (Ok(a), Ok(b)) = (
                    IdealEngine::new(&src.spec, alg, &ctx.budget),
                    IdealEngine::new(&dst.spec, &moved, &ctx.budget),
                ) else {
                    continue;
                };
                r.notes.push(format!("{}/{} read in {}", src.spec.name(), alg.name(), dst.spec.name()));
                for h in nonempty_subsets(alg.size()) {
                    for v in Variant::ALL {
                        let x = a.check_termset(&h, v, false)?.holds;
                        let y = b.check_termset(&h, v, false)?.holds;
                        r.check(x == y, || format!("{}/{} as {}: {h} set {v} {x} vs {y}", src.spec.name(), alg.name(), dst.spec.name()));
                    }
                }
            }
        }
    }
    Ok(())
}

fn satisfies(alg: &FiniteAlgebra, axioms: &[(Term, Term)], budget: &Budget) -> Result<bool> {
    for (l, rhs) in axioms {
        if !holds_identity(alg, l, rhs, budget)?.holds {
            return Ok(false);
        }
    }
    Ok(true)
}

fn right_cancellable(ctx: &Ctx, r: &mut SuiteResult) -> Result<()> {
    each_engine(ctx, r, |v, e, r| {
        let literal = e.right_cancellable(None)?.holds;
        let mut on_ideals = 0;
        let ideals = e.oracle()?.ideals();
        for h in &ideals {
            if e.right_cancellable(Some(h))?.holds {
                on_ideals += 1;
            }
        }
        r.notes.push(format!(
            "{}: all of A {literal}, restricted to ideals {on_ideals}/{}",
            tag(e),
            ideals.len()
        ));
        if v.registry == "group" || v.registry == "ring" {
            r.check(literal, || format!("{}: a group is not right-cancellable", tag(e)));
        }
        // in every ideal the image inclusion follows from the ideal property
        for h in &ideals {
            r.check(e.image_alpha_inclusion(h)?.holds, || format!("{}: {h}", tag(e)));
        }
        Ok(())
    })
}
