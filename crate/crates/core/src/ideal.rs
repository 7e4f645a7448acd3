//! Deciding whether a subset is an ideal: by term closure, by each of the
//! seven equivalent conditions, and by the congruence-kernel oracle.

use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::algebra::FiniteAlgebra;
use crate::congruence::{all_congruences, is_congruence, kernel_of};
use crate::error::{Error, Result};
use crate::eval::{for_each_tuple, product_size, Budget, CompiledTerm};
use crate::subset::{Partition, Subset};
use crate::term::{Term, Var};
use crate::termset::{gen_termset, TermSet, Variant};
use crate::variety::VarietySpec;
use crate::witness::{verify_witness, BoundWitness};

/// Every nonempty subset of `{0..m-1}`, in order of their bit masks.
pub fn nonempty_subsets(m: usize) -> impl Iterator<Item = Subset> {
    assert!(m < 64, "carrier too large to enumerate subsets");
    (1u64..1u64 << m).map(Subset::from_bits)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub condition: String,
    pub clause: String,
    pub assignment: Vec<(String, usize)>,
    pub value: Option<usize>,
}

/// A verdict with the first violation found, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub holds: bool,
    pub failure: Option<Failure>,
}

impl Check {
    fn from_fail(condition: &str, fail: Option<Fail>) -> Check {
        Check {
            holds: fail.is_none(),
            failure: fail.map(|f| f.named(condition)),
        }
    }
}

struct Fail {
    clause: String,
    assignment: Vec<(String, usize)>,
    value: Option<usize>,
}

impl Fail {
    fn new(clause: impl Into<String>, assignment: Vec<(String, usize)>, value: Option<usize>) -> Self {
        Fail {
            clause: clause.into(),
            assignment,
            value,
        }
    }

    fn named(self, condition: &str) -> Failure {
        Failure {
            condition: condition.to_string(),
            clause: self.clause,
            assignment: self.assignment,
            value: self.value,
        }
    }
}

fn named(prefix: &str, values: &[usize]) -> Vec<(String, usize)> {
    values
        .iter()
        .enumerate()
        .map(|(k, &v)| (format!("{prefix}{}", k + 1), v))
        .collect()
}

/// Returns early from the enclosing function with the first failure.
macro_rules! check {
    ($e:expr) => {
        if let Some(f) = $e? {
            return Ok(Some(f));
        }
    };
}

/// A list of terms compiled against one algebra, for repeated closure checks.
#[derive(Clone, Debug)]
pub struct CompiledSet<'a> {
    alg: &'a FiniteAlgebra,
    entries: Vec<(String, CompiledTerm)>,
}

impl<'a> CompiledSet<'a> {
    /// `labels` name each term in failure reports.
    pub fn new(alg: &'a FiniteAlgebra, terms: impl IntoIterator<Item = (String, Term)>) -> Result<Self> {
        let entries = terms
            .into_iter()
            .map(|(label, t)| Ok((label, CompiledTerm::new(alg, &t)?)))
            .collect::<Result<_>>()?;
        Ok(CompiledSet { alg, entries })
    }

    pub fn from_terms(alg: &'a FiniteAlgebra, terms: &[Term]) -> Result<Self> {
        Self::new(alg, terms.iter().enumerate().map(|(k, t)| (format!("term {} = {t}", k + 1), t.clone())))
    }

    pub fn from_termset(alg: &'a FiniteAlgebra, ts: &TermSet) -> Result<Self> {
        Self::new(alg, ts.iter().map(|(t, p)| (format!("{p} term={t}"), t.clone())))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn first_escape(&self, h: &Subset, budget: &Budget) -> Result<Option<Fail>> {
        if h.is_empty() {
            return Ok(Some(Fail::new("nonempty", vec![], None)));
        }
        h.check_within(self.alg.size())?;
        let carrier = self.alg.carrier();
        let members = h.to_vec();
        let mask = h.mask(self.alg.size());
        let mut stack = Vec::new();
        for (label, ct) in &self.entries {
            let mut domains = vec![carrier.as_slice(); ct.num_x()];
            domains.extend(std::iter::repeat_n(members.as_slice(), ct.num_y()));
            budget.charge(product_size(&domains))?;
            let mut fail = None;
            for_each_tuple(&domains, |slots| {
                let v = ct.eval_with(self.alg, slots, &mut stack);
                if mask[v] {
                    return true;
                }
                let assignment = ct.vars().iter().map(Var::to_string).zip(slots.iter().copied()).collect();
                fail = Some(Fail::new(label.clone(), assignment, Some(v)));
                false
            });
            if fail.is_some() {
                return Ok(fail);
            }
        }
        Ok(None)
    }

    /// Whether `h` is nonempty and every term, with `x` slots anywhere and
    /// `y` slots in `h`, takes values in `h`.
    pub fn closed(&self, h: &Subset, budget: &Budget) -> Result<Check> {
        Ok(Check::from_fail("closure", self.first_escape(h, budget)?))
    }

    /// Least set containing `seed` and `zero` that is closed under the terms.
    pub fn closure(&self, seed: &Subset, zero: usize, budget: &Budget) -> Result<Subset> {
        let m = self.alg.size();
        seed.check_within(m)?;
        let mut mask = seed.mask(m);
        mask[zero] = true;
        let carrier = self.alg.carrier();
        let mut stack = Vec::new();
        loop {
            let members: Vec<usize> = (0..m).filter(|&a| mask[a]).collect();
            let mut grew = false;
            for (_, ct) in &self.entries {
                let mut domains = vec![carrier.as_slice(); ct.num_x()];
                domains.extend(std::iter::repeat_n(members.as_slice(), ct.num_y()));
                budget.charge(product_size(&domains))?;
                for_each_tuple(&domains, |slots| {
                    let v = ct.eval_with(self.alg, slots, &mut stack);
                    if !mask[v] {
                        mask[v] = true;
                        grew = true;
                    }
                    true
                });
            }
            if !grew {
                return Ok((0..m).filter(|&a| mask[a]).collect());
            }
        }
    }
}

/// Whether `h` is nonempty and closed under `terms` (parameters anywhere,
/// ideal slots in `h`), with the first escaping instance on failure.
pub fn closed_under(alg: &FiniteAlgebra, terms: &[Term], h: &Subset, budget: &Budget) -> Result<Check> {
    CompiledSet::from_terms(alg, terms)?.closed(h, budget)
}

/// Least subset containing `seed` and `zero` closed under `terms`.
pub fn ideal_closure(alg: &FiniteAlgebra, terms: &[Term], zero: usize, seed: &Subset, budget: &Budget) -> Result<Subset> {
    CompiledSet::from_terms(alg, terms)?.closure(seed, zero, budget)
}

/// Congruences of an algebra indexed by their kernels.
#[derive(Clone, Debug)]
pub struct Oracle {
    congruences: Vec<Partition>,
    kernels: Vec<Subset>,
}

impl Oracle {
    /// Fails if two congruences share a kernel, which cannot happen in an
    /// algebra of a variety with a witness.
    pub fn new(alg: &FiniteAlgebra, zero: usize, budget: &Budget) -> Result<Oracle> {
        let congruences = all_congruences(alg, budget)?;
        let kernels: Vec<Subset> = congruences.iter().map(|c| kernel_of(c, zero)).collect();
        let mut sorted = kernels.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                let count = kernels.iter().filter(|k| **k == w[0]).count();
                return Err(Error::KernelNotUnique(count, w[0].to_string()));
            }
        }
        Ok(Oracle { congruences, kernels })
    }

    pub fn congruences(&self) -> &[Partition] {
        &self.congruences
    }

    pub fn is_ideal(&self, h: &Subset) -> bool {
        self.kernels.contains(h)
    }

    pub fn congruence_with_kernel(&self, h: &Subset) -> Option<&Partition> {
        self.kernels.iter().position(|k| k == h).map(|i| &self.congruences[i])
    }

    /// All kernels, smallest first, ties broken lexicographically.
    pub fn ideals(&self) -> Vec<Subset> {
        let mut out = self.kernels.clone();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

pub fn is_ideal_oracle(alg: &FiniteAlgebra, zero: usize, h: &Subset, budget: &Budget) -> Result<bool> {
    Ok(Oracle::new(alg, zero, budget)?.is_ideal(h))
}

pub fn list_ideals(alg: &FiniteAlgebra, zero: usize, budget: &Budget) -> Result<Vec<Subset>> {
    Ok(Oracle::new(alg, zero, budget)?.ideals())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
}

impl Condition {
    pub const ALL: [Condition; 7] = [
        Condition::I,
        Condition::II,
        Condition::III,
        Condition::IV,
        Condition::V,
        Condition::VI,
        Condition::VII,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Condition::I => "cond-i",
            Condition::II => "cond-ii",
            Condition::III => "cond-iii",
            Condition::IV => "cond-iv",
            Condition::V => "cond-v",
            Condition::VI => "cond-vi",
            Condition::VII => "cond-vii",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Oracle,
    Condition(Condition),
    TermSet(Variant),
    All,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        if s == "oracle" {
            return Ok(Method::Oracle);
        }
        if s == "all" {
            return Ok(Method::All);
        }
        if let Some(c) = Condition::ALL.iter().find(|c| c.label() == s) {
            return Ok(Method::Condition(*c));
        }
        if let Some(v) = s.strip_prefix("termset-") {
            return Ok(Method::TermSet(v.parse()?));
        }
        Err(Error::Signature(format!("unknown method `{s}`")))
    }
}

fn termset_label(v: Variant) -> String {
    format!("termset-{v}")
}

/// Verdicts in insertion order; serialized as a JSON object.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdicts(pub Vec<(String, bool)>);

impl Verdicts {
    pub fn get(&self, key: &str) -> Option<bool> {
        self.0.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

impl Serialize for Verdicts {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealReport {
    pub algebra: String,
    pub subset: Subset,
    pub verdicts: Verdicts,
    pub agreement: bool,
    pub failures: Vec<Failure>,
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionalCheck {
    /// Whether the hypotheses hold for this subset.
    pub applies: bool,
    pub holds: bool,
}

/// Both sides of the equivalence for `αᵢ`-images of `θ`-images.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ImageEquivalence {
    /// `αᵢ(θ(H,..,H,a), θ(H,..,H,a)) ⊆ H` for all `a`, `i`.
    pub inclusion: bool,
    /// Classes equal images, and related elements have `αᵢ`-values in `H`.
    pub classes: bool,
    pub zero_in_h: bool,
}

impl ImageEquivalence {
    pub fn consistent(&self) -> bool {
        self.inclusion == self.classes && (!self.inclusion || self.zero_in_h)
    }
}

/// `τ` in the transport clauses.
#[derive(Clone, Copy, Debug)]
enum Op {
    Sym(usize),
    Theta,
    Alpha(usize),
}

/// Data shared by all checks on one subset.
struct Sub {
    h: Subset,
    members: Vec<usize>,
    mask: Vec<bool>,
    images: Vec<Vec<usize>>,
}

/// Ideal checks for one algebra of a variety with a witness.
pub struct IdealEngine<'a> {
    spec: &'a VarietySpec,
    alg: &'a FiniteAlgebra,
    bw: BoundWitness<'a>,
    budget: &'a Budget,
    oracle: OnceCell<Oracle>,
    sets: [OnceCell<CompiledSet<'a>>; 8],
}

impl<'a> IdealEngine<'a> {
    /// Fails unless `alg` is over the signature of `spec` and the witness
    /// identities hold in it.
    pub fn new(spec: &'a VarietySpec, alg: &'a FiniteAlgebra, budget: &'a Budget) -> Result<Self> {
        if alg.signature() != &spec.sig {
            return Err(Error::Signature(format!(
                "algebra {} is over `{}`, expected `{}`",
                alg.name(),
                alg.signature().name(),
                spec.sig.name()
            )));
        }
        let report = verify_witness(alg, &spec.witness, budget)?;
        if let Some(f) = report.failures.first() {
            return Err(Error::Witness(format!(
                "`{}` fails on {} at {:?}",
                f.identity,
                alg.name(),
                f.assignment
            )));
        }
        Ok(IdealEngine {
            spec,
            alg,
            bw: BoundWitness::new(alg, &spec.witness, budget)?,
            budget,
            oracle: OnceCell::new(),
            sets: Default::default(),
        })
    }

    pub fn algebra(&self) -> &'a FiniteAlgebra {
        self.alg
    }

    pub fn spec(&self) -> &'a VarietySpec {
        self.spec
    }

    pub fn zero(&self) -> usize {
        self.bw.zero()
    }

    pub fn witness(&self) -> &BoundWitness<'a> {
        &self.bw
    }

    pub fn oracle(&self) -> Result<&Oracle> {
        if let Some(o) = self.oracle.get() {
            return Ok(o);
        }
        let o = Oracle::new(self.alg, self.zero(), self.budget)?;
        Ok(self.oracle.get_or_init(|| o))
    }

    pub fn termset(&self, variant: Variant, semiabelian: bool) -> Result<&CompiledSet<'a>> {
        let cell = &self.sets[variant as usize * 2 + semiabelian as usize];
        if let Some(s) = cell.get() {
            return Ok(s);
        }
        let ts = gen_termset(self.spec, variant, semiabelian)?;
        let s = CompiledSet::from_termset(self.alg, &ts)?;
        Ok(cell.get_or_init(|| s))
    }

    fn prepare(&self, h: &Subset) -> Result<Sub> {
        let m = self.alg.size();
        h.check_within(m)?;
        let n = self.bw.n() as u32;
        self.budget
            .charge((m as u64).saturating_mul((h.len() as u64).saturating_pow(n)))?;
        Ok(Sub {
            members: h.to_vec(),
            mask: h.mask(m),
            images: (0..m).map(|a| self.bw.theta_image(h, a).to_vec()).collect(),
            h: h.clone(),
        })
    }

    pub fn theta_image(&self, h: &Subset, a: usize) -> Result<Subset> {
        self.check_element(a)?;
        h.check_within(self.alg.size())?;
        Ok(self.bw.theta_image(h, a))
    }

    fn check_element(&self, a: usize) -> Result<()> {
        if a >= self.alg.size() {
            return Err(Error::ElementOutOfRange {
                element: a,
                size: self.alg.size(),
            });
        }
        Ok(())
    }

    /// `a ∼ b` iff their `θ`-images over `h` coincide.
    pub fn sim_relation(&self, h: &Subset) -> Result<Partition> {
        if h.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(Partition::from_labels(&self.prepare(h)?.images))
    }

    /// The class of `a` under [`Self::sim_relation`].
    pub fn eq_class(&self, h: &Subset, a: usize) -> Result<Subset> {
        self.check_element(a)?;
        Ok(self.sim_relation(h)?.block_of(a))
    }

    fn op_name(&self, op: Op) -> String {
        match op {
            Op::Sym(k) => self.alg.signature().ops()[k].name.clone(),
            Op::Theta => "theta".into(),
            Op::Alpha(j) => format!("alpha{}", j + 1),
        }
    }

    fn op_arity(&self, op: Op) -> usize {
        match op {
            Op::Sym(k) => self.alg.signature().ops()[k].arity,
            Op::Theta => self.bw.n() + 1,
            Op::Alpha(_) => 2,
        }
    }

    fn op_apply(&self, op: Op, args: &[usize]) -> usize {
        match op {
            Op::Sym(k) => self.alg.apply(k, args),
            Op::Theta => self.bw.theta(args),
            Op::Alpha(j) => self.bw.alpha(j, args[0], args[1]),
        }
    }

    fn signature_ops(&self) -> impl Iterator<Item = Op> {
        (0..self.alg.signature().ops().len()).map(Op::Sym)
    }

    fn contains_zero(&self, s: &Sub) -> Result<Option<Fail>> {
        let z = self.zero();
        Ok((!s.mask[z]).then(|| Fail::new("contains-zero", vec![], Some(z))))
    }

    fn closed_theta(&self, s: &Sub) -> Result<Option<Fail>> {
        let domains = vec![s.members.as_slice(); self.bw.n() + 1];
        self.budget.charge(product_size(&domains))?;
        let mut fail = None;
        for_each_tuple(&domains, |hs| {
            let v = self.bw.theta(hs);
            if s.mask[v] {
                return true;
            }
            fail = Some(Fail::new("theta-closure", named("h", hs), Some(v)));
            false
        });
        Ok(fail)
    }

    fn closed_alpha(&self, s: &Sub) -> Result<Option<Fail>> {
        for i in 0..self.bw.n() {
            for &a in &s.members {
                for &b in &s.members {
                    let v = self.bw.alpha(i, a, b);
                    if !s.mask[v] {
                        return Ok(Some(Fail::new(
                            format!("alpha-closure i={}", i + 1),
                            named("h", &[a, b]),
                            Some(v),
                        )));
                    }
                }
            }
        }
        Ok(None)
    }

    fn closed_alpha_zero(&self, s: &Sub) -> Result<Option<Fail>> {
        let z = self.zero();
        for i in 0..self.bw.n() {
            for &a in &s.members {
                let v = self.bw.alpha(i, a, z);
                if !s.mask[v] {
                    return Ok(Some(Fail::new(
                        format!("alpha-zero-closure i={}", i + 1),
                        named("h", &[a]),
                        Some(v),
                    )));
                }
            }
        }
        Ok(None)
    }

    fn subalgebra(&self, s: &Sub) -> Result<Option<Fail>> {
        for op in self.signature_ops() {
            let domains = vec![s.members.as_slice(); self.op_arity(op)];
            self.budget.charge(product_size(&domains))?;
            let mut fail = None;
            for_each_tuple(&domains, |args| {
                let v = self.op_apply(op, args);
                if s.mask[v] {
                    return true;
                }
                fail = Some(Fail::new(format!("subalgebra tau={}", self.op_name(op)), named("h", args), Some(v)));
                false
            });
            if fail.is_some() {
                return Ok(fail);
            }
        }
        Ok(None)
    }

    /// `αᵢ(τ(θ(H,..,a1), .., θ(H,..,ak)), τ(a1, .., ak)) ⊆ H`.
    fn transport(&self, s: &Sub, op: Op) -> Result<Option<Fail>> {
        let k = self.op_arity(op);
        let carrier = self.alg.carrier();
        let outer = vec![carrier.as_slice(); k];
        let mut fail = None;
        let mut charged = Ok(());
        for_each_tuple(&outer, |a| {
            let rhs = self.op_apply(op, a);
            let inner: Vec<&[usize]> = a.iter().map(|&x| s.images[x].as_slice()).collect();
            if let Err(e) = self.budget.charge(product_size(&inner)) {
                charged = Err(e);
                return false;
            }
            for_each_tuple(&inner, |b| {
                let lhs = self.op_apply(op, b);
                for i in 0..self.bw.n() {
                    let v = self.bw.alpha(i, lhs, rhs);
                    if !s.mask[v] {
                        let mut assignment = named("a", a);
                        assignment.extend(named("b", b));
                        fail = Some(Fail::new(
                            format!("transport tau={} i={}", self.op_name(op), i + 1),
                            assignment,
                            Some(v),
                        ));
                        return false;
                    }
                }
                true
            });
            fail.is_none()
        });
        charged?;
        Ok(fail)
    }

    /// `αᵢ(θ(H,..,H,a), θ(H,..,H,a)) ⊆ H`.
    fn image_alpha(&self, s: &Sub) -> Result<Option<Fail>> {
        for a in 0..self.alg.size() {
            let img = &s.images[a];
            self.budget.charge((img.len() * img.len() * self.bw.n()) as u64)?;
            for &b in img {
                for &c in img {
                    for i in 0..self.bw.n() {
                        let v = self.bw.alpha(i, b, c);
                        if !s.mask[v] {
                            return Ok(Some(Fail::new(
                                format!("image-alpha i={}", i + 1),
                                vec![("a".into(), a), ("b1".into(), b), ("b2".into(), c)],
                                Some(v),
                            )));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// `αᵢ(τ(a1, .., θ(H,..,H,aj), .., ak), τ(a1, .., ak)) ⊆ H`.
    fn single_transport(&self, s: &Sub, op: Op) -> Result<Option<Fail>> {
        let k = self.op_arity(op);
        let carrier = self.alg.carrier();
        let outer = vec![carrier.as_slice(); k];
        self.budget
            .charge(product_size(&outer).saturating_mul((k * s.members.len().max(1)) as u64))?;
        let mut fail = None;
        let mut args = Vec::with_capacity(k);
        for_each_tuple(&outer, |a| {
            let rhs = self.op_apply(op, a);
            for j in 0..k {
                for &b in &s.images[a[j]] {
                    args.clear();
                    args.extend_from_slice(a);
                    args[j] = b;
                    let lhs = self.op_apply(op, &args);
                    for i in 0..self.bw.n() {
                        let v = self.bw.alpha(i, lhs, rhs);
                        if !s.mask[v] {
                            let mut assignment = named("a", a);
                            assignment.push(("b".into(), b));
                            fail = Some(Fail::new(
                                format!("single-transport tau={} i={} j={}", self.op_name(op), i + 1, j + 1),
                                assignment,
                                Some(v),
                            ));
                            return false;
                        }
                    }
                }
            }
            true
        });
        Ok(fail)
    }

    /// The `∼`-class of every `a` equals its `θ`-image.
    fn classes_are_images(&self, s: &Sub) -> Result<Option<Fail>> {
        let sim = Partition::from_labels(&s.images);
        for a in 0..self.alg.size() {
            if sim.block_of(a).to_vec() != s.images[a] {
                return Ok(Some(Fail::new("class-equals-image", vec![("a".into(), a)], None)));
            }
        }
        Ok(None)
    }

    /// Related elements have all `αᵢ`-values in `H`.
    fn related_alpha(&self, s: &Sub) -> Result<Option<Fail>> {
        let sim = Partition::from_labels(&s.images);
        let m = self.alg.size();
        for a in 0..m {
            for b in 0..m {
                if !sim.related(a, b) {
                    continue;
                }
                for i in 0..self.bw.n() {
                    let v = self.bw.alpha(i, a, b);
                    if !s.mask[v] {
                        return Ok(Some(Fail::new(
                            format!("related-alpha i={}", i + 1),
                            vec![("a".into(), a), ("b".into(), b)],
                            Some(v),
                        )));
                    }
                }
            }
        }
        Ok(None)
    }

    fn sim_congruence_kernel(&self, s: &Sub) -> Result<Option<Fail>> {
        let sim = Partition::from_labels(&s.images);
        if let Err(f) = is_congruence(self.alg, &sim) {
            let mut assignment = named("l", &f.left);
            assignment.extend(named("r", &f.right));
            return Ok(Some(Fail::new(
                format!("sim-congruence tau={}", f.symbol),
                assignment,
                Some(f.left_value),
            )));
        }
        if kernel_of(&sim, self.zero()) != s.h {
            return Ok(Some(Fail::new("sim-kernel", vec![], Some(self.zero()))));
        }
        Ok(None)
    }

    fn base_closure(&self, s: &Sub, semiabelian: bool, with_zero: bool) -> Result<Option<Fail>> {
        if semiabelian {
            return self.subalgebra(s);
        }
        if with_zero {
            check!(self.contains_zero(s));
        }
        check!(self.closed_theta(s));
        self.closed_alpha_zero(s)
    }

    fn condition_fail(&self, s: &Sub, cond: Condition, sa: bool) -> Result<Option<Fail>> {
        match cond {
            Condition::I => {
                let ideal = self.oracle()?.is_ideal(&s.h);
                Ok((!ideal).then(|| Fail::new("congruence-kernel", vec![], None)))
            }
            Condition::II => {
                if sa {
                    check!(self.subalgebra(s));
                } else {
                    check!(self.closed_theta(s));
                    check!(self.closed_alpha(s));
                }
                for op in self.signature_ops().chain([Op::Theta]) {
                    check!(self.transport(s, op));
                }
                Ok(None)
            }
            Condition::III => {
                check!(self.base_closure(s, sa, true));
                let alphas = (0..self.bw.n()).map(Op::Alpha);
                for op in self.signature_ops().chain([Op::Theta]).chain(alphas) {
                    check!(self.transport(s, op));
                }
                Ok(None)
            }
            Condition::IV => {
                check!(self.base_closure(s, sa, false));
                for op in self.signature_ops() {
                    check!(self.transport(s, op));
                }
                self.image_alpha(s)
            }
            Condition::V => {
                check!(self.base_closure(s, sa, false));
                check!(self.image_alpha(s));
                for op in self.signature_ops() {
                    check!(self.single_transport(s, op));
                }
                Ok(None)
            }
            Condition::VI => {
                check!(self.base_closure(s, false, true));
                check!(self.classes_are_images(s));
                for op in self.signature_ops() {
                    check!(self.single_transport(s, op));
                }
                Ok(None)
            }
            Condition::VII => self.sim_congruence_kernel(s),
        }
    }

    /// Evaluates one of the seven conditions on `h`. With `semiabelian`, the
    /// closure parts of (ii) to (v) are replaced by a subalgebra test.
    pub fn check_condition(&self, h: &Subset, cond: Condition, semiabelian: bool) -> Result<Check> {
        if semiabelian && !self.spec.semiabelian {
            return Err(Error::NotSemiAbelian);
        }
        if h.is_empty() {
            return Ok(Check::from_fail(cond.label(), Some(Fail::new("nonempty", vec![], None))));
        }
        let s = self.prepare(h)?;
        Ok(Check::from_fail(cond.label(), self.condition_fail(&s, cond, semiabelian)?))
    }

    /// Closure of `h` under the generated set `variant`.
    pub fn check_termset(&self, h: &Subset, variant: Variant, semiabelian: bool) -> Result<Check> {
        let fail = self.termset(variant, semiabelian)?.first_escape(h, self.budget)?;
        Ok(Check::from_fail(&termset_label(variant), fail))
    }

    pub fn check_oracle(&self, h: &Subset) -> Result<Check> {
        h.check_within(self.alg.size())?;
        let ideal = self.oracle()?.is_ideal(h);
        Ok(Check::from_fail(
            "oracle",
            (!ideal).then(|| Fail::new("congruence-kernel", vec![], None)),
        ))
    }

    /// Runs the requested methods on `h` and records whether they agree.
    pub fn report(&self, h: &Subset, method: Method, semiabelian: bool) -> Result<IdealReport> {
        let mut checks: Vec<(String, Check)> = Vec::new();
        let conds: Vec<Condition> = match method {
            Method::Condition(c) => vec![c],
            Method::All => Condition::ALL.to_vec(),
            _ => vec![],
        };
        for c in conds {
            checks.push((c.label().into(), self.check_condition(h, c, semiabelian)?));
        }
        let variants: Vec<Variant> = match method {
            Method::TermSet(v) => vec![v],
            Method::All => Variant::ALL.to_vec(),
            _ => vec![],
        };
        for v in variants {
            checks.push((termset_label(v), self.check_termset(h, v, semiabelian)?));
        }
        if matches!(method, Method::Oracle | Method::All) {
            checks.push(("oracle".into(), self.check_oracle(h)?));
        }
        let agreement = checks.windows(2).all(|w| w[0].1.holds == w[1].1.holds);
        Ok(IdealReport {
            algebra: self.alg.name().to_string(),
            subset: h.clone(),
            verdicts: Verdicts(checks.iter().map(|(k, c)| (k.clone(), c.holds)).collect()),
            agreement,
            failures: checks.into_iter().filter_map(|(_, c)| c.failure).collect(),
            elapsed_ms: None,
        })
    }

    /// Least ideal containing `seed`, by closure under generated set
    /// `variant`.
    pub fn ideal_closure(&self, seed: &Subset, variant: Variant, semiabelian: bool) -> Result<Subset> {
        self.termset(variant, semiabelian)?.closure(seed, self.zero(), self.budget)
    }

    /// For an ideal `h` and elements `a`, `b`: whether `a` and `b` are
    /// related by the congruence with kernel `h`; whether every `αᵢ(a, b)`
    /// lies in `h`; whether `a ∈ θ(H,..,H,b)`; whether `b ∈ θ(H,..,H,a)`.
    pub fn kernel_criteria(&self, h: &Subset, a: usize, b: usize) -> Result<[bool; 4]> {
        self.check_element(a)?;
        self.check_element(b)?;
        h.check_within(self.alg.size())?;
        let cong = self
            .oracle()?
            .congruence_with_kernel(h)
            .ok_or_else(|| Error::NotAnIdeal(h.to_string()))?;
        let in_h = (0..self.bw.n()).all(|i| h.contains(self.bw.alpha(i, a, b)));
        Ok([
            cong.related(a, b),
            in_h,
            self.bw.theta_image(h, b).contains(a),
            self.bw.theta_image(h, a).contains(b),
        ])
    }

    /// Whether the congruence with kernel `h` is the relation `∼` of `h`.
    pub fn congruence_is_sim(&self, h: &Subset) -> Result<bool> {
        let cong = self
            .oracle()?
            .congruence_with_kernel(h)
            .ok_or_else(|| Error::NotAnIdeal(h.to_string()))?
            .clone();
        Ok(cong == self.sim_relation(h)?)
    }

    /// `αᵢ(θ(H,..,H,a), θ(H,..,H,a)) ⊆ H` for every `a` and `i`. This alone
    /// does not make `h` an ideal.
    pub fn image_alpha_inclusion(&self, h: &Subset) -> Result<Check> {
        let s = self.prepare(h)?;
        Ok(Check::from_fail("inclusion", self.image_alpha(&s)?))
    }

    /// If `0 ∈ h`, every class lies inside the `θ`-image of its element.
    pub fn class_in_image(&self, h: &Subset) -> Result<ConditionalCheck> {
        let s = self.prepare(h)?;
        if !s.mask[self.zero()] {
            return Ok(ConditionalCheck {
                applies: false,
                holds: true,
            });
        }
        let sim = Partition::from_labels(&s.images);
        let holds = (0..self.alg.size()).all(|a| sim.block_of(a).iter().all(|b| s.images[a].binary_search(&b).is_ok()));
        Ok(ConditionalCheck { applies: true, holds })
    }

    /// If `h` contains `0` and is closed under `θ` and every `αᵢ(-, 0)`, the
    /// `θ`-image of `0` is `h` itself.
    pub fn image_of_zero(&self, h: &Subset) -> Result<ConditionalCheck> {
        let s = self.prepare(h)?;
        let applies = self.contains_zero(&s)?.is_none()
            && self.closed_theta(&s)?.is_none()
            && self.closed_alpha_zero(&s)?.is_none();
        Ok(ConditionalCheck {
            applies,
            holds: !applies || s.images[self.zero()] == s.members,
        })
    }

    pub fn image_equivalence(&self, h: &Subset) -> Result<ImageEquivalence> {
        if h.is_empty() {
            return Err(Error::EmptySubset);
        }
        let s = self.prepare(h)?;
        Ok(ImageEquivalence {
            inclusion: self.image_alpha(&s)?.is_none(),
            classes: self.classes_are_images(&s)?.is_none() && self.related_alpha(&s)?.is_none(),
            zero_in_h: s.mask[self.zero()],
        })
    }

    /// Whether `αᵢ(θ(a⃗, b), θ(a⃗′, b))` does not depend on `b`, with `a⃗`, `a⃗′`
    /// ranging over the carrier, or over `restrict` when given.
    pub fn right_cancellable(&self, restrict: Option<&Subset>) -> Result<Check> {
        let m = self.alg.size();
        let n = self.bw.n();
        let carrier = self.alg.carrier();
        let range = match restrict {
            Some(h) => {
                h.check_within(m)?;
                h.to_vec()
            }
            None => carrier.clone(),
        };
        let domains = vec![range.as_slice(); 2 * n];
        self.budget
            .charge(product_size(&domains).saturating_mul((m * n) as u64))?;
        let mut fail = None;
        let mut left = vec![0; n + 1];
        let mut right = vec![0; n + 1];
        for_each_tuple(&domains, |t| {
            left[..n].copy_from_slice(&t[..n]);
            right[..n].copy_from_slice(&t[n..]);
            for i in 0..n {
                let mut first = None;
                for b in 0..m {
                    left[n] = b;
                    right[n] = b;
                    let v = self.bw.alpha(i, self.bw.theta(&left), self.bw.theta(&right));
                    match first {
                        None => first = Some(v),
                        Some(f) if f == v => {}
                        Some(_) => {
                            let mut assignment = named("a", &t[..n]);
                            assignment.extend(named("c", &t[n..]));
                            assignment.push(("b0".into(), 0));
                            assignment.push(("b".into(), b));
                            fail = Some(Fail::new(format!("right-cancellable i={}", i + 1), assignment, Some(v)));
                            return false;
                        }
                    }
                }
            }
            true
        });
        Ok(Check::from_fail("right-cancellable", fail))
    }

    /// For `h` in an algebra of an extended signature: whether `h` is an
    /// ideal of the reduct to `base` together with transport for each new
    /// operation (composite form, then single-position form).
    pub fn extension_conditions(&self, h: &Subset, base: &VarietySpec) -> Result<[bool; 2]> {
        let new_ops = self.spec.new_operations(&base.sig)?;
        if h.is_empty() {
            return Ok([false, false]);
        }
        let reduct = self.alg.reduct(&base.sig)?;
        let base_ideal = Oracle::new(&reduct, self.zero(), self.budget)?.is_ideal(h);
        let s = self.prepare(h)?;
        let mut composite = base_ideal;
        let mut single = base_ideal;
        for op in &new_ops {
            let (k, _) = self.alg.signature().lookup(&op.name).expect("new operation");
            composite = composite && self.transport(&s, Op::Sym(k))?.is_none();
            single = single && self.single_transport(&s, Op::Sym(k))?.is_none();
        }
        Ok([composite, single])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::{builtin, find_bundled};

    fn s3() -> (VarietySpec, FiniteAlgebra) {
        let spec = builtin("group").unwrap();
        let alg = find_bundled(&spec, "S3").unwrap().clone();
        (spec, alg)
    }

    fn set(xs: &[usize]) -> Subset {
        xs.iter().copied().collect()
    }

    // S3 labels: 0 = identity, 1, 2 = 3-cycles, 3, 4, 5 = transpositions
    const A3: [usize; 3] = [0, 1, 2];

    #[test]
    fn images_and_classes_in_s3() {
        let (spec, alg) = s3();
        let b = Budget::default();
        let e = IdealEngine::new(&spec, &alg, &b).unwrap();
        assert_eq!(e.theta_image(&set(&A3), 3).unwrap(), set(&[3, 4, 5]));
        assert_eq!(e.theta_image(&set(&[0]), 4).unwrap(), set(&[4]));
        assert!(e.theta_image(&Subset::new(), 4).unwrap().is_empty());
        assert_eq!(e.sim_relation(&set(&A3)).unwrap().num_blocks(), 2);
        assert_eq!(e.sim_relation(&set(&[0, 3])).unwrap().num_blocks(), 3);
        assert_eq!(e.sim_relation(&set(&[0])).unwrap(), Partition::discrete(6));
        assert_eq!(e.sim_relation(&Subset::new()), Err(Error::EmptySubset));
        assert_eq!(e.eq_class(&set(&A3), 0).unwrap(), set(&A3));
    }

    #[test]
    fn conditions_on_s3() {
        let (spec, alg) = s3();
        let b = Budget::default();
        let e = IdealEngine::new(&spec, &alg, &b).unwrap();
        for sa in [false, true] {
            for c in Condition::ALL {
                assert!(e.check_condition(&set(&A3), c, sa).unwrap().holds, "{c}");
                assert!(e.check_condition(&set(&[0]), c, sa).unwrap().holds, "{c}");
                let bad = e.check_condition(&set(&[0, 3]), c, sa).unwrap();
                assert!(!bad.holds, "{c}");
                assert_eq!(bad.failure.unwrap().condition, c.label());
            }
        }
    }

    #[test]
    fn report_agrees() {
        let (spec, alg) = s3();
        let b = Budget::default();
        let e = IdealEngine::new(&spec, &alg, &b).unwrap();
        let r = e.report(&set(&A3), Method::All, false).unwrap();
        assert!(r.agreement);
        assert_eq!(r.verdicts.0.len(), 12);
        assert!(r.failures.is_empty());
        let r = e.report(&set(&[0, 3]), Method::All, false).unwrap();
        assert!(r.agreement);
        assert_eq!(r.failures.len(), 12);
        let conj = r.failures.iter().find(|f| f.condition == "termset-iv").unwrap();
        assert!(conj.clause.contains("(2.20)"), "{}", conj.clause);
    }

    #[test]
    fn counterexample_subgroup() {
        let (spec, alg) = s3();
        let b = Budget::default();
        let e = IdealEngine::new(&spec, &alg, &b).unwrap();
        assert!(e.image_alpha_inclusion(&set(&[0, 3])).unwrap().holds);
        assert!(e.image_alpha_inclusion(&set(&A3)).unwrap().holds);
        assert!(!e.image_alpha_inclusion(&set(&[0, 3, 4])).unwrap().holds);
    }

    #[test]
    fn closure_and_census() {
        let (spec, alg) = s3();
        let b = Budget::default();
        let e = IdealEngine::new(&spec, &alg, &b).unwrap();
        assert_eq!(e.ideal_closure(&set(&[3]), Variant::IV, false).unwrap(), Subset::full(6));
        assert_eq!(e.ideal_closure(&set(&[1]), Variant::I, false).unwrap(), set(&A3));
        assert_eq!(e.ideal_closure(&Subset::new(), Variant::II, true).unwrap(), set(&[0]));
        assert_eq!(list_ideals(&alg, 0, &b).unwrap(), vec![set(&[0]), set(&A3), Subset::full(6)]);
    }

    #[test]
    fn kernel_criteria_on_s3() {
        let (spec, alg) = s3();
        let b = Budget::default();
        let e = IdealEngine::new(&spec, &alg, &b).unwrap();
        assert_eq!(e.kernel_criteria(&set(&A3), 1, 2).unwrap(), [true; 4]);
        assert_eq!(e.kernel_criteria(&set(&A3), 0, 3).unwrap(), [false; 4]);
        assert_eq!(e.kernel_criteria(&set(&[0, 3]), 0, 3), Err(Error::NotAnIdeal("{0,3}".into())));
        assert!(e.congruence_is_sim(&set(&A3)).unwrap());
    }

    #[test]
    fn groups_are_right_cancellable() {
        let (spec, alg) = s3();
        let b = Budget::default();
        let e = IdealEngine::new(&spec, &alg, &b).unwrap();
        assert!(e.right_cancellable(None).unwrap().holds);
        assert!(e.right_cancellable(Some(&set(&[0, 3]))).unwrap().holds);
    }

    #[test]
    fn closed_under_rejects_empty() {
        let (spec, alg) = s3();
        let ts = gen_termset(&spec, Variant::IV, false).unwrap();
        let b = Budget::default();
        assert!(!closed_under(&alg, ts.terms(), &Subset::new(), &b).unwrap().holds);
        assert!(closed_under(&alg, ts.terms(), &Subset::full(6), &b).unwrap().holds);
    }

    #[test]
    fn engine_rejects_foreign_algebra() {
        let (spec, _) = s3();
        let ring = builtin("ring").unwrap();
        let b = Budget::default();
        assert!(IdealEngine::new(&spec, &ring.bundled[0], &b).is_err());
    }

    #[test]
    fn method_names() {
        assert_eq!("cond-vii".parse::<Method>().unwrap(), Method::Condition(Condition::VII));
        assert_eq!("termset-iii".parse::<Method>().unwrap(), Method::TermSet(Variant::III));
        assert!("cond-viii".parse::<Method>().is_err());
    }
}
