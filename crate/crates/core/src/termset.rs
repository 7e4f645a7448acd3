//! The four determining sets of ideal terms, their extension to larger
//! signatures, and dedupe utilities.
//!
//! Double-indexed slots `y_{jl}` are flattened to `y_{(j-1)n+l}` (see
//! [`crate::term::flat_slot`]). Generation order is fixed: clauses in their
//! listed order, operations in signature order, then `i`, then `j`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::{holds_identity, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::eval::Budget;
use crate::term::{flat_slot, OpSymbol, Signature, Term};
use crate::variety::VarietySpec;
use crate::witness::BitWitness;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    I,
    II,
    III,
    IV,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::I, Variant::II, Variant::III, Variant::IV];

    pub fn label(self) -> &'static str {
        match self {
            Variant::I => "i",
            Variant::II => "ii",
            Variant::III => "iii",
            Variant::IV => "iv",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(Variant::I),
            "ii" | "2" => Ok(Variant::II),
            "iii" | "3" => Ok(Variant::III),
            "iv" | "4" => Ok(Variant::IV),
            _ => Err(Error::Signature(format!("unknown term-set variant `{s}`"))),
        }
    }
}

/// How a base set is enlarged for operations outside the base signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionMode {
    /// Add the composite transport terms for each new operation.
    A,
    /// Add the single-position transport terms for each new operation.
    B,
}

impl FromStr for ExtensionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(ExtensionMode::A),
            "b" => Ok(ExtensionMode::B),
            _ => Err(Error::Signature(format!("unknown extension mode `{s}`"))),
        }
    }
}

impl fmt::Display for ExtensionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtensionMode::A => "a",
            ExtensionMode::B => "b",
        })
    }
}

/// Which clause produced a term, with its operation and indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Provenance {
    pub clause: &'static str,
    pub tau: Option<String>,
    pub i: Option<usize>,
    pub j: Option<usize>,
}

impl Provenance {
    fn new(clause: &'static str) -> Self {
        Provenance {
            clause,
            tau: None,
            i: None,
            j: None,
        }
    }

    fn tau(mut self, tau: &str) -> Self {
        self.tau = Some(tau.to_string());
        self
    }

    fn i(mut self, i: usize) -> Self {
        self.i = Some(i);
        self
    }

    fn j(mut self, j: usize) -> Self {
        self.j = Some(j);
        self
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "clause={}", self.clause)?;
        if let Some(t) = &self.tau {
            write!(f, " tau={t}")?;
        }
        if let Some(i) = self.i {
            write!(f, " i={i}")?;
        }
        if let Some(j) = self.j {
            write!(f, " j={j}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermSet {
    pub variant: Variant,
    pub semiabelian: bool,
    pub extension: Option<ExtensionMode>,
    pub sig: Signature,
    pub witness: BitWitness,
    terms: Vec<Term>,
    provenance: Vec<Provenance>,
}

/// An operation usable as `τ` in the transport clauses: a signature symbol,
/// `θ`, or one of the `αⱼ`.
#[derive(Clone, Copy, Debug)]
enum Tau<'a> {
    Op(&'a OpSymbol),
    Theta,
    Alpha(usize),
}

impl Tau<'_> {
    fn name(&self) -> String {
        match self {
            Tau::Op(o) => o.name.clone(),
            Tau::Theta => "theta".into(),
            Tau::Alpha(j) => format!("alpha{j}"),
        }
    }

    fn arity(&self, w: &BitWitness) -> usize {
        match self {
            Tau::Op(o) => o.arity,
            Tau::Theta => w.n() + 1,
            Tau::Alpha(_) => 2,
        }
    }

    fn apply(&self, w: &BitWitness, args: Vec<Term>) -> Term {
        match self {
            Tau::Op(o) => Term::app(o.name.clone(), args),
            Tau::Theta => w.theta_at(&args),
            Tau::Alpha(j) => w.alpha_at(*j, args[0].clone(), args[1].clone()),
        }
    }
}

struct Builder<'a> {
    w: &'a BitWitness,
    terms: Vec<Term>,
    provenance: Vec<Provenance>,
}

impl<'a> Builder<'a> {
    fn new(w: &'a BitWitness) -> Self {
        Builder {
            w,
            terms: Vec::new(),
            provenance: Vec::new(),
        }
    }

    fn push(&mut self, t: Term, p: Provenance) {
        self.terms.push(t);
        self.provenance.push(p);
    }

    fn n(&self) -> u32 {
        self.w.n() as u32
    }

    /// `θ(y_{first}, .., y_{first+n-1}, base)`.
    fn theta_block(&self, first: u32, base: Term) -> Term {
        let mut args: Vec<Term> = (first..first + self.n()).map(Term::y).collect();
        args.push(base);
        self.w.theta_at(&args)
    }

    fn theta_all_y(&self, clause: &'static str) -> (Term, Provenance) {
        let args: Vec<Term> = (1..=self.n() + 1).map(Term::y).collect();
        (self.w.theta_at(&args), Provenance::new(clause))
    }

    fn base_closure(&mut self) {
        let (t, p) = self.theta_all_y("(2.14)");
        self.push(t, p);
        for i in 1..=self.w.n() {
            let t = self.w.alpha_at(i, Term::y(1), Term::y(2));
            self.push(t, Provenance::new("(2.14)").i(i));
        }
    }

    /// `θ(y..)` and `αᵢ(y1, 0)`, optionally preceded by `0`.
    fn base_with_zero(&mut self, clause: &'static str, with_zero: bool) {
        if with_zero {
            self.push(self.w.zero().clone(), Provenance::new(clause));
        }
        let (t, p) = self.theta_all_y(clause);
        self.push(t, p);
        for i in 1..=self.w.n() {
            let t = self.w.alpha_at(i, Term::y(1), self.w.zero().clone());
            self.push(t, Provenance::new(clause).i(i));
        }
    }

    fn theta_transport(&mut self) {
        let n = self.n();
        for i in 1..=self.w.n() {
            let t = self.w.alpha_at(
                i,
                self.theta_block(1, Term::x(1)),
                self.theta_block(n + 1, Term::x(1)),
            );
            self.push(t, Provenance::new("(2.18)").i(i));
        }
    }

    fn subalgebra_terms(&mut self, sig: &Signature) {
        for op in sig.ops() {
            let args = (1..=op.arity as u32).map(Term::y).collect();
            self.push(Term::app(op.name.clone(), args), Provenance::new("(2.21)").tau(&op.name));
        }
        let zero = self.w.zero();
        let zero_is_constant = matches!(zero, Term::App(s, a) if a.is_empty() && sig.lookup(s).is_some());
        if !zero_is_constant {
            self.push(zero.clone(), Provenance::new("(2.21)"));
        }
    }

    /// `αᵢ(τ(θ(y_{1·}, x1), .., θ(y_{k·}, xk)), τ(x1, .., xk))` for every `i`.
    fn composite_transport(&mut self, tau: Tau<'_>) {
        let k = tau.arity(self.w) as u32;
        let n = self.n();
        let moved: Vec<Term> = (1..=k)
            .map(|j| self.theta_block(flat_slot(j, 1, n), Term::x(j)))
            .collect();
        let plain: Vec<Term> = (1..=k).map(Term::x).collect();
        let lhs = tau.apply(self.w, moved);
        let rhs = tau.apply(self.w, plain);
        for i in 1..=self.w.n() {
            let t = self.w.alpha_at(i, lhs.clone(), rhs.clone());
            self.push(t, Provenance::new("(2.15)").tau(&tau.name()).i(i));
        }
    }

    /// `αᵢ(τ(x1, .., θ(y1..yn, xj), .., xk), τ(x1, .., xk))` for every `i`, `j`.
    /// Constants have no position and contribute nothing.
    fn single_transport(&mut self, op: &OpSymbol) {
        let k = op.arity as u32;
        let plain: Vec<Term> = (1..=k).map(Term::x).collect();
        let rhs = Term::app(op.name.clone(), plain.clone());
        for i in 1..=self.w.n() {
            for j in 1..=k {
                let mut args = plain.clone();
                args[j as usize - 1] = self.theta_block(1, Term::x(j));
                let t = self.w.alpha_at(i, Term::app(op.name.clone(), args), rhs.clone());
                self.push(t, Provenance::new("(2.20)").tau(&op.name).i(i).j(j as usize));
            }
        }
    }
}

/// Builds the determining set `variant` for `spec`. With `semiabelian`, the
/// base clause of the variant is replaced by `τ(y1, .., yk)` for every
/// operation `τ`; this requires `spec.semiabelian`.
pub fn gen_termset(spec: &VarietySpec, variant: Variant, semiabelian: bool) -> Result<TermSet> {
    if semiabelian && !spec.semiabelian {
        return Err(Error::NotSemiAbelian);
    }
    let w = &spec.witness;
    let ops = spec.sig.ops();
    let mut b = Builder::new(w);
    match variant {
        Variant::I => {
            if semiabelian {
                b.subalgebra_terms(&spec.sig);
            } else {
                b.base_closure();
            }
            for op in ops {
                b.composite_transport(Tau::Op(op));
            }
            b.composite_transport(Tau::Theta);
        }
        Variant::II => {
            if semiabelian {
                b.subalgebra_terms(&spec.sig);
            } else {
                b.base_with_zero("(2.16)", true);
            }
            for op in ops {
                b.composite_transport(Tau::Op(op));
            }
            b.composite_transport(Tau::Theta);
            for j in 1..=w.n() {
                b.composite_transport(Tau::Alpha(j));
            }
        }
        Variant::III => {
            if semiabelian {
                b.subalgebra_terms(&spec.sig);
            } else {
                b.base_with_zero("(2.17)", false);
            }
            b.theta_transport();
            for op in ops {
                b.composite_transport(Tau::Op(op));
            }
        }
        Variant::IV => {
            b.theta_transport();
            if semiabelian {
                b.subalgebra_terms(&spec.sig);
            } else {
                b.base_with_zero("(2.19)", false);
            }
            for op in ops {
                b.single_transport(op);
            }
        }
    }
    Ok(TermSet {
        variant,
        semiabelian,
        extension: None,
        sig: spec.sig.clone(),
        witness: w.clone(),
        terms: b.terms,
        provenance: b.provenance,
    })
}

/// Enlarges `base` to the signature of `extended`, adding clauses only for
/// the operations that `base` does not know.
pub fn extend_termset(base: &TermSet, extended: &VarietySpec, mode: ExtensionMode) -> Result<TermSet> {
    let new_ops = extended.new_operations(&base.sig)?;
    if extended.witness != base.witness {
        return Err(Error::NotAnExtension(format!(
            "{} carries a different witness",
            extended.name()
        )));
    }
    let mut b = Builder::new(&base.witness);
    b.terms = base.terms.clone();
    b.provenance = base.provenance.clone();
    for op in &new_ops {
        match mode {
            ExtensionMode::A => b.composite_transport(Tau::Op(op)),
            ExtensionMode::B => b.single_transport(op),
        }
    }
    Ok(TermSet {
        variant: base.variant,
        semiabelian: base.semiabelian,
        extension: Some(mode),
        sig: extended.sig.clone(),
        witness: base.witness.clone(),
        terms: b.terms,
        provenance: b.provenance,
    })
}

impl TermSet {
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Provenance)> {
        self.terms.iter().zip(&self.provenance)
    }

    /// Indices of bare-variable terms, which say nothing about closure.
    pub fn ignorable(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.terms[k].is_var()).collect()
    }

    fn retain_indices(&self, keep: &[usize]) -> TermSet {
        TermSet {
            terms: keep.iter().map(|&k| self.terms[k].clone()).collect(),
            provenance: keep.iter().map(|&k| self.provenance[k].clone()).collect(),
            ..self.clone()
        }
    }

    /// The line-oriented text form: a header comment, then each term preceded
    /// by its provenance comment.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# termset signature={} variant={} semiabelian={}",
            self.sig.name(),
            self.variant,
            self.semiabelian
        );
        if let Some(m) = self.extension {
            out.push_str(&format!(" extension={m}"));
        }
        out.push_str(&format!(" count={}\n", self.len()));
        for (t, p) in self.iter() {
            out.push_str(&format!("# {p}"));
            if t.is_var() {
                out.push_str(" ignorable");
            }
            out.push('\n');
            out.push_str(&format!("{t}\n"));
        }
        out
    }
}

/// Removes structural duplicates, keeping first occurrences in order.
pub fn dedupe_syntactic(ts: &TermSet) -> TermSet {
    let mut seen = std::collections::HashSet::new();
    let keep: Vec<usize> = (0..ts.len()).filter(|&k| seen.insert(&ts.terms[k])).collect();
    ts.retain_indices(&keep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Merge {
    pub kept: usize,
    pub kept_term: Term,
    pub merged: Vec<(usize, Term)>,
}

/// Which terms were identified, and on which algebra. Equality is only
/// claimed for that algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MergeReport {
    pub algebra: String,
    pub merges: Vec<Merge>,
    /// Surviving terms that induce a projection onto one of their `y` slots.
    pub identity_like: Vec<usize>,
}

/// Merges terms inducing the same function on `alg` (as functions of the
/// union of their variables). The first term of each class survives.
pub fn dedupe_semantic(ts: &TermSet, alg: &FiniteAlgebra, budget: &Budget) -> Result<(TermSet, MergeReport)> {
    let mut reps: Vec<usize> = Vec::new();
    let mut merged: Vec<Vec<(usize, Term)>> = Vec::new();
    'terms: for k in 0..ts.len() {
        for (r, &rep) in reps.iter().enumerate() {
            if holds_identity(alg, &ts.terms[rep], &ts.terms[k], budget)?.holds {
                merged[r].push((k, ts.terms[k].clone()));
                continue 'terms;
            }
        }
        reps.push(k);
        merged.push(Vec::new());
    }
    let mut identity_like = Vec::new();
    for (pos, &rep) in reps.iter().enumerate() {
        let t = &ts.terms[rep];
        for y in crate::term::vars_of(t).yvars {
            if holds_identity(alg, t, &Term::y(y), budget)?.holds {
                identity_like.push(pos);
                break;
            }
        }
    }
    let report = MergeReport {
        algebra: alg.name().to_string(),
        merges: reps
            .iter()
            .zip(merged)
            .filter(|(_, m)| !m.is_empty())
            .map(|(&kept, merged)| Merge {
                kept,
                kept_term: ts.terms[kept].clone(),
                merged,
            })
            .collect(),
        identity_like,
    };
    Ok((ts.retain_indices(&reps), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::{builtin, extend_signature};

    fn texts(ts: &TermSet) -> Vec<String> {
        ts.terms().iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn group_variant_iv_golden() {
        let ts = gen_termset(&builtin("group").unwrap(), Variant::IV, false).unwrap();
        assert_eq!(
            texts(&ts),
            [
                "mul(mul(y1,x1),inv(mul(y2,x1)))",
                "mul(y1,y2)",
                "mul(y1,inv(e))",
                "mul(mul(mul(y1,x1),x2),inv(mul(x1,x2)))",
                "mul(mul(x1,mul(y1,x2)),inv(mul(x1,x2)))",
                "mul(inv(mul(y1,x1)),inv(inv(x1)))",
            ]
        );
        let prov: Vec<String> = ts.provenance().iter().map(|p| p.to_string()).collect();
        assert_eq!(prov[0], "clause=(2.18) i=1");
        assert_eq!(prov[1], "clause=(2.19)");
        assert_eq!(prov[4], "clause=(2.20) tau=mul i=1 j=2");
    }

    #[test]
    fn ring_variant_iv_has_eight_terms() {
        let ts = gen_termset(&builtin("ring").unwrap(), Variant::IV, false).unwrap();
        assert_eq!(ts.len(), 8);
    }

    #[test]
    fn variant_sizes() {
        // group: 3 ops (arities 0, 2, 1), n = 1, θ binary
        let spec = builtin("group").unwrap();
        let len = |v, s| gen_termset(&spec, v, s).unwrap().len();
        assert_eq!(len(Variant::I, false), 2 + 3 + 1);
        assert_eq!(len(Variant::II, false), 3 + 3 + 1 + 1);
        assert_eq!(len(Variant::III, false), 2 + 1 + 3);
        assert_eq!(len(Variant::I, true), 3 + 3 + 1);
        assert_eq!(len(Variant::IV, true), 1 + 3 + 3);
    }

    #[test]
    fn slots_are_flattened() {
        let spec = builtin("group").unwrap();
        let ts = gen_termset(&spec, Variant::I, false).unwrap();
        let mul = ts
            .iter()
            .find(|(_, p)| p.tau.as_deref() == Some("mul"))
            .unwrap()
            .0;
        assert_eq!(mul.to_string(), "mul(mul(mul(y1,x1),mul(y2,x2)),inv(mul(x1,x2)))");
        let e = ts.iter().find(|(_, p)| p.tau.as_deref() == Some("e")).unwrap().0;
        assert_eq!(e.to_string(), "mul(e,inv(e))");
    }

    #[test]
    fn semiabelian_needs_flag() {
        let mut spec = builtin("group").unwrap();
        spec.semiabelian = false;
        assert_eq!(gen_termset(&spec, Variant::I, true), Err(Error::NotSemiAbelian));
    }

    #[test]
    fn loop_theta_clause_collapses() {
        let ts = gen_termset(&builtin("loop").unwrap(), Variant::I, false).unwrap();
        assert_eq!(dedupe_syntactic(&ts).len(), ts.len() - 1);
        let once = dedupe_syntactic(&ts);
        assert_eq!(dedupe_syntactic(&once), once);
    }

    #[test]
    fn extension_modes() {
        let group = builtin("group").unwrap();
        let base = gen_termset(&group, Variant::IV, false).unwrap();
        let ext = extend_signature(&group, "omega_group", &[("omega", 2)]).unwrap();
        let a = extend_termset(&base, &ext, ExtensionMode::A).unwrap();
        assert_eq!(a.len(), base.len() + 1);
        assert_eq!(
            a.terms().last().unwrap().to_string(),
            "mul(omega(mul(y1,x1),mul(y2,x2)),inv(omega(x1,x2)))"
        );
        let b = extend_termset(&base, &ext, ExtensionMode::B).unwrap();
        assert_eq!(b.len(), base.len() + 2);
        let same = extend_termset(&base, &group, ExtensionMode::B).unwrap();
        assert_eq!(same.terms(), base.terms());
        assert!(extend_termset(&a, &group, ExtensionMode::A).is_err());
    }

    #[test]
    fn semantic_dedupe_identifies_y_over_e() {
        let spec = builtin("group").unwrap();
        let s3 = crate::variety::find_bundled(&spec, "S3").unwrap();
        let ts = gen_termset(&spec, Variant::IV, false).unwrap();
        let (_, report) = dedupe_semantic(&ts, s3, &Budget::default()).unwrap();
        // mul(y1,inv(e)) is y1 on any group
        assert!(report.identity_like.contains(&2));
        let trivial = FiniteAlgebra::from_fn("T", &spec.sig, 1, &[&|_| 0, &|_| 0, &|_| 0]).unwrap();
        let (one, _) = dedupe_semantic(&ts, &trivial, &Budget::default()).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn text_format() {
        let ts = gen_termset(&builtin("ring").unwrap(), Variant::IV, false).unwrap();
        let text = ts.to_text();
        assert!(text.starts_with("# termset signature=ring variant=iv semiabelian=false count=8\n"));
        assert_eq!(text.lines().count(), 1 + 2 * 8);
    }
}
