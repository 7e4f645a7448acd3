//! Signatures and terms over two disjoint variable families.
//!
//! Parameter variables are written `x1, x2, ...` and ideal-slot variables
//! `y1, y2, ...`. The two families never alias: `x1` and `y1` are distinct
//! variables even though they share an index.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OpSymbol {
    pub name: String,
    pub arity: usize,
}

/// A finite, ordered list of operation symbols.
///
/// The order is significant: term-set generation walks operations in
/// signature order, and algebra files list tables in the same order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    name: String,
    ops: Vec<OpSymbol>,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Recognizes `x<n>` / `y<n>` with a positive index and no leading zero.
pub(crate) fn variable_name(s: &str) -> Option<(VarKind, &str)> {
    let kind = match s.as_bytes().first()? {
        b'x' => VarKind::X,
        b'y' => VarKind::Y,
        _ => return None,
    };
    let digits = &s[1..];
    let bytes = digits.as_bytes();
    if bytes.is_empty() || bytes[0] == b'0' || !bytes.iter().all(u8::is_ascii_digit) {
        return None;
    }
    Some((kind, digits))
}

impl Signature {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        ops: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(Error::Signature(format!(
                "`{name}` is not a valid signature name"
            )));
        }
        let mut sig = Signature {
            name,
            ops: Vec::new(),
        };
        for (sym, arity) in ops {
            sig.push_op(sym.into(), arity)?;
        }
        Ok(sig)
    }

    fn push_op(&mut self, name: String, arity: usize) -> Result<()> {
        if !is_identifier(&name) {
            return Err(Error::Signature(format!(
                "`{name}` is not a valid operation symbol"
            )));
        }
        if variable_name(&name).is_some() {
            return Err(Error::Signature(format!(
                "`{name}` collides with the variable syntax"
            )));
        }
        if self.lookup(&name).is_some() {
            return Err(Error::SymbolClash(name));
        }
        self.ops.push(OpSymbol { name, arity });
        Ok(())
    }

    /// Returns a copy of this signature with additional operations appended.
    pub fn extended<S: Into<String>>(
        &self,
        name: impl Into<String>,
        extra: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self> {
        let mut sig = Signature::new(name, self.ops.iter().map(|o| (o.name.clone(), o.arity)))?;
        for (sym, arity) in extra {
            sig.push_op(sym.into(), arity)?;
        }
        Ok(sig)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ops(&self) -> &[OpSymbol] {
        &self.ops
    }

    /// Index and arity of `symbol`.
    pub fn lookup(&self, symbol: &str) -> Option<(usize, usize)> {
        self.ops
            .iter()
            .position(|o| o.name == symbol)
            .map(|i| (i, self.ops[i].arity))
    }

    pub fn constants(&self) -> impl Iterator<Item = &OpSymbol> {
        self.ops.iter().filter(|o| o.arity == 0)
    }

    /// True when every operation of `self` occurs in `other` with the same arity.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.ops
            .iter()
            .all(|o| other.lookup(&o.name).map(|(_, a)| a) == Some(o.arity))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VarKind {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub kind: VarKind,
    pub index: u32,
}

impl Var {
    pub fn x(index: u32) -> Self {
        Var {
            kind: VarKind::X,
            index,
        }
    }

    pub fn y(index: u32) -> Self {
        Var {
            kind: VarKind::Y,
            index,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::X => write!(f, "x{}", self.index),
            VarKind::Y => write!(f, "y{}", self.index),
        }
    }
}

impl Serialize for Var {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Index of the double-indexed slot `y_{j,l}` (1-based `j` and `l`) in the
/// flat `y` namespace when each block holds `n` slots.
pub fn flat_slot(j: u32, l: u32, n: u32) -> u32 {
    (j - 1) * n + l
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(String, Vec<Term>),
}

pub type Substitution = BTreeMap<Var, Term>;

impl Term {
    pub fn x(index: u32) -> Self {
        Term::Var(Var::x(index))
    }

    pub fn y(index: u32) -> Self {
        Term::Var(Var::y(index))
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(symbol.into(), args)
    }

    pub fn constant(symbol: impl Into<String>) -> Self {
        Term::App(symbol.into(), Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Replaces `x1, x2, ...` by `args[0], args[1], ...`, i.e. uses `self`
    /// as a derived operation of arity `args.len()`. Other variables stay.
    pub fn instantiate(&self, args: &[Term]) -> Term {
        let binding: Substitution = args
            .iter()
            .enumerate()
            .map(|(i, t)| (Var::x(i as u32 + 1), t.clone()))
            .collect();
        substitute(self, &binding)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    fn collect_vars(&self, out: &mut VarSet) {
        match self {
            Term::Var(v) => {
                match v.kind {
                    VarKind::X => out.xvars.insert(v.index),
                    VarKind::Y => out.yvars.insert(v.index),
                };
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(sym, args) if args.is_empty() => f.write_str(sym),
            Term::App(sym, args) => {
                write!(f, "{sym}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Canonical textual form: no whitespace, constants without parentheses.
pub fn print_term(t: &Term) -> String {
    t.to_string()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarSet {
    pub xvars: BTreeSet<u32>,
    pub yvars: BTreeSet<u32>,
}

impl VarSet {
    pub fn is_empty(&self) -> bool {
        self.xvars.is_empty() && self.yvars.is_empty()
    }

    pub fn len(&self) -> usize {
        self.xvars.len() + self.yvars.len()
    }

    /// All variables, `x` before `y`, ascending by index.
    pub fn iter(&self) -> impl Iterator<Item = Var> + '_ {
        self.xvars
            .iter()
            .map(|&i| Var::x(i))
            .chain(self.yvars.iter().map(|&i| Var::y(i)))
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        VarSet {
            xvars: self.xvars.union(&other.xvars).copied().collect(),
            yvars: self.yvars.union(&other.yvars).copied().collect(),
        }
    }
}

pub fn vars_of(t: &Term) -> VarSet {
    let mut out = VarSet::default();
    t.collect_vars(&mut out);
    out
}

/// Simultaneous substitution; unbound variables are left in place.
pub fn substitute(t: &Term, binding: &Substitution) -> Term {
    match t {
        Term::Var(v) => binding.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::App(sym, args) => Term::App(
            sym.clone(),
            args.iter().map(|a| substitute(a, binding)).collect(),
        ),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownSymbol(String),
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    ZeroIndex(VarKind),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownSymbol(s) => write!(f, "unknown symbol \"{s}\""),
            Violation::Arity {
                symbol,
                expected,
                found,
            } => write!(f, "`{symbol}` expects {expected} argument(s), got {found}"),
            Violation::ZeroIndex(kind) => write!(f, "variable of kind {kind:?} has index 0"),
        }
    }
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        match v {
            Violation::UnknownSymbol(s) => Error::UnknownSymbol(s),
            Violation::Arity {
                symbol,
                expected,
                found,
            } => Error::ArityMismatch {
                symbol,
                expected,
                found,
            },
            Violation::ZeroIndex(_) => Error::syntax(0, v.to_string()),
        }
    }
}

/// Collects every mismatch between `t` and `sig`; an empty list means valid.
pub fn validate_term(sig: &Signature, t: &Term) -> std::result::Result<(), Vec<Violation>> {
    fn walk(sig: &Signature, t: &Term, out: &mut Vec<Violation>) {
        match t {
            Term::Var(v) => {
                if v.index == 0 {
                    out.push(Violation::ZeroIndex(v.kind));
                }
            }
            Term::App(sym, args) => {
                match sig.lookup(sym) {
                    None => out.push(Violation::UnknownSymbol(sym.clone())),
                    Some((_, arity)) if arity != args.len() => out.push(Violation::Arity {
                        symbol: sym.clone(),
                        expected: arity,
                        found: args.len(),
                    }),
                    Some(_) => {}
                }
                args.iter().for_each(|a| walk(sig, a, out));
            }
        }
    }
    let mut out = Vec::new();
    walk(sig, t, &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Like [`validate_term`] but reports only the first violation as an error.
pub fn check_term(sig: &Signature, t: &Term) -> Result<()> {
    validate_term(sig, t).map_err(|mut v| Error::from(v.swap_remove(0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group() -> Signature {
        Signature::new("group", [("e", 0), ("mul", 2), ("inv", 1)]).unwrap()
    }

    #[test]
    fn signature_rejects_bad_symbols() {
        assert!(matches!(
            Signature::new("g", [("mul", 2), ("mul", 1)]),
            Err(Error::SymbolClash(_))
        ));
        assert!(Signature::new("g", [("x1", 2)]).is_err());
        assert!(Signature::new("g", [("2a", 0)]).is_err());
        // `x0` and `xor` are not variables, so they are fine as symbols
        assert!(Signature::new("g", [("x0", 0), ("xor", 2)]).is_ok());
    }

    #[test]
    fn validate_reports_unknown_and_arity() {
        let sig = group();
        assert!(validate_term(&sig, &Term::app("mul", vec![Term::y(1), Term::y(2)])).is_ok());
        let v = validate_term(&sig, &Term::app("add", vec![Term::y(1), Term::y(2)])).unwrap_err();
        assert_eq!(v, vec![Violation::UnknownSymbol("add".into())]);
        let v = validate_term(&sig, &Term::app("inv", vec![Term::y(1), Term::y(2)])).unwrap_err();
        assert_eq!(
            v,
            vec![Violation::Arity {
                symbol: "inv".into(),
                expected: 1,
                found: 2
            }]
        );
    }

    #[test]
    fn substitution_of_zero_for_slots() {
        let t = Term::app("mul", vec![Term::y(1), Term::y(2)]);
        let binding: Substitution = [(Var::y(1), Term::constant("e")), (Var::y(2), Term::constant("e"))]
            .into_iter()
            .collect();
        assert_eq!(substitute(&t, &binding).to_string(), "mul(e,e)");

        let t = Term::app("mul", vec![Term::x(1), Term::app("inv", vec![Term::y(1)])]);
        let binding: Substitution = [(Var::y(1), Term::constant("e"))].into_iter().collect();
        assert_eq!(substitute(&t, &binding).to_string(), "mul(x1,inv(e))");
    }

    #[test]
    fn instantiate_composes_witness_terms() {
        let theta = Term::app("mul", vec![Term::x(1), Term::x(2)]);
        let alpha = Term::app("mul", vec![Term::x(1), Term::app("inv", vec![Term::x(2)])]);
        let composite = theta.instantiate(&[alpha.instantiate(&[Term::y(1), Term::y(2)]), Term::y(2)]);
        assert_eq!(composite.to_string(), "mul(mul(y1,inv(y2)),y2)");
    }

    #[test]
    fn vars_split_by_kind() {
        let t = Term::app(
            "mul",
            vec![
                Term::app("mul", vec![Term::y(1), Term::x(1)]),
                Term::app("inv", vec![Term::app("mul", vec![Term::y(2), Term::x(1)])]),
            ],
        );
        let vs = vars_of(&t);
        assert_eq!(vs.xvars, BTreeSet::from([1]));
        assert_eq!(vs.yvars, BTreeSet::from([1, 2]));
        assert!(vars_of(&Term::constant("e")).is_empty());
    }

    #[test]
    fn flat_slot_numbering() {
        assert_eq!(flat_slot(1, 1, 1), 1);
        assert_eq!(flat_slot(2, 1, 1), 2);
        assert_eq!(flat_slot(2, 3, 3), 6);
        assert_eq!(flat_slot(3, 1, 2), 5);
    }
}
