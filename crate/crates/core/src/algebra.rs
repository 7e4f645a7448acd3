//! Finite algebras given by full operation tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::eval::{for_each_tuple, product_size, Budget, CompiledTerm};
use crate::subset::Subset;
use crate::term::{is_identifier, vars_of, Signature, Term, Var};

/// A finite algebra on the carrier `{0..size-1}`.
///
/// Each operation of arity `k` has a table of `size^k` entries in row-major
/// order over argument tuples: the value of `f(a1,..,ak)` is stored at index
/// `((a1 * size + a2) * size + ...) + ak`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    sig: Signature,
    size: usize,
    tables: Vec<Vec<usize>>,
}

pub fn load_algebra(
    name: &str,
    sig: &Signature,
    size: usize,
    tables: impl IntoIterator<Item = (String, Vec<usize>)>,
) -> Result<FiniteAlgebra> {
    if size == 0 {
        return Err(Error::Algebra("carrier must be nonempty".into()));
    }
    if !is_identifier(name) {
        return Err(Error::Algebra(format!("`{name}` is not a valid algebra name")));
    }
    let mut slots: Vec<Option<Vec<usize>>> = vec![None; sig.ops().len()];
    for (sym, table) in tables {
        let (idx, arity) = sig
            .lookup(&sym)
            .ok_or_else(|| Error::UnknownSymbol(sym.clone()))?;
        if slots[idx].is_some() {
            return Err(Error::Algebra(format!("duplicate table for `{sym}`")));
        }
        let expected = u32::try_from(arity)
            .ok()
            .and_then(|a| size.checked_pow(a))
            .ok_or_else(|| Error::Algebra(format!("table for `{sym}` is too large")))?;
        if table.len() != expected {
            return Err(Error::TableLength {
                symbol: sym,
                expected,
                found: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= size) {
            return Err(Error::EntryOutOfRange {
                symbol: sym,
                value: bad,
                size,
            });
        }
        slots[idx] = Some(table);
    }
    let tables = slots
        .into_iter()
        .zip(sig.ops())
        .map(|(t, op)| t.ok_or_else(|| Error::MissingTable(op.name.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(FiniteAlgebra {
        name: name.to_string(),
        sig: sig.clone(),
        size,
        tables,
    })
}

/// An operation given as a function of its argument tuple.
pub type OpFn<'a> = &'a dyn Fn(&[usize]) -> usize;

impl FiniteAlgebra {
    /// Builds an algebra by tabulating closures, one per operation in
    /// signature order.
    pub fn from_fn(
        name: &str,
        sig: &Signature,
        size: usize,
        ops: &[OpFn<'_>],
    ) -> Result<Self> {
        if ops.len() != sig.ops().len() {
            return Err(Error::Algebra(format!(
                "{} operations supplied for a signature with {}",
                ops.len(),
                sig.ops().len()
            )));
        }
        let carrier: Vec<usize> = (0..size).collect();
        let tables = sig.ops().iter().zip(ops).map(|(op, f)| {
            let domains = vec![carrier.as_slice(); op.arity];
            let mut table = Vec::with_capacity(size.pow(op.arity as u32));
            for_each_tuple(&domains, |args| {
                table.push(f(args));
                true
            });
            (op.name.clone(), table)
        });
        load_algebra(name, sig, size, tables)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn carrier(&self) -> Vec<usize> {
        (0..self.size).collect()
    }

    pub fn table(&self, op: usize) -> &[usize] {
        &self.tables[op]
    }

    /// Value of operation `op` (signature index) at `args`.
    #[inline]
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        let idx = args.iter().fold(0, |acc, &a| acc * self.size + a);
        self.tables[op][idx]
    }

    pub fn apply_named(&self, symbol: &str, args: &[usize]) -> Result<usize> {
        let (op, arity) = self
            .sig
            .lookup(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        if arity != args.len() {
            return Err(Error::ArityMismatch {
                symbol: symbol.to_string(),
                expected: arity,
                found: args.len(),
            });
        }
        if let Some(&a) = args.iter().find(|&&a| a >= self.size) {
            return Err(Error::ElementOutOfRange {
                element: a,
                size: self.size,
            });
        }
        Ok(self.apply(op, args))
    }

    /// Same carrier and tables under another name and signature whose
    /// operations are renamed positionally.
    pub fn relabel(&self, name: &str, sig: &Signature) -> Result<FiniteAlgebra> {
        if sig.ops().len() != self.sig.ops().len()
            || sig.ops().iter().zip(self.sig.ops()).any(|(a, b)| a.arity != b.arity)
        {
            return Err(Error::Algebra("signatures differ in shape".into()));
        }
        let tables = sig
            .ops()
            .iter()
            .zip(&self.tables)
            .map(|(op, t)| (op.name.clone(), t.clone()));
        load_algebra(name, sig, self.size, tables)
    }

    /// Forgets every operation outside `sig`, which must be a subsignature.
    pub fn reduct(&self, sig: &Signature) -> Result<FiniteAlgebra> {
        if !sig.is_subsignature_of(&self.sig) {
            return Err(Error::NotAnExtension(self.sig.name().to_string()));
        }
        let tables = sig.ops().iter().map(|op| {
            let (idx, _) = self.sig.lookup(&op.name).expect("subsignature");
            (op.name.clone(), self.tables[idx].clone())
        });
        load_algebra(&self.name, sig, self.size, tables)
    }

    /// Parses the line-oriented `.alg` format:
    ///
    /// ```text
    /// algebra <Name> : <SignatureName>
    /// size <m>
    /// table <sym>
    /// <m^arity integers, row-major>
    /// ```
    ///
    /// `#` starts a comment that runs to the end of the line.
    pub fn from_alg_str(text: &str, sig: &Signature) -> Result<FiniteAlgebra> {
        let mut tokens: Vec<(usize, &str)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            tokens.extend(line.split_whitespace().map(|t| (lineno + 1, t)));
        }
        let mut it = tokens.into_iter().peekable();
        let mut expect = |want: &str| -> Result<(usize, String)> {
            match it.next() {
                Some((l, t)) if want.is_empty() || t == want => Ok((l, t.to_string())),
                Some((l, t)) => Err(Error::Algebra(format!("line {l}: expected `{want}`, found `{t}`"))),
                None => Err(Error::Algebra(format!("unexpected end of file, expected `{want}`"))),
            }
        };
        expect("algebra")?;
        let (_, name) = expect("")?;
        expect(":")?;
        let (l, sig_name) = expect("")?;
        if sig_name != sig.name() {
            return Err(Error::Algebra(format!(
                "line {l}: algebra is declared over `{sig_name}` but signature `{}` was supplied",
                sig.name()
            )));
        }
        expect("size")?;
        let (l, size_tok) = expect("")?;
        let size: usize = size_tok
            .parse()
            .map_err(|_| Error::Algebra(format!("line {l}: `{size_tok}` is not a size")))?;

        let mut tables: Vec<(String, Vec<usize>)> = Vec::new();
        while let Some((l, tok)) = it.next() {
            if tok != "table" {
                return Err(Error::Algebra(format!("line {l}: expected `table`, found `{tok}`")));
            }
            let (_, sym) = it
                .next()
                .ok_or_else(|| Error::Algebra(format!("line {l}: missing symbol after `table`")))?;
            let mut values = Vec::new();
            while let Some(&(line, t)) = it.peek() {
                if t == "table" {
                    break;
                }
                values.push(
                    t.parse::<usize>()
                        .map_err(|_| Error::Algebra(format!("line {line}: `{t}` is not an element")))?,
                );
                it.next();
            }
            tables.push((sym.to_string(), values));
        }
        load_algebra(&name, sig, size, tables)
    }

    /// Writes the `.alg` format; binary tables are laid out one row per line.
    pub fn to_alg_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "algebra {} : {}", self.name, self.sig.name());
        let _ = writeln!(out, "size {}", self.size);
        for (op, table) in self.sig.ops().iter().zip(&self.tables) {
            let _ = writeln!(out, "table {}", op.name);
            let row = if op.arity == 0 { 1 } else { self.size };
            for chunk in table.chunks(row) {
                let line: Vec<String> = chunk.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
        out
    }
}

pub type Assignment = BTreeMap<Var, usize>;

pub fn eval_term(alg: &FiniteAlgebra, t: &Term, assign: &Assignment) -> Result<usize> {
    let compiled = CompiledTerm::new(alg, t)?;
    let mut slots = Vec::with_capacity(compiled.vars().len());
    for v in compiled.vars() {
        let &a = assign
            .get(v)
            .ok_or_else(|| Error::UnboundVariable(v.to_string()))?;
        if a >= alg.size() {
            return Err(Error::ElementOutOfRange {
                element: a,
                size: alg.size(),
            });
        }
        slots.push(a);
    }
    Ok(compiled.eval(alg, &slots))
}

/// Value of a variable-free term.
pub fn eval_ground(alg: &FiniteAlgebra, t: &Term) -> Result<usize> {
    eval_term(alg, t, &Assignment::new())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub holds: bool,
    /// First failing assignment in lexicographic order, if any.
    pub counterexample: Option<Vec<(Var, usize)>>,
}

/// Checks `lhs = rhs` under every assignment of the carrier to the
/// variables of both sides.
pub fn holds_identity(
    alg: &FiniteAlgebra,
    lhs: &Term,
    rhs: &Term,
    budget: &Budget,
) -> Result<IdentityCheck> {
    let vars: Vec<Var> = vars_of(lhs).union(&vars_of(rhs)).iter().collect();
    let l = CompiledTerm::with_vars(alg, lhs, &vars)?;
    let r = CompiledTerm::with_vars(alg, rhs, &vars)?;
    let carrier = alg.carrier();
    let domains = vec![carrier.as_slice(); vars.len()];
    budget.charge(product_size(&domains))?;
    let mut stack = Vec::new();
    let mut counterexample = None;
    for_each_tuple(&domains, |slots| {
        if l.eval_with(alg, slots, &mut stack) != r.eval_with(alg, slots, &mut stack) {
            counterexample = Some(vars.iter().copied().zip(slots.iter().copied()).collect());
            false
        } else {
            true
        }
    });
    Ok(IdentityCheck {
        holds: counterexample.is_none(),
        counterexample,
    })
}

/// Whether replacing every `y` variable of `t` by `zero` yields a term that
/// is identically `zero` on `alg`.
pub fn is_zero_ideal_term(alg: &FiniteAlgebra, zero: usize, t: &Term, budget: &Budget) -> Result<bool> {
    let compiled = CompiledTerm::new(alg, t)?;
    let carrier = alg.carrier();
    let zero_dom = [zero];
    let domains: Vec<&[usize]> = (0..compiled.vars().len())
        .map(|i| {
            if i < compiled.num_x() {
                carrier.as_slice()
            } else {
                &zero_dom[..]
            }
        })
        .collect();
    budget.charge(product_size(&domains))?;
    let mut stack = Vec::new();
    Ok(for_each_tuple(&domains, |slots| {
        compiled.eval_with(alg, slots, &mut stack) == zero
    }))
}

/// Least subset containing `seed` and closed under every operation,
/// constants included.
pub fn subuniverse(alg: &FiniteAlgebra, seed: &Subset) -> Subset {
    let mut members = seed.mask(alg.size());
    let mut list: Vec<usize> = seed.iter().filter(|&a| a < alg.size()).collect();
    loop {
        let mut added = Vec::new();
        for (op, sym) in alg.signature().ops().iter().enumerate() {
            let domains = vec![list.as_slice(); sym.arity];
            for_each_tuple(&domains, |args| {
                let v = alg.apply(op, args);
                if !members[v] {
                    members[v] = true;
                    added.push(v);
                }
                true
            });
        }
        if added.is_empty() {
            break;
        }
        list.extend(added);
    }
    list.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;

    fn group_sig() -> Signature {
        Signature::new("group", [("e", 0), ("mul", 2), ("inv", 1)]).unwrap()
    }

    fn z4() -> FiniteAlgebra {
        FiniteAlgebra::from_fn(
            "Z4",
            &group_sig(),
            4,
            &[&|_| 0, &|a| (a[0] + a[1]) % 4, &|a| (4 - a[0]) % 4],
        )
        .unwrap()
    }

    #[test]
    fn load_rejects_malformed_tables() {
        let sig = group_sig();
        let ok = || vec![("e".to_string(), vec![0]), ("mul".to_string(), vec![0]), ("inv".to_string(), vec![0])];
        assert!(load_algebra("One", &sig, 1, ok()).is_ok());

        let mut t = ok();
        t[1].1 = vec![0, 0];
        assert!(matches!(load_algebra("One", &sig, 1, t), Err(Error::TableLength { .. })));

        let mut t = ok();
        t[2].1 = vec![7];
        assert!(matches!(
            load_algebra("One", &sig, 1, t),
            Err(Error::EntryOutOfRange { value: 7, .. })
        ));

        let mut t = ok();
        t.pop();
        assert_eq!(load_algebra("One", &sig, 1, t), Err(Error::MissingTable("inv".into())));
        assert!(load_algebra("Empty", &sig, 0, ok()).is_err());
    }

    #[test]
    fn alg_format_round_trip() {
        let alg = z4();
        let text = alg.to_alg_string();
        assert_eq!(FiniteAlgebra::from_alg_str(&text, &group_sig()).unwrap(), alg);
    }

    #[test]
    fn alg_format_errors() {
        let sig = group_sig();
        let text = "algebra A : ring\nsize 1\ntable e 0\ntable mul 0\ntable inv 0\n";
        assert!(FiniteAlgebra::from_alg_str(text, &sig).is_err());
        let text = "algebra A : group # trailing comment\nsize 6\ntable e\n0\ntable mul\n7";
        assert!(FiniteAlgebra::from_alg_str(text, &sig).is_err());
        let text = "algebra A : group\nsize 1\ntable e\nzero\n";
        assert!(FiniteAlgebra::from_alg_str(text, &sig).is_err());
    }

    #[test]
    fn evaluates_terms() {
        let alg = z4();
        let t = parse_term("mul(x1,inv(x2))", alg.signature()).unwrap();
        let assign = Assignment::from([(Var::x(1), 1), (Var::x(2), 3)]);
        assert_eq!(eval_term(&alg, &t, &assign).unwrap(), 2);
        assert_eq!(eval_ground(&alg, &Term::constant("e")).unwrap(), 0);
        assert!(matches!(
            eval_term(&alg, &t, &Assignment::from([(Var::x(1), 1)])),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn identity_checks() {
        let alg = z4();
        let sig = alg.signature().clone();
        let budget = Budget::default();
        let lhs = parse_term("mul(x1,inv(x1))", &sig).unwrap();
        assert!(holds_identity(&alg, &lhs, &Term::constant("e"), &budget).unwrap().holds);

        let lhs = parse_term("mul(x1,x1)", &sig).unwrap();
        let check = holds_identity(&alg, &lhs, &Term::constant("e"), &budget).unwrap();
        assert!(!check.holds);
        assert_eq!(check.counterexample, Some(vec![(Var::x(1), 1)]));

        let tiny = Budget::new(3);
        assert!(matches!(
            holds_identity(&alg, &lhs, &Term::constant("e"), &tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn zero_ideal_terms() {
        let alg = z4();
        let sig = alg.signature().clone();
        let budget = Budget::default();
        let t = parse_term("mul(y1,y2)", &sig).unwrap();
        assert!(is_zero_ideal_term(&alg, 0, &t, &budget).unwrap());
        let t = parse_term("mul(x1,y1)", &sig).unwrap();
        assert!(!is_zero_ideal_term(&alg, 0, &t, &budget).unwrap());
    }

    #[test]
    fn subuniverse_includes_constants() {
        let alg = z4();
        assert_eq!(subuniverse(&alg, &Subset::new()).to_vec(), vec![0]);
        assert_eq!(subuniverse(&alg, &Subset::singleton(2)).to_vec(), vec![0, 2]);
        assert_eq!(subuniverse(&alg, &Subset::singleton(1)), Subset::full(4));
        assert_eq!(subuniverse(&alg, &Subset::full(4)), Subset::full(4));
    }
}
