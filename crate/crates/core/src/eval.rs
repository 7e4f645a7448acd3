//! Term compilation and exhaustive assignment enumeration.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::term::{vars_of, Term, Var, VarKind};

/// Caps the total number of term evaluations a computation may perform.
///
/// Enumerations charge their full size before starting, so an oversized
/// query fails immediately rather than after running for a long time.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: AtomicU64,
}

impl Budget {
    pub const DEFAULT_LIMIT: u64 = 100_000_000;

    pub fn new(limit: u64) -> Self {
        Budget {
            limit,
            used: AtomicU64::new(0),
        }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub fn charge(&self, n: u64) -> Result<()> {
        let before = self.used.fetch_add(n, Ordering::Relaxed);
        if before.saturating_add(n) > self.limit {
            Err(Error::BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Budget::DEFAULT_LIMIT)
    }
}

#[derive(Clone, Copy, Debug)]
enum Instr {
    Load(usize),
    Apply { op: usize, arity: usize },
}

/// A term resolved against an algebra's signature, in postfix form.
///
/// Variables are numbered by slot: `x` variables ascending, then `y`
/// variables ascending (the order of [`crate::term::VarSet::iter`]).
#[derive(Clone, Debug)]
pub struct CompiledTerm {
    code: Vec<Instr>,
    vars: Vec<Var>,
    num_x: usize,
}

impl CompiledTerm {
    pub fn new(alg: &FiniteAlgebra, t: &Term) -> Result<Self> {
        let vars: Vec<Var> = vars_of(t).iter().collect();
        Self::with_vars(alg, t, &vars)
    }

    /// Compiles against an explicit, sorted slot list, which must contain
    /// every variable of `t`. Used to evaluate several terms over one assignment.
    pub fn with_vars(alg: &FiniteAlgebra, t: &Term, vars: &[Var]) -> Result<Self> {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        if let Some(v) = vars_of(t).iter().find(|v| vars.binary_search(v).is_err()) {
            return Err(Error::UnboundVariable(v.to_string()));
        }
        let vars = vars.to_vec();
        let mut code = Vec::with_capacity(t.size());
        fn emit(alg: &FiniteAlgebra, t: &Term, vars: &[Var], code: &mut Vec<Instr>) -> Result<()> {
            match t {
                Term::Var(v) => {
                    let slot = vars.binary_search(v).expect("variable collected");
                    code.push(Instr::Load(slot));
                }
                Term::App(sym, args) => {
                    let (op, arity) = alg
                        .signature()
                        .lookup(sym)
                        .ok_or_else(|| Error::UnknownSymbol(sym.clone()))?;
                    if arity != args.len() {
                        return Err(Error::ArityMismatch {
                            symbol: sym.clone(),
                            expected: arity,
                            found: args.len(),
                        });
                    }
                    for a in args {
                        emit(alg, a, vars, code)?;
                    }
                    code.push(Instr::Apply { op, arity });
                }
            }
            Ok(())
        }
        emit(alg, t, &vars, &mut code)?;
        Ok(CompiledTerm {
            code,
            num_x: vars.iter().filter(|v| v.kind == VarKind::X).count(),
            vars,
        })
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    /// Number of `x` variables; they occupy slots `0..num_x()`.
    pub fn num_x(&self) -> usize {
        self.num_x
    }

    pub fn num_y(&self) -> usize {
        self.vars.len() - self.num_x
    }

    /// Evaluates with `slots[i]` bound to variable `vars()[i]`.
    pub fn eval_with(&self, alg: &FiniteAlgebra, slots: &[usize], stack: &mut Vec<usize>) -> usize {
        stack.clear();
        for ins in &self.code {
            match *ins {
                Instr::Load(s) => stack.push(slots[s]),
                Instr::Apply { op, arity } => {
                    let base = stack.len() - arity;
                    let v = alg.apply(op, &stack[base..]);
                    stack.truncate(base);
                    stack.push(v);
                }
            }
        }
        stack[0]
    }

    pub fn eval(&self, alg: &FiniteAlgebra, slots: &[usize]) -> usize {
        self.eval_with(alg, slots, &mut Vec::with_capacity(8))
    }
}

/// Number of tuples in the product of the given domains (saturating).
pub fn product_size(domains: &[&[usize]]) -> u64 {
    domains
        .iter()
        .fold(1u64, |acc, d| acc.saturating_mul(d.len() as u64))
}

/// Calls `f` on every tuple of the cartesian product of `domains`, in
/// lexicographic order. `f` returns `false` to stop early; the return value
/// reports whether the enumeration ran to completion.
pub fn for_each_tuple(domains: &[&[usize]], mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if domains.iter().any(|d| d.is_empty()) {
        return true;
    }
    let k = domains.len();
    let mut idx = vec![0usize; k];
    let mut tuple: Vec<usize> = domains.iter().map(|d| d[0]).collect();
    loop {
        if !f(&tuple) {
            return false;
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < domains[pos].len() {
                tuple[pos] = domains[pos][idx[pos]];
                break;
            }
            idx[pos] = 0;
            tuple[pos] = domains[pos][0];
        }
    }
}
