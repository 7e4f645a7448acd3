//! Witnesses `(0, α₁..αₙ, θ)` for the identities
//!
//! ```text
//! αᵢ(x, x) = 0
//! θ(α₁(x, y), .., αₙ(x, y), y) = x
//! ```
//!
//! and their tabulation on a finite algebra.

use serde::Serialize;

use crate::algebra::{eval_ground, holds_identity, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::eval::{for_each_tuple, product_size, Budget, CompiledTerm};
use crate::subset::Subset;
use crate::term::{check_term, vars_of, Signature, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitWitness {
    zero: Term,
    alphas: Vec<Term>,
    theta: Term,
}

impl BitWitness {
    /// `alphas` are binary terms in `x1, x2`; `theta` takes the `αᵢ`-values
    /// in `x1..xn` and the base element in `x(n+1)`.
    pub fn new(sig: &Signature, zero: Term, alphas: Vec<Term>, theta: Term) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::Witness("at least one alpha term is required".into()));
        }
        let n = alphas.len() as u32;
        check_term(sig, &zero)?;
        if !vars_of(&zero).is_empty() {
            return Err(Error::Witness(format!("zero term `{zero}` must be ground")));
        }
        for (i, a) in alphas.iter().enumerate() {
            check_term(sig, a)?;
            let vs = vars_of(a);
            if !vs.yvars.is_empty() || vs.xvars.iter().any(|&x| x > 2) {
                return Err(Error::Witness(format!(
                    "alpha{} = `{a}` may only use x1 and x2",
                    i + 1
                )));
            }
        }
        check_term(sig, &theta)?;
        let vs = vars_of(&theta);
        if !vs.yvars.is_empty() || vs.xvars.iter().any(|&x| x > n + 1) {
            return Err(Error::Witness(format!(
                "theta = `{theta}` may only use x1..x{}",
                n + 1
            )));
        }
        Ok(BitWitness { zero, alphas, theta })
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn zero(&self) -> &Term {
        &self.zero
    }

    pub fn alphas(&self) -> &[Term] {
        &self.alphas
    }

    pub fn theta(&self) -> &Term {
        &self.theta
    }

    /// `αᵢ(a, b)` as a term; `i` is 1-based.
    pub fn alpha_at(&self, i: usize, a: Term, b: Term) -> Term {
        self.alphas[i - 1].instantiate(&[a, b])
    }

    /// `θ(args)`; `args` must have `n + 1` entries.
    pub fn theta_at(&self, args: &[Term]) -> Term {
        debug_assert_eq!(args.len(), self.n() + 1);
        self.theta.instantiate(args)
    }

    /// The three identities checked by [`verify_witness`], as
    /// `(name, lhs, rhs)` over `x1` (and `x2`).
    pub fn identities(&self) -> Vec<(String, Term, Term)> {
        let mut out = Vec::new();
        for i in 1..=self.n() {
            out.push((
                format!("alpha{i}(x,x) = 0"),
                self.alpha_at(i, Term::x(1), Term::x(1)),
                self.zero.clone(),
            ));
        }
        let mut args: Vec<Term> = (1..=self.n())
            .map(|i| self.alpha_at(i, Term::x(1), Term::x(2)))
            .collect();
        args.push(Term::x(2));
        out.push((
            "theta(alpha(x,y),y) = x".to_string(),
            self.theta_at(&args),
            Term::x(1),
        ));
        let mut args = vec![self.zero.clone(); self.n()];
        args.push(Term::x(1));
        out.push(("theta(0,..,0,x) = x".to_string(), self.theta_at(&args), Term::x(1)));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessFailure {
    pub identity: String,
    pub lhs: Term,
    pub rhs: Term,
    pub assignment: Vec<(Var, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub algebra: String,
    pub ok: bool,
    pub failures: Vec<WitnessFailure>,
}

pub fn verify_witness(alg: &FiniteAlgebra, w: &BitWitness, budget: &Budget) -> Result<WitnessReport> {
    let mut failures = Vec::new();
    for (identity, lhs, rhs) in w.identities() {
        let check = holds_identity(alg, &lhs, &rhs, budget)?;
        if let Some(assignment) = check.counterexample {
            failures.push(WitnessFailure {
                identity,
                lhs,
                rhs,
                assignment,
            });
        }
    }
    Ok(WitnessReport {
        algebra: alg.name().to_string(),
        ok: failures.is_empty(),
        failures,
    })
}

/// A witness tabulated on a particular algebra.
#[derive(Clone, Debug)]
pub struct BoundWitness<'a> {
    alg: &'a FiniteAlgebra,
    n: usize,
    zero: usize,
    alphas: Vec<Vec<usize>>,
    theta: Vec<usize>,
}

fn tabulate(alg: &FiniteAlgebra, t: &Term, arity: usize) -> Result<Vec<usize>> {
    let vars: Vec<Var> = (1..=arity as u32).map(Var::x).collect();
    let compiled = CompiledTerm::with_vars(alg, t, &vars)?;
    let carrier = alg.carrier();
    let domains = vec![carrier.as_slice(); arity];
    let mut out = Vec::with_capacity(product_size(&domains) as usize);
    let mut stack = Vec::new();
    for_each_tuple(&domains, |args| {
        out.push(compiled.eval_with(alg, args, &mut stack));
        true
    });
    Ok(out)
}

impl<'a> BoundWitness<'a> {
    pub fn new(alg: &'a FiniteAlgebra, w: &BitWitness, budget: &Budget) -> Result<Self> {
        let m = alg.size() as u64;
        let n = w.n();
        budget.charge(n as u64 * m * m + m.saturating_pow(n as u32 + 1))?;
        Ok(BoundWitness {
            alg,
            n,
            zero: eval_ground(alg, w.zero())?,
            alphas: w
                .alphas()
                .iter()
                .map(|a| tabulate(alg, a, 2))
                .collect::<Result<_>>()?,
            theta: tabulate(alg, w.theta(), n + 1)?,
        })
    }

    pub fn algebra(&self) -> &'a FiniteAlgebra {
        self.alg
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    /// `αᵢ(a, b)` with 0-based `i`.
    #[inline]
    pub fn alpha(&self, i: usize, a: usize, b: usize) -> usize {
        self.alphas[i][a * self.alg.size() + b]
    }

    /// `θ(args)` with `args.len() == n + 1`.
    #[inline]
    pub fn theta(&self, args: &[usize]) -> usize {
        let m = self.alg.size();
        self.theta[args.iter().fold(0, |acc, &a| acc * m + a)]
    }

    /// `θ(H, .., H, a)`.
    pub fn theta_image(&self, h: &Subset, a: usize) -> Subset {
        let members = h.to_vec();
        let domains = vec![members.as_slice(); self.n];
        let mut args = vec![0; self.n + 1];
        args[self.n] = a;
        let mut out = Subset::new();
        for_each_tuple(&domains, |hs| {
            args[..self.n].copy_from_slice(hs);
            out.insert(self.theta(&args));
            true
        });
        out
    }
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

    fn witness(alpha: &str) -> BitWitness {
        let sig = group_sig();
        BitWitness::new(
            &sig,
            Term::constant("e"),
            vec![parse_term(alpha, &sig).unwrap()],
            parse_term("mul(x1,x2)", &sig).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_malformed_witnesses() {
        let sig = group_sig();
        let theta = parse_term("mul(x1,x2)", &sig).unwrap();
        assert!(BitWitness::new(&sig, Term::x(1), vec![theta.clone()], theta.clone()).is_err());
        assert!(BitWitness::new(&sig, Term::constant("e"), vec![], theta.clone()).is_err());
        let bad_alpha = parse_term("mul(x1,x3)", &sig).unwrap();
        assert!(BitWitness::new(&sig, Term::constant("e"), vec![bad_alpha], theta.clone()).is_err());
        let bad_theta = parse_term("mul(x1,x3)", &sig).unwrap();
        assert!(BitWitness::new(&sig, Term::constant("e"), vec![theta.clone()], bad_theta).is_err());
    }

    #[test]
    fn group_witness_verifies() {
        let report = verify_witness(&z4(), &witness("mul(x1,inv(x2))"), &Budget::default()).unwrap();
        assert!(report.ok, "{report:?}");
    }

    #[test]
    fn broken_witness_reports_counterexample() {
        let report = verify_witness(&z4(), &witness("mul(x1,x2)"), &Budget::default()).unwrap();
        assert!(!report.ok);
        let first = &report.failures[0];
        assert_eq!(first.identity, "alpha1(x,x) = 0");
        // 1 + 1 = 2 is the first failure in lexicographic order
        assert_eq!(first.assignment, vec![(Var::x(1), 1)]);
    }

    #[test]
    fn bound_witness_tables() {
        let alg = z4();
        let bw = BoundWitness::new(&alg, &witness("mul(x1,inv(x2))"), &Budget::default()).unwrap();
        assert_eq!(bw.zero(), 0);
        assert_eq!(bw.alpha(0, 1, 3), 2);
        assert_eq!(bw.theta(&[3, 3]), 2);
        assert_eq!(bw.theta_image(&Subset::from_iter([0, 2]), 1).to_vec(), vec![1, 3]);
        assert_eq!(bw.theta_image(&Subset::singleton(0), 3).to_vec(), vec![3]);
        assert!(bw.theta_image(&Subset::new(), 3).is_empty());
    }
}
