//! Congruence lattices of finite algebras, computed from principal
//! congruences. This is the ground-truth oracle for ideals: in an
//! ideal-determined variety the ideals are exactly the congruence kernels.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::eval::{for_each_tuple, Budget};
use crate::subset::{Partition, Subset, UnionFind};

fn check_element(alg: &FiniteAlgebra, a: usize) -> Result<()> {
    if a >= alg.size() {
        Err(Error::ElementOutOfRange {
            element: a,
            size: alg.size(),
        })
    } else {
        Ok(())
    }
}

/// Least congruence identifying `a` and `b`.
///
/// Every merged pair is pushed on a worklist; processing `(u, v)` merges
/// `f(.., u, ..)` with `f(.., v, ..)` for each operation, argument position
/// and choice of the remaining arguments. Compatibility for single-position
/// changes on generating pairs is enough, by transitivity.
pub fn principal_congruence(alg: &FiniteAlgebra, a: usize, b: usize, budget: &Budget) -> Result<Partition> {
    check_element(alg, a)?;
    check_element(alg, b)?;
    let m = alg.size();
    let mut uf = UnionFind::new(m);
    let mut work = Vec::new();
    if uf.union(a, b) {
        work.push((a, b));
    }
    let carrier = alg.carrier();
    let per_pair: u64 = alg
        .signature()
        .ops()
        .iter()
        .filter(|o| o.arity > 0)
        .map(|o| 2 * o.arity as u64 * (m as u64).saturating_pow(o.arity as u32 - 1))
        .sum();
    let mut args = Vec::new();
    while let Some((u, v)) = work.pop() {
        budget.charge(per_pair)?;
        for (op, sym) in alg.signature().ops().iter().enumerate() {
            if sym.arity == 0 {
                continue;
            }
            let rest = vec![carrier.as_slice(); sym.arity - 1];
            for pos in 0..sym.arity {
                for_each_tuple(&rest, |others| {
                    args.clear();
                    args.extend_from_slice(&others[..pos]);
                    args.push(u);
                    args.extend_from_slice(&others[pos..]);
                    let fu = alg.apply(op, &args);
                    args[pos] = v;
                    let fv = alg.apply(op, &args);
                    if uf.union(fu, fv) {
                        work.push((fu, fv));
                    }
                    true
                });
            }
        }
    }
    Ok(uf.partition())
}

/// Every congruence of `alg`: the identity relation together with all joins
/// of principal congruences. Sorted by decreasing number of blocks, then by
/// label vector, so the identity relation comes first and the all relation last.
pub fn all_congruences(alg: &FiniteAlgebra, budget: &Budget) -> Result<Vec<Partition>> {
    let m = alg.size();
    let mut principals = BTreeSet::new();
    for a in 0..m {
        for b in a + 1..m {
            principals.insert(principal_congruence(alg, a, b, budget)?);
        }
    }
    let principals: Vec<Partition> = principals.into_iter().collect();
    let mut lattice: BTreeSet<Partition> = principals.iter().cloned().collect();
    lattice.insert(Partition::discrete(m));
    // every congruence is a join of principal ones, so closing under
    // "join with a principal congruence" reaches the whole lattice
    let mut frontier: Vec<Partition> = lattice.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for c in &frontier {
            for p in &principals {
                let j = c.join(p);
                if lattice.insert(j.clone()) {
                    next.push(j);
                }
            }
        }
        budget.charge((frontier.len() * principals.len()) as u64)?;
        frontier = next;
    }
    let mut out: Vec<Partition> = lattice.into_iter().collect();
    out.sort_by(|a, b| b.num_blocks().cmp(&a.num_blocks()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// The block of `p` containing `zero`.
pub fn kernel_of(p: &Partition, zero: usize) -> Subset {
    p.block_of(zero)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatibilityFailure {
    pub symbol: String,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub left_value: usize,
    pub right_value: usize,
}

/// Checks that `p` is compatible with every operation of `alg`. On failure,
/// returns two related argument tuples (differing in one position) whose
/// images are unrelated. `p` must partition the carrier of `alg`.
pub fn is_congruence(alg: &FiniteAlgebra, p: &Partition) -> std::result::Result<(), CompatibilityFailure> {
    assert_eq!(p.size(), alg.size(), "partition is over a different carrier");
    let carrier = alg.carrier();
    let m = alg.size();
    let mut failure = None;
    'ops: for (op, sym) in alg.signature().ops().iter().enumerate() {
        if sym.arity == 0 {
            continue;
        }
        let rest = vec![carrier.as_slice(); sym.arity - 1];
        for u in 0..m {
            for v in u + 1..m {
                if !p.related(u, v) {
                    continue;
                }
                for pos in 0..sym.arity {
                    let mut left = Vec::with_capacity(sym.arity);
                    let completed = for_each_tuple(&rest, |others| {
                        left.clear();
                        left.extend_from_slice(&others[..pos]);
                        left.push(u);
                        left.extend_from_slice(&others[pos..]);
                        let mut right = left.clone();
                        right[pos] = v;
                        let (fl, fr) = (alg.apply(op, &left), alg.apply(op, &right));
                        if p.related(fl, fr) {
                            return true;
                        }
                        failure = Some(CompatibilityFailure {
                            symbol: sym.name.clone(),
                            left: left.clone(),
                            right,
                            left_value: fl,
                            right_value: fr,
                        });
                        false
                    });
                    if !completed {
                        break 'ops;
                    }
                }
            }
        }
    }
    match failure {
        None => Ok(()),
        Some(f) => Err(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Signature;

    fn group_sig() -> Signature {
        Signature::new("group", [("e", 0), ("mul", 2), ("inv", 1)]).unwrap()
    }

    fn cyclic(n: usize) -> FiniteAlgebra {
        FiniteAlgebra::from_fn(
            "C",
            &group_sig(),
            n,
            &[&|_| 0, &|a| (a[0] + a[1]) % n, &|a| (n - a[0]) % n],
        )
        .unwrap()
    }

    #[test]
    fn principal_congruences_of_z4() {
        let z4 = cyclic(4);
        let b = Budget::default();
        assert_eq!(
            principal_congruence(&z4, 0, 2, &b).unwrap().blocks(),
            vec![vec![0, 2], vec![1, 3]]
        );
        assert_eq!(principal_congruence(&z4, 0, 1, &b).unwrap(), Partition::indiscrete(4));
        assert_eq!(principal_congruence(&z4, 3, 3, &b).unwrap(), Partition::discrete(4));
        assert!(principal_congruence(&z4, 0, 9, &b).is_err());
    }

    #[test]
    fn lattice_of_cyclic_groups() {
        let b = Budget::default();
        // subgroup lattices of cyclic groups: number of divisors
        for (n, count) in [(1, 1), (2, 2), (4, 3), (6, 4), (8, 4), (12, 6)] {
            let cs = all_congruences(&cyclic(n), &b).unwrap();
            assert_eq!(cs.len(), count, "C{n}");
            assert_eq!(cs[0], Partition::discrete(n));
            assert_eq!(*cs.last().unwrap(), Partition::indiscrete(n));
            for c in &cs {
                assert!(is_congruence(&cyclic(n), c).is_ok());
            }
        }
    }

    #[test]
    fn kernels() {
        assert_eq!(kernel_of(&Partition::discrete(4), 0).to_vec(), vec![0]);
        assert_eq!(kernel_of(&Partition::indiscrete(4), 0), Subset::full(4));
    }

    #[test]
    fn incompatible_partition_reports_witness() {
        let z4 = cyclic(4);
        let p = Partition::from_blocks(4, &[vec![0, 1], vec![2], vec![3]]).unwrap();
        let f = is_congruence(&z4, &p).unwrap_err();
        assert_eq!(f.symbol, "mul");
        assert!(p.related(f.left[0], f.right[0]) || p.related(f.left[1], f.right[1]));
        assert!(!p.related(f.left_value, f.right_value));
    }

    #[test]
    fn budget_is_enforced() {
        let tiny = Budget::new(5);
        assert!(matches!(
            all_congruences(&cyclic(6), &tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
