//! Classical hand-simplified ideal-term lists for the built-in varieties,
//! used to check that the generated sets have the same determining power.

use crate::error::{Error, Result};
use crate::parse::parse_term;
use crate::term::{OpSymbol, Term};
use crate::termset::Variant;
use crate::variety::VarietySpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceSet {
    pub name: String,
    /// The generated set this list is compared against.
    pub variant: Variant,
    pub terms: Vec<Term>,
}

const GROUP: [&str; 4] = [
    "mul(y1,y2)",
    "mul(mul(x1,y1),inv(x1))",
    "mul(mul(inv(x1),inv(y1)),x1)",
    "y1",
];

const RING: [&str; 4] = ["add(y1,y2)", "neg(y1)", "mul(x1,y1)", "mul(y1,x1)"];

const LOOP_I: [&str; 5] = [
    "mul(y1,y2)",
    "rdiv(y1,y2)",
    "rdiv(mul(mul(y1,x1),mul(y2,x2)),mul(x1,x2))",
    "rdiv(rdiv(mul(y1,x1),mul(y2,x2)),rdiv(x1,x2))",
    "rdiv(ldiv(mul(y1,x1),mul(y2,x2)),ldiv(x1,x2))",
];

// the first entry transports along a single parameter x1 on both sides
const LOOP_IV: [&str; 8] = [
    "rdiv(mul(y1,x1),mul(y2,x1))",
    "mul(y1,y2)",
    "rdiv(mul(mul(y1,x1),x2),mul(x1,x2))",
    "rdiv(mul(x1,mul(y1,x2)),mul(x1,x2))",
    "rdiv(rdiv(mul(y1,x1),x2),rdiv(x1,x2))",
    "rdiv(ldiv(x1,mul(y1,x2)),ldiv(x1,x2))",
    "rdiv(rdiv(x1,mul(y1,x2)),rdiv(x1,x2))",
    "rdiv(ldiv(mul(y1,x1),x2),ldiv(x1,x2))",
];

const LOOP_DIVISIONS: [&str; 2] = ["rdiv(y1,y2)", "ldiv(y1,y2)"];

const SEMILOOP_PERMUTED: [&str; 4] = [
    "mul(y1,y2)",
    "rdiv(y1,y2)",
    "rdiv(mul(x1,x2),mul(mul(y1,x1),mul(y2,x2)))",
    "rdiv(rdiv(x1,x2),rdiv(mul(y1,x1),mul(y2,x2)))",
];

fn parse_all<'a>(spec: &VarietySpec, texts: impl IntoIterator<Item = &'a str>) -> Result<Vec<Term>> {
    texts.into_iter().map(|t| parse_term(t, &spec.sig)).collect()
}

/// Operations of `spec` outside the named base operations.
fn operators<'a>(spec: &'a VarietySpec, base: &[&str]) -> Vec<&'a OpSymbol> {
    spec.sig.ops().iter().filter(|o| !base.contains(&o.name.as_str())).collect()
}

/// `ω(x1, .., y1·xi, .., xk)` for each position `i`.
fn moved_at(op: &OpSymbol) -> Vec<(Term, Term)> {
    let plain: Vec<Term> = (1..=op.arity as u32).map(Term::x).collect();
    (0..op.arity)
        .map(|i| {
            let mut args = plain.clone();
            args[i] = Term::app("mul", vec![Term::y(1), Term::x(i as u32 + 1)]);
            (Term::app(op.name.clone(), args), Term::app(op.name.clone(), plain.clone()))
        })
        .collect()
}

fn rdiv(a: Term, b: Term) -> Term {
    Term::app("rdiv", vec![a, b])
}

fn mul(a: Term, b: Term) -> Term {
    Term::app("mul", vec![a, b])
}

fn inv(a: Term) -> Term {
    Term::app("inv", vec![a])
}

fn set(name: &str, variant: Variant, terms: Vec<Term>) -> ReferenceSet {
    ReferenceSet {
        name: name.to_string(),
        variant,
        terms,
    }
}

/// The reference lists known for `spec`, keyed by its signature name.
pub fn reference_sets(spec: &VarietySpec) -> Result<Vec<ReferenceSet>> {
    let group_ops = ["e", "mul", "inv"];
    let loop_ops = ["e", "mul", "rdiv", "ldiv"];
    Ok(match spec.name() {
        "group" => vec![set("group-normal-subgroup", Variant::IV, parse_all(spec, GROUP)?)],
        "ring" => vec![set("ring-ideal", Variant::IV, parse_all(spec, RING)?)],
        "loop" => {
            let bruck = LOOP_IV[1..6].iter().chain(&LOOP_DIVISIONS).copied();
            vec![
                set("loop-set-i", Variant::I, parse_all(spec, LOOP_I)?),
                set("loop-set-iv", Variant::IV, parse_all(spec, LOOP_IV)?),
                set("loop-bruck", Variant::I, parse_all(spec, bruck)?),
            ]
        }
        "semiloop" => vec![
            set("semiloop-set-i", Variant::I, parse_all(spec, LOOP_I[..4].iter().copied())?),
            set("semiloop-permuted", Variant::I, parse_all(spec, SEMILOOP_PERMUTED)?),
        ],
        "div_inv_groupoid" => vec![set(
            "dig-set-i",
            Variant::I,
            parse_all(spec, LOOP_I[..4].iter().copied())?,
        )],
        "omega_group" => {
            let mut conj = parse_all(spec, GROUP)?;
            let mut higgins = conj.clone();
            for op in operators(spec, &group_ops) {
                for (moved, plain) in moved_at(op) {
                    conj.push(mul(moved.clone(), inv(plain.clone())));
                    higgins.push(mul(inv(plain), moved));
                }
            }
            vec![
                set("omega-group-set-iv", Variant::IV, conj),
                set("omega-group-higgins", Variant::IV, higgins),
            ]
        }
        "omega_loop" => {
            let mut set_i = parse_all(spec, LOOP_I)?;
            let mut set_iv = parse_all(spec, LOOP_IV)?;
            let bruck = LOOP_IV[1..6].iter().chain(&LOOP_DIVISIONS).copied();
            let mut higgins = parse_all(spec, bruck)?;
            for op in operators(spec, &loop_ops) {
                let k = op.arity as u32;
                let moved: Vec<Term> = (1..=k).map(|j| mul(Term::y(j), Term::x(j))).collect();
                let plain: Vec<Term> = (1..=k).map(Term::x).collect();
                set_i.push(rdiv(Term::app(op.name.clone(), moved), Term::app(op.name.clone(), plain)));
                for (moved, plain) in moved_at(op) {
                    set_iv.push(rdiv(moved.clone(), plain.clone()));
                    higgins.push(rdiv(moved, plain));
                }
            }
            vec![
                set("omega-loop-set-i", Variant::I, set_i),
                set("omega-loop-set-iv", Variant::IV, set_iv),
                set("omega-loop-higgins", Variant::IV, higgins),
            ]
        }
        other => return Err(Error::UnknownVariety(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variety::{builtin, BUILTIN_NAMES};

    #[test]
    fn every_builtin_has_reference_lists() {
        for name in BUILTIN_NAMES {
            let spec = builtin(name).unwrap();
            let sets = reference_sets(&spec).unwrap();
            assert!(!sets.is_empty(), "{name}");
        }
    }

    #[test]
    fn omega_group_terms() {
        let spec = builtin("omega_group_demo").unwrap();
        let sets = reference_sets(&spec).unwrap();
        let last: Vec<String> = sets[0].terms[4..].iter().map(|t| t.to_string()).collect();
        assert_eq!(
            last,
            [
                "mul(omega(mul(y1,x1),x2),inv(omega(x1,x2)))",
                "mul(omega(x1,mul(y1,x2)),inv(omega(x1,x2)))",
            ]
        );
        assert_eq!(sets[1].terms[4].to_string(), "mul(inv(omega(x1,x2)),omega(mul(y1,x1),x2))");
    }

    #[test]
    fn bruck_list() {
        let spec = builtin("loop").unwrap();
        let bruck = &reference_sets(&spec).unwrap()[2];
        assert_eq!(bruck.terms.len(), 7);
        assert_eq!(bruck.terms[0].to_string(), "mul(y1,y2)");
    }
}
