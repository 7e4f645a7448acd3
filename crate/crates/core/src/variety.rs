//! Varieties with a witness, the `.sig` file format, and the built-in
//! registry with its bundled finite models.

use std::fmt::Write as _;

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::parse::{parse_operation_term, parse_term};
use crate::term::{OpSymbol, Signature, Term};
use crate::witness::BitWitness;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietySpec {
    pub sig: Signature,
    pub witness: BitWitness,
    /// Whether the witness constant is the only constant of the theory.
    pub semiabelian: bool,
    /// Defining identities, informational; each side uses `x` variables only.
    pub axioms: Vec<(Term, Term)>,
    pub bundled: Vec<FiniteAlgebra>,
}

pub const BUILTIN_NAMES: [&str; 7] = [
    "group",
    "ring",
    "loop",
    "semiloop",
    "div_inv_groupoid",
    "omega_group_demo",
    "omega_loop_demo",
];

macro_rules! fixture {
    ($path:literal) => {
        ($path, include_str!(concat!("../fixtures/", $path)))
    };
}

type Fixture = (&'static str, &'static str);

/// Raw texts of the bundled `.sig` and `.alg` fixtures for a built-in name.
pub fn builtin_sources(name: &str) -> Result<(Fixture, Vec<Fixture>)> {
    Ok(match name {
        "group" => (
            fixture!("group/group.sig"),
            vec![
                fixture!("group/Z4.alg"),
                fixture!("group/V4.alg"),
                fixture!("group/S3.alg"),
                fixture!("group/D4.alg"),
            ],
        ),
        "ring" => (
            fixture!("ring/ring.sig"),
            vec![fixture!("ring/Z4.alg"), fixture!("ring/V4.alg"), fixture!("ring/Z6.alg")],
        ),
        "loop" => (
            fixture!("loop/loop.sig"),
            vec![fixture!("loop/L5.alg"), fixture!("loop/S3.alg")],
        ),
        "semiloop" => (
            fixture!("semiloop/semiloop.sig"),
            vec![fixture!("semiloop/SL3.alg"), fixture!("semiloop/SL4.alg")],
        ),
        "div_inv_groupoid" => (
            fixture!("div_inv_groupoid/div_inv_groupoid.sig"),
            vec![
                fixture!("div_inv_groupoid/DIG3.alg"),
                fixture!("div_inv_groupoid/DIG4.alg"),
            ],
        ),
        "omega_group_demo" | "omega_group" => (
            fixture!("omega_group/omega_group.sig"),
            vec![
                fixture!("omega_group/Z4_ring.alg"),
                fixture!("omega_group/Z6_ring.alg"),
                fixture!("omega_group/Z4_skew.alg"),
                fixture!("omega_group/S3_comm.alg"),
            ],
        ),
        "omega_loop_demo" | "omega_loop" => (
            fixture!("omega_loop/omega_loop.sig"),
            vec![
                fixture!("omega_loop/L5_sq.alg"),
                fixture!("omega_loop/S3_comm.alg"),
            ],
        ),
        other => return Err(Error::UnknownVariety(other.to_string())),
    })
}

/// A built-in variety with its bundled models loaded and validated.
pub fn builtin(name: &str) -> Result<VarietySpec> {
    let ((_, sig_text), algs) = builtin_sources(name)?;
    let mut spec = VarietySpec::from_sig_str(sig_text)?;
    for (path, text) in algs {
        let alg = FiniteAlgebra::from_alg_str(text, &spec.sig)
            .map_err(|e| Error::Algebra(format!("bundled fixture {path}: {e}")))?;
        spec.bundled.push(alg);
    }
    Ok(spec)
}

/// Fixture directory of a built-in name, relative to a fixtures root.
pub fn fixture_dir_name(name: &str) -> Result<&'static str> {
    let ((path, _), _) = builtin_sources(name)?;
    Ok(path.split('/').next().expect("fixture path has a directory"))
}

/// Loads `<dir>/<d>/<d>.sig` and every `<dir>/<d>/*.alg` (sorted by file
/// name), where `d` is the fixture directory of the built-in `name`.
/// Algebras that fail to load are returned separately as `(file, error)`.
pub fn load_variety_dir(dir: &std::path::Path, name: &str) -> Result<(VarietySpec, Vec<(String, Error)>)> {
    let d = fixture_dir_name(name)?;
    let root = dir.join(d);
    let read = |p: &std::path::Path| {
        std::fs::read_to_string(p).map_err(|e| Error::Algebra(format!("{}: {e}", p.display())))
    };
    let mut spec = VarietySpec::from_sig_str(&read(&root.join(format!("{d}.sig")))?)?;
    let mut files: Vec<_> = std::fs::read_dir(&root)
        .map_err(|e| Error::Algebra(format!("{}: {e}", root.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "alg"))
        .collect();
    files.sort();
    let mut errors = Vec::new();
    for f in files {
        let label = f.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        match read(&f).and_then(|text| FiniteAlgebra::from_alg_str(&text, &spec.sig)) {
            Ok(alg) => spec.bundled.push(alg),
            Err(e) => errors.push((format!("{d}/{label}"), e)),
        }
    }
    Ok((spec, errors))
}

/// Looks up a bundled algebra of `spec` by name, ignoring ASCII case and a
/// trailing `.alg`.
pub fn find_bundled<'a>(spec: &'a VarietySpec, name: &str) -> Option<&'a FiniteAlgebra> {
    let name = name.strip_suffix(".alg").unwrap_or(name);
    spec.bundled.iter().find(|a| a.name().eq_ignore_ascii_case(name))
}

/// The same variety over a larger signature: `extra` operations are appended,
/// the witness is carried over unchanged, and no bundled models are kept.
pub fn extend_signature(base: &VarietySpec, name: &str, extra: &[(&str, usize)]) -> Result<VarietySpec> {
    let sig = base.sig.extended(name, extra.iter().copied())?;
    Ok(VarietySpec {
        witness: base.witness.clone(),
        semiabelian: base.semiabelian && extra.iter().all(|&(_, arity)| arity > 0),
        axioms: base.axioms.clone(),
        bundled: Vec::new(),
        sig,
    })
}

impl VarietySpec {
    pub fn name(&self) -> &str {
        self.sig.name()
    }

    /// Operations of `self` that are absent from `base`.
    pub fn new_operations(&self, base: &Signature) -> Result<Vec<OpSymbol>> {
        if !base.is_subsignature_of(&self.sig) {
            return Err(Error::NotAnExtension(self.sig.name().to_string()));
        }
        Ok(self
            .sig
            .ops()
            .iter()
            .filter(|o| base.lookup(&o.name).is_none())
            .cloned()
            .collect())
    }

    /// Parses the `.sig` format:
    ///
    /// ```text
    /// signature <Name>
    /// op <sym> <arity>
    /// witness n=<n>
    /// zero: <term>
    /// alpha<i>: <term>
    /// theta: <term>
    /// ```
    ///
    /// plus the optional lines `semiabelian true|false` and
    /// `axiom: <term> = <term>`. Without a `semiabelian` line the flag is
    /// inferred: true iff the zero term is the only constant symbol.
    pub fn from_sig_str(text: &str) -> Result<VarietySpec> {
        let err = |line: usize, msg: String| Error::Signature(format!("line {line}: {msg}"));
        let mut name: Option<String> = None;
        let mut ops: Vec<(String, usize)> = Vec::new();
        let mut n: Option<usize> = None;
        let mut zero = None;
        let mut alphas: Vec<Option<(usize, String)>> = Vec::new();
        let mut theta = None;
        let mut semiabelian = None;
        let mut axioms = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = match line.split_once(':') {
                Some((h, r)) if !h.contains(char::is_whitespace) => (h.trim(), Some(r.trim())),
                _ => (line, None),
            };
            match (head, rest) {
                ("zero", Some(t)) => zero = Some((lineno, t.to_string())),
                ("theta", Some(t)) => theta = Some((lineno, t.to_string())),
                ("axiom", Some(t)) => axioms.push((lineno, t.to_string())),
                (h, Some(t)) if h.starts_with("alpha") => {
                    let idx: usize = h[5..]
                        .parse()
                        .ok()
                        .filter(|&k| k >= 1)
                        .ok_or_else(|| err(lineno, format!("bad alpha label `{h}`")))?;
                    if alphas.len() < idx {
                        alphas.resize(idx, None);
                    }
                    if alphas[idx - 1].is_some() {
                        return Err(err(lineno, format!("{h} given twice")));
                    }
                    alphas[idx - 1] = Some((lineno, t.to_string()));
                }
                (_, Some(_)) => return Err(err(lineno, format!("unknown entry `{head}`"))),
                (_, None) => {
                    let words: Vec<&str> = line.split_whitespace().collect();
                    match words.as_slice() {
                        ["signature", nm] => {
                            if name.replace(nm.to_string()).is_some() {
                                return Err(err(lineno, "signature declared twice".into()));
                            }
                        }
                        ["op", sym, arity] => {
                            let arity = arity
                                .parse()
                                .map_err(|_| err(lineno, format!("`{arity}` is not an arity")))?;
                            ops.push((sym.to_string(), arity));
                        }
                        ["witness", spec] => {
                            let v = spec
                                .strip_prefix("n=")
                                .and_then(|v| v.parse::<usize>().ok())
                                .filter(|&v| v >= 1)
                                .ok_or_else(|| err(lineno, format!("expected `n=<positive integer>`, found `{spec}`")))?;
                            n = Some(v);
                        }
                        ["semiabelian", flag] => {
                            semiabelian = Some(match *flag {
                                "true" => true,
                                "false" => false,
                                _ => return Err(err(lineno, format!("`{flag}` is not a boolean"))),
                            })
                        }
                        _ => return Err(err(lineno, format!("cannot parse `{line}`"))),
                    }
                }
            }
        }

        let name = name.ok_or_else(|| Error::Signature("missing `signature` line".into()))?;
        let sig = Signature::new(name, ops)?;
        let n = n.ok_or_else(|| Error::Signature("missing `witness n=<n>` line".into()))?;
        if alphas.len() != n || alphas.iter().any(Option::is_none) {
            return Err(Error::Signature(format!("expected alpha1..alpha{n}")));
        }
        let at = |line: usize, e: Error| Error::Signature(format!("line {line}: {e}"));
        let (zl, zt) = zero.ok_or_else(|| Error::Signature("missing `zero:` line".into()))?;
        let zero = parse_operation_term(&zt, &sig, 0).map_err(|e| at(zl, e))?;
        let alphas = alphas
            .into_iter()
            .flatten()
            .map(|(l, t)| parse_operation_term(&t, &sig, 2).map_err(|e| at(l, e)))
            .collect::<Result<Vec<_>>>()?;
        let (tl, tt) = theta.ok_or_else(|| Error::Signature("missing `theta:` line".into()))?;
        let theta = parse_operation_term(&tt, &sig, n as u32 + 1).map_err(|e| at(tl, e))?;
        let axioms = axioms
            .into_iter()
            .map(|(l, t)| {
                let (lhs, rhs) = t
                    .split_once('=')
                    .ok_or_else(|| err(l, "axiom needs `lhs = rhs`".into()))?;
                Ok((
                    parse_term(lhs, &sig).map_err(|e| at(l, e))?,
                    parse_term(rhs, &sig).map_err(|e| at(l, e))?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let semiabelian = semiabelian.unwrap_or_else(|| {
            let mut constants = sig.constants();
            match (constants.next(), constants.next(), &zero) {
                (Some(c), None, Term::App(z, args)) => args.is_empty() && *z == c.name,
                _ => false,
            }
        });
        let witness = BitWitness::new(&sig, zero, alphas, theta)?;
        Ok(VarietySpec {
            sig,
            witness,
            semiabelian,
            axioms,
            bundled: Vec::new(),
        })
    }

    pub fn to_sig_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "signature {}", self.sig.name());
        for op in self.sig.ops() {
            let _ = writeln!(out, "op {} {}", op.name, op.arity);
        }
        let _ = writeln!(out, "witness n={}", self.witness.n());
        let _ = writeln!(out, "zero: {}", self.witness.zero());
        for (i, a) in self.witness.alphas().iter().enumerate() {
            let _ = writeln!(out, "alpha{}: {a}", i + 1);
        }
        let _ = writeln!(out, "theta: {}", self.witness.theta());
        let _ = writeln!(out, "semiabelian {}", self.semiabelian);
        for (l, r) in &self.axioms {
            let _ = writeln!(out, "axiom: {l} = {r}");
        }
        out
    }
}
