use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bitideal::selftest::{resolve_filter, run_selftest};
use bitideal::termset::MergeReport;
use bitideal::variety::find_bundled;
use bitideal::{
    builtin, dedupe_semantic, dedupe_syntactic, extend_termset, gen_termset, verify_witness, Budget, Error,
    ExtensionMode, FiniteAlgebra, IdealEngine, Method, Subset, TermSet, Variant, VarietySpec,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "bitideal", version, about = "Ideals of finite algebras in BIT speciale varieties")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Maximum number of term evaluations for the whole command.
    #[arg(long, global = true, default_value_t = Budget::DEFAULT_LIMIT)]
    budget: u64,

    /// Print a human summary on stderr.
    #[arg(long, global = true)]
    verbose: bool,

    /// Fill in `elapsed_ms` in ideal reports.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct VarietyArg {
    /// Built-in variety name.
    #[arg(long)]
    variety: Option<String>,

    /// Signature and witness file.
    #[arg(long)]
    sig: Option<PathBuf>,
}

#[derive(Args)]
struct AlgebraArg {
    #[command(flatten)]
    variety: VarietyArg,

    /// Algebra file, or the name of a bundled algebra of the variety.
    #[arg(long)]
    algebra: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check the witness identities on one algebra or on every bundled one.
    VerifyWitness {
        #[command(flatten)]
        variety: VarietyArg,
        #[arg(long)]
        algebra: Option<String>,
    },
    /// Print a generated ideal-term set.
    GenTerms {
        #[command(flatten)]
        variety: VarietyArg,
        #[arg(long = "set", default_value = "iv")]
        variant: Variant,
        #[arg(long)]
        semiabelian: bool,
        /// `syntactic`, or an algebra to merge terms that agree on it.
        #[arg(long)]
        dedupe: Option<String>,
        /// Generate the set for `--base` and extend it to the variety.
        #[arg(long, requires = "base")]
        mode: Option<ExtensionMode>,
        /// Base variety name or signature file for `--mode`.
        #[arg(long, requires = "mode")]
        base: Option<String>,
    },
    /// Decide whether a subset is an ideal.
    CheckIdeal {
        #[command(flatten)]
        target: AlgebraArg,
        #[arg(long)]
        subset: String,
        #[arg(long, default_value = "all")]
        method: Method,
        #[arg(long)]
        semiabelian: bool,
    },
    /// Least ideal containing a seed.
    IdealClosure {
        #[command(flatten)]
        target: AlgebraArg,
        #[arg(long, default_value = "")]
        subset: String,
        #[arg(long = "set", default_value = "iv")]
        variant: Variant,
        #[arg(long)]
        semiabelian: bool,
    },
    /// All ideals of an algebra.
    ListIdeals {
        #[command(flatten)]
        target: AlgebraArg,
    },
    /// All congruences of an algebra with their kernels.
    Congruences {
        #[command(flatten)]
        target: AlgebraArg,
    },
    /// Compare the four descriptions of the congruence of an ideal.
    Prop21 {
        #[command(flatten)]
        target: AlgebraArg,
        #[arg(long)]
        subset: String,
        /// Only this pair `a,b` instead of all pairs.
        #[arg(long)]
        pair: Option<String>,
    },
    /// Run the invariant suites on the bundled fixtures.
    Selftest {
        #[arg(long)]
        filter: Option<String>,
        /// Fixture tree to load instead of the bundled one.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

struct Failed {
    code: u8,
    message: String,
}

impl From<Error> for Failed {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => 3,
            Error::NotAnIdeal(_) => 1,
            _ => 2,
        };
        Failed {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> Failed {
    Failed { code: 2, message }
}

type Outcome = Result<bool, Failed>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn write_out(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    write_out(&format!("{text}\n"));
}

fn load_spec(arg: &VarietyArg) -> Result<VarietySpec, Failed> {
    match (&arg.variety, &arg.sig) {
        (_, Some(path)) => Ok(VarietySpec::from_sig_str(&read(path)?)?),
        (Some(name), None) => Ok(builtin(name)?),
        (None, None) => Err(input_error("one of --variety or --sig is required".into())),
    }
}

/// A variety named by a built-in name or a `.sig` path.
fn spec_by_name(name: &str) -> Result<VarietySpec, Failed> {
    let path = Path::new(name);
    if path.is_file() {
        Ok(VarietySpec::from_sig_str(&read(path)?)?)
    } else {
        Ok(builtin(name)?)
    }
}

fn read(path: &Path) -> Result<String, Failed> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_algebra_arg(spec: &VarietySpec, name: &str) -> Result<FiniteAlgebra, Failed> {
    let path = Path::new(name);
    if path.is_file() {
        return Ok(FiniteAlgebra::from_alg_str(&read(path)?, &spec.sig)?);
    }
    find_bundled(spec, name)
        .cloned()
        .ok_or_else(|| input_error(format!("`{name}` is neither a file nor a bundled {} algebra", spec.name())))
}

fn parse_subset(text: &str, alg: &FiniteAlgebra) -> Result<Subset, Failed> {
    let h = Subset::parse(text)?;
    if let Some(a) = h.iter().find(|&a| a >= alg.size()) {
        return Err(Error::ElementOutOfRange {
            element: a,
            size: alg.size(),
        }
        .into());
    }
    Ok(h)
}

fn run(cli: &Cli) -> Outcome {
    let budget = Budget::new(cli.budget);
    match &cli.command {
        Command::VerifyWitness { variety, algebra } => verify(cli, &budget, variety, algebra.as_deref()),
        Command::GenTerms {
            variety,
            variant,
            semiabelian,
            dedupe,
            mode,
            base,
        } => gen_terms(cli, &budget, variety, *variant, *semiabelian, dedupe.as_deref(), mode.zip(base.as_deref())),
        Command::CheckIdeal {
            target,
            subset,
            method,
            semiabelian,
        } => check_ideal(cli, &budget, target, subset, *method, *semiabelian),
        Command::IdealClosure {
            target,
            subset,
            variant,
            semiabelian,
        } => closure(cli, &budget, target, subset, *variant, *semiabelian),
        Command::ListIdeals { target } => list_ideals(cli, &budget, target),
        Command::Congruences { target } => congruences(cli, &budget, target),
        Command::Prop21 { target, subset, pair } => kernel_criteria(cli, &budget, target, subset, pair.as_deref()),
        Command::Selftest { filter, fixtures } => selftest(cli, budget, filter.as_deref(), fixtures.as_deref()),
    }
}

#[derive(Serialize)]
struct WitnessOutput {
    variety: String,
    ok: bool,
    reports: Vec<bitideal::witness::WitnessReport>,
}

fn verify(cli: &Cli, budget: &Budget, variety: &VarietyArg, algebra: Option<&str>) -> Outcome {
    let spec = load_spec(variety)?;
    let algebras = match algebra {
        Some(name) => vec![load_algebra_arg(&spec, name)?],
        None => spec.bundled.clone(),
    };
    if algebras.is_empty() {
        return Err(input_error(format!("variety {} has no bundled algebras; pass --algebra", spec.name())));
    }
    let reports = algebras
        .iter()
        .map(|a| verify_witness(a, &spec.witness, budget))
        .collect::<Result<Vec<_>, _>>()?;
    let ok = reports.iter().all(|r| r.ok);
    if cli.verbose {
        for r in &reports {
            eprintln!("{}: {}", r.algebra, if r.ok { "ok" } else { "FAILED" });
        }
    }
    emit(&WitnessOutput {
        variety: spec.name().to_string(),
        ok,
        reports,
    });
    Ok(ok)
}

fn gen_terms(
    cli: &Cli,
    budget: &Budget,
    variety: &VarietyArg,
    variant: Variant,
    semiabelian: bool,
    dedupe: Option<&str>,
    extension: Option<(ExtensionMode, &str)>,
) -> Outcome {
    let spec = load_spec(variety)?;
    let ts = match extension {
        None => gen_termset(&spec, variant, semiabelian)?,
        Some((mode, base)) => {
            let base_spec = spec_by_name(base)?;
            extend_termset(&gen_termset(&base_spec, variant, semiabelian)?, &spec, mode)?
        }
    };
    let generated = ts.len();
    let (ts, merges): (TermSet, Option<MergeReport>) = match dedupe {
        None => (ts, None),
        Some("syntactic") => (dedupe_syntactic(&ts), None),
        Some(alg) => {
            let alg = load_algebra_arg(&spec, alg)?;
            let (ts, report) = dedupe_semantic(&ts, &alg, budget)?;
            (ts, Some(report))
        }
    };
    let mut text = ts.to_text();
    if let Some(report) = &merges {
        for m in &report.merges {
            for (k, t) in &m.merged {
                text.push_str(&format!(
                    "# merged on {}: {k} {t} into {} {}\n",
                    report.algebra, m.kept, m.kept_term
                ));
            }
        }
    }
    write_out(&text);
    if cli.verbose {
        eprintln!("{} terms generated, {} kept", generated, ts.len());
    }
    Ok(true)
}

fn check_ideal(cli: &Cli, budget: &Budget, target: &AlgebraArg, subset: &str, method: Method, sa: bool) -> Outcome {
    let spec = load_spec(&target.variety)?;
    let alg = load_algebra_arg(&spec, &target.algebra)?;
    let h = parse_subset(subset, &alg)?;
    let start = Instant::now();
    let engine = IdealEngine::new(&spec, &alg, budget)?;
    let mut report = engine.report(&h, method, sa)?;
    if cli.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    let all_true = report.verdicts.0.iter().all(|(_, v)| *v);
    if cli.verbose {
        for (k, v) in &report.verdicts.0 {
            eprintln!("{k}: {v}");
        }
        eprintln!("agreement: {}", report.agreement);
    }
    if !report.agreement {
        eprintln!("warning: methods disagree on {h}");
    }
    emit(&report);
    Ok(report.agreement && all_true)
}

#[derive(Serialize)]
struct ClosureOutput {
    algebra: String,
    seed: Subset,
    variant: Variant,
    semiabelian: bool,
    closure: Subset,
}

fn closure(cli: &Cli, budget: &Budget, target: &AlgebraArg, subset: &str, variant: Variant, sa: bool) -> Outcome {
    let spec = load_spec(&target.variety)?;
    let alg = load_algebra_arg(&spec, &target.algebra)?;
    let seed = parse_subset(subset, &alg)?;
    let engine = IdealEngine::new(&spec, &alg, budget)?;
    let closure = engine.ideal_closure(&seed, variant, sa)?;
    if cli.verbose {
        eprintln!("closure of {seed} in {}: {closure}", alg.name());
    }
    emit(&ClosureOutput {
        algebra: alg.name().to_string(),
        seed,
        variant,
        semiabelian: sa,
        closure,
    });
    Ok(true)
}

#[derive(Serialize)]
struct IdealsOutput {
    algebra: String,
    count: usize,
    ideals: Vec<Subset>,
}

fn list_ideals(cli: &Cli, budget: &Budget, target: &AlgebraArg) -> Outcome {
    let spec = load_spec(&target.variety)?;
    let alg = load_algebra_arg(&spec, &target.algebra)?;
    let engine = IdealEngine::new(&spec, &alg, budget)?;
    let ideals = engine.oracle()?.ideals();
    if cli.verbose {
        eprintln!("{} has {} ideals", alg.name(), ideals.len());
    }
    emit(&IdealsOutput {
        algebra: alg.name().to_string(),
        count: ideals.len(),
        ideals,
    });
    Ok(true)
}

#[derive(Serialize)]
struct CongruenceEntry {
    blocks: Vec<Vec<usize>>,
    kernel: Subset,
}

#[derive(Serialize)]
struct CongruencesOutput {
    algebra: String,
    count: usize,
    congruences: Vec<CongruenceEntry>,
}

fn congruences(cli: &Cli, budget: &Budget, target: &AlgebraArg) -> Outcome {
    let spec = load_spec(&target.variety)?;
    let alg = load_algebra_arg(&spec, &target.algebra)?;
    let engine = IdealEngine::new(&spec, &alg, budget)?;
    let zero = engine.zero();
    let mut entries: Vec<CongruenceEntry> = engine
        .oracle()?
        .congruences()
        .iter()
        .map(|p| CongruenceEntry {
            blocks: p.blocks(),
            kernel: p.block_of(zero),
        })
        .collect();
    entries.sort_by(|a, b| (a.blocks.len(), &a.blocks).cmp(&(b.blocks.len(), &b.blocks)).reverse());
    if cli.verbose {
        eprintln!("{} has {} congruences", alg.name(), entries.len());
    }
    emit(&CongruencesOutput {
        algebra: alg.name().to_string(),
        count: entries.len(),
        congruences: entries,
    });
    Ok(true)
}

#[derive(Serialize)]
struct PairCheck {
    a: usize,
    b: usize,
    related: bool,
    alpha_in_h: bool,
    a_in_image_of_b: bool,
    b_in_image_of_a: bool,
    agree: bool,
}

#[derive(Serialize)]
struct KernelCriteriaOutput {
    algebra: String,
    subset: Subset,
    congruence_is_sim: bool,
    agreement: bool,
    pairs: Vec<PairCheck>,
}

fn parse_pair(text: &str) -> Result<(usize, usize), Failed> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts[..] {
        [a, b] => match (a.parse(), b.parse()) {
            (Ok(a), Ok(b)) => Ok((a, b)),
            _ => Err(input_error(format!("`{text}` is not a pair of element indices"))),
        },
        _ => Err(input_error(format!("`{text}` is not a pair a,b"))),
    }
}

fn kernel_criteria(cli: &Cli, budget: &Budget, target: &AlgebraArg, subset: &str, pair: Option<&str>) -> Outcome {
    let spec = load_spec(&target.variety)?;
    let alg = load_algebra_arg(&spec, &target.algebra)?;
    let h = parse_subset(subset, &alg)?;
    let engine = IdealEngine::new(&spec, &alg, budget)?;
    let pairs: Vec<(usize, usize)> = match pair {
        Some(p) => vec![parse_pair(p)?],
        None => (0..alg.size()).flat_map(|a| (0..alg.size()).map(move |b| (a, b))).collect(),
    };
    let mut checks = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        let v = engine.kernel_criteria(&h, a, b)?;
        checks.push(PairCheck {
            a,
            b,
            related: v[0],
            alpha_in_h: v[1],
            a_in_image_of_b: v[2],
            b_in_image_of_a: v[3],
            agree: v.iter().all(|&x| x == v[0]),
        });
    }
    let congruence_is_sim = engine.congruence_is_sim(&h)?;
    let agreement = congruence_is_sim && checks.iter().all(|c| c.agree);
    if cli.verbose {
        let related = checks.iter().filter(|c| c.related).count();
        eprintln!("{} pairs checked, {related} related, agreement: {agreement}", checks.len());
    }
    emit(&KernelCriteriaOutput {
        algebra: alg.name().to_string(),
        subset: h,
        congruence_is_sim,
        agreement,
        pairs: checks,
    });
    Ok(agreement)
}

fn selftest(cli: &Cli, budget: Budget, filter: Option<&str>, fixtures: Option<&Path>) -> Outcome {
    if let Some(f) = filter {
        resolve_filter(f)?;
    }
    let report = run_selftest(filter, fixtures, budget)?;
    for s in &report.suites {
        let status = if s.ok() { "ok" } else { "FAILED" };
        eprintln!("{:<26} {:>7} cases {:>5} failed  {status}", s.name, s.cases, s.failed);
        if !s.ok() || cli.verbose {
            for f in &s.failures {
                eprintln!("    {f}");
            }
        }
    }
    emit(&report);
    Ok(report.ok)
}
