//! `seqspace`: evaluate functionals on sequence specs, approximate metrics,
//! factor bounded-query functionals, and run the norm falsifier.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage or parse error (including
//! unknown functionals), 3 missing modulus, 4 cord mismatch, 5 query budget
//! exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::json;

use seqspace::experiments::{
    factor, falsify_norm, verify_cord_fixed, verify_cord_invariance, FactorError, NoClaim,
    NormCounterexample, Verdict,
};
use seqspace::functionals::{
    self, lookup_candidate, metric_full, metric_lower, product_metric_d, Metric, MetricError,
};
use seqspace::machine::{run_with_budget, Functional, MachineError, SecondOrderPoly};
use seqspace::names::{SequenceName, SequenceSpec, Style};
use seqspace::numerics::Dyadic;

const DEFAULT_BUDGET: usize = 1_000_000;
const DECIMAL_PLACES: usize = 10;

#[derive(Parser, Debug)]
#[command(name = "seqspace", version, about = "Exact-real computation over sequence space")]
struct Cli {
    /// Emit JSON instead of a human-readable summary.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a functional on the name of a spec and print value and trace.
    Eval {
        functional: String,
        spec: PathBuf,
        #[arg(short = 'n', long, default_value_t = 8)]
        precision: u32,
        /// Representation seed; 0 is the standard name.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Representation style (standard, left, seeded:<n>); overrides --seed.
        #[arg(long)]
        style: Option<Style>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Approximate d1, d2 (truncated or full) or the product metric D.
    Metric {
        metric: MetricArg,
        x: PathBuf,
        y: PathBuf,
        /// Exact lower bound from indices 0..=M (d1, d2).
        #[arg(long, conflicts_with = "full")]
        truncate: Option<u64>,
        /// Full approximation using the specs' moduli (d1, d2).
        #[arg(long)]
        full: bool,
        #[arg(short = 'n', long, default_value_t = 8)]
        precision: u32,
        /// Take the square root of d2.
        #[arg(long)]
        sqrt: bool,
    },
    /// Factor a bounded-query functional through finitely many coordinates.
    Factor {
        functional: String,
        /// Directory of sample spec files (*.json).
        samples: PathBuf,
        /// Query bound; defaults to the functional's declared bound.
        #[arg(short = 'l', long = "l")]
        ell: Option<usize>,
        #[arg(short = 'n', long, default_value_t = 8)]
        precision: u32,
    },
    /// Run the no-norm adversary against a candidate.
    Falsify {
        candidate: String,
        #[arg(short = 'n', long, default_value_t = 8)]
        precision: u32,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Check cord invariance across names and implementations, or fixedness across inputs.
    Cord {
        functional: String,
        #[arg(required = true)]
        specs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = CordMode::Invariance)]
        mode: CordMode,
        /// Largest precision checked; all of 0..=max-n are run.
        #[arg(long, default_value_t = 8)]
        max_n: u32,
        /// Seeds of the seeded names (invariance mode).
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3])]
        seeds: Vec<u64>,
    },
    /// Evaluate a second-order polynomial at x against a size function.
    Sop {
        expr: String,
        #[arg(short = 'x', long)]
        x: u64,
        /// Size function: id, succ, double, square, cube, or spec:<path> for the size of a standard name.
        #[arg(short = 'f', long, default_value = "id")]
        size: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricArg {
    D1,
    D2,
    #[value(name = "D")]
    ProductD,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CordMode {
    Invariance,
    Fixed,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn other(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

type Outcome = Result<(String, u8), Failure>;

fn read_spec(path: &Path) -> Result<SequenceSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    SequenceSpec::from_json(&text)
        .map_err(|e| Failure::usage(format!("malformed spec {}: {e}", path.display())))
}

fn read_samples(dir: &Path) -> Result<Vec<SequenceSpec>, Failure> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::usage(format!("no *.json specs in {}", dir.display())));
    }
    paths.iter().map(|p| read_spec(p)).collect()
}

fn functional(id: &str) -> Result<Box<dyn Functional>, Failure> {
    functionals::lookup(id).ok_or_else(|| Failure::usage(format!("unknown functional `{id}`")))
}

fn decimal(d: &Dyadic) -> String {
    d.to_decimal(DECIMAL_PLACES)
}

fn render(json_mode: bool, value: serde_json::Value, human: String) -> String {
    if json_mode {
        serde_json::to_string_pretty(&value).expect("values serialize")
    } else {
        human
    }
}

fn cmd_eval(
    json_mode: bool,
    id: &str,
    spec: &Path,
    n: u32,
    style: Style,
    budget: usize,
) -> Outcome {
    let f = functional(id)?;
    let spec = read_spec(spec)?;
    let name = SequenceName::with_style(spec, style);
    match run_with_budget(f.as_ref(), &name, n, budget) {
        Ok(r) => {
            let value = json!({
                "value": r.output,
                "decimal": decimal(&r.output),
                "trace": r.trace,
            });
            let human = format!(
                "value: {} ({})\nfunctional: {}\nname: {}\nn: {}\nqueries: {}\ncord: {:?}\ncost: {}",
                r.output,
                decimal(&r.output),
                r.trace.functional,
                r.trace.name,
                n,
                r.trace.queries.len(),
                r.trace.cord,
                r.trace.cost
            );
            Ok((render(json_mode, value, human), 0))
        }
        Err(e) => {
            let code = match e.error {
                MachineError::QueryBudgetExceeded(_) => 5,
                _ => 1,
            };
            Err(Failure {
                code,
                message: format!("{e}\npartial trace: {}", e.partial.to_json()),
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_metric(
    json_mode: bool,
    metric: MetricArg,
    x: &Path,
    y: &Path,
    truncate: Option<u64>,
    full: bool,
    n: u32,
    sqrt: bool,
) -> Outcome {
    let (sx, sy) = (read_spec(x)?, read_spec(y)?);
    let (label, value, exact) = match (metric, truncate) {
        (MetricArg::ProductD, _) => {
            let d = product_metric_d(&SequenceName::standard(sx), &SequenceName::standard(sy), n);
            ("D".to_string(), d.to_string(), decimal(&d))
        }
        (m, Some(trunc)) => {
            let m = if matches!(m, MetricArg::D1) { Metric::D1 } else { Metric::D2 };
            let q = metric_lower(m, &sx, &sy, trunc);
            (format!("{m} truncated at {trunc}"), q.to_string(), q.to_decimal(DECIMAL_PLACES))
        }
        (m, None) => {
            if !full {
                return Err(Failure::usage("d1/d2 need --truncate <M> or --full"));
            }
            let m = if matches!(m, MetricArg::D1) { Metric::D1 } else { Metric::D2 };
            let d = metric_full(m, &sx, &sy, n, sqrt).map_err(|e| match e {
                MetricError::MissingModulus(_) => Failure {
                    code: 3,
                    message: e.to_string(),
                },
            })?;
            let label = if sqrt && m == Metric::D2 { "sqrt(d2)".to_string() } else { m.to_string() };
            (label, d.to_string(), decimal(&d))
        }
    };
    let out = json!({
        "metric": label,
        "x": path_label(x),
        "y": path_label(y),
        "n": n,
        "value": value,
        "decimal": exact,
    });
    let human = format!("{label}: {value} ({exact})");
    Ok((render(json_mode, out, human), 0))
}

fn path_label(p: &Path) -> String {
    p.display().to_string()
}

fn cmd_factor(json_mode: bool, id: &str, samples: &Path, ell: Option<usize>, n: u32) -> Outcome {
    let f = functional(id)?;
    let specs = read_samples(samples)?;
    match factor(f.as_ref(), ell, &specs, n) {
        Ok((_, report)) => {
            let verdict = if report.equivalent() { "PASS" } else { "FAIL" };
            let human = format!(
                "functional: {}\nell: {}\ncoordinates: {:?}\nsamples: {}\nequivalence: {verdict}",
                report.functional, report.ell, report.coordinates, report.samples
            );
            let code = if report.equivalent() { 0 } else { 1 };
            let value = serde_json::to_value(&report).expect("report serializes");
            Ok((render(json_mode, value, human), code))
        }
        Err(FactorError::CordMismatch(m)) => {
            let body = serde_json::to_string_pretty(&*m).expect("mismatch serializes");
            Err(Failure {
                code: 4,
                message: format!(
                    "CordMismatch: {} (n={}) vs {} (n={})\n{body}",
                    m.spec_a, m.trace_a.n, m.spec_b, m.trace_b.n
                ),
            })
        }
        Err(FactorError::MissingQueryBound(id)) => Err(Failure::usage(format!(
            "functional `{id}` declares no query bound; pass --l"
        ))),
        Err(FactorError::Run(e)) if matches!(e.error, MachineError::QueryBudgetExceeded(_)) => {
            Err(Failure {
                code: 5,
                message: e.to_string(),
            })
        }
        Err(e) => Err(Failure::other(e.to_string())),
    }
}

fn counterexample_summary(ce: &NormCounterexample) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "candidate: {}", ce.candidate);
    let _ = writeln!(s, "n: {}", ce.n);
    let _ = writeln!(s, "verdict: {:?}", ce.verdict);
    match ce.max_queried_coord {
        Some(k) => {
            let _ = writeln!(s, "max queried coordinate: {k}");
        }
        None => {
            let _ = writeln!(s, "max queried coordinate: none");
        }
    }
    if let Some(w) = &ce.witness_spike {
        let _ = writeln!(s, "witness: {w}");
    }
    let _ = writeln!(s, "scaling factor: {}", ce.scaling_factor);
    if let Some((a, b)) = &ce.observed_outputs {
        let _ = writeln!(s, "outputs: F(y_1) = {} ({}), F(y_l) = {} ({})", a, decimal(a), b, decimal(b));
    }
    if let Some((a, b)) = &ce.claimed {
        let _ = writeln!(s, "claimed: {a}, {b}");
    }
    let _ = writeln!(s, "traces coincide: {}", ce.traces_coincide);
    let _ = write!(s, "verified: {}", ce.verify());
    s
}

fn cmd_falsify(json_mode: bool, id: &str, n: u32, budget: usize) -> Outcome {
    let plain;
    let boxed;
    let candidate: &dyn functionals::NormCandidate = match lookup_candidate(id) {
        Some(c) => {
            boxed = c;
            boxed.as_ref()
        }
        None => {
            plain = functional(id)?;
            &NoClaim(plain.as_ref()) as &dyn functionals::NormCandidate
        }
    };
    let ce = falsify_norm(candidate, n, budget).map_err(|e| Failure::other(e.to_string()))?;
    let code = if ce.verdict == Verdict::QueryBudgetExceeded { 5 } else { 0 };
    let value = serde_json::to_value(&ce).expect("counterexample serializes");
    Ok((render(json_mode, value, counterexample_summary(&ce)), code))
}

fn cmd_cord(
    json_mode: bool,
    id: &str,
    specs: &[PathBuf],
    mode: CordMode,
    max_n: u32,
    seeds: &[u64],
) -> Outcome {
    let f = functional(id)?;
    let specs: Vec<SequenceSpec> = specs.iter().map(|p| read_spec(p)).collect::<Result<_, _>>()?;
    let precisions: Vec<u32> = (0..=max_n).collect();
    match mode {
        CordMode::Invariance => {
            let alt = functionals::alternative(id);
            let mut impls: Vec<&dyn Functional> = vec![f.as_ref()];
            if let Some(a) = &alt {
                impls.push(a.as_ref());
            }
            let mut styles = vec![Style::Standard, Style::LeftApprox];
            styles.extend(seeds.iter().filter(|&&s| s != 0).map(|&s| Style::Seeded(s)));
            let reports: Vec<_> = specs
                .iter()
                .map(|s| verify_cord_invariance(&impls, s, &styles, &precisions))
                .collect();
            let passed = reports.iter().all(|r| r.passed());
            let mut human = String::new();
            for r in &reports {
                let _ = writeln!(
                    human,
                    "{} on {}: {} ({} runs, {} disagreements)",
                    r.implementations.join(" + "),
                    r.spec,
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.runs,
                    r.disagreements.len()
                );
                for (n, cord) in &r.cords {
                    let _ = writeln!(human, "  n={n}: cord {cord:?}");
                }
            }
            let value = serde_json::to_value(&reports).expect("reports serialize");
            Ok((render(json_mode, value, human.trim_end().to_string()), if passed { 0 } else { 1 }))
        }
        CordMode::Fixed => {
            let r = verify_cord_fixed(f.as_ref(), &specs, &precisions);
            let mut human = format!(
                "{}: {}\ncommon cord: {:?}\nmax coordinate: {:?}",
                r.functional,
                if r.passed() { "PASS" } else { "FAIL" },
                r.common_cord,
                r.max_coordinate
            );
            for v in &r.violations {
                let _ = write!(human, "\nviolation: {}", serde_json::to_string(v).expect("serializes"));
            }
            let code = if r.passed() { 0 } else { 1 };
            let value = serde_json::to_value(&r).expect("report serializes");
            Ok((render(json_mode, value, human), code))
        }
    }
}

fn cmd_sop(json_mode: bool, expr: &str, x: u64, size: &str) -> Outcome {
    let p: SecondOrderPoly = expr
        .parse()
        .map_err(|e| Failure::usage(format!("{e}")))?;
    let name = match size.strip_prefix("spec:") {
        Some(path) => Some(SequenceName::standard(read_spec(Path::new(path))?)),
        None => None,
    };
    let f: Box<dyn Fn(&BigUint) -> BigUint> = match (size, name) {
        (_, Some(name)) => Box::new(move |m: &BigUint| name.size_big(m)),
        ("id", None) => Box::new(|m: &BigUint| m.clone()),
        ("succ", None) => Box::new(|m: &BigUint| m + 1u32),
        ("double", None) => Box::new(|m: &BigUint| m * 2u32),
        ("square", None) => Box::new(|m: &BigUint| m * m),
        ("cube", None) => Box::new(|m: &BigUint| m * m * m),
        (other, None) => return Err(Failure::usage(format!("unknown size function `{other}`"))),
    };
    let v = p.eval(f.as_ref(), &BigUint::from(x));
    let value = json!({ "polynomial": p.to_string(), "x": x, "size": size, "value": v.to_string() });
    Ok((render(json_mode, value, format!("{p} at x={x} with f={size}: {v}")), 0))
}

fn dispatch(cli: &Cli) -> Outcome {
    let j = cli.json;
    match &cli.command {
        Command::Eval {
            functional,
            spec,
            precision,
            seed,
            style,
            budget,
        } => {
            let style = style.unwrap_or(if *seed == 0 { Style::Standard } else { Style::Seeded(*seed) });
            cmd_eval(j, functional, spec, *precision, style, *budget)
        }
        Command::Metric {
            metric,
            x,
            y,
            truncate,
            full,
            precision,
            sqrt,
        } => cmd_metric(j, *metric, x, y, *truncate, *full, *precision, *sqrt),
        Command::Factor {
            functional,
            samples,
            ell,
            precision,
        } => cmd_factor(j, functional, samples, *ell, *precision),
        Command::Falsify {
            candidate,
            precision,
            budget,
        } => cmd_falsify(j, candidate, *precision, *budget),
        Command::Cord {
            functional,
            specs,
            mode,
            max_n,
            seeds,
        } => cmd_cord(j, functional, specs, *mode, *max_n, seeds),
        Command::Sop { expr, x, size } => cmd_sop(j, expr, *x, size),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok((out, code)) => {
            println!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
