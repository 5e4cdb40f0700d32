use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use curvlab::error::Error;
use curvlab::io::{
    commutation_to_json, critical_from_str, read_table, read_tensor, report_to_json, tensor_to_json, to_pretty,
};
use curvlab::normalform4::reconstruct;
use curvlab::pure::{lcf_partition_check, pure_commute_check, CriterionReport};
use curvlab::scalar::{Rational, Scalar, DEFAULT_TOL};
use curvlab::thorpe::{commutes_with_star, thorpe_operator, weyl_operator};
use curvlab::verify::{render_report, render_timings, run_suite, SuiteConfig};
use curvlab::zoo::{self, Generated, ZooParams, CATALOG};

#[derive(Parser)]
#[command(name = "curvlab", version, about = "Curvature operator laboratory")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "CURVLAB_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List or emit catalog models.
    #[command(subcommand)]
    Zoo(ZooCommand),
    /// Run a single check on an input file.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Run the built-in verification suite.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand)]
enum ZooCommand {
    List,
    Emit {
        name: String,
        #[arg(long)]
        dim: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        /// Extra model parameter as `key=value`; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Rational,
    Float,
}

#[derive(Args)]
struct Numeric {
    #[arg(long, value_enum, default_value = "rational")]
    scalar: Backend,
    /// Relative tolerance for the float backend.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

impl Numeric {
    fn tol(&self) -> f64 {
        match self.scalar {
            Backend::Rational => 0.0,
            Backend::Float => self.tol,
        }
    }
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Does the middle-degree operator commute with the Hodge star?
    Commute {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        p: usize,
        /// Use the Weyl part instead of the full tensor.
        #[arg(long)]
        weyl: bool,
        #[command(flatten)]
        num: Numeric,
    },
    /// Hafnian criterion on a λ-table.
    Hafnian {
        #[arg(long)]
        table: PathBuf,
        #[command(flatten)]
        num: Numeric,
    },
    /// Elementary-symmetric criterion for additive eigenvalues `a_i + a_j`.
    Lcf {
        /// Comma-separated values, e.g. `1,1,0,-1/2`.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[command(flatten)]
        num: Numeric,
    },
    /// Rebuild a dim-4 tensor from critical data.
    Normalform {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        num: Numeric,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    Suite {
        /// Run only criteria whose name, tag or number matches.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Failure of the command itself, as opposed to a check that ran and failed.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Json(_) | Error::Io(_) | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

fn with_path(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| {
        let f = Failure::from(e);
        Failure { message: format!("{}: {}", path.display(), f.message), ..f }
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be positive");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Zoo(ZooCommand::List) => zoo_list(cli.json),
        Command::Zoo(ZooCommand::Emit { name, dim, lambda, seed, params, out }) => {
            let mut p = ZooParams::new();
            for (key, value) in [("dim", dim), ("lambda", lambda), ("seed", seed)] {
                if let Some(v) = value {
                    p.set(key, v.clone());
                }
            }
            for pair in params {
                p.set_pair(pair)?;
            }
            if zoo::catalog_item(name).is_none() {
                return Err(usage(format!("unknown model `{name}`; see `curvlab zoo list`")));
            }
            let text = to_pretty(&match zoo::build(name, &p)? {
                Generated::Exact(e) => tensor_to_json(&e.tensor),
                Generated::Float(e) => tensor_to_json(&e.tensor),
            });
            match out {
                Some(path) => fs::write(path, text).map_err(|e| with_path(path)(e.into()))?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Check(c) => match c {
            CheckCommand::Commute { input, p, weyl, num } => match num.scalar {
                Backend::Rational => check_commute::<Rational>(input, *p, *weyl, num.tol(), cli.json),
                Backend::Float => check_commute::<f64>(input, *p, *weyl, num.tol(), cli.json),
            },
            CheckCommand::Hafnian { table, num } => match num.scalar {
                Backend::Rational => check_hafnian::<Rational>(table, num.tol(), cli.json),
                Backend::Float => check_hafnian::<f64>(table, num.tol(), cli.json),
            },
            CheckCommand::Lcf { a, num } => match num.scalar {
                Backend::Rational => check_lcf::<Rational>(a, num.tol(), cli.json),
                Backend::Float => check_lcf::<f64>(a, num.tol(), cli.json),
            },
            CheckCommand::Normalform { input, num } => match num.scalar {
                Backend::Rational => check_normalform::<Rational>(input, num.tol(), cli.json),
                Backend::Float => check_normalform::<f64>(input, num.tol(), cli.json),
            },
        },
        Command::Verify(VerifyCommand::Suite { filter, seed }) => {
            let cfg = SuiteConfig { seed: *seed, filter: filter.clone() };
            let outcomes = run_suite(&cfg);
            if outcomes.is_empty() {
                return Err(usage(format!("no criterion matches `{}`", filter.as_deref().unwrap_or(""))));
            }
            if cli.json {
                let rows: Vec<Value> = outcomes
                    .iter()
                    .map(|o| json!({ "id": o.id, "name": o.name, "pass": o.pass, "detail": o.detail }))
                    .collect();
                let all = outcomes.iter().all(|o| o.pass);
                print!("{}", to_pretty(&json!({ "seed": seed, "pass": all, "criteria": rows })));
            } else {
                print!("{}", render_report(&outcomes));
            }
            eprint!("{}", render_timings(&outcomes));
            Ok(outcomes.iter().all(|o| o.ok()))
        }
    }
}

fn zoo_list(as_json: bool) -> Outcome {
    let mut rows = Vec::new();
    for item in CATALOG {
        let model = zoo::build(item.name, &ZooParams::new())?;
        let tags: Vec<String> = model.tags().iter().map(|t| t.to_string()).collect();
        let params: Vec<String> = item.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        rows.push((item, model.dim(), tags, params));
    }
    if as_json {
        let v: Vec<Value> = rows
            .iter()
            .map(|(item, dim, tags, params)| {
                json!({ "name": item.name, "dim": dim, "tags": tags, "params": params, "summary": item.summary })
            })
            .collect();
        print!("{}", to_pretty(&Value::Array(v)));
    } else {
        for (item, dim, tags, params) in rows {
            println!("{:<26} d={:<2} {:<48} {}", item.name, dim, tags.join(","), params.join(" "));
        }
    }
    Ok(true)
}

fn check_commute<S: Scalar>(input: &Path, p: usize, weyl: bool, tol: f64, as_json: bool) -> Outcome {
    let rm = read_tensor::<S>(input).map_err(with_path(input))?;
    let op = if weyl { weyl_operator(&rm, p)? } else { thorpe_operator(&rm, p)? };
    let r = commutes_with_star(&op, tol)?;
    let what = if weyl { "W" } else { "C" };
    if as_json {
        let mut v = commutation_to_json(&r);
        v["operator"] = json!(format!("{what}{p}"));
        print!("{}", to_pretty(&v));
    } else if r.commutes {
        println!("PASS: {what}{p} commutes with the Hodge star");
    } else {
        println!("FAIL: {what}{p} does not commute with the Hodge star (max violation {:e})", r.max_violation);
        if let Some((i, o)) = r.witness {
            println!("witness: input {i}, output {o}");
        }
    }
    Ok(r.commutes)
}

fn print_report<S: Scalar>(r: &CriterionReport<S>, left: &str, right: &str, as_json: bool) {
    if as_json {
        print!("{}", to_pretty(&report_to_json(r, left, right)));
        return;
    }
    let set = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    for p in &r.pairs {
        println!(
            "{} I={{{}}} Ic={{{}}} {left}={} {right}={}",
            if p.pass { "ok  " } else { "FAIL" },
            set(&p.subset),
            set(&p.complement),
            p.value.to_repr(),
            p.complement_value.to_repr()
        );
    }
    let failed = r.failures().count();
    if r.pass {
        println!("PASS: {} pairs", r.pairs.len());
    } else {
        println!("FAIL: {failed} of {} pairs differ", r.pairs.len());
    }
}

fn check_hafnian<S: Scalar>(table: &Path, tol: f64, as_json: bool) -> Outcome {
    let t = read_table::<S>(table).map_err(with_path(table))?;
    let r = pure_commute_check(&t, tol)?;
    print_report(&r, "hafI", "hafIc", as_json);
    Ok(r.pass)
}

fn check_lcf<S: Scalar>(list: &str, tol: f64, as_json: bool) -> Outcome {
    let a: Vec<S> = list
        .split(',')
        .enumerate()
        .map(|(i, s)| S::parse_scalar(s.trim()).map_err(|e| usage(format!("--a entry {i}: {e}"))))
        .collect::<Result<_, _>>()?;
    let r = lcf_partition_check(&a, tol)?;
    print_report(&r, "sigmaI", "sigmaIc", as_json);
    Ok(r.pass)
}

fn check_normalform<S: Scalar>(input: &Path, tol: f64, as_json: bool) -> Outcome {
    let text = fs::read_to_string(input).map_err(|e| with_path(input)(e.into()))?;
    let data = critical_from_str::<S>(&text).map_err(with_path(input))?;
    match reconstruct(&data, tol) {
        Ok(rm) => {
            if as_json {
                print!("{}", to_pretty(&tensor_to_json(&rm)));
            } else {
                println!("PASS: reconstructed the curvature tensor");
                for ([i, j, k, l], v) in rm.components() {
                    println!("R({i},{j},{k},{l}) = {}", v.to_repr());
                }
            }
            Ok(true)
        }
        Err(e @ Error::Inconsistent(_)) => {
            if as_json {
                print!("{}", to_pretty(&json!({ "pass": false, "reason": e.to_string() })));
            } else {
                println!("FAIL: {e}");
            }
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}
