use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use zeus_core::check::{check_equiv, Verdict};
use zeus_core::formulagen::GenConfig;
use zeus_core::frontend::{load, merge_envs, parse_type, FrontendError, Instantiation};
use zeus_core::smt::{Solver, SolverConfig, DEFAULT_SOLVER};

mod corpus;

#[derive(Parser)]
#[command(name = "zeus", version, about = "Sound equivalence checking and clustering of ML programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether two programs are equivalent.
    Check(CheckArgs),
    /// Partition a directory of submissions into equivalence classes.
    Cluster(ClusterArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Solver command line; the script is sent on stdin.
    #[arg(long, env = "ZEUS_SOLVER", default_value = DEFAULT_SOLVER)]
    solver: String,
    /// Solver timeout per query, in seconds.
    #[arg(long, default_value_t = 5.0)]
    timeout: f64,
    /// Weak head reduction fuel.
    #[arg(long, default_value_t = zeus_core::rewrite::DEFAULT_WHNF_FUEL)]
    fuel: u64,
    /// Rule applications allowed per comparison.
    #[arg(long, default_value_t = GenConfig::default().budget)]
    budget: usize,
    /// Ground a type variable, e.g. `'a=int`. Repeatable.
    #[arg(long = "instantiate", value_name = "TYVAR=TYPE")]
    instantiate: Vec<String>,
}

impl Common {
    fn gen(&self) -> GenConfig {
        GenConfig { budget: self.budget, whnf_fuel: self.fuel, ..GenConfig::default() }
    }

    fn solver(&self, jobs: usize) -> Solver {
        Solver::new(SolverConfig::from_command_line(&self.solver, Duration::from_secs_f64(self.timeout)), jobs)
    }
}

#[derive(Args)]
struct CheckArgs {
    a: PathBuf,
    b: PathBuf,
    /// Top-level binding to compare.
    #[arg(long, default_value = "main")]
    entry: String,
    #[command(flatten)]
    common: Common,
    /// Print the generated formula.
    #[arg(long)]
    dump_formula: bool,
    /// Print the SMT-LIB script.
    #[arg(long)]
    dump_smt: bool,
    /// Print both core programs as JSON.
    #[arg(long)]
    dump_ast: bool,
}

#[derive(Args)]
struct ClusterArgs {
    /// A TOML manifest or a directory of `.sml` files.
    input: PathBuf,
    /// Top-level binding to compare; overrides the manifest.
    #[arg(long)]
    entry: Option<String>,
    #[command(flatten)]
    common: Common,
    /// Concurrent comparisons and solver processes.
    #[arg(long)]
    jobs: Option<usize>,
    /// Compare candidates with class representatives only.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    negative_caching: bool,
    /// Directory for report.json and report.txt.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub(crate) fn instantiation(specs: &[String]) -> Result<Instantiation, String> {
    let mut inst = Instantiation::new();
    for s in specs {
        let (var, ty) = s.split_once('=').ok_or_else(|| format!("--instantiate expects TYVAR=TYPE, got `{s}`"))?;
        let var = var.trim();
        let var = if var.starts_with('\'') { var.to_string() } else { format!("'{var}") };
        let ty = parse_type(ty.trim()).map_err(|e| format!("--instantiate {s}: {e}"))?;
        inst.insert(var, ty);
    }
    Ok(inst)
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn rendered(e: FrontendError, path: &Path, src: &str) -> String {
    e.render(&path.display().to_string(), src)
}

fn check(args: CheckArgs) -> Result<Verdict, String> {
    let inst = instantiation(&args.common.instantiate)?;
    let (sa, sb) = (read(&args.a)?, read(&args.b)?);
    let ta = load(&sa, &args.entry, &inst).map_err(|e| rendered(e, &args.a, &sa))?;
    let tb = load(&sb, &args.entry, &inst).map_err(|e| rendered(e, &args.b, &sb))?;
    if ta.ty != tb.ty {
        return Err(format!(
            "`{}` has type `{}` in {} but `{}` in {}",
            args.entry,
            ta.ty,
            args.a.display(),
            tb.ty,
            args.b.display()
        ));
    }
    let env = merge_envs(&ta.env, &tb.env).map_err(|e| e.to_string())?;
    let out = check_equiv(&ta.expr, &tb.expr, &ta.ty, &env, &args.common.gen(), &args.common.solver(1));
    // Output errors (a closed pipe, say) do not change the verdict.
    let mut w = std::io::stdout().lock();
    let _ = writeln!(w, "{}", out.verdict);
    let _ = writeln!(w, "time: {:.3}s", out.elapsed.as_secs_f64());
    let _ = writeln!(w, "solver: {:?}", out.solver);
    if out.exhausted {
        let _ = writeln!(w, "note: formula generation budget exhausted");
    }
    if args.dump_ast {
        let ast = serde_json::json!({ "type": ta.ty, "a": ta.expr, "b": tb.expr });
        let _ = writeln!(w, ";; ast\n{}", serde_json::to_string_pretty(&ast).map_err(|e| e.to_string())?);
    }
    if args.dump_formula {
        let _ = writeln!(w, ";; formula\n{}", out.formula);
    }
    if args.dump_smt {
        let _ = writeln!(w, ";; smt\n{}", out.script);
    }
    Ok(out.verdict)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(args) => check(args).map(|v| match v {
            Verdict::Equivalent => ExitCode::from(0),
            Verdict::NotProven => ExitCode::from(1),
        }),
        Command::Cluster(args) => corpus::run(args).map(|()| ExitCode::SUCCESS),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
