use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lucp_core::algebra::FiniteGroupTable;
use lucp_core::instance::{galois, load_instance, twisted, InstanceFile};
use lucp_core::report::{run, Command};
use lucp_core::{Error, Result};

#[derive(Parser)]
#[command(name = "lucp", version, about = "Exact checks for crossed products over rings with local units")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Load and validate an instance file.
    Validate(RunArgs),
    /// Twisted cohomology tables in degrees 1 to 3.
    Cohomology(RunArgs),
    /// Structure constants of the crossed product and its twists.
    CrossedProduct(RunArgs),
    /// Check the seven-term sequence junction by junction.
    SequenceCheck(RunArgs),
    /// Everything above in one bundle.
    Report(RunArgs),
    /// Write a builtin instance file.
    Generate {
        #[command(subcommand)]
        kind: Builtin,
        /// Output file; stdout when omitted.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Directory for the JSON bundle and the text summary.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for sampled searches; LUCP_SEED takes precedence.
    #[arg(long)]
    seed: Option<u64>,
    /// Largest search space enumerated exhaustively.
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Subcommand)]
enum Builtin {
    /// Skew group ring of F_{p^n} over its Frobenius group.
    Galois {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
    },
    /// Twisted group algebra of a cyclic group over F_p.
    Twisted {
        #[arg(long)]
        p: u64,
        /// Order of the cyclic group.
        #[arg(long)]
        order: usize,
        /// Cocycle table as JSON rows, e.g. [[1,1],[1,2]]; trivial when omitted.
        #[arg(long)]
        cocycle: Option<String>,
    },
}

fn seed_override() -> Result<Option<u64>> {
    match std::env::var("LUCP_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| Error::Parse(format!("LUCP_SEED={s} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn execute(command: Command, args: &RunArgs) -> Result<i32> {
    let inst = load_instance(&args.instance)?;
    let mut caps = inst.caps.clone();
    if let Some(seed) = seed_override()?.or(args.seed) {
        caps.seed = seed;
    }
    if let Some(cap) = args.cap {
        caps.exhaustive = cap;
    }
    let bundle = run(command, &inst, &caps)?;
    let summary = bundle.summary();
    print!("{summary}");
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        write(&dir.join(format!("{}.json", command.name())), &bundle.to_json())?;
        write(&dir.join(format!("{}.txt", command.name())), &summary)?;
    }
    Ok(bundle.exit_code())
}

fn generate(kind: &Builtin, out: Option<&Path>) -> Result<i32> {
    let file: InstanceFile = match kind {
        Builtin::Galois { p, n } => galois(*p, *n)?,
        Builtin::Twisted { p, order, cocycle } => {
            let table = match cocycle {
                Some(s) => serde_json::from_str(s).map_err(|e| Error::Parse(format!("cocycle: {e}")))?,
                None => vec![vec![1; *order]; *order],
            };
            twisted(*p, &FiniteGroupTable::cyclic(*order), &table)?
        }
    };
    match out {
        Some(path) => write(path, &file.to_json())?,
        None => print!("{}", file.to_json()),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Cmd::Validate(a) => execute(Command::Validate, a),
        Cmd::Cohomology(a) => execute(Command::Cohomology, a),
        Cmd::CrossedProduct(a) => execute(Command::CrossedProduct, a),
        Cmd::SequenceCheck(a) => execute(Command::SequenceCheck, a),
        Cmd::Report(a) => execute(Command::Report, a),
        Cmd::Generate { kind, out } => generate(kind, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(Error::Validation { pointer, message }) => {
            eprintln!("error: validation failed at {pointer}: {message}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
