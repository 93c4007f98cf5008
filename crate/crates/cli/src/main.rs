use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dpsan_core::dpaudit::AuditResult;
use dpsan_core::simlab::run;
use dpsan_core::{audit_mechanism, Bounds, LaplaceScale, MechanismKind, MomentReport, SimConfig, Study};

/// Differentially private sanitization of bounded statistics.
#[derive(Parser)]
#[command(name = "dpsan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation study and write replicate and summary CSVs.
    Sim(SimArgs),
    /// Print closed-form moments of the truncated and BIT mechanisms as CSV.
    Moments(MomentArgs),
    /// Audit the worst-case privacy loss of a mechanism; prints one CSV row.
    Audit(AuditArgs),
}

#[derive(Args)]
struct SimArgs {
    /// cov, prop or prop-ms
    study: Study,
    /// Comma-separated spec ids (cov: 1,2,3).
    #[arg(long)]
    spec: Option<String>,
    /// Comma-separated, strictly increasing sample sizes.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated privacy budgets.
    #[arg(long)]
    eps: Option<String>,
    /// Comma-separated mechanisms (trunc, bit).
    #[arg(long)]
    mech: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    /// Number of synthesis sets (prop-ms).
    #[arg(long)]
    m: Option<String>,
    /// Master seed. Falls back to the config file, then DPSAN_SEED.
    #[arg(long)]
    seed: Option<String>,
    /// Output directory [default: .]
    #[arg(long)]
    out: Option<String>,
    /// File of key=value lines using the flag names; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct MomentArgs {
    #[arg(long, allow_negative_numbers = true)]
    s: f64,
    #[arg(long, allow_negative_numbers = true)]
    c0: f64,
    #[arg(long, allow_negative_numbers = true)]
    c1: f64,
    #[arg(long)]
    lambda: f64,
}

#[derive(Args)]
struct AuditArgs {
    /// laplace, trunc or bit
    #[arg(long)]
    mech: MechanismKind,
    #[arg(long)]
    lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    c0: f64,
    #[arg(long, allow_negative_numbers = true)]
    c1: f64,
    #[arg(long)]
    delta1: f64,
    /// Grid steps across [c0, c1] (at least 100).
    #[arg(long, default_value_t = 1000)]
    grid: usize,
    /// Print the CSV header line first.
    #[arg(long)]
    header: bool,
}

fn sim(args: SimArgs) -> dpsan_core::Result<()> {
    let mut cfg = SimConfig::defaults(args.study);
    if let Ok(seed) = std::env::var("DPSAN_SEED") {
        cfg.apply("seed", &seed)?;
    }
    if let Some(path) = &args.config {
        cfg.apply_file_text(&std::fs::read_to_string(path)?)?;
    }
    let flags = [
        ("spec", &args.spec),
        ("n", &args.n),
        ("eps", &args.eps),
        ("mech", &args.mech),
        ("reps", &args.reps),
        ("m", &args.m),
        ("seed", &args.seed),
        ("out", &args.out),
    ];
    for (key, value) in flags {
        if let Some(value) = value {
            cfg.apply(key, value)?;
        }
    }
    let out = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let report = run(&cfg)?;
    let (replicates, summary) = report.write_csvs(&out)?;
    println!("{}", replicates.display());
    println!("{}", summary.display());
    Ok(())
}

fn moments(args: MomentArgs) -> dpsan_core::Result<()> {
    let r = MomentReport::new(args.s, LaplaceScale::new(args.lambda)?, Bounds::new(args.c0, args.c1)?)?;
    println!("s,c0,c1,lambda,mu_trunc,mu_bit,m2_trunc,m2_bit,bias_trunc,bias_bit,var_trunc,var_bit");
    println!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        args.s,
        args.c0,
        args.c1,
        args.lambda,
        r.mu_trunc,
        r.mu_bit,
        r.m2_trunc,
        r.m2_bit,
        r.bias_trunc,
        r.bias_bit,
        r.var_trunc,
        r.var_bit
    );
    Ok(())
}

fn audit(args: AuditArgs) -> dpsan_core::Result<()> {
    let result = audit_mechanism(
        args.mech,
        LaplaceScale::new(args.lambda)?,
        Bounds::new(args.c0, args.c1)?,
        args.delta1,
        args.grid,
    )?;
    if args.header {
        println!("{}", AuditResult::CSV_HEADER);
    }
    println!("{}", result.to_csv_row());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sim(args) => sim(args),
        Command::Moments(args) => moments(args),
        Command::Audit(args) => audit(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
