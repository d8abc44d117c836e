use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use tmotive::experiments::{self, Command, MotiveKind, RunConfig};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Periods,
    Siegel,
    DualCheck,
    IsoCheck,
    Dseries,
    Eliminate,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Motive {
    Ma,
    Mt,
}

/// Certified experiments on small-rank t-motives.
#[derive(Debug, Parser)]
#[command(name = "tmotive", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Size of the constant field.
    #[arg(long, default_value_t = 2)]
    q: u64,
    /// Working precision in units of 1/e.
    #[arg(long)]
    precision: Option<i64>,
    /// Ramification index e.
    #[arg(long)]
    ram: Option<i64>,
    /// T-order for `eliminate`, number of d_i for `dseries`.
    #[arg(long, default_value_t = 8)]
    order: usize,
    #[arg(long, value_enum, default_value_t = Motive::Mt)]
    motive: Motive,
    /// Parameter a as a series literal, e.g. `t + w*t^(2)`.
    #[arg(long)]
    a: Option<String>,
    /// Second parameter a′ for `iso-check`.
    #[arg(long)]
    a2: Option<String>,
    /// Entry s11 for `dual-check`; `pi1` and `pi2` are accepted.
    #[arg(long)]
    s11: Option<String>,
    #[arg(long, default_value_t = 4)]
    kmax: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random instances per sweep.
    #[arg(long, default_value_t = 5)]
    instances: usize,
    /// Write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the summary.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Periods => Command::Periods,
        Cmd::Siegel => Command::Siegel,
        Cmd::DualCheck => Command::DualCheck,
        Cmd::IsoCheck => Command::IsoCheck,
        Cmd::Dseries => Command::Dseries,
        Cmd::Eliminate => Command::Eliminate,
        Cmd::All => Command::All,
    };
    let cfg = RunConfig {
        precision: args.precision,
        ram: args.ram,
        order: args.order,
        motive: match args.motive {
            Motive::Ma => MotiveKind::Ma,
            Motive::Mt => MotiveKind::Mt,
        },
        a: args.a,
        a2: args.a2,
        s11: args.s11,
        kmax: args.kmax,
        seed: args.seed,
        instances: args.instances,
        ..RunConfig::new(command, args.q)
    };
    let report = experiments::run(&cfg);
    let json = report.to_json();
    if let Some(path) = &args.out {
        if let Err(e) = std::fs::write(path, format!("{json}\n")) {
            eprintln!("cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if args.json {
        println!("{json}");
    } else {
        print!("{}", report.summary());
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
