//! `qgalois`: classify the Galois group of a basic hypergeometric system and
//! verify the identities behind the classification.
//!
//! Exit codes: 0 success, 1 a check failed (or a numerical error occurred),
//! 2 usage error, 3 resonant or borderline parameters.

mod param;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qgalois::classify::classify_in;
use qgalois::hyperseries::HGParams;
use qgalois::verify::verify_all;
use qgalois::{Annulus, Error, QContext};

use param::ParamSpec;
use report::{CheckRow, Params, Report};

#[derive(Parser, Debug)]
#[command(
    name = "qgalois",
    version,
    about = "Galois groups of 2phi1 q-difference systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Case tag and Galois group.
    Classify(Common),
    /// Run the verification suite.
    Verify(Common),
    /// Classification, witnesses and verification together.
    Report(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Base q, 0 < |q| < 1 (cartesian or polar R@THETA).
    #[arg(long, allow_hyphen_values = true)]
    q: ParamSpec,
    /// Numerator parameter a (number or spiral such as q^0.3, -q^3/2, zeta_4^1*q^2).
    #[arg(long, allow_hyphen_values = true)]
    a: ParamSpec,
    /// Numerator parameter b.
    #[arg(long, allow_hyphen_values = true)]
    b: ParamSpec,
    /// Denominator parameter c.
    #[arg(long, allow_hyphen_values = true)]
    c: ParamSpec,
    /// Seed of the sample-point generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerance of the membership predicates.
    #[arg(long, default_value_t = 1e-7)]
    tol_mem: f64,
    /// Largest root-of-unity order recognised in scalar closures.
    #[arg(long = "nmax-unity", default_value_t = 256)]
    nmax_unity: u64,
    /// Emit JSON.
    #[arg(long)]
    json: bool,
    /// Sampling annulus `r1,r2` (default |q|,1).
    #[arg(long, value_parser = parse_annulus)]
    annulus: Option<Annulus>,
}

fn parse_annulus(s: &str) -> Result<Annulus, String> {
    let (r1, r2) = s
        .split_once(',')
        .ok_or_else(|| format!("expected r1,r2, got '{s}'"))?;
    let r1: f64 = r1.trim().parse().map_err(|e| format!("{e}"))?;
    let r2: f64 = r2.trim().parse().map_err(|e| format!("{e}"))?;
    Annulus::new(r1, r2).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Refused(Error),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedResonant(_) | Error::BorderlineMembership { .. } => {
                Failure::Refused(e)
            }
            Error::InvalidContext(_) => Failure::Usage(e.to_string()),
            other => Failure::Numeric(other),
        }
    }
}

fn setup(args: &Common) -> Result<(QContext, HGParams, Annulus, Params), Failure> {
    let usage = |flag: &str, e: &dyn std::fmt::Display| Failure::Usage(format!("--{flag}: {e}"));
    let q = args.q.as_q().map_err(|e| usage("q", &e))?;
    if !(args.tol_mem > 0.0 && args.tol_mem < 1e-4) {
        return Err(usage("tol-mem", &"must lie in (0, 1e-4)"));
    }
    if args.nmax_unity == 0 {
        return Err(usage("nmax-unity", &"must be positive"));
    }
    let ctx = QContext::new(q)
        .map_err(|e| usage("q", &e))?
        .with_tol_mem(args.tol_mem)
        .with_n_max_unity(args.nmax_unity);
    let a = args.a.resolve(&ctx).map_err(|e| usage("a", &e))?;
    let b = args.b.resolve(&ctx).map_err(|e| usage("b", &e))?;
    let c = args.c.resolve(&ctx).map_err(|e| usage("c", &e))?;
    let p = HGParams::new(&ctx, a, b, c)?;
    let annulus = args.annulus.unwrap_or_else(|| Annulus::fundamental(&ctx));
    let params = Params {
        q,
        a: a.value,
        b: b.value,
        c: c.value,
        exact: args.a.is_exact() && args.b.is_exact() && args.c.is_exact(),
    };
    Ok((ctx, p, annulus, params))
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let (name, args) = match &cli.command {
        Command::Classify(a) => ("classify", a),
        Command::Verify(a) => ("verify", a),
        Command::Report(a) => ("report", a),
    };
    let (ctx, p, annulus, params) = setup(args)?;
    let report = match name {
        "classify" => Report::new(name, params, &classify_in(&ctx, &p, &annulus)?),
        _ => {
            let v = verify_all(&ctx, &p, &annulus, args.seed)?;
            let mut r = Report::new(name, params, &v.classification);
            r.seed = Some(v.seed);
            r.checks = v.checks.iter().map(CheckRow::from).collect();
            if name == "report" {
                r.witnesses = Some(v.classification.descriptor.witnesses.items.clone());
            }
            r
        }
    };
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = match &cli.command {
        Command::Classify(a) | Command::Verify(a) | Command::Report(a) => a.json,
    };
    match run(&cli) {
        Ok(r) => {
            let out = if json {
                r.to_json() + "\n"
            } else {
                r.to_text()
            };
            // a closed pipe is not an error of ours
            let _ = std::io::stdout().write_all(out.as_bytes());
            if r.any_failed() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Refused(e)) => {
            eprintln!("refused: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
