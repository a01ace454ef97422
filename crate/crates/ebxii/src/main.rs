use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Parser, Subcommand};
use ebxii::commands::{self, CurveKind, FitRequest};
use ebxii::syntax::{self, TieSpec};
use ebxii::{config, report, study};
use ebxii_core::{Criterion, ParamName, Variant};

#[derive(Parser)]
#[command(
    name = "ebxii",
    version,
    about = "Extended Burr XII distributions: evaluate, sample, fit, simulate, compare"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum-likelihood fit; writes a JSON report.
    Fit {
        #[arg(long = "g", value_parser = parse_variant)]
        variant: Variant,
        #[arg(long)]
        data: PathBuf,
        /// NAME=VALUE, repeatable.
        #[arg(long, value_parser = parse_assignment)]
        fix: Vec<(ParamName, f64)>,
        /// NAME=K*NAME or NAME=NAME, repeatable.
        #[arg(long, value_parser = parse_tie)]
        tie: Vec<TieSpec>,
        /// NAME=VALUE starting value, repeatable.
        #[arg(long, value_parser = parse_assignment)]
        init: Vec<(ParamName, f64)>,
        /// Fit PIVOT - x instead of x.
        #[arg(long, allow_hyphen_values = true)]
        reflect: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quantiles at the given probability levels.
    Quantile {
        #[arg(long = "g", value_parser = parse_variant)]
        variant: Variant,
        /// a=..,b=..,c=..,d=..[,eps=..][,p=..]
        #[arg(long)]
        params: String,
        #[arg(long = "v", value_delimiter = ',', required = true)]
        levels: Vec<f64>,
    },
    /// CSV of cdf, pdf or hazard on an equally spaced grid.
    Curve {
        #[arg(long = "g", value_parser = parse_variant)]
        variant: Variant,
        #[arg(long)]
        params: String,
        #[arg(long)]
        what: CurveKind,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long = "n")]
        points: usize,
    },
    /// Random draws, one per line.
    Sample {
        #[arg(long = "g", value_parser = parse_variant, default_value = "g0")]
        variant: Variant,
        #[arg(long, default_value = "a=3,b=0.8,c=1,d=1.5")]
        params: String,
        #[arg(long = "n")]
        count: usize,
        /// Defaults to EBXII_SEED, else 0.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parameter-recovery study; CSV on stdout.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Ranked table of fit reports and published rows.
    Compare {
        #[arg(long, num_args = 1..)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        published: Option<PathBuf>,
        #[arg(long, value_parser = parse_criterion, default_value = "bic")]
        by: Criterion,
    },
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: ebxii_core::Error| e.to_string())
}

fn parse_assignment(s: &str) -> Result<(ParamName, f64), String> {
    syntax::parse_assignment(s).map_err(|e| e.to_string())
}

fn parse_tie(s: &str) -> Result<TieSpec, String> {
    syntax::parse_tie(s).map_err(|e| e.to_string())
}

fn parse_criterion(s: &str) -> Result<Criterion, String> {
    s.parse()
        .map_err(|_| format!("expected aic or bic, got '{s}'"))
}

/// Exit code 2 signals a fit that did not converge.
fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Fit {
            variant,
            data,
            fix,
            tie,
            init,
            reflect,
            out,
        } => {
            let req = FitRequest {
                variant,
                data,
                fixes: fix,
                ties: tie,
                inits: init,
                reflect,
            };
            let outcome = commands::run_fit(&req)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            std::fs::write(&out, outcome.report.to_json() + "\n")
                .map_err(|e| anyhow!("cannot write {}: {e}", out.display()))?;
            eprint!("{}", outcome.report.text());
            if outcome.report.converged {
                Ok(0)
            } else {
                eprintln!("error: the fit did not converge");
                Ok(2)
            }
        }
        Command::Quantile {
            variant,
            params,
            levels,
        } => {
            print!("{}", commands::quantile_table(variant, &params, &levels)?);
            Ok(0)
        }
        Command::Curve {
            variant,
            params,
            what,
            from,
            to,
            points,
        } => {
            print!(
                "{}",
                commands::curve_table(variant, &params, what, from, to, points)?
            );
            Ok(0)
        }
        Command::Sample {
            variant,
            params,
            count,
            seed,
        } => {
            let seed = match seed {
                Some(s) => s,
                None => commands::default_seed()?,
            };
            print!("{}", commands::sample_lines(variant, &params, count, seed)?);
            Ok(0)
        }
        Command::Simulate { scenario, json } => {
            let scenarios = config::load_scenarios(&scenario, commands::default_seed()?)?;
            let rep = study::run_all(&scenarios, 0);
            print!("{}", report::study_csv(&rep));
            if let Some(path) = json {
                std::fs::write(&path, report::study_json(&rep) + "\n")
                    .map_err(|e| anyhow!("cannot write {}: {e}", path.display()))?;
            }
            Ok(0)
        }
        Command::Compare {
            reports,
            published,
            by,
        } => {
            print!(
                "{}",
                commands::compare_table(&reports, published.as_deref(), by)?
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
