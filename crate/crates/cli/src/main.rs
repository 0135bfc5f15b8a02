//! `ltcg`: command-line front end for ltcg-core.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ltcg_core::Rational;

#[derive(Parser, Debug)]
#[command(name = "ltcg", version, about = "Locally testable codes and Cayley graphs over F2^h")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomised checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Exact rational arithmetic (default).
    #[arg(long, global = true, conflicts_with = "float")]
    pub exact: bool,
    /// Double-precision arithmetic.
    #[arg(long, global = true)]
    pub float: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Length, dimension, distances and covering radius of a code.
    CodeInfo { code: PathBuf },
    /// Smoothness and soundness of a tester.
    TesterInfo {
        tester: PathBuf,
        /// Also report soundness against min(d(v, C), cap).
        #[arg(long)]
        cap: Option<usize>,
    },
    /// ℓ-fold convolution of a tester, checked against the closed form.
    Boost {
        tester: PathBuf,
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boost to a (1/4t, 1/16ct)-tester.
    CovradiusBoost {
        tester: PathBuf,
        /// Distortion bound c with δ ≥ ε/c.
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tester minimising ε/δ, with its LP certificate.
    OptimalTester {
        code: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cayley graph of a code (parity-check columns as generators).
    FromCode {
        code: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Code of a Cayley graph given by generators.
    ToCode {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cayley graph of a tester, with the eigenvalue–rejection check.
    Graph {
        tester: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the spectrum-generator conditions.
    VerifySg {
        graph: PathBuf,
        sg: PathBuf,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        d: usize,
    },
    /// Spectrum generator of a tester.
    SgFromLtc {
        tester: PathBuf,
        #[arg(long)]
        graph_out: Option<PathBuf>,
        #[arg(long)]
        sg_out: Option<PathBuf>,
    },
    /// Code and tester of a spectrum generator.
    LtcFromSg {
        graph: PathBuf,
        sg: PathBuf,
        #[arg(long)]
        code_out: Option<PathBuf>,
        #[arg(long)]
        tester_out: Option<PathBuf>,
    },
    /// Small-set expansion against the hypercontractive bound.
    SseProbe {
        graph: PathBuf,
        sg: PathBuf,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        #[arg(long)]
        d: usize,
        /// Number of sampled sets.
        #[arg(long, default_value_t = 1000)]
        sets: usize,
    },
    /// 2-4 hypercontractivity on random low-degree polynomials.
    Hypercon {
        /// Functionals; the standard basis of F2^h when omitted.
        sg: Option<PathBuf>,
        #[arg(long, required_unless_present = "sg")]
        h: Option<usize>,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Distortion of a cut embedding into a Cayley graph.
    Distortion { embedding: PathBuf, graph: PathBuf },
    /// Linear tester from a cut embedding.
    Linearize {
        embedding: PathBuf,
        code: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower bound (d⊥/n)·t on the distortion.
    KnBound { code: PathBuf },
    /// Check ε/δ ≥ kd/3n for a basis tester.
    BasisBound { tester: PathBuf },
    /// Write the standard code zoo and its testers.
    Corpus { outdir: PathBuf },
}

fn emit(report: &report::Report) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{}", report.to_json());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = if cli.global.float {
        commands::run::<f64>(&cli)
    } else {
        commands::run::<Rational>(&cli)
    };
    match outcome {
        Ok(report) => {
            emit(&report);
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("ltcg: {e:#}");
            match e.downcast_ref::<ltcg_core::Error>() {
                Some(core) if core.is_identity_failure() => {
                    let mut report = report::Report::new(commands::name(&cli.command));
                    report.pass = false;
                    report.set("error", core.to_string());
                    emit(&report);
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}
