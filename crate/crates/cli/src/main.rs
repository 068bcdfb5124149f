//! `clonecert` command line. Exit codes: 0 ok, 1 usage or parse error, 2 validation or
//! precondition failure, 3 internal inconsistency.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use clonecert::Error;

#[derive(Parser, Debug)]
#[command(
    name = "clonecert",
    version,
    about = "Maximality of Pol{rho,sigma} below Pol rho for central relations"
)]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Search budget (nodes for separator searches, compositions for closures).
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Check that a relation is central.
    Validate { file: PathBuf },
    /// Print the center of a relation.
    Center { file: PathBuf },
    /// Print the maximal chains of a central relation.
    Chains { file: PathBuf },
    /// Build a relation derived from a pair.
    Derive {
        rho: PathBuf,
        sigma: PathBuf,
        /// Constructor name, e.g. `gamma_t` or `beta_chain`.
        #[arg(long)]
        kind: String,
        /// Parameter as `name=value`; repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, usize)>,
        /// `strict` or `repeats`; defaults to the constructor's own mode.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Decide which condition, if any, makes Pol{rho,sigma} maximal in Pol rho.
    Classify { rho: PathBuf, sigma: PathBuf },
    /// Search a certificate of non-maximality.
    Certify {
        rho: PathBuf,
        sigma: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_arity: usize,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate file; exits 0 when every clause holds, 1 otherwise.
    Verify {
        cert: PathBuf,
        /// Check against this pair instead of the one recorded in the certificate.
        #[arg(long, requires = "sigma")]
        rho: Option<PathBuf>,
        #[arg(long, requires = "rho")]
        sigma: Option<PathBuf>,
    },
    /// Rebuild a target polymorphism of rho from Pol{rho,sigma} and g.
    Interpolate {
        rho: PathBuf,
        sigma: PathBuf,
        /// Operation file, `k=.. arity=.. table=..` line, or a bare table such as `1,1,1`.
        #[arg(long)]
        g: String,
        #[arg(long)]
        target: String,
    },
    /// Bounded clone closure of generators, or a saturation probe for a pair.
    Closure {
        /// One operation per line, or a JSON array.
        #[arg(long, conflicts_with_all = ["rho", "sigma"])]
        gens: Option<PathBuf>,
        /// Domain size when the generator file is empty.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 2)]
        max_arity: usize,
        /// Print member counts only.
        #[arg(long)]
        stats: bool,
        #[arg(long, requires = "sigma")]
        rho: Option<PathBuf>,
        #[arg(long, requires = "rho")]
        sigma: Option<PathBuf>,
    },
    /// List totally reflexive, totally symmetric relations.
    Enumerate {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        arity: usize,
        /// Keep central relations only.
        #[arg(long)]
        central: bool,
        /// Keep the least relation of each orbit under permutations of E_k.
        #[arg(long)]
        dedup_iso: bool,
    },
    /// Classify every ordered pair of central relations on E_k.
    Survey {
        #[arg(long)]
        k: usize,
        /// Largest relation arity taking part.
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        /// Largest separator arity.
        #[arg(long, default_value_t = 2)]
        separator_arity: usize,
        /// Write `survey.json` and one certificate file per certified row here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Also search certificates for pairs classified as maximal.
        #[arg(long)]
        cross_check: bool,
        #[arg(long)]
        no_interpolation: bool,
    },
}

fn parse_param(s: &str) -> Result<(String, usize), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v = v.parse().map_err(|_| format!("bad value in `{s}`"))?;
    Ok((k.to_string(), v))
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: 1,
            msg: msg.into(),
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            msg: msg.into(),
        }
    }

    pub fn inconsistent(msg: impl Into<String>) -> Self {
        Failure {
            code: 3,
            msg: msg.into(),
        }
    }

    pub fn context(mut self, what: &str) -> Self {
        self.msg = format!("{what}: {}", self.msg);
        self
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Argument(_) => Failure::usage(e.to_string()),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
