//! Command-line front end: CSV and JSON artifacts for every computation.

mod output;
mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::involution::GammaMap;
use crate::moments::{sweep, theorem_check_with, uniform_grid, PipelineConfig, Verdict};
use crate::qspecial::{DensityModel, QContext};
use crate::transform::{default_nodes, WCoefficients};

pub use output::{emit, fmt_f64, json_string, Cell, Table};
pub use verify::{verify, Rule, VerifyItem, VerifyReport, MIN_LEVEL};

/// Smallest and largest `q` accepted on the command line.
pub const Q_MIN: f64 = 1e-6;
pub const Q_MAX: f64 = 1.0 - 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "qconv", version, about = "q-Gaussian involution and fourth-moment experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write data to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Format of tabular output (density, gamma, wcoeff, sweep).
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Quadrature tolerance; also sets the default truncation order K.
    #[arg(long, global = true, env = "QCONV_TOL_QUAD", default_value_t = QContext::DEFAULT_TOL_QUAD)]
    pub tol_quad: f64,

    /// Truncation tolerance of infinite q-products.
    #[arg(long, global = true, env = "QCONV_TOL_PRODUCT", default_value_t = QContext::DEFAULT_TOL_PRODUCT)]
    pub tol_product: f64,

    /// Truncation order K of the w-coefficients [default: max(24, ceil(ln tol_quad / ln q))].
    #[arg(long, global = true, env = "QCONV_K")]
    pub truncation: Option<usize>,

    /// Quadrature nodes for the w-coefficients [default: max(256, K + 64)].
    #[arg(long, global = true, env = "QCONV_NODES")]
    pub nodes: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density of the q-Gaussian law on a uniform grid of [-L, L]; CSV `x,pdf`.
    Density {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// The involution gamma on a uniform grid of [-L, L]; CSV `x,gamma`.
    Gamma {
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Column n = 1 of the w-coefficients; CSV `k,w_k1,contrib`.
    Wcoeff {
        #[arg(long)]
        q: f64,
        /// Largest k [default: the truncation order K].
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Fourth moments of X0 + X1 and gamma(X0) + X1 as a JSON report.
    Moment4 {
        #[arg(long)]
        q: f64,
    },
    /// Theorem pipeline over a uniform q-grid; CSV `q,m4_sum,m4_gamma,s,margin,tail`.
    Sweep {
        #[arg(long, default_value_t = 0.02)]
        qmin: f64,
        #[arg(long, default_value_t = 0.98)]
        qmax: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Every invariant suite at one q, as JSON with pass/fail per item.
    Verify {
        #[arg(long)]
        q: f64,
        /// Level cutoff of the two-mode Fock space.
        #[arg(long, default_value_t = 6)]
        level: usize,
    },
}

/// Exit status of a finished run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Verification failed or the theorem verdict was not strict.
    Failed,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Failed => 1,
        }
    }
}

/// Exit code for an error: 2 for configuration problems, 1 otherwise.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::InvalidQ(_) | Error::Config(_) | Error::OutOfDomain { .. } => 2,
        _ => 1,
    }
}

fn check_q(name: &str, q: f64) -> Result<f64> {
    if (Q_MIN..=Q_MAX).contains(&q) {
        Ok(q)
    } else {
        Err(Error::Config(format!("--{name} = {q} must lie in [{Q_MIN}, {Q_MAX}]")))
    }
}

fn check_points(points: usize) -> Result<usize> {
    if points >= 2 {
        Ok(points)
    } else {
        Err(Error::Config(format!("--points must be at least 2, got {points}")))
    }
}

impl Cli {
    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            tol_product: self.tol_product,
            tol_quad: self.tol_quad,
            k_max: self.truncation,
            nodes: self.nodes,
        }
    }

    fn table_text(&self, table: &Table) -> Result<String> {
        match self.format {
            Format::Csv => Ok(table.to_csv()),
            Format::Json => table.to_json(),
        }
    }
}

fn grid(l: f64, points: usize) -> impl Iterator<Item = f64> {
    (0..points).map(move |i| {
        if i + 1 == points {
            l
        } else {
            -l + 2.0 * l * i as f64 / (points - 1) as f64
        }
    })
}

/// Executes the parsed command, writing data and returning the exit status.
pub fn run(cli: &Cli) -> Result<Status> {
    let config = cli.pipeline();
    let out = cli.output.as_deref();
    match cli.command {
        Command::Density { q, points } => {
            let ctx = config.context(check_q("q", q)?)?;
            let density = DensityModel::new(&ctx);
            let mut table = Table::new(&["x", "pdf"]);
            for x in grid(ctx.support(), check_points(points)?) {
                table.push(vec![Cell::Real(x), Cell::Real(density.evaluate(x))]);
            }
            emit(&cli.table_text(&table)?, out)?;
            Ok(Status::Success)
        }
        Command::Gamma { q, points } => {
            let ctx = config.context(check_q("q", q)?)?;
            let gamma = GammaMap::new(&ctx);
            let mut table = Table::new(&["x", "gamma"]);
            for x in grid(ctx.support(), check_points(points)?) {
                table.push(vec![Cell::Real(x), Cell::Real(gamma.eval(x)?)]);
            }
            emit(&cli.table_text(&table)?, out)?;
            Ok(Status::Success)
        }
        Command::Wcoeff { q, kmax } => {
            let ctx = config.context(check_q("q", q)?)?;
            let k = kmax.unwrap_or(ctx.k_max());
            if k == 0 {
                return Err(Error::Config("--kmax must be at least 1".into()));
            }
            let gamma = GammaMap::new(&ctx);
            let w = WCoefficients::build_with(&gamma, k, config.nodes.unwrap_or_else(|| default_nodes(k)))?;
            let mut table = Table::new(&["k", "w_k1", "contrib"]);
            for (k, (wk, contrib)) in w.column_one().into_iter().enumerate() {
                table.push(vec![Cell::Int(k), Cell::Real(wk), Cell::Real(contrib)]);
            }
            emit(&cli.table_text(&table)?, out)?;
            eprintln!("tail mass 1 - sum w_k1^2 [k]! = {:.3e}", w.diagnostics().tail_mass);
            Ok(Status::Success)
        }
        Command::Moment4 { q } => {
            let report = theorem_check_with(check_q("q", q)?, &config)?;
            emit(&json_string(&report)?, out)?;
            let verdict = report.diagnostics.verdict;
            if verdict == Verdict::Strict {
                Ok(Status::Success)
            } else {
                eprintln!("verdict: {verdict:?}");
                Ok(Status::Failed)
            }
        }
        Command::Sweep { qmin, qmax, steps } => {
            let (qmin, qmax) = (check_q("qmin", qmin)?, check_q("qmax", qmax)?);
            if steps == 0 || qmin > qmax {
                return Err(Error::Config("need --steps >= 1 and --qmin <= --qmax".into()));
            }
            let rows = sweep(&uniform_grid(qmin, qmax, steps), &config);
            let mut table = Table::new(&["q", "m4_sum", "m4_gamma", "s", "margin", "tail"]);
            let mut status = Status::Success;
            for r in &rows {
                table.push(
                    [r.q, r.m4_sum, r.m4_gamma, r.s, r.margin, r.tail]
                        .into_iter()
                        .map(Cell::Real)
                        .collect(),
                );
                if let Some(e) = &r.error {
                    eprintln!("q = {}: {e}", r.q);
                    status = Status::Failed;
                } else if r.verdict != Some(Verdict::Strict) {
                    eprintln!("q = {}: verdict {:?}", r.q, r.verdict);
                    status = Status::Failed;
                }
            }
            emit(&cli.table_text(&table)?, out)?;
            Ok(status)
        }
        Command::Verify { q, level } => {
            let report = verify(check_q("q", q)?, level, &config)?;
            emit(&json_string(&report)?, out)?;
            for item in report.failures() {
                eprintln!("FAIL {}: {:.3e} (tolerance {:.1e})", item.name, item.value, item.tolerance);
            }
            Ok(if report.all_pass { Status::Success } else { Status::Failed })
        }
    }
}
