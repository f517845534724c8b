//! The `subent` command line.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 on bad usage.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use subent_core::{
    case1_optimal, doubling, embed, entangled_fidelity, eof, eof_restricted, find_bifurcation,
    isotropic, minimize_objective, overlap, perm_symmetric_state, symmetric_closed_form,
    validate_density, BipartiteState, CMatrix, Decomposition, ExtremalDecomposition,
    OptimizationResult, OptimizerConfig, StateVector, SubalgebraSpec, C64,
};

use crate::io::{read_state, DecompositionJson, FormatError};
use crate::output::{emit_scan, OutputError, OutputFormat, Report};
use crate::scan::{scan, symmetric_numeric, Method};
use crate::verify;

/// Bisection tolerance on `F` for `bifurcate`.
const BIFURCATION_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "subent",
    version,
    about = "Entanglement with respect to a subalgebra: closed forms and numerical roofs"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Qubit state [[a, b], [b*, 1-a]] against the diagonal subalgebra.
    Case1 {
        #[arg(long)]
        a: f64,
        #[arg(long = "b-re", default_value_t = 0.0, allow_negative_numbers = true)]
        b_re: f64,
        #[arg(long = "b-im", default_value_t = 0.0, allow_negative_numbers = true)]
        b_im: f64,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Permutation-symmetric state with fidelity F in dimension d.
    Symmetric {
        #[arg(long)]
        d: usize,
        #[arg(long = "F")]
        f: f64,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sweep F over a grid and tabulate closed form, numerical roof and
    /// minimizing orbit angles.
    Scan {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long = "f-lo", default_value_t = 0.0)]
        f_lo: f64,
        #[arg(long = "f-hi", default_value_t = 1.0)]
        f_hi: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Locate the fidelity where the optimal qutrit orbit splits in two.
    Bifurcate {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long = "f-lo", default_value_t = 0.0)]
        f_lo: f64,
        #[arg(long = "f-hi", default_value_t = 0.2)]
        f_hi: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Entanglement of formation of the isotropic state.
    EofIsotropic {
        #[arg(long)]
        d: usize,
        #[arg(long = "F")]
        f: f64,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare a state's diagonal entanglement with the entanglement of
    /// formation of its doubling.
    Double {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long = "F", required_unless_present = "state")]
        f: Option<f64>,
        /// Read the single-system state from a JSON file instead.
        #[arg(long, conflicts_with = "f")]
        state: Option<PathBuf>,
        /// Keep the search on the diagonal class with at most d² members.
        #[arg(long)]
        restricted: bool,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Embed the optimal qubit pair into local dimension d.
    Embed {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long)]
        a: f64,
        #[arg(long = "b-re", default_value_t = 0.0, allow_negative_numbers = true)]
        b_re: f64,
        #[arg(long = "b-im", default_value_t = 0.0, allow_negative_numbers = true)]
        b_im: f64,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[command(flatten)]
        opt: OptimizerArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the acceptance suite; exits 1 if any check fails.
    Verify,
}

#[derive(Debug, Clone, Args)]
struct OptimizerArgs {
    /// Ensemble size; defaults to the state dimension squared for single
    /// systems and to the state dimension for two-party states.
    #[arg(long)]
    length: Option<usize>,
    #[arg(long, default_value_t = OptimizerConfig::DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = OptimizerConfig::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = OptimizerConfig::DEFAULT_TOL)]
    tol: f64,
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
}

impl OptimizerArgs {
    fn config(&self, default_length: usize) -> Result<OptimizerConfig, CliError> {
        let mut cfg = OptimizerConfig::for_dim(1)
            .with_length(self.length.unwrap_or(default_length))
            .with_restarts(self.restarts)
            .with_seed(self.seed)
            .with_tol(self.tol);
        if let Some(n) = self.max_iters {
            cfg = cfg.with_max_iters(n);
        }
        if self.length == Some(0) {
            return Err(CliError::usage("--length", "must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(CliError::usage("--restarts", "must be at least 1"));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(CliError::usage("--tol", "must be positive"));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{flag}: {message}")]
    Usage { flag: &'static str, message: String },
    #[error("{}: {}", .0.name(), .0)]
    Compute(#[from] subent_core::Error),
    #[error("{}: {}", .0.name(), .0)]
    Input(#[from] FormatError),
    #[error("output: {0}")]
    Output(#[from] OutputError),
    #[error("{failed} acceptance check(s) failed")]
    Verify { failed: usize },
}

impl CliError {
    fn usage(flag: &'static str, message: impl Into<String>) -> Self {
        CliError::Usage {
            flag,
            message: message.into(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            _ => 1,
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn check_unit(flag: &'static str, x: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(CliError::usage(flag, format!("{x} is outside [0, 1]")))
    }
}

fn check_dim(flag: &'static str, d: usize, min: usize) -> Result<usize, CliError> {
    if d >= min {
        Ok(d)
    } else {
        Err(CliError::usage(
            flag,
            format!("{d} is below the minimum {min}"),
        ))
    }
}

fn sink(out: &OutputArgs) -> Result<Box<dyn Write>, CliError> {
    Ok(match &out.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(OutputError::from)?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(report: &Report, out: &OutputArgs) -> Result<(), CliError> {
    report.emit(out.format, sink(out)?)?;
    Ok(())
}

fn attach_decomposition(
    report: Report,
    name: &'static str,
    result: Option<&OptimizationResult>,
) -> Report {
    match result {
        Some(r) => report.attach(name, DecompositionJson::from(&r.decomposition)),
        None => report,
    }
}

fn numeric_columns(report: Report, result: Option<&OptimizationResult>) -> Report {
    report
        .col(
            "converged",
            result
                .map(|r| Value::from(r.converged))
                .unwrap_or(Value::Null),
        )
        .col("restart_spread", result.map(|r| r.restart_spread))
}

fn difference(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    a.zip(b).map(|(a, b)| a - b)
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Case1 {
            a,
            b_re,
            b_im,
            method,
            opt,
            out,
        } => {
            check_unit("--a", a)?;
            let b = C64::new(b_re, b_im);
            let closed = if method.closed() {
                Some(case1_optimal(a, b)?)
            } else {
                None
            };
            let numeric = if method.numeric() {
                let rho = validate_density(CMatrix::from_row_major(
                    2,
                    2,
                    vec![C64::new(a, 0.0), b, b.conj(), C64::new(1.0 - a, 0.0)],
                )?)?;
                Some(minimize_objective(
                    &rho,
                    SubalgebraSpec::Diagonal,
                    &opt.config(4)?,
                )?)
            } else {
                None
            };
            let e_closed = closed.as_ref().map(|c| c.0);
            let e_numeric = numeric.as_ref().map(|r| r.value);
            let mut report = Report::new()
                .col("a", a)
                .col("b_re", b_re)
                .col("b_im", b_im)
                .col("E_closed", e_closed)
                .col("lambda", closed.as_ref().map(|c| c.2))
                .col("E_numeric", e_numeric)
                .col("gap", difference(e_numeric, e_closed));
            report = numeric_columns(report, numeric.as_ref());
            if let Some((_, dec, _)) = &closed {
                report = report.attach("closed_decomposition", DecompositionJson::from(dec));
            }
            emit(
                &attach_decomposition(report, "numeric_decomposition", numeric.as_ref()),
                &out,
            )
        }
        Command::Symmetric {
            d,
            f,
            method,
            opt,
            out,
        } => {
            check_dim("--d", d, 2)?;
            check_unit("--F", f)?;
            let e_closed = if method.closed() {
                symmetric_closed_form(d, f)?
            } else {
                None
            };
            let numeric = if method.numeric() {
                Some(symmetric_numeric(d, f, &opt.config(d * d)?)?)
            } else {
                None
            };
            let e_numeric = numeric.as_ref().map(|r| r.value);
            let report = Report::new()
                .col("d", d)
                .col("F", f)
                .col("E_closed", e_closed)
                .col("E_numeric", e_numeric)
                .col("gap", difference(e_numeric, e_closed));
            let report = numeric_columns(report, numeric.as_ref());
            emit(
                &attach_decomposition(report, "decomposition", numeric.as_ref()),
                &out,
            )
        }
        Command::Scan {
            d,
            f_lo,
            f_hi,
            steps,
            method,
            opt,
            out,
        } => {
            check_dim("--d", d, 2)?;
            check_unit("--f-lo", f_lo)?;
            check_unit("--f-hi", f_hi)?;
            if f_hi < f_lo {
                return Err(CliError::usage("--f-hi", "must not be below --f-lo"));
            }
            if steps == 0 {
                return Err(CliError::usage("--steps", "must be at least 1"));
            }
            let rows = scan(d, f_lo, f_hi, steps, method, &opt.config(d * d)?)?;
            emit_scan(&rows, out.format, sink(&out)?)?;
            Ok(())
        }
        Command::Bifurcate { d, f_lo, f_hi, out } => {
            if d != 3 {
                return Err(CliError::usage(
                    "--d",
                    "the orbit bifurcation is only tracked for d = 3",
                ));
            }
            check_unit("--f-lo", f_lo)?;
            check_unit("--f-hi", f_hi)?;
            if f_hi <= f_lo {
                return Err(CliError::usage("--f-hi", "must exceed --f-lo"));
            }
            let f_star = find_bifurcation(f_lo, f_hi, BIFURCATION_TOL)?;
            let x_star = (d as f64 * f_star - 1.0) / (d as f64 - 1.0);
            emit(
                &Report::new().col("F_star", f_star).col("x_star", x_star),
                &out,
            )
        }
        Command::EofIsotropic { d, f, opt, out } => {
            check_dim("--d", d, 2)?;
            check_unit("--F", f)?;
            let state = isotropic(d, f)?;
            let result = eof(&state, &opt.config(d * d)?)?;
            let report = Report::new()
                .col("d", d)
                .col("F", f)
                .col("E_numeric", result.value);
            let report = numeric_columns(report, Some(&result));
            emit(
                &attach_decomposition(report, "decomposition", Some(&result)),
                &out,
            )
        }
        Command::Double {
            d,
            f,
            state,
            restricted,
            opt,
            out,
        } => {
            let rho = match (&state, f) {
                (Some(path), _) => read_state(path)?,
                (None, Some(f)) => {
                    perm_symmetric_state(check_dim("--d", d, 2)?, check_unit("--F", f)?)?
                }
                (None, None) => {
                    return Err(CliError::usage("--F", "either --F or --state is required"))
                }
            };
            let d = rho.dim();
            let fidelity = overlap(&rho, &StateVector::uniform(d))?;
            let diagonal = minimize_objective(&rho, SubalgebraSpec::Diagonal, &opt.config(d * d)?)?;
            let doubled = doubling(&rho);
            let cfg = opt.config(d * d)?;
            let two_party = if restricted {
                eof_restricted(&doubled, &cfg)?
            } else {
                eof(&doubled, &cfg)?
            };
            let report = Report::new()
                .col("d", d)
                .col("F", fidelity)
                .col("restricted", restricted)
                .col("E_diagonal", diagonal.value)
                .col("E_doubled", two_party.value)
                .col("gap", two_party.value - diagonal.value);
            let report = numeric_columns(report, Some(&two_party));
            emit(
                &attach_decomposition(report, "decomposition", Some(&two_party)),
                &out,
            )
        }
        Command::Embed {
            d,
            a,
            b_re,
            b_im,
            method,
            opt,
            out,
        } => {
            check_dim("--d", d, 3)?;
            check_unit("--a", a)?;
            let n = d - 1;
            let (e_case1, dec, lambda) = case1_optimal(a, C64::new(b_re, b_im))?;
            let embedded = dec
                .decomposers()
                .iter()
                .map(|w| embed(w.amplitudes()[0], w.amplitudes()[1], n))
                .collect::<Result<Vec<_>, _>>()?;
            let fidelities = embedded
                .iter()
                .map(entangled_fidelity)
                .collect::<Result<Vec<_>, _>>()?;
            let pair = ExtremalDecomposition::new(dec.weights().to_vec(), embedded)?;
            let e_pair = pair.objective(SubalgebraSpec::FactorA { d_a: d, d_b: d })?;
            let numeric = if method.numeric() {
                let state = BipartiteState::new(d, pair.reconstruct()?)?;
                Some(eof_restricted(&state, &opt.config(d * d)?)?)
            } else {
                None
            };
            let e_numeric = numeric.as_ref().map(|r| r.value);
            let report = Report::new()
                .col("d", d)
                .col("lambda", lambda)
                .col("fidelity_1", fidelities[0])
                .col("fidelity_2", fidelities.get(1).copied())
                .col("E_case1", e_case1)
                .col("ln_offset", e_pair - e_case1)
                .col("E_pair", e_pair)
                .col("E_numeric", e_numeric)
                .col("gap", e_numeric.map(|e| e - e_pair));
            let report = numeric_columns(report, numeric.as_ref());
            emit(
                &attach_decomposition(report, "decomposition", numeric.as_ref()),
                &out,
            )
        }
        Command::Verify => {
            let mut stdout = io::stdout().lock();
            let mut failed = 0;
            for (id, check) in verify::CRITERIA {
                let outcome = check();
                failed += usize::from(!outcome.passed);
                writeln!(stdout, "{}", outcome.line(id)).map_err(OutputError::from)?;
            }
            if failed > 0 {
                Err(CliError::Verify { failed })
            } else {
                Ok(())
            }
        }
    }
}
