//! `chuilab`: run energy, bound, sweep, search and check experiments and
//! write seeded JSON or CSV reports.

mod output;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use chui_core::bounds::{make_bound_report, property_suite, Property};
use chui_core::geometry::{fibonacci_sphere_config, uniform_circle_config, weighted_arc_config, ChargeConfiguration};
use chui_core::optimizer::{minimize_positions, SearchMethod, SearchSettings};
use chui_core::quadrature::{chui_energy, defect_for_length, two_pole_l1, QuadratureSpec};
use chui_core::verify::{run_all, VerifyOptions};
use chui_core::{Error, Execution};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use output::{Envelope, Format, Table};

#[derive(Parser)]
#[command(name = "chuilab", version, about = "Energy integrals of weighted charges in the unit ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Configuration JSON file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// N unit charges: roots of unity (d = 2) or a Fibonacci sphere (d = 3)
    #[arg(long, global = true)]
    uniform: Option<usize>,
    /// Comma-separated positive weights, placed on weighted arcs (d = 2) or
    /// a Fibonacci sphere (d = 3)
    #[arg(long, global = true, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    #[arg(long, global = true, default_value_t = 2)]
    dim: usize,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long = "rel-tol", global = true, default_value_t = 1e-3)]
    rel_tol: f64,
    #[arg(long = "max-evals", global = true, default_value_t = 50_000_000)]
    max_evals: u64,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Run on the calling thread only
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Energy of a configuration
    Energy,
    /// Energy with every applicable bound and verdict
    Bounds,
    /// Single-fraction defect over arc lengths 2π·2^{−j}
    DefectSweep {
        #[arg(long, default_value_t = 10)]
        jmax: i32,
    },
    /// Two-pole integral for poles 1 and e^{iδ}, δ = 2^{−j}
    Prop14Sweep {
        #[arg(long, default_value_t = 10)]
        jmax: i32,
    },
    /// Randomized checks of the proof inequalities
    LemmaSuite {
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        dims: Vec<usize>,
    },
    /// Search for low-energy positions at fixed weights
    Optimize {
        #[arg(long, default_value_t = 300)]
        budget: u64,
        #[arg(long, default_value_t = 2)]
        restarts: usize,
        /// Also write the iterates as JSON lines
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run the full check suite
    VerifyAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Ok,
    Violation,
    NonConvergence,
}

/// Failures mapped to exit codes.
enum Failure {
    Input(String),
    NonConvergence(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } => Failure::NonConvergence(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl Common {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn spec(&self) -> Result<QuadratureSpec, Failure> {
        let mut spec = QuadratureSpec::default().with_tolerance(self.rel_tol).with_seed(self.seed);
        spec.max_evals = self.max_evals;
        spec.execution = self.execution();
        spec.validate()?;
        Ok(spec)
    }

    fn configuration(&self) -> Result<ChargeConfiguration, Failure> {
        let given = [self.config.is_some(), self.uniform.is_some(), self.weights.is_some()];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(Failure::Input("give exactly one of --config, --uniform, --weights".into()));
        }
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            return Ok(ChargeConfiguration::from_json(&text)?);
        }
        let weights = match (self.uniform, &self.weights) {
            (Some(n), _) if self.dim == 2 => return Ok(uniform_circle_config(n)?),
            (Some(n), _) => vec![1.0; n],
            (None, Some(w)) => w.clone(),
            (None, None) => unreachable!(),
        };
        match self.dim {
            2 => Ok(weighted_arc_config(&weights)?.0),
            3 => {
                let base = fibonacci_sphere_config(weights.len())?;
                let charges = base
                    .charges()
                    .iter()
                    .zip(&weights)
                    .map(|(c, w)| (c.position.clone(), *w))
                    .collect();
                Ok(ChargeConfiguration::new(3, charges)?)
            }
            d => Err(Failure::Input(format!("generated layouts exist for d = 2 or 3, got {d}"))),
        }
    }

    fn weights(&self) -> Result<Vec<f64>, Failure> {
        match (self.uniform, &self.weights, &self.config) {
            (Some(n), None, None) => Ok(vec![1.0; n]),
            (None, Some(w), None) => Ok(w.clone()),
            (None, None, Some(_)) => Ok(self.configuration()?.weights()),
            _ => Err(Failure::Input("give exactly one of --config, --uniform, --weights".into())),
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let c = &cli.common;
    let started = Instant::now();
    let spec = c.spec()?;
    let (name, result, table, outcome) = match &cli.command {
        Command::Energy => {
            let config = c.configuration()?;
            let r = chui_energy(&config, &spec)?;
            let mut t = Table::new(&["value", "err", "evals", "converged"]);
            t.row(vec![r.value.into(), r.error.into(), r.evals.into(), r.converged.into()]);
            let outcome = if r.converged { Outcome::Ok } else { Outcome::NonConvergence };
            let result = json!({"dimension": config.dimension(), "charges": config.len(), "energy": r});
            ("energy", result, t, outcome)
        }
        Command::Bounds => {
            let config = c.configuration()?;
            let r = make_bound_report(&config, &spec)?;
            let mut t = Table::new(&[
                "energy", "err", "A", "B", "G", "ratio_lower", "ratio_upper", "lower_newman", "lower_theorem11",
                "upper_budget", "lemma41_lhs", "cauchy_ratio",
            ]);
            t.row(vec![
                r.energy.into(),
                r.err.into(),
                r.A.into(),
                r.B.into(),
                r.G.into(),
                r.ratio_lower.into(),
                r.ratio_upper.into(),
                r.lower_newman.into(),
                r.lower_theorem11.into(),
                r.upper_budget.into(),
                r.lemma41_lhs.into(),
                r.cauchy_ratio.into(),
            ]);
            let outcome = if r.any_violated() { Outcome::Violation } else { Outcome::Ok };
            ("bounds", serde_json::to_value(&r)?, t, outcome)
        }
        Command::DefectSweep { jmax } => {
            let mut t = Table::new(&["l", "defect", "defect_over_l", "err"]);
            let mut rows = Vec::new();
            for j in 0..=*jmax {
                let l = 2.0 * PI * 0.5f64.powi(j);
                let r = defect_for_length(l, &spec)?;
                require(&r)?;
                t.row(vec![l.into(), r.value.into(), (r.value / l).into(), r.error.into()]);
                rows.push(json!({"l": l, "defect": r.value, "defect_over_l": r.value / l, "err": r.error}));
            }
            ("defect-sweep", json!({"rows": rows}), t, Outcome::Ok)
        }
        Command::Prop14Sweep { jmax } => {
            let mut t = Table::new(&["delta", "value", "ratio", "err"]);
            let mut rows = Vec::new();
            let a = Complex64::new(1.0, 0.0);
            for j in 2..=*jmax {
                let delta = 0.5f64.powi(j);
                let r = two_pole_l1(a, Complex64::from_polar(1.0, delta), &spec)?;
                require(&r)?;
                let ratio = r.value / (delta + delta * (1.0 / delta).ln());
                t.row(vec![delta.into(), r.value.into(), ratio.into(), r.error.into()]);
                rows.push(json!({"delta": delta, "value": r.value, "ratio": ratio, "err": r.error}));
            }
            ("prop14-sweep", json!({"rows": rows}), t, Outcome::Ok)
        }
        Command::LemmaSuite { trials, dims } => {
            let mut t = Table::new(&["name", "dimension", "trials", "failures", "worst"]);
            let mut rows = Vec::new();
            let mut failures = 0;
            for &d in dims {
                for p in Property::ALL {
                    let s = property_suite(p, d, *trials, c.seed, c.execution())?;
                    failures += s.failures;
                    t.row(vec![s.name.clone().into(), s.dimension.into(), s.trials.into(), s.failures.into(), s.worst.into()]);
                    rows.push(s);
                }
            }
            let outcome = if failures > 0 { Outcome::Violation } else { Outcome::Ok };
            ("lemma-suite", json!({"suites": rows}), t, outcome)
        }
        Command::Optimize { budget, restarts, trace } => {
            let weights = c.weights()?;
            let mut settings = SearchSettings::new(SearchMethod::for_dimension(c.dim)?, c.seed, *budget);
            settings.restarts = *restarts;
            settings.spec = spec.clone();
            let result = minimize_positions(&weights, &settings)?;
            if let Some(path) = trace {
                std::fs::write(path, result.to_json_lines()?)?;
            }
            let mut t = Table::new(&["iter", "start", "energy", "err"]);
            for it in &result.iterates {
                t.row(vec![it.iter.into(), it.start.into(), it.energy.into(), it.err.into()]);
            }
            ("optimize", serde_json::to_value(&result)?, t, Outcome::Ok)
        }
        Command::VerifyAll => {
            let opts = VerifyOptions {
                seed: c.seed,
                execution: c.execution(),
            };
            let (report, _) = run_all(&opts)?;
            let mut t = Table::new(&["criterion", "name", "passed", "summary"]);
            for r in &report.criteria {
                eprintln!("criterion {:>2}: {} | {}", r.id, if r.passed { "PASS" } else { "FAIL" }, r.summary);
                t.row(vec![r.id.into(), r.name.clone().into(), r.passed.into(), r.summary.clone().into()]);
            }
            let outcome = if report.passed { Outcome::Ok } else { Outcome::Violation };
            ("verify-all", serde_json::to_value(&report)?, t, outcome)
        }
    };
    let envelope = Envelope::new(name, c.seed, &spec, result, started.elapsed());
    let text = match c.format {
        Format::Json => envelope.to_json()?,
        Format::Csv => envelope.to_csv(&table)?,
    };
    match &c.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(outcome)
}

fn require(r: &chui_core::QuadratureResult) -> Result<(), Failure> {
    if r.converged {
        Ok(())
    } else {
        Err(Failure::NonConvergence(format!(
            "quadrature did not converge after {} evaluations",
            r.evals
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Ok(Outcome::NonConvergence) => ExitCode::from(3),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::NonConvergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
