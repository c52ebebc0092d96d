//! The `simplex-cone` command line.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 negative geometric
//! verdict, 3 numerical failure.

pub mod instance;
pub mod report;

use std::ffi::OsString;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::convexity::{self, ProbeMode};
use crate::dual;
use crate::error::Error;
use crate::extremal::{self, MaximizeOptions, Objective};
use crate::simplex::{self, FaceId, Verdict};
use instance::{load_instance, InputRecord, Instance};
use report::{ErrorRecord, Report, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "simplex-cone", version, about = "Simplices in squared-edge-length coordinates")]
pub struct Cli {
    /// Positive-definiteness tolerance, relative to the largest Gram eigenvalue.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Structured JSON report (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Indented plain-text report.
    #[arg(long, global = true)]
    pretty: bool,
    /// Leave the timestamp out of the report.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Instance files hold plain edge lengths; square them on ingest.
    #[arg(long, global = true)]
    lengths: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether the squared lengths belong to a simplex.
    Validate {
        /// Instance file, `-` for stdin, or inline JSON.
        instance: String,
    },
    /// Volume of the simplex or of one face.
    Volume {
        instance: String,
        /// Face vertices, e.g. `0,1,2`.
        #[arg(long, value_delimiter = ',')]
        face: Option<Vec<usize>>,
    },
    /// Volumes of all k-faces.
    Faces {
        instance: String,
        #[arg(long)]
        k: usize,
    },
    /// Dual Gram matrix of the unit outward facet normals.
    Dual {
        instance: String,
        /// Facet-area ratio from the adjugate of G*.
        #[arg(long, num_args = 2, value_names = ["I", "J"])]
        ratio: Option<Vec<usize>>,
    },
    /// Concavity probe along the segment between two instances.
    Probe {
        first: String,
        second: String,
        #[arg(long, value_enum, default_value_t = Mode::Log)]
        mode: Mode,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Face to probe; the whole simplex by default.
        #[arg(long, value_delimiter = ',')]
        face: Option<Vec<usize>>,
    },
    /// Build one of the two counterexample families.
    Counterexample {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Also locate the ε where the verdict changes.
        #[arg(long)]
        bisect: bool,
    },
    /// Maximize a face functional at fixed total squared length.
    Optimize {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        total: f64,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Logprod)]
        objective: ObjectiveArg,
        /// Face dimension; defaults to n.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random starts, seeded seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        starts: u64,
        /// Explicit start point; overrides the random starts.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        start: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Log,
    Root,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Nontri,
    Frankel,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Logprod,
    Sumroot,
}

/// What a run writes and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Failure {
    code: i32,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotRealizable { .. } | Error::ProbeLeftCone { .. } | Error::ZeroFaceVolume { .. } => EXIT_VERDICT,
            Error::NoConvergence { .. }
            | Error::MaxIterations(_)
            | Error::StepIntoInvalidRegion { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::Singular
            | Error::NullityNotOne { .. }
            | Error::DegenerateFacet(_)
            | Error::NearZeroCofactor(_) => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        };
        let debug = format!("{e:?}");
        let kind = debug
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or_default()
            .to_string();
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<instance::ParseError> for Failure {
    fn from(e: instance::ParseError) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "ParseError".into(),
            message: e.to_string(),
        }
    }
}

struct Run {
    inputs: Vec<InputRecord>,
    results: Value,
    code: i32,
}

struct Context {
    tolerance: Option<f64>,
    lengths: bool,
    inputs: Vec<InputRecord>,
}

impl Context {
    fn load(&mut self, arg: &str) -> Result<Instance, Failure> {
        let inst = load_instance(arg, self.lengths)?;
        self.inputs.push(inst.source.clone());
        Ok(inst)
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn face_from(arg: Option<Vec<usize>>, n: usize) -> Result<FaceId, Failure> {
    match arg {
        None => Ok(FaceId::full(n)),
        Some(vs) => {
            if let Some(v) = vs.iter().find(|&&v| v > n) {
                return Err(Error::InvalidFace(format!("vertex {v} out of range 0..={n}")).into());
            }
            Ok(FaceId::new(vs)?)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code: EXIT_OK,
                },
                _ => Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: EXIT_USAGE,
                },
            };
        }
    };
    let command: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let timestamp = (!cli.no_timestamp).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let mut ctx = Context {
        tolerance: cli.tolerance,
        lengths: cli.lengths,
        inputs: Vec::new(),
    };
    let (report, code, stderr) = match execute(&cli.command, &mut ctx) {
        Ok(run) => (
            Report {
                tool: "simplex-cone",
                version: env!("CARGO_PKG_VERSION"),
                command,
                inputs: run.inputs,
                timestamp,
                status: Status::Ok,
                results: run.results,
                error: None,
            },
            run.code,
            String::new(),
        ),
        Err(f) => (
            Report {
                tool: "simplex-cone",
                version: env!("CARGO_PKG_VERSION"),
                command,
                inputs: ctx.inputs,
                timestamp,
                status: Status::Error,
                results: Value::Null,
                error: Some(ErrorRecord {
                    kind: f.kind,
                    message: f.message.clone(),
                }),
            },
            f.code,
            format!("error: {}\n", f.message),
        ),
    };
    let stdout = if cli.pretty {
        report::to_pretty(&report)
    } else {
        report::to_json(&report) + "\n"
    };
    Outcome { stdout, stderr, code }
}

fn execute(command: &Command, ctx: &mut Context) -> Result<Run, Failure> {
    if let Some(t) = ctx.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {t}")).into());
        }
    }
    let tol = ctx.tolerance;
    let (results, code) = match command {
        Command::Validate { instance } => {
            let inst = ctx.load(instance)?;
            let report = simplex::validate(&inst.lengths, tol)?;
            let code = if report.is_valid() { EXIT_OK } else { EXIT_VERDICT };
            let results = json!({
                "dimension": inst.lengths.dim(),
                "labels": inst.labels,
                "squared_lengths": inst.lengths.values(),
                "validity": to_value(&report),
            });
            (results, code)
        }
        Command::Volume { instance, face } => {
            let inst = ctx.load(instance)?;
            let f = face_from(face.clone(), inst.lengths.dim())?;
            let face_lengths = simplex::face_squared_lengths(&inst.lengths, &f)?;
            let report = simplex::validate(&face_lengths, tol)?;
            let (volume, code) = match report.verdict {
                Verdict::Invalid => (None, EXIT_VERDICT),
                _ => (Some(simplex::volume_with_tolerance(&face_lengths, tol)?), EXIT_OK),
            };
            let results = json!({
                "face": f.vertices(),
                "k": f.dim(),
                "verdict": to_value(&report.verdict),
                "smallest_gram_eigenvalue": report.smallest_gram_eigenvalue,
                "volume": volume,
            });
            (results, code)
        }
        Command::Faces { instance, k } => {
            let inst = ctx.load(instance)?;
            let n = inst.lengths.dim();
            if !(1..=n).contains(k) {
                return Err(Error::InvalidArgument(format!("--k must be in 1..={n}, got {k}")).into());
            }
            let mut code = EXIT_OK;
            let mut faces = Vec::new();
            for f in simplex::k_faces(n, *k) {
                let face_lengths = simplex::face_squared_lengths(&inst.lengths, &f)?;
                let report = simplex::validate(&face_lengths, tol)?;
                let volume = match report.verdict {
                    Verdict::Invalid => {
                        code = EXIT_VERDICT;
                        None
                    }
                    _ => Some(simplex::volume_with_tolerance(&face_lengths, tol)?),
                };
                faces.push(json!({
                    "vertices": f.vertices(),
                    "verdict": to_value(&report.verdict),
                    "volume": volume,
                }));
            }
            (json!({ "k": k, "faces": faces }), code)
        }
        Command::Dual { instance, ratio } => {
            let inst = ctx.load(instance)?;
            let report = dual::dual_gram_with_tolerance(&inst.lengths, tol)?;
            let kernel = dual::null_direction(&report.gstar)?;
            let ratio = match ratio.as_deref() {
                Some(&[i, j]) => {
                    let adj = dual::area_ratio_from_adjugate(&inst.lengths, i, j)?;
                    let direct = (report.areas[i] / report.areas[j]).powi(2);
                    json!({ "i": i, "j": j, "adjugate_ratio": adj, "squared_area_ratio": direct })
                }
                _ => Value::Null,
            };
            let results = json!({
                "dual_gram": to_value(&report),
                "null_direction": kernel,
                "ratio": ratio,
            });
            (results, EXIT_OK)
        }
        Command::Probe {
            first,
            second,
            mode,
            samples,
            face,
        } => {
            let a = ctx.load(first)?;
            let b = ctx.load(second)?;
            let f = face_from(face.clone(), a.lengths.dim())?;
            let mode = match mode {
                Mode::Log => ProbeMode::Log,
                Mode::Root => ProbeMode::Root,
            };
            let report = convexity::probe_concavity(&a.lengths, &b.lengths, &f, mode, *samples)?;
            let results = json!({
                "face": f.vertices(),
                "mode": to_value(&mode),
                "probe": to_value(&report),
            });
            (results, EXIT_OK)
        }
        Command::Counterexample {
            family,
            epsilon,
            bisect,
        } => {
            let (instance, threshold) = match family {
                Family::Nontri => {
                    let inst = convexity::nontri_instance(*epsilon)?;
                    let t = if *bisect {
                        let value = convexity::nontri_threshold(1e-6, 0.2, 1e-12)?;
                        json!({ "epsilon": value, "bracket": [1e-6, 0.2], "closed_form": 1.0 / 3f64.sqrt() - 0.5 })
                    } else {
                        Value::Null
                    };
                    (inst, t)
                }
                Family::Frankel => {
                    let inst = convexity::frankel_instance(*epsilon)?;
                    let t = if *bisect {
                        let value = convexity::frankel_threshold(0.01, 1.9, 1e-12)?;
                        let closed = 2.0 * (2.0 - 2f64.sqrt()).sqrt() - 2f64.sqrt();
                        json!({ "epsilon": value, "bracket": [0.01, 1.9], "closed_form": closed })
                    } else {
                        Value::Null
                    };
                    (inst, t)
                }
            };
            (json!({ "instance": to_value(&instance), "threshold": threshold }), EXIT_OK)
        }
        Command::Optimize {
            n,
            total,
            objective,
            k,
            seed,
            starts,
            start,
            max_iterations,
        } => {
            let k = k.unwrap_or(*n);
            let obj = match objective {
                ObjectiveArg::Logprod => Objective::log_product(k),
                ObjectiveArg::Sumroot => Objective::sum_root(k),
            };
            let seeds: Vec<u64> = if start.is_some() {
                vec![*seed]
            } else {
                (0..(*starts).max(1)).map(|i| seed.wrapping_add(i)).collect()
            };
            let mut runs = Vec::new();
            for s in seeds {
                let opts = MaximizeOptions {
                    start: start.clone(),
                    seed: s,
                    max_iterations: *max_iterations,
                    ..Default::default()
                };
                let trace = extremal::maximize(*n, *total, &obj, &opts)?;
                runs.push(json!({ "seed": s, "trace": to_value(&trace) }));
            }
            let regular = simplex::regular_simplex(*n, *total)?;
            let results = json!({
                "objective": to_value(&obj),
                "total": total,
                "regular_objective": extremal::objective_value(&regular, &obj)?,
                "runs": runs,
            });
            (results, EXIT_OK)
        }
    };
    Ok(Run {
        inputs: std::mem::take(&mut ctx.inputs),
        results,
        code,
    })
}
