//! Command-line interface: load instances, run pipelines, emit
//! machine-readable records.
//!
//! Exit codes: 0 success, 1 certified failure (the geometry genuinely does
//! not satisfy the request; the record carries a witness), 2 usage error,
//! 3 internal verification failure (a consistency check the construction
//! guarantees has failed, which is a bug signal).

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::geom::Tolerance;
use crate::macbeath::{self, MacbeathConfig};
use crate::oracle;
use crate::polarity::{self, PointCloud};
use crate::selection;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFIED_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "steinitz",
    version,
    about = "Certified small-subset selection for convex hulls containing a ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Feasibility tolerance override.
    #[arg(long, global = true)]
    feas_eps: Option<f64>,

    /// Newton residual tolerance override.
    #[arg(long, global = true)]
    grad_eps: Option<f64>,

    /// Thread count for the parallel regions (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Write the result record to this path in addition to stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InputArg {
    /// Instance file: {"dim": d, "points": [[..], ..]}.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Select at most 2d points whose hull contains the certified ball.
    Select {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check that a hull contains the ball of the given radius. Accepts an
    /// instance file or a certificate produced by `select`.
    Verify {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        radius: f64,
    },
    /// Solve the re-centering point of the polar with unit weights.
    Center {
        #[command(flatten)]
        input: InputArg,
    },
    /// Exhaustive best k-subset by certified inscribed radius.
    Exhaustive {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        k: usize,
    },
    /// Generate the sharp (2d+1)-point instance; optionally search it.
    Grundbacher {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = false)]
        exhaustive: bool,
    },
    /// Two-stage selection for arbitrary clouds containing the unit ball.
    Corollary14 {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate the symmetry center and inclusion factor of a hull.
    Macbeath {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, default_value_t = 4000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the selection pipeline on seeded random instances and report
    /// deterministic summaries (timings go to stderr).
    Bench {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 12)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        count: u32,
    },
}

#[derive(Serialize)]
struct ConfigEcho {
    command: String,
    input: Option<String>,
    seed: Option<u64>,
    feas_eps: f64,
    grad_eps: f64,
}

#[derive(Serialize)]
struct SelectRecord<'a> {
    version: &'static str,
    config: ConfigEcho,
    dim: usize,
    pruned_m: usize,
    selected_indices: &'a [usize],
    selected_points: Vec<Vec<f64>>,
    certified_radius: f64,
    guaranteed_radius: f64,
    lemma_checks: &'a selection::LemmaChecks,
}

#[derive(Serialize)]
struct VerifyRecord {
    version: &'static str,
    config: ConfigEcho,
    radius: f64,
    contained: bool,
    inscribed_radius: f64,
    witness: Option<polarity::BallWitness>,
}

#[derive(Serialize)]
struct CenterRecord {
    version: &'static str,
    config: ConfigEcho,
    center: Vec<f64>,
    residual: f64,
    iterations: u32,
    converged: bool,
    log_objective: f64,
    zero_sum_residual: f64,
}

#[derive(Serialize)]
struct ExhaustiveRecord {
    version: &'static str,
    config: ConfigEcho,
    k: usize,
    best_subset: Vec<usize>,
    best_radius: f64,
    subsets_examined: u64,
}

#[derive(Serialize)]
struct GrundbacherRecord {
    version: &'static str,
    config: ConfigEcho,
    dim: usize,
    points: Vec<Vec<f64>>,
    exhaustive: Option<ExhaustiveSummary>,
}

#[derive(Serialize)]
struct ExhaustiveSummary {
    k: usize,
    best_subset: Vec<usize>,
    best_radius: f64,
}

#[derive(Serialize)]
struct TwoStageRecord<'a> {
    version: &'static str,
    config: ConfigEcho,
    stage1_indices: &'a [usize],
    stage1_inradius: f64,
    stage1_required: f64,
    final_floor: f64,
    dim: usize,
    selected_indices: &'a [usize],
    selected_points: Vec<Vec<f64>>,
    certified_radius: f64,
    guaranteed_radius: f64,
}

#[derive(Serialize)]
struct MacbeathRecord<'a> {
    version: &'static str,
    config: ConfigEcho,
    #[serde(flatten)]
    report: &'a macbeath::MacbeathReport,
}

#[derive(Serialize)]
struct BenchRecord {
    version: &'static str,
    config: ConfigEcho,
    dim: usize,
    m: usize,
    count: u32,
    certified_radii: Vec<f64>,
    guaranteed_radii: Vec<f64>,
    selection_sizes: Vec<usize>,
}

#[derive(Serialize)]
struct ErrorRecord {
    error: ErrorBody,
}

#[derive(Serialize)]
struct ErrorBody {
    code: &'static str,
    message: String,
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Parse arguments and run; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; keep its exit code semantics
            // (2 for usage errors, 0 for --help/--version).
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(jobs) = cli.jobs {
        // Ignore the error when a pool already exists (repeat in-process runs).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let mut tol = Tolerance::default();
    if let Some(f) = cli.feas_eps {
        tol.feas_eps = f;
    }
    if let Some(g) = cli.grad_eps {
        tol.grad_eps = g;
    }
    if let Err(e) = tol.validate() {
        return emit_error(&cli.output, &e, EXIT_USAGE);
    }
    run(cli, tol)
}

fn echo(command: &str, input: Option<&PathBuf>, seed: Option<u64>, tol: &Tolerance) -> ConfigEcho {
    ConfigEcho {
        command: command.to_string(),
        input: input.map(|p| p.display().to_string()),
        seed,
        feas_eps: tol.feas_eps,
        grad_eps: tol.grad_eps,
    }
}

fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::BallNotContained { .. }
        | Error::TooFewPoints { .. }
        | Error::TargetNotInHull { .. }
        | Error::Unbounded { .. }
        | Error::UnboundedPolytope
        | Error::DegenerateCloud => EXIT_CERTIFIED_FAILURE,
        Error::InvalidInput(_)
        | Error::DimensionMismatch { .. }
        | Error::BudgetExceeded { .. }
        | Error::DimensionTooLarge { .. } => EXIT_USAGE,
        Error::SingularSystem
        | Error::CenterNotInterior
        | Error::InfeasiblePoint
        | Error::InclusionViolated { .. }
        | Error::RetryExhausted { .. }
        | Error::VerificationFailed { .. } => EXIT_INTERNAL,
    }
}

fn emit_error(output: &Option<PathBuf>, e: &Error, code: i32) -> i32 {
    let record = ErrorRecord {
        error: ErrorBody {
            code: e.code(),
            message: e.to_string(),
        },
    };
    emit_json(output, &record);
    code
}

fn emit_json<S: Serialize>(output: &Option<PathBuf>, record: &S) -> i32 {
    let text = serde_json::to_string_pretty(record).expect("records serialize");
    println!("{text}");
    if let Some(path) = output {
        match std::fs::File::create(path).and_then(|mut f| writeln!(f, "{text}")) {
            Ok(()) => {}
            Err(e) => {
                eprintln!("cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
    }
    EXIT_OK
}

fn load_instance(path: &PathBuf) -> Result<PointCloud, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("malformed instance file: {e}")))?;
    let points_key = if value.get("points").is_some() {
        "points"
    } else if value.get("selected_points").is_some() {
        "selected_points"
    } else {
        return Err(Error::InvalidInput(
            "file has neither \"points\" nor \"selected_points\"".into(),
        ));
    };
    let dim = value
        .get("dim")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::InvalidInput("missing integer field \"dim\"".into()))?
        as usize;
    let raw = value
        .get(points_key)
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::InvalidInput(format!("field \"{points_key}\" must be an array")))?;
    let mut points = Vec::with_capacity(raw.len());
    for row in raw {
        let row = row
            .as_array()
            .ok_or_else(|| Error::InvalidInput("points must be arrays of numbers".into()))?;
        let mut p = Vec::with_capacity(row.len());
        for x in row {
            p.push(
                x.as_f64()
                    .ok_or_else(|| Error::InvalidInput("coordinates must be numbers".into()))?,
            );
        }
        points.push(p);
    }
    PointCloud::new(dim, points)
}

fn run(cli: Cli, tol: Tolerance) -> i32 {
    let output = cli.output.clone();
    match cli.command {
        Command::Select { input, seed } => {
            let q = match load_instance(&input.input) {
                Ok(q) => q,
                Err(e) => return emit_error(&output, &e, EXIT_USAGE),
            };
            match selection::select_steinitz(&q, &tol, seed) {
                Ok(cert) => {
                    let record = SelectRecord {
                        version: VERSION,
                        config: echo("select", Some(&input.input), Some(seed), &tol),
                        dim: cert.dim,
                        pruned_m: cert.pruned_m,
                        selected_indices: &cert.selected_indices,
                        selected_points: cert
                            .selected_indices
                            .iter()
                            .map(|&i| q.points[i].clone())
                            .collect(),
                        certified_radius: cert.certified_radius,
                        guaranteed_radius: cert.guaranteed_radius,
                        lemma_checks: &cert.lemma_checks,
                    };
                    emit_json(&output, &record)
                }
                Err(e) => emit_error(&output, &e, error_exit_code(&e)),
            }
        }
        Command::Verify { input, radius } => {
            let q = match load_instance(&input.input) {
                Ok(q) => q,
                Err(e) => return emit_error(&output, &e, EXIT_USAGE),
            };
            match polarity::certify_ball_in_hull(&q, radius, &tol) {
                Ok(check) => {
                    let contained = check.contained;
                    let record = VerifyRecord {
                        version: VERSION,
                        config: echo("verify", Some(&input.input), None, &tol),
                        radius,
                        contained,
                        inscribed_radius: check.inscribed_radius,
                        witness: check.witness,
                    };
                    let code = emit_json(&output, &record);
                    if code != EXIT_OK {
                        code
                    } else if contained {
                        EXIT_OK
                    } else {
                        EXIT_CERTIFIED_FAILURE
                    }
                }
                Err(e) => emit_error(&output, &e, error_exit_code(&e)),
            }
        }
        Command::Center { input } => {
            let q = match load_instance(&input.input) {
                Ok(q) => q,
                Err(e) => return emit_error(&output, &e, EXIT_USAGE),
            };
            let ws = crate::center::WeightedSystem::unit(polarity::polar_of_cloud(&q));
            match crate::center::solve_center(&ws, &tol, 200) {
                Ok(r) => {
                    let zero_sum = match crate::center::verify_zero_sum(&ws, &r.center, &tol) {
                        Ok(z) => z,
                        Err(e) => return emit_error(&output, &e, error_exit_code(&e)),
                    };
                    let converged = r.converged;
                    let record = CenterRecord {
                        version: VERSION,
                        config: echo("center", Some(&input.input), None, &tol),
                        center: r.center,
                        residual: r.residual,
                        iterations: r.iterations,
                        converged,
                        log_objective: r.log_objective,
                        zero_sum_residual: zero_sum,
                    };
                    let code = emit_json(&output, &record);
                    if code != EXIT_OK {
                        code
                    } else if converged {
                        EXIT_OK
                    } else {
                        EXIT_INTERNAL
                    }
                }
                Err(e) => emit_error(&output, &e, error_exit_code(&e)),
            }
        }
        Command::Exhaustive { input, k } => {
            let q = match load_instance(&input.input) {
                Ok(q) => q,
                Err(e) => return emit_error(&output, &e, EXIT_USAGE),
            };
            match oracle::exhaustive_best_subset(&q, k, &tol) {
                Ok(rep) => {
                    let record = ExhaustiveRecord {
                        version: VERSION,
                        config: echo("exhaustive", Some(&input.input), None, &tol),
                        k,
                        best_subset: rep.best_subset,
                        best_radius: rep.best_radius,
                        subsets_examined: rep.subsets_examined,
                    };
                    emit_json(&output, &record)
                }
                Err(e) => emit_error(&output, &e, error_exit_code(&e)),
            }
        }
        Command::Grundbacher { dim, exhaustive } => {
            let inst = match oracle::generate_grundbacher(dim) {
                Ok(i) => i,
                Err(e) => return emit_error(&output, &e, EXIT_USAGE),
            };
            let summary = if exhaustive {
                match oracle::exhaustive_best_subset(&inst.cloud, 2 * dim, &tol) {
                    Ok(rep) => Some(ExhaustiveSummary {
                        k: 2 * dim,
                        best_subset: rep.best_subset,
                        best_radius: rep.best_radius,
                    }),
                    Err(e) => return emit_error(&output, &e, error_exit_code(&e)),
                }
            } else {
                None
            };
            let record = GrundbacherRecord {
                version: VERSION,
                config: echo("grundbacher", None, None, &tol),
                dim,
                points: inst.cloud.points.clone(),
                exhaustive: summary,
            };
            emit_json(&output, &record)
        }
        Command::Corollary14 { input, seed } => {
            let q = match load_instance(&input.input) {
                Ok(q) => q,
                Err(e) => return emit_error(&output, &e, EXIT_USAGE),
            };
            match selection::select_two_stage(&q, &tol, seed) {
                Ok(cert) => {
                    let record = TwoStageRecord {
                        version: VERSION,
                        config: echo("corollary14", Some(&input.input), Some(seed), &tol),
                        stage1_indices: &cert.stage1_indices,
                        stage1_inradius: cert.stage1_inradius,
                        stage1_required: cert.stage1_required,
                        final_floor: cert.final_floor,
                        dim: cert.certificate.dim,
                        selected_indices: &cert.certificate.selected_indices,
                        selected_points: cert
                            .certificate
                            .selected_indices
                            .iter()
                            .map(|&i| q.points[i].clone())
                            .collect(),
                        certified_radius: cert.certificate.certified_radius,
                        guaranteed_radius: cert.certificate.guaranteed_radius,
                    };
                    emit_json(&output, &record)
                }
                Err(e) => emit_error(&output, &e, error_exit_code(&e)),
            }
        }
        Command::Macbeath {
            input,
            samples,
            seed,
        } => {
            let q = match load_instance(&input.input) {
                Ok(q) => q,
                Err(e) => return emit_error(&output, &e, EXIT_USAGE),
            };
            let config = MacbeathConfig {
                samples,
                seed,
                ..MacbeathConfig::default()
            };
            match macbeath::find_macbeath_point(&q, &config, &tol) {
                Ok(report) => {
                    let record = MacbeathRecord {
                        version: VERSION,
                        config: echo("macbeath", Some(&input.input), Some(seed), &tol),
                        report: &report,
                    };
                    emit_json(&output, &record)
                }
                Err(e) => emit_error(&output, &e, error_exit_code(&e)),
            }
        }
        Command::Bench {
            dim,
            m,
            seed,
            count,
        } => {
            let mut certified = Vec::new();
            let mut guaranteed = Vec::new();
            let mut sizes = Vec::new();
            let start = std::time::Instant::now();
            for i in 0..count {
                let inst = match oracle::generate_random_ball_instance(dim, m, seed + i as u64) {
                    Ok(inst) => inst,
                    Err(e) => return emit_error(&output, &e, error_exit_code(&e)),
                };
                match selection::select_steinitz(&inst.cloud, &tol, seed + i as u64) {
                    Ok(cert) => {
                        certified.push(cert.certified_radius);
                        guaranteed.push(cert.guaranteed_radius);
                        sizes.push(cert.selected_indices.len());
                    }
                    Err(e) => return emit_error(&output, &e, error_exit_code(&e)),
                }
            }
            // Timings are not part of the record so reruns stay byte-identical.
            eprintln!(
                "bench: {count} instances (d={dim}, m={m}) in {:.1} ms",
                start.elapsed().as_secs_f64() * 1e3
            );
            let record = BenchRecord {
                version: VERSION,
                config: echo("bench", None, Some(seed), &tol),
                dim,
                m,
                count,
                certified_radii: certified,
                guaranteed_radii: guaranteed,
                selection_sizes: sizes,
            };
            emit_json(&output, &record)
        }
    }
}
