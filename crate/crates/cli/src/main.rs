//! `johnkit` command-line front end.

mod format;
mod stress;
mod table;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use johnkit::certificate::{certify, certify_john_form, outer_radius_bound, verify};
use johnkit::jung::{diameter, jung_equality_witness, jung_radius, min_enclosing_ball};
use johnkit::kflat::{diameter_bound, r_max, search_max_kball, search_max_kellipsoid, sum_alpha_bound, SearchConfig};
use johnkit::linalg::Vector;
use johnkit::mvie::{john_position_with, solve_mvie_with};
use johnkit::polytope::{cross_polytope, cube, regular_simplex, HalfspacePolytope, JohnFormPolytope};
use johnkit::report::{all_pass, BoundReport};
use johnkit::{Error, Tolerances};

const EXIT_SOLVER: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_JSON: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "johnkit", version, about = "John ellipsoids, contact certificates and extremal k-flats")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Polytope or point-set JSON file; read from stdin when omitted.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Built-in body instead of --input: simplex:N, cube:N or cross:N.
    #[arg(long, global = true, value_parser = parse_body)]
    body: Option<Body>,
    /// Report file; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, env = "JOHNKIT_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Local steps per restart.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Tolerance override, e.g. --tol certificate=1e-8 (repeatable).
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    /// Worker threads for searches and stress suites.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print bound reports as a text table instead of JSON.
    #[arg(long, global = true)]
    table: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximal-volume inscribed ellipsoid.
    Mvie,
    /// MVIE, contact points and John weights, with verification.
    Certify,
    /// Affine image of the body whose MVIE is the unit ball.
    JohnPosition,
    /// Largest k-dimensional ball.
    Kball {
        #[arg(long)]
        k: usize,
    },
    /// Largest-volume k-dimensional ellipsoid.
    Kellipsoid {
        #[arg(long)]
        k: usize,
    },
    /// Closed-form bounds for given n and k.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Minimal enclosing ball of a point set against the Jung bound.
    Jung,
    /// Seeded property suites.
    Stress {
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
}

#[derive(Debug, Clone, Copy)]
enum Body {
    Simplex(usize),
    Cube(usize),
    Cross(usize),
}

fn parse_body(s: &str) -> Result<Body, String> {
    let (kind, n) = s.split_once(':').ok_or("expected KIND:N")?;
    let n: usize = n.parse().map_err(|e| format!("bad dimension: {e}"))?;
    match kind {
        "simplex" => Ok(Body::Simplex(n)),
        "cube" => Ok(Body::Cube(n)),
        "cross" => Ok(Body::Cross(n)),
        _ => Err(format!("unknown body {kind:?}")),
    }
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v: f64 = v.parse().map_err(|e| format!("bad value: {e}"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err("tolerance overrides must be positive".into());
    }
    Ok((k.to_string(), v))
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Json(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e.to_string())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointSet {
    dim: usize,
    points: Vec<Vector>,
}

struct Outcome {
    text: String,
    violated: bool,
}

fn tolerances(overrides: &[(String, f64)]) -> Result<Tolerances, Failure> {
    let mut v = serde_json::to_value(Tolerances::default()).expect("tolerances serialize");
    let map = v.as_object_mut().expect("tolerances are an object");
    for (key, value) in overrides {
        let slot = map
            .get_mut(key)
            .ok_or_else(|| Failure::Usage(format!("unknown tolerance {key:?}")))?;
        *slot = if slot.is_u64() {
            json!(*value as u64)
        } else {
            json!(value)
        };
    }
    serde_json::from_value(v).map_err(|e| Failure::Usage(e.to_string()))
}

fn read_input(cli: &Cli) -> Result<String, Failure> {
    match &cli.input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Solver(format!("cannot read {}: {e}", path.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::Solver(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn load_polytope(cli: &Cli) -> Result<HalfspacePolytope, Failure> {
    if let Some(body) = cli.body {
        let p = match body {
            Body::Simplex(n) => regular_simplex(n),
            Body::Cube(n) => cube(n),
            Body::Cross(n) => cross_polytope(n),
        }?;
        return Ok(p.into_polytope());
    }
    serde_json::from_str(&read_input(cli)?).map_err(|e| Failure::Json(e.to_string()))
}

/// Rescales rows to offset 1 about the origin and requires the unit ball to
/// be inscribed.
fn load_john_form(cli: &Cli, tol: &Tolerances) -> Result<JohnFormPolytope, Failure> {
    let raw = load_polytope(cli)?;
    let p = raw.normalize(&vec![0.0; raw.dim()])?;
    Ok(JohnFormPolytope::from_polytope(p, tol.contact)?)
}

fn search_config(cli: &Cli) -> SearchConfig {
    let d = SearchConfig::default();
    SearchConfig {
        restarts: cli.restarts.unwrap_or(d.restarts),
        steps: cli.steps.unwrap_or(d.steps),
        seed: cli.seed,
        ..d
    }
}

fn emit<T: Serialize>(value: &T, reports: &[BoundReport], cli: &Cli) -> Result<Outcome, Failure> {
    let text = if cli.table && !reports.is_empty() {
        table::render(reports)
    } else {
        format::to_json(value).map_err(|e| Failure::Solver(e.to_string()))?
    };
    Ok(Outcome { text, violated: !all_pass(reports) })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = tolerances(&cli.tol)?;
    match &cli.command {
        Command::Mvie => {
            let run = solve_mvie_with(&load_polytope(cli)?, &tol)?;
            emit(&run.ellipsoid, &[], cli)
        }
        Command::Certify => {
            let c = certify(&load_polytope(cli)?, &tol)?;
            let reports = verify(&c.certificate, tol.certificate);
            let value = json!({
                "ellipsoid": c.ellipsoid,
                "certificate": c.certificate,
                "verify": reports,
            });
            emit(&value, &reports, cli)
        }
        Command::JohnPosition => {
            let jp = john_position_with(&load_polytope(cli)?, &tol)?;
            let value = json!({
                "body": jp.body.polytope(),
                "map": jp.map,
                "ellipsoid": jp.ellipsoid,
            });
            emit(&value, &[], cli)
        }
        Command::Kball { k } => {
            let p = load_john_form(cli, &tol)?;
            let res = search_max_kball(&p, *k, &search_config(cli))?;
            emit(&res.report(), &res.reports, cli)
        }
        Command::Kellipsoid { k } => {
            let p = load_john_form(cli, &tol)?;
            let cert = certify_john_form(&p, &tol).map_err(|e| {
                Failure::Solver(format!("{}: {e}", Error::CertificateRequired))
            })?;
            let res = search_max_kellipsoid(&p, Some(&cert), *k, &search_config(cli))?;
            emit(&res.report(), &res.reports, cli)
        }
        Command::Bounds { n, k } => {
            let rm = r_max(*n, *k)?;
            let kf = *k as f64;
            let nf = *n as f64;
            let value = json!({
                "n": n,
                "k": k,
                "r_max": rm,
                "sum_alpha_bound": sum_alpha_bound(*n, *k),
                "diameter_bound": diameter_bound(*n),
                "outer_radius": outer_radius_bound(false, *n),
                "outer_radius_symmetric": outer_radius_bound(true, *n),
                "jung_factor_k": (kf / (2.0 * (kf + 1.0))).sqrt(),
                "jung_factor_n": (nf / (2.0 * (nf + 1.0))).sqrt(),
            });
            emit(&value, &[], cli)
        }
        Command::Jung => {
            let set: PointSet =
                serde_json::from_str(&read_input(cli)?).map_err(|e| Failure::Json(e.to_string()))?;
            if set.points.iter().any(|p| p.len() != set.dim) {
                return Err(Failure::Json(format!("every point must have {} coordinates", set.dim)));
            }
            let ball = min_enclosing_ball(&set.points, 1e-12)?;
            let d = diameter(&set.points)?;
            let bound = jung_radius(d, set.dim);
            let report = BoundReport::upper("jung_radius", bound, ball.radius, 1e-9);
            let witness = jung_equality_witness(&ball, &set.points, 1e-8);
            let value = json!({
                "ball": ball,
                "diameter": d,
                "jung_radius": bound,
                "slack": report.slack,
                "within_bound": report.pass,
                "equality": witness,
            });
            emit(&value, &[report], cli)
        }
        Command::Stress { trials } => {
            let report = stress::run(cli.seed, *trials);
            let text = format::to_json(&report).map_err(|e| Failure::Solver(e.to_string()))?;
            Ok(Outcome { text, violated: report.violations() > 0 })
        }
    }
}

fn write_output(cli: &Cli, text: &str) -> Result<(), Failure> {
    let res = match &cli.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    res.map_err(|e| Failure::Solver(format!("cannot write output: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let outcome = run(&cli).and_then(|o| write_output(&cli, &o.text).map(|_| o));
    match outcome {
        Ok(o) if o.violated => {
            eprintln!("bound violation detected");
            ExitCode::from(EXIT_VIOLATION)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Json(m)) => {
            eprintln!("error: malformed JSON: {m}");
            ExitCode::from(EXIT_JSON)
        }
        Err(Failure::Solver(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}
