//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on I/O or solver errors, 2 on usage or
//! parse errors, 3 when a solve stops without converging (the solution file
//! is still written).

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::augmented::{AugmentedUnitQuaternion, SigmaNorm};
use crate::error::ParseError;
use crate::generate::{
    gen_handeye, gen_handeye_world, gen_posegraph, noisy_handeye, noisy_handeye_world,
    noisy_posegraph, NoiseModel,
};
use crate::io;
use crate::kinematics::{Gains, LyapunovWeights, Simulation};
use crate::motion::discontinuity_report;
use crate::optim::{pose_error, solve, AuqVector, Problem, SolveStatus, SolverConfig};
use crate::Vector3;

#[derive(Debug, Parser)]
#[command(name = "auq", version, about = "Augmented unit quaternion toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemKind {
    Handeye,
    HandeyeWorld,
    Posegraph,
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    /// Problem file.
    pub input: PathBuf,
    /// Solution file (stdout when omitted).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Override the translation weight σ from the problem file.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Projected-gradient norm that counts as converged.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Ground-truth sidecar; prints the pose error of each unknown.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic problem and its ground-truth sidecar.
    Gen {
        #[arg(long, value_enum)]
        problem: ProblemKind,
        /// Measurement pairs (hand-eye kinds).
        #[arg(short, default_value_t = 5)]
        m: usize,
        /// Vertices (pose graph).
        #[arg(short, default_value_t = 10)]
        n: usize,
        /// Edges beyond the spanning chain (pose graph).
        #[arg(long, default_value_t = 11)]
        loop_edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rotation noise, radians per axis of the rotation vector.
        #[arg(long, default_value_t = 0.0)]
        rot_sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        trans_sigma: f64,
        /// Seed of the noise stream (defaults to `seed`).
        #[arg(long)]
        noise_seed: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Problem file; the truth goes to `<output>.truth`.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve b = x⁻¹ ∘ a ∘ x for x.
    Calibrate(SolveArgs),
    /// Solve b = y⁻¹ ∘ a ∘ x for x and y.
    CalibrateWorld(SolveArgs),
    /// Solve an anchored pose graph.
    Slam(SolveArgs),
    /// Simulate the proportional controller and write the error trace.
    Simulate {
        /// Initial pose, 7 components (random from `seed` when omitted).
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        /// Desired pose, 7 components (random from `seed` when omitted).
        #[arg(long, allow_hyphen_values = true)]
        xd: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rotation gains: one value or three.
        #[arg(long, default_value = "1")]
        kr: String,
        /// Translation gains: one value or three.
        #[arg(long, default_value = "1")]
        kt: String,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Trace file (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Measure the jumps of the rotation-vector map near q0 = −1.
    Probe {
        #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
        axis: String,
        #[arg(long, default_value = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6")]
        deltas: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solve(#[from] crate::error::SolveError),
    #[error(transparent)]
    Control(#[from] crate::error::ControlError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn parse_gains(s: &str, what: &str) -> Result<Vector3, CliError> {
    let v = io::parse_reals(s).map_err(|e| CliError::Usage(format!("--{what}: {e}")))?;
    match v.as_slice() {
        [k] => Ok(Vector3::repeat(*k)),
        [a, b, c] => Ok(Vector3::new(*a, *b, *c)),
        _ => Err(CliError::Usage(format!(
            "--{what} takes one or three values"
        ))),
    }
}

fn truth_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".truth");
    PathBuf::from(s)
}

fn generate(
    kind: ProblemKind,
    m: usize,
    n: usize,
    loop_edges: usize,
    seed: u64,
    noise: NoiseModel,
    sigma: SigmaNorm,
) -> (Problem, AuqVector) {
    match kind {
        ProblemKind::Handeye => {
            let (mut p, x) = gen_handeye(m, seed);
            if !noise.is_zero() {
                p = noisy_handeye(&p, &noise);
            }
            p.sigma = sigma;
            (Problem::HandEye(p), AuqVector::new(vec![x]))
        }
        ProblemKind::HandeyeWorld => {
            let (mut p, x, y) = gen_handeye_world(m, seed);
            if !noise.is_zero() {
                p = noisy_handeye_world(&p, &noise);
            }
            p.sigma = sigma;
            (Problem::HandEyeWorld(p), AuqVector::new(vec![x, y]))
        }
        ProblemKind::Posegraph => {
            let (mut p, x) = gen_posegraph(n, loop_edges, seed);
            if !noise.is_zero() {
                p = noisy_posegraph(&p, &noise);
            }
            p.sigma = sigma;
            (Problem::PoseGraph(p), x)
        }
    }
}

fn run_solve(args: &SolveArgs, expected: &str) -> Result<i32, CliError> {
    let text = read(&args.input)?;
    let mut problem = io::parse_problem(&text).map_err(|source| CliError::Parse {
        path: args.input.clone(),
        source,
    })?;
    if problem.problem.kind() != expected {
        return Err(CliError::Usage(format!(
            "{}: expected a {expected} problem, found {}",
            args.input.display(),
            problem.problem.kind()
        )));
    }
    if let Some(s) = args.sigma {
        let sigma = SigmaNorm::new(s).map_err(|e| CliError::Usage(format!("--sigma: {e}")))?;
        match &mut problem.problem {
            Problem::HandEye(p) => p.sigma = sigma,
            Problem::HandEyeWorld(p) => p.sigma = sigma,
            Problem::PoseGraph(p) => p.sigma = sigma,
        }
    }
    if let Problem::PoseGraph(p) = &problem.problem {
        if !p.is_weakly_connected() {
            eprintln!(
                "warning: pose graph is disconnected; poses outside the anchor's component are not determined"
            );
        }
    }

    let config = SolverConfig {
        gradient_tol: args.tolerance,
        seed: args.seed,
        restarts: args.restarts,
        max_iters: args.max_iters,
        ..SolverConfig::default()
    };
    let result = match &problem.problem {
        Problem::HandEye(p) => solve(p, &config, None),
        Problem::HandEyeWorld(p) => solve(p, &config, None),
        Problem::PoseGraph(p) => solve(p, &config, problem.initial.as_ref()),
    }?;
    write(
        args.output.as_deref(),
        &io::write_solution(&problem.problem, &result),
    )?;
    eprintln!(
        "status {} objective {:e} gradient {:e} iterations {}",
        result.status, result.objective, result.gradient_norm, result.iterations
    );

    if let Some(path) = &args.truth {
        let truth = io::parse_truth(&read(path)?).map_err(|source| CliError::Parse {
            path: path.clone(),
            source,
        })?;
        let labels = io::block_labels(&problem.problem);
        for (label, x) in &truth {
            let Some(k) = labels.iter().position(|l| l == label) else {
                return Err(CliError::Usage(format!(
                    "truth label {label:?} is not an unknown"
                )));
            };
            let (rot, trans) = pose_error(&result.solution[k], x);
            eprintln!("pose error {label}: rotation {rot:e} rad, translation {trans:e}");
        }
    }

    Ok(if result.status == SolveStatus::Converged {
        0
    } else {
        3
    })
}

fn parse_pose(
    s: &Option<String>,
    what: &str,
    rng: &mut ChaCha8Rng,
) -> Result<AugmentedUnitQuaternion, CliError> {
    // Draw unconditionally so x0 and xd do not depend on each other.
    let drawn = AugmentedUnitQuaternion::random(rng, 1.0);
    match s {
        Some(s) => io::parse_auq(s).map_err(|e| CliError::Usage(format!("--{what}: {e}"))),
        None => Ok(drawn),
    }
}

/// Executes a parsed command and returns its exit code.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Gen {
            problem,
            m,
            n,
            loop_edges,
            seed,
            rot_sigma,
            trans_sigma,
            noise_seed,
            sigma,
            output,
        } => {
            let sigma =
                SigmaNorm::new(*sigma).map_err(|e| CliError::Usage(format!("--sigma: {e}")))?;
            if !(*rot_sigma >= 0.0 && *trans_sigma >= 0.0) {
                return Err(CliError::Usage("noise levels must be nonnegative".into()));
            }
            match problem {
                ProblemKind::Posegraph if *n < 2 => {
                    return Err(CliError::Usage("-n must be at least 2".into()))
                }
                ProblemKind::Handeye | ProblemKind::HandeyeWorld if *m < 1 => {
                    return Err(CliError::Usage("-m must be at least 1".into()))
                }
                _ => {}
            }
            let noise = NoiseModel::new(*rot_sigma, *trans_sigma, noise_seed.unwrap_or(*seed));
            let (p, truth) = generate(*problem, *m, *n, *loop_edges, *seed, noise, sigma);
            write(Some(output), &io::write_problem(&p, None))?;
            let labels = io::block_labels(&p);
            write(Some(&truth_path(output)), &io::write_truth(&labels, &truth))?;
            Ok(0)
        }
        Command::Calibrate(args) => run_solve(args, "handeye"),
        Command::CalibrateWorld(args) => run_solve(args, "handeye-world"),
        Command::Slam(args) => run_solve(args, "posegraph"),
        Command::Simulate {
            x0,
            xd,
            seed,
            kr,
            kt,
            dt,
            steps,
            alpha,
            beta,
            output,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let x0 = parse_pose(x0, "x0", &mut rng)?;
            let xd = parse_pose(xd, "xd", &mut rng)?;
            let gains = Gains::new(parse_gains(kr, "kr")?, parse_gains(kt, "kt")?)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let weights =
                LyapunovWeights::new(*alpha, *beta).map_err(|e| CliError::Usage(e.to_string()))?;
            let sim = Simulation::new(gains, *dt, *steps)
                .map_err(|e| CliError::Usage(e.to_string()))?
                .with_weights(weights);
            let trace = sim.run(&x0, &xd)?;
            write(output.as_deref(), &io::write_trace(&trace))?;
            let (v0, vt) = (trace.initial().v, trace.last().v);
            let bound = v0 * (-2.0 * gains.k_min() * trace.last().time).exp();
            eprintln!("V(0) {v0:e} V(T) {vt:e} V(0)exp(-2 k_min T) {bound:e}");
            if trace.any_near_branch() {
                eprintln!("warning: rotation error came within the branch margin of π");
            }
            Ok(0)
        }
        Command::Probe {
            axis,
            deltas,
            output,
        } => {
            let a = io::parse_reals(axis).map_err(|e| CliError::Usage(format!("--axis: {e}")))?;
            let [x, y, z] = a[..] else {
                return Err(CliError::Usage("--axis takes three values".into()));
            };
            let deltas =
                io::parse_reals(deltas).map_err(|e| CliError::Usage(format!("--deltas: {e}")))?;
            if deltas
                .iter()
                .any(|d| !(*d > 0.0 && *d < std::f64::consts::PI))
            {
                return Err(CliError::Usage("--deltas must lie in (0, π)".into()));
            }
            let rows = discontinuity_report(&Vector3::new(x, y, z), &deltas)
                .map_err(|e| CliError::Usage(format!("--axis: {e}")))?;
            write(output.as_deref(), &io::write_report(&rows))?;
            Ok(0)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
