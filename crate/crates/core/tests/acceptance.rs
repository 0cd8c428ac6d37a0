//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria 6 and 7 are known to fail: the closed-loop translation error
//! obeys `ṫ = −K_t t + (w·t)w − ½|w|²t`, while the decay bound and the
//! reference formula both assume `−|w|²t` for the last term. They are
//! evaluated at full tolerance and reported as FAIL; the process exit code
//! only reflects failures outside that list.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use auq::augmented::{AugmentedQuaternion as Aq, AugmentedUnitQuaternion as Auq};
use auq::dual;
use auq::generate::{gen_handeye, gen_handeye_world, gen_posegraph, noisy_handeye, NoiseModel};
use auq::kinematics::{
    error_rotation_vector, proportional_control, state_derivative, twist_from_error_rates, Gains,
    LyapunovWeights, Simulation,
};
use auq::motion::{discontinuity_report, rot_oplus, rotvec_from_quat};
use auq::optim::{
    gradient_ambient, max_pose_error, objective_ambient, pose_error, solve, AuqProblem,
    SolverConfig,
};
use auq::quaternion::{random_unit_from, Quaternion, UnitQuaternion};
use auq::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_RED: &[u32] = &[6, 7];
const SAMPLES: usize = 10_000;
const TOL: f64 = 1e-12;

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rand_vec(r: &mut ChaCha8Rng) -> Vector3 {
    Vector3::from_fn(|_, _| r.random_range(-1.0..1.0))
}

fn rand_quat(r: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::new(
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
    )
}

fn rand_aq(r: &mut ChaCha8Rng) -> Aq {
    Aq {
        p: rand_quat(r),
        t: rand_vec(r),
    }
}

fn qdiff(a: &Quaternion, b: &Quaternion) -> f64 {
    (*a - *b).to_array().iter().fold(0.0, |m, c| m.max(c.abs()))
}

fn mdiff(a: &Matrix3, b: &Matrix3) -> f64 {
    (a - b).amax()
}

/// Worst violation per identity, then pass iff all are within `TOL`.
fn report(checks: &[(&str, f64)], elapsed: Duration, limit: Duration) -> Outcome {
    let worst = checks.iter().fold(0.0f64, |m, c| m.max(c.1));
    let within_time = elapsed <= limit;
    let parts: Vec<String> = checks.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect();
    outcome(
        worst <= TOL && within_time,
        format!(
            "max errors: {}; {:.2}s (limit {}s)",
            parts.join(", "),
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut e = [0.0f64; 9];
    for _ in 0..SAMPLES {
        let (p, q, s) = (rand_quat(&mut r), rand_quat(&mut r), rand_quat(&mut r));
        e[0] = e[0].max(qdiff(&((p * q) * s), &(p * (q * s))));
        e[1] = e[1].max(mdiff(
            &(p * q).rot_matrix(),
            &(p.rot_matrix() * q.rot_matrix()),
        ));
        e[2] = e[2].max(mdiff(&p.conj().rot_matrix(), &p.rot_matrix().transpose()));

        let u = random_unit_from(&mut r);
        let t = rand_vec(&mut r);
        let sandwich = u.quaternion() * Quaternion::pure(t) * u.conj().quaternion();
        e[3] = e[3].max(qdiff(&sandwich, &Quaternion::pure(u.rot_matrix() * t)));

        let (x, y, z) = (rand_aq(&mut r), rand_aq(&mut r), rand_aq(&mut r));
        e[4] = e[4].max(((x * y) * z).max_abs_diff(&(x * (y * z))));

        let (a, b) = (Auq::random(&mut r, 1.0), Auq::random(&mut r, 1.0));
        let ab = a.aq() * b.aq();
        e[5] = e[5].max((ab.p.norm() - 1.0).abs());
        let id = Aq::identity();
        e[6] = e[6]
            .max((a.aq() * id).max_abs_diff(&a.aq()))
            .max((id * a.aq()).max_abs_diff(&a.aq()));
        e[7] = e[7]
            .max((a.aq() * a.inverse().aq()).max_abs_diff(&id))
            .max((a.inverse().aq() * a.aq()).max_abs_diff(&id));
        let decomposed = Auq::from_rotation(a.rotation()) * Auq::from_translation(a.translation());
        e[8] = e[8].max(decomposed.aq().max_abs_diff(&a.aq()));
    }
    report(
        &[
            ("quaternion associativity", e[0]),
            ("R(pq)=R(p)R(q)", e[1]),
            ("R(q*)=R(q)ᵀ", e[2]),
            ("sandwich", e[3]),
            ("AQ associativity", e[4]),
            ("AUQ closure", e[5]),
            ("AUQ identity", e[6]),
            ("AUQ inverse", e[7]),
            ("decomposition", e[8]),
        ],
        start.elapsed(),
        Duration::from_secs(10),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let (mut eh, mut ed) = (0.0f64, 0.0f64);
    for _ in 0..SAMPLES {
        let (x, y) = (Auq::random(&mut r, 1.0), Auq::random(&mut r, 1.0));
        let xy = x * y;
        eh = eh.max((xy.to_homogeneous() - x.to_homogeneous() * y.to_homogeneous()).amax());
        let prod = dual::from_auq(&x).mul(&dual::from_auq(&y));
        ed = ed.max(dual::from_auq(&xy).get().max_abs_diff(&prod));
    }
    report(
        &[("homogeneous", eh), ("dual quaternion", ed)],
        start.elapsed(),
        Duration::from_secs(10),
    )
}

fn fd_relative_error<P: AuqProblem>(problem: &P, x: &[Aq]) -> f64 {
    let h = 1e-6;
    let g = gradient_ambient(problem, x);
    let mut fd = g.clone() * 0.0;
    for b in 0..x.len() {
        for i in 0..7 {
            let shifted = |d: f64| {
                let mut y = x.to_vec();
                let mut a = y[b].to_array();
                a[i] += d;
                y[b] = Aq::from_array(a);
                objective_ambient(problem, &y)
            };
            fd[7 * b + i] = (shifted(h) - shifted(-h)) / (2.0 * h);
        }
    }
    (&g - &fd).norm() / g.norm().max(f64::MIN_POSITIVE)
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let (he, _) = gen_handeye(5, 30);
    let (hw, _, _) = gen_handeye_world(8, 31);
    let (pg, _) = gen_posegraph(10, 11, 32);
    let mut worst = [0.0f64; 3];
    for _ in 0..100 {
        let x = [Auq::random(&mut r, 1.0).aq()];
        worst[0] = worst[0].max(fd_relative_error(&he, &x));
        let xy = [Auq::random(&mut r, 1.0).aq(), Auq::random(&mut r, 1.0).aq()];
        worst[1] = worst[1].max(fd_relative_error(&hw, &xy));
        let xs: Vec<Aq> = (0..10).map(|_| Auq::random(&mut r, 1.0).aq()).collect();
        worst[2] = worst[2].max(fd_relative_error(&pg, &xs));
    }
    outcome(
        worst.iter().all(|w| *w <= 1e-6),
        format!(
            "max relative error: hand-eye {:.1e}, hand-eye/world {:.1e}, pose graph {:.1e} (limit 1e-6)",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn criterion_4() -> Outcome {
    let limit = Duration::from_secs(5);
    let mut successes = [0usize; 3];
    let mut slowest = Duration::ZERO;
    for seed in 0..10u64 {
        let config = SolverConfig {
            restarts: 1,
            seed,
            ..SolverConfig::default()
        };
        let ok = |f: f64, (rot, tr): (f64, f64), t: Duration| {
            f <= 1e-16 && rot <= 1e-6 && tr <= 1e-6 && t <= limit
        };

        let (p, x) = gen_handeye(5, 100 + seed);
        let t = Instant::now();
        let res = solve(&p, &config, None).expect("solve");
        let el = t.elapsed();
        slowest = slowest.max(el);
        successes[0] += ok(res.objective, pose_error(&res.solution[0], &x), el) as usize;

        let (p, x, y) = gen_handeye_world(8, 200 + seed);
        let t = Instant::now();
        let res = solve(&p, &config, None).expect("solve");
        let el = t.elapsed();
        slowest = slowest.max(el);
        let (ex, ey) = (
            pose_error(&res.solution[0], &x),
            pose_error(&res.solution[1], &y),
        );
        successes[1] += ok(res.objective, (ex.0.max(ey.0), ex.1.max(ey.1)), el) as usize;

        let (p, x) = gen_posegraph(10, 11, 300 + seed);
        let t = Instant::now();
        let res = solve(&p, &config, None).expect("solve");
        let el = t.elapsed();
        slowest = slowest.max(el);
        successes[2] += ok(res.objective, max_pose_error(&res.solution, &x), el) as usize;
    }
    outcome(
        successes.iter().all(|s| *s >= 9),
        format!(
            "recovered: hand-eye {}/10, hand-eye/world {}/10, pose graph {}/10 (need 9); slowest solve {:.3}s",
            successes[0],
            successes[1],
            successes[2],
            slowest.as_secs_f64()
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut ok = 0;
    let mut worst = (0.0f64, 0.0f64);
    for seed in 0..10u64 {
        let (clean, x) = gen_handeye(20, 500 + seed);
        let noisy = noisy_handeye(&clean, &NoiseModel::new(0.01, 0.01, 600 + seed));
        let config = SolverConfig {
            seed,
            ..SolverConfig::default()
        };
        let res = solve(&noisy, &config, None).expect("solve");
        let (rot, tr) = pose_error(&res.solution[0], &x);
        worst = (worst.0.max(rot), worst.1.max(tr));
        ok += (rot <= 0.05 && tr <= 0.05) as usize;
    }
    outcome(
        ok >= 8,
        format!(
            "within 0.05: {ok}/10 (need 8); worst {:.2e} rad, {:.2e}",
            worst.0, worst.1
        ),
    )
}

struct DecayStats {
    bound_failures: usize,
    monotone_failures: usize,
    worst_ratio: f64,
}

/// Draws the 100 closed-loop cases used by the decay criterion.
fn decay_cases() -> Vec<(Auq, Auq, Gains)> {
    let mut r = rng(6);
    (0..100)
        .map(|_| {
            let x0 = Auq::random(&mut r, 1.0);
            let xd = Auq::random(&mut r, 1.0);
            let kr = Vector3::from_fn(|_, _| r.random_range(0.2..2.0));
            let kt = Vector3::from_fn(|_, _| r.random_range(0.2..2.0));
            (x0, xd, Gains::new(kr, kt).unwrap())
        })
        .collect()
}

fn decay_stats(traces: impl Iterator<Item = (Vec<(f64, f64)>, f64)>) -> DecayStats {
    let mut s = DecayStats {
        bound_failures: 0,
        monotone_failures: 0,
        worst_ratio: 0.0,
    };
    for (samples, k_min) in traces {
        let (_, v0) = samples[0];
        let (tf, vt) = *samples.last().unwrap();
        let bound = v0 * (-2.0 * k_min * tf).exp();
        s.worst_ratio = s.worst_ratio.max(vt / bound);
        s.bound_failures += (vt > bound * 1.01) as usize;
        s.monotone_failures += samples.windows(2).any(|w| w[1].1 > w[0].1 + 1e-9) as usize;
    }
    s
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let cases = decay_cases();
    let stats = decay_stats(cases.iter().map(|(x0, xd, g)| {
        let trace = Simulation::new(*g, 1e-3, 10_000)
            .unwrap()
            .run(x0, xd)
            .unwrap();
        let samples = trace.samples.iter().map(|s| (s.time, s.v)).collect();
        (samples, g.k_min())
    }));
    let elapsed = start.elapsed();
    outcome(
        stats.bound_failures == 0 && stats.monotone_failures == 0 && elapsed.as_secs() <= 60,
        format!(
            "bound violated in {}/100, V increased in {}/100, worst V(T)/bound {:.3e}; {:.1}s",
            stats.bound_failures,
            stats.monotone_failures,
            stats.worst_ratio,
            elapsed.as_secs_f64()
        ),
    )
}

/// The decay bound evaluated on the model with the `−|w|²t` term, for
/// comparison with criterion 6.
fn reference_model_decay() -> String {
    let cases = decay_cases();
    let stats = decay_stats(cases.iter().map(|(x0, xd, g)| {
        let (kr, kt) = (g.kr(), g.kt());
        let rhs = |p: &Quaternion, t: &Vector3| {
            let xe = Auq::new(UnitQuaternion::normalize(*p).unwrap(), *t);
            let w = -2.0 * kr.component_mul(&error_rotation_vector(&xe));
            let pd = (*p * Quaternion::pure(w)).scale(0.5);
            let td = -kt.component_mul(t) + w.dot(t) * w - w.norm_squared() * t;
            (pd, td)
        };
        let xe0 = x0.inverse() * *xd;
        let (mut p, mut t) = (xe0.rotation().quaternion(), xe0.translation());
        let h = 1e-3;
        let weights = LyapunovWeights::default();
        let v = |p: &Quaternion, t: &Vector3| {
            auq::kinematics::lyapunov(
                &Auq::new(UnitQuaternion::normalize(*p).unwrap(), *t),
                &weights,
            )
        };
        let mut samples = vec![(0.0, v(&p, &t))];
        for step in 1..=10_000 {
            let (k1p, k1t) = rhs(&p, &t);
            let (k2p, k2t) = rhs(&(p + k1p.scale(h / 2.0)), &(t + k1t * (h / 2.0)));
            let (k3p, k3t) = rhs(&(p + k2p.scale(h / 2.0)), &(t + k2t * (h / 2.0)));
            let (k4p, k4t) = rhs(&(p + k3p.scale(h)), &(t + k3t * h));
            p = p + (k1p + k2p.scale(2.0) + k3p.scale(2.0) + k4p).scale(h / 6.0);
            p = p.scale(1.0 / p.norm());
            t += (k1t + 2.0 * k2t + 2.0 * k3t + k4t) * (h / 6.0);
            samples.push((step as f64 * h, v(&p, &t)));
        }
        (samples, g.k_min())
    }));
    format!(
        "same cases with the −|w|²t model: bound violated in {}/100, V increased in {}/100",
        stats.bound_failures, stats.monotone_failures
    )
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let (mut e26, mut e22, mut corrected) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..SAMPLES {
        let xe = Auq::random(&mut r, 1.0);
        let kr = Vector3::from_fn(|_, _| r.random_range(0.2..2.0));
        let kt = Vector3::from_fn(|_, _| r.random_range(0.2..2.0));
        let g = Gains::new(kr, kt).unwrap();
        let xi = proportional_control(&xe, &g);
        let te = xe.translation();
        let w = xi.w;
        let te_dot = state_derivative(&xe.aq(), &xi).t;

        let reference = -kt.component_mul(&te) + w.dot(&te) * w - w.norm_squared() * te;
        e26 = e26.max((te_dot - reference).amax());
        let half = -kt.component_mul(&te) + w.dot(&te) * w - 0.5 * w.norm_squared() * te;
        corrected = corrected.max((te_dot - half).amax());

        let d = rand_vec(&mut r);
        let defining = twist_from_error_rates(&xe, &d, &w).v;
        let expanded = 2.0 * d - 2.0 * w.dot(&te) * w + 2.0 * w.norm_squared() * te;
        e22 = e22.max((defining - expanded).amax());
    }
    let reproduces = e26 <= TOL;
    let discrepancy_confirmed = e22 > TOL;
    outcome(
        reproduces && discrepancy_confirmed,
        format!(
            "ṫ vs −K_t t + (w·t)w − |w|²t: {e26:.1e}; vs −K_t t + (w·t)w − ½|w|²t: {corrected:.1e}; \
             expanded twist form vs defining relation: {e22:.1e} (expected to disagree: {})",
            if discrepancy_confirmed { "yes" } else { "no" }
        ),
    )
}

fn criterion_8() -> Outcome {
    let delta = 1e-6;
    let target = 2.0 * PI - 1e-3;
    let axes = [Vector3::x(), Vector3::z(), Vector3::new(1.0, -2.0, 0.5)];
    let mut min_jump = (f64::INFINITY, f64::INFINITY);
    for axis in &axes {
        let row = discontinuity_report(axis, &[delta]).unwrap()[0];
        min_jump = (
            min_jump.0.min(row.rotvec_jump),
            min_jump.1.min(row.oplus_jump),
        );
    }

    let step = 1e-4;
    let mut r = rng(8);
    let (mut mod_rotvec, mut mod_oplus) = (0.0f64, 0.0f64);
    let mut checked = 0;
    while checked < SAMPLES {
        let q = random_unit_from(&mut r);
        if q.q0 <= -0.5 {
            continue;
        }
        checked += 1;
        let dir = Quaternion::from_array(rand_vec4(&mut r));
        let moved =
            UnitQuaternion::normalize(q.quaternion() + dir.scale(step / dir.norm())).unwrap();
        let change = (rotvec_from_quat(&moved) - rotvec_from_quat(&q)).norm();
        mod_rotvec = mod_rotvec.max(change);

        // Two rotations of at most 1.5 rad each stay clear of the wrap.
        let a = rand_vec(&mut r).normalize() * r.random_range(0.0..1.5);
        let b = rand_vec(&mut r).normalize() * r.random_range(0.0..1.5);
        let db = rand_vec(&mut r).normalize() * step;
        let change = (rot_oplus(&a, &(b + db)).unwrap() - rot_oplus(&a, &b).unwrap()).norm();
        mod_oplus = mod_oplus.max(change);
    }
    let pass =
        min_jump.0 >= target && min_jump.1 >= target && mod_rotvec <= 1e-3 && mod_oplus <= 1e-3;
    outcome(
        pass,
        format!(
            "jumps at δ=1e-6: rotation vector {:.9}, ⊕ {:.9} (need ≥ {target:.9}); \
             continuity modulus per 1e-4 step: rotation vector {mod_rotvec:.2e}, ⊕ {mod_oplus:.2e}",
            min_jump.0, min_jump.1
        ),
    )
}

fn rand_vec4(r: &mut ChaCha8Rng) -> [f64; 4] {
    [
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
    ]
}

fn run_cli(dir: &Path, args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_auq"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("run auq")
        .status
        .code()
        .unwrap_or(-1)
}

fn pipeline_outputs(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let steps: [&[&str]; 8] = [
        &[
            "gen",
            "--problem",
            "handeye",
            "-m",
            "5",
            "--seed",
            "7",
            "-o",
            "he.txt",
        ],
        &["calibrate", "he.txt", "-o", "he.sol", "--seed", "3"],
        &[
            "gen",
            "--problem",
            "handeye-world",
            "-m",
            "8",
            "--seed",
            "7",
            "-o",
            "hw.txt",
        ],
        &["calibrate-world", "hw.txt", "-o", "hw.sol", "--seed", "3"],
        &[
            "gen",
            "--problem",
            "posegraph",
            "-n",
            "10",
            "--loop-edges",
            "11",
            "--seed",
            "7",
            "-o",
            "pg.txt",
        ],
        &["slam", "pg.txt", "-o", "pg.sol", "--seed", "3"],
        &[
            "simulate",
            "--seed",
            "4",
            "--kr",
            "0.5,1,1.5",
            "--kt",
            "1",
            "--steps",
            "2000",
            "-o",
            "trace.csv",
        ],
        &["probe", "--axis", "1,1,0", "-o", "probe.csv"],
    ];
    for args in steps {
        let code = run_cli(dir, args);
        if code != 0 {
            return Err(format!("`auq {}` exited with {code}", args.join(" ")));
        }
    }
    let files = [
        "he.txt",
        "he.txt.truth",
        "he.sol",
        "hw.txt",
        "hw.txt.truth",
        "hw.sol",
        "pg.txt",
        "pg.txt.truth",
        "pg.sol",
        "trace.csv",
        "probe.csv",
    ];
    files
        .iter()
        .map(|f| {
            std::fs::read(dir.join(f))
                .map(|b| (f.to_string(), b))
                .map_err(|e| format!("{f}: {e}"))
        })
        .collect()
}

fn solution_error(dir: &Path, stem: &str) -> f64 {
    let sol =
        auq::io::parse_solution(&std::fs::read_to_string(dir.join(format!("{stem}.sol"))).unwrap())
            .unwrap();
    let truth = auq::io::parse_truth(
        &std::fs::read_to_string(dir.join(format!("{stem}.txt.truth"))).unwrap(),
    )
    .unwrap();
    sol.blocks
        .iter()
        .zip(&truth)
        .map(|((_, x), (_, t))| {
            let (a, b) = pose_error(x, t);
            a.max(b)
        })
        .fold(0.0, f64::max)
}

fn criterion_9() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = match pipeline_outputs(a.path()) {
        Ok(o) => o,
        Err(e) => return outcome(false, e),
    };
    let second = match pipeline_outputs(b.path()) {
        Ok(o) => o,
        Err(e) => return outcome(false, e),
    };
    let differing: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(x, y)| x.1 != y.1)
        .map(|(x, _)| x.0.as_str())
        .collect();
    let errors: Vec<f64> = ["he", "hw", "pg"]
        .iter()
        .map(|s| solution_error(a.path(), s))
        .collect();
    let recovered = errors.iter().all(|e| *e <= 1e-6);
    outcome(
        differing.is_empty() && recovered,
        format!(
            "{} files compared, differing: {:?}; recovery error hand-eye {:.1e}, hand-eye/world {:.1e}, pose graph {:.1e}",
            first.len(),
            differing,
            errors[0],
            errors[1],
            errors[2]
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "algebra identities", criterion_1),
        (2, "matrix and dual quaternion homomorphisms", criterion_2),
        (3, "gradient finite differences", criterion_3),
        (4, "noise-free recovery", criterion_4),
        (5, "noisy hand-eye recovery", criterion_5),
        (6, "closed-loop decay", criterion_6),
        (7, "closed-loop translation rate", criterion_7),
        (8, "rotation-vector discontinuities", criterion_8),
        (9, "CLI determinism", criterion_9),
    ];
    let mut unexpected = Vec::new();
    for (n, name, f) in criteria {
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = match (o.pass, KNOWN_RED.contains(&n)) {
            (false, true) => " [known]",
            (true, true) => " [expected to fail]",
            _ => "",
        };
        println!("criterion {n} ({name}): {verdict}{note}  {}", o.detail);
        if !o.pass && !KNOWN_RED.contains(&n) {
            unexpected.push(n);
        }
    }
    println!("info: {}", reference_model_decay());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
