//! Line-oriented text formats: problem files, solution files, ground-truth
//! sidecars, control traces and discontinuity reports.
//!
//! Reals are written with 17 significant digits so every value reads back
//! bit-identical. Quaternions are `q0 q1 q2 q3`, augmented quaternions
//! `p0 p1 p2 p3 t1 t2 t3`. Blank lines and lines starting with `#` are
//! ignored by every reader.
//!
//! Problem file keywords:
//!
//! ```text
//! PROBLEM handeye | handeye-world | posegraph   (optional, inferred otherwise)
//! SIGMA <σ>                                     (optional, default 1)
//! PAIR a0..a6 b0..b6                            (hand-eye kinds)
//! VERTEX id x0..x6                              (pose graph initial guess)
//! EDGE i j y0..y6                               (pose graph measurement)
//! ANCHOR id                                     (pose graph, default 0)
//! ```

use std::fmt::Write as _;

use crate::augmented::{AugmentedQuaternion, AugmentedUnitQuaternion, SigmaNorm};
use crate::error::ParseError;
use crate::kinematics::ControlTrace;
use crate::motion::JumpRow;
use crate::optim::{
    AuqVector, Edge, HandEyeProblem, HandEyeWorldProblem, PoseGraphProblem, Problem, SolveResult,
    SolveStatus,
};

/// First line of every file this crate writes.
pub fn version_header() -> String {
    format!("# auq {}", env!("CARGO_PKG_VERSION"))
}

/// 17 significant digits in scientific notation.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_reals(out: &mut String, xs: &[f64]) {
    for x in xs {
        out.push(' ');
        out.push_str(&fmt_real(*x));
    }
}

/// Splits a list of reals on whitespace and/or commas.
pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| format!("invalid number {t:?}"))
        })
        .collect()
}

/// Tokens of one line with their 1-based starting columns.
struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn err(&self, index: usize, message: impl Into<String>) -> ParseError {
        let column = self.tokens.get(index).map_or(1, |t| t.0);
        ParseError::new(self.number, column, message)
    }

    fn keyword(&self) -> &'a str {
        self.tokens[0].1
    }

    fn expect_len(&self, n: usize) -> Result<(), ParseError> {
        if self.tokens.len() != n {
            let idx = self.tokens.len().min(n);
            return Err(self.err(
                idx,
                format!(
                    "{} expects {} fields, found {}",
                    self.keyword(),
                    n - 1,
                    self.tokens.len() - 1
                ),
            ));
        }
        Ok(())
    }

    fn real(&self, i: usize) -> Result<f64, ParseError> {
        let tok = self.tokens[i].1;
        tok.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err(i, format!("invalid number {tok:?}")))
    }

    fn index(&self, i: usize) -> Result<usize, ParseError> {
        let tok = self.tokens[i].1;
        tok.parse::<usize>()
            .map_err(|_| self.err(i, format!("invalid index {tok:?}")))
    }

    fn auq(&self, start: usize) -> Result<AugmentedUnitQuaternion, ParseError> {
        let mut a = [0.0; 7];
        for (k, v) in a.iter_mut().enumerate() {
            *v = self.real(start + k)?;
        }
        AugmentedUnitQuaternion::try_from_array(a).map_err(|e| self.err(start, e.to_string()))
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            return None;
        }
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in raw.char_indices() {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push((s + 1, &raw[s..pos]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            tokens.push((s + 1, &raw[s..]));
        }
        Some(Line {
            number: i + 1,
            tokens,
        })
    })
}

/// A parsed problem plus any initial guesses it carried.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub problem: Problem,
    /// Pose-graph `VERTEX` lines, with the identity for vertices not listed.
    pub initial: Option<AuqVector>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    HandEye,
    HandEyeWorld,
    PoseGraph,
}

fn set_kind(kind: &mut Option<(Kind, usize)>, k: Kind, line: &Line) -> Result<(), ParseError> {
    match *kind {
        None => {
            *kind = Some((k, line.number));
            Ok(())
        }
        Some((prev, _)) if prev == k => Ok(()),
        Some((_, first)) => Err(line.err(
            0,
            format!(
                "{} conflicts with the problem kind set on line {first}",
                line.keyword()
            ),
        )),
    }
}

/// Parses a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    let mut kind: Option<(Kind, usize)> = None;
    let mut sigma = SigmaNorm::default();
    let mut pairs = Vec::new();
    let mut edges = Vec::new();
    let mut vertices: Vec<(usize, AugmentedUnitQuaternion)> = Vec::new();
    let mut anchor = 0;
    let mut last_line = 0;

    for line in lines(text) {
        last_line = line.number;
        match line.keyword() {
            "PROBLEM" => {
                line.expect_len(2)?;
                let k = match line.tokens[1].1 {
                    "handeye" => Kind::HandEye,
                    "handeye-world" => Kind::HandEyeWorld,
                    "posegraph" => Kind::PoseGraph,
                    other => return Err(line.err(1, format!("unknown problem kind {other:?}"))),
                };
                set_kind(&mut kind, k, &line)?;
            }
            "SIGMA" => {
                line.expect_len(2)?;
                sigma = SigmaNorm::new(line.real(1)?).map_err(|e| line.err(1, e.to_string()))?;
            }
            "PAIR" => {
                line.expect_len(15)?;
                if !matches!(kind, Some((Kind::HandEye | Kind::HandEyeWorld, _))) {
                    set_kind(&mut kind, Kind::HandEye, &line)?;
                }
                pairs.push((line.auq(1)?, line.auq(8)?));
            }
            "EDGE" => {
                line.expect_len(10)?;
                set_kind(&mut kind, Kind::PoseGraph, &line)?;
                let (i, j) = (line.index(1)?, line.index(2)?);
                if i == j {
                    return Err(line.err(1, "self-loop edge"));
                }
                edges.push(Edge {
                    i,
                    j,
                    y: line.auq(3)?,
                });
            }
            "VERTEX" => {
                line.expect_len(9)?;
                set_kind(&mut kind, Kind::PoseGraph, &line)?;
                vertices.push((line.index(1)?, line.auq(2)?));
            }
            "ANCHOR" => {
                line.expect_len(2)?;
                set_kind(&mut kind, Kind::PoseGraph, &line)?;
                anchor = line.index(1)?;
            }
            other => return Err(line.err(0, format!("unknown keyword {other:?}"))),
        }
    }

    let eof = |msg: &str| ParseError::new(last_line + 1, 1, msg);
    let (kind, _) = kind.ok_or_else(|| eof("file defines no problem"))?;
    let parsed = match kind {
        Kind::HandEye | Kind::HandEyeWorld => {
            if pairs.is_empty() {
                return Err(eof("no PAIR lines"));
            }
            let problem = if kind == Kind::HandEye {
                Problem::HandEye(HandEyeProblem { pairs, sigma })
            } else {
                Problem::HandEyeWorld(HandEyeWorldProblem { pairs, sigma })
            };
            ProblemFile {
                problem,
                initial: None,
            }
        }
        Kind::PoseGraph => {
            let n = edges
                .iter()
                .flat_map(|e| [e.i, e.j])
                .chain(vertices.iter().map(|v| v.0))
                .chain([anchor])
                .max()
                .map_or(0, |m| m + 1);
            let initial = (!vertices.is_empty()).then(|| {
                let mut x = AuqVector::identity(n);
                for (id, v) in &vertices {
                    x.0[*id] = *v;
                }
                x
            });
            ProblemFile {
                problem: Problem::PoseGraph(PoseGraphProblem {
                    n,
                    edges,
                    sigma,
                    anchor,
                }),
                initial,
            }
        }
    };
    Ok(parsed)
}

/// Writes `problem` (and optional pose-graph initial guesses).
pub fn write_problem(problem: &Problem, initial: Option<&AuqVector>) -> String {
    let mut out = version_header();
    out.push('\n');
    let _ = writeln!(out, "PROBLEM {}", problem.kind());
    let _ = writeln!(out, "SIGMA {}", fmt_real(problem.sigma().value()));
    match problem {
        Problem::HandEye(HandEyeProblem { pairs, .. })
        | Problem::HandEyeWorld(HandEyeWorldProblem { pairs, .. }) => {
            for (a, b) in pairs {
                out.push_str("PAIR");
                push_reals(&mut out, &a.to_array());
                push_reals(&mut out, &b.to_array());
                out.push('\n');
            }
        }
        Problem::PoseGraph(p) => {
            let _ = writeln!(out, "ANCHOR {}", p.anchor);
            if let Some(x) = initial {
                for (id, v) in x.0.iter().enumerate() {
                    let _ = write!(out, "VERTEX {id}");
                    push_reals(&mut out, &v.to_array());
                    out.push('\n');
                }
            }
            for e in &p.edges {
                let _ = write!(out, "EDGE {} {}", e.i, e.j);
                push_reals(&mut out, &e.y.to_array());
                out.push('\n');
            }
        }
    }
    out
}

/// Labels solution blocks the way solution and truth files name them.
pub fn block_labels(problem: &Problem) -> Vec<String> {
    match problem {
        Problem::HandEye(_) => vec!["x".into()],
        Problem::HandEyeWorld(_) => vec!["x".into(), "y".into()],
        Problem::PoseGraph(p) => (0..p.n).map(|i| i.to_string()).collect(),
    }
}

/// `TRUTH <label> x0..x6` lines.
pub fn write_truth(labels: &[String], x: &AuqVector) -> String {
    let mut out = version_header();
    out.push('\n');
    for (label, v) in labels.iter().zip(&x.0) {
        let _ = write!(out, "TRUTH {label}");
        push_reals(&mut out, &v.to_array());
        out.push('\n');
    }
    out
}

pub fn parse_truth(text: &str) -> Result<Vec<(String, AugmentedUnitQuaternion)>, ParseError> {
    lines(text)
        .map(|line| {
            if line.keyword() != "TRUTH" {
                return Err(line.err(0, format!("unknown keyword {:?}", line.keyword())));
            }
            line.expect_len(9)?;
            Ok((line.tokens[1].1.to_string(), line.auq(2)?))
        })
        .collect()
}

/// Solution file: status lines, then one `SOLUTION` line per hand-eye
/// unknown or one `VERTEX` line per pose.
pub fn write_solution(problem: &Problem, result: &SolveResult) -> String {
    let mut out = version_header();
    out.push('\n');
    let _ = writeln!(out, "PROBLEM {}", problem.kind());
    let _ = writeln!(out, "STATUS {}", result.status);
    let _ = writeln!(out, "OBJECTIVE {}", fmt_real(result.objective));
    let _ = writeln!(out, "GRADIENT_NORM {}", fmt_real(result.gradient_norm));
    let _ = writeln!(out, "ITERATIONS {}", result.iterations);
    let labels = block_labels(problem);
    for (label, v) in labels.iter().zip(&result.solution.0) {
        match problem {
            Problem::PoseGraph(_) => {
                let _ = write!(out, "VERTEX {label}");
            }
            _ => {
                let _ = write!(out, "SOLUTION {label}");
            }
        }
        push_reals(&mut out, &v.to_array());
        out.push('\n');
    }
    out
}

/// Contents of a solution file.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionFile {
    pub status: SolveStatus,
    pub objective: f64,
    pub blocks: Vec<(String, AugmentedUnitQuaternion)>,
}

pub fn parse_solution(text: &str) -> Result<SolutionFile, ParseError> {
    let mut status = None;
    let mut objective = None;
    let mut blocks = Vec::new();
    let mut last = 0;
    for line in lines(text) {
        last = line.number;
        match line.keyword() {
            "PROBLEM" | "GRADIENT_NORM" | "ITERATIONS" => {}
            "STATUS" => {
                line.expect_len(2)?;
                status = Some(
                    line.tokens[1]
                        .1
                        .parse()
                        .map_err(|e: String| line.err(1, e))?,
                );
            }
            "OBJECTIVE" => {
                line.expect_len(2)?;
                objective = Some(line.real(1)?);
            }
            "SOLUTION" | "VERTEX" => {
                line.expect_len(9)?;
                blocks.push((line.tokens[1].1.to_string(), line.auq(2)?));
            }
            other => return Err(line.err(0, format!("unknown keyword {other:?}"))),
        }
    }
    Ok(SolutionFile {
        status: status.ok_or_else(|| ParseError::new(last + 1, 1, "missing STATUS"))?,
        objective: objective.ok_or_else(|| ParseError::new(last + 1, 1, "missing OBJECTIVE"))?,
        blocks,
    })
}

pub const TRACE_HEADER: &str = "time,p0,p1,p2,p3,t1,t2,t3,V";

/// One comma-separated row per sample: time, the seven error components
/// and the Lyapunov value.
pub fn write_trace(trace: &ControlTrace) -> String {
    let mut out = version_header();
    out.push('\n');
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for s in &trace.samples {
        let mut row = vec![s.time];
        row.extend(s.xe.to_array());
        row.push(s.v);
        let cells: Vec<String> = row.iter().map(|v| fmt_real(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Reads rows written by [`write_trace`].
pub fn parse_trace(text: &str) -> Result<Vec<[f64; 9]>, ParseError> {
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != TRACE_HEADER {
                return Err(ParseError::new(i + 1, 1, "expected trace header"));
            }
            header_seen = true;
            continue;
        }
        let values = parse_reals(line).map_err(|e| ParseError::new(i + 1, 1, e))?;
        let row: [f64; 9] = values.try_into().map_err(|v: Vec<f64>| {
            ParseError::new(i + 1, 1, format!("expected 9 columns, found {}", v.len()))
        })?;
        rows.push(row);
    }
    Ok(rows)
}

pub const REPORT_HEADER: &str = "delta,rotvec_jump,oplus_jump";

pub fn write_report(rows: &[JumpRow]) -> String {
    let mut out = version_header();
    out.push('\n');
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_real(r.delta),
            fmt_real(r.rotvec_jump),
            fmt_real(r.oplus_jump)
        );
    }
    out
}

/// Parses 7 reals (comma or whitespace separated) into an AUQ.
pub fn parse_auq(s: &str) -> Result<AugmentedUnitQuaternion, String> {
    let v = parse_reals(s)?;
    let a: [f64; 7] = v
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected 7 components, found {}", v.len()))?;
    AugmentedUnitQuaternion::try_from_array(a).map_err(|e| e.to_string())
}

/// Writes an AQ as 7 space-separated reals.
pub fn format_aq(x: &AugmentedQuaternion) -> String {
    x.to_array()
        .iter()
        .map(|v| fmt_real(*v))
        .collect::<Vec<_>>()
        .join(" ")
}
