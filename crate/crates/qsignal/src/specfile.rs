//! The `.game` spec-file format: a small key-value grammar describing the
//! leaf payoffs, the chance move (classical probability or unitary
//! parameters), player parameter modes, and analysis options.
//!
//! Grammar (one statement per line, `#` starts a comment):
//!
//! ```text
//! # chance move: exactly one of the two forms
//! p = 0.5
//! chance = pi/2, pi/6, pi/3
//!
//! # optional
//! p1_mode = theta        # theta | full
//! p2_mode = theta
//! grid = 513
//! tol = 1e-7
//!
//! [leaves]
//! t1 L u = 6 12
//! t1 L d = 4 0
//! t2 L u = 6 0
//! t2 L d = 6 2
//! t1 R u = 10 8
//! t1 R d = 6 2
//! t2 R u = 4 2
//! t2 R d = 6 0
//! ```
//!
//! Angles accept the token `pi` and fractions of it: `pi`, `2pi`, `pi/2`,
//! `3pi/4`, as well as plain decimals.

use serde::Serialize;
use thiserror::Error;

use crate::classical::{leaf_index, Response, Signal, SignalingSpec, TypeLabel};
use crate::hilbert::UnitaryParams;
use crate::qsignaling::{ParamMode, QSchemeConfig};
use crate::Result;

/// A positioned spec-file error: 1-based line, 1-based column.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("line {line}, column {col}: {msg}")]
pub struct SpecError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> SpecError {
    SpecError {
        line,
        col,
        msg: msg.into(),
    }
}

/// The chance move: a classical type probability or a unitary parameter
/// triple. Exactly one form appears in a file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ChanceSpec {
    Probability(f64),
    Unitary(UnitaryParams),
}

/// A parsed and validated spec file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameSpecFile {
    pub chance: ChanceSpec,
    pub leaves: [(f64, f64); 8],
    pub p1_mode: ParamMode,
    pub p2_mode: ParamMode,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
}

impl GameSpecFile {
    /// The type-1 probability of the chance move: `p` directly, or
    /// cos²(θ/2) for a unitary chance (the phases do not affect the
    /// branch probability).
    pub fn p_chance(&self) -> f64 {
        match self.chance {
            ChanceSpec::Probability(p) => p,
            ChanceSpec::Unitary(u) => (u.theta() / 2.0).cos().powi(2),
        }
    }

    /// The classical game with the file's leaves and chance probability.
    pub fn classical_spec(&self) -> Result<SignalingSpec> {
        SignalingSpec::new(self.p_chance(), self.leaves)
    }

    /// The quantum scheme configuration. A probability chance `p` maps to
    /// the θ-only operator with θ = 2·arccos(√p).
    pub fn quantum_config(&self) -> Result<QSchemeConfig> {
        let chance = match self.chance {
            ChanceSpec::Unitary(u) => u,
            ChanceSpec::Probability(p) => {
                UnitaryParams::theta_only(2.0 * p.sqrt().min(1.0).acos())?
            }
        };
        Ok(QSchemeConfig {
            spec: SignalingSpec::new(self.p_chance(), self.leaves)?,
            chance,
            p1_mode: self.p1_mode,
            p2_mode: self.p2_mode,
        })
    }
}

/// Parses an angle token: `pi`, `2pi`, `pi/2`, `3pi/4`, `3/4`, or a
/// plain decimal. Unicode `π` is accepted as a synonym for `pi`.
pub fn parse_angle(s: &str) -> Option<f64> {
    let s = s.trim().replace('π', "pi");
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim().to_string(), Some(d.trim().to_string())),
        None => (s, None),
    };
    let parse_part = |part: &str| -> Option<f64> {
        if let Some(coeff) = part.strip_suffix("pi") {
            let coeff = coeff.trim();
            if coeff.is_empty() {
                Some(std::f64::consts::PI)
            } else if coeff == "-" {
                Some(-std::f64::consts::PI)
            } else {
                coeff.parse::<f64>().ok().map(|c| c * std::f64::consts::PI)
            }
        } else {
            part.parse::<f64>().ok()
        }
    };
    let n = parse_part(&num)?;
    match den {
        Some(d) => {
            let d = parse_part(&d)?;
            if d == 0.0 {
                None
            } else {
                Some(n / d)
            }
        }
        None => Some(n),
    }
}

// Column (1-based) of `needle` within the original line, for error spans.
fn col_of(line: &str, needle: &str) -> usize {
    line.find(needle).map(|i| i + 1).unwrap_or(1)
}

/// Parses spec-file text. Errors carry the 1-based line and column.
pub fn parse_game_spec(text: &str) -> std::result::Result<GameSpecFile, SpecError> {
    let mut chance: Option<ChanceSpec> = None;
    let mut leaves = [(f64::NAN, f64::NAN); 8];
    let mut seen_leaves = [false; 8];
    let mut p1_mode = ParamMode::ThetaOnly;
    let mut p2_mode = ParamMode::ThetaOnly;
    let mut grid: Option<usize> = None;
    let mut tol: Option<f64> = None;
    let mut in_leaves = false;
    let mut any_statement = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        any_statement = true;

        if trimmed.starts_with('[') {
            if trimmed == "[leaves]" {
                in_leaves = true;
                continue;
            }
            return Err(err(
                lineno,
                col_of(raw, trimmed),
                format!("unknown section {trimmed}"),
            ));
        }

        let (key, value) = trimmed.split_once('=').ok_or_else(|| {
            err(lineno, col_of(raw, trimmed), "expected `key = value`")
        })?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(err(lineno, col_of(raw, "="), format!("missing value for `{key}`")));
        }
        let vcol = col_of(raw, value);

        if in_leaves {
            parse_leaf_line(raw, lineno, key, value, &mut leaves, &mut seen_leaves)?;
            continue;
        }

        match key {
            "p" => {
                let p = parse_angle(value)
                    .ok_or_else(|| err(lineno, vcol, format!("invalid number `{value}`")))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(err(lineno, vcol, format!("p = {p} outside [0, 1]")));
                }
                set_chance(&mut chance, ChanceSpec::Probability(p), lineno, vcol)?;
            }
            "chance" => {
                let parts: Vec<&str> = value.split(',').collect();
                if parts.len() != 3 {
                    return Err(err(
                        lineno,
                        vcol,
                        "chance takes three comma-separated angles: theta, alpha, beta",
                    ));
                }
                let mut angles = [0.0f64; 3];
                for (slot, part) in angles.iter_mut().zip(&parts) {
                    *slot = parse_angle(part)
                        .ok_or_else(|| err(lineno, vcol, format!("invalid angle `{}`", part.trim())))?;
                }
                let u = UnitaryParams::new(angles[0], angles[1], angles[2])
                    .map_err(|e| err(lineno, vcol, e.to_string()))?;
                set_chance(&mut chance, ChanceSpec::Unitary(u), lineno, vcol)?;
            }
            "p1_mode" | "p2_mode" => {
                let mode = match value {
                    "theta" => ParamMode::ThetaOnly,
                    "full" => ParamMode::FullSu2,
                    other => {
                        return Err(err(
                            lineno,
                            vcol,
                            format!("invalid mode `{other}` (expected theta or full)"),
                        ))
                    }
                };
                if key == "p1_mode" {
                    p1_mode = mode;
                } else {
                    p2_mode = mode;
                }
            }
            "grid" => {
                let n: usize = value
                    .parse()
                    .map_err(|_| err(lineno, vcol, format!("invalid grid size `{value}`")))?;
                if n < 2 {
                    return Err(err(lineno, vcol, "grid must be at least 2"));
                }
                grid = Some(n);
            }
            "tol" => {
                let t: f64 = value
                    .parse()
                    .map_err(|_| err(lineno, vcol, format!("invalid tolerance `{value}`")))?;
                if !(t.is_finite() && t > 0.0) {
                    return Err(err(lineno, vcol, "tol must be positive and finite"));
                }
                tol = Some(t);
            }
            other => {
                return Err(err(
                    lineno,
                    col_of(raw, other),
                    format!("unknown key `{other}`"),
                ))
            }
        }
    }

    if !any_statement {
        return Err(err(1, 1, "empty spec file"));
    }
    let chance = chance.ok_or_else(|| err(1, 1, "missing chance move: set `p` or `chance`"))?;
    for (i, seen) in seen_leaves.iter().enumerate() {
        if !seen {
            return Err(err(1, 1, format!("missing leaf {}", leaf_name(i))));
        }
    }

    Ok(GameSpecFile {
        chance,
        leaves,
        p1_mode,
        p2_mode,
        grid,
        tol,
    })
}

fn set_chance(
    slot: &mut Option<ChanceSpec>,
    value: ChanceSpec,
    line: usize,
    col: usize,
) -> std::result::Result<(), SpecError> {
    if slot.is_some() {
        return Err(err(line, col, "chance move given more than once"));
    }
    *slot = Some(value);
    Ok(())
}

fn leaf_name(index: usize) -> String {
    let t = if index & 2 == 0 { "t1" } else { "t2" };
    let sig = if index < 4 { "L" } else { "R" };
    let resp = if index & 1 == 0 { "u" } else { "d" };
    format!("{t} {sig} {resp}")
}

fn parse_leaf_line(
    raw: &str,
    lineno: usize,
    key: &str,
    value: &str,
    leaves: &mut [(f64, f64); 8],
    seen: &mut [bool; 8],
) -> std::result::Result<(), SpecError> {
    let kcol = col_of(raw, key.trim());
    let tokens: Vec<&str> = key.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(err(
            lineno,
            kcol,
            "leaf line must be `<t1|t2> <L|R> <u|d> = u1 u2`",
        ));
    }
    let t = match tokens[0] {
        "t1" => TypeLabel::T1,
        "t2" => TypeLabel::T2,
        other => return Err(err(lineno, kcol, format!("invalid type `{other}`"))),
    };
    let sig = match tokens[1] {
        "L" | "l" => Signal::L,
        "R" | "r" => Signal::R,
        other => return Err(err(lineno, kcol, format!("invalid signal `{other}`"))),
    };
    let resp = match tokens[2] {
        "u" | "U" => Response::U,
        "d" | "D" => Response::D,
        other => return Err(err(lineno, kcol, format!("invalid response `{other}`"))),
    };
    let vcol = col_of(raw, value);
    let nums: Vec<&str> = value
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .collect();
    if nums.len() != 2 {
        return Err(err(lineno, vcol, "leaf payoffs must be two numbers"));
    }
    let u1: f64 = nums[0]
        .parse()
        .map_err(|_| err(lineno, vcol, format!("invalid payoff `{}`", nums[0])))?;
    let u2: f64 = nums[1]
        .parse()
        .map_err(|_| err(lineno, vcol, format!("invalid payoff `{}`", nums[1])))?;
    if !u1.is_finite() || !u2.is_finite() {
        return Err(err(lineno, vcol, "leaf payoffs must be finite"));
    }
    let index = leaf_index(t, sig, resp);
    if seen[index] {
        return Err(err(
            lineno,
            kcol,
            format!("duplicate leaf {}", leaf_name(index)),
        ));
    }
    leaves[index] = (u1, u2);
    seen[index] = true;
    Ok(())
}
