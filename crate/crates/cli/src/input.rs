use std::fs;
use std::io::Read;

use git_height::heights::ProjectivePoint;
use git_height::places::{parse_rational, Prime};
use git_height::torus_git::TorusAction;
use git_height::{LogValue, MatrixQ, Rational};
use serde_json::Value;

use crate::error::CliError;

/// Resolves `-` to stdin and `@path` to the file contents.
pub fn resolve(arg: &str) -> Result<String, CliError> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Parse(format!("reading stdin: {e}")))?;
        Ok(s)
    } else if let Some(path) = arg.strip_prefix('@') {
        fs::read_to_string(path).map_err(|e| CliError::Parse(format!("reading {path}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn json(text: &str, what: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

/// `2:2:1`, or the same as a JSON string.
pub fn point(arg: &str) -> Result<ProjectivePoint, CliError> {
    let text = resolve(arg)?;
    let text = text.trim();
    let text = text.strip_prefix('"').and_then(|t| t.strip_suffix('"')).unwrap_or(text);
    text.parse().map_err(|e| CliError::Parse(format!("point: {e}")))
}

fn point_value(v: &Value) -> Result<ProjectivePoint, CliError> {
    match v {
        Value::String(s) => point(s),
        Value::Array(items) => {
            let coords = items
                .iter()
                .enumerate()
                .map(|(i, x)| rational_value(x, &format!("point coordinate {i}")))
                .collect::<Result<Vec<_>, _>>()?;
            ProjectivePoint::new(coords).map_err(|e| CliError::Parse(format!("point: {e}")))
        }
        _ => Err(CliError::Parse("point must be a string like \"2:2:1\" or an array".into())),
    }
}

fn rational_value(v: &Value, at: &str) -> Result<Rational, CliError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        _ => return Err(CliError::Parse(format!("{at}: expected an integer or a rational string, got {v}"))),
    };
    parse_rational(&text).map_err(|e| CliError::Parse(format!("{at}: {e}")))
}

/// `{"rank": r, "weights": [[..], ..]}` as JSON text, `@file` or `-`.
pub fn action(arg: &str) -> Result<TorusAction, CliError> {
    action_value(&json(&resolve(arg)?, "action")?)
}

fn action_value(v: &Value) -> Result<TorusAction, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Parse(format!("action: {e}")))
}

/// Rows separated by `;`, entries by `,`: `-2,1,4` is rank one, `1,0;0,1` rank two.
pub fn weights(arg: &str) -> Result<TorusAction, CliError> {
    let rows: Vec<&str> = arg.split(';').collect();
    let parsed = if rows.len() == 1 {
        rows[0].split(',').map(|w| parse_int(w).map(|w| vec![w])).collect::<Result<Vec<_>, _>>()?
    } else {
        rows.iter()
            .map(|r| r.split(',').map(parse_int).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?
    };
    let rank = parsed.first().map_or(0, Vec::len);
    TorusAction::new(rank, parsed).map_err(|e| CliError::Parse(format!("weights: {e}")))
}

fn parse_int(s: &str) -> Result<i64, CliError> {
    s.trim().parse().map_err(|_| CliError::Parse(format!("`{s}` is not an integer")))
}

pub fn int_list(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',').map(parse_int).collect()
}

/// Row-major JSON array of rational strings or integers.
pub fn matrix(arg: &str) -> Result<MatrixQ, CliError> {
    matrix_value(&json(&resolve(arg)?, "matrix")?)
}

fn matrix_value(v: &Value) -> Result<MatrixQ, CliError> {
    let rows = v.as_array().ok_or_else(|| CliError::Parse("matrix must be an array of rows".into()))?;
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let row = row.as_array().ok_or_else(|| CliError::Parse(format!("matrix row {i} is not an array")))?;
            row.iter()
                .enumerate()
                .map(|(j, x)| rational_value(x, &format!("matrix entry ({i}, {j})")))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    MatrixQ::from_rows(rows).ok_or_else(|| CliError::Parse("matrix rows have different lengths".into()))
}

pub fn prime(p: u64) -> Result<Prime, CliError> {
    Prime::new(p).map_err(|e| CliError::Parse(e.to_string()))
}

/// A torus problem or a matrix.
pub enum Problem {
    Torus(TorusAction, ProjectivePoint),
    Matrix(MatrixQ),
}

/// Assembles the problem from flags, falling back to a JSON object on stdin
/// with keys `action` and `point`, or `matrix`.
pub fn problem(
    action_arg: Option<&str>,
    weights_arg: Option<&str>,
    matrix_arg: Option<&str>,
    point_arg: Option<&str>,
) -> Result<Problem, CliError> {
    if let Some(m) = matrix_arg {
        if action_arg.is_some() || weights_arg.is_some() || point_arg.is_some() {
            return Err(CliError::Parse("--matrix excludes --action, --weights and a point".into()));
        }
        return Ok(Problem::Matrix(matrix(m)?));
    }
    let a = match (action_arg, weights_arg) {
        (Some(_), Some(_)) => return Err(CliError::Parse("give either --action or --weights".into())),
        (Some(a), None) => Some(action(a)?),
        (None, Some(w)) => Some(weights(w)?),
        (None, None) => None,
    };
    match (a, point_arg) {
        (Some(a), Some(p)) => Ok(Problem::Torus(a, point(p)?)),
        (Some(_), None) => Err(CliError::Parse("missing point".into())),
        (None, Some(_)) => Err(CliError::Parse("missing --action or --weights".into())),
        (None, None) => {
            let v = json(&resolve("-")?, "stdin")?;
            if let Some(m) = v.get("matrix") {
                Ok(Problem::Matrix(matrix_value(m)?))
            } else {
                let a =
                    v.get("action").ok_or_else(|| CliError::Parse("stdin JSON needs `action` or `matrix`".into()))?;
                let p = v.get("point").ok_or_else(|| CliError::Parse("stdin JSON needs `point`".into()))?;
                Ok(Problem::Torus(action_value(a)?, point_value(p)?))
            }
        }
    }
}

/// One slope: terms joined by `+`, each `q*log p` (also `log p`, `-log p`) or a
/// decimal number, e.g. `1/2*log2+-1/3*log3`.
pub fn slope(s: &str) -> Result<LogValue, CliError> {
    let bad = || CliError::Parse(format!("cannot parse slope `{s}`"));
    let mut total = LogValue::zero();
    for term in s.split('+').map(str::trim) {
        if let Some((coef, p)) = term.split_once("log") {
            let coef = coef.trim().trim_end_matches('*').trim();
            let q = match coef {
                "" => Rational::from_integer(1.into()),
                "-" => Rational::from_integer((-1).into()),
                c => parse_rational(c).map_err(|_| bad())?,
            };
            let p: u64 = p.trim().trim_start_matches('(').trim_end_matches(')').parse().map_err(|_| bad())?;
            total += LogValue::log_prime(prime(p)?, q);
        } else {
            total += LogValue::from_arch(term.parse::<f64>().map_err(|_| bad())?);
        }
    }
    Ok(total)
}
