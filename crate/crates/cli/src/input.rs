use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use torus_orbits::biquotient::{ActionParams, CircleActionParams, T2ActionParams};
use torus_orbits::orbit_space::{parse_tuple_list, OrbitSpaceFile, WeightedOrbitSpace};

/// Malformed input; reported with exit status 2.
#[derive(Debug)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error: {}", self.0)
    }
}

impl std::error::Error for ParseError {}

fn parse_err(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(ParseError(msg.into()))
}

/// Reads `text` as a file if such a file exists, otherwise returns it unchanged.
fn inline_or_file(text: &str) -> anyhow::Result<String> {
    let path = Path::new(text);
    if path.is_file() {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    } else {
        Ok(text.to_string())
    }
}

/// An orbit space given as a JSON object `{"rank":..,"weights":[[..],..]}`
/// (inline or in a file) or as a tuple list `(1,0),(0,1),...`.
pub fn orbit_space(text: &str, rank: Option<usize>) -> anyhow::Result<WeightedOrbitSpace> {
    let body = inline_or_file(text)?;
    let trimmed = body.trim();
    let space = if trimmed.starts_with('{') {
        let file: OrbitSpaceFile =
            serde_json::from_str(trimmed).map_err(|e| parse_err(e.to_string()))?;
        if let Some(r) = rank.filter(|&r| r != file.rank) {
            return Err(parse_err(format!(
                "--rank {r} disagrees with rank {} in the input",
                file.rank
            )));
        }
        WeightedOrbitSpace::try_from(file)
    } else {
        let weights = parse_tuple_list(trimmed).map_err(|e| parse_err(e.to_string()))?;
        let r = rank.or_else(|| weights.first().map(Vec::len)).unwrap_or(0);
        WeightedOrbitSpace::new(r, weights)
    };
    space.map_err(|e| parse_err(e.to_string()))
}

/// A single integer tuple such as `(1,-1)`.
pub fn tuple(text: &str, len: usize) -> anyhow::Result<Vec<i64>> {
    let mut tuples = parse_tuple_list(text).map_err(|e| parse_err(e.to_string()))?;
    if tuples.len() != 1 || tuples[0].len() != len {
        return Err(parse_err(format!(
            "expected one tuple of {len} integers, got {text:?}"
        )));
    }
    Ok(tuples.remove(0))
}

/// Action parameters as JSON (`{"kind":"circle",...}` / `{"kind":"t2",...}`),
/// a file holding such JSON, or a tuple `(a,b,c,d)` / `(a,b,c,d,n,k,m,l)`.
pub fn action(text: &str) -> anyhow::Result<ActionParams> {
    let body = inline_or_file(text)?;
    let trimmed = body.trim();
    if trimmed.starts_with('{') {
        return serde_json::from_str(trimmed).map_err(|e| parse_err(e.to_string()));
    }
    let mut tuples = parse_tuple_list(trimmed).map_err(|e| parse_err(e.to_string()))?;
    match (tuples.len(), tuples.first().map(Vec::len)) {
        (1, Some(4)) => {
            let t = tuples.remove(0);
            Ok(ActionParams::Circle(CircleActionParams::new(
                t[0], t[1], t[2], t[3],
            )))
        }
        (1, Some(8)) => {
            let t = tuples.remove(0);
            Ok(ActionParams::T2(T2ActionParams::new(
                t[0], t[1], t[2], t[3], t[4], t[5], t[6], t[7],
            )))
        }
        _ => Err(parse_err(format!(
            "expected (a,b,c,d) or (a,b,c,d,n,k,m,l), got {text:?}"
        ))),
    }
}

pub fn circle(text: &str) -> anyhow::Result<CircleActionParams> {
    match action(text)? {
        ActionParams::Circle(p) => Ok(p),
        ActionParams::T2(_) => Err(parse_err("expected circle parameters, got a T2 action")),
    }
}

pub fn t2(text: &str) -> anyhow::Result<T2ActionParams> {
    match action(text)? {
        ActionParams::T2(p) => Ok(p),
        ActionParams::Circle(_) => Err(parse_err("expected T2 parameters, got a circle action")),
    }
}
