use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::CoefficientSet;
use crate::error::{Error, Result};

/// Load a `k,value` file whose indices start at 0.
pub fn load_coefficients(path: impl AsRef<Path>) -> Result<CoefficientSet> {
    load_coefficients_from(path, 0)
}

/// Load a `k,value` file whose indices must start at `first_index`.
pub fn load_coefficients_from(path: impl AsRef<Path>, first_index: u64) -> Result<CoefficientSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_coefficients(&text, &path.display().to_string(), first_index)
}

/// Parse coefficient CSV text. `origin` names the source in error messages.
///
/// Accepted: optional first line `# epsilon=<float>`, then one `k,value`
/// per line with contiguous ascending `k` from `first_index`. Blank lines
/// are skipped; LF and CRLF endings both work.
pub fn parse_coefficients(text: &str, origin: &str, first_index: u64) -> Result<CoefficientSet> {
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: origin.to_string(),
        line,
        reason,
    };
    let mut epsilon = 0.0;
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if line_no != 1 {
                return Err(parse_err(
                    line_no,
                    "metadata is only allowed on the first line".into(),
                ));
            }
            let value = meta
                .trim()
                .strip_prefix("epsilon=")
                .ok_or_else(|| parse_err(line_no, format!("unrecognised metadata `{line}`")))?;
            epsilon = value
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|e| *e >= 0.0 && e.is_finite())
                .ok_or_else(|| parse_err(line_no, format!("invalid epsilon `{}`", value.trim())))?;
            continue;
        }
        let (k_str, v_str) = line
            .split_once(',')
            .ok_or_else(|| parse_err(line_no, format!("expected `k,value`, got `{line}`")))?;
        let k: u64 = k_str
            .trim()
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid index `{}`", k_str.trim())))?;
        let v: f64 = v_str
            .trim()
            .parse()
            .map_err(|_| parse_err(line_no, format!("non-numeric value `{}`", v_str.trim())))?;
        if !v.is_finite() {
            return Err(parse_err(
                line_no,
                format!("non-finite value `{}`", v_str.trim()),
            ));
        }
        let expected = first_index + values.len() as u64;
        if k < first_index {
            return Err(parse_err(
                line_no,
                format!("index {k} is below the first allowed index {first_index}"),
            ));
        }
        if k < expected {
            return Err(parse_err(
                line_no,
                format!("duplicate or out-of-order index {k}"),
            ));
        }
        if k > expected {
            return Err(parse_err(
                line_no,
                format!("gap in indices: expected {expected}, got {k}"),
            ));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(parse_err(0, "no coefficients found".into()));
    }
    Ok(CoefficientSet {
        values,
        first_index,
        epsilon,
        seed: None,
        source: origin.to_string(),
        exact: None,
    })
}

/// Serialise with shortest round-trip float formatting.
pub fn format_coefficients(set: &CoefficientSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# epsilon={:?}", set.epsilon);
    for (k, v) in set.indexed() {
        let _ = writeln!(out, "{k},{v:?}");
    }
    out
}

pub fn write_coefficients(set: &CoefficientSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_coefficients(set)).map_err(|e| Error::io(path, e))
}
