//! Eigenvalue tables: `#` comments, a header of `label`, `weight`, `level`
//! and `sign` lines, then one `p value` pair per line with the primes
//! strictly increasing.

use std::fmt::Write as _;
use std::path::Path;

use ringclass_core::hecke::Eigenform;

use crate::error::{CliError, Result};

pub fn parse_table(text: &str, path: &Path) -> Result<Eigenform> {
    let err = |line: usize, message: String| CliError::Parse { path: path.to_path_buf(), line, message };
    let mut label = None;
    let mut weight = None;
    let mut level = None;
    let mut sign = None;
    let mut values: Vec<(u64, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().expect("nonempty line");
        let rest: Vec<&str> = parts.collect();
        let single = || -> Result<&str> {
            match rest.as_slice() {
                [v] => Ok(v),
                _ => Err(err(line_no, format!("expected one value after `{key}`"))),
            }
        };
        match key {
            "label" => label = Some(rest.join(" ")),
            "weight" => weight = Some(single()?.parse::<u32>().map_err(|e| err(line_no, format!("weight: {e}")))?),
            "level" => level = Some(single()?.parse::<u64>().map_err(|e| err(line_no, format!("level: {e}")))?),
            "sign" => sign = Some(single()?.parse::<i32>().map_err(|e| err(line_no, format!("sign: {e}")))?),
            _ => {
                let p = key.parse::<u64>().map_err(|_| err(line_no, format!("unknown header key `{key}`")))?;
                let v = single()?.parse::<f64>().map_err(|e| err(line_no, format!("value of λ({p}): {e}")))?;
                if let Some(&(prev, _)) = values.last() {
                    if p <= prev {
                        return Err(err(line_no, format!("prime {p} after {prev}: primes must increase")));
                    }
                }
                if !ringclass_core::arith::is_prime(p) {
                    return Err(err(line_no, format!("{p} is not prime")));
                }
                let bound = 2.0 + ringclass_core::hecke::RAMANUJAN_TOL;
                if !v.is_finite() || v.abs() > bound {
                    return Err(err(line_no, format!("|λ({p})| = {v} violates the bound 2")));
                }
                values.push((p, v));
            }
        }
    }
    let last = text.lines().count();
    if values.is_empty() {
        return Err(err(last, "no primes".into()));
    }
    let label = label.ok_or_else(|| err(last, "missing `label`".into()))?;
    let weight = weight.ok_or_else(|| err(last, "missing `weight`".into()))?;
    let level = level.ok_or_else(|| err(last, "missing `level`".into()))?;
    let sign = sign.ok_or_else(|| err(last, "missing `sign`".into()))?;
    Ok(Eigenform::from_prime_values(&label, weight, level, Some(sign), &values)?)
}

pub fn read_table(path: &Path) -> Result<Eigenform> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_table(&text, path)
}

/// Writes values with `{:e}` formatting, which round-trips every `f64`.
pub fn format_table(f: &Eigenform) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "label {}", f.label);
    let _ = writeln!(out, "weight {}", f.weight);
    let _ = writeln!(out, "level {}", f.level);
    let _ = writeln!(out, "sign {}", f.sign);
    for (p, v) in f.prime_values() {
        let _ = writeln!(out, "{p} {v:e}");
    }
    out
}

pub fn write_table(f: &Eigenform, path: &Path) -> Result<()> {
    std::fs::write(path, format_table(f)).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let f = Eigenform::delta(500).unwrap();
        let g = parse_table(&format_table(&f), Path::new("mem")).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn rejects_bad_tables() {
        let p = Path::new("t");
        let head = "label x\nweight 2\nlevel 11\nsign 1\n";
        let e = parse_table(head, p).unwrap_err();
        assert!(e.to_string().contains("no primes"), "{e}");
        let e = parse_table(&format!("{head}2 3.0\n"), p).unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 5, .. }), "{e}");
        let e = parse_table(&format!("{head}3 0.1\n2 0.1\n"), p).unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 6, .. }), "{e}");
        let e = parse_table(&format!("{head}2 0.1\n5 0.1\n"), p).unwrap_err();
        assert!(matches!(e, CliError::Core(ringclass_core::Error::Coverage(_))), "{e}");
    }
}
