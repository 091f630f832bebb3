//! Form specifications on the command line and the eigenvalue caches.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use ringclass_core::hecke::{EllipticCurve, Eigenform, TensorProduct};

use crate::error::{CliError, Result};
use crate::table::{read_table, write_table};

/// Environment variable naming a directory for cached eigenvalue tables.
pub const CACHE_ENV: &str = "RINGCLASS_CACHE_DIR";

/// Largest prime bound accepted for point counting.
pub const CURVE_P_MAX: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum FormSpec {
    Delta,
    Curve { coefficients: [i64; 5], level: Option<u64> },
    File(PathBuf),
}

impl FormSpec {
    /// `delta`, `11a`, `curve:a1,a2,a3,a4,a6[@level]`, `curve:a4,a6[@level]`
    /// or `file:<path>`.
    pub fn parse(s: &str) -> Result<Self> {
        let usage = || CliError::Usage(format!("unrecognized form `{s}`"));
        match s {
            "delta" => return Ok(FormSpec::Delta),
            "11a" => return Ok(FormSpec::Curve { coefficients: [0, -1, 1, -10, -20], level: Some(11) }),
            _ => {}
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(FormSpec::File(PathBuf::from(path)));
        }
        let body = s.strip_prefix("curve:").ok_or_else(usage)?;
        let (coeffs, level) = match body.split_once('@') {
            Some((c, l)) => (c, Some(l.parse::<u64>().map_err(|_| usage())?)),
            None => (body, None),
        };
        let a: Vec<i64> = coeffs.split(',').map(|x| x.trim().parse::<i64>()).collect::<std::result::Result<_, _>>().map_err(|_| usage())?;
        let coefficients = match a.as_slice() {
            [a4, a6] => [0, 0, 0, *a4, *a6],
            [a1, a2, a3, a4, a6] => [*a1, *a2, *a3, *a4, *a6],
            _ => return Err(usage()),
        };
        Ok(FormSpec::Curve { coefficients, level })
    }

    fn key(&self) -> String {
        match self {
            FormSpec::Delta => "delta".into(),
            FormSpec::Curve { coefficients, level } => {
                let c: Vec<String> = coefficients.iter().map(|x| x.to_string()).collect();
                format!("curve_{}_{}", c.join("_"), level.map_or("auto".into(), |l| l.to_string()))
            }
            FormSpec::File(p) => format!("file_{}", p.display()),
        }
    }

    fn compute(&self, p_max: u64) -> Result<Eigenform> {
        match self {
            FormSpec::Delta => Ok(Eigenform::delta(p_max.max(2))?),
            FormSpec::Curve { coefficients, level } => {
                if p_max > CURVE_P_MAX {
                    return Err(ringclass_core::Error::Coverage(format!(
                        "point counting is limited to p <= {CURVE_P_MAX}, {p_max} requested"
                    ))
                    .into());
                }
                let curve = EllipticCurve::new(*coefficients)?;
                Ok(Eigenform::elliptic_curve(&curve, p_max.max(2), *level)?)
            }
            FormSpec::File(path) => read_table(path),
        }
    }
}

fn memory_cache() -> &'static Mutex<HashMap<String, Eigenform>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Eigenform>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn disk_path(dir: &Path, key: &str) -> PathBuf {
    let safe: String = key.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
    dir.join(format!("{safe}.table"))
}

/// The form covering every prime up to `p_max`, from memory, the cache
/// directory or a fresh computation. Tables read from files are returned as
/// they are; the coverage check happens where coefficients are used.
pub fn load_form(spec: &FormSpec, p_max: u64) -> Result<Eigenform> {
    let key = spec.key();
    if let Some(f) = memory_cache().lock().expect("cache lock").get(&key) {
        if f.p_max() >= p_max || matches!(spec, FormSpec::File(_)) {
            return Ok(f.clone());
        }
    }
    let dir = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let mut form = None;
    if let (Some(dir), false) = (&dir, matches!(spec, FormSpec::File(_))) {
        let path = disk_path(dir, &key);
        if path.exists() {
            let f = read_table(&path)?;
            if f.p_max() >= p_max {
                form = Some(f);
            }
        }
    }
    let form = match form {
        Some(f) => f,
        None => {
            let f = spec.compute(p_max)?;
            if let (Some(dir), false) = (&dir, matches!(spec, FormSpec::File(_))) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                write_table(&f, &disk_path(dir, &key))?;
            }
            f
        }
    };
    memory_cache().lock().expect("cache lock").insert(key, form.clone());
    Ok(form)
}

pub fn load_tensor(specs: &[FormSpec], p_max: u64) -> Result<TensorProduct> {
    let forms = specs.iter().map(|s| load_form(s, p_max)).collect::<Result<Vec<_>>>()?;
    Ok(TensorProduct::new(forms)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_specs() {
        assert_eq!(FormSpec::parse("delta").unwrap(), FormSpec::Delta);
        assert_eq!(
            FormSpec::parse("curve:-1,0@32").unwrap(),
            FormSpec::Curve { coefficients: [0, 0, 0, -1, 0], level: Some(32) }
        );
        assert_eq!(FormSpec::parse("11a").unwrap(), FormSpec::parse("curve:0,-1,1,-10,-20@11").unwrap());
        assert!(matches!(FormSpec::parse("curve:1,2,3"), Err(CliError::Usage(_))));
        assert!(matches!(FormSpec::parse("maass"), Err(CliError::Usage(_))));
    }

    #[test]
    fn disk_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = disk_path(dir.path(), "delta");
        let f = Eigenform::delta(300).unwrap();
        write_table(&f, &path).unwrap();
        assert_eq!(read_table(&path).unwrap(), f);
    }
}
