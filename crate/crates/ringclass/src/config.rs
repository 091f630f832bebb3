//! Optional `key = value` configuration files. Keys are the long flag names
//! of the subcommand; repeating a key gives a repeated flag.

use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfigFile {
    pub entries: Vec<(String, String)>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| CliError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = k.trim().replace('_', "-");
            if key.is_empty() {
                return Err(CliError::Parse { path: path.to_path_buf(), line: i + 1, message: "empty key".into() });
            }
            entries.push((key, v.trim().to_string()));
        }
        Ok(ConfigFile { entries })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        ConfigFile::parse(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries() {
        let c = ConfigFile::parse("# panel\ndisc = -23\nform=delta\nform = delta\nmain_x = 1e4\n", Path::new("c")).unwrap();
        assert_eq!(c.entries.len(), 4);
        assert_eq!(c.entries[3], ("main-x".to_string(), "1e4".to_string()));
        assert!(ConfigFile::parse("disc -23\n", Path::new("c")).is_err());
    }
}
