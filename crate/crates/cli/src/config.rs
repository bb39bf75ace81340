use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::report::Format;

pub const DEFAULT_DIGITS: u32 = 50;

/// Contents of a `--config` file. Unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub digits: Option<u32>,
    pub cache_path: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }
}

/// Effective settings after merging flags over the config file.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub digits: u32,
    pub cache_path: Option<PathBuf>,
    pub format: Format,
    pub compare: bool,
    pub full: bool,
}

impl RunConfig {
    pub fn merge(
        file: FileConfig,
        digits: Option<u32>,
        cache: Option<PathBuf>,
        format: Option<Format>,
        compare: bool,
        full: bool,
    ) -> Self {
        Self {
            digits: digits.or(file.digits).unwrap_or(DEFAULT_DIGITS),
            cache_path: cache.or(file.cache_path),
            format: format.or(file.format).unwrap_or_default(),
            compare,
            full,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = FileConfig::parse(r#"{"digits": 60, "format": "csv", "cache_path": "v.csv"}"#).unwrap();
        let run = RunConfig::merge(file.clone(), Some(40), None, None, false, false);
        assert_eq!(run.digits, 40);
        assert_eq!(run.format, Format::Csv);
        assert_eq!(run.cache_path.as_deref(), Some(Path::new("v.csv")));
        let run = RunConfig::merge(FileConfig::default(), None, None, Some(Format::Json), true, false);
        assert_eq!(run.digits, DEFAULT_DIGITS);
        assert_eq!(run.format, Format::Json);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(FileConfig::parse(r#"{"digits": 40, "colour": "red"}"#).is_err());
        assert!(FileConfig::parse(r#"{"format": "xml"}"#).is_err());
    }
}
