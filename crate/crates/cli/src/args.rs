//! Flag and config-file handling.
//!
//! Options come from `--key value` (or `--key=value`) flags and, when
//! `--config FILE` is given, from a flat key-value file with the grammar
//! `key = value`, one pair per line, `#` starting a comment. Flags override
//! file entries; flag names map to keys with dashes replaced by
//! underscores.

use std::collections::BTreeMap;

use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct Options {
    map: BTreeMap<String, String>,
}

impl Options {
    /// Parses the argument list after the subcommand name.
    pub fn parse(args: &[String]) -> Result<Options, CliError> {
        let mut flags = BTreeMap::new();
        let mut i = 0;
        while i < args.len() {
            let arg = &args[i];
            let Some(stripped) = arg.strip_prefix("--") else {
                return Err(CliError::Validation(format!("unexpected argument `{arg}`")));
            };
            let (key, value) = if let Some((k, v)) = stripped.split_once('=') {
                (k.to_string(), v.to_string())
            } else {
                let Some(v) = args.get(i + 1) else {
                    return Err(CliError::Validation(format!("flag `{arg}` needs a value")));
                };
                i += 1;
                (stripped.to_string(), v.clone())
            };
            flags.insert(key.replace('-', "_"), value);
            i += 1;
        }

        let mut map = BTreeMap::new();
        if let Some(path) = flags.get("config") {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read config {path}: {e}")))?;
            for (lineno, line) in text.lines().enumerate() {
                let body = line.split('#').next().unwrap_or("").trim();
                if body.is_empty() {
                    continue;
                }
                let Some((k, v)) = body.split_once('=') else {
                    return Err(CliError::Validation(format!(
                        "{path}:{}: expected `key = value`",
                        lineno + 1
                    )));
                };
                map.insert(k.trim().replace('-', "_"), v.trim().to_string());
            }
        }
        map.extend(flags);
        Ok(Options { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Validation(format!("`{key} = {v}` is not a number"))),
        }
    }

    pub fn f64_required(&self, key: &str) -> Result<f64, CliError> {
        let v = self
            .map
            .get(key)
            .ok_or_else(|| CliError::Validation(format!("missing required option --{key}")))?;
        v.parse()
            .map_err(|_| CliError::Validation(format!("`{key} = {v}` is not a number")))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Validation(format!("`{key} = {v}` is not an integer"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.map.get(key).map(|s| s.as_str()).unwrap_or(default)
    }

    /// Comma-separated list of floats.
    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.map.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|piece| {
                    piece.trim().parse().map_err(|_| {
                        CliError::Validation(format!("`{key}` entry `{piece}` is not a number"))
                    })
                })
                .collect(),
        }
    }

    pub fn jobs(&self) -> Result<usize, CliError> {
        let default = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1);
        let jobs = self.usize_or("jobs", default)?;
        if jobs == 0 {
            return Err(CliError::Validation("--jobs must be at least 1".into()));
        }
        Ok(jobs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_and_equals_forms() {
        let args: Vec<String> = ["--n-s", "0.5", "--format=json"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let o = Options::parse(&args).unwrap();
        assert_eq!(o.f64_required("n_s").unwrap(), 0.5);
        assert_eq!(o.str_or("format", "csv"), "json");
    }

    #[test]
    fn config_file_with_flag_override() {
        let dir = std::env::temp_dir().join("qi-args-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("conf.txt");
        std::fs::write(&path, "# comment\nn_s = 2.0\npoints = 7\n").unwrap();
        let args: Vec<String> = [
            "--config".to_string(),
            path.to_string_lossy().to_string(),
            "--points".to_string(),
            "9".to_string(),
        ]
        .to_vec();
        let o = Options::parse(&args).unwrap();
        assert_eq!(o.f64_required("n_s").unwrap(), 2.0);
        assert_eq!(o.usize_or("points", 0).unwrap(), 9);
    }

    #[test]
    fn rejects_unknown_positional() {
        let args = vec!["oops".to_string()];
        assert!(Options::parse(&args).is_err());
    }
}
