//! Experiment configuration: plain `key = value` lines under `[run]` and
//! `[specs]` headers. `#` starts a comment line.
//!
//! ```text
//! [run]
//! N = 1000000
//! seed = 7
//! grid_start = 1000
//! grid_ratio = 1.333521432163324
//! out = results
//! threads = 4
//!
//! [specs]
//! f = chi:4:1
//! g = sparse:3,4:@f
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    pub n: Option<u64>,
    pub seed: Option<u64>,
    pub grid_start: Option<f64>,
    pub grid_ratio: Option<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    /// Named spec descriptors, referenced elsewhere as `@name`.
    pub specs: BTreeMap<String, String>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Run,
    Specs,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut section = Section::None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let bad = |msg: String| CliError::Usage(format!("config line {}: {msg}", i + 1));
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = match name.trim() {
                    "run" => Section::Run,
                    "specs" => Section::Specs,
                    other => return Err(bad(format!("unknown section [{other}]"))),
                };
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(bad("empty key or value".into()));
            }
            fn num<T: std::str::FromStr>(v: &str, bad: impl Fn(String) -> CliError) -> Result<T, CliError> {
                v.parse().map_err(|_| bad(format!("cannot parse `{v}`")))
            }
            match section {
                Section::None => return Err(bad("key outside a section".into())),
                Section::Specs => {
                    if cfg.specs.insert(key.to_string(), value.to_string()).is_some() {
                        return Err(bad(format!("duplicate spec `{key}`")));
                    }
                }
                Section::Run => match key {
                    "N" => cfg.n = Some(num(value, bad)?),
                    "seed" => cfg.seed = Some(num(value, bad)?),
                    "grid_start" => cfg.grid_start = Some(num(value, bad)?),
                    "grid_ratio" => cfg.grid_ratio = Some(num(value, bad)?),
                    "out" => cfg.out = Some(PathBuf::from(value)),
                    "threads" => cfg.threads = Some(num(value, bad)?),
                    other => return Err(bad(format!("unknown key `{other}`"))),
                },
            }
        }
        Ok(cfg)
    }

    /// Serialized form; `parse(to_text())` reproduces the config.
    pub fn to_text(&self) -> String {
        let mut s = String::from("[run]\n");
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                let _ = writeln!(s, "{k} = {v}");
            }
        };
        put("N", self.n.map(|v| v.to_string()));
        put("seed", self.seed.map(|v| v.to_string()));
        put("grid_start", self.grid_start.map(|v| v.to_string()));
        put("grid_ratio", self.grid_ratio.map(|v| v.to_string()));
        put("out", self.out.as_ref().map(|v| v.display().to_string()));
        put("threads", self.threads.map(|v| v.to_string()));
        s.push_str("\n[specs]\n");
        for (k, v) in &self.specs {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_example() {
        let cfg = ExperimentConfig::parse(
            "# demo\n[run]\nN = 1000\nseed=3\ngrid_ratio = 1.5\n\n[specs]\nf = chi:4:1\ng = sparse:3,4:@f\n",
        )
        .unwrap();
        assert_eq!(cfg.n, Some(1000));
        assert_eq!(cfg.seed, Some(3));
        assert_eq!(cfg.grid_ratio, Some(1.5));
        assert_eq!(cfg.specs["g"], "sparse:3,4:@f");
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["N = 3", "[run]\nN = x", "[run]\nfoo = 1", "[other]", "[specs]\nf = a\nf = b", "[run]\nN"] {
            assert!(ExperimentConfig::parse(bad).is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn roundtrips(
            n in proptest::option::of(1u64..u64::MAX),
            seed in proptest::option::of(any::<u64>()),
            start in proptest::option::of(1e-3f64..1e12),
            ratio in proptest::option::of(1.0001f64..100.0),
            threads in proptest::option::of(1usize..256),
            out in proptest::option::of("[a-z][a-z0-9_/]{0,12}"),
            specs in proptest::collection::btree_map("[a-z][a-z0-9_]{0,6}", "[a-z0-9:,.@+-]{1,16}", 0..5),
        ) {
            let cfg = ExperimentConfig {
                n,
                seed,
                grid_start: start,
                grid_ratio: ratio,
                out: out.map(PathBuf::from),
                threads,
                specs,
            };
            prop_assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
        }
    }
}
