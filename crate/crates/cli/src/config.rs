//! Runtime configuration: truncation budgets, cache path, output format.
//!
//! Config files are flat `key = value` text; command-line flags override
//! file values.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl Format {
    pub fn parse(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            _ => bail!("unknown format {s:?} (expected json, csv, or table)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    /// Genus cap for tables and verification grids.
    pub g_max: u32,
    /// Coupling-degree cap (number of insertions).
    pub n_max: u32,
    /// Largest single coupling index.
    pub i_max: u32,
    /// Epsilon order for truncated (s-free) data.
    pub eps_order: i32,
    /// t-degree for the Witten free energy checks.
    pub deg: u32,
    /// Pseudodifferential truncation depth.
    pub depth: u32,
    /// Wick enumeration cap on `|i|` (hard limit 20).
    pub wick_bound: u32,
    pub cache: Option<PathBuf>,
    pub format: Format,
    pub float_digits: u32,
    pub threads: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            g_max: 3,
            n_max: 4,
            i_max: 8,
            eps_order: 6,
            deg: 6,
            depth: 10,
            wick_bound: 16,
            cache: None,
            format: Format::Json,
            float_digits: 30,
            threads: 1,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.wick_bound > 20 {
            bail!("wick_bound {} exceeds the hard safety cap 20", self.wick_bound);
        }
        if self.g_max == 0 && self.n_max == 0 {
            bail!("budgets must be positive");
        }
        if self.threads == 0 {
            bail!("threads must be positive");
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .with_context(|| format!("{}:{}: expected key = value", path.display(), lineno + 1))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "g_max" => self.g_max = v.parse()?,
                "n_max" => self.n_max = v.parse()?,
                "i_max" => self.i_max = v.parse()?,
                "eps_order" => self.eps_order = v.parse()?,
                "deg" => self.deg = v.parse()?,
                "depth" => self.depth = v.parse()?,
                "wick_bound" => self.wick_bound = v.parse()?,
                "cache" => self.cache = Some(PathBuf::from(v)),
                "format" => self.format = Format::parse(v)?,
                "float_digits" => self.float_digits = v.parse()?,
                "threads" => self.threads = v.parse()?,
                _ => bail!("{}:{}: unknown key {k:?}", path.display(), lineno + 1),
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        let dir = std::env::temp_dir().join("guekdv-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("c.conf");
        std::fs::write(&p, "g_max = 2\nwick_bound=14\nformat = csv\n# comment\n").unwrap();
        let mut c = Config::default();
        c.load_file(&p).unwrap();
        assert_eq!(c.g_max, 2);
        assert_eq!(c.wick_bound, 14);
        assert_eq!(c.format, Format::Csv);
        c.validate().unwrap();

        std::fs::write(&p, "wick_bound = 24\n").unwrap();
        let mut c = Config::default();
        c.load_file(&p).unwrap();
        assert!(c.validate().is_err());
    }
}
