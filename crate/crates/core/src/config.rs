//! Resource bounds shared by the oracle, the classifier and the density scan.
//!
//! A config file is a plain `key = value` list; `#` starts a comment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    /// Largest ring (or unit set) the brute-force oracle may enumerate.
    pub oracle_bound: u64,
    /// Largest index `n` accepted by the A_n linear-algebra verifier.
    pub an_bound: u32,
    /// Largest `N` accepted by the density scan.
    pub density_limit: u64,
    /// Largest group order the classifier searches exhaustively.
    pub search_bound: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            oracle_bound: 1 << 20,
            an_bound: 6,
            density_limit: 100_000_000,
            search_bound: 1 << 16,
        }
    }
}

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parse = |v: &str| -> Result<u64> {
            parse_count(v).ok_or_else(|| Error::Parse(format!("bad value `{v}` for `{key}`")))
        };
        match key {
            "oracle_bound" => self.oracle_bound = parse(value)?,
            "an_bound" => {
                self.an_bound = u32::try_from(parse(value)?)
                    .map_err(|_| Error::Parse(format!("an_bound `{value}` too large")))?
            }
            "density_limit" => self.density_limit = parse(value)?,
            "search_bound" => self.search_bound = parse(value)?,
            _ => return Err(Error::Parse(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut config = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "oracle_bound = {}", self.oracle_bound)?;
        writeln!(f, "an_bound = {}", self.an_bound)?;
        writeln!(f, "density_limit = {}", self.density_limit)?;
        writeln!(f, "search_bound = {}", self.search_bound)
    }
}

/// Parses counts written as `1000`, `1e6`, `2^20` or `1_000_000`.
pub fn parse_count(text: &str) -> Option<u64> {
    let t: String = text.trim().chars().filter(|c| *c != '_').collect();
    if let Some((m, e)) = t.split_once(['e', 'E']) {
        let m: u64 = m.parse().ok()?;
        let e: u32 = e.parse().ok()?;
        return 10u64.checked_pow(e)?.checked_mul(m);
    }
    if let Some((b, e)) = t.split_once('^') {
        let b: u64 = b.parse().ok()?;
        let e: u32 = e.parse().ok()?;
        return b.checked_pow(e);
    }
    t.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_file() {
        let c: Config = "# bounds\noracle_bound = 2^10\nan_bound=3\n\ndensity_limit = 1e6 # small\n"
            .parse()
            .unwrap();
        assert_eq!(c.oracle_bound, 1024);
        assert_eq!(c.an_bound, 3);
        assert_eq!(c.density_limit, 1_000_000);
        assert_eq!(c.search_bound, Config::default().search_bound);
        let again: Config = c.to_string().parse().unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!("colour = blue".parse::<Config>().is_err());
        assert!("oracle_bound".parse::<Config>().is_err());
    }

    #[test]
    fn count_notation() {
        assert_eq!(parse_count("1e3"), Some(1000));
        assert_eq!(parse_count("1_000"), Some(1000));
        assert_eq!(parse_count("2^16"), Some(65536));
        assert_eq!(parse_count("x"), None);
    }
}
