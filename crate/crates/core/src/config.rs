//! Field configuration: extra defining polynomials for `q` beyond the
//! built-in table.
//!
//! One field per line, `q=<order> poly=<c0>,<c1>,...,<ce>` with the
//! polynomial listed from the constant term up. `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::finite_field::{prime_power, FqSpec, HARD_MAX_ORDER};

/// Environment variable naming the config file.
pub const CONFIG_ENV: &str = "CARLITZ_CONFIG";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FieldConfig {
    polys: BTreeMap<u32, Vec<u32>>,
}

impl FieldConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut polys = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Config(format!("line {}: {msg}", lineno + 1));
            let mut q = None;
            let mut poly = None;
            for field in line.split_whitespace() {
                let (key, value) = field
                    .split_once('=')
                    .ok_or_else(|| err("expected key=value"))?;
                match key {
                    "q" => {
                        q = Some(
                            value
                                .parse::<u32>()
                                .map_err(|_| err("q must be an integer"))?,
                        )
                    }
                    "poly" => {
                        let coeffs = value
                            .split(',')
                            .map(|c| c.trim().parse::<u32>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(|_| err("poly must be comma-separated integers"))?;
                        poly = Some(coeffs);
                    }
                    _ => return Err(err(&format!("unknown key {key:?}"))),
                }
            }
            let q = q.ok_or_else(|| err("missing q"))?;
            let poly = poly.ok_or_else(|| err("missing poly"))?;
            let (p, e) = prime_power(q as u64).ok_or_else(|| err("q is not a prime power"))?;
            if poly.len() != e as usize + 1 {
                return Err(err(&format!("poly for q={q} must have degree {e}")));
            }
            FqSpec::with_bound(p as u32, poly.clone(), HARD_MAX_ORDER)
                .map_err(|e| err(&e.to_string()))?;
            if polys.insert(q, poly).is_some() {
                return Err(err(&format!("duplicate entry for q={q}")));
            }
        }
        Ok(FieldConfig { polys })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Loads `explicit`, else the file named by `CARLITZ_CONFIG`, else nothing.
    pub fn discover(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }

    /// Configured polynomial for `q`, else the built-in one.
    pub fn resolve(&self, q: u32) -> Result<FqSpec> {
        match self.polys.get(&q) {
            Some(poly) => {
                let (p, _) = prime_power(q as u64).expect("validated when parsed");
                FqSpec::with_bound(p as u32, poly.clone(), HARD_MAX_ORDER)
            }
            None => FqSpec::builtin(q),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_resolves() {
        let cfg =
            FieldConfig::parse("# fields\nq=49 poly=1,0,1\n\nq=4 poly=1,1,1  # same as built-in\n")
                .unwrap();
        let f = cfg.resolve(49).unwrap();
        assert_eq!((f.characteristic(), f.degree()), (7, 2));
        assert_eq!(cfg.resolve(4).unwrap(), FqSpec::builtin(4).unwrap());
        assert_eq!(cfg.resolve(5).unwrap(), FqSpec::prime(5).unwrap());
        assert!(cfg.resolve(49 * 7).is_err());
    }

    #[test]
    fn rejects_bad_lines() {
        for bad in [
            "q=4",
            "poly=1,1,1",
            "q=6 poly=1,1",
            "q=4 poly=1,1",
            "q=4 poly=1,0,1",
            "q=4 poly=1,x,1",
            "q=4 poly=1,1,1 extra=2",
            "q=4 poly=1,1,1\nq=4 poly=1,1,1",
        ] {
            assert!(
                matches!(FieldConfig::parse(bad), Err(Error::Config(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn loads_from_file() {
        let dir = std::env::temp_dir().join(format!("carlitz-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("fields.conf");
        std::fs::write(&path, "q=32 poly=1,0,1,0,0,1\n").unwrap();
        let cfg = FieldConfig::discover(Some(&path)).unwrap();
        assert_eq!(cfg.resolve(32).unwrap().order(), 32);
        assert!(FieldConfig::load(&dir.join("missing")).is_err());
        std::fs::remove_dir_all(dir).unwrap();
    }
}
