//! Run configuration: flat `key = value` text with optional `[section]`
//! headers (one run per section; a file without headers is a single run).
//! Unknown keys are errors. Scheme admissibility is enforced at parse time.

use std::collections::BTreeMap;

use crate::adi::SchemeKind;
use crate::catalog::{CatalogEntry, ProblemId};
use crate::error::{Error, Result};
use crate::table::TableFormat;

/// Everything one run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: ProblemId,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub scheme: SchemeKind,
    /// Mesh intervals per axis.
    pub n: usize,
    /// Time-step lock `tau = nt_ratio * dx`.
    pub nt_ratio: f64,
    /// Final-time override; `None` uses the problem's canonical T.
    pub t_end: Option<f64>,
    pub output: Option<String>,
    pub format: TableFormat,
    /// Refinement levels for convergence mode.
    pub levels: usize,
}

impl RunConfig {
    pub fn catalog_entry(&self) -> CatalogEntry {
        CatalogEntry::new(self.problem, self.alpha, self.beta, self.gamma)
    }

    /// The order list as used in table labels.
    pub fn orders(&self) -> Vec<f64> {
        let mut v = vec![self.alpha];
        if self.problem.dims() >= 2 {
            v.push(self.beta.unwrap_or(self.alpha));
        }
        if self.problem.dims() >= 3 {
            v.push(self.gamma.unwrap_or(self.beta.unwrap_or(self.alpha)));
        }
        v
    }

    /// Build from raw key-value entries (config file and/or CLI overrides).
    pub fn from_entries(map: &BTreeMap<String, String>) -> Result<Self> {
        for key in map.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("unknown key '{key}'")));
            }
        }
        let get = |k: &str| map.get(k).map(|s| s.as_str());
        let required =
            |k: &str| get(k).ok_or_else(|| Error::Config(format!("missing required key '{k}'")));
        let parse_f64 = |k: &str, v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("key '{k}': '{v}' is not a number")))
        };

        let problem = ProblemId::parse(required("problem")?)?;
        let scheme = SchemeKind::parse(required("scheme")?)?;
        let alpha = parse_f64("alpha", required("alpha")?)?;
        let beta = get("beta").map(|v| parse_f64("beta", v)).transpose()?;
        let gamma = get("gamma").map(|v| parse_f64("gamma", v)).transpose()?;
        let n: usize = required("n")?
            .parse()
            .map_err(|_| Error::Config("key 'n' must be a positive integer".into()))?;
        let nt_ratio = match get("nt_ratio") {
            Some(v) => parse_f64("nt_ratio", v)?,
            None => 1.0,
        };
        let t_end = get("t_end").map(|v| parse_f64("t_end", v)).transpose()?;
        let output = get("output").map(|s| s.to_string());
        let format = match get("format") {
            Some(v) => TableFormat::parse(v)?,
            None => TableFormat::Csv,
        };
        let levels: usize = match get("levels") {
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config("key 'levels' must be a positive integer".into()))?,
            None => 1,
        };

        let cfg = Self {
            problem,
            alpha,
            beta,
            gamma,
            scheme,
            n,
            nt_ratio,
            t_end,
            output,
            format,
            levels,
        };
        cfg.check_admissible()?;
        Ok(cfg)
    }

    fn check_admissible(&self) -> Result<()> {
        let dims = self.problem.dims();
        let ok = match self.scheme {
            SchemeKind::CnFull => true,
            SchemeKind::PrAdi | SchemeKind::Fs => dims == 2,
            SchemeKind::DAdi => dims >= 2,
            SchemeKind::DAdiII | SchemeKind::FsII => self.problem == ProblemId::Riesz2d,
        };
        if !ok {
            return Err(Error::Config(format!(
                "scheme '{}' is not admissible for problem '{}'",
                self.scheme, self.problem
            )));
        }
        if self.problem == ProblemId::P1d && self.beta.is_some() {
            return Err(Error::Config("p1d takes only alpha".into()));
        }
        for (name, v) in [
            ("alpha", Some(self.alpha)),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ] {
            if let Some(v) = v {
                if !(1.0 < v && v < 2.0) {
                    return Err(Error::Config(format!(
                        "{name} = {v} outside the open interval (1, 2)"
                    )));
                }
            }
        }
        if self.n < 2 {
            return Err(Error::Config("n must be at least 2".into()));
        }
        Ok(())
    }
}

const KNOWN_KEYS: &[&str] = &[
    "problem", "alpha", "beta", "gamma", "scheme", "n", "nt_ratio", "t_end", "output", "format",
    "levels",
];

/// Split config text into named sections of raw key-value pairs. Text before
/// any `[section]` header forms defaults inherited by every section; a file
/// without headers is the single section `"run"`.
pub fn parse_sections(text: &str) -> Result<Vec<(String, BTreeMap<String, String>)>> {
    let mut defaults: BTreeMap<String, String> = BTreeMap::new();
    let mut sections: Vec<(String, BTreeMap<String, String>)> = Vec::new();
    let mut current: Option<usize> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::Config(format!("line {}: unclosed section", lineno + 1)))?
                .trim()
                .to_string();
            if name.is_empty() {
                return Err(Error::Config(format!(
                    "line {}: empty section name",
                    lineno + 1
                )));
            }
            sections.push((name, defaults.clone()));
            current = Some(sections.len() - 1);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected 'key = value', got '{line}'",
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        match current {
            Some(i) => {
                sections[i].1.insert(key, value);
            }
            None => {
                defaults.insert(key, value);
            }
        }
    }
    if sections.is_empty() {
        sections.push(("run".to_string(), defaults));
    }
    Ok(sections)
}

/// Parse a whole config file into validated run configurations.
pub fn parse_config(text: &str) -> Result<Vec<(String, RunConfig)>> {
    parse_sections(text)?
        .into_iter()
        .map(|(name, map)| RunConfig::from_entries(&map).map(|cfg| (name, cfg)))
        .collect()
}
