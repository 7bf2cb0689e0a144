//! Flat `key = value` experiment configs.
//!
//! ```text
//! # omega lower-bound instances
//! workload = omega
//! k = 32
//! t = 1
//! t = 4
//! n = 50
//! policy = random_marker
//! policy = lnonmarker
//! seeds = 0..100
//! ```
//!
//! Repeated keys (`t`, `policy`, `noise`, `seed`, `seeds`) accumulate into lists.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::policies::PolicyKind;

use super::workload::{Noise, Workload};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub workloads: Vec<Workload>,
    pub k: usize,
    pub policies: Vec<PolicyKind>,
    /// Prediction sources; empty means [`Noise::Keep`].
    pub noise: Vec<Noise>,
    pub seeds: Vec<u64>,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        let mut cfg: ExperimentConfig = text.parse()?;
        for w in &mut cfg.workloads {
            if let Workload::File(p) = w {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn noise_levels(&self) -> Vec<Noise> {
        if self.noise.is_empty() {
            vec![Noise::Keep]
        } else {
            self.noise.clone()
        }
    }

    /// Shifts every seed by `base`.
    pub fn offset_seeds(&mut self, base: u64) {
        for s in &mut self.seeds {
            *s = s.wrapping_add(base);
        }
    }
}

#[derive(Default)]
struct Raw {
    workload: Option<(usize, String)>,
    k: Option<(usize, String)>,
    t: Vec<(usize, String)>,
    n: Option<(usize, String)>,
    random_part_len: Option<(usize, String)>,
    universe: Option<(usize, String)>,
    length: Option<(usize, String)>,
    exponent: Option<(usize, String)>,
    trace: Option<(usize, String)>,
    policy: Vec<(usize, String)>,
    noise: Vec<(usize, String)>,
    seeds: Vec<(usize, String)>,
    output: Option<(usize, String)>,
    jobs: Option<(usize, String)>,
}

fn err(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_num<T: FromStr>(entry: &(usize, String), field: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    entry
        .1
        .parse()
        .map_err(|e: T::Err| err(entry.0, field, format!("`{}`: {e}", entry.1)))
}

fn required<'a>(slot: &'a Option<(usize, String)>, field: &str) -> Result<&'a (usize, String)> {
    slot.as_ref().ok_or_else(|| err(0, field, "missing"))
}

/// `a..b` (half-open) or a single seed.
fn parse_seeds(entry: &(usize, String)) -> Result<Vec<u64>> {
    let (line, ref v) = *entry;
    let bad = |m: String| err(line, "seeds", format!("`{v}`: {m}"));
    match v.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|e| bad(format!("{e}")))?;
            let b: u64 = b.trim().parse().map_err(|e| bad(format!("{e}")))?;
            if a >= b {
                return Err(bad("empty range".into()));
            }
            Ok((a..b).collect())
        }
        None => Ok(vec![v.parse().map_err(|e| bad(format!("{e}")))?]),
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut raw = Raw::default();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(lineno, line, "expected key = value"))?;
            let key = key.trim();
            let entry = (lineno, value.trim().to_string());
            if entry.1.is_empty() {
                return Err(err(lineno, key, "empty value"));
            }
            let single = |slot: &mut Option<(usize, String)>| {
                if let Some((prev, _)) = slot {
                    return Err(err(lineno, key, format!("already set on line {prev}")));
                }
                *slot = Some(entry.clone());
                Ok(())
            };
            match key {
                "workload" => single(&mut raw.workload)?,
                "k" => single(&mut raw.k)?,
                "n" => single(&mut raw.n)?,
                "random_part_len" => single(&mut raw.random_part_len)?,
                "universe" => single(&mut raw.universe)?,
                "length" => single(&mut raw.length)?,
                "exponent" => single(&mut raw.exponent)?,
                "trace" => single(&mut raw.trace)?,
                "output" => single(&mut raw.output)?,
                "jobs" => single(&mut raw.jobs)?,
                "t" => raw.t.push(entry),
                "policy" => raw.policy.push(entry),
                "noise" => raw.noise.push(entry),
                "seed" | "seeds" => raw.seeds.push(entry),
                other => return Err(err(lineno, other, "unknown key")),
            }
        }
        raw.build()
    }
}

impl Raw {
    fn build(self) -> Result<ExperimentConfig> {
        let k_entry = required(&self.k, "k")?;
        let k: usize = parse_num(k_entry, "k")?;
        if k == 0 {
            return Err(err(k_entry.0, "k", "must be >= 1"));
        }
        let wl = required(&self.workload, "workload")?;

        let only_for = |slot: &Option<(usize, String)>, field: &str, kinds: &[&str]| match slot {
            Some((line, _)) if !kinds.contains(&wl.1.as_str()) => Err(err(
                *line,
                field,
                format!("not used by workload `{}`", wl.1),
            )),
            _ => Ok(()),
        };
        only_for(&self.n, "n", &["omega"])?;
        only_for(&self.random_part_len, "random_part_len", &["omega"])?;
        only_for(&self.universe, "universe", &["uniform", "zipf"])?;
        only_for(&self.length, "length", &["uniform", "zipf"])?;
        only_for(&self.exponent, "exponent", &["zipf"])?;
        only_for(&self.trace, "trace", &["file"])?;
        if let Some((line, _)) = self.t.first() {
            if wl.1 != "omega" {
                return Err(err(*line, "t", format!("not used by workload `{}`", wl.1)));
            }
        }

        let workloads = match wl.1.as_str() {
            "file" => vec![Workload::File(PathBuf::from(
                &required(&self.trace, "trace")?.1,
            ))],
            "omega" => {
                let n: usize = parse_num(required(&self.n, "n")?, "n")?;
                let random_part_len = match &self.random_part_len {
                    Some(e) => Some(parse_num(e, "random_part_len")?),
                    None => None,
                };
                if self.t.is_empty() {
                    return Err(err(0, "t", "missing"));
                }
                let mut out = Vec::new();
                for e in &self.t {
                    let t = parse_num(e, "t")?;
                    let w = Workload::Omega {
                        t,
                        n,
                        random_part_len,
                    };
                    w.validate(k).map_err(|x| err(e.0, "t", x.to_string()))?;
                    out.push(w);
                }
                out
            }
            "uniform" | "zipf" => {
                let universe = parse_num(required(&self.universe, "universe")?, "universe")?;
                let length = parse_num(required(&self.length, "length")?, "length")?;
                let w = if wl.1 == "uniform" {
                    Workload::Uniform { universe, length }
                } else {
                    let exponent = parse_num(required(&self.exponent, "exponent")?, "exponent")?;
                    Workload::Zipf {
                        universe,
                        length,
                        exponent,
                    }
                };
                w.validate(k)
                    .map_err(|x| err(wl.0, "workload", x.to_string()))?;
                vec![w]
            }
            other => {
                return Err(err(
                    wl.0,
                    "workload",
                    format!("`{other}`: expected omega, file, uniform or zipf"),
                ))
            }
        };

        if self.policy.is_empty() {
            return Err(err(0, "policy", "at least one policy is required"));
        }
        let policies = self
            .policy
            .iter()
            .map(|e| {
                e.1.parse()
                    .map_err(|x: Error| err(e.0, "policy", x.to_string()))
            })
            .collect::<Result<Vec<PolicyKind>>>()?;
        let noise = self
            .noise
            .iter()
            .map(|e| {
                e.1.parse()
                    .map_err(|x: Error| err(e.0, "noise", x.to_string()))
            })
            .collect::<Result<Vec<Noise>>>()?;

        let mut seeds = Vec::new();
        for e in &self.seeds {
            seeds.extend(parse_seeds(e)?);
        }
        if seeds.is_empty() {
            seeds.push(0);
        }

        let jobs = match &self.jobs {
            Some(e) => {
                let j: usize = parse_num(e, "jobs")?;
                if j == 0 {
                    return Err(err(e.0, "jobs", "must be >= 1"));
                }
                Some(j)
            }
            None => None,
        };

        Ok(ExperimentConfig {
            workloads,
            k,
            policies,
            noise,
            seeds,
            output: self.output.map(|(_, p)| PathBuf::from(p)),
            jobs,
        })
    }
}
