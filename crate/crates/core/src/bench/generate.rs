//! Writing workload instances to trace files.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::adversary::{sample_omega_with, OmegaParams};
use crate::error::{Error, Result};
use crate::rng::child_seed;
use crate::trace::write_trace;

use super::config::ExperimentConfig;
use super::workload::{Noise, Workload};

/// Writes `<workload_id>-s<seed>.trace` into `dir` for every workload and seed,
/// plus a `.meta` file of `key=value` lines for omega instances. Returns the trace paths.
pub fn generate(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let noise = cfg.noise_levels();
    if noise.len() > 1 {
        return Err(Error::Config {
            line: 0,
            field: "noise".into(),
            message: "generate takes a single noise level".into(),
        });
    }
    let noise = noise[0];
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for w in &cfg.workloads {
        w.validate(cfg.k)?;
        let id = w.id(cfg.k);
        for &seed in &cfg.seeds {
            let path = dir.join(format!("{id}-s{seed}.trace"));
            let trace = match *w {
                Workload::Omega {
                    t,
                    n,
                    random_part_len,
                } => {
                    let params = OmegaParams {
                        k: cfg.k,
                        t,
                        n,
                        random_part_len,
                    };
                    let inst = sample_omega_with(params, child_seed(seed, b'W'))?;
                    let meta = BufWriter::new(File::create(path.with_extension("meta"))?);
                    inst.write_metadata(meta)?;
                    inst.trace
                }
                _ => w.instance(cfg.k, seed)?,
            };
            let trace = match noise {
                Noise::Keep => trace,
                other => other.apply(trace, seed)?,
            };
            write_trace(BufWriter::new(File::create(&path)?), &trace)?;
            written.push(path);
        }
    }
    Ok(written)
}
