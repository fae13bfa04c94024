//! Enumeration runs: partitions, the JSONL cache and the resume manifest.

use crate::config::Config;
use crate::CliError;
use asfam::cache::{read_records, write_records, CacheRecord};
use asfam::families::FamilyError;
use asfam::scan::{scan_members, CurveEntry};
use asfam::{CurveZeta, Family, FamilySpec, FieldTower, ZetaOpts};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

pub fn family_error(e: FamilyError) -> CliError {
    match e {
        FamilyError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        _ => CliError::Config(e.to_string()),
    }
}

pub fn tower(p: u32, e: u32, k: u32) -> Result<FieldTower, CliError> {
    FieldTower::new(p, e, k.max(1))
        .map_err(|err| CliError::Config(format!("cannot build F_{}^{}: {err}", (p as u64).pow(e), k)))
}

/// Largest Delta over the family before reduction.
pub fn max_delta(fam: &Family) -> u32 {
    fam.h_entries().iter().map(|h| h.poles.delta()).max().unwrap_or(1)
}

/// Tower and family sized for zeta computations with `opts`.
pub fn zeta_setup(cfg: &Config, opts: &ZetaOpts) -> Result<(FamilySpec, FieldTower, Family), CliError> {
    let spec = cfg.spec().map_err(CliError::Config)?;
    let t0 = tower(spec.p, spec.e, 1)?;
    let fam0 = Family::new(&t0, &spec, cfg.budget).map_err(family_error)?;
    let dm1 = max_delta(&fam0).saturating_sub(1);
    let mut need = dm1 + opts.extra_levels;
    if opts.dual_route {
        need = need.max((spec.p - 1) * dm1);
    }
    let t = tower(spec.p, spec.e, need)?;
    let fam = Family::new(&t, &spec, cfg.budget).map_err(family_error)?;
    Ok((spec, t, fam))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub hi: usize,
    pub start: usize,
    pub end: usize,
}

/// Partitions in enumeration order: each h index split into chunks of g's.
pub fn partitions(t: &FieldTower, fam: &Family, size: usize) -> Vec<Partition> {
    let lens: Vec<usize> = (0..fam.num_h()).into_par_iter().map(|hi| fam.g_for(t, hi).len()).collect();
    let mut out = Vec::new();
    for (hi, n) in lens.into_iter().enumerate() {
        let mut s = 0;
        while s < n {
            out.push(Partition { hi, start: s, end: (s + size).min(n) });
            s += size;
        }
    }
    out
}

fn run_partition(
    t: &FieldTower,
    fam: &Family,
    part: Partition,
    opts: &ZetaOpts,
) -> Result<(Vec<CurveEntry>, u64), CliError> {
    let gs = fam.g_for(t, part.hi);
    let res = scan_members(t, fam, part.hi, &gs[part.start..part.end], opts)
        .map_err(|e| CliError::Verify(e.to_string()))?;
    let curves = res.curves;
    Ok((curves, res.degenerate))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub cache_files: Vec<PathBuf>,
    pub partition_size: usize,
    pub partitions_total: usize,
    /// Completed partition-id ranges [start, end).
    pub completed: Vec<[usize; 2]>,
    /// Cache length in bytes after the last completed partition.
    pub cache_bytes: u64,
    pub degenerate: u64,
}

impl RunManifest {
    fn done(&self) -> usize {
        self.completed.first().map(|r| r[1]).unwrap_or(0)
    }
}

pub fn manifest_path(cache: &Path) -> PathBuf {
    let mut s = cache.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn write_manifest(path: &Path, m: &RunManifest) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_string_pretty(m).unwrap() + "\n").map_err(CliError::io)?;
    fs::rename(&tmp, path).map_err(CliError::io)
}

pub struct Loaded {
    pub spec: FamilySpec,
    pub curves: Vec<CurveZeta>,
    pub degenerate: u64,
    pub resumed: usize,
    pub computed: usize,
    pub complete: bool,
}

/// Zeta data for the whole family, through the cache when one is configured.
/// `max_new` stops after that many freshly computed partitions.
pub fn load_zetas(cfg: &Config, max_new: Option<usize>) -> Result<Loaded, CliError> {
    let opts = ZetaOpts { extra_levels: cfg.extra_levels, dual_route: false };
    let (spec, t, fam) = zeta_setup(cfg, &opts)?;
    let parts = partitions(&t, &fam, cfg.partition_size);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Other(e.to_string()))?;
    let Some(cache) = cfg.cache_path() else {
        let results: Vec<Result<(Vec<CurveEntry>, u64), CliError>> =
            pool.install(|| parts.par_iter().map(|&p| run_partition(&t, &fam, p, &opts)).collect());
        let mut curves = Vec::new();
        let mut degenerate = 0;
        for r in results {
            let (c, d) = r?;
            curves.extend(c.into_iter().map(|e| e.zeta));
            degenerate += d;
        }
        let computed = parts.len();
        return Ok(Loaded { spec, curves, degenerate, resumed: 0, computed, complete: true });
    };
    let mpath = manifest_path(cache);
    let hash = cfg.hash();
    let prior: Option<RunManifest> = fs::read_to_string(&mpath)
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok())
        .filter(|m: &RunManifest| m.config_hash == hash && m.partitions_total == parts.len());
    if let Some(dir) = cache.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::io)?;
    }
    let mut manifest = match prior {
        Some(m) => m,
        None => {
            if mpath.exists() {
                eprintln!("note: config changed since the cached run; starting over");
            }
            File::create(cache).map_err(CliError::io)?;
            RunManifest {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                config_hash: hash,
                seed: cfg.seed,
                cache_files: vec![cache.to_path_buf()],
                partition_size: cfg.partition_size,
                partitions_total: parts.len(),
                completed: vec![],
                cache_bytes: 0,
                degenerate: 0,
            }
        }
    };
    let f = OpenOptions::new().read(true).write(true).open(cache).map_err(CliError::io)?;
    f.set_len(manifest.cache_bytes).map_err(CliError::io)?;
    drop(f);
    let reread = read_records(BufReader::new(File::open(cache).map_err(CliError::io)?), true)
        .map_err(|e| CliError::Config(format!("cache {}: {e}", cache.display())))?;
    let mut curves: Vec<CurveZeta> = reread.records.into_iter().map(|(_, z)| z).collect();
    let resumed = manifest.done();
    let mut next = resumed;
    let mut computed = 0;
    let batch = cfg.workers * 4;
    let mut out = OpenOptions::new().append(true).open(cache).map_err(CliError::io)?;
    while next < parts.len() {
        let mut end = (next + batch).min(parts.len());
        if let Some(m) = max_new {
            end = end.min(next + m.saturating_sub(computed));
        }
        if end == next {
            break;
        }
        let results: Vec<Result<(Vec<CurveEntry>, u64), CliError>> = pool.install(|| {
            parts[next..end].par_iter().map(|&p| run_partition(&t, &fam, p, &opts)).collect()
        });
        for r in results {
            let (entries, deg) = r?;
            let recs: Vec<CacheRecord> = entries.iter().map(|e| CacheRecord::from_entry(&t, &fam, e)).collect();
            let mut buf = Vec::new();
            write_records(&mut buf, &recs).map_err(CliError::io)?;
            out.write_all(&buf).map_err(CliError::io)?;
            out.flush().map_err(CliError::io)?;
            manifest.cache_bytes += buf.len() as u64;
            manifest.degenerate += deg;
            next += 1;
            manifest.completed = vec![[0, next]];
            write_manifest(&mpath, &manifest)?;
            curves.extend(entries.into_iter().map(|e| e.zeta));
            computed += 1;
        }
    }
    Ok(Loaded {
        spec,
        curves,
        degenerate: manifest.degenerate,
        resumed,
        computed,
        complete: next == parts.len(),
    })
}
