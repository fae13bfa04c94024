//! Experiment configuration: one JSON document, overridable from flags.

use asfam::families::DEFAULT_BUDGET;
use asfam::{FactorizationType, FamilyKind, FamilySpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// `K` is either a positive integer or the string "auto".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSetting {
    Fixed(usize),
    Word(AutoWord),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoWord {
    Auto,
}

impl KSetting {
    pub fn parse(s: &str) -> Result<KSetting, String> {
        if s == "auto" {
            return Ok(KSetting::Word(AutoWord::Auto));
        }
        s.parse().map(KSetting::Fixed).map_err(|_| format!("K: expected a number or \"auto\", got {s:?}"))
    }

    pub fn fixed(&self) -> Option<usize> {
        match self {
            KSetting::Fixed(k) => Some(*k),
            KSetting::Word(_) => None,
        }
    }
}

/// A local condition set: points of degrees `u` with values of kind `beta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSpec {
    pub u: Vec<u32>,
    pub beta: Vec<String>,
}

fn d_e() -> u32 {
    1
}
fn d_k_range() -> [u32; 2] {
    [1, 4]
}
fn d_interval() -> f64 {
    0.25
}
fn d_k() -> KSetting {
    KSetting::Word(AutoWord::Auto)
}
fn d_moments() -> u32 {
    4
}
fn d_out() -> PathBuf {
    PathBuf::from("out")
}
fn d_workers() -> usize {
    1
}
fn d_budget() -> u64 {
    DEFAULT_BUDGET
}
fn d_samples() -> u32 {
    500
}
fn d_extra() -> u32 {
    3
}
fn d_partition() -> usize {
    2048
}
fn d_local() -> Vec<LocalSpec> {
    let one = |u: u32, b: &str| LocalSpec { u: vec![u], beta: vec![b.to_string()] };
    vec![one(1, "finite"), one(1, "inf"), one(2, "finite")]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub family: String,
    pub p: u32,
    #[serde(default = "d_e")]
    pub e: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    #[serde(default = "d_k_range")]
    pub k_range: [u32; 2],
    #[serde(default = "d_interval")]
    pub interval: f64,
    #[serde(rename = "K", default = "d_k")]
    pub k: KSetting,
    #[serde(default = "d_moments")]
    pub moments: u32,
    #[serde(default = "d_out")]
    pub out_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache: Option<PathBuf>,
    #[serde(default = "d_workers")]
    pub workers: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "d_budget")]
    pub budget: u64,
    /// Number of (curve, polynomial) pairs in the explicit-formula suite.
    #[serde(default = "d_samples")]
    pub samples: u32,
    #[serde(default = "d_local")]
    pub local: Vec<LocalSpec>,
    #[serde(default = "d_extra")]
    pub extra_levels: u32,
    /// Members per enumeration partition.
    #[serde(default = "d_partition")]
    pub partition_size: usize,
}

/// Flag overrides; every field is optional.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Overrides {
    /// Config JSON file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// rank0, ord, full, facttype, laurent or quad.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub e: Option<u32>,
    #[arg(long)]
    pub d: Option<u32>,
    /// Factorization type such as "1^2,1^1", or "a,b" for laurent.
    #[arg(long)]
    pub v: Option<String>,
    /// Inclusive range "a,b".
    #[arg(long)]
    pub k_range: Option<String>,
    #[arg(long)]
    pub interval: Option<f64>,
    /// Beurling-Selberg degree, or "auto".
    #[arg(long = "K")]
    pub k: Option<String>,
    #[arg(long)]
    pub moments: Option<u32>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub samples: Option<u32>,
    #[arg(long)]
    pub partition_size: Option<usize>,
}

impl Config {
    pub fn load(o: &Overrides) -> Result<Config, String> {
        let mut v: serde_json::Value = match &o.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                serde_json::from_str(&text).map_err(|e| format!("config: {e}"))?
            }
            None => serde_json::json!({}),
        };
        let obj = v.as_object_mut().ok_or("config must be a JSON object")?;
        let mut set = |k: &str, x: serde_json::Value| {
            obj.insert(k.to_string(), x);
        };
        use serde_json::json;
        if let Some(x) = &o.family {
            set("family", json!(x));
        }
        if let Some(x) = o.p {
            set("p", json!(x));
        }
        if let Some(x) = o.e {
            set("e", json!(x));
        }
        if let Some(x) = o.d {
            set("d", json!(x));
        }
        if let Some(x) = &o.v {
            set("v", json!(x));
        }
        if let Some(x) = &o.k_range {
            let parts: Vec<u32> = x
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| format!("k_range: expected \"a,b\", got {x:?}"))?;
            if parts.len() != 2 {
                return Err(format!("k_range: expected \"a,b\", got {x:?}"));
            }
            set("k_range", json!(parts));
        }
        if let Some(x) = o.interval {
            set("interval", json!(x));
        }
        if let Some(x) = &o.k {
            let k = KSetting::parse(x)?;
            set("K", serde_json::to_value(k).unwrap());
        }
        if let Some(x) = o.moments {
            set("moments", json!(x));
        }
        if let Some(x) = &o.out_dir {
            set("out_dir", json!(x));
        }
        if let Some(x) = &o.cache {
            set("cache", json!(x));
        }
        if let Some(x) = o.workers {
            set("workers", json!(x));
        }
        if let Some(x) = o.seed {
            set("seed", json!(x));
        }
        if let Some(x) = o.budget {
            set("budget", json!(x));
        }
        if let Some(x) = o.samples {
            set("samples", json!(x));
        }
        if let Some(x) = o.partition_size {
            set("partition_size", json!(x));
        }
        let cfg: Config = serde_json::from_value(v).map_err(|e| format!("config: {e}"))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), String> {
        if !(self.interval > 0.0 && self.interval < 1.0) {
            return Err(format!("interval: {} is not in (0, 1)", self.interval));
        }
        if self.k_range[0] < 1 || self.k_range[0] > self.k_range[1] {
            return Err(format!("k_range: {:?} is not a range of positive integers", self.k_range));
        }
        if self.k.fixed() == Some(0) {
            return Err("K: must be at least 1".into());
        }
        if self.workers == 0 {
            return Err("workers: must be at least 1".into());
        }
        if self.partition_size == 0 {
            return Err("partition_size: must be at least 1".into());
        }
        for (i, l) in self.local.iter().enumerate() {
            if l.u.is_empty() || l.u.len() != l.beta.len() {
                return Err(format!("local[{i}]: u and beta must be non-empty and equally long"));
            }
            if let Some(b) = l.beta.iter().find(|b| *b != "finite" && *b != "inf") {
                return Err(format!("local[{i}]: beta {b:?} is neither \"finite\" nor \"inf\""));
            }
        }
        self.spec().map(|_| ())
    }

    pub fn spec(&self) -> Result<FamilySpec, String> {
        let need_d = || self.d.ok_or_else(|| format!("d: required for family {:?}", self.family));
        let kind = match self.family.as_str() {
            "rank0" => FamilyKind::Rank0(need_d()?),
            "ord" => FamilyKind::Ord(need_d()?),
            "full" => FamilyKind::Full(need_d()?),
            "quad" => {
                let d = need_d()?;
                if d % 2 == 1 {
                    return Err("d: quad families need even d".into());
                }
                FamilyKind::Quad(d / 2)
            }
            "facttype" => {
                let v = self.v.as_deref().ok_or("v: required for family \"facttype\"")?;
                FamilyKind::FactType(FactorizationType::parse(v).map_err(|e| format!("v: {e}"))?)
            }
            "laurent" => {
                let v = self.v.as_deref().ok_or("v: required for family \"laurent\" as \"a,b\"")?;
                let parts: Vec<u32> = v
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| format!("v: expected \"a,b\", got {v:?}"))?;
                if parts.len() != 2 {
                    return Err(format!("v: expected \"a,b\", got {v:?}"));
                }
                FamilyKind::Laurent(parts[0], parts[1])
            }
            other => return Err(format!("family: unknown family {other:?}")),
        };
        if !asfam::gfq::is_prime(self.p as u64) {
            return Err(format!("p: {} is not prime", self.p));
        }
        if self.e == 0 {
            return Err("e: must be at least 1".into());
        }
        let spec = FamilySpec::new(kind, self.p, self.e);
        spec.validate().map_err(|e| format!("family: {e}"))?;
        Ok(spec)
    }

    /// Effective config without `workers`, which never changes results.
    pub fn echo_json(&self) -> String {
        let mut v = serde_json::to_value(self).unwrap();
        v.as_object_mut().unwrap().remove("workers");
        serde_json::to_string(&v).unwrap()
    }

    /// SHA-256 of the echoed config.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.echo_json().as_bytes()))
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    pub fn cache_path(&self) -> Option<&Path> {
        self.cache.as_deref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with(json: &str) -> Result<Config, String> {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, json).unwrap();
        Config::load(&Overrides { config: Some(p), ..Default::default() })
    }

    #[test]
    fn defaults_and_overrides() {
        let c = with(r#"{"family":"rank0","p":3,"d":4}"#).unwrap();
        assert_eq!(c.k, KSetting::Word(AutoWord::Auto));
        assert_eq!(c.k_range, [1, 4]);
        let o = Overrides { family: Some("rank0".into()), p: Some(3), d: Some(5), k: Some("7".into()), ..Default::default() };
        let c2 = Config::load(&o).unwrap();
        assert_eq!(c2.k, KSetting::Fixed(7));
        assert!(c2.echo_json().contains("\"K\":7"));
        assert_ne!(c.hash(), c2.hash());
        let c3 = Config { workers: 8, ..c2.clone() };
        assert_eq!(c2.hash(), c3.hash());
        assert!(!c3.echo_json().contains("workers"));
    }

    #[test]
    fn field_errors() {
        assert!(with(r#"{"family":"rank0","p":4,"d":4}"#).unwrap_err().starts_with("p:"));
        assert!(with(r#"{"family":"rank0","p":3}"#).unwrap_err().starts_with("d:"));
        assert!(with(r#"{"family":"rank0","p":3,"d":4,"K":"many"}"#).is_err());
        assert!(with(r#"{"family":"rank0","p":3,"d":4,"bogus":1}"#).unwrap_err().contains("bogus"));
        assert!(with(r#"{"family":"rank0","p":3,"d":4,"interval":1.5}"#).unwrap_err().starts_with("interval:"));
        assert!(with(r#"{"family":"facttype","p":3,"v":"1^3"}"#).unwrap_err().starts_with("family:"));
    }
}
