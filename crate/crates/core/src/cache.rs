//! JSONL cache of per-curve zeta data. All numbers are stored as decimal strings.

use crate::cyclo::{poly_mul, Cyc};
use crate::families::{Family, FamilySpec};
use crate::gfq::FieldTower;
use crate::polyring::Form;
use crate::scan::CurveEntry;
use crate::zeta::{check_functional_equation, newton_coeffs, CurveZeta};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub family: String,
    pub q: String,
    pub p: String,
    pub e: String,
    pub d: String,
    pub g_coeffs: Vec<String>,
    pub h_coeffs: Vec<String>,
    pub delta: String,
    pub genus: String,
    pub p_rank: String,
    /// S[h-1][k-1] as coordinates on 1, zeta, .., zeta^{p-2}.
    #[serde(rename = "S")]
    pub s: Vec<Vec<Vec<String>>>,
    #[serde(rename = "P_coeffs")]
    pub p_coeffs: Vec<String>,
}

fn strs<T: ToString>(xs: impl IntoIterator<Item = T>) -> Vec<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

fn form_strs(t: &FieldTower, f: &Form) -> Vec<String> {
    strs(f.coeffs().iter().map(|&c| t.base().enc(c)))
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("bad {what}: {s:?}"))
}

impl CacheRecord {
    pub fn from_entry(t: &FieldTower, fam: &Family, entry: &CurveEntry) -> CacheRecord {
        let z = &entry.zeta;
        let spec: &FamilySpec = &fam.spec;
        CacheRecord {
            family: spec.label(),
            q: z.q.to_string(),
            p: z.p.to_string(),
            e: spec.e.to_string(),
            d: fam.degree().to_string(),
            g_coeffs: form_strs(t, &entry.member.g),
            h_coeffs: form_strs(t, fam.h(&entry.member)),
            delta: z.delta.to_string(),
            genus: z.genus.to_string(),
            p_rank: z.p_rank.to_string(),
            s: z.s.iter().map(|row| row.iter().map(|c| strs(c.coords())).collect()).collect(),
            p_coeffs: strs(&z.p_coeffs),
        }
    }

    /// Rebuild the zeta data; L is recomputed from S and checked against P.
    pub fn to_zeta(&self) -> Result<CurveZeta, String> {
        let p: u32 = num(&self.p, "p")?;
        let q: u64 = num(&self.q, "q")?;
        let delta: u32 = num(&self.delta, "delta")?;
        let genus: u32 = num(&self.genus, "genus")?;
        let p_rank: u32 = num(&self.p_rank, "p_rank")?;
        if p < 2 || delta < 1 {
            return Err("p or delta out of range".into());
        }
        if self.s.len() != p as usize - 1 {
            return Err(format!("S has {} rows, expected {}", self.s.len(), p - 1));
        }
        let mut s_all = Vec::new();
        let mut l_all = Vec::new();
        for (i, row) in self.s.iter().enumerate() {
            if row.len() != delta as usize - 1 {
                return Err(format!("S[{i}] has {} entries, expected {}", row.len(), delta - 1));
            }
            let s: Vec<Cyc> = row
                .iter()
                .map(|c| {
                    if c.len() != p as usize - 1 {
                        return Err("cyclotomic entry has wrong length".to_string());
                    }
                    let v = c.iter().map(|x| num::<i128>(x, "S entry")).collect::<Result<_, _>>()?;
                    Ok(Cyc::from_coords(p, v))
                })
                .collect::<Result<_, _>>()?;
            let l = newton_coeffs(p, &s, i as u32 + 1).map_err(|e| e.to_string())?;
            s_all.push(s);
            l_all.push(l);
        }
        let p_coeffs: Vec<i128> =
            self.p_coeffs.iter().map(|x| num(x, "P coefficient")).collect::<Result<_, _>>()?;
        if p_coeffs.len() != 2 * genus as usize + 1 {
            return Err("P has the wrong degree".into());
        }
        let mut prod = vec![Cyc::one(p)];
        for l in &l_all {
            prod = poly_mul(&prod, l);
        }
        let same = prod.len() == p_coeffs.len()
            && prod.iter().zip(&p_coeffs).all(|(a, &b)| a.as_int() == Some(b));
        if !same {
            return Err("P does not match the product of the L-polynomials".into());
        }
        check_functional_equation(&p_coeffs, q).map_err(|e| e.to_string())?;
        let mut z = CurveZeta { p, q, delta, genus, p_rank, s: s_all, l: l_all, p_coeffs, n: vec![] };
        let a = z.trace_sums(delta as usize - 1);
        z.n = a
            .iter()
            .enumerate()
            .map(|(k, x)| ((q as i128).pow(k as u32 + 1) + 1 + x) as u64)
            .collect();
        Ok(z)
    }
}

pub fn write_records<W: Write>(mut w: W, recs: &[CacheRecord]) -> std::io::Result<()> {
    for r in recs {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Default)]
pub struct CacheRead {
    pub records: Vec<(CacheRecord, CurveZeta)>,
    /// (line number, reason) for lines skipped in lenient mode.
    pub skipped: Vec<(usize, String)>,
}

/// Read a cache. Strict mode fails on the first bad line; lenient mode skips it.
pub fn read_records<R: BufRead>(r: R, strict: bool) -> Result<CacheRead, CacheError> {
    let mut out = CacheRead::default();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<CacheRecord>(&line)
            .map_err(|e| e.to_string())
            .and_then(|rec| rec.to_zeta().map(|z| (rec, z)));
        match parsed {
            Ok(x) => out.records.push(x),
            Err(msg) if strict => return Err(CacheError::Line { line: n, msg }),
            Err(msg) => out.skipped.push((n, msg)),
        }
    }
    Ok(out)
}
