//! Deterministic parallel scans over a family: zeta data per member and
//! exact aggregate point counts.

use crate::curve::{count_level, reduce, Reduction};
use crate::families::{Family, Member};
use crate::gfq::FieldTower;
use crate::polyring::Form;
use crate::zeta::{curve_zeta, CurveZeta, ZetaError, ZetaOpts};
use crate::Q;
use rayon::prelude::*;
use std::ops::Range;

/// One processed member.
#[derive(Clone, Debug)]
pub struct CurveEntry {
    pub member: Member,
    pub zeta: CurveZeta,
}

#[derive(Clone, Debug, Default)]
pub struct ScanResult {
    pub curves: Vec<CurveEntry>,
    /// Members whose f is constant modulo Artin-Schreier equivalence.
    pub degenerate: u64,
}

impl ScanResult {
    pub fn extend(&mut self, other: ScanResult) {
        self.curves.extend(other.curves);
        self.degenerate += other.degenerate;
    }

    pub fn zetas(&self) -> Vec<&CurveZeta> {
        self.curves.iter().map(|c| &c.zeta).collect()
    }
}

/// Zeta data for every member with h index in `range`, in (h, g) order.
pub fn scan_family(
    t: &FieldTower,
    fam: &Family,
    range: Range<usize>,
    opts: &ZetaOpts,
) -> Result<ScanResult, ZetaError> {
    let parts: Vec<Result<ScanResult, ZetaError>> = range
        .into_par_iter()
        .map(|hi| scan_members(t, fam, hi, &fam.g_for(t, hi), opts))
        .collect();
    let mut res = ScanResult::default();
    for p in parts {
        res.extend(p?);
    }
    Ok(res)
}

/// Sequential scan of the given numerators for one h.
pub fn scan_members(
    t: &FieldTower,
    fam: &Family,
    hi: usize,
    gs: &[Form],
    opts: &ZetaOpts,
) -> Result<ScanResult, ZetaError> {
    let mut out = ScanResult::default();
    for g in gs {
        let m = Member { hi, g: g.clone() };
        match reduce(t, &m.g, fam.h(&m), Some(fam.poles(&m))) {
            Reduction::Constant(_) => out.degenerate += 1,
            Reduction::Curve(red) => {
                let zeta = curve_zeta(t, &red, opts)?;
                out.curves.push(CurveEntry { member: m, zeta });
            }
        }
    }
    Ok(out)
}

pub fn scan_all(t: &FieldTower, fam: &Family, opts: &ZetaOpts) -> Result<ScanResult, ZetaError> {
    scan_family(t, fam, 0..fam.num_h(), opts)
}

/// Raw (unreduced) point-count totals over a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointTotals {
    pub size: u64,
    pub ks: Vec<u32>,
    pub sums: Vec<u128>,
}

impl PointTotals {
    pub fn average(&self, k: u32) -> Option<Q> {
        let i = self.ks.iter().position(|&x| x == k)?;
        Some(Q::new(self.sums[i] as i128, self.size as i128))
    }
}

pub fn point_totals(t: &FieldTower, fam: &Family, ks: &[u32]) -> PointTotals {
    let p = t.p();
    let per_h: Vec<(u64, Vec<u128>)> = (0..fam.num_h())
        .into_par_iter()
        .map(|hi| {
            let h = &fam.h_entries()[hi].h;
            let gs = fam.g_for(t, hi);
            let sums = ks
                .iter()
                .map(|&k| gs.iter().map(|g| count_level(t, g, h, k).points(p) as u128).sum())
                .collect();
            (gs.len() as u64, sums)
        })
        .collect();
    let mut sums = vec![0u128; ks.len()];
    let mut size = 0;
    for (n, s) in per_h {
        size += n;
        for (a, b) in sums.iter_mut().zip(s) {
            *a += b;
        }
    }
    PointTotals { size, ks: ks.to_vec(), sums }
}

/// Pairwise summation with a fixed tree shape, independent of thread count.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}
