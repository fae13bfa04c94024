//! Point-count averages, explicit-formula checks, zero counts in intervals,
//! the linear statistics S^+- and their moments.

use crate::bs::{build_bs, BsError, BsPoly, Sign, TrigPoly};
use crate::curve::count_level;
use crate::cyclo::Cyc;
use crate::families::{e_factor, Family, FamilyError, FamilyKind, FamilySpec};
use crate::gfq::FieldTower;
use crate::polyring::count_irreducible;
use crate::scan::{pairwise_sum, point_totals};
use crate::zeta::{l_eigen, power_sums, CurveZeta};
use crate::Q;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn qpow(q: u64, e: i32) -> Q {
    let b = Q::from_integer(q as i128);
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Exact family average of N_k using raw fiber counts.
pub fn family_avg_points(t: &FieldTower, fam: &Family, k: u32) -> Q {
    point_totals(t, fam, &[k]).average(k).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvgPrediction {
    pub value: Q,
    /// True when the formula holds with no error term at this k.
    pub exact: bool,
}

/// Predicted average of N_k for the family (main terms for Ord and Full).
pub fn predicted_avg_points(spec: &FamilySpec, k: u32) -> Result<AvgPrediction, FamilyError> {
    let q = spec.q();
    let p = spec.p;
    let pm1 = Q::from_integer(p as i128 - 1);
    let base = qpow(q, k as i32) + Q::one();
    let pdiv = k % p == 0;
    let kp = k / p;
    match &spec.kind {
        FamilyKind::Ord(_) => {
            let mut v = base;
            if pdiv {
                let den = |u: u32| Q::one() + qpow(q, -(u as i32)) - qpow(q, -2 * u as i32);
                v += pm1 / den(1);
                for u in divisors(kp) {
                    let up = Q::from_integer(u as i128 * count_irreducible(q, u) as i128);
                    v += pm1 * up / den(u);
                }
            }
            Ok(AvgPrediction { value: v, exact: false })
        }
        FamilyKind::Full(_) => {
            let mut v = base;
            if pdiv {
                v += pm1 * qpow(q, kp as i32);
                v += pm1 / (Q::one() + qpow(q, -1));
                for u in divisors(kp) {
                    let up = Q::from_integer(u as i128 * count_irreducible(q, u) as i128);
                    v -= pm1 * up / (Q::one() + qpow(q, u as i32));
                }
            }
            Ok(AvgPrediction { value: v, exact: false })
        }
        _ => {
            spec.check_avg_hypotheses()?;
            let ft = spec.fact_type().unwrap();
            let mut v = base;
            if pdiv {
                let hit: i128 = ft
                    .degree_counts()
                    .iter()
                    .filter(|(r, _)| k % r == 0)
                    .map(|(r, l)| (*r * *l) as i128)
                    .sum();
                v += pm1 * qpow(q, kp as i32) + pm1 * (Q::one() - Q::from_integer(hit));
            }
            // The local counts behind the formula are exact while every point degree u <= k
            // satisfies u + (total pole degree) <= d + 1.
            let poles: u32 = ft.degree_counts().iter().map(|(r, l)| r * l).sum();
            Ok(AvgPrediction { value: v, exact: k + poles <= spec.degree() + 1 })
        }
    }
}

/// Average over the whole p-rank p-1 stratum: two equally weighted pieces.
pub fn predicted_avg_points_rank_pm1(q: u64, p: u32, k: u32) -> Q {
    let base = qpow(q, k as i32) + Q::one();
    if k % p != 0 {
        return base;
    }
    let pm1 = Q::from_integer(p as i128 - 1);
    let qk = qpow(q, (k / p) as i32);
    if k % 2 == 0 {
        base + pm1 * (qk - Q::one())
    } else {
        base + pm1 * qk
    }
}

/// Angles of each L(u, f, psi^h), h = 1..p-1.
pub fn curve_angles(z: &CurveZeta) -> Vec<Vec<f64>> {
    z.l.iter().map(|l| l_eigen(l, z.q).into_iter().map(|e| e.theta).collect()).collect()
}

/// S_k(f, psi^h) / q^{k/2} for h = 1..p-1 and k = 1..=kmax, exact sums embedded in C.
pub fn normalized_sums(z: &CurveZeta, kmax: usize) -> Vec<Vec<Complex64>> {
    let sq = (z.q as f64).sqrt();
    z.l.iter()
        .map(|l| {
            power_sums(l, kmax)
                .iter()
                .enumerate()
                .map(|(i, s)| s.embed() / sq.powi(i as i32 + 1))
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// Both sides of the explicit formula for L(u, f, psi^h) and a trigonometric polynomial.
pub fn explicit_formula_check(z: &CurveZeta, h: u32, trig: &TrigPoly) -> ExplicitCheck {
    let angles: Vec<f64> = l_eigen(&z.l[h as usize - 1], z.q).into_iter().map(|e| e.theta).collect();
    let lhs: Complex64 = angles.iter().map(|&th| trig.eval(th)).sum();
    let kk = trig.degree();
    let sums = normalized_sums(z, kk);
    let hbar = (z.p - h) as usize;
    let mut rhs = trig.coeff(0) * (z.delta as f64 - 1.0);
    for k in 1..=kk {
        rhs -= trig.coeff(k as i64) * sums[h as usize - 1][k - 1]
            + trig.coeff(-(k as i64)) * sums[hbar - 1][k - 1];
    }
    ExplicitCheck { lhs, rhs, residual: (lhs - rhs).norm() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalCount {
    pub per_h: Vec<u32>,
    pub total: u32,
}

/// Angles in the half-open interval [a, b).
pub fn n_in_interval(angles: &[Vec<f64>], a: f64, b: f64) -> IntervalCount {
    let per_h: Vec<u32> =
        angles.iter().map(|v| v.iter().filter(|&&x| a <= x && x < b).count() as u32).collect();
    let total = per_h.iter().sum();
    IntervalCount { per_h, total }
}

/// S^+-(K, f, psi^h) from precomputed normalized sums.
pub fn s_pm_from_sums(sums: &[Vec<Complex64>], poly: &BsPoly, h: u32, p: u32) -> f64 {
    let a = &sums[h as usize - 1];
    let b = &sums[(p - h) as usize - 1];
    let mut v = Complex64::new(0.0, 0.0);
    for k in 1..=poly.k {
        v += poly.coeff(k as i64) * a[k - 1] + poly.coeff(-(k as i64)) * b[k - 1];
    }
    assert!(v.im.abs() < 1e-9, "S^+- has imaginary part {}", v.im);
    v.re
}

pub fn s_pm(z: &CurveZeta, poly: &BsPoly, h: u32) -> f64 {
    s_pm_from_sums(&normalized_sums(z, poly.k), poly, h, z.p)
}

pub fn s_pm_total(z: &CurveZeta, poly: &BsPoly) -> f64 {
    let sums = normalized_sums(z, poly.k);
    (1..z.p).map(|h| s_pm_from_sums(&sums, poly, h, z.p)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub ok: bool,
}

/// -S^- - 2g/(K+1) <= N_I(C_f) - 2g|I| <= -S^+ + 2g/(K+1) for I = [-|I|/2, |I|/2).
pub fn sandwich_check(z: &CurveZeta, k: usize, length: f64) -> Result<Sandwich, BsError> {
    let plus = build_bs(k, length, Sign::Plus)?;
    let minus = build_bs(k, length, Sign::Minus)?;
    let angles = curve_angles(z);
    let n = n_in_interval(&angles, -length / 2.0, length / 2.0).total as f64;
    let two_g = 2.0 * z.genus as f64;
    let value = n - two_g * length;
    let slack = two_g / (k as f64 + 1.0);
    let lower = -s_pm_total(z, &minus) - slack;
    let upper = -s_pm_total(z, &plus) + slack;
    let tol = 1e-9;
    Ok(Sandwich { lower, value, upper, ok: lower <= value + tol && value <= upper + tol })
}

/// Family average of q^{-k/2} sum_alpha psi^h(e tr f(alpha)), kept exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct M1Empirical {
    pub sum: Cyc,
    pub size: u64,
    pub k: u32,
    pub q: u64,
}

impl M1Empirical {
    pub fn value(&self) -> Complex64 {
        self.sum.embed() / (self.size as f64 * (self.q as f64).powf(self.k as f64 / 2.0))
    }

    /// Whether the value equals r q^{-k/2} exactly.
    pub fn equals(&self, r: Q) -> bool {
        let lhs = self.sum.scale(*r.denom());
        lhs == Cyc::from_int(self.sum.p(), *r.numer() * self.size as i128)
    }
}

/// Sum over alpha in F_{q^k} (or P^1(F_{q^k}) when `projective`) with f(alpha) finite.
pub fn empirical_m1(t: &FieldTower, fam: &Family, k: u32, e: i32, h: u32, projective: bool) -> M1Empirical {
    let p = t.p();
    let mult = ((e as i64 * h as i64).rem_euclid(p as i64)) as u32;
    let parts: Vec<(u64, Cyc)> = (0..fam.num_h())
        .into_par_iter()
        .map(|hi| {
            let hform = &fam.h_entries()[hi].h;
            let mut acc = Cyc::zero(p);
            let gs = fam.g_for(t, hi);
            for g in &gs {
                let lc = count_level(t, g, hform, k);
                let hist = if projective { lc.by_trace.clone() } else { lc.affine_by_trace() };
                acc = acc.add(&Cyc::from_counts(p, &hist, mult));
            }
            (gs.len() as u64, acc)
        })
        .collect();
    let mut sum = Cyc::zero(p);
    let mut size = 0;
    for (n, c) in parts {
        size += n;
        sum = sum.add(&c);
    }
    M1Empirical { sum, size, k, q: t.q() }
}

/// Rational r with predicted M1 = r q^{-k/2}: e_{p,k} sum_{m : pm | k} E(m) pi(m) m.
pub fn predicted_m1(spec: &FamilySpec, k: u32) -> Q {
    let p = spec.p;
    if k % p != 0 {
        return Q::zero();
    }
    let q = spec.q();
    divisors(k / p)
        .into_iter()
        .map(|m| e_factor(spec, m) * Q::from_integer(count_irreducible(q, m) as i128 * m as i128))
        .fold(Q::zero(), |a, b| a + b)
}

/// Per-curve S^+ and S^- for every character.
#[derive(Clone, Debug, PartialEq)]
pub struct SpmTable {
    pub k: usize,
    pub length: f64,
    pub p: u32,
    /// plus[c][h-1], minus[c][h-1].
    pub plus: Vec<Vec<f64>>,
    pub minus: Vec<Vec<f64>>,
}

impl SpmTable {
    pub fn build(zs: &[&CurveZeta], k: usize, length: f64) -> Result<SpmTable, BsError> {
        let bp = build_bs(k, length, Sign::Plus)?;
        let bm = build_bs(k, length, Sign::Minus)?;
        let p = zs.first().map(|z| z.p).unwrap_or(3);
        let rows: Vec<(Vec<f64>, Vec<f64>)> = zs
            .par_iter()
            .map(|z| {
                let sums = normalized_sums(z, k);
                let a = (1..p).map(|h| s_pm_from_sums(&sums, &bp, h, p)).collect();
                let b = (1..p).map(|h| s_pm_from_sums(&sums, &bm, h, p)).collect();
                (a, b)
            })
            .collect();
        let (plus, minus) = rows.into_iter().unzip();
        Ok(SpmTable { k, length, p, plus, minus })
    }

    fn get(&self, sign: Sign) -> &Vec<Vec<f64>> {
        match sign {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }

    pub fn totals(&self, sign: Sign) -> Vec<f64> {
        self.get(sign).iter().map(|r| r.iter().sum()).collect()
    }

    /// <S^{s1}(psi^{h1}) S^{s2}(psi^{h2})>.
    pub fn covariance(&self, h1: u32, h2: u32, s1: Sign, s2: Sign) -> f64 {
        let a = self.get(s1);
        let b = self.get(s2);
        let prods: Vec<f64> =
            a.iter().zip(b).map(|(x, y)| x[h1 as usize - 1] * y[h2 as usize - 1]).collect();
        pairwise_sum(&prods) / prods.len().max(1) as f64
    }
}

/// Predicted main term of the covariance of characters h1, h2 in 1..=(p-1)/2.
pub fn covariance_prediction(k: usize, length: f64, h1: u32, h2: u32) -> f64 {
    if h1 == h2 {
        (k as f64 * length).ln() / (PI * PI)
    } else {
        0.0
    }
}

/// (2(p-1)/pi^2) log(K|I|), the second moment of S^+-(K, C_f).
pub fn second_moment_prediction(p: u32, k: usize, length: f64) -> f64 {
    2.0 * (p as f64 - 1.0) / (PI * PI) * (k as f64 * length).ln()
}

/// Moments of N(0, 1): (2l)! / (l! 2^l) for n = 2l, zero for odd n.
pub fn gaussian_moment(n: u32) -> u128 {
    if n % 2 == 1 {
        return 0;
    }
    (1..=n as u128).filter(|i| i % 2 == 1).product()
}

/// Number of sign vectors and permutations pairing (1,2), (3,4), .. to zero mod p.
pub fn theta_constant(hs: &[u32], p: u32) -> Result<u64, String> {
    let n = hs.len();
    if n > 8 {
        return Err(format!("n = {n} exceeds 8"));
    }
    if n % 2 == 1 {
        return Ok(0);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut count = 0u64;
    let mut perms = Vec::new();
    permutations(&mut perm, 0, &mut perms);
    for sigma in &perms {
        for mask in 0..(1u32 << n) {
            let e = |i: usize| if mask >> i & 1 == 1 { -1i64 } else { 1 };
            let ok = (0..n / 2).all(|j| {
                let s = e(2 * j) * hs[sigma[2 * j]] as i64 + e(2 * j + 1) * hs[sigma[2 * j + 1]] as i64;
                s.rem_euclid(p as i64) == 0
            });
            if ok {
                count += 1;
            }
        }
    }
    Ok(count)
}

fn permutations(v: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
    if i == v.len() {
        out.push(v.clone());
        return;
    }
    for j in i..v.len() {
        v.swap(i, j);
        permutations(v, i + 1, out);
        v.swap(i, j);
    }
}

/// (p-1)^l (2l)! / (2^l l!).
pub fn theta_closed_form(p: u32, l: u32) -> u128 {
    (p as u128 - 1).pow(l) * gaussian_moment(2 * l)
}

/// theta_constant divided by l! 2^l, the number of orderings of one pairing.
pub fn theta_per_pairing(hs: &[u32], p: u32) -> Result<u64, String> {
    let l = hs.len() as u32 / 2;
    let raw = theta_constant(hs, p)?;
    let orderings: u64 = (1..=l as u64).product::<u64>() << l;
    debug_assert_eq!(raw % orderings, 0);
    Ok(raw / orderings)
}

/// Sum of theta_constant over all h in 1..=(p-1)/2, for comparison with the closed form.
pub fn theta_sum(p: u32, n: u32) -> Result<u128, String> {
    let m = (p - 1) / 2;
    let total = (m as u64).pow(n);
    let mut acc = 0u128;
    for idx in 0..total {
        let mut x = idx;
        let hs: Vec<u32> = (0..n)
            .map(|_| {
                let v = (x % m as u64) as u32 + 1;
                x /= m as u64;
                v
            })
            .collect();
        acc += theta_constant(&hs, p)? as u128;
    }
    Ok(acc)
}

/// sum over beta_i in F_{q^{u_i}} of psi(sum m_i tr(beta_i)), by direct enumeration.
pub fn keypoint_sum(t: &FieldTower, ms: &[i64], us: &[u32]) -> Cyc {
    let p = t.p();
    let mut hist = vec![0u64; p as usize];
    fn rec(t: &FieldTower, ms: &[i64], us: &[u32], i: usize, acc: i64, hist: &mut [u64]) {
        if i == ms.len() {
            hist[acc.rem_euclid(t.p() as i64) as usize] += 1;
            return;
        }
        let lv = t.level(us[i]);
        for x in lv.elements() {
            rec(t, ms, us, i + 1, acc + ms[i] * lv.trace(x) as i64, hist);
        }
    }
    rec(t, ms, us, 0, 0, &mut hist);
    Cyc::from_counts(p, &hist, 1)
}

/// q^{sum u_i} when p divides every m_i, else 0.
pub fn keypoint_predicted(q: u64, p: u32, ms: &[i64], us: &[u32]) -> i128 {
    if ms.iter().all(|m| m.rem_euclid(p as i64) == 0) {
        (q as i128).pow(us.iter().sum())
    } else {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutoK {
    pub k: usize,
    /// g / log log(g |I|) when defined and positive.
    pub raw: Option<f64>,
    pub floor: usize,
    /// K >= d/6, outside the range of the covariance estimate.
    pub warn: bool,
}

/// K = floor(g / log log(g|I|)), at least max(2, ceil(1/|I|) + 1).
pub fn auto_k(genus: u32, length: f64, d: u32) -> AutoK {
    let floor = 2usize.max((1.0 / length).ceil() as usize + 1);
    let ll = (genus as f64 * length).ln().ln();
    let raw = if ll.is_finite() && ll > 0.0 { Some(genus as f64 / ll) } else { None };
    let k = raw.map(|r| r.floor() as usize).unwrap_or(0).max(floor);
    AutoK { k, raw, floor, warn: k as f64 >= d as f64 / 6.0 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<u64>,
    pub below: u64,
    pub above: u64,
    /// Curves with g|I| <= 1, where the normalization is undefined.
    pub skipped: u64,
}

impl Histogram {
    pub fn new() -> Histogram {
        Histogram { lo: -4.0, width: 0.25, counts: vec![0; 32], below: 0, above: 0, skipped: 0 }
    }

    pub fn add(&mut self, x: f64) {
        let b = ((x - self.lo) / self.width).floor();
        if b < 0.0 {
            self.below += 1;
        } else if b as usize >= self.counts.len() {
            self.above += 1;
        } else {
            self.counts[b as usize] += 1;
        }
    }

    pub fn merge(&mut self, o: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&o.counts) {
            *a += b;
        }
        self.below += o.below;
        self.above += o.above;
        self.skipped += o.skipped;
    }
}

impl Default for Histogram {
    fn default() -> Self {
        Histogram::new()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    /// Raw moments E[X^j], j = 1..=n.
    pub raw: Vec<f64>,
    /// Standardized central moments E[(X - mean)^j] / sd^j.
    pub standardized: Vec<f64>,
}

pub fn summarize(xs: &[f64], n: u32) -> MomentSummary {
    let c = xs.len().max(1) as f64;
    let mean = pairwise_sum(xs) / c;
    let raw: Vec<f64> = (1..=n)
        .map(|j| pairwise_sum(&xs.iter().map(|x| x.powi(j as i32)).collect::<Vec<_>>()) / c)
        .collect();
    let central = |j: u32| {
        pairwise_sum(&xs.iter().map(|x| (x - mean).powi(j as i32)).collect::<Vec<_>>()) / c
    };
    let variance = central(2);
    let sd = variance.sqrt();
    let standardized = (1..=n)
        .map(|j| if sd > 0.0 { central(j) / sd.powi(j as i32) } else { 0.0 })
        .collect();
    MomentSummary { count: xs.len() as u64, mean, variance, raw, standardized }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub family: String,
    pub q: u64,
    pub k: usize,
    pub length: f64,
    pub curves: u64,
    pub degenerate: u64,
    pub genus_min: u32,
    pub genus_max: u32,
    pub s_plus: MomentSummary,
    pub s_minus: MomentSummary,
    /// <S^+ S^->.
    pub cross: f64,
    pub predicted_second_moment: f64,
    /// <N_I(C_f) - 2g|I|>.
    pub mean_offset: f64,
    /// Moments of (N_I(C_f) - 2g|I|) / sqrt((2(p-1)/pi^2) log(g|I|)).
    pub normalized_zero_count: MomentSummary,
    pub gaussian_reference: Vec<u128>,
    pub histogram: Histogram,
}

pub fn empirical_moments(
    label: &str,
    zs: &[&CurveZeta],
    degenerate: u64,
    k: usize,
    length: f64,
    n: u32,
) -> Result<MomentReport, BsError> {
    let table = SpmTable::build(zs, k, length)?;
    let sp = table.totals(Sign::Plus);
    let sm = table.totals(Sign::Minus);
    let p = zs.first().map(|z| z.p).unwrap_or(3);
    let q = zs.first().map(|z| z.q).unwrap_or(3);
    let offsets: Vec<(f64, Option<f64>)> = zs
        .par_iter()
        .map(|z| {
            let angles = curve_angles(z);
            let n_i = n_in_interval(&angles, -length / 2.0, length / 2.0).total as f64;
            let g = z.genus as f64;
            let off = n_i - 2.0 * g * length;
            let scale = 2.0 * (p as f64 - 1.0) / (PI * PI) * (g * length).ln();
            (off, if scale > 0.0 { Some(off / scale.sqrt()) } else { None })
        })
        .collect();
    let mut hist = Histogram::new();
    let mut normalized = Vec::new();
    for (_, v) in &offsets {
        match v {
            Some(x) => {
                hist.add(*x);
                normalized.push(*x);
            }
            None => hist.skipped += 1,
        }
    }
    let off: Vec<f64> = offsets.iter().map(|o| o.0).collect();
    let cross: Vec<f64> = sp.iter().zip(&sm).map(|(a, b)| a * b).collect();
    Ok(MomentReport {
        family: label.to_string(),
        q,
        k,
        length,
        curves: zs.len() as u64,
        degenerate,
        genus_min: zs.iter().map(|z| z.genus).min().unwrap_or(0),
        genus_max: zs.iter().map(|z| z.genus).max().unwrap_or(0),
        s_plus: summarize(&sp, n),
        s_minus: summarize(&sm, n),
        cross: pairwise_sum(&cross) / cross.len().max(1) as f64,
        predicted_second_moment: second_moment_prediction(p, k, length),
        mean_offset: pairwise_sum(&off) / off.len().max(1) as f64,
        normalized_zero_count: summarize(&normalized, n),
        gaussian_reference: (1..=n).map(gaussian_moment).collect(),
        histogram: hist,
    })
}

/// Histogram of the normalized zero-count fluctuation.
pub fn zero_fluctuation_histogram(zs: &[&CurveZeta], length: f64) -> Histogram {
    let mut h = Histogram::new();
    for z in zs {
        let p = z.p as f64;
        let g = z.genus as f64;
        let n_i = n_in_interval(&curve_angles(z), -length / 2.0, length / 2.0).total as f64;
        let scale = 2.0 * (p - 1.0) / (PI * PI) * (g * length).ln();
        if scale > 0.0 {
            h.add((n_i - 2.0 * g * length) / scale.sqrt());
        } else {
            h.skipped += 1;
        }
    }
    h
}
