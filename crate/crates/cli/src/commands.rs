//! Subcommand implementations. Each builds a `Report`.

use crate::config::Config;
use crate::report::{fmt_f, fmt_q, q_to_f, Report};
use crate::run::{family_error, load_zetas, tower, zeta_setup, Loaded};
use crate::CliError;
use asfam::bs::{
    bs_fourier_sums, build_bs, coefficient_deviation, sandwich_grid, sandwich_violation, Sign, TrigPoly,
};
use asfam::curve::{reduce, Reduction};
use asfam::families::{local_subfamily_count, predicted_local_ratio, predicted_size, BetaKind, LocalCondition};
use asfam::scan::point_totals;
use asfam::stats::{
    auto_k, covariance_prediction, empirical_m1, empirical_moments, explicit_formula_check, gaussian_moment,
    predicted_avg_points, predicted_m1, sandwich_check, theta_closed_form, theta_sum, zero_fluctuation_histogram,
    SpmTable,
};
use asfam::zeta::{curve_zeta, weil_report, ZetaError};
use asfam::{CurveZeta, Family, Fe, FieldTower, ZetaOpts, P1, Q};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

fn pool(cfg: &Config) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build().map_err(|e| CliError::Other(e.to_string()))
}

fn base_family(cfg: &Config, k_max: u32) -> Result<(FieldTower, Family), CliError> {
    let spec = cfg.spec().map_err(CliError::Config)?;
    let t = tower(spec.p, spec.e, k_max)?;
    let fam = Family::new(&t, &spec, cfg.budget).map_err(family_error)?;
    Ok((t, fam))
}

/// K from the config, resolving "auto" against the largest genus.
pub fn resolve_k(cfg: &Config, genus: u32, d: u32) -> usize {
    match cfg.k.fixed() {
        Some(k) => k,
        None => {
            let a = auto_k(genus, cfg.interval, d);
            if a.warn {
                eprintln!("warning: K = {} is at least d/6 = {}; outside the range of the covariance estimate", a.k, d as f64 / 6.0);
            }
            a.k
        }
    }
}

pub fn avg_points(cfg: &Config) -> Result<Report, CliError> {
    let (t, fam) = base_family(cfg, cfg.k_range[1])?;
    let spec = fam.spec.clone();
    let label = spec.label();
    let d = spec.degree();
    let ks: Vec<u32> = (cfg.k_range[0]..=cfg.k_range[1]).collect();
    let totals = pool(cfg)?.install(|| point_totals(&t, &fam, &ks));
    let mut rep = Report::new("avg-points", "k", cfg);
    let size_pred = predicted_size(&spec).map(fmt_f).unwrap_or_else(|_| "NA".into());
    rep.row(&label, d, 0, "family_size", totals.size.to_string(), size_pred, "NA".into());
    for &k in &ks {
        let emp = totals.average(k).unwrap();
        match predicted_avg_points(&spec, k) {
            Ok(p) => {
                let stat = if p.exact { "avg_points" } else { "avg_points_main_term" };
                rep.row(&label, d, k, stat, fmt_q(emp), fmt_q(p.value), fmt_q(emp - p.value));
                rep.point(k.to_string(), fmt_f(q_to_f(emp)), fmt_f(q_to_f(p.value)));
            }
            Err(e) => {
                eprintln!("note: no prediction for k = {k}: {e}");
                rep.row(&label, d, k, "avg_points", fmt_q(emp), "NA".into(), "NA".into());
            }
        }
    }
    Ok(rep)
}

/// Pick distinct closed points of the requested degrees and values, from the seed.
fn pick_conditions(t: &FieldTower, us: &[u32], betas: &[BetaKind], seed: u64) -> Vec<LocalCondition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used: Vec<(u32, P1)> = Vec::new();
    let mut out = Vec::new();
    for (&u, &b) in us.iter().zip(betas) {
        let pts: Vec<P1> = t
            .enumerate_p1(u)
            .into_iter()
            .filter(|&pt| t.degree_over_base(u, pt) == u)
            .filter(|&pt| {
                used.iter().all(|&(v, q)| {
                    if v != u {
                        return true;
                    }
                    let mut x = q;
                    for _ in 0..u {
                        if x == pt {
                            return false;
                        }
                        x = t.frob_p1(u, x);
                    }
                    true
                })
            })
            .collect();
        let alpha = pts[rng.gen_range(0..pts.len())];
        used.push((u, alpha));
        let beta = match b {
            BetaKind::Inf => P1::Inf,
            BetaKind::Finite => P1::Aff(Fe(rng.gen_range(0..t.level(u).size()) as u32)),
        };
        out.push(LocalCondition { k: u, alpha, beta });
    }
    out
}

pub fn count_local(cfg: &Config) -> Result<Report, CliError> {
    let k_max = cfg.local.iter().flat_map(|l| l.u.iter().copied()).max().unwrap_or(1);
    let (t, fam) = base_family(cfg, k_max)?;
    let spec = fam.spec.clone();
    let label = spec.label();
    let d = spec.degree();
    let size = fam.size(&t);
    let pool = pool(cfg)?;
    let mut rep = Report::new("count-local", "k", cfg);
    for (i, l) in cfg.local.iter().enumerate() {
        let betas: Vec<BetaKind> =
            l.beta.iter().map(|b| if b == "inf" { BetaKind::Inf } else { BetaKind::Finite }).collect();
        let conds = pick_conditions(&t, &l.u, &betas, cfg.seed.wrapping_add(i as u64));
        let count = pool.install(|| local_subfamily_count(&t, &fam, &conds));
        let emp = Q::new(count as i128, size as i128);
        let param = l.u.iter().map(|u| u.to_string()).collect::<Vec<_>>().join("+");
        let stat = format!("local_ratio(beta={})", l.beta.join("+"));
        match predicted_local_ratio(&spec, &l.u, &betas) {
            Ok(p) => {
                rep.row(&label, d, &param, &stat, fmt_q(emp), fmt_q(p), fmt_q(emp - p));
                rep.point(param.clone(), fmt_f(q_to_f(emp)), fmt_f(q_to_f(p)));
            }
            Err(e) => {
                eprintln!("note: no prediction for local[{i}]: {e}");
                rep.row(&label, d, &param, &stat, fmt_q(emp), "NA".into(), "NA".into());
            }
        }
    }
    Ok(rep)
}

fn loaded(cfg: &Config, max_new: Option<usize>) -> Result<Option<Loaded>, CliError> {
    let l = load_zetas(cfg, max_new)?;
    eprintln!(
        "{}: {} curves ({} degenerate); {} partitions resumed, {} computed",
        l.spec.label(),
        l.curves.len(),
        l.degenerate,
        l.resumed,
        l.computed
    );
    if !l.complete {
        eprintln!("stopped before all partitions finished; rerun to resume");
        return Ok(None);
    }
    Ok(Some(l))
}

fn genus_max(zs: &[CurveZeta]) -> u32 {
    zs.iter().map(|z| z.genus).max().unwrap_or(0)
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

pub fn zeros(cfg: &Config, max_new: Option<usize>) -> Result<Option<Report>, CliError> {
    let Some(l) = loaded(cfg, max_new)? else { return Ok(None) };
    let label = l.spec.label();
    let d = l.spec.degree();
    let kk = resolve_k(cfg, genus_max(&l.curves), d);
    let zs: Vec<&CurveZeta> = l.curves.iter().collect();
    let len = cfg.interval;
    let rep_m = empirical_moments(&label, &zs, l.degenerate, kk, len, 2).map_err(|e| CliError::Config(e.to_string()))?;
    let mut rep = Report::new("zeros", "K", cfg);
    rep.row(&label, d, kk, "curves", zs.len().to_string(), "NA".into(), "NA".into());
    rep.row(&label, d, kk, "mean_offset", fmt_f(rep_m.mean_offset), "0".into(), fmt_f(rep_m.mean_offset));
    let hist = zero_fluctuation_histogram(&zs, len);
    let used: u64 = hist.counts.iter().sum::<u64>() + hist.below + hist.above;
    rep.row(&label, d, kk, "hist_skipped", hist.skipped.to_string(), "NA".into(), "NA".into());
    for (i, &c) in hist.counts.iter().enumerate() {
        let lo = hist.lo + i as f64 * hist.width;
        let hi = lo + hist.width;
        let mass = normal_cdf(hi) - normal_cdf(lo);
        let pred = mass * used as f64;
        rep.row(&label, d, kk, &format!("hist[{},{})", fmt_f(lo), fmt_f(hi)), c.to_string(), fmt_f(pred), fmt_f(c as f64 - pred));
        let dens = if used > 0 { c as f64 / (used as f64 * hist.width) } else { 0.0 };
        rep.point(fmt_f(lo + hist.width / 2.0), fmt_f(dens), fmt_f(mass / hist.width));
    }
    for (j, (&m, &g)) in rep_m.normalized_zero_count.raw.iter().zip(&rep_m.gaussian_reference).enumerate() {
        rep.row(&label, d, kk, &format!("normalized_moment_{}", j + 1), fmt_f(m), g.to_string(), fmt_f(m - g as f64));
    }
    rep.detail = Some(serde_json::to_value(&hist).unwrap());
    Ok(Some(rep))
}

pub fn moments(cfg: &Config, max_new: Option<usize>) -> Result<Option<Report>, CliError> {
    let Some(l) = loaded(cfg, max_new)? else { return Ok(None) };
    let label = l.spec.label();
    let d = l.spec.degree();
    let p = l.spec.p;
    let kk = resolve_k(cfg, genus_max(&l.curves), d);
    let zs: Vec<&CurveZeta> = l.curves.iter().collect();
    let len = cfg.interval;
    let pool = pool(cfg)?;
    let m = pool
        .install(|| empirical_moments(&label, &zs, l.degenerate, kk, len, cfg.moments))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut rep = Report::new("moments", "K", cfg);
    let var = m.predicted_second_moment;
    for (name, s) in [("S+", &m.s_plus), ("S-", &m.s_minus)] {
        for (j, &x) in s.raw.iter().enumerate() {
            let j = j as u32 + 1;
            let pred = gaussian_moment(j) as f64 * var.max(0.0).powf(j as f64 / 2.0);
            rep.row(&label, d, kk, &format!("{name}_moment_{j}"), fmt_f(x), fmt_f(pred), fmt_f(x - pred));
            if name == "S+" {
                rep.point(j.to_string(), fmt_f(x), fmt_f(pred));
            }
        }
    }
    rep.row(&label, d, kk, "S+S-", fmt_f(m.cross), fmt_f(var), fmt_f(m.cross - var));
    let table = pool
        .install(|| SpmTable::build(&zs, kk, len))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let half = (p - 1) / 2;
    for h1 in 1..=half {
        for h2 in 1..=half {
            for (s1, s2) in [(Sign::Plus, Sign::Plus), (Sign::Minus, Sign::Minus), (Sign::Plus, Sign::Minus)] {
                let c = table.covariance(h1, h2, s1, s2);
                let pred = covariance_prediction(kk, len, h1, h2);
                let stat = format!("cov(h={h1},{h2};{}{})", s1.symbol(), s2.symbol());
                rep.row(&label, d, kk, &stat, fmt_f(c), fmt_f(pred), fmt_f(c - pred));
            }
        }
    }
    for n in (2..=cfg.moments.min(6)).step_by(2) {
        let brute = theta_sum(p, n).map_err(CliError::Config)?;
        let closed = theta_closed_form(p, n / 2);
        rep.row(&label, d, kk, &format!("theta_sum_{n}"), brute.to_string(), closed.to_string(), (brute as i128 - closed as i128).to_string());
        let per: u128 = brute / ((1..=(n / 2) as u128).product::<u128>() << (n / 2));
        rep.row(&label, d, kk, &format!("theta_sum_{n}_per_pairing"), per.to_string(), closed.to_string(), (per as i128 - closed as i128).to_string());
    }
    rep.detail = Some(serde_json::to_value(&m).unwrap());
    Ok(Some(rep))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    Rh,
    ExplicitFormula,
    Bs,
    Keypoint,
    Sandwich,
    ExactAverages,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Rh => "rh",
            Suite::ExplicitFormula => "explicit-formula",
            Suite::Bs => "bs",
            Suite::Keypoint => "keypoint",
            Suite::Sandwich => "sandwich",
            Suite::ExactAverages => "exact-averages",
        }
    }
}

fn check(rep: &mut Report, label: &str, d: u32, param: impl ToString, stat: &str, bad: u64, total: u64) {
    rep.row(label, d, param, stat, format!("{bad}/{total}"), "0".into(), bad.to_string());
    rep.failures += bad;
}

fn err_name(e: &ZetaError) -> &'static str {
    match e {
        ZetaError::NonIntegral { .. } => "newton-integrality",
        ZetaError::Overdetermined { .. } => "overdetermined-levels",
        ZetaError::NonRational(_) => "integer",
        ZetaError::RouteMismatch => "dual-route",
        ZetaError::FunctionalEquation(_) => "functional-equation",
        ZetaError::MissingLevel { .. } => "missing-level",
    }
}

fn verify_rh(cfg: &Config, rep: &mut Report) -> Result<(), CliError> {
    let opts = ZetaOpts { extra_levels: cfg.extra_levels, dual_route: true };
    let (spec, t, fam) = zeta_setup(cfg, &opts)?;
    let label = spec.label();
    let d = spec.degree();
    let members = fam.all_members(&t);
    let outcomes: Vec<Result<Option<Vec<(String, bool)>>, &'static str>> = pool(cfg)?.install(|| {
        members
            .par_iter()
            .map(|m| match reduce(&t, &m.g, fam.h(m), Some(fam.poles(m))) {
                Reduction::Constant(_) => Ok(None),
                Reduction::Curve(red) => {
                    let z = curve_zeta(&t, &red, &opts).map_err(|e| err_name(&e))?;
                    let mut res: Vec<(String, bool)> =
                        weil_report(&z, 1e-9).checks.into_iter().map(|c| (c.name, c.ok)).collect();
                    let q = z.q as i128;
                    let orth = (0..z.delta as usize - 1).all(|k| {
                        let tot = z.s.iter().fold(asfam::Cyc::zero(z.p), |a, row| a.add(&row[k]));
                        tot.as_int() == Some(z.n[k] as i128 - 1 - q.pow(k as u32 + 1))
                    });
                    res.push(("orthogonality".into(), orth));
                    Ok(Some(res))
                }
            })
            .collect()
    });
    let mut tally: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for name in ["degree", "integer", "functional-equation", "residual", "nonnegative-counts", "orthogonality", "dual-route"] {
        tally.insert(name.into(), (0, 0));
    }
    let mut curves = 0;
    for o in outcomes {
        match o {
            Ok(None) => {}
            Ok(Some(res)) => {
                curves += 1;
                tally.get_mut("dual-route").unwrap().1 += 1;
                for (n, ok) in res {
                    let e = tally.entry(n).or_default();
                    e.1 += 1;
                    if !ok {
                        e.0 += 1;
                    }
                }
            }
            Err(name) => {
                curves += 1;
                let e = tally.entry(name.to_string()).or_default();
                e.0 += 1;
                e.1 += 1;
            }
        }
    }
    for (n, (bad, tot)) in tally {
        check(rep, &label, d, 0, &format!("rh:{n}"), bad, tot);
    }
    eprintln!("rh: {curves} curves checked");
    Ok(())
}

fn random_trig(rng: &mut ChaCha8Rng) -> TrigPoly {
    let k = rng.gen_range(0..=10usize);
    let c = (0..2 * k + 1).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    TrigPoly::new(c)
}

fn verify_explicit(cfg: &Config, l: &Loaded, rep: &mut Report) {
    let label = l.spec.label();
    let d = l.spec.degree();
    let p = l.spec.p;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    if l.curves.is_empty() {
        check(rep, &label, d, 0, "explicit-formula:residual<1e-9", 0, 0);
        return;
    }
    for i in 0..cfg.samples {
        let z = &l.curves[rng.gen_range(0..l.curves.len())];
        let h = rng.gen_range(1..p);
        let trig = if i % 2 == 0 {
            random_trig(&mut rng)
        } else {
            let k = rng.gen_range(1..=10);
            let len = rng.gen_range(0.05..0.95);
            let s = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            build_bs(k, len, s).unwrap().to_trig()
        };
        let r = explicit_formula_check(z, h, &trig).residual;
        worst = worst.max(r);
        if r >= 1e-9 {
            bad += 1;
        }
    }
    check(rep, &label, d, 0, "explicit-formula:residual<1e-9", bad, cfg.samples as u64);
    rep.row(&label, d, 0, "explicit-formula:max_residual", fmt_f(worst), "1e-9".into(), "NA".into());
}

fn verify_bs(cfg: &Config, rep: &mut Report) {
    let label = "bs";
    let mut cases: Vec<(usize, f64)> = Vec::new();
    for k in [5, 20, 100, 1000] {
        for len in [0.1, 0.3, 0.5] {
            cases.push((k, len));
        }
    }
    if let Some(k) = cfg.k.fixed() {
        cases.push((k, cfg.interval));
    }
    for (k, len) in cases {
        let grid = sandwich_grid(len, 10_000);
        let mut viol = 0;
        let mut coef = 0;
        let mut zeroth = 0;
        for s in [Sign::Plus, Sign::Minus] {
            let poly = build_bs(k, len, s).unwrap();
            if sandwich_violation(&poly, &grid) >= 1e-12 {
                viol += 1;
            }
            if coefficient_deviation(&poly) > 1.0 + 1e-12 {
                coef += 1;
            }
            if (poly.coeffs[0] - (len + s.as_f64() / (k as f64 + 1.0))).abs() > 1e-15 {
                zeroth += 1;
            }
        }
        let tag = format!("|I|={}", fmt_f(len));
        check(rep, label, 0, k, &format!("bs:sandwich({tag})"), viol, 2);
        check(rep, label, 0, k, &format!("bs:zeroth({tag})"), zeroth, 2);
        check(rep, label, 0, k, &format!("bs:coefficient_bound({tag})"), coef, 2);
    }
    for k in [100, 1000, 10_000] {
        let s = bs_fourier_sums(k, 0.1).unwrap();
        let dev = [s.sq_plus, s.sq_minus, s.cross].iter().map(|v| (v - s.reference).abs()).fold(s.even_plus.abs(), f64::max);
        check(rep, label, 0, k, "bs:fourier_sums_within_1.5", (dev > 1.5) as u64, 1);
        rep.row(label, 0, k, "bs:sq_plus", fmt_f(s.sq_plus), fmt_f(s.reference), fmt_f(s.sq_plus - s.reference));
    }
}

fn verify_keypoint(cfg: &Config, rep: &mut Report) -> Result<(), CliError> {
    let spec = cfg.spec().map_err(CliError::Config)?;
    let t = tower(spec.p, spec.e, 2)?;
    let p = spec.p as i64;
    let q = t.q();
    let mut bad = 0;
    let mut total = 0;
    let ms: Vec<i64> = (-p..=p).collect();
    let mut shapes: Vec<(Vec<i64>, Vec<u32>)> = Vec::new();
    for u1 in 1..=2 {
        for &m1 in &ms {
            shapes.push((vec![m1], vec![u1]));
            for u2 in 1..=2 {
                for &m2 in &ms {
                    shapes.push((vec![m1, m2], vec![u1, u2]));
                }
            }
        }
    }
    for (m, u) in shapes {
        let s = asfam::stats::keypoint_sum(&t, &m, &u);
        let pred = asfam::stats::keypoint_predicted(q, spec.p, &m, &u);
        total += 1;
        if s != asfam::Cyc::from_int(spec.p, pred) {
            bad += 1;
        }
    }
    check(rep, "keypoint", 0, 0, "keypoint:exact", bad, total);
    Ok(())
}

fn verify_sandwich(cfg: &Config, l: &Loaded, rep: &mut Report) -> Result<(), CliError> {
    let label = l.spec.label();
    let d = l.spec.degree();
    let kk = resolve_k(cfg, genus_max(&l.curves), d);
    let res: Vec<bool> = pool(cfg)?
        .install(|| l.curves.par_iter().map(|z| sandwich_check(z, kk, cfg.interval).map(|s| s.ok)).collect::<Result<_, _>>())
        .map_err(|e| CliError::Config(e.to_string()))?;
    let bad = res.iter().filter(|ok| !**ok).count() as u64;
    check(rep, &label, d, kk, "sandwich", bad, res.len() as u64);
    Ok(())
}

fn verify_exact(cfg: &Config, rep: &mut Report) -> Result<(), CliError> {
    let (t, fam) = base_family(cfg, cfg.k_range[1])?;
    let spec = fam.spec.clone();
    let label = spec.label();
    let d = spec.degree();
    let ks: Vec<u32> = (cfg.k_range[0]..=cfg.k_range[1]).collect();
    let pool = pool(cfg)?;
    let totals = pool.install(|| point_totals(&t, &fam, &ks));
    for &k in &ks {
        let emp = totals.average(k).unwrap();
        // Only rows inside the exactness range are gated; the first moment shares that range.
        let Ok(p) = predicted_avg_points(&spec, k) else { continue };
        if !p.exact {
            continue;
        }
        check(rep, &label, d, k, "exact-averages:avg_points", (emp != p.value) as u64, 1);
        rep.row(&label, d, k, "avg_points", fmt_q(emp), fmt_q(p.value), fmt_q(emp - p.value));
        let pred = predicted_m1(&spec, k);
        let m = pool.install(|| empirical_m1(&t, &fam, k, 1, 1, false));
        check(rep, &label, d, k, "exact-averages:first_moment", !m.equals(pred) as u64, 1);
    }
    Ok(())
}

pub fn verify(cfg: &Config, suites: &[Suite], max_new: Option<usize>) -> Result<Option<Report>, CliError> {
    let mut rep = Report::new("verify", "K", cfg);
    let mut zetas: Option<Loaded> = None;
    for &s in suites {
        let before = rep.failures;
        match s {
            Suite::Rh => verify_rh(cfg, &mut rep)?,
            Suite::Bs => verify_bs(cfg, &mut rep),
            Suite::Keypoint => verify_keypoint(cfg, &mut rep)?,
            Suite::ExactAverages => verify_exact(cfg, &mut rep)?,
            Suite::ExplicitFormula | Suite::Sandwich => {
                if zetas.is_none() {
                    match loaded(cfg, max_new)? {
                        Some(l) => zetas = Some(l),
                        None => return Ok(None),
                    }
                }
                let l = zetas.as_ref().unwrap();
                if s == Suite::Sandwich {
                    verify_sandwich(cfg, l, &mut rep)?;
                } else {
                    verify_explicit(cfg, l, &mut rep);
                }
            }
        }
        eprintln!("suite {}: {} failures", s.name(), rep.failures - before);
    }
    Ok(Some(rep))
}
