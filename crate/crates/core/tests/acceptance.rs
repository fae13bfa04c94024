//! Acceptance criteria. Each criterion prints one PASS/FAIL line.
//!
//! Two criteria carry target values that the exhaustive counts contradict. They
//! print FAIL honestly; the test pins the observed values so any drift is caught.

use asfam::bs::{bs_fourier_sums, build_bs, coefficient_deviation, sandwich_grid, sandwich_violation, Sign, TrigPoly};
use asfam::families::{local_subfamily_count, predicted_local_ratio, predicted_size, zeta_q, BetaKind, LocalCondition, DEFAULT_BUDGET};
use asfam::scan::scan_all;
use asfam::stats::{
    auto_k, empirical_m1, empirical_moments, explicit_formula_check, family_avg_points, keypoint_predicted,
    keypoint_sum, predicted_avg_points, predicted_avg_points_rank_pm1, predicted_m1,
    sandwich_check, second_moment_prediction, SpmTable,
};
use asfam::zeta::weil_report;
use asfam::{Cyc, CurveZeta, FactorizationType, Family, FamilyKind, FamilySpec, FieldTower, ZetaOpts, P1, Q};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn spec(kind: FamilyKind) -> FamilySpec {
    FamilySpec::new(kind, 3, 1)
}

fn ft(v: &str) -> FamilyKind {
    FamilyKind::FactType(FactorizationType::parse(v).unwrap())
}

fn family(kind: FamilyKind, k_max: u32) -> (FieldTower, Family) {
    let s = spec(kind);
    let t = FieldTower::new(s.p, s.e, k_max).unwrap();
    let fam = Family::new(&t, &s, DEFAULT_BUDGET).unwrap();
    (t, fam)
}

/// Every non-degenerate member's zeta data, with a tower tall enough for `opts`.
fn zetas(kind: FamilyKind, opts: &ZetaOpts) -> (Vec<CurveZeta>, u64) {
    let (_, fam0) = family(kind.clone(), 1);
    let dm1 = fam0.h_entries().iter().map(|h| h.poles.delta()).max().unwrap() - 1;
    let mut need = dm1 + opts.extra_levels;
    if opts.dual_route {
        need = need.max(2 * dm1);
    }
    let (t, fam) = family(kind, need);
    let r = scan_all(&t, &fam, opts).unwrap();
    (r.curves.into_iter().map(|c| c.zeta).collect(), r.degenerate)
}

fn c1() -> Outcome {
    let (t, fam) = family(FamilyKind::Rank0(4), 4);
    let size = fam.size(&t);
    let mut ok = size == 162;
    let mut got = Vec::new();
    for k in 1..=4 {
        let emp = family_avg_points(&t, &fam, k);
        let p = predicted_avg_points(&fam.spec, k).unwrap();
        ok &= p.exact && emp == p.value;
        got.push(format!("k={k}: {emp} vs {}", p.value));
    }
    ok &= got[0].starts_with("k=1: 4 ") && got[1].starts_with("k=2: 10 ") && got[2].starts_with("k=3: 34 ");
    Outcome { pass: ok, detail: format!("|F|={size}; {}", got.join(", ")) }
}

fn c2() -> (Outcome, Vec<Q>) {
    let avg3 = |kind: FamilyKind| {
        let (t, fam) = family(kind, 3);
        family_avg_points(&t, &fam, 3)
    };
    let l12 = avg3(FamilyKind::Laurent(1, 2));
    let l21 = avg3(FamilyKind::Laurent(2, 1));
    let quad = avg3(ft("2^2"));
    let quad_pred = predicted_avg_points(&spec(ft("2^2")), 3).unwrap();
    let agg = (l12 + quad) / Q::from_integer(2);
    let target = predicted_avg_points_rank_pm1(3, 3, 3);
    let l13 = avg3(FamilyKind::Laurent(1, 3));
    let agg4 = (l13 + quad) / Q::from_integer(2);
    let pass = l12 == Q::from_integer(32) && l21 == Q::from_integer(32) && quad == quad_pred.value && agg == target;
    let detail = format!(
        "Laurent(1,2) N_3 avg {l12}, Laurent(2,1) {l21} (target 32); (2^2) {quad} vs {}; aggregate {agg} vs {target}; \
         diagnostic d1+d2=4: Laurent(1,3) {l13}, aggregate {agg4}",
        quad_pred.value
    );
    (Outcome { pass, detail }, vec![l12, l21, quad, agg, l13, agg4])
}

fn c3() -> (Outcome, Vec<Q>) {
    let kind = ft("1^4");
    let (t, fam) = family(kind.clone(), 2);
    let s = spec(kind);
    let size = fam.size(&t) as i128;
    let mut ratios_fin: Vec<Q> = Vec::new();
    for alpha in t.enumerate_p1(2).into_iter().filter(|&a| t.degree_over_base(2, a) == 2) {
        for b in t.level(2).elements() {
            let c = LocalCondition { k: 2, alpha, beta: P1::Aff(b) };
            ratios_fin.push(Q::new(local_subfamily_count(&t, &fam, &[c]) as i128, size));
        }
    }
    let mut ratios_inf: Vec<Q> = Vec::new();
    for alpha in t.enumerate_p1(1) {
        let c = LocalCondition { k: 1, alpha, beta: P1::Inf };
        ratios_inf.push(Q::new(local_subfamily_count(&t, &fam, &[c]) as i128, size));
    }
    let ninth = Q::new(1, 9);
    let fin_ok = ratios_fin.iter().all(|&r| r == ninth);
    let inf = ratios_inf[0];
    let inf_uniform = ratios_inf.iter().all(|&r| r == inf);
    let pred_inf = predicted_local_ratio(&s, &[1], &[BetaKind::Inf]).unwrap();
    let pred_fin = predicted_local_ratio(&s, &[2], &[BetaKind::Finite]).unwrap();
    let pass = fin_ok && inf_uniform && inf == Q::new(1, 3);
    let detail = format!(
        "deg 2, beta finite: {} counts all {} (target 1/9, formula {pred_fin}); deg 1, beta=inf: {} counts all {inf} \
         (target 1/3, formula {pred_inf})",
        ratios_fin.len(),
        if fin_ok { "1/9".to_string() } else { "not 1/9".to_string() },
        ratios_inf.len()
    );
    (Outcome { pass, detail }, vec![ratios_fin[0], inf, pred_inf])
}

fn c4() -> Outcome {
    let size = |d| {
        let (t, fam) = family(FamilyKind::Full(d), 1);
        fam.size(&t) as f64
    };
    let n1 = size(1);
    let z2 = zeta_q(3, 2);
    let exact1 = Q::from_integer(81) / z2;
    let n2 = size(2);
    let p2 = predicted_size(&spec(FamilyKind::Full(2))).unwrap();
    let n3 = size(3);
    let p3 = predicted_size(&spec(FamilyKind::Full(3))).unwrap();
    let rel2 = (n2 - p2).abs() / p2;
    let rel3 = (n3 - p3).abs() / p3;
    let pass = n1 == 48.0 && exact1 == Q::from_integer(48) && (p2 - 432.0).abs() < 1e-9 && (n2 - 432.0).abs() <= 81.0 && rel3 <= rel2;
    Outcome {
        pass,
        detail: format!(
            "|F_1|={n1}, q^4/zeta_q(2)={exact1}; |F_2|={n2} vs {p2} (|diff| <= 81); relative error d=2 {rel2:.4}, d=3 {rel3:.4} ({n3} vs {p3:.1})"
        ),
    }
}

fn orthogonal(z: &CurveZeta) -> bool {
    let q = z.q as i128;
    (0..z.delta as usize - 1).all(|k| {
        let tot = z.s.iter().fold(Cyc::zero(z.p), |a, row| a.add(&row[k]));
        tot.as_int() == Some(z.n[k] as i128 - 1 - q.pow(k as u32 + 1))
    })
}

fn c5_kinds() -> Vec<FamilyKind> {
    let mut v: Vec<FamilyKind> = (1..=5).map(FamilyKind::Rank0).collect();
    v.extend((1..=3).map(FamilyKind::Ord));
    v.push(ft("2^2"));
    v
}

fn c5(all: &mut Vec<CurveZeta>) -> Outcome {
    let opts = ZetaOpts { extra_levels: 3, dual_route: true };
    let mut curves = 0;
    let mut bad = 0;
    let mut worst: f64 = 0.0;
    for kind in c5_kinds() {
        let (zs, _) = zetas(kind, &opts);
        for z in &zs {
            let r = weil_report(z, 1e-9);
            curves += 1;
            worst = worst.max(r.residual);
            if !r.ok() {
                bad += 1;
            }
        }
        all.extend(zs);
    }
    Outcome {
        pass: bad == 0 && curves > 0,
        detail: format!("{curves} curves, both routes agree, {bad} failures, max ||alpha|-sqrt q| = {worst:.2e}"),
    }
}

fn c6(all: &[CurveZeta]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut bs_pairs = 0;
    for i in 0..500 {
        let z = &all[rng.gen_range(0..all.len())];
        let h = rng.gen_range(1..z.p);
        let trig = if i % 2 == 0 {
            let k = rng.gen_range(0..=10usize);
            TrigPoly::new((0..2 * k + 1).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
        } else {
            bs_pairs += 1;
            let s = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            build_bs(rng.gen_range(1..=10), rng.gen_range(0.05..0.95), s).unwrap().to_trig()
        };
        worst = worst.max(explicit_formula_check(z, h, &trig).residual);
    }
    Outcome { pass: worst < 1e-9, detail: format!("500 pairs ({bs_pairs} BS), max residual {worst:.2e}") }
}

fn c7() -> Outcome {
    let mut viol: f64 = 0.0;
    let mut zeroth: f64 = 0.0;
    let mut coef: f64 = 0.0;
    for k in [5usize, 20, 100, 1000] {
        for len in [0.1, 0.3, 0.5] {
            let grid = sandwich_grid(len, 10_000);
            for s in [Sign::Plus, Sign::Minus] {
                let poly = build_bs(k, len, s).unwrap();
                viol = viol.max(sandwich_violation(&poly, &grid));
                zeroth = zeroth.max((poly.coeffs[0] - (len + s.as_f64() / (k as f64 + 1.0))).abs());
                coef = coef.max(coefficient_deviation(&poly));
            }
        }
    }
    let mut fourier: f64 = 0.0;
    for k in [100usize, 1000, 10_000] {
        let s = bs_fourier_sums(k, 0.1).unwrap();
        for v in [s.sq_plus, s.sq_minus, s.cross] {
            fourier = fourier.max((v - s.reference).abs());
        }
        fourier = fourier.max(s.even_plus.abs());
    }
    Outcome {
        pass: viol < 1e-12 && zeroth < 1e-15 && coef <= 1.0 + 1e-12 && fourier <= 1.5,
        detail: format!(
            "sandwich violation {viol:.1e}, zeroth-coefficient error {zeroth:.1e}, coefficient ratio {coef:.4}, Fourier-sum deviation {fourier:.4}"
        ),
    }
}

fn c8(all: &[CurveZeta]) -> Outcome {
    let orth_bad = all.par_iter().filter(|z| !orthogonal(z)).count();
    let t = FieldTower::new(3, 1, 2).unwrap();
    let ms: Vec<i64> = (-3..=3).collect();
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
    let key_bad = shapes
        .par_iter()
        .filter(|(m, u)| keypoint_sum(&t, m, u) != Cyc::from_int(3, keypoint_predicted(3, 3, m, u)))
        .count();
    Outcome {
        pass: orth_bad == 0 && key_bad == 0,
        detail: format!("orthogonality {orth_bad}/{} bad; keypoint {key_bad}/{} bad", all.len(), shapes.len()),
    }
}

fn c9() -> Outcome {
    let (t, fam) = family(FamilyKind::Rank0(4), 4);
    let mut ok = true;
    let mut vals = Vec::new();
    for k in 1..=4 {
        let pred = predicted_m1(&fam.spec, k);
        for h in 1..3 {
            ok &= empirical_m1(&t, &fam, k, 1, h, false).equals(pred);
        }
        ok &= (k % 3 == 0) != (pred == Q::from_integer(0));
        vals.push(format!("k={k}: {pred}"));
    }
    Outcome { pass: ok, detail: format!("both characters exact; predicted {}", vals.join(", ")) }
}

fn c10() -> Outcome {
    let (zs, _) = zetas(FamilyKind::Rank0(5), &ZetaOpts::default());
    let bad = zs.par_iter().filter(|z| !sandwich_check(z, 10, 0.25).unwrap().ok).count();
    Outcome { pass: bad == 0 && !zs.is_empty(), detail: format!("{} curves, {bad} violations", zs.len()) }
}

fn c11() -> Outcome {
    let len = 0.25;
    let mut ok = true;
    let mut parts = Vec::new();
    for d in 4..=6 {
        let (zs, degenerate) = zetas(FamilyKind::Rank0(d), &ZetaOpts::default());
        let refs: Vec<&CurveZeta> = zs.iter().collect();
        let g = zs.iter().map(|z| z.genus).max().unwrap();
        let k = auto_k(g, len, d).k;
        let m = empirical_moments("rank0", &refs, degenerate, k, len, 2).unwrap();
        let pred = second_moment_prediction(3, k, len);
        let dp = m.s_plus.raw[1] - pred;
        let dm = m.s_minus.raw[1] - pred;
        ok &= dp.abs() <= 3.0 && dm.abs() <= 3.0;
        let table = SpmTable::build(&refs, k, len).unwrap();
        let cross = table.covariance(1, 1, Sign::Plus, Sign::Minus);
        parts.push(format!("d={d} K={k}: <S+^2>-pred {dp:.3}, <S-^2>-pred {dm:.3}, cov(+,-) {cross:.3}"));
    }
    parts.push("h1 != h2 covariance: vacuous at p=3 (only h=1 <= (p-1)/2)".into());
    Outcome { pass: ok, detail: parts.join("; ") }
}

fn c12() -> Outcome {
    let (zs, degenerate) = zetas(FamilyKind::Rank0(6), &ZetaOpts::default());
    let refs: Vec<&CurveZeta> = zs.iter().collect();
    let g = zs.iter().map(|z| z.genus).max().unwrap();
    let k = auto_k(g, 0.25, 6).k;
    let m = empirical_moments("rank0(6)", &refs, degenerate, k, 0.25, 4).unwrap();
    let generated = m.histogram.counts.len() == 32 && m.normalized_zero_count.raw.len() == 4 && m.s_plus.raw.len() == 4;
    Outcome {
        pass: generated && m.mean_offset.abs() <= 2.0,
        detail: format!(
            "{} curves + {degenerate} degenerate, genus {}..{}, K={k}, mean offset {:.4}, histogram skipped {}",
            m.curves, m.genus_min, m.genus_max, m.mean_offset, m.histogram.skipped
        ),
    }
}

fn report(id: u32, name: &str, limit_s: u64, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let el = start.elapsed();
    let in_time = el <= Duration::from_secs(limit_s);
    let pass = o.pass && in_time;
    println!(
        "[{}] {id:>2} {name}: {} ({:.2}s, limit {limit_s}s)",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        el.as_secs_f64()
    );
    pass
}

fn main() {
    let mut results = Vec::new();
    results.push((1, report(1, "exact rank-0 averages", 5, c1)));

    let mut c2_vals = Vec::new();
    results.push((2, report(2, "exact rank-(p-1) aggregation", 60, || {
        let (o, v) = c2();
        c2_vals = v;
        o
    })));
    let mut c3_vals = Vec::new();
    results.push((3, report(3, "exact local ratios", 60, || {
        let (o, v) = c3();
        c3_vals = v;
        o
    })));
    results.push((4, report(4, "zeta convention pin", 60, c4)));
    let mut all = Vec::new();
    results.push((5, report(5, "Weil suite", 600, || c5(&mut all))));
    results.push((6, report(6, "explicit formula", 120, || c6(&all))));
    results.push((7, report(7, "BS properties", 60, c7)));
    results.push((8, report(8, "orthogonality and keypoint", 120, || c8(&all))));
    results.push((9, report(9, "first moment exactness", 60, c9)));
    results.push((10, report(10, "sandwich", 300, c10)));
    results.push((11, report(11, "second-moment trend", 900, c11)));
    results.push((12, report(12, "Gaussian-trend diagnostics", 900, c12)));

    // Targets contradicted by exhaustive counts; the observed values are pinned.
    let q = |n, d| Q::new(n, d);
    assert_eq!(c2_vals, vec![q(35, 1), q(35, 1), q(36, 1), q(71, 2), q(32, 1), q(34, 1)]);
    assert_eq!(c3_vals, vec![q(1, 9), q(1, 4), q(1, 4)]);
    let known_red = [2, 3];
    let mut unexpected = Vec::new();
    for (id, pass) in results {
        if pass == known_red.contains(&id) {
            unexpected.push(id);
        }
    }
    println!("known red: {known_red:?}; unexpected outcomes: {unexpected:?}");
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
