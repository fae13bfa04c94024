use asfam::bs::{build_bs, Sign};
use asfam::curve::{count_level, reduce, Reduction};
use asfam::families::{Family, DEFAULT_BUDGET};
use asfam::zeta::curve_zeta;
use asfam::{FamilyKind, FamilySpec, FieldTower, ZetaOpts};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn kernels(c: &mut Criterion) {
    let t = FieldTower::new(3, 1, 8).unwrap();
    let spec = FamilySpec::new(FamilyKind::Rank0(5), 3, 1);
    let fam = Family::new(&t, &spec, DEFAULT_BUDGET).unwrap();
    let members = fam.all_members(&t);
    let m = &members[members.len() / 2];
    let h = fam.h(m);

    c.bench_function("count_level k=6", |b| b.iter(|| count_level(&t, black_box(&m.g), h, 6)));
    c.bench_function("reduce", |b| b.iter(|| reduce(&t, black_box(&m.g), h, Some(fam.poles(m)))));
    let Reduction::Curve(red) = reduce(&t, &m.g, h, None) else { panic!("degenerate member") };
    c.bench_function("curve_zeta rank0 d=5", |b| {
        b.iter(|| curve_zeta(&t, black_box(&red), &ZetaOpts::default()).unwrap())
    });
    c.bench_function("curve_zeta dual route", |b| {
        b.iter(|| curve_zeta(&t, black_box(&red), &ZetaOpts { extra_levels: 3, dual_route: true }).unwrap())
    });
    for k in [10usize, 100] {
        c.bench_function(&format!("build_bs K={k}"), |b| b.iter(|| build_bs(black_box(k), 0.25, Sign::Plus).unwrap()));
    }
}

criterion_group!(benches, kernels);
criterion_main!(benches);
