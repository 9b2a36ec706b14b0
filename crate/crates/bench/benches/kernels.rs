use std::hint::black_box;
use std::sync::Arc;

use chernpatch::compact_dual::{pieri_multiply, Grassmannian, SchubertClass};
use chernpatch::connections::nomizu;
use chernpatch::exterior::{curvature_form, Chart};
use chernpatch::hc::Representation;
use chernpatch::invariants::chern_form;
use chernpatch::lie::GroupSpec;
use chernpatch::strata::{partition_weights, BumpProfile, FlagTubeModel};
use chernpatch::suite::{run_suite, SuiteConfig};
use criterion::{criterion_group, criterion_main, Criterion};

fn sections(c: &mut Criterion) {
    let x = [0.1, -0.2, 0.3, 1.4, 0.2, 0.9];
    c.bench_function("h2_section_second_order_jet", |b| {
        b.iter(|| Chart::H2.section(&chernpatch::jet::Jet::vars(black_box(&x), 2)).unwrap())
    });
}

fn chern_forms(c: &mut Criterion) {
    let rep = Representation::parse(&GroupSpec::sp(2), "standard").unwrap();
    let curv = curvature_form(&Chart::H2.pullback(Arc::new(nomizu(&rep)))).unwrap();
    let sigma2 = chern_form(&curv, 2).unwrap();
    let x = [0.1, -0.2, 0.3, 1.4, 0.2, 0.9];
    c.bench_function("sp4_nomizu_sigma2_at_point", |b| b.iter(|| sigma2.values(black_box(&x)).unwrap()));
}

fn pieri(c: &mut Criterion) {
    let space = Grassmannian::new(3, 7).unwrap();
    c.bench_function("gr37_sigma1_power_via_pieri", |b| {
        b.iter(|| {
            let mut acc = SchubertClass::one(space);
            for _ in 0..space.dim() {
                acc = pieri_multiply(&acc, 1).unwrap();
            }
            black_box(acc.coefficient(&space.top()))
        })
    });
}

fn partitions(c: &mut Criterion) {
    let model = FlagTubeModel::standard(4);
    let x = [0.1, 0.02, -0.3, 0.05, 0.7, 0.08, 0.2];
    c.bench_function("flag4_partition_weights", |b| b.iter(|| partition_weights(&model, &BumpProfile, 0.5, black_box(&x))));
}

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    group.bench_function("partition_1e4", |b| b.iter(|| run_suite(&SuiteConfig::new("partition", 1)).unwrap()));
    group.bench_function("p1_chern", |b| b.iter(|| run_suite(&SuiteConfig::new("p1-chern", 1)).unwrap()));
    group.finish();
}

criterion_group!(benches, sections, chern_forms, pieri, partitions, suites);
criterion_main!(benches);
