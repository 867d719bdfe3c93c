//! Throughput of the core operations on catalog data.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use qbundle::catalog::{self, load_example};
use qbundle_bench::word_products;

fn normal_forms(c: &mut Criterion) {
    let su = catalog::suq2();
    let pairs = word_products(su.pres(), 3, 64);
    c.bench_function("suq2 products of basis words", |b| {
        b.iter(|| {
            for (x, y) in &pairs {
                black_box(su.pres().mul(x, y));
            }
        })
    });
}

fn coproducts(c: &mut Criterion) {
    let su = catalog::suq2();
    let words = su.pres().basis_words(3);
    c.bench_function("suq2 coproduct on length-3 basis", |b| {
        b.iter(|| {
            for w in &words {
                black_box(su.coproduct(&qbundle::Poly::word(w.clone())));
            }
        })
    });
}

fn differentials(c: &mut Criterion) {
    let calc = catalog::suq2_calculus();
    let words = calc.base().basis_words(3);
    c.bench_function("suq2 d on length-3 basis", |b| {
        b.iter(|| {
            for w in &words {
                black_box(calc.d(&qbundle::Poly::word(w.clone())).unwrap());
            }
        })
    });
}

fn bundles(c: &mut Criterion) {
    let torus = load_example("torus").unwrap();
    let b = torus.bundle.clone().unwrap();
    c.bench_function("torus base one-forms at length 3", |bch| {
        bch.iter(|| black_box(b.base_forms(1, 3)))
    });
    let mut g = c.benchmark_group("full checks");
    g.sample_size(10);
    g.bench_function("group_z", |bch| {
        let ex = load_example("group_z").unwrap();
        bch.iter(|| black_box(ex.check(3, 1)))
    });
    g.finish();
}

criterion_group!(benches, normal_forms, coproducts, differentials, bundles);
criterion_main!(benches);
