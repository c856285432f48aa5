use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tfatom::correction::eq9_density;
use tfatom::potentials::{AtomicModel, PotentialField, PotentialKind};
use tfatom::tf_solver::{solve_tf, TfParams};

fn bench_density_batch(c: &mut Criterion) {
    let sol = solve_tf(&TfParams::default()).unwrap();
    let model = AtomicModel::new(1.0).unwrap();
    let radii: Vec<f64> = (0..4096)
        .map(|i| model.a * 10f64.powf(-3.0 + 6.0 * i as f64 / 4096.0) * 0.6)
        .collect();
    let mut group = c.benchmark_group("density_batch");
    group.bench_with_input(BenchmarkId::new("parallel_map", radii.len()), &radii, |b, rs| {
        b.iter(|| {
            let field = PotentialField::new(PotentialKind::ThomasFermi, model, &sol);
            tfatom::parallel::par_map(rs, |&r| eq9_density(&field, r).unwrap())
        })
    });
    group.bench_with_input(BenchmarkId::new("sequential", radii.len()), &radii, |b, rs| {
        b.iter(|| {
            let field = PotentialField::new(PotentialKind::ThomasFermi, model, &sol);
            rs.iter()
                .map(|&r| eq9_density(&field, r).unwrap())
                .collect::<Vec<f64>>()
        })
    });
    group.finish();
}

fn bench_oracle_sweep(c: &mut Criterion) {
    let sol = solve_tf(&TfParams::default()).unwrap();
    let zs: Vec<f64> = (1..=8).map(|z| z as f64).collect();
    let mut group = c.benchmark_group("oracle_sweep");
    group.sample_size(10);
    group.bench_function("parallel_map", |b| {
        b.iter(|| tfatom::correction::delta_e_oracle(&sol, &zs, 1e-6).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            zs.iter()
                .map(|&z| {
                    let model = AtomicModel::new(z).unwrap();
                    tfatom::correction::delta_e_oracle_single(&sol, &model, 1e-6).unwrap()
                })
                .collect::<Vec<_>>()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_density_batch, bench_oracle_sweep);
criterion_main!(benches);
