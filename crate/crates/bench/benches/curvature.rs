use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use varimin::curvature_tensor::{recover_b, TestScalarDictionary};
use varimin::energy::{mesh_energy_gradient, EnergySpec, Form};
use varimin::first_variation::{mean_curvature_kernel, mean_curvature_mesh};
use varimin::mesh::shapes;
use varimin::monotonicity::{check_bounds, BoundOptions};
use varimin::{varifold_from_mesh, QuadratureRule};

fn estimators(c: &mut Criterion) {
    let mesh = shapes::icosphere(4, 1.0);
    let v = varifold_from_mesh(&mesh, QuadratureRule::Centroid, None).unwrap();
    c.bench_function("mean_curvature_mesh/icosphere4", |b| {
        b.iter(|| mean_curvature_mesh(black_box(&v)).unwrap())
    });
    c.bench_function("mean_curvature_kernel/icosphere4", |b| {
        b.iter(|| mean_curvature_kernel(black_box(&v), 0.15).unwrap())
    });
    let small = varifold_from_mesh(&shapes::icosphere(3, 1.0), QuadratureRule::Centroid, None).unwrap();
    let dict = TestScalarDictionary::standard(3, 0.4);
    c.bench_function("recover_b/icosphere3", |b| {
        b.iter(|| recover_b(black_box(&small), &dict).unwrap())
    });
}

fn bounds_and_energy(c: &mut Criterion) {
    let mesh = shapes::icosphere(4, 1.0);
    let v = varifold_from_mesh(&mesh, QuadratureRule::Vertex, None).unwrap();
    let f = mean_curvature_mesh(&v).unwrap();
    c.bench_function("check_bounds/icosphere4", |b| {
        b.iter(|| check_bounds(black_box(&v), &f, 3.0, &BoundOptions::default()).unwrap())
    });
    let ell = shapes::ellipsoid(3, [1.0, 1.0, 0.5]);
    let spec = EnergySpec::power(Form::Mean, 3.0, 1.0);
    c.bench_function("mesh_energy_gradient/ellipsoid3", |b| {
        b.iter(|| mesh_energy_gradient(black_box(&ell), &spec).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = estimators, bounds_and_energy
}
criterion_main!(benches);
