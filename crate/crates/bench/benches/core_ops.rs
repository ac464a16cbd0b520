//! Benchmarks of the hot paths: jet multiplication, Christoffel symbols,
//! the third covariant derivative of a lift, geodesic integration and a
//! holonomy loop.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use conecheck_core::cone;
use conecheck_core::corpus;
use conecheck_core::geometry;
use conecheck_core::jet::Jet;
use conecheck_core::transport;

fn jet_multiplication(c: &mut Criterion) {
    let dim = 4;
    let x = Jet::variable(0.7, 0, dim).unwrap();
    let y = Jet::variable(-0.4, 1, dim).unwrap();
    let a = x.sin().unwrap().add(&y.exp().unwrap()).unwrap();
    let b = x.mul(&y).unwrap().add_scalar(2.0).recip().unwrap();
    c.bench_function("jet_mul_dim4", |bench| {
        bench.iter(|| black_box(&a).mul(black_box(&b)).unwrap())
    });
}

fn christoffel_sphere(c: &mut Criterion) {
    let case = corpus::round_sphere(2).unwrap();
    let p = vec![0.6, -0.3];
    c.bench_function("christoffel_round_sphere", |bench| {
        bench.iter(|| geometry::christoffel_at(black_box(&case.metric), black_box(&p)).unwrap())
    });
}

fn third_derivative_of_lift(c: &mut Criterion) {
    let case = corpus::round_sphere(2).unwrap();
    let cone = cone::build_cone(&case.chart, &case.metric, cone::DEFAULT_R_RANGE).unwrap();
    let lf = cone::lift_scalar(&cone, &case.scalars["harmonic_deg2"]);
    let third = geometry::covariant_derivative(
        &geometry::covariant_derivative(&geometry::gradient(&lf.lifted), &cone.metric),
        &cone.metric,
    );
    let p = vec![1.2, 0.4, -0.5];
    c.bench_function("third_cov_derivative_cone", |bench| {
        bench.iter(|| third.values_at(black_box(&p)).unwrap())
    });
}

fn geodesic_integration(c: &mut Criterion) {
    let case = corpus::round_sphere(2).unwrap();
    c.bench_function("geodesic_1024_steps", |bench| {
        bench.iter(|| {
            transport::geodesic_integrate(
                black_box(&case.metric),
                &[0.4, -0.7],
                &[0.8, 0.3],
                1.0,
                1024,
            )
            .unwrap()
        })
    });
}

fn holonomy_octant(c: &mut Criterion) {
    let case = corpus::round_sphere(2).unwrap();
    let loop_curve = corpus::octant_loop(&case.chart);
    c.bench_function("holonomy_octant_256_steps", |bench| {
        bench.iter(|| transport::holonomy_loop(black_box(&case.metric), &loop_curve, 256).unwrap())
    });
}

criterion_group!(
    benches,
    jet_multiplication,
    christoffel_sphere,
    third_derivative_of_lift,
    geodesic_integration,
    holonomy_octant
);
criterion_main!(benches);
