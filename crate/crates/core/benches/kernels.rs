use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use std::hint::black_box;

use billiard_core::theta::{theta3, Nome, ThetaParams};
use billiard_core::{
    propagate_grid_par, propagate_grid_seq, BoxSpec, EigenState, GridState, QuantumNumbers, Shape,
    Superposition,
};

fn bench_params() -> ThetaParams {
    ThetaParams {
        epsilon: 1e-2,
        ..ThetaParams::default()
    }
}

fn two_mode_grid(shape: Shape, n: usize) -> GridState {
    let spec = BoxSpec::new(1.0, 1.0, 1.0).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let s12 = EigenState::new(shape, QuantumNumbers::new(1, 2).unwrap(), spec).unwrap();
    let s13 = EigenState::new(shape, QuantumNumbers::new(1, 3).unwrap(), spec).unwrap();
    let s = Superposition::new(vec![(one, s12), (one, s13)]).unwrap();
    GridState::from_superposition(&s, n, n).unwrap()
}

fn bench_theta(c: &mut Criterion) {
    let params = ThetaParams::default();
    let q = Nome::new(Complex64::from_polar(
        (-std::f64::consts::PI * 1e-3).exp(),
        0.37,
    ))
    .unwrap();
    c.bench_function("theta3_damped", |b| {
        b.iter(|| theta3(black_box(Complex64::new(0.4, 0.0)), &q, &params).unwrap())
    });
}

fn bench_propagate(c: &mut Criterion) {
    let params = bench_params();
    let t = 0.1;
    for (shape, label) in [(Shape::Square, "square"), (Shape::Triangle, "triangle")] {
        for n in [129usize, 257] {
            let initial = two_mode_grid(shape, n);
            let mut group = c.benchmark_group(format!("propagate_{label}_{n}"));
            group.sample_size(10);
            group.warm_up_time(Duration::from_millis(500));
            group.measurement_time(Duration::from_secs(3));
            group.bench_function("seq", |b| {
                b.iter(|| propagate_grid_seq(black_box(&initial), t, &params).unwrap())
            });
            group.bench_function("par", |b| {
                b.iter(|| propagate_grid_par(black_box(&initial), t, &params).unwrap())
            });
            group.finish();
        }
    }
}

criterion_group!(benches, bench_theta, bench_propagate);
criterion_main!(benches);
