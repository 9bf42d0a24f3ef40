use criterion::{black_box, criterion_group, criterion_main, Criterion};
use nalgebra::DVector;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use peds_bench::{quartic_system, random_gram, random_state, two_dim_system, BENCH_N};
use peds_core::analysis::{peds_jacobian_closed_form, peds_jacobian_fd};
use peds_core::embedding::{matrix_function_eval, ExtendedState, MapKind};
use peds_core::integrate::{integrate, IntegrationConfig, Method};
use peds_core::systems;

fn bench_rhs(c: &mut Criterion) {
    let mut group = c.benchmark_group("rhs_n50");
    let state = random_state(1, 1, BENCH_N);
    for (label, map) in [
        ("commutative", MapKind::StandardCommutative),
        ("mixed", MapKind::MixedCommutative),
        (
            "noncommutative",
            MapKind::StandardNonCommutative(peds_core::target::Ordering::Standard),
        ),
    ] {
        let sys = quartic_system(map, BENCH_N);
        group.bench_function(label, |b| {
            b.iter(|| sys.rhs(black_box(&state)).unwrap());
        });
    }
    let sys2d = two_dim_system(BENCH_N);
    let state2d = random_state(2, 2, BENCH_N);
    group.bench_function("noncommutative_2d_exp", |b| {
        b.iter(|| sys2d.rhs(black_box(&state2d)).unwrap());
    });
    group.finish();
}

fn bench_matrix_function(c: &mut Criterion) {
    let omega = random_gram(3, 25, BENCH_N);
    let mut rng = StdRng::seed_from_u64(5);
    let x = DVector::from_fn(BENCH_N, |_, _| 0.2 + rng.gen::<f64>());
    c.bench_function("matrix_function_exp_n50", |b| {
        b.iter(|| matrix_function_eval(black_box(&omega), black_box(&x), |z| Ok(z.exp())).unwrap());
    });
}

fn bench_jacobians(c: &mut Criterion) {
    let sys = two_dim_system(20);
    let x_star = [0.0, 1.0];
    c.bench_function("jacobian_closed_form_m2_n20", |b| {
        b.iter(|| peds_jacobian_closed_form(black_box(&sys), black_box(&x_star)).unwrap());
    });
    let state = ExtendedState::uniform(&x_star, 20);
    c.bench_function("jacobian_fd_m2_n20", |b| {
        b.iter(|| peds_jacobian_fd(black_box(&sys), black_box(&state), 1e-5).unwrap());
    });
}

fn bench_integration(c: &mut Criterion) {
    let sys = quartic_system(MapKind::StandardCommutative, BENCH_N);
    let x0 = ExtendedState::uniform(
        &[systems::DOUBLE_WELL.critical_points().unwrap()[2]],
        BENCH_N,
    );
    let cfg = IntegrationConfig::new(0.01, 100, Method::RungeKutta4)
        .unwrap()
        .with_record_stride(100);
    c.bench_function("rk4_100_steps_n50", |b| {
        b.iter(|| integrate(black_box(&sys), black_box(&x0), black_box(&cfg)).unwrap());
    });
}

criterion_group!(
    benches,
    bench_rhs,
    bench_matrix_function,
    bench_jacobians,
    bench_integration
);
criterion_main!(benches);
