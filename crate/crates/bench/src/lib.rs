//! Shared fixtures for the criterion benchmarks.

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use peds_core::embedding::{ExtendedState, MapKind, PedsSystem};
use peds_core::projector::Projector;
use peds_core::systems;
use peds_core::target::Ordering;

pub const BENCH_N: usize = 50;

pub fn quartic_system(map: MapKind, n: usize) -> PedsSystem {
    PedsSystem::mean_field(systems::DOUBLE_WELL.gradient_system(), n, map, 0.1)
        .expect("valid system")
}

pub fn two_dim_system(n: usize) -> PedsSystem {
    PedsSystem::mean_field(
        systems::exp_potential_2d(),
        n,
        MapKind::StandardNonCommutative(Ordering::Standard),
        0.1,
    )
    .expect("valid system")
}

pub fn random_state(seed: u64, m: usize, n: usize) -> ExtendedState {
    let mut rng = StdRng::seed_from_u64(seed);
    ExtendedState::new(
        (0..m)
            .map(|_| DVector::from_fn(n, |_, _| 0.2 + rng.gen::<f64>()))
            .collect(),
    )
    .expect("non-empty state")
}

pub fn random_gram(seed: u64, k: usize, n: usize) -> Projector {
    let mut rng = StdRng::seed_from_u64(seed);
    loop {
        let b = DMatrix::from_fn(k, n, |_, _| rng.gen::<f64>());
        if let Ok(p) = Projector::gram(&b) {
            return p;
        }
    }
}
