//! Closed-form-vs-finite-difference Jacobian agreement across maps,
//! orderings, decay families and sizes; the spectrum theorem; and the
//! stability-transfer table.

use nalgebra::DVector;
use num_complex::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use peds_core::analysis::{
    eigenvalue_mismatch, eigenvalues_match, mean_field_spectrum, peds_jacobian_closed_form,
    peds_jacobian_fd, Classification,
};
use peds_core::embedding::{DecayFunction, ExtendedState, MapKind, PedsSystem};
use peds_core::projector::Projector;
use peds_core::target::Ordering;
use peds_core::{linalg, systems, verify};

const FD_TOL: f64 = 1e-5;
const H: f64 = 1e-5;

/// A three-variable system with a triple-product coupling and a known
/// equilibrium at `a` (every component nonzero, so the mixed map applies):
/// f_i(x) = sum_j A_ij (x_j - a_j) + c_i prod_j (x_j - a_j).
/// The Jacobian at `a` is exactly A, which has a complex eigenvalue pair.
fn coupled_3d() -> (peds_core::target::TargetSystem, Vec<f64>) {
    let a = [1.0, 2.0, 0.5];
    let rows = [[-1.0, 0.5, 0.0], [-0.5, -1.0, 0.0], [0.0, 0.0, -2.0]];
    let c = [0.7, -0.4, 0.3];
    let mut sys = peds_core::target::TargetSystem::new(3).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            if rows[i][j] != 0.0 {
                let mut e = vec![0u32; 3];
                e[j] = 1;
                sys.add_monomial(i, rows[i][j], e).unwrap();
                sys.add_monomial(i, -rows[i][j] * a[j], vec![0, 0, 0]).unwrap();
            }
        }
        // prod_j (x_j - a_j) expanded over variable subsets.
        for mask in 0..8u32 {
            let mut exps = vec![0u32; 3];
            let mut coeff = c[i];
            for j in 0..3 {
                if mask & (1 << j) != 0 {
                    exps[j] = 1;
                } else {
                    coeff *= -a[j];
                }
            }
            sys.add_monomial(i, coeff, exps).unwrap();
        }
    }
    (sys, a.to_vec())
}

fn maps_for(system_has_zero_equilibrium: bool) -> Vec<MapKind> {
    let mut maps = vec![
        MapKind::StandardCommutative,
        MapKind::StandardNonCommutative(Ordering::Standard),
        MapKind::StandardNonCommutative(Ordering::Balanced),
    ];
    // The mixed map's fractional-power calculus requires nonzero equilibrium
    // components.
    if !system_has_zero_equilibrium {
        maps.push(MapKind::MixedCommutative);
    }
    maps
}

#[test]
fn closed_form_matches_fd_across_maps_sizes_and_decays() {
    let quartic = systems::DOUBLE_WELL;
    let roots = quartic.critical_points().unwrap();
    let eq2d: Vec<Vec<f64>> = vec![vec![0.0, 1.0], vec![0.0, -1.0], vec![0.0, 0.0]];
    for n in [2usize, 5, 20] {
        for map in maps_for(false) {
            for root in &roots {
                let d = verify::measure_jacobian_consistency(
                    &quartic.gradient_system(),
                    &[*root],
                    n,
                    0.8,
                    map.clone(),
                    H,
                )
                .unwrap();
                assert!(d <= FD_TOL, "quartic {map:?} N={n} root {root}: {d}");
            }
        }
        for map in maps_for(true) {
            for eq in &eq2d {
                let d = verify::measure_jacobian_consistency(
                    &systems::exp_potential_2d(),
                    eq,
                    n,
                    0.8,
                    map.clone(),
                    H,
                )
                .unwrap();
                assert!(d <= FD_TOL, "2D {map:?} N={n} at {eq:?}: {d}");
            }
        }
    }
}

#[test]
fn closed_form_matches_fd_for_three_variables() {
    let (sys, a) = coupled_3d();
    // Sanity: a is an equilibrium and the Jacobian there has the planted
    // complex pair.
    assert!(sys.eval(&a).unwrap().iter().all(|v| v.abs() < 1e-12));
    for n in [2usize, 5, 20] {
        for map in maps_for(false) {
            let d =
                verify::measure_jacobian_consistency(&sys, &a, n, 0.8, map.clone(), H).unwrap();
            assert!(d <= FD_TOL, "m=3 {map:?} N={n}: {d}");
        }
    }
}

#[test]
fn three_variable_spectrum_theorem_with_complex_pair() {
    // The embedding Jacobian is non-symmetric here; its spectrum must still
    // be the target eigenvalues plus -alpha with multiplicity m(N-1).
    let (sys, a) = coupled_3d();
    let n = 8;
    let alpha = 0.6;
    let peds = PedsSystem::mean_field(
        sys,
        n,
        MapKind::StandardNonCommutative(Ordering::Standard),
        alpha,
    )
    .unwrap();
    let rep = peds_jacobian_closed_form(&peds, &a).unwrap();
    assert!(
        rep.target_eigenvalues.iter().any(|l| l.im.abs() > 0.4),
        "expected a complex pair, got {:?}",
        rep.target_eigenvalues
    );
    let predicted = mean_field_spectrum(&rep.target_eigenvalues, alpha, n, 1);
    assert!(
        eigenvalues_match(&rep.eigenvalues, &predicted, 1e-8),
        "mismatch {}",
        eigenvalue_mismatch(&rep.eigenvalues, &predicted)
    );
    assert_eq!(rep.classification, Classification::Stable);
}

#[test]
fn generalized_decays_match_fd_for_three_variables() {
    let (sys, a) = coupled_3d();
    let n = 5;
    let mut rng = StdRng::seed_from_u64(37);
    for gen_b in [false, true] {
        let decays: Vec<DecayFunction> = (0..3)
            .map(|_| {
                let d = verify::rand_diag(&mut rng, n, 0.3, 1.5);
                if gen_b {
                    DecayFunction::gen_b(d).unwrap()
                } else {
                    DecayFunction::gen_a(d).unwrap()
                }
            })
            .collect();
        let peds = PedsSystem::builder(sys.clone(), Projector::uniform_mean_field(n).unwrap())
            .map(MapKind::StandardNonCommutative(Ordering::Balanced))
            .decays(decays)
            .build()
            .unwrap();
        let rep = peds_jacobian_closed_form(&peds, &a).unwrap();
        let fd = peds_jacobian_fd(&peds, &ExtendedState::uniform(&a, n), H).unwrap();
        let defect = linalg::max_abs_diff(&rep.closed_form, &fd);
        assert!(defect <= FD_TOL, "m=3 gen_b={gen_b}: {defect}");
    }
}

#[test]
fn closed_form_matches_fd_for_generalized_decays() {
    let mut rng = StdRng::seed_from_u64(21);
    let n = 6;
    let quartic = systems::DOUBLE_WELL;
    let root = quartic.critical_points().unwrap()[2];
    for gen_b in [false, true] {
        let d = verify::rand_diag(&mut rng, n, 0.3, 1.7);
        let decay = if gen_b {
            DecayFunction::gen_b(d).unwrap()
        } else {
            DecayFunction::gen_a(d).unwrap()
        };
        let sys = PedsSystem::builder(
            quartic.gradient_system(),
            Projector::uniform_mean_field(n).unwrap(),
        )
        .map(MapKind::StandardNonCommutative(Ordering::Standard))
        .decays(vec![decay])
        .build()
        .unwrap();
        let rep = peds_jacobian_closed_form(&sys, &[root]).unwrap();
        let fd = peds_jacobian_fd(&sys, &ExtendedState::uniform(&[root], n), H).unwrap();
        let defect = linalg::max_abs_diff(&rep.closed_form, &fd);
        assert!(defect <= FD_TOL, "gen_b={gen_b}: {defect}");
    }
}

#[test]
fn fd_jacobian_is_ordering_invariant_at_equilibria() {
    let n = 5;
    let build = |ord: Ordering| {
        PedsSystem::mean_field(
            systems::exp_potential_2d(),
            n,
            MapKind::StandardNonCommutative(ord),
            0.8,
        )
        .unwrap()
    };
    let std_sys = build(Ordering::Standard);
    let bal_sys = build(Ordering::Balanced);
    for eq in [[0.0, 1.0], [0.0, -1.0]] {
        let state = ExtendedState::uniform(&eq, n);
        let a = peds_jacobian_fd(&std_sys, &state, H).unwrap();
        let b = peds_jacobian_fd(&bal_sys, &state, H).unwrap();
        assert!(linalg::max_abs_diff(&a, &b) <= 1e-6);
    }
}

#[test]
fn commutative_and_noncommutative_fd_jacobians_differ_away_from_equilibria() {
    // For a generic Gram projector and m = 2 the two lifts have different
    // derivatives off the uniform manifold; the agreement theorems are
    // fixed-point statements.
    let mut rng = StdRng::seed_from_u64(23);
    let n = 5;
    let b = nalgebra::DMatrix::from_fn(2, n, |_, _| rng.gen::<f64>());
    let omega = Projector::gram(&b).unwrap();
    let mut target = peds_core::target::TargetSystem::new(2).unwrap();
    target.add_monomial(0, 1.0, vec![1, 2]).unwrap();
    target.add_monomial(1, -0.5, vec![2, 0]).unwrap();
    let build = |map: MapKind| {
        PedsSystem::builder(target.clone(), omega.clone())
            .map(map)
            .uniform_standard_decay(0.6)
            .build()
            .unwrap()
    };
    let comm = build(MapKind::StandardCommutative);
    let nc = build(MapKind::StandardNonCommutative(Ordering::Standard));
    let state = ExtendedState::new(vec![
        DVector::from_fn(n, |_, _| rng.gen::<f64>() + 0.2),
        DVector::from_fn(n, |_, _| rng.gen::<f64>() + 0.2),
    ])
    .unwrap();
    let a = peds_jacobian_fd(&comm, &state, H).unwrap();
    let b = peds_jacobian_fd(&nc, &state, H).unwrap();
    assert!(linalg::max_abs_diff(&a, &b) > 1e-4);
}

#[test]
fn spectrum_theorem_for_quartic_and_2d_roots() {
    let quartic = systems::DOUBLE_WELL;
    let equilibria: Vec<Vec<f64>> = quartic
        .critical_points()
        .unwrap()
        .into_iter()
        .map(|r| vec![r])
        .collect();
    let worst =
        verify::measure_spectrum_theorem(&quartic.gradient_system(), &equilibria, 12, 0.8).unwrap();
    assert!(worst <= 1e-8, "quartic spectrum mismatch {worst}");
    let eq2d = vec![vec![0.0, 1.0], vec![0.0, -1.0], vec![0.0, 0.0]];
    let worst =
        verify::measure_spectrum_theorem(&systems::exp_potential_2d(), &eq2d, 12, 0.8).unwrap();
    assert!(worst <= 1e-8, "2D spectrum mismatch {worst}");
}

#[test]
fn spectrum_theorem_numerically_extends_to_gram_projectors() {
    // Rank-k version: each target eigenvalue k times, -alpha with
    // multiplicity m(N-k). Checked numerically for a random Gram projector.
    let mut rng = StdRng::seed_from_u64(29);
    let n = 9;
    let k = 3;
    let alpha = 0.7;
    let b = nalgebra::DMatrix::from_fn(k, n, |_, _| rng.gen::<f64>());
    let omega = Projector::gram(&b).unwrap();
    let target = systems::logistic_1d();
    // Assemble J = (J_m + alpha I) (x) Omega - alpha I for m = 1 directly.
    let fp = target.jacobian(&[1.0]).unwrap()[(0, 0)];
    let mut jac = omega.matrix() * (fp + alpha);
    for i in 0..n {
        jac[(i, i)] -= alpha;
    }
    let eigs = peds_core::analysis::eigenvalues(&jac).unwrap();
    let predicted = mean_field_spectrum(&[Complex::new(fp, 0.0)], alpha, n, k);
    assert!(
        eigenvalues_match(&eigs, &predicted, 1e-8),
        "mismatch {}",
        eigenvalue_mismatch(&eigs, &predicted)
    );
}

#[test]
fn classification_transfer_table_holds_on_both_scenarios_roots() {
    let quartic = systems::DOUBLE_WELL;
    let equilibria: Vec<Vec<f64>> = quartic
        .critical_points()
        .unwrap()
        .into_iter()
        .map(|r| vec![r])
        .collect();
    let v = verify::count_classification_transfer_violations(
        &quartic.gradient_system(),
        &equilibria,
        10,
        0.8,
    )
    .unwrap();
    assert_eq!(v, 0);
    let eq2d = vec![vec![0.0, 1.0], vec![0.0, -1.0], vec![0.0, 0.0]];
    let v = verify::count_classification_transfer_violations(
        &systems::exp_potential_2d(),
        &eq2d,
        10,
        0.8,
    )
    .unwrap();
    assert_eq!(v, 0);
}

#[test]
fn unstable_target_points_become_saddles_with_explicit_counts() {
    let quartic = systems::DOUBLE_WELL;
    let barrier = quartic.maxima().unwrap()[0];
    let n = 7;
    let sys = PedsSystem::mean_field(
        quartic.gradient_system(),
        n,
        MapKind::StandardNonCommutative(Ordering::Standard),
        0.8,
    )
    .unwrap();
    let rep = peds_jacobian_closed_form(&sys, &[barrier]).unwrap();
    assert_eq!(rep.classification, Classification::Saddle);
    let positives = rep.eigenvalues.iter().filter(|l| l.re > 1e-8).count();
    let negatives = rep.eigenvalues.iter().filter(|l| l.re < -1e-8).count();
    assert_eq!(positives, 1);
    assert_eq!(negatives, n - 1);
}

#[test]
fn gen_b_jacobian_components_commute() {
    let mut rng = StdRng::seed_from_u64(31);
    let omega = Projector::uniform_mean_field(8).unwrap();
    let worst = verify::measure_gen_b_commutation(&mut rng, &omega, 20);
    assert!(worst <= 1e-10);
    let gram = Projector::gram(&nalgebra::DMatrix::from_fn(3, 8, |_, _| rng.gen::<f64>())).unwrap();
    let worst = verify::measure_gen_b_commutation(&mut rng, &gram, 20);
    assert!(worst <= 1e-10);
}
