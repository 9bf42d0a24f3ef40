//! Fixed-point location, closed-form embedding Jacobians at equilibria,
//! spectra and stability classification.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::embedding::{ExtendedState, PedsSystem};
use crate::error::{Error, Result};
use crate::linalg;
use crate::target::TargetSystem;

/// Newton residual required of a reported fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-9;
/// Residual allowed when a caller claims a point is an equilibrium.
pub const FIXED_POINT_PRE_TOL: f64 = 1e-6;
/// Two roots closer than this (max-norm) are the same root.
pub const DEDUP_RADIUS: f64 = 1e-6;
/// Real parts within this of zero make an equilibrium Marginal.
pub const CLASSIFICATION_TOL: f64 = 1e-8;
/// Pairing tolerance for sorted eigenvalue multiset comparison.
pub const SPECTRUM_MATCH_TOL: f64 = 1e-8;

const NEWTON_MAX_ITERS: usize = 80;
const FD_STEP_MIN: f64 = 1e-8;
const FD_STEP_MAX: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Stable,
    Saddle,
    Unstable,
    Marginal,
}

impl Classification {
    pub fn token(self) -> &'static str {
        match self {
            Classification::Stable => "stable",
            Classification::Saddle => "saddle",
            Classification::Unstable => "unstable",
            Classification::Marginal => "marginal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointSource {
    NewtonOnTarget,
    TrajectoryLimit,
}

#[derive(Debug, Clone)]
pub struct FixedPointReport {
    pub x_star: Vec<f64>,
    pub residual: f64,
    pub source: FixedPointSource,
}

#[derive(Debug, Clone)]
pub struct FixedPointSearch {
    pub roots: Vec<FixedPointReport>,
    /// One note per seed that was dropped, with the reason.
    pub skipped: Vec<String>,
}

/// Certify a trajectory's terminal point as a fixed point of the target.
pub fn fixed_point_from_trajectory(
    sys: &TargetSystem,
    terminal: &[f64],
) -> Result<FixedPointReport> {
    let residual = DVector::from_vec(sys.eval(terminal)?).amax();
    if residual > FIXED_POINT_TOL {
        return Err(Error::NotFixedPoint {
            residual,
            tol: FIXED_POINT_TOL,
        });
    }
    Ok(FixedPointReport {
        x_star: terminal.to_vec(),
        residual,
        source: FixedPointSource::TrajectoryLimit,
    })
}

/// Newton iteration on the target from each seed; converged roots are
/// deduplicated, non-convergent seeds dropped with a note.
pub fn find_fixed_points(sys: &TargetSystem, seeds: &[Vec<f64>]) -> FixedPointSearch {
    let mut roots: Vec<FixedPointReport> = Vec::new();
    let mut skipped = Vec::new();
    'seeds: for seed in seeds {
        if seed.len() != sys.m() || seed.iter().any(|x| !x.is_finite()) {
            skipped.push(format!("seed {seed:?}: wrong length or non-finite"));
            continue;
        }
        let mut x = DVector::from_vec(seed.clone());
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITERS {
            let f = match sys.eval(x.as_slice()) {
                Ok(f) => DVector::from_vec(f),
                Err(e) => {
                    skipped.push(format!("seed {seed:?}: {e}"));
                    continue 'seeds;
                }
            };
            if f.amax() <= FIXED_POINT_TOL {
                converged = true;
                break;
            }
            let jac = match sys.jacobian(x.as_slice()) {
                Ok(j) => j,
                Err(e) => {
                    skipped.push(format!("seed {seed:?}: {e}"));
                    continue 'seeds;
                }
            };
            match jac.lu().solve(&f) {
                Some(delta) => x -= delta,
                None => {
                    skipped.push(format!("seed {seed:?}: singular Newton Jacobian"));
                    continue 'seeds;
                }
            }
            if x.iter().any(|v| !v.is_finite()) {
                skipped.push(format!("seed {seed:?}: iteration left the finite domain"));
                continue 'seeds;
            }
        }
        if !converged {
            // One more residual check after the final step.
            if let Ok(f) = sys.eval(x.as_slice()) {
                if DVector::from_vec(f).amax() <= FIXED_POINT_TOL {
                    converged = true;
                }
            }
        }
        if !converged {
            skipped.push(format!(
                "seed {seed:?}: no convergence in {NEWTON_MAX_ITERS} iterations"
            ));
            continue;
        }
        let residual = DVector::from_vec(sys.eval(x.as_slice()).unwrap()).amax();
        let is_new = roots.iter().all(|r| {
            r.x_star
                .iter()
                .zip(x.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max)
                > DEDUP_RADIUS
        });
        if is_new {
            roots.push(FixedPointReport {
                x_star: x.as_slice().to_vec(),
                residual,
                source: FixedPointSource::NewtonOnTarget,
            });
        }
    }
    roots.sort_by(|a, b| a.x_star.partial_cmp(&b.x_star).unwrap());
    FixedPointSearch { roots, skipped }
}

/// Eigenvalues of a real square matrix, through the symmetric solver when the
/// matrix is symmetric and a sweep-bounded real Schur form otherwise.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    linalg::spectrum(m)
}

/// Stable / Saddle / Unstable by real-part signs; Marginal wins whenever any
/// real part sits within the tolerance of zero.
pub fn classify_equilibrium(eigs: &[Complex<f64>]) -> Classification {
    assert!(
        !eigs.is_empty(),
        "classification needs at least one eigenvalue"
    );
    if eigs.iter().any(|l| l.re.abs() <= CLASSIFICATION_TOL) {
        return Classification::Marginal;
    }
    let negatives = eigs.iter().filter(|l| l.re < 0.0).count();
    if negatives == eigs.len() {
        Classification::Stable
    } else if negatives == 0 {
        Classification::Unstable
    } else {
        Classification::Saddle
    }
}

#[derive(Debug, Clone)]
pub struct JacobianReport {
    pub closed_form: DMatrix<f64>,
    pub eigenvalues: Vec<Complex<f64>>,
    pub classification: Classification,
    pub target_eigenvalues: Vec<Complex<f64>>,
}

/// The block Jacobian at the uniform equilibrium X_i = x*_i 1 for a
/// mean-field embedding: block (i,j) = f'_{i,x_j}(x*) P1 + delta_ij Q_i(P1).
/// Holds for all three matrix maps and any ordering.
pub fn peds_jacobian_closed_form(sys: &PedsSystem, x_star: &[f64]) -> Result<JacobianReport> {
    if !sys.omega().is_mean_field() {
        return Err(Error::Unsupported(
            "closed-form Jacobian is established for the uniform mean-field projector".into(),
        ));
    }
    let residual = DVector::from_vec(sys.target().eval(x_star)?).amax();
    if residual > FIXED_POINT_PRE_TOL {
        return Err(Error::NotFixedPoint {
            residual,
            tol: FIXED_POINT_PRE_TOL,
        });
    }
    let m = sys.m();
    let n = sys.n();
    let jac_target = sys.target().jacobian(x_star)?;
    let omega_m = sys.omega().matrix();
    let mut full = DMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..m {
            let fij = jac_target[(i, j)];
            let mut block = omega_m * fij;
            if i == j {
                block += sys.decays()[i].operator(sys.omega());
            }
            full.view_mut((i * n, j * n), (n, n)).copy_from(&block);
        }
    }
    let eigs = eigenvalues(&full)?;
    let classification = classify_equilibrium(&eigs);
    let target_eigenvalues = eigenvalues(&jac_target)?;
    Ok(JacobianReport {
        closed_form: full,
        eigenvalues: eigs,
        classification,
        target_eigenvalues,
    })
}

/// Central finite differences of the full rhs, column by column.
pub fn peds_jacobian_fd(sys: &PedsSystem, state: &ExtendedState, h: f64) -> Result<DMatrix<f64>> {
    if !(FD_STEP_MIN..=FD_STEP_MAX).contains(&h) {
        return Err(Error::InvalidDimension(format!(
            "finite-difference step {h} outside [{FD_STEP_MIN}, {FD_STEP_MAX}]"
        )));
    }
    let dim = sys.m() * sys.n();
    let base = state.to_flat();
    let mut jac = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[k] += h;
        minus[k] -= h;
        let fp = sys.rhs_flat(&plus)?;
        let fm = sys.rhs_flat(&minus)?;
        let col = (fp - fm) / (2.0 * h);
        jac.column_mut(k).copy_from(&col);
    }
    Ok(jac)
}

/// Predicted spectrum of the mean-field uniform-alpha Jacobian: each target
/// eigenvalue with the projector's rank as multiplicity, plus `-alpha` with
/// multiplicity `m (N - rank)`.
pub fn mean_field_spectrum(
    target_eigs: &[Complex<f64>],
    alpha: f64,
    n: usize,
    rank: usize,
) -> Vec<Complex<f64>> {
    let m = target_eigs.len();
    let mut out = Vec::with_capacity(m * n);
    for l in target_eigs {
        for _ in 0..rank {
            out.push(*l);
        }
    }
    for _ in 0..m * (n - rank) {
        out.push(Complex::new(-alpha, 0.0));
    }
    out
}

/// Multiset equality after sorting on (re, im).
pub fn eigenvalues_match(a: &[Complex<f64>], b: &[Complex<f64>], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let key = |z: &Complex<f64>| (z.re, z.im);
    let mut aa: Vec<Complex<f64>> = a.to_vec();
    let mut bb: Vec<Complex<f64>> = b.to_vec();
    aa.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    bb.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    aa.iter().zip(bb.iter()).all(|(x, y)| (x - y).norm() <= tol)
}

/// Worst pairing distance between two spectra (for reporting).
pub fn eigenvalue_mismatch(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    assert_eq!(a.len(), b.len());
    let key = |z: &Complex<f64>| (z.re, z.im);
    let mut aa: Vec<Complex<f64>> = a.to_vec();
    let mut bb: Vec<Complex<f64>> = b.to_vec();
    aa.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    bb.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    aa.iter()
        .zip(bb.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Row-sum inclusion discs for the scalar generalization-A Jacobian
/// f'(x*) P1 - D (I - P1): centers f'(x*)/N - (N-1) D_ii / N and radii
/// (N-1) |f'(x*) + D_ii| / N. Every eigenvalue lies in the union.
pub fn gerschgorin_bounds(sys: &PedsSystem, x_star: &[f64]) -> Result<Vec<(f64, f64)>> {
    if sys.m() != 1 {
        return Err(Error::Unsupported(
            "inclusion discs derived for m = 1 only".into(),
        ));
    }
    if !sys.omega().is_mean_field() {
        return Err(Error::Unsupported(
            "inclusion discs derived for the uniform mean-field projector".into(),
        ));
    }
    let d = match &sys.decays()[0] {
        crate::embedding::DecayFunction::GenA { d } => d.clone(),
        _ => {
            return Err(Error::Unsupported(
                "inclusion discs derived for generalization-A decay".into(),
            ))
        }
    };
    let residual = DVector::from_vec(sys.target().eval(x_star)?).amax();
    if residual > FIXED_POINT_PRE_TOL {
        return Err(Error::NotFixedPoint {
            residual,
            tol: FIXED_POINT_PRE_TOL,
        });
    }
    let fp = sys.target().jacobian(x_star)?[(0, 0)];
    let n = sys.n() as f64;
    Ok((0..sys.n())
        .map(|i| {
            let center = fp / n - (n - 1.0) * d[i] / n;
            let radius = (n - 1.0) * (fp + d[i]).abs() / n;
            (center, radius)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{DecayFunction, MapKind};
    use crate::projector::Projector;
    use crate::systems;
    use crate::target::Ordering;

    #[test]
    fn logistic_roots_found_and_deduplicated() {
        let sys = systems::logistic_1d();
        let found = find_fixed_points(&sys, &[vec![-0.5], vec![0.5], vec![2.0]]);
        assert_eq!(found.roots.len(), 2);
        assert!(found.roots[0].x_star[0].abs() < 1e-9);
        assert!((found.roots[1].x_star[0] - 1.0).abs() < 1e-9);
        assert!(found.roots.iter().all(|r| r.residual <= FIXED_POINT_TOL));
    }

    #[test]
    fn exp_potential_roots_include_the_three_equilibria() {
        let sys = systems::exp_potential_2d();
        let seeds = vec![
            vec![0.2, 0.8],
            vec![-0.3, -1.2],
            vec![0.1, 0.1],
            vec![0.4, 0.6],
        ];
        let found = find_fixed_points(&sys, &seeds);
        let has = |x: f64, y: f64| {
            found
                .roots
                .iter()
                .any(|r| (r.x_star[0] - x).abs() < 1e-6 && (r.x_star[1] - y).abs() < 1e-6)
        };
        assert!(has(0.0, 1.0));
        assert!(has(0.0, -1.0));
        assert!(has(0.0, 0.0));
    }

    #[test]
    fn quartic_roots_match_the_polynomial_oracle() {
        let q = systems::DOUBLE_WELL;
        let sys = q.gradient_system();
        let seeds: Vec<Vec<f64>> = (-6..=9).map(|k| vec![k as f64]).collect();
        let found = find_fixed_points(&sys, &seeds);
        let oracle = q.critical_points().unwrap();
        assert_eq!(found.roots.len(), oracle.len());
        for (r, o) in found.roots.iter().zip(oracle.iter()) {
            assert!((r.x_star[0] - o).abs() < 1e-7);
        }
    }

    #[test]
    fn classification_rules() {
        let c = |v: &[(f64, f64)]| {
            classify_equilibrium(
                &v.iter()
                    .map(|&(re, im)| Complex::new(re, im))
                    .collect::<Vec<_>>(),
            )
        };
        assert_eq!(c(&[(-1.0, 0.0), (-0.5, 0.0)]), Classification::Stable);
        assert_eq!(c(&[(1.0, 0.0), (-0.5, 0.0)]), Classification::Saddle);
        assert_eq!(c(&[(2.0, 0.0), (0.5, 1.0)]), Classification::Unstable);
        assert_eq!(c(&[(0.0, 0.0)]), Classification::Marginal);
        assert_eq!(c(&[(-1.0, 0.0), (1e-12, 0.0)]), Classification::Marginal);
    }

    #[test]
    fn logistic_jacobian_spectrum_at_both_roots() {
        // x* = 1, alpha = 1, N = 3: the degenerate case {-1, -1, -1}.
        let sys = PedsSystem::mean_field(
            systems::logistic_1d(),
            3,
            MapKind::StandardNonCommutative(Ordering::Standard),
            1.0,
        )
        .unwrap();
        let rep = peds_jacobian_closed_form(&sys, &[1.0]).unwrap();
        let want: Vec<Complex<f64>> = vec![Complex::new(-1.0, 0.0); 3];
        assert!(eigenvalues_match(&rep.eigenvalues, &want, 1e-10));
        assert_eq!(rep.classification, Classification::Stable);

        // x* = 0, alpha = 0.5, N = 4: {1, -0.5, -0.5, -0.5}, a saddle.
        let sys = PedsSystem::mean_field(
            systems::logistic_1d(),
            4,
            MapKind::StandardNonCommutative(Ordering::Standard),
            0.5,
        )
        .unwrap();
        let rep = peds_jacobian_closed_form(&sys, &[0.0]).unwrap();
        let want = vec![
            Complex::new(1.0, 0.0),
            Complex::new(-0.5, 0.0),
            Complex::new(-0.5, 0.0),
            Complex::new(-0.5, 0.0),
        ];
        assert!(eigenvalues_match(&rep.eigenvalues, &want, 1e-10));
        assert_eq!(rep.classification, Classification::Saddle);
    }

    #[test]
    fn zero_target_jacobian_is_marginal() {
        // f identically zero with m = 2, alpha = 2, N = 2: {0, 0, -2, -2}.
        let mut t = TargetSystem::new(2).unwrap();
        t.add_monomial(0, 0.0, vec![0, 0]).unwrap();
        t.add_monomial(1, 0.0, vec![0, 0]).unwrap();
        let sys = PedsSystem::mean_field(t, 2, MapKind::StandardCommutative, 2.0).unwrap();
        let rep = peds_jacobian_closed_form(&sys, &[0.3, -0.7]).unwrap();
        let want = vec![
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(-2.0, 0.0),
            Complex::new(-2.0, 0.0),
        ];
        assert!(eigenvalues_match(&rep.eigenvalues, &want, 1e-10));
        assert_eq!(rep.classification, Classification::Marginal);
    }

    #[test]
    fn closed_form_requires_a_fixed_point() {
        let sys =
            PedsSystem::mean_field(systems::logistic_1d(), 3, MapKind::StandardCommutative, 1.0)
                .unwrap();
        assert!(matches!(
            peds_jacobian_closed_form(&sys, &[0.4]),
            Err(Error::NotFixedPoint { .. })
        ));
    }

    #[test]
    fn fd_jacobian_of_linear_target_is_state_independent() {
        let sys = PedsSystem::mean_field(
            systems::linear_1d(-0.8),
            3,
            MapKind::StandardNonCommutative(Ordering::Standard),
            0.6,
        )
        .unwrap();
        let a = peds_jacobian_fd(&sys, &ExtendedState::uniform(&[0.2], 3), 1e-5).unwrap();
        let b = peds_jacobian_fd(&sys, &ExtendedState::uniform(&[-1.7], 3), 1e-5).unwrap();
        assert!(linalg::max_abs_diff(&a, &b) <= 1e-9);
    }

    #[test]
    fn fd_step_bounds_enforced() {
        let sys =
            PedsSystem::mean_field(systems::logistic_1d(), 2, MapKind::StandardCommutative, 1.0)
                .unwrap();
        let st = ExtendedState::uniform(&[1.0], 2);
        assert!(peds_jacobian_fd(&sys, &st, 1e-9).is_err());
        assert!(peds_jacobian_fd(&sys, &st, 1e-2).is_err());
    }

    #[test]
    fn gerschgorin_discs_contain_the_spectrum() {
        let n = 8;
        let mut d_vals = Vec::new();
        for k in 0..n {
            d_vals.push(0.3 + 0.2 * k as f64);
        }
        let d = DVector::from_vec(d_vals);
        let target = systems::logistic_1d();
        let sys = PedsSystem::builder(target, Projector::uniform_mean_field(n).unwrap())
            .map(MapKind::StandardNonCommutative(Ordering::Standard))
            .decays(vec![DecayFunction::gen_a(d).unwrap()])
            .build()
            .unwrap();
        // x* = 1 with f'(1) = -1.
        let discs = gerschgorin_bounds(&sys, &[1.0]).unwrap();
        let rep_matrix = {
            let fp = sys.target().jacobian(&[1.0]).unwrap()[(0, 0)];
            let mut m = sys.omega().matrix() * fp;
            m += sys.decays()[0].operator(sys.omega());
            m
        };
        for l in eigenvalues(&rep_matrix).unwrap() {
            let inside = discs
                .iter()
                .any(|&(c, r)| ((l.re - c).powi(2) + l.im.powi(2)).sqrt() <= r + 1e-9);
            assert!(inside, "eigenvalue {l} escaped the discs {discs:?}");
        }
    }

    #[test]
    fn gerschgorin_uniform_diagonal_reduces_to_the_standard_spectrum() {
        // D = alpha I: the eigenvalues are f'(x*) and -alpha, both inside.
        let n = 6;
        let alpha = 0.9;
        let sys = PedsSystem::builder(
            systems::logistic_1d(),
            Projector::uniform_mean_field(n).unwrap(),
        )
        .map(MapKind::StandardCommutative)
        .decays(vec![
            DecayFunction::gen_a(DVector::from_element(n, alpha)).unwrap()
        ])
        .build()
        .unwrap();
        let discs = gerschgorin_bounds(&sys, &[1.0]).unwrap();
        let fp = -1.0;
        for l in [fp, -alpha] {
            let inside = discs.iter().any(|&(c, r)| (l - c).abs() <= r + 1e-12);
            assert!(inside, "eigenvalue {l} outside {discs:?}");
        }
    }

    #[test]
    fn gerschgorin_single_replica_disc_is_a_point() {
        let d = DVector::from_vec(vec![0.7]);
        let sys = PedsSystem::builder(
            systems::logistic_1d(),
            Projector::uniform_mean_field(1).unwrap(),
        )
        .map(MapKind::StandardCommutative)
        .decays(vec![DecayFunction::gen_a(d).unwrap()])
        .build()
        .unwrap();
        let discs = gerschgorin_bounds(&sys, &[1.0]).unwrap();
        assert_eq!(discs.len(), 1);
        assert!((discs[0].0 - (-1.0)).abs() < 1e-12);
        assert!(discs[0].1.abs() < 1e-12);
    }

    #[test]
    fn gerschgorin_scope_errors() {
        let sys =
            PedsSystem::mean_field(systems::logistic_1d(), 3, MapKind::StandardCommutative, 1.0)
                .unwrap();
        assert!(matches!(
            gerschgorin_bounds(&sys, &[1.0]),
            Err(Error::Unsupported(_))
        ));
    }

    use crate::target::TargetSystem;

    #[test]
    fn rootless_seed_dropped_with_a_note() {
        // f(x) = 1 + x^2 has no real root; Newton cannot converge.
        let sys = systems::polynomial_1d(&[1.0, 0.0, 1.0]);
        let found = find_fixed_points(&sys, &[vec![0.0], vec![3.0]]);
        assert!(found.roots.is_empty());
        assert_eq!(found.skipped.len(), 2);
        assert!(
            found.skipped[0].contains("no convergence") || found.skipped[0].contains("singular")
        );
    }

    #[test]
    fn trajectory_terminal_certified_as_fixed_point() {
        let sys = systems::logistic_1d();
        let rep = fixed_point_from_trajectory(&sys, &[1.0 + 1e-12]).unwrap();
        assert_eq!(rep.source, FixedPointSource::TrajectoryLimit);
        assert!(rep.residual <= FIXED_POINT_TOL);
        assert!(matches!(
            fixed_point_from_trajectory(&sys, &[0.7]),
            Err(Error::NotFixedPoint { .. })
        ));
    }

    #[test]
    fn gerschgorin_with_vanishing_slope() {
        // f(x) = -x^3 has f'(0) = 0: centers -(N-1) D_ii / N, radius from D.
        let n = 6;
        let mut d_vals = Vec::new();
        for k in 0..n {
            d_vals.push(0.4 + 0.3 * k as f64);
        }
        let d = DVector::from_vec(d_vals.clone());
        let sys = PedsSystem::builder(
            systems::polynomial_1d(&[0.0, 0.0, 0.0, -1.0]),
            Projector::uniform_mean_field(n).unwrap(),
        )
        .map(MapKind::StandardCommutative)
        .decays(vec![DecayFunction::gen_a(d).unwrap()])
        .build()
        .unwrap();
        let discs = gerschgorin_bounds(&sys, &[0.0]).unwrap();
        for (i, &(center, radius)) in discs.iter().enumerate() {
            let want = -(n as f64 - 1.0) * d_vals[i] / n as f64;
            assert!((center - want).abs() < 1e-12);
            assert!((radius - (n as f64 - 1.0) * d_vals[i] / n as f64).abs() < 1e-12);
        }
        let jac = {
            let mut m = sys.omega().matrix() * 0.0;
            m += sys.decays()[0].operator(sys.omega());
            m
        };
        for l in eigenvalues(&jac).unwrap() {
            let inside = discs
                .iter()
                .any(|&(c, r)| ((l.re - c).powi(2) + l.im.powi(2)).sqrt() <= r + 1e-9);
            assert!(inside);
        }
    }

    #[test]
    fn spectrum_prediction_shape() {
        let eigs = vec![Complex::new(-1.0, 0.0), Complex::new(2.0, 0.0)];
        let pred = mean_field_spectrum(&eigs, 0.5, 4, 1);
        assert_eq!(pred.len(), 8);
        assert_eq!(pred.iter().filter(|l| l.re == -0.5).count(), 6);
    }
}
