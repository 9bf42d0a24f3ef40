//! Executable property suite: each check measures a defect against its
//! pinned tolerance and reports machine-readable pass/fail lines.

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::analysis::{
    classify_equilibrium, eigenvalue_mismatch, eigenvalues, mean_field_spectrum,
    peds_jacobian_closed_form, peds_jacobian_fd, Classification,
};
use crate::embedding::{matrix_function_eval, DecayFunction, ExtendedState, MapKind, PedsSystem};
use crate::error::Result;
use crate::integrate::{
    complement_norms, fit_decay_rate, integrate, integrate_ode, integrate_target, FnRhs,
    IntegrationConfig, Method,
};
use crate::linalg;
use crate::projector::Projector;
use crate::systems;
use crate::target::Ordering;

#[derive(Debug, Clone, PartialEq)]
pub enum PropStatus {
    Pass,
    Fail,
    Skipped(String),
}

#[derive(Debug, Clone)]
pub struct PropResult {
    pub name: String,
    pub status: PropStatus,
    pub measured: f64,
    pub tol: f64,
}

impl PropResult {
    fn check(name: &str, measured: f64, tol: f64) -> Self {
        let status = if measured.is_finite() && measured <= tol {
            PropStatus::Pass
        } else {
            PropStatus::Fail
        };
        Self {
            name: name.into(),
            status,
            measured,
            tol,
        }
    }

    fn skip(name: &str, reason: &str) -> Self {
        Self {
            name: name.into(),
            status: PropStatus::Skipped(reason.into()),
            measured: f64::NAN,
            tol: f64::NAN,
        }
    }

    fn error(name: &str, err: &crate::error::Error) -> Self {
        Self {
            name: name.into(),
            status: PropStatus::Skipped(format!("error: {err}")),
            measured: f64::NAN,
            tol: f64::NAN,
        }
    }

    pub fn passed(&self) -> bool {
        !matches!(self.status, PropStatus::Fail)
    }

    /// Line-oriented report format consumed by scripts.
    pub fn line(&self) -> String {
        match &self.status {
            PropStatus::Pass => format!(
                "PROP {} PASS measured={:.3e} tol={:.1e}",
                self.name, self.measured, self.tol
            ),
            PropStatus::Fail => format!(
                "PROP {} FAIL measured={:.3e} tol={:.1e}",
                self.name, self.measured, self.tol
            ),
            PropStatus::Skipped(reason) => {
                format!(
                    "PROP {} SKIP reason={}",
                    self.name,
                    reason.replace(' ', "_")
                )
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub n: usize,
    pub alpha: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n: 20,
            alpha: 0.8,
        }
    }
}

pub fn rand_diag(rng: &mut StdRng, n: usize, lo: f64, hi: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| lo + (hi - lo) * rng.gen::<f64>())
}

/// Max |P^2 - P| over the given projectors.
pub fn measure_idempotence(projectors: &[Projector]) -> f64 {
    projectors
        .iter()
        .map(|p| linalg::max_abs_diff(&(p.matrix() * p.matrix()), p.matrix()))
        .fold(0.0, f64::max)
}

/// Max distance of any eigenvalue from {0, 1}.
pub fn measure_spectral_split(projectors: &[Projector]) -> f64 {
    let mut worst = 0.0_f64;
    for p in projectors {
        let eigs = match eigenvalues(p.matrix()) {
            Ok(e) => e,
            Err(_) => return f64::INFINITY,
        };
        for l in eigs {
            let d0 = (l - num_complex::Complex::new(0.0, 0.0)).norm();
            let d1 = (l - num_complex::Complex::new(1.0, 0.0)).norm();
            worst = worst.max(d0.min(d1));
        }
    }
    worst
}

/// Entrywise defect of `(P1 X)^k = <x>^{k-1} P1 X` for k = 1..=kmax.
pub fn measure_mean_field_collapse(rng: &mut StdRng, n: usize, samples: usize, kmax: u32) -> f64 {
    let omega = Projector::uniform_mean_field(n).unwrap();
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let x = rand_diag(rng, n, -1.0, 1.0);
        let mean = linalg::mean(&x);
        let mut base = omega.matrix().clone();
        for i in 0..n {
            for j in 0..n {
                base[(i, j)] *= x[j];
            }
        }
        let mut pow = base.clone();
        for k in 1..=kmax {
            if k > 1 {
                pow = &pow * &base;
            }
            let want = &base * mean.powi(k as i32 - 1);
            worst = worst.max(linalg::max_abs_diff(&pow, &want));
        }
    }
    worst
}

/// Entrywise defect of `P1 X P1 = <x> P1`.
pub fn measure_sandwich_identity(rng: &mut StdRng, n: usize, samples: usize) -> f64 {
    let omega = Projector::uniform_mean_field(n).unwrap();
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let x = rand_diag(rng, n, -1.0, 1.0);
        let mut xm = DMatrix::zeros(n, n);
        for i in 0..n {
            xm[(i, i)] = x[i];
        }
        let got = omega.matrix() * xm * omega.matrix();
        let want = omega.matrix() * linalg::mean(&x);
        worst = worst.max(linalg::max_abs_diff(&got, &want));
    }
    worst
}

/// Max-norm of P (I - P) v over random v.
pub fn measure_complement_closure(
    rng: &mut StdRng,
    projectors: &[Projector],
    samples: usize,
) -> f64 {
    let mut worst = 0.0_f64;
    for p in projectors {
        for _ in 0..samples {
            let v = rand_diag(rng, p.dim(), -2.0, 2.0);
            let c = p.complement_project(&v).unwrap();
            worst = worst.max(p.apply(&c).amax());
        }
    }
    worst
}

/// Sup gap between the projected trajectory from a uniform start and the
/// same-scheme target reference.
pub fn measure_containment(
    target: &crate::target::TargetSystem,
    x0: &[f64],
    n: usize,
    alpha: f64,
    map: MapKind,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    let sys = PedsSystem::mean_field(target.clone(), n, map, alpha)?;
    let traj = integrate(&sys, &ExtendedState::uniform(x0, n), cfg)?;
    let reference = integrate_target(target, x0, cfg)?;
    let mut worst = 0.0_f64;
    for (p, r) in traj.projected.iter().zip(reference.states.iter()) {
        for (a, b) in p.iter().zip(r.iter()) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// Measured exponential decay rate of ||(I - P1) X(t)||.
pub fn measure_decay_rate(
    rng: &mut StdRng,
    n: usize,
    alpha: f64,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    let sys = PedsSystem::mean_field(
        systems::logistic_1d(),
        n,
        MapKind::StandardNonCommutative(Ordering::Standard),
        alpha,
    )?;
    let x0 = ExtendedState::new(vec![rand_diag(rng, n, 0.3, 1.4)]).unwrap();
    let traj = integrate(&sys, &x0, cfg)?;
    let norms = complement_norms(&traj, sys.omega());
    let series: Vec<f64> = norms.iter().map(|row| row[0]).collect();
    fit_decay_rate(&traj.times, &series, 1e-13)
        .ok_or_else(|| crate::error::Error::Numeric("decay fit failed".into()))
}

/// Largest increase of the Lyapunov functional V = X_c . X_c between
/// consecutive recorded steps, for GenA or GenB decay.
pub fn measure_lyapunov_monotonicity(
    rng: &mut StdRng,
    n: usize,
    gen_b: bool,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    let d = rand_diag(rng, n, 0.2, 2.0);
    let decay = if gen_b {
        DecayFunction::gen_b(d)?
    } else {
        DecayFunction::gen_a(d)?
    };
    let sys = PedsSystem::builder(systems::logistic_1d(), Projector::uniform_mean_field(n)?)
        .map(MapKind::StandardNonCommutative(Ordering::Standard))
        .decays(vec![decay])
        .build()?;
    // Spread stays inside the logistic basin of attraction (x > 0).
    let x0 = ExtendedState::new(vec![rand_diag(rng, n, 0.2, 1.2)]).unwrap();
    let traj = integrate(&sys, &x0, cfg)?;
    let norms = complement_norms(&traj, sys.omega());
    let mut worst_increase = 0.0_f64;
    for w in norms.windows(2) {
        let v0 = w[0][0] * w[0][0];
        let v1 = w[1][0] * w[1][0];
        worst_increase = worst_increase.max(v1 - v0);
    }
    Ok(worst_increase)
}

/// Integrate dX_c/dt = -(I - P) D X_c from X_c(0) in Span(I - P) and report
/// the worst |(I - P) X_c - X_c| along the way.
pub fn measure_span_closure(
    rng: &mut StdRng,
    omega: &Projector,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    let n = omega.dim();
    let d = rand_diag(rng, n, 0.2, 2.0);
    let seed = rand_diag(rng, n, -1.0, 1.0);
    let x0 = omega.complement_apply(&seed);
    let rhs = FnRhs {
        dim: n,
        f: |y: &DVector<f64>| Ok(-omega.complement_apply(&d.component_mul(y))),
    };
    let raw = integrate_ode(&rhs, &x0, cfg)?;
    let mut worst = 0.0_f64;
    for state in &raw.states {
        let diff = omega.complement_apply(state) - state;
        worst = worst.max(diff.amax());
    }
    Ok(worst)
}

/// Commutative vs non-commutative rhs agreement at uniform (banality) states.
pub fn measure_scalar_map_equivalence(rng: &mut StdRng, n: usize, samples: usize) -> Result<f64> {
    let comm =
        PedsSystem::mean_field(systems::logistic_1d(), n, MapKind::StandardCommutative, 0.9)?;
    let nc = PedsSystem::mean_field(
        systems::logistic_1d(),
        n,
        MapKind::StandardNonCommutative(Ordering::Standard),
        0.9,
    )?;
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let x = rng.gen::<f64>() * 2.0 - 0.5;
        let state = ExtendedState::uniform(&[x], n);
        let a = comm.rhs(&state)?.to_flat();
        let b = nc.rhs(&state)?.to_flat();
        worst = worst.max(linalg::max_abs_diff_vec(&a, &b));
    }
    Ok(worst)
}

/// rhs gap between the standard and balanced orderings on random states.
pub fn measure_ordering_independence(rng: &mut StdRng, n: usize, samples: usize) -> Result<f64> {
    let std_sys = PedsSystem::mean_field(
        systems::exp_potential_2d(),
        n,
        MapKind::StandardNonCommutative(Ordering::Standard),
        0.4,
    )?;
    let bal_sys = PedsSystem::mean_field(
        systems::exp_potential_2d(),
        n,
        MapKind::StandardNonCommutative(Ordering::Balanced),
        0.4,
    )?;
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let state = ExtendedState::new(vec![
            rand_diag(rng, n, -1.0, 1.0),
            rand_diag(rng, n, -1.0, 1.0),
        ])
        .unwrap();
        let a = std_sys.rhs(&state)?.to_flat();
        let b = bal_sys.rhs(&state)?.to_flat();
        worst = worst.max(linalg::max_abs_diff_vec(&a, &b));
    }
    Ok(worst)
}

/// `exp(f(P1 X) + g(P1 Y)) 1 = exp(f(P1 X)) exp(g(P1 Y)) 1` for quadratic f, g.
pub fn measure_exp_factorization(rng: &mut StdRng, n: usize, samples: usize) -> f64 {
    let omega = Projector::uniform_mean_field(n).unwrap();
    let ones = linalg::ones(n);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let x = rand_diag(rng, n, -1.0, 1.0);
        let y = rand_diag(rng, n, -1.0, 1.0);
        let (c2, c1) = (0.5 * rng.gen::<f64>(), rng.gen::<f64>() - 0.5);
        let (d2, d1) = (0.5 * rng.gen::<f64>(), rng.gen::<f64>() - 0.5);
        let quad = |omega: &Projector, z: &DVector<f64>, a2: f64, a1: f64| {
            let mut base = omega.matrix().clone();
            for i in 0..n {
                for j in 0..n {
                    base[(i, j)] *= z[j];
                }
            }
            &base * &base * a2 + base * a1
        };
        let a = quad(&omega, &x, c2, c1);
        let b = quad(&omega, &y, d2, d1);
        let lhs = linalg::expm_vec(&(&a + &b), &ones);
        let rhs = linalg::expm_vec(&a, &linalg::expm_vec(&b, &ones));
        worst = worst.max(linalg::max_abs_diff_vec(&lhs, &rhs));
    }
    worst
}

/// Max |J_closed - J_fd| at the uniform equilibrium for one configuration.
pub fn measure_jacobian_consistency(
    target: &crate::target::TargetSystem,
    x_star: &[f64],
    n: usize,
    alpha: f64,
    map: MapKind,
    h: f64,
) -> Result<f64> {
    let sys = PedsSystem::mean_field(target.clone(), n, map, alpha)?;
    let rep = peds_jacobian_closed_form(&sys, x_star)?;
    let fd = peds_jacobian_fd(&sys, &ExtendedState::uniform(x_star, n), h)?;
    Ok(linalg::max_abs_diff(&rep.closed_form, &fd))
}

/// Worst multiset mismatch between the computed spectrum and
/// {target eigenvalues} + {-alpha} x m(N-1) over the given equilibria.
pub fn measure_spectrum_theorem(
    target: &crate::target::TargetSystem,
    equilibria: &[Vec<f64>],
    n: usize,
    alpha: f64,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for x_star in equilibria {
        let sys = PedsSystem::mean_field(
            target.clone(),
            n,
            MapKind::StandardNonCommutative(Ordering::Standard),
            alpha,
        )?;
        let rep = peds_jacobian_closed_form(&sys, x_star)?;
        let predicted = mean_field_spectrum(&rep.target_eigenvalues, alpha, n, 1);
        worst = worst.max(eigenvalue_mismatch(&rep.eigenvalues, &predicted));
    }
    Ok(worst)
}

/// Number of equilibria violating the stability-transfer table
/// (stable -> stable, unstable -> saddle, saddle -> saddle).
pub fn count_classification_transfer_violations(
    target: &crate::target::TargetSystem,
    equilibria: &[Vec<f64>],
    n: usize,
    alpha: f64,
) -> Result<usize> {
    let mut violations = 0;
    for x_star in equilibria {
        let sys = PedsSystem::mean_field(
            target.clone(),
            n,
            MapKind::StandardNonCommutative(Ordering::Standard),
            alpha,
        )?;
        let rep = peds_jacobian_closed_form(&sys, x_star)?;
        let target_class = classify_equilibrium(&rep.target_eigenvalues);
        let want = match target_class {
            Classification::Stable => Classification::Stable,
            Classification::Unstable | Classification::Saddle => Classification::Saddle,
            Classification::Marginal => Classification::Marginal,
        };
        if rep.classification != want {
            violations += 1;
        }
    }
    Ok(violations)
}

/// Commutator defect [J_drive, J_decay] for generalization-B decay.
pub fn measure_gen_b_commutation(rng: &mut StdRng, omega: &Projector, samples: usize) -> f64 {
    let n = omega.dim();
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let fp: f64 = 4.0 * rng.gen::<f64>() - 2.0;
        let d = rand_diag(rng, n, 0.2, 2.0);
        let j1 = omega.matrix() * fp;
        let j2 = DecayFunction::gen_b(d).unwrap().operator(omega);
        let comm = &j1 * &j2 - &j2 * &j1;
        worst = worst.max(linalg::max_abs(&comm));
    }
    worst
}

/// Similarity-transform evaluator against direct powers (square, cube).
pub fn measure_similarity_polynomial(
    rng: &mut StdRng,
    omega: &Projector,
    samples: usize,
) -> Result<f64> {
    let n = omega.dim();
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let x = rand_diag(rng, n, 0.1, 2.0);
        let mut base = omega.matrix().clone();
        for i in 0..n {
            for j in 0..n {
                base[(i, j)] *= x[j];
            }
        }
        let sq = matrix_function_eval(omega, &x, |z| Ok(z * z))?;
        worst = worst.max(linalg::max_abs_diff(&sq, &(&base * &base)));
        let cu = matrix_function_eval(omega, &x, |z| Ok(z * z * z))?;
        worst = worst.max(linalg::max_abs_diff(&cu, &(&base * &base * &base)));
    }
    Ok(worst)
}

/// Similarity-transform exp against a 30-term Taylor series.
pub fn measure_similarity_exp(rng: &mut StdRng, omega: &Projector, samples: usize) -> Result<f64> {
    let n = omega.dim();
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let x = rand_diag(rng, n, 0.1, 1.5);
        let mut base = omega.matrix().clone();
        for i in 0..n {
            for j in 0..n {
                base[(i, j)] *= x[j];
            }
        }
        let got = matrix_function_eval(omega, &x, |z| Ok(z.exp()))?;
        let mut want = DMatrix::identity(n, n);
        let mut pow = DMatrix::identity(n, n);
        for k in 1..=30 {
            pow = (&pow * &base) / k as f64;
            want += &pow;
        }
        worst = worst.max(linalg::max_abs_diff(&got, &want));
    }
    Ok(worst)
}

/// Largest imaginary part in the spectrum of sqrt(X) P sqrt(X) seen by the
/// general (non-symmetric) eigensolver.
pub fn measure_spectrum_reality(rng: &mut StdRng, omega: &Projector, samples: usize) -> f64 {
    let n = omega.dim();
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let x = rand_diag(rng, n, 0.05, 2.0);
        let sq = x.map(f64::sqrt);
        let mut core = omega.matrix().clone();
        for i in 0..n {
            for j in 0..n {
                core[(i, j)] *= sq[i] * sq[j];
            }
        }
        let eigs = match linalg::general_spectrum(&core) {
            Ok(e) => e,
            Err(_) => return f64::INFINITY,
        };
        for l in eigs {
            worst = worst.max(l.im.abs());
        }
    }
    worst
}

/// The full runtime suite behind `peds verify`.
pub fn run_verify(cfg: &VerifyConfig) -> Vec<PropResult> {
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut results = Vec::new();
    let n = cfg.n.max(2);

    let mut projectors = vec![
        Projector::uniform_mean_field(2).unwrap(),
        Projector::uniform_mean_field(10).unwrap(),
        Projector::uniform_mean_field(50).unwrap(),
    ];
    for _ in 0..5 {
        let k = 1 + rng.gen_range(0..n);
        let b = DMatrix::from_fn(k, n, |_, _| rng.gen::<f64>());
        if let Ok(p) = Projector::gram(&b) {
            projectors.push(p);
        }
    }
    results.push(PropResult::check(
        "projector_idempotence",
        measure_idempotence(&projectors),
        1e-10,
    ));
    results.push(PropResult::check(
        "projector_spectral_split",
        measure_spectral_split(&projectors),
        1e-8,
    ));
    results.push(PropResult::check(
        "mean_field_collapse",
        measure_mean_field_collapse(&mut rng, n, 20, 6),
        1e-12,
    ));
    results.push(PropResult::check(
        "sandwich_identity",
        measure_sandwich_identity(&mut rng, n, 20),
        1e-12,
    ));
    results.push(PropResult::check(
        "complement_closure",
        measure_complement_closure(&mut rng, &projectors, 5),
        1e-10,
    ));

    let alpha_ok = cfg.alpha > 0.0;
    let run_cfg = IntegrationConfig::new(0.01, 1000, Method::RungeKutta4).unwrap();
    if alpha_ok {
        let map = MapKind::StandardNonCommutative(Ordering::Standard);
        let mut worst = 0.0_f64;
        let mut failed = None;
        for (target, x0) in [
            (systems::linear_1d(-0.7), vec![1.2]),
            (systems::logistic_1d(), vec![0.2]),
            (systems::exp_potential_2d(), vec![0.3, 0.6]),
        ] {
            match measure_containment(&target, &x0, n, cfg.alpha, map.clone(), &run_cfg) {
                Ok(v) => worst = worst.max(v),
                Err(e) => failed = Some(e),
            }
        }
        results.push(match failed {
            Some(e) => PropResult::error("banality_containment", &e),
            None => PropResult::check("banality_containment", worst, 10.0 * run_cfg.dt),
        });

        let horizon = (5.0 / cfg.alpha / 0.01).ceil() as usize;
        let decay_cfg = IntegrationConfig::new(0.01, horizon.max(10), Method::RungeKutta4).unwrap();
        results.push(
            match measure_decay_rate(&mut rng, n, cfg.alpha, &decay_cfg) {
                Ok(rate) => {
                    let rel = (rate - cfg.alpha).abs() / cfg.alpha;
                    PropResult::check("convergence_to_mean", rel, 0.05)
                }
                Err(e) => PropResult::error("convergence_to_mean", &e),
            },
        );
    } else {
        results.push(PropResult::skip(
            "banality_containment",
            "decay disabled (alpha = 0)",
        ));
        results.push(PropResult::skip(
            "convergence_to_mean",
            "decay disabled (alpha = 0)",
        ));
    }

    let lyapunov_cfg = IntegrationConfig::new(0.01, 600, Method::RungeKutta4).unwrap();
    for (name, gen_b) in [("lyapunov_gen_a", false), ("lyapunov_gen_b", true)] {
        results.push(
            match measure_lyapunov_monotonicity(&mut rng, n, gen_b, &lyapunov_cfg) {
                Ok(v) => PropResult::check(name, v, 1e-10),
                Err(e) => PropResult::error(name, &e),
            },
        );
    }

    let span_omega = {
        let b = DMatrix::from_fn(n / 2 + 1, n, |_, _| rng.gen::<f64>());
        Projector::gram(&b).unwrap_or_else(|_| Projector::uniform_mean_field(n).unwrap())
    };
    results.push(
        match measure_span_closure(&mut rng, &span_omega, &lyapunov_cfg) {
            Ok(v) => PropResult::check("span_closure", v, 1e-8),
            Err(e) => PropResult::error("span_closure", &e),
        },
    );

    results.push(match measure_scalar_map_equivalence(&mut rng, n, 20) {
        Ok(v) => PropResult::check("scalar_map_equivalence_uniform", v, 1e-12),
        Err(e) => PropResult::error("scalar_map_equivalence_uniform", &e),
    });
    results.push(
        match measure_ordering_independence(&mut rng, n.min(12), 10) {
            Ok(v) => PropResult::check("ordering_independence_rhs", v, 1e-10),
            Err(e) => PropResult::error("ordering_independence_rhs", &e),
        },
    );
    results.push(PropResult::check(
        "exp_factorization",
        measure_exp_factorization(&mut rng, n.min(12), 20),
        1e-10,
    ));

    if alpha_ok {
        let quartic = systems::DOUBLE_WELL;
        let roots = quartic.critical_points().unwrap_or_default();
        let mut worst = 0.0_f64;
        let mut failed = None;
        for map in [
            MapKind::StandardCommutative,
            MapKind::MixedCommutative,
            MapKind::StandardNonCommutative(Ordering::Standard),
            MapKind::StandardNonCommutative(Ordering::Balanced),
        ] {
            let target = quartic.gradient_system();
            match measure_jacobian_consistency(
                &target,
                &[roots[0]],
                5,
                cfg.alpha,
                map.clone(),
                1e-5,
            ) {
                Ok(v) => worst = worst.max(v),
                Err(e) => failed = Some(e),
            }
            // The mixed map's fractional-power calculus needs x* != 0, and
            // every equilibrium of the 2D potential has x* = 0; the other
            // maps cover it.
            if matches!(map, MapKind::MixedCommutative) {
                continue;
            }
            match measure_jacobian_consistency(
                &systems::exp_potential_2d(),
                &[0.0, 1.0],
                5,
                cfg.alpha,
                map,
                1e-5,
            ) {
                Ok(v) => worst = worst.max(v),
                Err(e) => failed = Some(e),
            }
        }
        results.push(match failed {
            Some(e) => PropResult::error("jacobian_closed_vs_fd", &e),
            None => PropResult::check("jacobian_closed_vs_fd", worst, 1e-5),
        });

        let equilibria: Vec<Vec<f64>> = roots.iter().map(|&r| vec![r]).collect();
        let mut spectrum_worst = 0.0_f64;
        let mut spectrum_err = None;
        match measure_spectrum_theorem(&quartic.gradient_system(), &equilibria, n, cfg.alpha) {
            Ok(v) => spectrum_worst = spectrum_worst.max(v),
            Err(e) => spectrum_err = Some(e),
        }
        let eq2d = vec![vec![0.0, 1.0], vec![0.0, -1.0], vec![0.0, 0.0]];
        match measure_spectrum_theorem(&systems::exp_potential_2d(), &eq2d, n, cfg.alpha) {
            Ok(v) => spectrum_worst = spectrum_worst.max(v),
            Err(e) => spectrum_err = Some(e),
        }
        results.push(match spectrum_err {
            Some(e) => PropResult::error("spectrum_theorem", &e),
            None => PropResult::check("spectrum_theorem", spectrum_worst, 1e-8),
        });

        let mut violations = 0usize;
        let mut class_err = None;
        match count_classification_transfer_violations(
            &quartic.gradient_system(),
            &equilibria,
            n,
            cfg.alpha,
        ) {
            Ok(v) => violations += v,
            Err(e) => class_err = Some(e),
        }
        match count_classification_transfer_violations(
            &systems::exp_potential_2d(),
            &eq2d,
            n,
            cfg.alpha,
        ) {
            Ok(v) => violations += v,
            Err(e) => class_err = Some(e),
        }
        results.push(match class_err {
            Some(e) => PropResult::error("classification_transfer", &e),
            None => PropResult::check("classification_transfer", violations as f64, 0.5),
        });
    } else {
        results.push(PropResult::skip(
            "jacobian_closed_vs_fd",
            "decay disabled (alpha = 0)",
        ));
        results.push(PropResult::skip(
            "spectrum_theorem",
            "decay disabled (alpha = 0)",
        ));
        results.push(PropResult::skip(
            "classification_transfer",
            "decay disabled (alpha = 0)",
        ));
    }

    let gram = {
        let b = DMatrix::from_fn(3, 8, |_, _| rng.gen::<f64>());
        Projector::gram(&b).unwrap()
    };
    results.push(PropResult::check(
        "gen_b_commutation",
        measure_gen_b_commutation(&mut rng, &gram, 10),
        1e-10,
    ));
    results.push(match measure_similarity_polynomial(&mut rng, &gram, 10) {
        Ok(v) => PropResult::check("similarity_polynomial", v, 1e-10),
        Err(e) => PropResult::error("similarity_polynomial", &e),
    });
    results.push(match measure_similarity_exp(&mut rng, &gram, 10) {
        Ok(v) => PropResult::check("similarity_exp", v, 1e-9),
        Err(e) => PropResult::error("similarity_exp", &e),
    });
    results.push(PropResult::check(
        "spectrum_reality",
        measure_spectrum_reality(&mut rng, &gram, 10),
        1e-10,
    ));

    results
}

/// Decay-term helper exposed for mutation smoke tests: a logistic embedding
/// whose decay sign is flipped must fail the convergence-rate measurement.
pub fn measure_decay_rate_with_sign(
    rng: &mut StdRng,
    n: usize,
    alpha: f64,
    sign: f64,
    cfg: &IntegrationConfig,
) -> Result<f64> {
    let omega = Projector::uniform_mean_field(n)?;
    let x0 = rand_diag(rng, n, 0.3, 0.9);
    let rhs = FnRhs {
        dim: n,
        f: |y: &DVector<f64>| {
            let mean = linalg::mean(y);
            let drive = mean - mean * mean;
            let xc = omega.complement_apply(y);
            Ok(DVector::from_element(n, drive) + xc * (sign * alpha))
        },
    };
    let raw = integrate_ode(&rhs, &x0, cfg)?;
    let norms: Vec<f64> = raw
        .states
        .iter()
        .map(|s| omega.complement_apply(s).norm())
        .collect();
    fit_decay_rate(&raw.times, &norms, 1e-13)
        .ok_or_else(|| crate::error::Error::Numeric("decay fit failed".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_suite_passes() {
        let results = run_verify(&VerifyConfig {
            seed: 7,
            n: 10,
            alpha: 0.8,
        });
        for r in &results {
            assert!(r.passed(), "property failed: {}", r.line());
        }
        assert!(results.len() >= 15);
    }

    #[test]
    fn alpha_zero_skips_decay_properties() {
        let results = run_verify(&VerifyConfig {
            seed: 7,
            n: 6,
            alpha: 0.0,
        });
        let conv = results
            .iter()
            .find(|r| r.name == "convergence_to_mean")
            .unwrap();
        assert!(matches!(conv.status, PropStatus::Skipped(_)));
        assert!(conv.line().contains("SKIP"));
    }

    #[test]
    fn flipped_decay_sign_breaks_convergence() {
        let mut rng = StdRng::seed_from_u64(3);
        let cfg = IntegrationConfig::new(0.01, 400, Method::RungeKutta4).unwrap();
        let alpha = 0.8;
        let good = measure_decay_rate_with_sign(&mut rng, 8, alpha, -1.0, &cfg).unwrap();
        assert!((good - alpha).abs() / alpha < 0.05);
        let mut rng = StdRng::seed_from_u64(3);
        let bad = measure_decay_rate_with_sign(&mut rng, 8, alpha, 1.0, &cfg).unwrap();
        assert!(
            (bad - alpha).abs() / alpha > 0.05,
            "sign-flipped decay still looked convergent: {bad}"
        );
    }

    #[test]
    fn report_lines_are_machine_readable() {
        let r = PropResult::check("demo", 1e-13, 1e-10);
        assert_eq!(r.line(), "PROP demo PASS measured=1.000e-13 tol=1.0e-10");
        let f = PropResult::check("demo", 1.0, 1e-10);
        assert!(f.line().starts_with("PROP demo FAIL"));
    }
}
