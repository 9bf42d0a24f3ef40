//! Resistive-memory network dynamics
//! dx/dt = P (beta^{-1} (I - chi P X)^{-1} P S - alpha x) - alpha (I - P) x,
//! which is the standard embedding of the single-cell equation. For the
//! mean-field projector the terminal mean sits at the stationary point of
//! the effective potential x^2/2 + (s/chi) ln(1 - chi x).

use anyhow::{bail, Result};
use nalgebra::{DMatrix, DVector};

use peds_core::embedding::ExtendedState;
use peds_core::error::Error as CoreError;
use peds_core::integrate::{integrate_ode, FnRhs, IntegrationConfig, Trajectory};
use peds_core::linalg;
use peds_core::projector::Projector;
use peds_core::systems;

use super::{gaussian_column, member_rng, Assertion, ScenarioOutcome};
use crate::config::ScenarioConfig;
use crate::output;

const TERMINAL_TOL: f64 = 1e-4;

/// One evaluation of the network right-hand side.
pub fn network_rhs(
    omega: &Projector,
    chi: f64,
    beta: f64,
    alpha: f64,
    s_applied: &DVector<f64>,
    x: &DVector<f64>,
) -> peds_core::error::Result<DVector<f64>> {
    let n = omega.dim();
    // A = I - chi P X (column scaling of P by x).
    let mut a = DMatrix::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] -= chi * omega.matrix()[(i, j)] * x[j];
        }
    }
    let omega_s = omega.apply(s_applied);
    let u = a.lu().solve(&omega_s).ok_or_else(|| {
        CoreError::Numeric("(I - chi P X) is singular; memory window collapsed".into())
    })?;
    let drive = omega.apply(&(u / beta - x * alpha));
    Ok(drive - omega.complement_apply(x) * alpha)
}

pub fn run(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let mut outcome = ScenarioOutcome::default();
    let omega = super::load_projector_or(cfg, || Ok(Projector::uniform_mean_field(cfg.n)?))?;
    // Uniform applied drive with normalized level s = <S> / (alpha beta).
    let s_applied = DVector::from_element(cfg.n, cfg.s * cfg.alpha * cfg.beta);

    let center = match &cfg.center {
        Some(c) => c[0],
        None => 0.15,
    };
    let mut rng = member_rng(cfg.seed, 0);
    let mut x0 = gaussian_column(&mut rng, cfg.n, center, cfg.sigma);
    // Memory states live in [0, 1).
    for v in x0.iter_mut() {
        *v = v.clamp(0.0, 0.99);
    }
    let run_cfg = IntegrationConfig::new(cfg.dt, cfg.steps, cfg.method)?
        .with_record_stride(cfg.record_stride);
    let (chi, beta, alpha) = (cfg.chi, cfg.beta, cfg.alpha);
    let rhs = FnRhs {
        dim: cfg.n,
        f: |x: &DVector<f64>| network_rhs(&omega, chi, beta, alpha, &s_applied, x),
    };
    let raw = integrate_ode(&rhs, &x0, &run_cfg)?;

    // Wrap as an m = 1 trajectory for the contract CSV.
    let mut states = Vec::with_capacity(raw.states.len());
    let mut projected = Vec::with_capacity(raw.states.len());
    let mut domain_exits = 0usize;
    for s in &raw.states {
        if s.iter().any(|&v| !(0.0..1.0).contains(&v)) {
            domain_exits += 1;
        }
        projected.push(vec![linalg::mean(&omega.apply(s))]);
        states.push(ExtendedState::new(vec![s.clone()]).expect("non-empty"));
    }
    let traj = Trajectory {
        times: raw.times,
        states,
        projected,
    };
    if domain_exits > 0 {
        outcome.notes.push(format!(
            "state left [0, 1) on {domain_exits} recorded steps (logged, not fatal)"
        ));
    }

    let terminal_mean = linalg::mean(raw.states.last().expect("non-empty trajectory"));
    if omega.is_mean_field() {
        if cfg.chi == 0.0 {
            // Decoupled linear relaxation: x* = <S> / (alpha beta) = s.
            outcome.assertions.push(Assertion::le(
                "terminal_mean_at_linear_fixed_point",
                (terminal_mean - cfg.s).abs(),
                TERMINAL_TOL,
            ));
        } else {
            let stationary = systems::memristor_stationary_points(cfg.chi, cfg.s)?;
            if stationary.is_empty() {
                bail!(
                    "no stationary point of the effective potential in [0, 1) for chi={} s={}",
                    cfg.chi,
                    cfg.s
                );
            }
            let minimum = stationary[0];
            outcome.notes.push(format!(
                "effective-potential stationary points {stationary:?}; tracking the minimum {minimum:.8}"
            ));
            outcome.assertions.push(Assertion::le(
                "terminal_mean_at_potential_minimum",
                (terminal_mean - minimum).abs(),
                TERMINAL_TOL,
            ));
        }
    } else {
        outcome.notes.push(format!(
            "general projector (rank {}): stationary-point assertion applies to the mean-field kind only; terminal mean {terminal_mean:.8}",
            omega.rank()
        ));
    }

    let traj_path = output::stem_with_suffix(&cfg.output, ".csv");
    output::write_trajectory(&traj_path, cfg, &traj, &omega, cfg.full_state)?;
    outcome.outputs.push(traj_path);
    let summary_path = output::stem_with_suffix(&cfg.output, "_summary.txt");
    output::write_text(
        &summary_path,
        &outcome.summary_text(&output::provenance_line(cfg)),
    )?;
    outcome.outputs.push(summary_path);
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use peds_core::embedding::{MapKind, PedsSystem};
    use peds_core::integrate::{integrate, integrate_target, Method};
    use peds_core::target::Ordering;

    #[test]
    fn zero_chi_relaxes_linearly_to_the_drive_level() {
        // chi = 0 decouples the network into dx/dt = <S>/beta - alpha x.
        let n = 4;
        let omega = Projector::uniform_mean_field(n).unwrap();
        let (alpha, beta, s) = (1.0, 2.0, 0.3);
        let s_applied = DVector::from_element(n, s * alpha * beta);
        let x0 = DVector::from_vec(vec![0.1, 0.2, 0.05, 0.15]);
        let rhs = FnRhs {
            dim: n,
            f: |x: &DVector<f64>| network_rhs(&omega, 0.0, beta, alpha, &s_applied, x),
        };
        let cfg = IntegrationConfig::new(0.01, 2000, Method::RungeKutta4).unwrap();
        let raw = integrate_ode(&rhs, &x0, &cfg).unwrap();
        let terminal = linalg::mean(raw.states.last().unwrap());
        assert!((terminal - s).abs() < 1e-8);
    }

    #[test]
    fn trivial_projector_decouples_into_single_cells() {
        // Omega = I: each component follows the scalar cell equation.
        let n = 3;
        let omega = Projector::trivial(n).unwrap();
        let (chi, alpha, beta, s) = (0.9, 1.0, 1.0, 0.15);
        let s_applied = DVector::from_element(n, s * alpha * beta);
        let x0 = vec![0.05, 0.2, 0.4];
        let rhs = FnRhs {
            dim: n,
            f: |x: &DVector<f64>| network_rhs(&omega, chi, beta, alpha, &s_applied, x),
        };
        let cfg = IntegrationConfig::new(0.01, 500, Method::RungeKutta4).unwrap();
        let raw = integrate_ode(&rhs, &DVector::from_vec(x0.clone()), &cfg).unwrap();
        let cell = systems::memristor_scalar(chi, s, alpha).unwrap();
        for (k, &start) in x0.iter().enumerate() {
            let reference = integrate_target(&cell, &[start], &cfg).unwrap();
            let got = raw.states.last().unwrap()[k];
            assert!(
                (got - reference.terminal()[0]).abs() < 1e-10,
                "component {k} diverged from the scalar cell"
            );
        }
    }

    #[test]
    fn mean_field_network_matches_the_scalar_cell_embedding() {
        // For the mean-field projector the network equation coincides with
        // the standard embedding of the single cell with b = 1.
        let n = 6;
        let omega = Projector::uniform_mean_field(n).unwrap();
        let (chi, alpha, beta, s) = (0.7, 1.0, 1.0, 0.12);
        let s_applied = DVector::from_element(n, s * alpha * beta);
        let cell = systems::memristor_scalar(chi, s, alpha).unwrap();
        let peds = PedsSystem::mean_field(
            cell,
            n,
            MapKind::StandardNonCommutative(Ordering::Standard),
            alpha,
        )
        .unwrap();
        let x0 = DVector::from_vec(vec![0.05, 0.1, 0.2, 0.3, 0.15, 0.25]);
        let a = network_rhs(&omega, chi, beta, alpha, &s_applied, &x0).unwrap();
        let b = peds
            .rhs(&ExtendedState::new(vec![x0.clone()]).unwrap())
            .unwrap()
            .to_flat();
        assert!(linalg::max_abs_diff_vec(&a, &b) <= 1e-12);
        // And the evolved mean lands on the scalar cell trajectory.
        let rhs = FnRhs {
            dim: n,
            f: |x: &DVector<f64>| network_rhs(&omega, chi, beta, alpha, &s_applied, x),
        };
        let cfg = IntegrationConfig::new(0.01, 800, Method::RungeKutta4).unwrap();
        let raw = integrate_ode(&rhs, &x0, &cfg).unwrap();
        let mean0 = linalg::mean(&x0);
        let reference = integrate_target(
            &systems::memristor_scalar(chi, s, alpha).unwrap(),
            &[mean0],
            &cfg,
        )
        .unwrap();
        let traj = integrate(&peds, &ExtendedState::new(vec![x0]).unwrap(), &cfg).unwrap();
        let net_mean = linalg::mean(raw.states.last().unwrap());
        assert!((net_mean - reference.terminal()[0]).abs() < 1e-9);
        assert!((traj.terminal_projected()[0] - net_mean).abs() < 1e-12);
    }
}
