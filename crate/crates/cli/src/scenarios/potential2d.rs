//! Gradient flow of exp(x^2/2 - y^2/2 + y^4/4) under the two exponential
//! factorizations of the drive: one joint exponential against the product of
//! per-variable exponentials. The mean-field algebra makes the two dynamics
//! identical; the scenario asserts it on the full trajectories.

use anyhow::{bail, Result};
use nalgebra::DVector;

use peds_core::embedding::{apply_decay, DecayFunction, ExtendedState};
use peds_core::integrate::{integrate_ode, FnRhs, IntegrationConfig, RawTrajectory, Trajectory};
use peds_core::linalg;
use peds_core::projector::Projector;

use super::{gaussian_column, member_rng, Assertion, ScenarioOutcome};
use crate::config::ScenarioConfig;
use crate::output;

const TRAJECTORY_GAP_TOL: f64 = 1e-8;
const TERMINAL_TOL: f64 = 1e-3;

#[derive(Clone, Copy, PartialEq)]
pub enum ExpVariant {
    /// One exponential of the combined quadratic-quartic exponent.
    Combined,
    /// Product of the per-variable exponentials.
    Factored,
}

/// `exp(P1 Z) v = v + (e^m - 1)/m P1 (z . v)` with m the mean of z.
fn exp_apply(omega: &Projector, z: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let mean = linalg::mean(z);
    let phi = if mean.abs() < 1e-8 {
        1.0 + mean / 2.0
    } else {
        mean.exp_m1() / mean
    };
    v + omega.apply(&z.component_mul(v)) * phi
}

/// The extended gradient flow for one factorization variant.
pub fn variant_rhs(
    omega: &Projector,
    alpha: f64,
    variant: ExpVariant,
    state: &ExtendedState,
) -> peds_core::error::Result<ExtendedState> {
    let x = state.column(0);
    let y = state.column(1);
    let mx = linalg::mean(x);
    let my = linalg::mean(y);
    // Exponents of exp(x^2/2 - y^2/2 + y^4/4) as P1 Z, using the collapse
    // identities: (P1 X)^2 / 2 -> (mx/2) x and
    // -(P1 Y)^2/2 + (P1 Y)^4/4 -> (-my/2 + my^3/4) y.
    let zx = x * (0.5 * mx);
    let zy = y * (-0.5 * my + 0.25 * my * my * my);
    let ones = linalg::ones(omega.dim());
    let v = match variant {
        ExpVariant::Combined => exp_apply(omega, &(&zx + &zy), &ones),
        ExpVariant::Factored => exp_apply(omega, &zx, &exp_apply(omega, &zy, &ones)),
    };
    // F_x 1 = -(P1 X) V 1
    let drive_x = -omega.apply(&x.component_mul(&v));
    // F_y 1 = (P1 Y)(I - (P1 Y)^2) V 1
    let y2v = {
        let once = omega.apply(&y.component_mul(&v));
        omega.apply(&y.component_mul(&once))
    };
    let inner = &v - &y2v;
    let drive_y = omega.apply(&y.component_mul(&inner));
    let decay = DecayFunction::standard(alpha)?;
    let out_x = drive_x + apply_decay(&decay, omega, x)?;
    let out_y = drive_y + apply_decay(&decay, omega, y)?;
    ExtendedState::new(vec![out_x, out_y])
}

fn run_variant(
    omega: &Projector,
    alpha: f64,
    variant: ExpVariant,
    x0: &ExtendedState,
    cfg: &IntegrationConfig,
) -> peds_core::error::Result<(RawTrajectory, Trajectory)> {
    let n = omega.dim();
    let rhs = FnRhs {
        dim: 2 * n,
        f: move |y: &DVector<f64>| {
            let state = ExtendedState::from_flat(y, 2, n)?;
            Ok(variant_rhs(omega, alpha, variant, &state)?.to_flat())
        },
    };
    let raw = integrate_ode(&rhs, &x0.to_flat(), cfg)?;
    let mut states = Vec::with_capacity(raw.states.len());
    let mut projected = Vec::with_capacity(raw.states.len());
    for flat in &raw.states {
        let st = ExtendedState::from_flat(flat, 2, n)?;
        projected.push(vec![
            linalg::mean(&omega.apply(st.column(0))),
            linalg::mean(&omega.apply(st.column(1))),
        ]);
        states.push(st);
    }
    let times = raw.times.clone();
    Ok((
        raw,
        Trajectory {
            times,
            states,
            projected,
        },
    ))
}

pub fn run(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let omega = Projector::uniform_mean_field(cfg.n)?;
    let center = match &cfg.center {
        Some(c) if c.len() == 2 => (c[0], c[1]),
        Some(c) => bail!("potential2d center needs two values, got {c:?}"),
        None => (0.1, 0.2),
    };
    let mut rng = member_rng(cfg.seed, 0);
    let x0 = ExtendedState::new(vec![
        gaussian_column(&mut rng, cfg.n, center.0, cfg.sigma),
        gaussian_column(&mut rng, cfg.n, center.1, cfg.sigma),
    ])?;
    let run_cfg = IntegrationConfig::new(cfg.dt, cfg.steps, cfg.method)?
        .with_record_stride(cfg.record_stride);

    let (raw1, traj1) = run_variant(&omega, cfg.alpha, ExpVariant::Combined, &x0, &run_cfg)?;
    let (raw2, traj2) = run_variant(&omega, cfg.alpha, ExpVariant::Factored, &x0, &run_cfg)?;

    let mut gap = 0.0_f64;
    for (a, b) in raw1.states.iter().zip(raw2.states.iter()) {
        gap = gap.max(linalg::max_abs_diff_vec(a, b));
    }
    let terminal = traj1.terminal_projected();
    let x_err = terminal[0].abs();
    let y_err = (terminal[1].abs() - 1.0).abs();

    let mut outcome = ScenarioOutcome::default();
    outcome.notes.push(format!(
        "terminal projection ({:.6e}, {:.6e})",
        terminal[0], terminal[1]
    ));
    outcome.assertions.push(Assertion::le(
        "factorization_variants_identical",
        gap,
        TRAJECTORY_GAP_TOL,
    ));
    outcome
        .assertions
        .push(Assertion::le("terminal_x_at_zero", x_err, TERMINAL_TOL));
    outcome.assertions.push(Assertion::le(
        "terminal_y_at_unit_well",
        y_err,
        TERMINAL_TOL,
    ));

    for (label, traj) in [("s1", &traj1), ("s2", &traj2)] {
        let path = output::stem_with_suffix(&cfg.output, &format!("_{label}.csv"));
        output::write_trajectory(&path, cfg, traj, &omega, cfg.full_state)?;
        outcome.outputs.push(path);
    }
    let summary_path = output::stem_with_suffix(&cfg.output, "_summary.txt");
    output::write_text(
        &summary_path,
        &outcome.summary_text(&output::provenance_line(cfg)),
    )?;
    outcome.outputs.push(summary_path);
    Ok(outcome)
}
