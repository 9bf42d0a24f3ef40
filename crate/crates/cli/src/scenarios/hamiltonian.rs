//! Damped particle in the double-well quartic, embedded over (x, p) with
//! separate decay constants; the momentum projection must settle at zero.

use anyhow::{bail, Result};

use peds_core::embedding::{DecayFunction, ExtendedState, PedsSystem};
use peds_core::integrate::{integrate, IntegrationConfig};
use peds_core::projector::Projector;
use peds_core::systems::{self, QuarticPotential};

use super::{gaussian_column, map_kind, member_rng, Assertion, ScenarioOutcome};
use crate::config::ScenarioConfig;
use crate::output;

const TERMINAL_TOL: f64 = 1e-3;

pub fn run(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let potential = QuarticPotential::new(cfg.a);
    let critical = potential.critical_points()?;
    if critical.is_empty() {
        bail!("potential {:?} has no critical points", cfg.a);
    }
    let center = match &cfg.center {
        Some(c) if c.len() == 2 => (c[0], c[1]),
        Some(c) => bail!("hamiltonian center needs two values (x, p), got {c:?}"),
        None => (
            potential.maxima()?.first().copied().unwrap_or(critical[0]),
            0.0,
        ),
    };
    let target = systems::dissipative_particle(cfg.mass, cfg.chi, &potential);
    let sys = PedsSystem::builder(target, Projector::uniform_mean_field(cfg.n)?)
        .map(map_kind(cfg))
        .decays(vec![
            DecayFunction::standard(cfg.alpha)?,
            DecayFunction::standard(cfg.alpha_p)?,
        ])
        .build()?;
    let mut rng = member_rng(cfg.seed, 0);
    let x0 = ExtendedState::new(vec![
        gaussian_column(&mut rng, cfg.n, center.0, cfg.sigma),
        gaussian_column(&mut rng, cfg.n, center.1, cfg.sigma),
    ])?;
    let run_cfg = IntegrationConfig::new(cfg.dt, cfg.steps, cfg.method)?
        .with_record_stride(cfg.record_stride);
    let traj = integrate(&sys, &x0, &run_cfg)?;

    let terminal = traj.terminal_projected();
    let p_err = terminal[1].abs();
    let x_err = critical
        .iter()
        .map(|r| (terminal[0] - r).abs())
        .fold(f64::INFINITY, f64::min);

    let mut outcome = ScenarioOutcome::default();
    outcome.notes.push(format!(
        "terminal (x~, p~) = ({:.6e}, {:.6e}); potential roots {critical:?}",
        terminal[0], terminal[1]
    ));
    outcome.assertions.push(Assertion::le(
        "terminal_momentum_at_rest",
        p_err,
        TERMINAL_TOL,
    ));
    outcome.assertions.push(Assertion::le(
        "terminal_position_at_potential_root",
        x_err,
        TERMINAL_TOL,
    ));

    let traj_path = output::stem_with_suffix(&cfg.output, ".csv");
    output::write_trajectory(&traj_path, cfg, &traj, sys.omega(), cfg.full_state)?;
    outcome.outputs.push(traj_path);
    let summary_path = output::stem_with_suffix(&cfg.output, "_summary.txt");
    output::write_text(
        &summary_path,
        &outcome.summary_text(&output::provenance_line(cfg)),
    )?;
    outcome.outputs.push(summary_path);
    Ok(outcome)
}
