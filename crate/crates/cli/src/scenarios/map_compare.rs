//! Side-by-side trajectories of the componentwise and ordered-product maps
//! for the 1D quartic; a qualitative artifact, asserted only to complete.

use anyhow::Result;

use peds_core::embedding::{ExtendedState, MapKind, PedsSystem};
use peds_core::integrate::{integrate, integrate_target, IntegrationConfig};
use peds_core::systems::QuarticPotential;
use peds_core::target::Ordering;

use super::{gaussian_column, member_rng, ScenarioOutcome};
use crate::config::ScenarioConfig;
use crate::output;

pub fn run(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let potential = QuarticPotential::new(cfg.a);
    let center = match &cfg.center {
        Some(c) => c[0],
        None => potential.maxima()?.first().copied().unwrap_or(0.0),
    };
    let target = potential.gradient_system();
    let mut rng = member_rng(cfg.seed, 0);
    let x0 = ExtendedState::new(vec![gaussian_column(&mut rng, cfg.n, center, cfg.sigma)])?;
    let run_cfg = IntegrationConfig::new(cfg.dt, cfg.steps, cfg.method)?
        .with_record_stride(cfg.record_stride);

    let mut outcome = ScenarioOutcome::default();
    let mut terminal_gap = 0.0_f64;
    let mut first_projected: Option<Vec<f64>> = None;
    for (label, map) in [
        ("commutative", MapKind::StandardCommutative),
        (
            "noncommutative",
            MapKind::StandardNonCommutative(Ordering::Standard),
        ),
    ] {
        let sys = PedsSystem::mean_field(target.clone(), cfg.n, map, cfg.alpha)?;
        let traj = integrate(&sys, &x0, &run_cfg)?;
        let path = output::stem_with_suffix(&cfg.output, &format!("_{label}.csv"));
        output::write_trajectory(&path, cfg, &traj, sys.omega(), cfg.full_state)?;
        outcome.outputs.push(path);
        let projected: Vec<f64> = traj.projected.iter().map(|p| p[0]).collect();
        match &first_projected {
            None => first_projected = Some(projected),
            Some(reference) => {
                terminal_gap = reference
                    .iter()
                    .zip(projected.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
            }
        }
    }

    let reference = integrate_target(&target, &[center], &run_cfg)?;
    let ref_path = output::stem_with_suffix(&cfg.output, "_target.csv");
    let xs: Vec<f64> = reference.states.iter().map(|s| s[0]).collect();
    output::write_columns(&ref_path, cfg, &reference.times, &["x_1".into()], &[xs])?;
    outcome.outputs.push(ref_path);

    outcome.notes.push(format!(
        "largest projected gap between the two maps: {terminal_gap:.6e} (qualitative comparison; no figure-level claim)"
    ));
    let summary_path = output::stem_with_suffix(&cfg.output, "_summary.txt");
    output::write_text(
        &summary_path,
        &outcome.summary_text(&output::provenance_line(cfg)),
    )?;
    outcome.outputs.push(summary_path);
    Ok(outcome)
}
