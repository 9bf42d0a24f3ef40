//! Embedding through a random Gram projector with b = P 1: the projected
//! observable still finds the single potential minimum (an empirical
//! extension beyond the mean-field theorems, hence the looser tolerance).

use anyhow::{bail, Result};
use nalgebra::DMatrix;
use rand::Rng;

use peds_core::embedding::{ExtendedState, PedsSystem};
use peds_core::error::Error as CoreError;
use peds_core::integrate::{integrate, IntegrationConfig};
use peds_core::linalg;
use peds_core::projector::Projector;
use peds_core::systems::QuarticPotential;

use super::{gaussian_column, map_kind, member_rng, Assertion, ScenarioOutcome};
use crate::config::ScenarioConfig;
use crate::output;

const TERMINAL_TOL: f64 = 1e-2;
const MAX_GRAM_ATTEMPTS: usize = 5;

fn seeded_gram(cfg: &ScenarioConfig, notes: &mut Vec<String>) -> Result<Projector> {
    let mut attempt = 0;
    loop {
        let mut rng = member_rng(cfg.seed.wrapping_add(1_000 * attempt as u64), 7);
        let b = DMatrix::from_fn(cfg.k_rank, cfg.n, |_, _| rng.gen::<f64>());
        match Projector::gram(&b) {
            Ok(p) => return Ok(p),
            Err(CoreError::SingularGram { cond, .. }) => {
                notes.push(format!(
                    "gram attempt {attempt} rejected (cond ~ {cond:.3e}); retrying with a fresh seed"
                ));
                attempt += 1;
                if attempt >= MAX_GRAM_ATTEMPTS {
                    bail!("no well-conditioned Gram factor in {MAX_GRAM_ATTEMPTS} attempts");
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
}

pub fn run(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    if cfg.k_rank == 0 || cfg.k_rank > cfg.n {
        bail!(
            "k must satisfy 1 <= k <= n, got {} with n = {}",
            cfg.k_rank,
            cfg.n
        );
    }
    let potential = QuarticPotential::new(cfg.a);
    let minima = potential.minima()?;
    if minima.len() != 1 {
        bail!(
            "random_projector expects a single-minimum potential; {:?} gives {minima:?}",
            cfg.a
        );
    }
    let x_min = minima[0];
    let mut outcome = ScenarioOutcome::default();
    let omega = super::load_projector_or(cfg, || seeded_gram(cfg, &mut outcome.notes))?;
    let b_vec = omega.apply(&linalg::ones(cfg.n));
    let sys = PedsSystem::builder(potential.gradient_system(), omega)
        .map(map_kind(cfg))
        .uniform_standard_decay(cfg.alpha)
        .b_vectors(vec![b_vec])
        .build()?;

    // Default start: midway between barrier and minimum, so every replica
    // sits inside the attracting basin even when the projector is close to
    // trivial (the region beyond the barrier runs away under this cubic).
    let center = match &cfg.center {
        Some(c) => c[0],
        None => match potential.maxima()?.first() {
            Some(&barrier) => 0.5 * (barrier + x_min),
            None => x_min,
        },
    };
    let mut rng = member_rng(cfg.seed, 0);
    let x0 = ExtendedState::new(vec![gaussian_column(&mut rng, cfg.n, center, cfg.sigma)])?;
    let run_cfg = IntegrationConfig::new(cfg.dt, cfg.steps, cfg.method)?
        .with_record_stride(cfg.record_stride);
    let traj = integrate(&sys, &x0, &run_cfg)?;
    let terminal = traj.terminal_projected()[0];

    // The fixed-point condition P f(P X*) P1 = 0 parks an eigenvalue of
    // P X* on the root of f; the plain mean readout only approaches it as
    // the rank grows.
    let term_state = traj.states.last().expect("trajectory").column(0);
    let mut scaled = sys.omega().matrix().clone();
    for i in 0..cfg.n {
        for j in 0..cfg.n {
            scaled[(i, j)] *= term_state[j];
        }
    }
    let spectral_gap = peds_core::linalg::spectrum(&scaled)
        .map(|eigs| {
            eigs.iter()
                .map(|l| ((l.re - x_min).powi(2) + l.im.powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .unwrap_or(f64::INFINITY);

    outcome.notes.push(format!(
        "projector rank {} of {}; potential minimum {x_min:.6}; terminal projection {terminal:.6} (readout bias {:.3e})",
        sys.omega().rank(),
        cfg.n,
        (terminal - x_min).abs(),
    ));
    outcome.assertions.push(Assertion::le(
        "projected_observable_at_single_minimum",
        (terminal - x_min).abs(),
        TERMINAL_TOL,
    ));
    outcome.assertions.push(Assertion::le(
        "spectrum_of_projected_state_pins_minimum",
        spectral_gap,
        1e-6,
    ));

    let traj_path = output::stem_with_suffix(&cfg.output, ".csv");
    output::write_trajectory(&traj_path, cfg, &traj, sys.omega(), cfg.full_state)?;
    outcome.outputs.push(traj_path);
    let proj_path = output::stem_with_suffix(&cfg.output, "_projector.txt");
    output::write_text(&proj_path, &sys.omega().to_text())?;
    outcome.outputs.push(proj_path);
    let summary_path = output::stem_with_suffix(&cfg.output, "_summary.txt");
    output::write_text(
        &summary_path,
        &outcome.summary_text(&output::provenance_line(cfg)),
    )?;
    outcome.outputs.push(summary_path);
    Ok(outcome)
}
