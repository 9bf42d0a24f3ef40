//! Barrier escape in a double-well quartic. One seeded run couples N
//! replicas through the mean-field projector; its members coalesce onto a
//! single root of V', and the ensemble-averaged gradient of the
//! componentwise map tips the wide replica cloud into the dominant basin,
//! so that root is the global minimum. The same initial conditions under
//! the trivial projector decouple into N independent copies that split
//! across both minima. `ensemble_size` repeats the experiment with fresh
//! draws.

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;

use peds_core::embedding::{ExtendedState, MapKind, PedsSystem};
use peds_core::integrate::{integrate, IntegrationConfig, Trajectory};
use peds_core::projector::Projector;
use peds_core::systems::QuarticPotential;

use super::{gaussian_column, map_kind, member_rng, Assertion, ScenarioOutcome};
use crate::config::ScenarioConfig;
use crate::output;

const TERMINAL_TOL: f64 = 1e-3;

struct Repetition {
    projected: Vec<f64>,
    replica_terminals: Vec<f64>,
    uncoupled_terminals: Vec<f64>,
    coupled: Trajectory,
    uncoupled: Trajectory,
}

pub fn run(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let potential = QuarticPotential::new(cfg.a);
    let minima = potential.minima()?;
    let maxima = potential.maxima()?;
    if minima.len() < 2 || maxima.is_empty() {
        bail!(
            "quartic1d needs a double well; coefficients {:?} give minima {minima:?}",
            cfg.a
        );
    }
    let barrier = maxima[0];
    let global = potential
        .global_minimum()?
        .ok_or_else(|| anyhow!("no global minimum"))?;
    let center = match &cfg.center {
        Some(c) if c.len() == 1 => c[0],
        Some(c) => bail!("quartic1d center needs exactly one value, got {c:?}"),
        None => barrier,
    };

    let target = potential.gradient_system();
    let coupled_sys = PedsSystem::mean_field(target.clone(), cfg.n, map_kind(cfg), cfg.alpha)?;
    let uncoupled_sys = PedsSystem::builder(target, Projector::trivial(cfg.n)?)
        .map(MapKind::StandardCommutative)
        .uniform_standard_decay(cfg.alpha)
        .build()?;
    let run_cfg = IntegrationConfig::new(cfg.dt, cfg.steps, cfg.method)?
        .with_record_stride(cfg.record_stride);

    let reps: Vec<Result<Repetition, peds_core::error::Error>> = (0..cfg.ensemble_size)
        .into_par_iter()
        .map(|rep| {
            let mut rng = member_rng(cfg.seed, rep);
            let x0 = ExtendedState::new(vec![gaussian_column(&mut rng, cfg.n, center, cfg.sigma)])
                .expect("non-empty state");
            let coupled = integrate(&coupled_sys, &x0, &run_cfg)?;
            let uncoupled = integrate(&uncoupled_sys, &x0, &run_cfg)?;
            let terminal_state = coupled.states.last().expect("trajectory");
            Ok(Repetition {
                projected: coupled.projected.iter().map(|p| p[0]).collect(),
                replica_terminals: terminal_state.column(0).iter().copied().collect(),
                uncoupled_terminals: uncoupled
                    .states
                    .last()
                    .expect("trajectory")
                    .column(0)
                    .iter()
                    .copied()
                    .collect(),
                coupled,
                uncoupled,
            })
        })
        .collect();
    let reps: Vec<Repetition> = reps
        .into_iter()
        .collect::<Result<_, peds_core::error::Error>>()?;

    let nearest_minimum = |x: f64| -> Option<usize> {
        minima
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - x).abs().partial_cmp(&(b.1 - x).abs()).unwrap())
            .filter(|(_, &m)| (m - x).abs() <= TERMINAL_TOL)
            .map(|(i, _)| i)
    };

    // Every replica of every repetition must sit on one common root; the
    // seeded default must make that root the global minimum.
    let mut coalescence_spread = 0.0_f64;
    let mut global_gap = 0.0_f64;
    for rep in &reps {
        let mean: f64 = rep.replica_terminals.iter().sum::<f64>() / cfg.n as f64;
        for &x in &rep.replica_terminals {
            coalescence_spread = coalescence_spread.max((x - mean).abs());
            global_gap = global_gap.max((x - global).abs());
        }
    }
    let mut basin_counts = vec![0usize; minima.len()];
    let mut unresolved = 0usize;
    for &x in &reps[0].uncoupled_terminals {
        match nearest_minimum(x) {
            Some(i) => basin_counts[i] += 1,
            None => unresolved += 1,
        }
    }
    let least_populated = basin_counts.iter().copied().min().unwrap_or(0);

    let mut outcome = ScenarioOutcome::default();
    outcome.notes.push(format!(
        "potential: minima {minima:?} maximum {barrier:.6} global {global:.6}"
    ));
    outcome.notes.push(format!(
        "ensemble members are the N = {} coupled replicas; {} seeded repetition(s)",
        cfg.n, cfg.ensemble_size
    ));
    let rep_outcomes: Vec<String> = reps
        .iter()
        .map(|r| {
            let mean: f64 = r.replica_terminals.iter().sum::<f64>() / cfg.n as f64;
            format!("{mean:.6}")
        })
        .collect();
    outcome.notes.push(format!(
        "per-repetition terminal projection: [{}]",
        rep_outcomes.join(", ")
    ));
    outcome.notes.push(format!(
        "uncoupled copy basin counts {basin_counts:?} unresolved {unresolved}"
    ));
    outcome.assertions.push(Assertion::le(
        "replicas_coalesce_to_one_root",
        coalescence_spread,
        TERMINAL_TOL,
    ));
    outcome.assertions.push(Assertion::le(
        "replicas_reach_global_minimum",
        global_gap,
        TERMINAL_TOL,
    ));
    outcome.assertions.push(Assertion::at_least(
        "uncoupled_copies_split_across_minima",
        least_populated,
        1,
    ));

    // Artifacts: a contract trajectory for the first repetition, the
    // projected observable per repetition, the decoupled copies and the
    // summary.
    let first = &reps[0];
    let traj_path = output::stem_with_suffix(&cfg.output, "_member1.csv");
    output::write_trajectory(
        &traj_path,
        cfg,
        &first.coupled,
        coupled_sys.omega(),
        cfg.full_state,
    )?;
    outcome.outputs.push(traj_path);

    let times = &first.coupled.times;
    let names: Vec<String> = (1..=reps.len()).map(|j| format!("xtilde_rep{j}")).collect();
    let columns: Vec<Vec<f64>> = reps.iter().map(|r| r.projected.clone()).collect();
    let ens_path = output::stem_with_suffix(&cfg.output, "_ensemble.csv");
    output::write_columns(&ens_path, cfg, times, &names, &columns)?;
    outcome.outputs.push(ens_path);

    let copy_names: Vec<String> = (1..=cfg.n).map(|k| format!("copy_{k}")).collect();
    let copy_columns: Vec<Vec<f64>> = (0..cfg.n)
        .map(|k| {
            first
                .uncoupled
                .states
                .iter()
                .map(|st| st.column(0)[k])
                .collect()
        })
        .collect();
    let unc_path = output::stem_with_suffix(&cfg.output, "_uncoupled.csv");
    output::write_columns(
        &unc_path,
        cfg,
        &first.uncoupled.times,
        &copy_names,
        &copy_columns,
    )?;
    outcome.outputs.push(unc_path);

    let summary_path = output::stem_with_suffix(&cfg.output, "_summary.txt");
    output::write_text(
        &summary_path,
        &outcome.summary_text(&output::provenance_line(cfg)),
    )?;
    outcome.outputs.push(summary_path);
    Ok(outcome)
}
