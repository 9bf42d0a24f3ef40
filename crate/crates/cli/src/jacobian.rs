//! The `jacobian` verb: closed-form fixed-point Jacobians, spectra and
//! classification for a scenario's target system.

use anyhow::{bail, Result};

use peds_core::analysis::{find_fixed_points, peds_jacobian_closed_form};
use peds_core::embedding::{DecayFunction, PedsSystem};
use peds_core::projector::Projector;
use peds_core::systems::{self, QuarticPotential};
use peds_core::target::TargetSystem;

use crate::config::{ScenarioConfig, ScenarioName};
use crate::output;
use crate::scenarios::map_kind;

fn target_for(cfg: &ScenarioConfig) -> Result<TargetSystem> {
    Ok(match cfg.name {
        ScenarioName::Quartic1d | ScenarioName::MapCompare | ScenarioName::RandomProjector => {
            QuarticPotential::new(cfg.a).gradient_system()
        }
        ScenarioName::Potential2d => systems::exp_potential_2d(),
        ScenarioName::Hamiltonian => {
            systems::dissipative_particle(cfg.mass, cfg.chi, &QuarticPotential::new(cfg.a))
        }
        ScenarioName::Memristor => systems::memristor_scalar(cfg.chi, cfg.s, cfg.alpha)?,
    })
}

fn default_seeds(cfg: &ScenarioConfig) -> Vec<Vec<f64>> {
    match cfg.name {
        ScenarioName::Quartic1d | ScenarioName::MapCompare | ScenarioName::RandomProjector => {
            (-9..=10).map(|k| vec![k as f64]).collect()
        }
        ScenarioName::Potential2d => {
            let mut seeds = Vec::new();
            for x in [-0.4, 0.0, 0.4] {
                for y in [-1.3, -0.6, 0.1, 0.7, 1.3] {
                    seeds.push(vec![x, y]);
                }
            }
            seeds
        }
        ScenarioName::Hamiltonian => (-9..=10).map(|k| vec![k as f64, 0.0]).collect(),
        ScenarioName::Memristor => vec![vec![0.05], vec![0.2], vec![0.5], vec![0.8]],
    }
}

pub fn run(
    cfg: &ScenarioConfig,
    at: Option<Vec<f64>>,
) -> Result<(String, Vec<std::path::PathBuf>)> {
    let target = target_for(cfg)?;
    let roots: Vec<Vec<f64>> = match at {
        Some(x) => {
            if x.len() != target.m() {
                bail!(
                    "--at needs {} components for {}",
                    target.m(),
                    cfg.name.token()
                );
            }
            vec![x]
        }
        None => {
            let search = find_fixed_points(&target, &default_seeds(cfg));
            if search.roots.is_empty() {
                bail!("no fixed points found from the default seeds");
            }
            search.roots.into_iter().map(|r| r.x_star).collect()
        }
    };
    let decays = if cfg.name == ScenarioName::Hamiltonian {
        vec![
            DecayFunction::standard(cfg.alpha)?,
            DecayFunction::standard(cfg.alpha_p)?,
        ]
    } else {
        vec![DecayFunction::standard(cfg.alpha)?; target.m()]
    };
    let sys = PedsSystem::builder(target, Projector::uniform_mean_field(cfg.n)?)
        .map(map_kind(cfg))
        .decays(decays)
        .build()?;

    let mut report = String::new();
    let mut outputs = Vec::new();
    for (idx, root) in roots.iter().enumerate() {
        let rep = peds_jacobian_closed_form(&sys, root)?;
        let path = output::stem_with_suffix(&cfg.output, &format!("_jacobian_{idx}.csv"));
        let mut csv = output::provenance_line(cfg);
        csv.push_str("\nre,im\n");
        for l in &rep.eigenvalues {
            csv.push_str(&format!("{},{}\n", output::num(l.re), output::num(l.im)));
        }
        output::write_text(&path, &csv)?;
        let coords: Vec<String> = root.iter().map(|v| format!("{v:.9}")).collect();
        report.push_str(&format!(
            "FIXED_POINT {idx} x=({}) classification={} target_eigs=({}) eigenvalues={}\n",
            coords.join(", "),
            rep.classification.token(),
            rep.target_eigenvalues
                .iter()
                .map(|l| format!("{:.6}{:+.6}i", l.re, l.im))
                .collect::<Vec<_>>()
                .join(", "),
            path.display(),
        ));
        outputs.push(path);
    }
    Ok((report, outputs))
}
