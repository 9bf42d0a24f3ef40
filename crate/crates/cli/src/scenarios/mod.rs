//! The named experiment scenarios and their CSV artifacts.

pub mod hamiltonian;
pub mod map_compare;
pub mod memristor;
pub mod potential2d;
pub mod quartic1d;
pub mod random_projector;

use std::path::PathBuf;

use anyhow::{bail, Result};
use nalgebra::DVector;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use peds_core::projector::Projector;

use crate::config::{ScenarioConfig, ScenarioName};

#[derive(Debug, Clone)]
pub struct Assertion {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn le(label: &str, measured: f64, tol: f64) -> Self {
        Self {
            label: label.into(),
            passed: measured.is_finite() && measured <= tol,
            detail: format!("measured={measured:.3e} tol={tol:.1e}"),
        }
    }

    pub fn at_least(label: &str, count: usize, want: usize) -> Self {
        Self {
            label: label.into(),
            passed: count >= want,
            detail: format!("count={count} required>={want}"),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "ASSERT {} {} {}",
            self.label,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

#[derive(Debug, Default)]
pub struct ScenarioOutcome {
    pub assertions: Vec<Assertion>,
    pub outputs: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn summary_text(&self, header: &str) -> String {
        let mut out = String::from(header);
        out.push('\n');
        for note in &self.notes {
            out.push_str("NOTE ");
            out.push_str(note);
            out.push('\n');
        }
        for a in &self.assertions {
            out.push_str(&a.line());
            out.push('\n');
        }
        out
    }
}

pub fn run(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    match cfg.name {
        ScenarioName::Quartic1d => quartic1d::run(cfg),
        ScenarioName::MapCompare => map_compare::run(cfg),
        ScenarioName::Potential2d => potential2d::run(cfg),
        ScenarioName::Hamiltonian => hamiltonian::run(cfg),
        ScenarioName::RandomProjector => random_projector::run(cfg),
        ScenarioName::Memristor => memristor::run(cfg),
    }
}

/// Independent, reproducible stream per ensemble member.
pub fn member_rng(seed: u64, member: usize) -> StdRng {
    StdRng::seed_from_u64(seed.wrapping_add((member as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

pub fn gaussian_column(rng: &mut StdRng, n: usize, mean: f64, sigma: f64) -> DVector<f64> {
    let dist = Normal::new(mean, sigma.max(0.0)).expect("valid normal");
    DVector::from_fn(n, |_, _| dist.sample(rng))
}

/// Map kind from config tokens.
pub fn map_kind(cfg: &ScenarioConfig) -> peds_core::embedding::MapKind {
    use crate::config::MapToken;
    match cfg.map {
        MapToken::Commutative => peds_core::embedding::MapKind::StandardCommutative,
        MapToken::Mixed => peds_core::embedding::MapKind::MixedCommutative,
        MapToken::NonCommutative => {
            peds_core::embedding::MapKind::StandardNonCommutative(cfg.ordering.to_ordering())
        }
    }
}

/// Projector from --projector-file, or the fallback built by the scenario.
pub fn load_projector_or(
    cfg: &ScenarioConfig,
    fallback: impl FnOnce() -> Result<Projector>,
) -> Result<Projector> {
    match &cfg.projector_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let p = Projector::from_text(&text)?;
            if p.dim() != cfg.n {
                bail!(
                    "projector file has dimension {}, configuration asks for n = {}",
                    p.dim(),
                    cfg.n
                );
            }
            Ok(p)
        }
        None => fallback(),
    }
}
