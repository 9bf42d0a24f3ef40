//! Scenario runner and verification CLI for projective embeddings of
//! dynamical systems.
//!
//! Verbs: `run <scenario>`, `jacobian <scenario> [--at x,..]`, `verify`,
//! `dump-config`. Exit codes: 0 success, 2 property/assertion failure,
//! 3 trajectory divergence, 1 usage or configuration errors.

mod config;
mod jacobian;
mod output;
mod scenarios;

use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use peds_core::error::Error as CoreError;
use peds_core::verify::{run_verify, VerifyConfig};

use config::{ScenarioConfig, ScenarioName};

const USAGE: &str = "\
usage:
  peds run <scenario> [--config FILE] [--key value]...
  peds jacobian <scenario> [--at x1,x2] [--config FILE] [--key value]...
  peds verify [--seed N] [--n N] [--alpha A]
  peds dump-config

scenarios: quartic1d, map_compare, potential2d, hamiltonian,
           random_projector, memristor

configuration keys double as flags (e.g. --n 50 --alpha 0.1 --dt 0.01
--steps 2000 --seed 42 --ensemble-size 50 --map commutative
--ordering standard --method euler --sigma 2 --center auto --output stem
--projector-file omega.txt); `peds dump-config` prints every default.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(err) => {
            if let Some(CoreError::Divergence { step, time, .. }) = err.downcast_ref::<CoreError>()
            {
                eprintln!("error: trajectory diverged at step {step} (t = {time})");
                return ExitCode::from(3);
            }
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(args: &[String]) -> Result<ExitCode> {
    let Some(verb) = args.first() else {
        print!("{USAGE}");
        return Ok(ExitCode::from(1));
    };
    match verb.as_str() {
        "run" => {
            let (cfg, _) = scenario_config(&args[1..])?;
            let outcome = scenarios::run(&cfg)?;
            for note in &outcome.notes {
                println!("NOTE {note}");
            }
            for a in &outcome.assertions {
                println!("{}", a.line());
            }
            for path in &outcome.outputs {
                println!("WROTE {}", path.display());
            }
            let passed = outcome.passed();
            println!(
                "SCENARIO {} {}",
                cfg.name.token(),
                if passed { "PASS" } else { "FAIL" }
            );
            Ok(if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        "jacobian" => {
            let (cfg, at) = scenario_config(&args[1..])?;
            let (report, outputs) = jacobian::run(&cfg, at)?;
            print!("{report}");
            for path in outputs {
                println!("WROTE {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        "verify" => {
            let cfg = verify_config(&args[1..])?;
            let results = run_verify(&cfg);
            let mut failed = false;
            for r in &results {
                println!("{}", r.line());
                failed |= !r.passed();
            }
            Ok(if failed {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        "dump-config" => {
            print!("{}", config::dump_all_defaults());
            Ok(ExitCode::SUCCESS)
        }
        "--help" | "-h" | "help" => {
            print!("{USAGE}");
            Ok(ExitCode::SUCCESS)
        }
        other => {
            bail!("unknown verb {other:?}; try `peds help`");
        }
    }
}

/// Parse `<scenario> [--config FILE] [--key value]...`; the config file is
/// applied first, flags override it in order.
fn scenario_config(args: &[String]) -> Result<(ScenarioConfig, Option<Vec<f64>>)> {
    let Some(name_tok) = args.first() else {
        bail!("missing scenario name; try `peds help`");
    };
    let name = ScenarioName::parse(name_tok)
        .ok_or_else(|| anyhow!("unknown scenario {name_tok:?}; try `peds help`"))?;
    let mut cfg = ScenarioConfig::defaults(name);
    let mut at = None;

    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut it = args[1..].iter();
    while let Some(flag) = it.next() {
        let Some(key) = flag.strip_prefix("--") else {
            bail!("expected --flag, got {flag:?}");
        };
        let value = it
            .next()
            .ok_or_else(|| anyhow!("flag --{key} needs a value"))?
            .clone();
        pairs.push((key.replace('-', "_"), value));
    }
    // First pass: the config file.
    for (key, value) in &pairs {
        if key == "config" {
            let text = std::fs::read_to_string(value)
                .with_context(|| format!("reading config file {value}"))?;
            config::apply_config_file(&mut cfg, &text)?;
        }
    }
    // Second pass: flag overrides.
    for (key, value) in &pairs {
        match key.as_str() {
            "config" => {}
            "at" => {
                let parts: Result<Vec<f64>> = value
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<f64>()
                            .map_err(|_| anyhow!("bad --at component {p:?}"))
                    })
                    .collect();
                at = Some(parts?);
            }
            _ => cfg.set(key, value)?,
        }
    }
    Ok((cfg, at))
}

fn verify_config(args: &[String]) -> Result<VerifyConfig> {
    let mut cfg = VerifyConfig::default();
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let Some(key) = flag.strip_prefix("--") else {
            bail!("expected --flag, got {flag:?}");
        };
        let value = it
            .next()
            .ok_or_else(|| anyhow!("flag --{key} needs a value"))?;
        match key {
            "seed" => cfg.seed = value.parse().context("bad --seed")?,
            "n" => cfg.n = value.parse().context("bad --n")?,
            "alpha" => cfg.alpha = value.parse().context("bad --alpha")?,
            other => bail!("unknown verify flag --{other}"),
        }
    }
    Ok(cfg)
}
