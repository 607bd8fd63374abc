//! Experiment configuration schema and channel-spec parsing.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use streamcode::schedule::Scheme;
use streamcode::Dmc;

/// One experiment: channel, code parameters, run sizes, output options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// bsc:P, bec:E, identity:K, or a path to a JSON matrix file.
    pub channel: String,
    /// "capacity" (Blahut-Arimoto fixed point) or an explicit vector.
    #[serde(default)]
    pub input_dist: InputDistSpec,
    pub scheme: Scheme,
    pub n: usize,
    pub m: u64,
    pub t: u32,
    /// Omitted, a number, or "capacity_gap" for C - ln(m)/n.
    #[serde(default)]
    pub rho_n: Option<RhoSpec>,
    pub trials: u64,
    pub horizon: u64,
    pub seed: u64,
    /// Ensemble size; 1 runs a single codebook.
    #[serde(default = "one")]
    pub codebook_seeds: u64,
    #[serde(default)]
    pub steady_state: bool,
    #[serde(default = "yes")]
    pub compare_bounds: bool,
    /// Attach the exact-enumeration oracle per target (tiny instances only).
    #[serde(default)]
    pub oracle: bool,
    #[serde(default = "json")]
    pub format: String,
}

fn one() -> u64 {
    1
}
fn yes() -> bool {
    true
}
fn json() -> String {
    "json".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputDistSpec {
    Keyword(DistKeyword),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistKeyword {
    /// Use the Blahut-Arimoto fixed point.
    Capacity,
}

impl Default for InputDistSpec {
    fn default() -> Self {
        Self::Keyword(DistKeyword::Capacity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhoSpec {
    Value(f64),
    Keyword(RhoKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoKeyword {
    /// C - ln(m)/n at the analyzed channel's capacity.
    CapacityGap,
}

/// Raw transition-matrix file schema.
#[derive(Debug, Deserialize)]
struct MatrixSpec {
    inputs: usize,
    outputs: usize,
    rows: Vec<Vec<f64>>,
}

/// Parses a channel spec: named shortcut, inline JSON, or a file path.
pub fn parse_channel(spec: &str) -> Result<Dmc> {
    if let Some(p) = spec.strip_prefix("bsc:") {
        let p: f64 = p.parse().context("bsc crossover probability")?;
        if !(0.0..=1.0).contains(&p) {
            bail!("bsc crossover probability {p} outside [0,1]");
        }
        return Ok(Dmc::bsc(p)?);
    }
    if let Some(e) = spec.strip_prefix("bec:") {
        let e: f64 = e.parse().context("bec erasure probability")?;
        if !(0.0..=1.0).contains(&e) {
            bail!("bec erasure probability {e} outside [0,1]");
        }
        return Ok(Dmc::bec(e)?);
    }
    if let Some(k) = spec.strip_prefix("identity:") {
        let k: usize = k.parse().context("identity alphabet size")?;
        return Ok(Dmc::identity(k)?);
    }
    let raw = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec)
            .with_context(|| format!("channel spec '{spec}' is not a shortcut or readable file"))?
    };
    let m: MatrixSpec = serde_json::from_str(&raw).context("channel matrix JSON")?;
    if m.rows.len() != m.inputs || m.rows.iter().any(|r| r.len() != m.outputs) {
        bail!(
            "channel matrix shape mismatch: declared {}x{}",
            m.inputs,
            m.outputs
        );
    }
    Ok(Dmc::new(m.rows)?)
}
