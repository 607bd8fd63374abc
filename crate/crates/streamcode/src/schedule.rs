//! Message-to-block mapping combinatorics.
//!
//! For every scheme this module answers two questions as pure functions of
//! the parameters: which messages feed the codeword of block `k`
//! ([`encode_span`]), and which ordered threshold tests decode message `k` at
//! its deadline ([`decode_plan`]). Block and message indices are 1-based and
//! aligned (one fresh message per block).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("invalid parameter {field}: {reason}")]
    InvalidParam { field: &'static str, reason: String },
    #[error("infeasible truncated-memory geometry: A={a}, B={b}, T={t} violates A >= 2B-T-2 >= 0, A >= B >= T; raise n")]
    Infeasible { a: u32, b: u32, t: u32 },
    #[error("alternating alphabet for message {k} rounds to {size}; need at least 2")]
    AlphabetTooSmall { k: u64, size: u64 },
    #[error("decode window for message {k} is empty at delay {t}")]
    EmptyWindow { k: u64, t: u32 },
}

pub type Result<T> = std::result::Result<T, ScheduleError>;

/// Coding scheme variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    /// Every codeword encodes the full message history; fixed delay T.
    MdInfinite,
    /// Periodically truncated encoder memory between B and A blocks.
    ClTruncated { a: u32, b: u32 },
    /// Full-history encoding, erasure option at the decoder.
    Erasure { gamma: f64 },
    /// Erasure decoding retried at growing delay until a non-erasure output.
    #[serde(rename = "vardelay")]
    VarDelay { gamma: f64, d_max: u32 },
    /// Odd blocks carry rate r·log M, even blocks (2-r)·log M.
    Alternating { r: f64 },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::MdInfinite => "md_infinite",
            Scheme::ClTruncated { .. } => "cl_truncated",
            Scheme::Erasure { .. } => "erasure",
            Scheme::VarDelay { .. } => "vardelay",
            Scheme::Alternating { .. } => "alternating",
        }
    }
}

/// Streaming-code parameters shared by the schedule, codebook, codec and
/// simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamParams {
    /// Block length in channel uses.
    pub n: usize,
    /// Integer message-set size actually instantiated.
    pub m: u64,
    /// Nominal log message-set size in nats. Thresholds use `ln m` of the
    /// integer size; this records the regime target it approximates.
    pub m_log: f64,
    /// Decoding delay in blocks.
    pub t: u32,
    pub scheme: Scheme,
    /// Rate gap to capacity, nats per channel use. Required by the erasure
    /// and variable-delay thresholds; informational elsewhere.
    pub rho_n: Option<f64>,
}

impl StreamParams {
    pub fn new(n: usize, m: u64, t: u32, scheme: Scheme) -> Result<Self> {
        let p = Self {
            n,
            m,
            m_log: (m as f64).ln(),
            t,
            scheme,
            rho_n: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Sets `m` from a nominal log-size (nats), rounding to the nearest
    /// integer with a floor of 2.
    pub fn from_nominal_log_m(n: usize, m_log: f64, t: u32, scheme: Scheme) -> Result<Self> {
        if !m_log.is_finite() {
            return Err(ScheduleError::InvalidParam {
                field: "m_log",
                reason: format!("{m_log} is not finite"),
            });
        }
        let m = (m_log.exp().round() as u64).max(2);
        let p = Self {
            n,
            m,
            m_log,
            t,
            scheme,
            rho_n: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_rho(mut self, rho_n: f64) -> Result<Self> {
        if !rho_n.is_finite() {
            return Err(ScheduleError::InvalidParam {
                field: "rho_n",
                reason: format!("{rho_n} is not finite"),
            });
        }
        self.rho_n = Some(rho_n);
        Ok(self)
    }

    /// `ln m` of the integer message-set size; this is what the decoder
    /// thresholds use.
    pub fn ln_m(&self) -> f64 {
        (self.m as f64).ln()
    }

    pub fn validate(&self) -> Result<()> {
        if self.t < 1 {
            return Err(ScheduleError::InvalidParam {
                field: "t",
                reason: "delay must be at least 1 block".into(),
            });
        }
        if self.m < 2 {
            return Err(ScheduleError::InvalidParam {
                field: "m",
                reason: format!("message-set size {} must be at least 2", self.m),
            });
        }
        let slack = (1.0 + 1.0 / self.m as f64).ln();
        if ((self.m as f64).ln() - self.m_log).abs() > slack {
            return Err(ScheduleError::InvalidParam {
                field: "m_log",
                reason: format!(
                    "nominal log size {} is more than ln(1+1/m) away from ln({})",
                    self.m_log, self.m
                ),
            });
        }
        match self.scheme {
            Scheme::MdInfinite => {}
            Scheme::ClTruncated { a, b } => {
                if b < self.t
                    || a < b
                    || 2 * b < self.t + 2
                    || a + self.t + 2 < 2 * b
                {
                    return Err(ScheduleError::Infeasible { a, b, t: self.t });
                }
            }
            Scheme::Erasure { gamma } | Scheme::VarDelay { gamma, .. } => {
                if !(gamma > 0.0 && gamma < 1.0) {
                    return Err(ScheduleError::InvalidParam {
                        field: "gamma",
                        reason: format!("{gamma} must lie strictly in (0,1)"),
                    });
                }
                if let Scheme::VarDelay { d_max, .. } = self.scheme {
                    if d_max < self.t {
                        return Err(ScheduleError::InvalidParam {
                            field: "d_max",
                            reason: format!("d_max {} below delay T {}", d_max, self.t),
                        });
                    }
                }
            }
            Scheme::Alternating { r } => {
                if !(r > 0.0 && r < 1.0) {
                    return Err(ScheduleError::InvalidParam {
                        field: "r",
                        reason: format!("{r} must lie strictly in (0,1)"),
                    });
                }
                if self.t < 2 {
                    // With T = 1 the even-parity decode windows are empty.
                    return Err(ScheduleError::InvalidParam {
                        field: "t",
                        reason: "alternating rates need T >= 2".into(),
                    });
                }
                for k in [1u64, 2] {
                    message_alphabet_inner(self.m, r, k)?;
                }
            }
        }
        Ok(())
    }

    /// Deadline block of message `k` at the configured delay.
    pub fn deadline(&self, k: u64) -> u64 {
        k + self.t as u64 - 1
    }
}

/// Message interval (inclusive) feeding the codeword of block `k`.
pub fn encode_span(params: &StreamParams, k: u64) -> (u64, u64) {
    match params.scheme {
        Scheme::ClTruncated { a, b } => {
            let (a, b) = (a as u64, b as u64);
            if k <= a {
                (1, k)
            } else {
                let period = a - b + 1;
                let q = (k - b) / period;
                (q * period + 1, k)
            }
        }
        _ => (1, k),
    }
}

/// Alphabet size of message `k`.
pub fn message_alphabet(params: &StreamParams, k: u64) -> Result<u64> {
    match params.scheme {
        Scheme::Alternating { r } => message_alphabet_inner(params.m, r, k),
        _ => Ok(params.m),
    }
}

fn message_alphabet_inner(m: u64, r: f64, k: u64) -> Result<u64> {
    let exponent = if k % 2 == 1 { r } else { 2.0 - r };
    let size = (m as f64).powf(exponent).round() as u64;
    if size < 2 {
        return Err(ScheduleError::AlphabetTooSmall { k, size });
    }
    Ok(size)
}

/// How a decode step treats its target indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// All target messages decided at once (non-unique joint test).
    Simultaneous,
    /// One target message decided, given earlier decisions.
    Sequential,
}

/// One threshold test of a decode plan.
///
/// The candidate search ranges over the free messages
/// `[targets.0 : window.1]`; earlier indices come from the fixed prefix of
/// already-decided estimates. The test passes when the information density
/// over the window exceeds `multiplier · ln m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeStep {
    /// Message indices decided by this step (inclusive).
    pub targets: (u64, u64),
    /// Block window whose outputs are tested (inclusive).
    pub window: (u64, u64),
    /// Threshold multiplier in units of `ln m`.
    pub multiplier: f64,
    pub kind: StepKind,
}

impl DecodeStep {
    /// Free message indices enumerated by the candidate search.
    pub fn free_range(&self) -> (u64, u64) {
        (self.targets.0, self.window.1)
    }
}

/// Ordered decode steps recovering message `k` at its deadline block.
pub fn decode_plan(params: &StreamParams, k: u64) -> Result<Vec<DecodeStep>> {
    decode_plan_with_delay(params, k, params.t)
}

/// Decode plan at an explicit delay (the variable-delay decoder re-plans the
/// same message at increasing `t`).
pub fn decode_plan_with_delay(params: &StreamParams, k: u64, t: u32) -> Result<Vec<DecodeStep>> {
    assert!(k >= 1, "message indices are 1-based");
    let t_k = k + t as u64 - 1;
    match params.scheme {
        Scheme::MdInfinite | Scheme::Erasure { .. } | Scheme::VarDelay { .. } => {
            Ok(plan_full_memory(k, t_k))
        }
        Scheme::ClTruncated { a, b } => plan_truncated(k, t, a as u64, b as u64),
        Scheme::Alternating { r } => plan_alternating(k, t, r),
    }
}

/// Sequential full-history plan: windows `[j : T_k]` shrinking one block per
/// step.
fn plan_full_memory(k: u64, t_k: u64) -> Vec<DecodeStep> {
    (1..=k)
        .map(|j| DecodeStep {
            targets: (j, j),
            window: (j, t_k),
            multiplier: (t_k - j + 1) as f64,
            kind: StepKind::Sequential,
        })
        .collect()
}

fn plan_truncated(k: u64, t: u32, a: u64, b: u64) -> Result<Vec<DecodeStep>> {
    let period = a - b + 1;
    let q = k.div_ceil(period); // message group: k ∈ P(q)
    let t_k = k + t as u64 - 1;
    if q == 1 {
        return Ok(plan_full_memory(k, t_k));
    }
    // General q >= 2 by shifting the q = 2 rule by (q-2) periods.
    let s = (q - 2) * period;
    if t_k < s + b {
        return Err(ScheduleError::EmptyWindow { k, t });
    }
    let nu = (s + a).min(t_k);
    let mut steps = Vec::new();
    // (i) simultaneous non-unique decoding of the first B messages of the
    // previous group over blocks [s+B : nu].
    steps.push(DecodeStep {
        targets: (s + 1, s + b),
        window: (s + b, nu),
        multiplier: (nu - s) as f64,
        kind: StepKind::Simultaneous,
    });
    // (ii) sequential decoding of the remaining A-2B+1 messages of the
    // previous group, windows capped at nu.
    for j in (s + b + 1)..=(s + a - b + 1) {
        steps.push(DecodeStep {
            targets: (j, j),
            window: (j, nu),
            multiplier: (nu - j + 1) as f64,
            kind: StepKind::Sequential,
        });
    }
    // (iii) sequential decoding of the current group up to k, windows ending
    // at the deadline.
    for j in (s + a - b + 2)..=k {
        steps.push(DecodeStep {
            targets: (j, j),
            window: (j, t_k),
            multiplier: (t_k - j + 1) as f64,
            kind: StepKind::Sequential,
        });
    }
    Ok(steps)
}

/// Alternating-rate plan: every window ends on an odd block index, and the
/// final step's multiplier carries the fractional rate split.
fn plan_alternating(k: u64, t: u32, r: f64) -> Result<Vec<DecodeStep>> {
    let t_k = k + t as u64 - 1;
    let t_odd = t % 2 == 1;
    let k_odd = k % 2 == 1;
    // T_k is odd exactly when k and T share parity; otherwise stop at T_k - 1.
    let end = if t_odd == k_odd { t_k } else { t_k - 1 };
    if end < k {
        return Err(ScheduleError::EmptyWindow { k, t });
    }
    let mut steps: Vec<DecodeStep> = (1..=k)
        .map(|j| DecodeStep {
            targets: (j, j),
            window: (j, end),
            multiplier: (end - j + 1) as f64,
            kind: StepKind::Sequential,
        })
        .collect();
    let tf = t as f64;
    if t_odd && k_odd {
        steps.last_mut().unwrap().multiplier = tf + r - 1.0;
    } else if !t_odd && k_odd {
        steps.last_mut().unwrap().multiplier = tf + r - 2.0;
    }
    Ok(steps)
}

/// Defaults for the truncated-memory geometry: `A = ⌈n^(1-δ)⌉` lifted to
/// feasibility, `B = max(⌈(V/L²) δ ln n⌉, T)`.
pub fn cl_defaults(n: usize, delta: f64, l_rate: f64, v: f64, t: u32) -> Result<(u32, u32)> {
    if delta.is_nan() || delta <= 0.0 || delta >= 0.5 {
        return Err(ScheduleError::InvalidParam {
            field: "delta",
            reason: format!("{delta} must lie strictly in (0, 1/2)"),
        });
    }
    if l_rate.is_nan() || v.is_nan() || l_rate <= 0.0 || v <= 0.0 {
        return Err(ScheduleError::InvalidParam {
            field: "l_rate/v",
            reason: "second-order rate and dispersion must be positive".into(),
        });
    }
    let nf = n as f64;
    let b_raw = (v / (l_rate * l_rate) * delta * nf.ln()).ceil() as u64;
    let b = b_raw.max(t as u64);
    if 2 * b < t as u64 + 2 {
        return Err(ScheduleError::Infeasible {
            a: nf.powf(1.0 - delta).ceil() as u32,
            b: b as u32,
            t,
        });
    }
    let a_raw = nf.powf(1.0 - delta).ceil() as u64;
    let a = a_raw.max(b).max(2 * b - t as u64 - 2);
    if a > u32::MAX as u64 || b > u32::MAX as u64 {
        return Err(ScheduleError::InvalidParam {
            field: "n",
            reason: "memory bounds overflow u32".into(),
        });
    }
    Ok((a as u32, b as u32))
}

/// Serializable schedule rendering for a block range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleDump {
    pub scheme: String,
    pub spans: Vec<SpanEntry>,
    pub plans: Vec<PlanEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpanEntry {
    pub block: u64,
    pub first_message: u64,
    pub last_message: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanEntry {
    pub message: u64,
    pub steps: Vec<DecodeStep>,
}

/// Renders encode spans and decode plans for messages/blocks `lo..=hi`.
pub fn dump(params: &StreamParams, lo: u64, hi: u64) -> Result<ScheduleDump> {
    let mut spans = Vec::new();
    let mut plans = Vec::new();
    for k in lo..=hi {
        let (first, last) = encode_span(params, k);
        spans.push(SpanEntry {
            block: k,
            first_message: first,
            last_message: last,
        });
        plans.push(PlanEntry {
            message: k,
            steps: decode_plan(params, k)?,
        });
    }
    Ok(ScheduleDump {
        scheme: params.scheme.name().to_string(),
        spans,
        plans,
    })
}
