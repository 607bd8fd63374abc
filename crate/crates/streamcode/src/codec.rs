//! Streaming encoder and threshold sequential decoders.
//!
//! A decoder runs the scheme's decode plan step by step. Each step
//! enumerates candidate values for its target messages; a value survives if
//! some completion of the remaining free messages pushes the window's
//! information density strictly above `multiplier · ln M` (plus `γnρ` per
//! window block for the erasure-style variants). Exactly one survivor
//! decides the step; zero or several survivors default to the all-ones
//! message (index 0 here) in the basic variants or terminate with an erasure
//! mark in the erasure/variable-delay variants.
//!
//! The candidate search is exact: an existence test over completions done as
//! depth-first search with an optimistic-density prune, which never changes
//! the survivor set because a pruned branch cannot reach the threshold.

use crate::channel::{ChannelError, Dmc, InputDist};
use crate::codebook::{self, Codebook};
use crate::schedule::{self, DecodeStep, Scheme, StreamParams};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("candidate search size {combos} exceeds the cap {cap}; use desk-scale parameters (small M, short windows)")]
    SearchCapExceeded { combos: u128, cap: u64 },
    #[error("output horizon too short: decoding needs blocks through {needed}, have {have}")]
    HorizonTooShort { needed: u64, have: u64 },
    #[error("message history covers {got} messages, block {block} needs messages through {need}")]
    HistoryTooShort { block: u64, need: u64, got: usize },
    #[error("operation requires the {expected} scheme, parameters use {actual}")]
    SchemeMismatch {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("output block {block} has {got} symbols, block length is {n}")]
    BlockLengthMismatch { block: u64, got: usize, n: usize },
    #[error("erasure-style thresholds need the rate gap rho_n; set it on StreamParams")]
    MissingRho,
    #[error("candidate covers {got} messages, step's free range needs {need}")]
    CandidateLengthMismatch { need: usize, got: usize },
    #[error(transparent)]
    Schedule(#[from] schedule::ScheduleError),
    #[error(transparent)]
    Codebook(#[from] codebook::CodebookError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

pub type Result<T> = std::result::Result<T, CodecError>;

/// Hard cap on candidate combinations per decode step.
pub const DEFAULT_SEARCH_CAP: u64 = 1 << 20;

/// Classification of a decode outcome against the true message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Correct,
    /// Wrong non-erasure estimate produced by a unique (but wrong) survivor.
    UndetectedError,
    /// Erasure mark (erasure and variable-delay variants only).
    Erasure,
    /// Wrong estimate produced by the default rule on a non-unique final step.
    Defaulted,
}

/// Per-step scan record kept when tracing is enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepTrace {
    pub step: usize,
    /// Surviving target values found (saturates at 2: non-unique).
    pub survivors: u8,
}

/// Decoder output for one target message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    /// Recovered message value, or `None` for the erasure mark.
    pub estimate: Option<u64>,
    pub kind: OutcomeKind,
    /// Blocks waited before this output (always ≥ T; > T only for the
    /// variable-delay decoder).
    pub delay: u32,
    pub trace: Option<Vec<StepTrace>>,
}

/// Encodes block `k`: looks up the block's codeword under the span-restricted
/// message history. `history[i]` is the value of message `i+1`.
pub fn encode_block(
    params: &StreamParams,
    seed: u64,
    k: u64,
    history: &[u64],
    dist: &InputDist,
) -> Result<Vec<usize>> {
    let (lo, hi) = schedule::encode_span(params, k);
    if (history.len() as u64) < hi {
        return Err(CodecError::HistoryTooShort {
            block: k,
            need: hi,
            got: history.len(),
        });
    }
    let tuple = &history[(lo - 1) as usize..hi as usize];
    Ok(codebook::codeword(params, seed, k, tuple, dist)?)
}

/// A per-realization decoder: holds the channel outputs of one transmission
/// and memoizes per-block densities across steps and targets.
pub struct StreamDecoder<'a> {
    params: &'a StreamParams,
    codebook: Codebook,
    ys: &'a [Vec<usize>],
    /// dens[x][y] = ln(W(y|x)/PW(y)); -inf where W vanishes.
    dens: Vec<Vec<f64>>,
    /// Optimistic density of one whole block, for branch pruning.
    per_block_max: f64,
    /// Per-multiplier threshold base: ln m, plus γnρ for erasure variants.
    ln_m_eff: f64,
    search_cap: u64,
    cache: HashMap<u64, HashMap<Vec<u64>, f64>>,
    scratch_word: Vec<usize>,
    scratch_tuple: Vec<u64>,
    collect_trace: bool,
}

impl<'a> StreamDecoder<'a> {
    pub fn new(
        params: &'a StreamParams,
        ch: &Dmc,
        dist: &InputDist,
        seed: u64,
        ys: &'a [Vec<usize>],
    ) -> Result<Self> {
        let pw = ch.output_dist(dist);
        // Validate the realization once: block lengths and reachable symbols.
        for (b, y_block) in ys.iter().enumerate() {
            if y_block.len() != params.n {
                return Err(CodecError::BlockLengthMismatch {
                    block: b as u64 + 1,
                    got: y_block.len(),
                    n: params.n,
                });
            }
            for &y in y_block {
                if y >= ch.outputs() || pw[y] <= 0.0 {
                    return Err(ChannelError::UnreachableOutput { y }.into());
                }
            }
        }
        let mut dens = vec![vec![f64::NEG_INFINITY; ch.outputs()]; ch.inputs()];
        let mut i_max = 0.0f64;
        for x in 0..ch.inputs() {
            for y in 0..ch.outputs() {
                if ch.prob(x, y) > 0.0 && pw[y] > 0.0 {
                    let d = (ch.prob(x, y) / pw[y]).ln();
                    dens[x][y] = d;
                    if dist.prob(x) > 0.0 {
                        i_max = i_max.max(d);
                    }
                }
            }
        }
        let ln_m_eff = match params.scheme {
            Scheme::Erasure { gamma } | Scheme::VarDelay { gamma, .. } => {
                let rho = params.rho_n.ok_or(CodecError::MissingRho)?;
                params.ln_m() + gamma * params.n as f64 * rho
            }
            _ => params.ln_m(),
        };
        Ok(Self {
            params,
            codebook: Codebook::new(seed, dist),
            ys,
            dens,
            per_block_max: params.n as f64 * i_max,
            ln_m_eff,
            search_cap: DEFAULT_SEARCH_CAP,
            cache: HashMap::new(),
            scratch_word: Vec::with_capacity(params.n),
            scratch_tuple: Vec::new(),
            collect_trace: false,
        })
    }

    pub fn with_search_cap(mut self, cap: u64) -> Self {
        self.search_cap = cap;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.collect_trace = on;
        self
    }

    /// Threshold of a decode step in nats.
    pub fn threshold(&self, step: &DecodeStep) -> f64 {
        step.multiplier * self.ln_m_eff
    }

    /// Decodes message `k` at its deadline block. `true_g_k` is used only to
    /// classify the outcome.
    pub fn decode_message(&mut self, k: u64, true_g_k: u64) -> Result<DecodeOutcome> {
        let plan = schedule::decode_plan(self.params, k)?;
        self.decode_with_plan(&plan, k, true_g_k, self.params.t)
    }

    /// Variable-delay decoding: re-runs the erasure rule at delays
    /// `d = T, T+1, ...` until a non-erasure output, up to `d_max` (or until
    /// the realized stream ends). An unresolved message is reported as an
    /// erasure at the last delay tried.
    pub fn decode_vardelay(&mut self, k: u64, true_g_k: u64) -> Result<DecodeOutcome> {
        let Scheme::VarDelay { d_max, .. } = self.params.scheme else {
            return Err(CodecError::SchemeMismatch {
                expected: "vardelay",
                actual: self.params.scheme.name(),
            });
        };
        let have = self.ys.len() as u64;
        if have < self.params.deadline(k) {
            return Err(CodecError::HorizonTooShort {
                needed: self.params.deadline(k),
                have,
            });
        }
        let d_hi = (d_max as u64).min(have - k + 1) as u32;
        let mut last = None;
        for d in self.params.t..=d_hi {
            let plan = schedule::decode_plan_with_delay(self.params, k, d)?;
            let out = self.decode_with_plan(&plan, k, true_g_k, d)?;
            if out.kind != OutcomeKind::Erasure {
                return Ok(out);
            }
            last = Some(out);
        }
        Ok(last.expect("at least one delay tried"))
    }

    fn decode_with_plan(
        &mut self,
        plan: &[DecodeStep],
        k: u64,
        true_g_k: u64,
        delay: u32,
    ) -> Result<DecodeOutcome> {
        let needed = plan.iter().map(|s| s.window.1).max().unwrap_or(0);
        if needed > self.ys.len() as u64 {
            return Err(CodecError::HorizonTooShort {
                needed,
                have: self.ys.len() as u64,
            });
        }
        let erasure_mode = matches!(
            self.params.scheme,
            Scheme::Erasure { .. } | Scheme::VarDelay { .. }
        );
        let mut decided: BTreeMap<u64, u64> = BTreeMap::new();
        let mut trace = self.collect_trace.then(Vec::new);
        let mut final_defaulted = false;
        for (si, step) in plan.iter().enumerate() {
            let survivors = self.scan_step(step, &decided)?;
            if let Some(t) = trace.as_mut() {
                t.push(StepTrace {
                    step: si,
                    survivors: survivors.len() as u8,
                });
            }
            let covers_k = step.targets.0 <= k && k <= step.targets.1;
            if survivors.len() == 1 {
                let values = &survivors[0];
                for (off, &v) in values.iter().enumerate() {
                    decided.insert(step.targets.0 + off as u64, v);
                }
                if covers_k {
                    final_defaulted = false;
                }
            } else {
                // None or more than one survivor.
                if erasure_mode {
                    return Ok(DecodeOutcome {
                        estimate: None,
                        kind: OutcomeKind::Erasure,
                        delay,
                        trace,
                    });
                }
                for idx in step.targets.0..=step.targets.1 {
                    decided.insert(idx, 0);
                }
                if covers_k {
                    final_defaulted = true;
                }
            }
        }
        let estimate = *decided.get(&k).expect("plan decides its target");
        let kind = if estimate == true_g_k {
            OutcomeKind::Correct
        } else if final_defaulted {
            OutcomeKind::Defaulted
        } else {
            OutcomeKind::UndetectedError
        };
        Ok(DecodeOutcome {
            estimate: Some(estimate),
            kind,
            delay,
            trace,
        })
    }

    /// Scans a step's target values; returns the surviving target tuples,
    /// stopping at two (non-uniqueness is already decided then).
    fn scan_step(
        &mut self,
        step: &DecodeStep,
        decided: &BTreeMap<u64, u64>,
    ) -> Result<Vec<Vec<u64>>> {
        if step.window.1 > self.ys.len() as u64 {
            return Err(CodecError::HorizonTooShort {
                needed: step.window.1,
                have: self.ys.len() as u64,
            });
        }
        let (free_lo, free_hi) = step.free_range();
        let free_len = (free_hi - free_lo + 1) as usize;
        let target_len = (step.targets.1 - step.targets.0 + 1) as usize;
        let mut alphabet = Vec::with_capacity(free_len);
        let mut combos: u128 = 1;
        for idx in free_lo..=free_hi {
            let size = schedule::message_alphabet(self.params, idx)?;
            combos = combos.saturating_mul(size as u128);
            alphabet.push(size);
        }
        if combos > self.search_cap as u128 {
            return Err(CodecError::SearchCapExceeded {
                combos,
                cap: self.search_cap,
            });
        }
        let threshold = self.threshold(step);
        let mut assignment = vec![0u64; free_len];
        let mut survivors: Vec<Vec<u64>> = Vec::new();
        'targets: loop {
            // Density of the window blocks determined by the targets alone.
            let mut base = 0.0;
            for block in step.window.0..=step.window.1.min(step.targets.1) {
                base += self.block_density(block, decided, free_lo, &assignment)?;
            }
            let passes = if target_len == free_len {
                base > threshold
            } else {
                let slack = (step.window.1 - step.targets.1) as f64 * self.per_block_max;
                base + slack > threshold
                    && self.exists_completion(
                        step,
                        decided,
                        &mut assignment,
                        target_len,
                        &alphabet,
                        base,
                        threshold,
                    )?
            };
            if passes {
                survivors.push(assignment[..target_len].to_vec());
                if survivors.len() == 2 {
                    break;
                }
            }
            // Advance the target odometer.
            for pos in (0..target_len).rev() {
                assignment[pos] += 1;
                if assignment[pos] < alphabet[pos] {
                    continue 'targets;
                }
                assignment[pos] = 0;
            }
            break;
        }
        Ok(survivors)
    }

    /// Existence of a completion with density strictly above the threshold,
    /// by DFS over the completion digits with optimistic pruning.
    #[allow(clippy::too_many_arguments)]
    fn exists_completion(
        &mut self,
        step: &DecodeStep,
        decided: &BTreeMap<u64, u64>,
        assignment: &mut Vec<u64>,
        depth: usize,
        alphabet: &[u64],
        partial: f64,
        threshold: f64,
    ) -> Result<bool> {
        let free_lo = step.targets.0;
        let block = free_lo + depth as u64;
        let remaining_after = (step.window.1 - block) as f64 * self.per_block_max;
        let last = depth + 1 == assignment.len();
        for v in 0..alphabet[depth] {
            assignment[depth] = v;
            let d = self.block_density(block, decided, free_lo, assignment)?;
            let total = partial + d;
            if total + remaining_after <= threshold {
                continue; // cannot reach the threshold on this branch
            }
            if last {
                if total > threshold {
                    assignment[depth] = 0;
                    return Ok(true);
                }
            } else if self.exists_completion(
                step,
                decided,
                assignment,
                depth + 1,
                alphabet,
                total,
                threshold,
            )? {
                assignment[depth] = 0;
                return Ok(true);
            }
        }
        assignment[depth] = 0;
        Ok(false)
    }

    /// Memoized information density of one block's codeword against the
    /// realized output, for the tuple implied by `decided` + `assignment`.
    fn block_density(
        &mut self,
        block: u64,
        decided: &BTreeMap<u64, u64>,
        free_lo: u64,
        assignment: &[u64],
    ) -> Result<f64> {
        let (lo, hi) = schedule::encode_span(self.params, block);
        let mut tuple = std::mem::take(&mut self.scratch_tuple);
        tuple.clear();
        for idx in lo..=hi {
            let v = if idx >= free_lo {
                assignment[(idx - free_lo) as usize]
            } else {
                *decided
                    .get(&idx)
                    .expect("decode plan invariant: earlier message already decided")
            };
            tuple.push(v);
        }
        if let Some(&d) = self.cache.get(&block).and_then(|m| m.get(tuple.as_slice())) {
            self.scratch_tuple = tuple;
            return Ok(d);
        }
        let mut word = std::mem::take(&mut self.scratch_word);
        self.codebook.fill_word(block, &tuple, self.params.n, &mut word);
        let y = &self.ys[(block - 1) as usize];
        let mut d = 0.0;
        for (l, &x) in word.iter().enumerate() {
            d += self.dens[x][y[l]];
        }
        self.cache
            .entry(block)
            .or_default()
            .insert(tuple.clone(), d);
        self.scratch_word = word;
        self.scratch_tuple = tuple;
        Ok(d)
    }
}

/// Stand-alone threshold test for one step and one fully specified candidate
/// assignment of the step's free messages. `fixed_prefix[&i]` supplies the
/// already-decided estimate of message `i`.
#[allow(clippy::too_many_arguments)]
pub fn threshold_test(
    params: &StreamParams,
    seed: u64,
    ch: &Dmc,
    dist: &InputDist,
    step: &DecodeStep,
    fixed_prefix: &BTreeMap<u64, u64>,
    candidate: &[u64],
    ys: &[Vec<usize>],
) -> Result<bool> {
    let (free_lo, free_hi) = step.free_range();
    let need = (free_hi - free_lo + 1) as usize;
    if candidate.len() != need {
        return Err(CodecError::CandidateLengthMismatch {
            need,
            got: candidate.len(),
        });
    }
    let mut dec = StreamDecoder::new(params, ch, dist, seed, ys)?;
    if step.window.1 > ys.len() as u64 {
        return Err(CodecError::HorizonTooShort {
            needed: step.window.1,
            have: ys.len() as u64,
        });
    }
    let mut density = 0.0;
    for block in step.window.0..=step.window.1 {
        density += dec.block_density(block, fixed_prefix, free_lo, candidate)?;
    }
    Ok(density > dec.threshold(step))
}

/// Convenience entry point building a one-shot decoder. Prefer
/// [`StreamDecoder`] when decoding several targets of one realization.
pub fn decode_message(
    params: &StreamParams,
    seed: u64,
    ch: &Dmc,
    dist: &InputDist,
    k: u64,
    ys: &[Vec<usize>],
    true_g_k: u64,
) -> Result<DecodeOutcome> {
    StreamDecoder::new(params, ch, dist, seed, ys)?.decode_message(k, true_g_k)
}

/// One-shot variable-delay decode; see [`StreamDecoder::decode_vardelay`].
pub fn decode_vardelay(
    params: &StreamParams,
    seed: u64,
    ch: &Dmc,
    dist: &InputDist,
    k: u64,
    ys: &[Vec<usize>],
    true_g_k: u64,
) -> Result<DecodeOutcome> {
    StreamDecoder::new(params, ch, dist, seed, ys)?.decode_vardelay(k, true_g_k)
}

/// Uniqueness-aware single-step decision, mirroring one iteration of the
/// sequential rule: the unique survivor, or the default (all zeros) with
/// `unique = false`.
pub fn decode_step(
    params: &StreamParams,
    seed: u64,
    ch: &Dmc,
    dist: &InputDist,
    step: &DecodeStep,
    fixed_prefix: &BTreeMap<u64, u64>,
    ys: &[Vec<usize>],
) -> Result<(Vec<u64>, bool)> {
    let mut dec = StreamDecoder::new(params, ch, dist, seed, ys)?;
    let survivors = dec.scan_step(step, fixed_prefix)?;
    let target_len = (step.targets.1 - step.targets.0 + 1) as usize;
    if survivors.len() == 1 {
        Ok((survivors.into_iter().next().unwrap(), true))
    } else {
        Ok((vec![0; target_len], false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{seq_info_density, Dmc, InputDist};
    use crate::codebook::{derive_rng, uniform_below, KeyDomain, SymbolSampler};
    use crate::schedule::StepKind;
    use rand_chacha::rand_core::RngCore;

    fn transmit(
        params: &StreamParams,
        ch: &Dmc,
        dist: &InputDist,
        seed: u64,
        noise_seed: u64,
        history: &[u64],
    ) -> Vec<Vec<usize>> {
        let samplers: Vec<SymbolSampler> =
            (0..ch.inputs()).map(|x| SymbolSampler::new(ch.row(x))).collect();
        (1..=history.len() as u64)
            .map(|b| {
                let x = encode_block(params, seed, b, history, dist).unwrap();
                let mut rng = derive_rng(KeyDomain::ChannelNoise, noise_seed, &[b]);
                x.iter().map(|&xi| samplers[xi].sample(rng.next_u64())).collect()
            })
            .collect()
    }

    #[test]
    fn encode_block_spans_and_determinism() {
        let dist = InputDist::uniform(2);
        let p = StreamParams::new(6, 2, 2, Scheme::MdInfinite).unwrap();
        let h = [1u64, 0, 1];
        let w1 = encode_block(&p, 9, 1, &h, &dist).unwrap();
        let w2 = encode_block(&p, 9, 1, &[1, 1, 1], &dist).unwrap();
        // Block 1 depends only on G_1.
        assert_eq!(w1, w2);
        assert_eq!(w1, encode_block(&p, 9, 1, &h, &dist).unwrap());
        // Truncated memory: block 10 ignores G_6.
        let cl = StreamParams::new(6, 2, 2, Scheme::ClTruncated { a: 9, b: 4 }).unwrap();
        let mut h10 = vec![0u64; 10];
        let w = encode_block(&cl, 9, 10, &h10, &dist).unwrap();
        h10[5] = 1; // G_6
        assert_eq!(w, encode_block(&cl, 9, 10, &h10, &dist).unwrap());
        h10[7] = 1; // G_8 is inside the span [7:10]
        assert_ne!(w, encode_block(&cl, 9, 10, &h10, &dist).unwrap());
        assert!(matches!(
            encode_block(&p, 9, 5, &h, &dist),
            Err(CodecError::HistoryTooShort { .. })
        ));
    }

    #[test]
    fn threshold_test_matches_hand_computed_density() {
        // BSC(0.11), n=8, window of two blocks, known outputs: recompute the
        // density directly from the transition matrix.
        let ch = Dmc::bsc(0.11).unwrap();
        let dist = InputDist::uniform(2);
        let params = StreamParams::new(8, 2, 2, Scheme::MdInfinite).unwrap();
        let seed = 4242;
        let history = [1u64, 0];
        let ys = transmit(&params, &ch, &dist, seed, 7, &history);
        let step = DecodeStep {
            targets: (1, 1),
            window: (1, 2),
            multiplier: 2.0,
            kind: StepKind::Sequential,
        };
        // Candidate = the true pair (1, 0).
        let candidate = [1u64, 0];
        let mut density = 0.0;
        for b in 1..=2u64 {
            let x = encode_block(&params, seed, b, &history, &dist).unwrap();
            density += seq_info_density(&ch, &dist, &x, &ys[(b - 1) as usize]).unwrap();
        }
        let expect = density > 2.0 * 2f64.ln();
        let got = threshold_test(
            &params,
            seed,
            &ch,
            &dist,
            &step,
            &BTreeMap::new(),
            &candidate,
            &ys,
        )
        .unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn threshold_test_trivial_channels() {
        // Identity channel with |X| = 3 > M = 2: the correct candidate always
        // clears the threshold; on the useless channel nothing does.
        let dist = InputDist::uniform(3);
        let params = StreamParams::new(4, 2, 1, Scheme::MdInfinite).unwrap();
        let id = Dmc::identity(3).unwrap();
        let history = [1u64];
        let ys = transmit(&params, &id, &dist, 5, 6, &history);
        let step = DecodeStep {
            targets: (1, 1),
            window: (1, 1),
            multiplier: 1.0,
            kind: StepKind::Sequential,
        };
        assert!(threshold_test(&params, 5, &id, &dist, &step, &BTreeMap::new(), &[1], &ys).unwrap());
        assert!(!threshold_test(&params, 5, &id, &dist, &step, &BTreeMap::new(), &[0], &ys).unwrap());

        let useless = Dmc::new(vec![
            vec![0.4, 0.6],
            vec![0.4, 0.6],
        ])
        .unwrap();
        let dist2 = InputDist::uniform(2);
        let ys2 = transmit(&params, &useless, &dist2, 5, 6, &history);
        for cand in [[0u64], [1u64]] {
            assert!(!threshold_test(
                &params,
                5,
                &useless,
                &dist2,
                &step,
                &BTreeMap::new(),
                &cand,
                &ys2
            )
            .unwrap());
        }
    }

    #[test]
    fn decode_step_unique_survivor() {
        let dist = InputDist::uniform(3);
        let id = Dmc::identity(3).unwrap();
        let params = StreamParams::new(4, 2, 1, Scheme::MdInfinite).unwrap();
        let history = [1u64];
        let ys = transmit(&params, &id, &dist, 11, 3, &history);
        let step = DecodeStep {
            targets: (1, 1),
            window: (1, 1),
            multiplier: 1.0,
            kind: StepKind::Sequential,
        };
        let (decision, unique) =
            decode_step(&params, 11, &id, &dist, &step, &BTreeMap::new(), &ys).unwrap();
        assert!(unique);
        assert_eq!(decision, vec![1]);
    }

    #[test]
    fn noiseless_stream_decodes_every_message() {
        let dist = InputDist::uniform(3);
        let id = Dmc::identity(3).unwrap();
        let params = StreamParams::new(4, 2, 2, Scheme::MdInfinite).unwrap();
        let history = [1u64, 0, 1, 1, 0, 1];
        let ys = transmit(&params, &id, &dist, 21, 13, &history);
        let mut dec = StreamDecoder::new(&params, &id, &dist, 21, &ys).unwrap();
        for k in 1..=5u64 {
            let out = dec.decode_message(k, history[(k - 1) as usize]).unwrap();
            assert_eq!(out.kind, OutcomeKind::Correct);
            assert_eq!(out.estimate, Some(history[(k - 1) as usize]));
            assert_eq!(out.delay, 2);
        }
    }

    #[test]
    fn useless_channel_defaults_to_message_zero() {
        let useless = Dmc::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let dist = InputDist::uniform(2);
        let params = StreamParams::new(4, 2, 1, Scheme::MdInfinite).unwrap();
        let history = [1u64, 0];
        let ys = transmit(&params, &useless, &dist, 3, 8, &history);
        let mut dec = StreamDecoder::new(&params, &useless, &dist, 3, &ys).unwrap();
        // Density is identically zero, so no candidate passes and the default
        // (index 0) is declared.
        let out = dec.decode_message(1, history[0]).unwrap();
        assert_eq!(out.estimate, Some(0));
        assert_eq!(out.kind, OutcomeKind::Defaulted);
        let out = dec.decode_message(2, history[1]).unwrap();
        assert_eq!(out.estimate, Some(0));
        assert_eq!(out.kind, OutcomeKind::Correct);
    }

    #[test]
    fn erasure_decoder_erases_on_useless_channel() {
        let useless = Dmc::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let dist = InputDist::uniform(2);
        let params = StreamParams::new(4, 2, 2, Scheme::Erasure { gamma: 0.5 })
            .unwrap()
            .with_rho(0.05)
            .unwrap();
        let history = [1u64, 0, 1];
        let ys = transmit(&params, &useless, &dist, 3, 8, &history);
        let mut dec = StreamDecoder::new(&params, &useless, &dist, 3, &ys).unwrap();
        let out = dec.decode_message(1, history[0]).unwrap();
        assert_eq!(out.kind, OutcomeKind::Erasure);
        assert_eq!(out.estimate, None);
    }

    #[test]
    fn erasure_threshold_raised_by_gamma_n_rho() {
        let params = StreamParams::new(8, 2, 2, Scheme::Erasure { gamma: 0.25 })
            .unwrap()
            .with_rho(0.1)
            .unwrap();
        let ch = Dmc::bsc(0.11).unwrap();
        let dist = InputDist::uniform(2);
        let ys = vec![vec![0usize; 8]; 2];
        let dec = StreamDecoder::new(&params, &ch, &dist, 1, &ys).unwrap();
        let step = DecodeStep {
            targets: (1, 1),
            window: (1, 2),
            multiplier: 2.0,
            kind: StepKind::Sequential,
        };
        let expect = 2.0 * (2f64.ln() + 0.25 * 8.0 * 0.1);
        assert!((dec.threshold(&step) - expect).abs() < 1e-12);
    }

    #[test]
    fn vardelay_resolves_at_t_on_noiseless_channel() {
        let id = Dmc::identity(3).unwrap();
        let dist = InputDist::uniform(3);
        let params = StreamParams::new(4, 2, 2, Scheme::VarDelay { gamma: 0.1, d_max: 16 })
            .unwrap()
            .with_rho(0.05)
            .unwrap();
        let history = [1u64, 0, 1, 0, 1, 1];
        let ys = transmit(&params, &id, &dist, 17, 23, &history);
        let mut dec = StreamDecoder::new(&params, &id, &dist, 17, &ys).unwrap();
        for k in 1..=3u64 {
            let out = dec.decode_vardelay(k, history[(k - 1) as usize]).unwrap();
            assert_eq!(out.kind, OutcomeKind::Correct);
            assert_eq!(out.delay, 2, "delay exactly T on the noiseless channel");
        }
    }

    #[test]
    fn vardelay_never_resolves_on_useless_channel() {
        let useless = Dmc::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let dist = InputDist::uniform(2);
        let params = StreamParams::new(4, 2, 2, Scheme::VarDelay { gamma: 0.3, d_max: 6 })
            .unwrap()
            .with_rho(0.05)
            .unwrap();
        let history = [1u64, 0, 1, 0, 1, 1, 0, 0];
        let ys = transmit(&params, &useless, &dist, 5, 2, &history);
        let mut dec = StreamDecoder::new(&params, &useless, &dist, 5, &ys).unwrap();
        let out = dec.decode_vardelay(1, history[0]).unwrap();
        assert_eq!(out.kind, OutcomeKind::Erasure);
        assert_eq!(out.delay, 6, "erasure reported at d_max");
    }

    #[test]
    fn vardelay_delay_capped_by_stream_end() {
        let useless = Dmc::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let dist = InputDist::uniform(2);
        let params = StreamParams::new(4, 2, 2, Scheme::VarDelay { gamma: 0.3, d_max: 40 })
            .unwrap()
            .with_rho(0.05)
            .unwrap();
        let history = [1u64, 0, 1];
        let ys = transmit(&params, &useless, &dist, 5, 2, &history);
        let mut dec = StreamDecoder::new(&params, &useless, &dist, 5, &ys).unwrap();
        let out = dec.decode_vardelay(2, history[1]).unwrap();
        // Blocks 2..3 give at most delay 2 before the stream ends.
        assert_eq!(out.delay, 2);
        assert_eq!(out.kind, OutcomeKind::Erasure);
    }

    #[test]
    fn decoding_is_reproducible() {
        let ch = Dmc::bsc(0.2).unwrap();
        let dist = InputDist::uniform(2);
        let params = StreamParams::new(4, 2, 2, Scheme::MdInfinite).unwrap();
        let history = [1u64, 0, 1, 1];
        let ys = transmit(&params, &ch, &dist, 77, 78, &history);
        let run = || {
            let mut dec = StreamDecoder::new(&params, &ch, &dist, 77, &ys).unwrap();
            (1..=3u64)
                .map(|k| dec.decode_message(k, history[(k - 1) as usize]).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn widening_the_window_keeps_noiseless_decoding_correct() {
        // On the identity channel the density only grows with extra noiseless
        // blocks, so a larger delay cannot break a correct outcome.
        let id = Dmc::identity(3).unwrap();
        let dist = InputDist::uniform(3);
        let history = [1u64, 0, 0, 1, 1];
        for t in 1..=3u32 {
            let params = StreamParams::new(3, 2, t, Scheme::MdInfinite).unwrap();
            let ys = transmit(&params, &id, &dist, 31, 32, &history);
            let mut dec = StreamDecoder::new(&params, &id, &dist, 31, &ys).unwrap();
            for k in 1..=(history.len() as u64 - t as u64 + 1) {
                let out = dec.decode_message(k, history[(k - 1) as usize]).unwrap();
                assert_eq!(out.kind, OutcomeKind::Correct, "t={t} k={k}");
            }
        }
    }

    #[test]
    fn alternating_noiseless_round_trip_both_parities() {
        // M = 16, r = 1/2: exact alphabet sizes 4 and 64.
        let id = Dmc::identity(3).unwrap();
        let dist = InputDist::uniform(3);
        let params = StreamParams::new(6, 16, 3, Scheme::Alternating { r: 0.5 }).unwrap();
        let mut rng = derive_rng(KeyDomain::Message, 900, &[0]);
        let history: Vec<u64> = (1..=6u64)
            .map(|k| uniform_below(&mut rng, schedule::message_alphabet(&params, k).unwrap()))
            .collect();
        let ys = transmit(&params, &id, &dist, 55, 56, &history);
        let mut dec = StreamDecoder::new(&params, &id, &dist, 55, &ys).unwrap();
        for k in 1..=4u64 {
            let out = dec.decode_message(k, history[(k - 1) as usize]).unwrap();
            assert_eq!(out.kind, OutcomeKind::Correct, "k={k}");
        }
    }

    #[test]
    fn truncated_memory_noiseless_round_trip_across_groups() {
        // Full-history initialization, then two truncation periods; the
        // simultaneous step re-decodes the previous group from its own
        // blocks only.
        let id = Dmc::identity(3).unwrap();
        let dist = InputDist::uniform(3);
        let params = StreamParams::new(6, 2, 2, Scheme::ClTruncated { a: 9, b: 4 }).unwrap();
        let mut rng = derive_rng(KeyDomain::Message, 71, &[]);
        let history: Vec<u64> = (0..22).map(|_| uniform_below(&mut rng, 2)).collect();
        let ys = transmit(&params, &id, &dist, 72, 73, &history);
        let mut dec = StreamDecoder::new(&params, &id, &dist, 72, &ys).unwrap();
        for k in 1..=20u64 {
            let out = dec.decode_message(k, history[(k - 1) as usize]).unwrap();
            assert_eq!(out.kind, OutcomeKind::Correct, "k={k}");
        }
    }

    #[test]
    fn vardelay_requires_matching_scheme() {
        let ch = Dmc::bsc(0.2).unwrap();
        let dist = InputDist::uniform(2);
        let params = StreamParams::new(2, 2, 1, Scheme::MdInfinite).unwrap();
        let ys = transmit(&params, &ch, &dist, 1, 2, &[0, 1]);
        let mut dec = StreamDecoder::new(&params, &ch, &dist, 1, &ys).unwrap();
        assert!(matches!(
            dec.decode_vardelay(1, 0),
            Err(CodecError::SchemeMismatch { .. })
        ));
    }

    #[test]
    fn search_cap_is_enforced() {
        let ch = Dmc::bsc(0.11).unwrap();
        let dist = InputDist::uniform(2);
        let params = StreamParams::new(2, 2, 2, Scheme::MdInfinite).unwrap();
        let history = [0u64; 8];
        let ys = transmit(&params, &ch, &dist, 1, 2, &history);
        let mut dec = StreamDecoder::new(&params, &ch, &dist, 1, &ys)
            .unwrap()
            .with_search_cap(8);
        // Message 7 at T=2: first step window [1:8] has 2^8 = 256 candidates.
        assert!(matches!(
            dec.decode_message(7, 0),
            Err(CodecError::SearchCapExceeded { .. })
        ));
    }

    #[test]
    fn horizon_too_short_is_reported() {
        let ch = Dmc::bsc(0.11).unwrap();
        let dist = InputDist::uniform(2);
        let params = StreamParams::new(2, 2, 3, Scheme::MdInfinite).unwrap();
        let history = [0u64, 1];
        let ys = transmit(&params, &ch, &dist, 1, 2, &history);
        let mut dec = StreamDecoder::new(&params, &ch, &dist, 1, &ys).unwrap();
        assert!(matches!(
            dec.decode_message(1, 0),
            Err(CodecError::HorizonTooShort { needed: 3, have: 2 })
        ));
    }

    /// The pruned search and a plain exhaustive scan agree on survivors.
    #[test]
    fn pruning_does_not_change_survivors() {
        let ch = Dmc::bsc(0.3).unwrap();
        let dist = InputDist::uniform(2);
        let params = StreamParams::new(3, 2, 2, Scheme::MdInfinite).unwrap();
        for seed in 0..40u64 {
            let mut rng = derive_rng(KeyDomain::Message, seed, &[]);
            let history: Vec<u64> = (0..4).map(|_| uniform_below(&mut rng, 2)).collect();
            let ys = transmit(&params, &ch, &dist, seed, seed + 1000, &history);
            let plan = schedule::decode_plan(&params, 3).unwrap();
            let step = &plan[0]; // window [1:4], free messages [1:4]
            let mut dec = StreamDecoder::new(&params, &ch, &dist, seed, &ys).unwrap();
            let fast = dec.scan_step(step, &BTreeMap::new()).unwrap();
            // Exhaustive reference: test every candidate tuple directly.
            let mut slow: Vec<Vec<u64>> = Vec::new();
            for g1 in 0..2u64 {
                let mut found = false;
                for g2 in 0..2u64 {
                    for g3 in 0..2u64 {
                        for g4 in 0..2u64 {
                            if threshold_test(
                                &params,
                                seed,
                                &ch,
                                &dist,
                                step,
                                &BTreeMap::new(),
                                &[g1, g2, g3, g4],
                                &ys,
                            )
                            .unwrap()
                            {
                                found = true;
                            }
                        }
                    }
                }
                if found {
                    slow.push(vec![g1]);
                }
            }
            slow.truncate(2);
            assert_eq!(fast, slow, "seed {seed}");
        }
    }
}
