//! Discrete memoryless channels and single-letter information quantities.
//!
//! Everything here is an exact finite summation over the input/output
//! alphabets; no sampling is involved. Logs are natural, so mutual
//! information and capacity are in nats, variances in nats².

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Row-sum / normalization tolerance for probability vectors.
const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("alphabets too small: |X|={inputs}, |Y|={outputs} (need at least 2 each)")]
    AlphabetTooSmall { inputs: usize, outputs: usize },
    #[error("transition matrix has {rows} rows, expected {expected}")]
    RowCountMismatch { rows: usize, expected: usize },
    #[error("row {row} has {cols} entries, expected {expected}")]
    ColCountMismatch { row: usize, cols: usize, expected: usize },
    #[error("entry W({col}|{row}) = {value} outside [0,1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    #[error("row {row} sums to {sum}, not 1 within 1e-12")]
    RowNotStochastic { row: usize, sum: f64 },
    #[error("probability vector has {len} entries, expected {expected}")]
    DistLengthMismatch { len: usize, expected: usize },
    #[error("probability p[{index}] = {value} is negative")]
    NegativeProbability { index: usize, value: f64 },
    #[error("probability vector sums to {sum}, not 1 within 1e-12")]
    DistNotNormalized { sum: f64 },
    #[error("output symbol {y} is unreachable under the given input distribution")]
    UnreachableOutput { y: usize },
    #[error("symbol index out of range: {what} = {index}, alphabet size {size}")]
    SymbolOutOfRange { what: &'static str, index: usize, size: usize },
    #[error("sequence lengths differ: {xs} inputs vs {ys} outputs")]
    SequenceLengthMismatch { xs: usize, ys: usize },
    #[error("Blahut-Arimoto did not converge after {iterations} iterations (bracket {bracket:.3e} > tol {tol:.3e})")]
    NoConvergence { iterations: usize, bracket: f64, tol: f64 },
    #[error("invalid tolerance {0}; must be positive")]
    InvalidTolerance(f64),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

/// A discrete memoryless channel: a row-stochastic matrix `W(y|x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dmc {
    inputs: usize,
    outputs: usize,
    w: Vec<Vec<f64>>,
}

impl Dmc {
    /// Builds a channel from its transition matrix, validating that every row
    /// is a probability vector.
    pub fn new(w: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = w.len();
        let outputs = w.first().map_or(0, |r| r.len());
        if inputs < 2 || outputs < 2 {
            return Err(ChannelError::AlphabetTooSmall { inputs, outputs });
        }
        for (i, row) in w.iter().enumerate() {
            if row.len() != outputs {
                return Err(ChannelError::ColCountMismatch {
                    row: i,
                    cols: row.len(),
                    expected: outputs,
                });
            }
            let mut sum = 0.0;
            for (j, &v) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) || v.is_nan() {
                    return Err(ChannelError::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(ChannelError::RowNotStochastic { row: i, sum });
            }
        }
        Ok(Self {
            inputs,
            outputs,
            w,
        })
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Binary erasure channel with erasure probability `e`. Output alphabet
    /// is {0, 1, erasure}.
    pub fn bec(e: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - e, 0.0, e], vec![0.0, 1.0 - e, e]])
    }

    /// Noiseless identity channel on `k` symbols.
    pub fn identity(k: usize) -> Result<Self> {
        let w = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(w)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    /// Transition probability `W(y|x)`.
    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.w[x][y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.w[x]
    }

    /// Output distribution `PW(y) = Σ_x P(x) W(y|x)`.
    pub fn output_dist(&self, p: &InputDist) -> Vec<f64> {
        let mut pw = vec![0.0; self.outputs];
        for (x, row) in self.w.iter().enumerate() {
            let px = p.prob(x);
            if px == 0.0 {
                continue;
            }
            for (y, &wyx) in row.iter().enumerate() {
                pw[y] += px * wyx;
            }
        }
        pw
    }
}

/// A probability distribution over the channel input alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDist {
    p: Vec<f64>,
}

impl InputDist {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        for (i, &v) in p.iter().enumerate() {
            if v < 0.0 || v.is_nan() {
                return Err(ChannelError::NegativeProbability { index: i, value: v });
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(ChannelError::DistNotNormalized { sum });
        }
        Ok(Self { p })
    }

    pub fn uniform(k: usize) -> Self {
        Self {
            p: vec![1.0 / k as f64; k],
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn prob(&self, x: usize) -> f64 {
        self.p[x]
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }
}

/// Mutual information and the two information variances at a fixed input
/// distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoMeasures {
    /// `I(P,W) = E[i(X;Y)]`, nats.
    pub mutual_info: f64,
    /// Unconditional information variance `U(P,W) = Var[i(X;Y)]`, nats².
    pub u_var: f64,
    /// Conditional information variance `V(P,W) = E[Var[i(X;Y)|X]]`, nats².
    pub v_var: f64,
}

/// Result of the capacity computation: the fixed-point input distribution and
/// its information quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub p_star: InputDist,
    /// Converged mutual information, nats. Lies inside the final bracket.
    pub capacity: f64,
    /// `V(P*, W)` at the returned fixed point, nats².
    pub dispersion: f64,
    pub measures: InfoMeasures,
    /// Width of the Arimoto upper/lower capacity bracket at termination.
    pub bracket: f64,
    pub iterations: usize,
}

/// Outcome of [`dispersion`]: carries both variances so callers can check the
/// `U(P*,W) = V(P*,W)` identity that holds at capacity-achieving inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionResult {
    pub v_var: f64,
    pub u_var: f64,
    /// True when `|U - V| ≤ 1e-8`. A false value signals that the supplied
    /// distribution is not capacity-achieving to tolerance.
    pub consistent: bool,
}

/// Information density `i(x;y) = ln( W(y|x) / PW(y) )` in nats.
///
/// Returns `-inf` when `W(y|x) = 0` with `PW(y) > 0`; errors when `PW(y) = 0`
/// (the output symbol is unreachable under `p`, so the density is undefined).
pub fn info_density(ch: &Dmc, p: &InputDist, x: usize, y: usize) -> Result<f64> {
    check_symbols(ch, p, x, y)?;
    let pw_y: f64 = (0..ch.inputs()).map(|x2| p.prob(x2) * ch.prob(x2, y)).sum();
    if pw_y <= 0.0 {
        return Err(ChannelError::UnreachableOutput { y });
    }
    let wyx = ch.prob(x, y);
    if wyx == 0.0 {
        Ok(f64::NEG_INFINITY)
    } else {
        Ok((wyx / pw_y).ln())
    }
}

/// Information density of two equal-length sequences: the sum of the
/// per-symbol densities. A single `-inf` term makes the whole sum `-inf`.
pub fn seq_info_density(ch: &Dmc, p: &InputDist, xs: &[usize], ys: &[usize]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(ChannelError::SequenceLengthMismatch {
            xs: xs.len(),
            ys: ys.len(),
        });
    }
    let mut total = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        total += info_density(ch, p, x, y)?;
    }
    Ok(total)
}

fn check_symbols(ch: &Dmc, p: &InputDist, x: usize, y: usize) -> Result<()> {
    if p.len() != ch.inputs() {
        return Err(ChannelError::DistLengthMismatch {
            len: p.len(),
            expected: ch.inputs(),
        });
    }
    if x >= ch.inputs() {
        return Err(ChannelError::SymbolOutOfRange {
            what: "x",
            index: x,
            size: ch.inputs(),
        });
    }
    if y >= ch.outputs() {
        return Err(ChannelError::SymbolOutOfRange {
            what: "y",
            index: y,
            size: ch.outputs(),
        });
    }
    Ok(())
}

/// Computes `I(P,W)`, `U(P,W)` and `V(P,W)` by exact summation, skipping
/// zero-probability pairs (the 0·log 0 = 0 convention).
pub fn measures(ch: &Dmc, p: &InputDist) -> Result<InfoMeasures> {
    if p.len() != ch.inputs() {
        return Err(ChannelError::DistLengthMismatch {
            len: p.len(),
            expected: ch.inputs(),
        });
    }
    let pw = ch.output_dist(p);
    // First pass: mutual information and per-input conditional means.
    let mut mutual = 0.0;
    let mut cond_mean = vec![0.0; ch.inputs()];
    for x in 0..ch.inputs() {
        let px = p.prob(x);
        if px == 0.0 {
            continue;
        }
        for y in 0..ch.outputs() {
            let wyx = ch.prob(x, y);
            if wyx == 0.0 {
                continue;
            }
            let d = (wyx / pw[y]).ln();
            mutual += px * wyx * d;
            cond_mean[x] += wyx * d;
        }
    }
    // Second pass: the two variances around the respective means.
    let mut u_var = 0.0;
    let mut v_var = 0.0;
    for x in 0..ch.inputs() {
        let px = p.prob(x);
        if px == 0.0 {
            continue;
        }
        for y in 0..ch.outputs() {
            let wyx = ch.prob(x, y);
            if wyx == 0.0 {
                continue;
            }
            let d = (wyx / pw[y]).ln();
            u_var += px * wyx * (d - mutual) * (d - mutual);
            v_var += px * wyx * (d - cond_mean[x]) * (d - cond_mean[x]);
        }
    }
    Ok(InfoMeasures {
        mutual_info: mutual,
        u_var: u_var.max(0.0),
        v_var: v_var.max(0.0),
    })
}

/// Default Blahut-Arimoto tolerance on the capacity bracket.
pub const BA_DEFAULT_TOL: f64 = 1e-10;
/// Default Blahut-Arimoto iteration cap.
pub const BA_DEFAULT_MAX_ITER: usize = 100_000;

/// Capacity by Blahut-Arimoto alternating maximization from the uniform
/// initialization.
///
/// Terminates when the Arimoto bracket `max_x D(W(·|x)‖PW) - ln Σ_x p(x)
/// exp{D(W(·|x)‖PW)}` drops to `tol`; the bracket encloses `C`.
pub fn capacity(ch: &Dmc, tol: f64, max_iter: usize) -> Result<CapacityResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(ChannelError::InvalidTolerance(tol));
    }
    let k = ch.inputs();
    let mut p = vec![1.0 / k as f64; k];
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        // c(x) = exp{ D( W(·|x) ‖ PW ) }, computed in log domain.
        let dist = InputDist { p: p.clone() };
        let pw = ch.output_dist(&dist);
        let mut log_c = vec![0.0; k];
        for x in 0..k {
            let mut kl = 0.0;
            for y in 0..ch.outputs() {
                let wyx = ch.prob(x, y);
                if wyx > 0.0 {
                    kl += wyx * (wyx / pw[y]).ln();
                }
            }
            log_c[x] = kl;
        }
        let max_log_c = log_c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weighted: f64 = (0..k)
            .map(|x| p[x] * (log_c[x] - max_log_c).exp())
            .sum();
        lower = max_log_c + weighted.ln();
        upper = max_log_c;
        if upper - lower <= tol {
            let p_star = InputDist { p };
            let m = measures(ch, &p_star)?;
            return Ok(CapacityResult {
                capacity: m.mutual_info.max(0.0),
                dispersion: m.v_var,
                measures: m,
                p_star,
                bracket: upper - lower,
                iterations,
            });
        }
        // Multiplicative update p'(x) ∝ p(x) c(x).
        let norm: f64 = weighted;
        for x in 0..k {
            p[x] *= (log_c[x] - max_log_c).exp() / norm;
        }
    }
    Err(ChannelError::NoConvergence {
        iterations,
        bracket: upper - lower,
        tol,
    })
}

/// Channel dispersion `V(P*, W)` at an (approximately) capacity-achieving
/// input, together with the `U = V` consistency check.
pub fn dispersion(ch: &Dmc, p_star: &InputDist) -> Result<DispersionResult> {
    let m = measures(ch, p_star)?;
    Ok(DispersionResult {
        v_var: m.v_var,
        u_var: m.u_var,
        consistent: (m.u_var - m.v_var).abs() <= 1e-8,
    })
}

/// Binary entropy in nats, with the 0·log 0 = 0 convention.
pub fn binary_entropy(q: f64) -> f64 {
    let term = |t: f64| if t > 0.0 { -t * t.ln() } else { 0.0 };
    term(q) + term(1.0 - q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!(
            (a - b).abs() <= tol,
            "expected {b} within {tol}, got {a} (diff {})",
            (a - b).abs()
        );
    }

    /// All-rows-equal channel: output independent of input.
    fn useless() -> Dmc {
        Dmc::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn dmc_validation() {
        assert!(matches!(
            Dmc::new(vec![vec![1.0]]),
            Err(ChannelError::AlphabetTooSmall { .. })
        ));
        assert!(matches!(
            Dmc::new(vec![vec![0.6, 0.3], vec![0.5, 0.5]]),
            Err(ChannelError::RowNotStochastic { row: 0, .. })
        ));
        assert!(matches!(
            Dmc::new(vec![vec![1.2, -0.2], vec![0.5, 0.5]]),
            Err(ChannelError::EntryOutOfRange { .. })
        ));
        assert!(Dmc::bsc(0.11).is_ok());
    }

    #[test]
    fn input_dist_validation() {
        assert!(matches!(
            InputDist::new(vec![0.4, 0.4]),
            Err(ChannelError::DistNotNormalized { .. })
        ));
        assert!(matches!(
            InputDist::new(vec![1.5, -0.5]),
            Err(ChannelError::NegativeProbability { .. })
        ));
    }

    #[test]
    fn info_density_identity_channel() {
        let ch = Dmc::identity(2).unwrap();
        let p = InputDist::uniform(2);
        // W = 1, PW = 1/2.
        assert_close(info_density(&ch, &p, 0, 0).unwrap(), 2.0f64.ln(), 1e-15);
        // W(1|0) = 0 with PW > 0: negative-infinity sentinel.
        assert_eq!(info_density(&ch, &p, 0, 1).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn info_density_zero_when_w_equals_pw() {
        let ch = useless();
        let p = InputDist::uniform(2);
        assert_close(info_density(&ch, &p, 0, 0).unwrap(), 0.0, 1e-15);
    }

    #[test]
    fn info_density_bsc_011() {
        let ch = Dmc::bsc(0.11).unwrap();
        let p = InputDist::uniform(2);
        assert_close(
            info_density(&ch, &p, 0, 0).unwrap(),
            (0.89f64 / 0.5).ln(),
            1e-15,
        );
        assert_close(info_density(&ch, &p, 0, 0).unwrap(), 1.78f64.ln(), 1e-12);
    }

    #[test]
    fn info_density_unreachable_output() {
        // Point mass on input 0 of the identity channel: output 1 unreachable.
        let ch = Dmc::identity(2).unwrap();
        let p = InputDist::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            info_density(&ch, &p, 0, 1),
            Err(ChannelError::UnreachableOutput { y: 1 })
        ));
    }

    #[test]
    fn seq_info_density_basics() {
        let ch = Dmc::identity(2).unwrap();
        let p = InputDist::uniform(2);
        assert_eq!(seq_info_density(&ch, &p, &[], &[]).unwrap(), 0.0);
        let one = seq_info_density(&ch, &p, &[1], &[1]).unwrap();
        assert_close(one, info_density(&ch, &p, 1, 1).unwrap(), 0.0);
        let xs = vec![0, 1, 0, 1, 1];
        let five = seq_info_density(&ch, &p, &xs, &xs).unwrap();
        assert_close(five, 5.0 * 2.0f64.ln(), 1e-12);
        assert!(matches!(
            seq_info_density(&ch, &p, &[0], &[0, 1]),
            Err(ChannelError::SequenceLengthMismatch { .. })
        ));
    }

    #[test]
    fn seq_info_density_is_additive_over_concatenation() {
        let ch = Dmc::bsc(0.11).unwrap();
        let p = InputDist::uniform(2);
        let (a, b) = (vec![0, 1, 1], vec![1, 1, 0]);
        let (c, d) = (vec![0, 0], vec![0, 1]);
        let whole = seq_info_density(
            &ch,
            &p,
            &[a.clone(), c.clone()].concat(),
            &[b.clone(), d.clone()].concat(),
        )
        .unwrap();
        let parts =
            seq_info_density(&ch, &p, &a, &b).unwrap() + seq_info_density(&ch, &p, &c, &d).unwrap();
        assert_eq!(whole, parts);
    }

    #[test]
    fn measures_useless_channel() {
        let m = measures(&useless(), &InputDist::uniform(2)).unwrap();
        assert_close(m.mutual_info, 0.0, 1e-15);
        assert_close(m.v_var, 0.0, 1e-15);
    }

    #[test]
    fn measures_identity_channel() {
        let m = measures(&Dmc::identity(2).unwrap(), &InputDist::uniform(2)).unwrap();
        assert_close(m.mutual_info, 2.0f64.ln(), 1e-15);
        // i is constant on the support, so both variances vanish.
        assert_close(m.u_var, 0.0, 1e-15);
        assert_close(m.v_var, 0.0, 1e-15);
    }

    #[test]
    fn measures_bsc_closed_forms() {
        let q: f64 = 0.11;
        let m = measures(&Dmc::bsc(q).unwrap(), &InputDist::uniform(2)).unwrap();
        let expect_i = 2.0f64.ln() - binary_entropy(q);
        let expect_v = q * (1.0 - q) * ((1.0 - q) / q).ln().powi(2);
        assert_close(m.mutual_info, expect_i, 1e-14);
        assert_close(m.v_var, expect_v, 1e-14);
        // For the BSC at uniform input, U = V.
        assert_close(m.u_var, m.v_var, 1e-14);
    }

    #[test]
    fn mutual_info_consistent_with_density_expectation() {
        for ch in [Dmc::bsc(0.2).unwrap(), Dmc::bec(0.3).unwrap()] {
            let p = InputDist::new(vec![0.3, 0.7]).unwrap();
            let m = measures(&ch, &p).unwrap();
            let mut expect = 0.0;
            for x in 0..ch.inputs() {
                for y in 0..ch.outputs() {
                    let w = p.prob(x) * ch.prob(x, y);
                    if w > 0.0 {
                        expect += w * info_density(&ch, &p, x, y).unwrap();
                    }
                }
            }
            assert_close(m.mutual_info, expect, 1e-12);
        }
    }

    #[test]
    fn capacity_useless_is_zero() {
        let r = capacity(&useless(), 1e-10, 1000).unwrap();
        assert_close(r.capacity, 0.0, 1e-12);
        assert!(r.bracket <= 1e-10);
    }

    #[test]
    fn capacity_identity_three() {
        let r = capacity(&Dmc::identity(3).unwrap(), 1e-10, 1000).unwrap();
        assert_close(r.capacity, 3.0f64.ln(), 1e-10);
        for x in 0..3 {
            assert_close(r.p_star.prob(x), 1.0 / 3.0, 1e-9);
        }
    }

    #[test]
    fn capacity_bsc_closed_forms() {
        for q in [0.05, 0.11, 0.2, 0.3] {
            let r = capacity(&Dmc::bsc(q).unwrap(), 1e-10, 100_000).unwrap();
            assert_close(r.capacity, 2.0f64.ln() - binary_entropy(q), 1e-10);
            assert!(r.bracket <= 1e-10);
            let d = dispersion(&Dmc::bsc(q).unwrap(), &r.p_star).unwrap();
            assert!(d.consistent, "U={} V={}", d.u_var, d.v_var);
        }
    }

    #[test]
    fn capacity_bec() {
        let e = 0.3;
        let r = capacity(&Dmc::bec(e).unwrap(), 1e-10, 100_000).unwrap();
        assert_close(r.capacity, (1.0 - e) * 2.0f64.ln(), 1e-10);
    }

    /// Independent oracle for an asymmetric channel: golden-section search of
    /// I((p,1-p), W) over the binary input simplex.
    #[test]
    fn capacity_z_channel_matches_scalar_search() {
        let a = 0.3; // P(y=0 | x=1)
        let ch = Dmc::new(vec![vec![1.0, 0.0], vec![a, 1.0 - a]]).unwrap();
        let mi = |p1: f64| {
            let p = InputDist::new(vec![1.0 - p1, p1]).unwrap();
            measures(&ch, &p).unwrap().mutual_info
        };
        let (mut lo, mut hi) = (1e-9, 1.0 - 1e-9);
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if mi(m1) < mi(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        let oracle = mi(0.5 * (lo + hi));
        let r = capacity(&ch, 1e-12, 200_000).unwrap();
        assert_close(r.capacity, oracle, 1e-9);
        let d = dispersion(&ch, &r.p_star).unwrap();
        assert!(d.consistent, "U={} V={}", d.u_var, d.v_var);
    }

    #[test]
    fn capacity_rejects_bad_tolerance() {
        assert!(matches!(
            capacity(&useless(), 0.0, 10),
            Err(ChannelError::InvalidTolerance(_))
        ));
    }

    #[test]
    fn capacity_reports_bracket_on_non_convergence() {
        // An asymmetric channel cannot reach a 1e-15 bracket in one sweep.
        let ch = Dmc::new(vec![vec![1.0, 0.0], vec![0.3, 0.7]]).unwrap();
        match capacity(&ch, 1e-15, 1) {
            Err(ChannelError::NoConvergence { iterations, bracket, .. }) => {
                assert_eq!(iterations, 1);
                assert!(bracket > 1e-15);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn dispersion_trivial_channels() {
        let u = InputDist::uniform(2);
        assert_close(dispersion(&useless(), &u).unwrap().v_var, 0.0, 1e-15);
        assert_close(
            dispersion(&Dmc::identity(2).unwrap(), &u).unwrap().v_var,
            0.0,
            1e-15,
        );
    }

    #[test]
    fn dispersion_bsc_011() {
        let d = dispersion(&Dmc::bsc(0.11).unwrap(), &InputDist::uniform(2)).unwrap();
        let expect = 0.11 * 0.89 * (0.89f64 / 0.11).ln().powi(2);
        assert_close(d.v_var, expect, 1e-12);
        assert_close(expect, 0.4279, 5e-4);
        assert!(d.consistent);
    }

    #[test]
    fn dispersion_flags_non_capacity_achieving_input() {
        // Heavily skewed input on a BSC: U != V there.
        let d = dispersion(
            &Dmc::bsc(0.11).unwrap(),
            &InputDist::new(vec![0.9, 0.1]).unwrap(),
        )
        .unwrap();
        assert!(!d.consistent);
    }

    #[test]
    fn dispersion_invariant_under_relabeling() {
        // Permute inputs and outputs of an asymmetric ternary channel.
        let rows = vec![
            vec![0.7, 0.2, 0.1],
            vec![0.1, 0.8, 0.1],
            vec![0.25, 0.25, 0.5],
        ];
        let ch = Dmc::new(rows.clone()).unwrap();
        let perm_in = [2usize, 0, 1];
        let perm_out = [1usize, 2, 0];
        let permuted: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| rows[perm_in[i]][perm_out[j]]).collect())
            .collect();
        let ch2 = Dmc::new(permuted).unwrap();
        let r1 = capacity(&ch, 1e-12, 200_000).unwrap();
        let r2 = capacity(&ch2, 1e-12, 200_000).unwrap();
        assert_close(r1.capacity, r2.capacity, 1e-10);
        assert_close(r1.dispersion, r2.dispersion, 1e-8);
    }
}
