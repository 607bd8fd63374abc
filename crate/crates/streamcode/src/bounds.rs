//! Closed-form error-probability bounds.
//!
//! Gaussian tail sums and the constant that collapses them to a single Q
//! term, the non-asymptotic moderate-deviations bound
//! `exp{-n(ε²/2σ² - ε³K/6σ⁶)}`, the Chernoff/Cramér bound `exp{-n I(ε)}`
//! with `I(ε) = sup_{s≥0} {sε - h(s)}`, the geometric-series ensemble bounds
//! for each decoder variant, and the exponent targets they certify. The
//! driving object is the cumulant generating function `h(s)` of the centered
//! information density, which is entire for finite alphabets, so all
//! derivatives are computed analytically from the finite support.

use crate::channel::{measures, Dmc, InputDist};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("support probabilities sum to {0}, not 1 within 1e-12")]
    SupportNotNormalized(f64),
    #[error("support mean is {0}, not 0 within 1e-12")]
    SupportNotCentered(f64),
    #[error("degenerate summand: variance {0} (moderate-deviations machinery needs σ² > 0)")]
    DegenerateVariance(f64),
    #[error("empty support")]
    EmptySupport,
    #[error("invalid epsilon {0}; must be positive")]
    InvalidEpsilon(f64),
    #[error("invalid parameter {name} = {value}: {constraint}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
}

pub type Result<T> = std::result::Result<T, BoundsError>;

/// Gaussian tail `Q(x) = 1 - Φ(x)`, via the complementary error function.
pub fn q_func(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Truncation policy for [`q_sum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QSumTerms {
    /// Truncate once the certified geometric remainder drops below 1e-12.
    Auto,
    /// Sum exactly this many terms.
    Fixed(usize),
}

/// Remainder budget for the auto-truncated Q sum.
const Q_SUM_REMAINDER: f64 = 1e-12;

/// `Σ_{j=T}^∞ Q(μ√j)`.
///
/// The tail from index `J` onward is certified by `Q(x) ≤ φ(x)/x` and the
/// geometric series with ratio `exp{-μ²/2}`:
/// `Σ_{j≥J} Q(μ√j) ≤ φ(μ√J)/(μ√J) · 1/(1 - exp{-μ²/2})`.
pub fn q_sum(mu: f64, t: u32, terms: QSumTerms) -> Result<f64> {
    if mu.is_nan() || mu <= 0.0 {
        return Err(BoundsError::InvalidParam {
            name: "mu",
            value: mu,
            constraint: "must be positive",
        });
    }
    if t < 1 {
        return Err(BoundsError::InvalidParam {
            name: "t",
            value: t as f64,
            constraint: "must be at least 1",
        });
    }
    let mut sum = 0.0;
    match terms {
        QSumTerms::Fixed(count) => {
            for i in 0..count {
                sum += q_func(mu * ((t as u64 + i as u64) as f64).sqrt());
            }
        }
        QSumTerms::Auto => {
            // The leading term is always included; later terms stop once the
            // certified remainder falls below the budget.
            let ratio_denom = 1.0 - (-mu * mu / 2.0).exp();
            let mut j = t as u64;
            loop {
                sum += q_func(mu * (j as f64).sqrt());
                j += 1;
                if q_tail_certificate(mu, j, ratio_denom) < Q_SUM_REMAINDER {
                    break;
                }
            }
        }
    }
    Ok(sum)
}

/// Upper bound on `Σ_{j≥from} Q(μ√j)`.
fn q_tail_certificate(mu: f64, from: u64, ratio_denom: f64) -> f64 {
    let x = mu * (from as f64).sqrt();
    let phi = (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    phi / x / ratio_denom
}

/// The constant `c_{L,V,T} = (1 + μ²T)/(μ²T) · 1/(1 - exp{-μ²/2})` with
/// `μ = L/√V`, which multiplies `Q(μ√T)` to dominate the whole Q sum and
/// tends to 1 as `μ` grows.
pub fn c_llt(mu: f64, t: u32) -> Result<f64> {
    if mu.is_nan() || mu <= 0.0 {
        return Err(BoundsError::InvalidParam {
            name: "mu",
            value: mu,
            constraint: "must be positive",
        });
    }
    if t < 1 {
        return Err(BoundsError::InvalidParam {
            name: "t",
            value: t as f64,
            constraint: "must be at least 1",
        });
    }
    let m2t = mu * mu * t as f64;
    Ok((1.0 + m2t) / m2t / (1.0 - (-mu * mu / 2.0).exp()))
}

/// Finite-support law of a centered i.i.d. summand `Z` with its variance and
/// the third-derivative bound `K = max_{s∈[0,1]} |h'''(s)|` of its cumulant
/// generating function `h(s) = ln E[exp{sZ}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgfModel {
    support: Vec<(f64, f64)>,
    sigma2: f64,
    k_max: f64,
}

/// Grid step for the `|h'''|` maximization over `s ∈ [0,1]`.
const K_GRID_STEP: f64 = 1e-4;

impl CgfModel {
    /// Builds a model from explicit `(value, probability)` pairs.
    pub fn from_support(support: Vec<(f64, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(BoundsError::EmptySupport);
        }
        let total: f64 = support.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(BoundsError::SupportNotNormalized(total));
        }
        let mean: f64 = support.iter().map(|&(z, p)| z * p).sum();
        if mean.abs() > 1e-12 {
            return Err(BoundsError::SupportNotCentered(mean));
        }
        let sigma2: f64 = support.iter().map(|&(z, p)| p * z * z).sum::<f64>() - mean * mean;
        if sigma2 <= 1e-15 {
            return Err(BoundsError::DegenerateVariance(sigma2));
        }
        let mut model = Self {
            support,
            sigma2,
            k_max: 0.0,
        };
        model.k_max = model.max_abs_h3();
        Ok(model)
    }

    /// Builds the law of `Z = i(X;Y) - I(P,W)` for the given channel and
    /// input distribution. Equal density values are merged, so the support
    /// size is the number of distinct density values.
    pub fn from_channel(ch: &Dmc, p: &InputDist) -> Result<Self> {
        let m = measures(ch, p)?;
        let pw = ch.output_dist(p);
        let mut by_value: Vec<(f64, f64)> = Vec::new();
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
                let z = (wyx / pw[y]).ln() - m.mutual_info;
                let prob = px * wyx;
                match by_value
                    .iter_mut()
                    .find(|(v, _)| v.to_bits() == z.to_bits())
                {
                    Some((_, q)) => *q += prob,
                    None => by_value.push((z, prob)),
                }
            }
        }
        // Re-center exactly: the accumulated mean can drift a few ulps from 0.
        let mean: f64 = by_value.iter().map(|&(z, p)| z * p).sum();
        for (z, _) in by_value.iter_mut() {
            *z -= mean;
        }
        Self::from_support(by_value)
    }

    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    /// Variance of `Z` (equals `U(P,W)` when built from a channel).
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// `K = max_{s∈[0,1]} |h'''(s)|`.
    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn max_support(&self) -> f64 {
        self.support
            .iter()
            .map(|&(z, _)| z)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Cumulant generating function `h(s) = ln Σ_i p_i exp{s z_i}`.
    pub fn h(&self, s: f64) -> f64 {
        self.moments(s).0.ln()
    }

    /// Third derivative of `h`, from the exact exponential moments.
    pub fn h3(&self, s: f64) -> f64 {
        let (m0, m1, m2, m3) = self.moments(s);
        let r1 = m1 / m0;
        let r2 = m2 / m0;
        let r3 = m3 / m0;
        r3 - 3.0 * r2 * r1 + 2.0 * r1 * r1 * r1
    }

    fn moments(&self, s: f64) -> (f64, f64, f64, f64) {
        let (mut m0, mut m1, mut m2, mut m3) = (0.0, 0.0, 0.0, 0.0);
        for &(z, p) in &self.support {
            let e = p * (s * z).exp();
            m0 += e;
            m1 += e * z;
            m2 += e * z * z;
            m3 += e * z * z * z;
        }
        (m0, m1, m2, m3)
    }

    fn h1(&self, s: f64) -> f64 {
        let (m0, m1, _, _) = self.moments(s);
        m1 / m0
    }

    /// Dense grid over `[0,1]` plus golden-section refinement around the best
    /// grid point.
    fn max_abs_h3(&self) -> f64 {
        let steps = (1.0 / K_GRID_STEP) as usize;
        let mut best_s = 0.0;
        let mut best = self.h3(0.0).abs();
        for i in 1..=steps {
            let s = i as f64 * K_GRID_STEP;
            let v = self.h3(s).abs();
            if v > best {
                best = v;
                best_s = s;
            }
        }
        let mut lo = (best_s - K_GRID_STEP).max(0.0);
        let mut hi = (best_s + K_GRID_STEP).min(1.0);
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if self.h3(m1).abs() < self.h3(m2).abs() {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        best.max(self.h3(0.5 * (lo + hi)).abs())
    }

    /// Classical Berry-Esseen constant `0.56 ρ₃/σ³` from the third absolute
    /// moment of `Z`.
    pub fn berry_esseen_tau(&self) -> f64 {
        let rho3: f64 = self.support.iter().map(|&(z, p)| p * z.abs().powi(3)).sum();
        0.56 * rho3 / self.sigma2.powf(1.5)
    }
}

/// Moderate-deviations upper bound `exp{-n(ε²/2σ² - ε³K/6σ⁶)}`, clamped to 1.
///
/// Valid as a tail bound on `Pr(Σ Z_l / n ≥ ε_n)` for `n` large enough that
/// the Chernoff parameter `ε/σ²` keeps `|h'''|` within `K`.
pub fn md_bound(model: &CgfModel, n: u64, eps_n: f64) -> f64 {
    let s2 = model.sigma2();
    let exponent = eps_n * eps_n / (2.0 * s2) - eps_n.powi(3) * model.k_max() / (6.0 * s2.powi(3));
    (-(n as f64) * exponent).exp().min(1.0)
}

/// Cramér/Chernoff bound `exp{-n I(ε)}` with the rate function maximized by
/// ternary search on the concave objective `sε - h(s)` over `s ≥ 0`.
///
/// Above the top of the support the rate function is infinite and the bound
/// is 0; at the top exactly, `I(ε) = -ln P(Z = max)` (the supremum is
/// approached as `s → ∞`), which reproduces the exact point mass.
pub fn cramer_bound(model: &CgfModel, n: u64, eps: f64) -> Result<f64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(BoundsError::InvalidEpsilon(eps));
    }
    let top = model.max_support();
    if eps > top {
        return Ok(0.0);
    }
    if eps == top {
        let p_top: f64 = model
            .support()
            .iter()
            .filter(|&&(z, _)| z == top)
            .map(|&(_, p)| p)
            .sum();
        return Ok((n as f64 * p_top.ln()).exp());
    }
    let rate = rate_function(model, eps);
    if rate <= 0.0 {
        return Err(BoundsError::InvalidParam {
            name: "rate",
            value: rate,
            constraint: "rate function must be positive for 0 < eps < max support",
        });
    }
    Ok((-(n as f64) * rate).exp())
}

/// `I(ε) = sup_{s≥0} {sε - h(s)}` for `0 < ε <` max support.
pub fn rate_function(model: &CgfModel, eps: f64) -> f64 {
    // Expand the bracket until h'(s) ≥ ε; h' increases to max support > ε.
    let mut hi = 1.0;
    while model.h1(hi) < eps {
        hi *= 2.0;
        if hi > 1e9 {
            break;
        }
    }
    let mut lo = 0.0;
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let objective = |s: f64| s * eps - model.h(s);
    while hi - lo > 1e-12 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if objective(m1) < objective(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    objective(0.5 * (lo + hi))
}

/// Analysis constants with no canonical numeric values, exposed as inputs to
/// the bound evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    /// Moderate-deviations slack constant (basic/erasure geometric bounds).
    pub tau: f64,
    /// Berry-Esseen constants of the central-limit analysis.
    pub tau1: f64,
    pub tau2: f64,
    /// Cramér constant of the alternating-rate analysis.
    pub tau_prime: f64,
    /// Splitting parameter in (0,1).
    pub lambda: f64,
    /// Erasure threshold tuning in (0,1).
    pub gamma: f64,
    /// `μ = L/√V`.
    pub mu: f64,
}

impl BoundParams {
    pub fn new(
        tau: f64,
        tau1: f64,
        tau2: f64,
        tau_prime: f64,
        lambda: f64,
        gamma: f64,
        mu: f64,
    ) -> Result<Self> {
        let p = Self {
            tau,
            tau1,
            tau2,
            tau_prime,
            lambda,
            gamma,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(BoundsError::InvalidParam {
                name: "lambda",
                value: self.lambda,
                constraint: "must lie strictly in (0,1)",
            });
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(BoundsError::InvalidParam {
                name: "gamma",
                value: self.gamma,
                constraint: "must lie strictly in (0,1)",
            });
        }
        for (name, v) in [
            ("tau", self.tau),
            ("tau1", self.tau1),
            ("tau2", self.tau2),
            ("tau_prime", self.tau_prime),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(BoundsError::InvalidParam {
                    name,
                    value: v,
                    constraint: "must be non-negative",
                });
            }
        }
        Ok(())
    }
}

impl Default for BoundParams {
    fn default() -> Self {
        Self {
            tau: 0.0,
            tau1: 0.0,
            tau2: 0.0,
            tau_prime: 0.0,
            lambda: 0.9,
            gamma: 0.5,
            mu: 1.0,
        }
    }
}

/// Which decoder variant an exponent target refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentVariant {
    Basic,
    ErasureTotal,
    ErasureUndetected,
    VarDelay,
    AltOdd,
    AltEven,
}

/// Asymptotic upper bound on `ln ε` scaled to the finite setting: the
/// asymptotic exponents `-T/(2V)·nρ²` (basic), `-T(1-γ)²/(2V)·nρ²` and
/// `-Tγ·nρ` (erasure total/undetected), `-T·nρ` (variable delay), and the
/// `(T±1)` split for alternating rates (both `T` when `T` is even).
pub fn md_exponent_target(
    v: f64,
    t: u32,
    variant: ExponentVariant,
    gamma: f64,
    n: u64,
    rho_n: f64,
) -> Result<f64> {
    if v.is_nan() || v <= 0.0 {
        return Err(BoundsError::InvalidParam {
            name: "v",
            value: v,
            constraint: "dispersion must be positive",
        });
    }
    let tf = t as f64;
    let nf = n as f64;
    let needs_gamma = matches!(
        variant,
        ExponentVariant::ErasureTotal | ExponentVariant::ErasureUndetected
    );
    if needs_gamma && !(gamma > 0.0 && gamma < 1.0) {
        return Err(BoundsError::InvalidParam {
            name: "gamma",
            value: gamma,
            constraint: "must lie strictly in (0,1)",
        });
    }
    Ok(match variant {
        ExponentVariant::Basic => -tf / (2.0 * v) * nf * rho_n * rho_n,
        ExponentVariant::ErasureTotal => {
            -tf * (1.0 - gamma) * (1.0 - gamma) / (2.0 * v) * nf * rho_n * rho_n
        }
        ExponentVariant::ErasureUndetected => -tf * gamma * nf * rho_n,
        ExponentVariant::VarDelay => -tf * nf * rho_n,
        ExponentVariant::AltOdd => {
            let eff = if t % 2 == 1 { tf + 1.0 } else { tf };
            -eff / (2.0 * v) * nf * rho_n * rho_n
        }
        ExponentVariant::AltEven => {
            let eff = if t % 2 == 1 { tf - 1.0 } else { tf };
            -eff / (2.0 * v) * nf * rho_n * rho_n
        }
    })
}

/// Two-geometric-series ensemble bound on the error probability of the basic
/// scheme:
/// `exp{-Tnρ²λ²(1/2V - λρτ)}/(1 - exp{-nρ²λ²(1/2V - λρτ)})
///  + exp{-Tn(1-λ)ρ}/(1 - exp{-n(1-λ)ρ})`.
///
/// Reported as 1 (vacuous) when either geometric ratio reaches 1.
pub fn finite_md_rhs(v: f64, t: u32, n: u64, rho_n: f64, params: &BoundParams) -> Result<f64> {
    params.validate()?;
    if v.is_nan() || v <= 0.0 {
        return Err(BoundsError::InvalidParam {
            name: "v",
            value: v,
            constraint: "dispersion must be positive",
        });
    }
    let nf = n as f64;
    let l = params.lambda;
    let rate1 = nf * rho_n * rho_n * l * l * (1.0 / (2.0 * v) - l * rho_n * params.tau);
    let rate2 = nf * (1.0 - l) * rho_n;
    Ok(two_geometric(t, rate1, rate2))
}

/// Ensemble bound on the total error probability of the erasure-option
/// decoder (the `(1-γ)` moderate-deviations term plus the `γ` threshold
/// excess term).
pub fn erasure_total_rhs(
    v: f64,
    t: u32,
    n: u64,
    rho_n: f64,
    gamma: f64,
    tau: f64,
) -> Result<f64> {
    if v.is_nan() || v <= 0.0 {
        return Err(BoundsError::InvalidParam {
            name: "v",
            value: v,
            constraint: "dispersion must be positive",
        });
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(BoundsError::InvalidParam {
            name: "gamma",
            value: gamma,
            constraint: "must lie strictly in (0,1)",
        });
    }
    let nf = n as f64;
    let g1 = 1.0 - gamma;
    let rate1 = nf * rho_n * rho_n * g1 * g1 * (1.0 / (2.0 * v) - g1 * rho_n * tau);
    let rate2 = nf * gamma * rho_n;
    Ok(two_geometric(t, rate1, rate2))
}

/// Ensemble bound on the undetected error probability of the erasure-option
/// decoder: `exp{-Tnγρ}/(1 - exp{-nγρ})`.
pub fn erasure_undetected_rhs(t: u32, n: u64, rho_n: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(BoundsError::InvalidParam {
            name: "gamma",
            value: gamma,
            constraint: "must lie strictly in (0,1)",
        });
    }
    let rate = n as f64 * gamma * rho_n;
    if rate <= 0.0 {
        return Ok(1.0);
    }
    Ok(((-(t as f64) * rate).exp() / (1.0 - (-rate).exp())).min(1.0))
}

/// Ensemble bound on the variable-delay error probability: the undetected
/// bound summed over delays `d ≥ T`, i.e. `exp{-Tnγρ}/(1 - exp{-nγρ})²`.
pub fn vardelay_rhs(t: u32, n: u64, rho_n: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(BoundsError::InvalidParam {
            name: "gamma",
            value: gamma,
            constraint: "must lie strictly in (0,1)",
        });
    }
    let rate = n as f64 * gamma * rho_n;
    if rate <= 0.0 {
        return Ok(1.0);
    }
    let denom = 1.0 - (-rate).exp();
    Ok(((-(t as f64) * rate).exp() / (denom * denom)).min(1.0))
}

fn two_geometric(t: u32, rate1: f64, rate2: f64) -> f64 {
    if rate1 <= 0.0 || rate2 <= 0.0 {
        return 1.0;
    }
    let tf = t as f64;
    let term1 = (-tf * rate1).exp() / (1.0 - (-rate1).exp());
    let term2 = (-tf * rate2).exp() / (1.0 - (-rate2).exp());
    term1 + term2
}

/// For `f(j) = 1/√j`: returns `(Σ_{j=a}^b f(j), F(b) - F(a-1))` with
/// `F(x) = 2√x`. The sum never exceeds the integral expression.
pub fn sum_le_integral_check(a: u64, b: u64) -> Result<(f64, f64)> {
    if a < 1 || a > b {
        return Err(BoundsError::InvalidParam {
            name: "a",
            value: a as f64,
            constraint: "requires 1 <= a <= b",
        });
    }
    let lhs: f64 = (a..=b).map(|j| 1.0 / (j as f64).sqrt()).sum();
    let rhs = 2.0 * (b as f64).sqrt() - 2.0 * ((a - 1) as f64).sqrt();
    Ok((lhs, rhs))
}
