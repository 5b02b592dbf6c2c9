//! Random processes and probability laws: market factor, obsolescence,
//! two-component Weibull reliability, injection error, and seeded streams.

use libm::erfc;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scenario::{RelParams, ScenarioParams};

/// Identifies one independent random stream: `(master_seed, experiment, replicate)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub experiment_index: u64,
    pub replicate_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, experiment_index: u64, replicate_index: u64) -> Self {
        RngStream {
            master_seed,
            experiment_index,
            replicate_index,
        }
    }

    /// ChaCha8 keyed by (seed, experiment) on stream `replicate`.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.experiment_index.to_le_bytes());
        key[16..24].copy_from_slice(b"satarch1");
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.replicate_index);
        rng
    }
}

/// Current market factor. Starts at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketState {
    pub phi_mar: f64,
    pub step: usize,
}

impl Default for MarketState {
    fn default() -> Self {
        MarketState { phi_mar: 1.0, step: 0 }
    }
}

impl MarketState {
    /// Factor applied to revenue; the raw state may wander below zero under
    /// the additive update, revenue never does.
    pub fn revenue_factor(&self) -> f64 {
        self.phi_mar.max(0.0)
    }
}

/// Advances the market one step with the additive update
/// `φ(t+1) = φ(t) + μΔT + σε√ΔT`, or its multiplicative variant.
pub fn market_step<R: Rng + ?Sized>(
    s: MarketState,
    dt_yr: f64,
    mu_mar: f64,
    sigma_mar: f64,
    multiplicative: bool,
    rng: &mut R,
) -> MarketState {
    let eps: f64 = if sigma_mar > 0.0 {
        rng.sample(StandardNormal)
    } else {
        0.0
    };
    let increment = mu_mar * dt_yr + sigma_mar * eps * dt_yr.sqrt();
    let phi_mar = if multiplicative {
        s.phi_mar * (1.0 + increment)
    } else {
        s.phi_mar + increment
    };
    MarketState {
        phi_mar,
        step: s.step + 1,
    }
}

/// Expected market factor `n` steps ahead relative to today's level, as used
/// by the operator's forecasts (1 + μnΔT for the additive process).
pub fn expected_market_growth(n: usize, p: &ScenarioParams) -> f64 {
    if p.market_multiplicative {
        (1.0 + p.mu_mar * p.dt_yr).powi(n as i32)
    } else {
        1.0 + p.mu_mar * n as f64 * p.dt_yr
    }
}

/// Gaussian decay of revenue with technology age.
pub fn obsolescence_factor(t: usize, t_tech: usize, dt_yr: f64, theta_obs: f64) -> f64 {
    let age = t.saturating_sub(t_tech) as f64 * dt_yr / theta_obs;
    (-(age * age)).exp()
}

/// Gross revenue earned at step `t` ($M).
pub fn revenue(t: usize, t_tech: usize, market: &MarketState, p: &ScenarioParams) -> f64 {
    p.r0 * p.dt_yr * market.revenue_factor() * obsolescence_factor(t, t_tech, p.dt_yr, p.theta_obs)
}

/// Two-Weibull reliability law of one design, time-scaled by T_ref/T_life and
/// truncated to zero after the design lifetime.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityLaw {
    pub rel: RelParams,
    pub t_life: usize,
    pub t_life_yr: f64,
    pub t_ref_yr: f64,
    pub dt_yr: f64,
}

impl ReliabilityLaw {
    pub fn new(p: &ScenarioParams, t_life_yr: f64) -> Self {
        ReliabilityLaw {
            rel: p.rel,
            t_life: p.life_steps(t_life_yr),
            t_life_yr,
            t_ref_yr: p.t_ref_yr,
            dt_yr: p.dt_yr,
        }
    }

    /// Reliability after `n` steps of operation.
    pub fn at_elapsed(&self, n: usize) -> f64 {
        if n > self.t_life {
            return 0.0;
        }
        let s = n as f64 * self.dt_yr * self.t_ref_yr / self.t_life_yr;
        let r = &self.rel;
        r.alpha_rel * (-(s / r.theta_rel_1).powf(r.beta_rel_1)).exp()
            + (1.0 - r.alpha_rel) * (-(s / r.theta_rel_2).powf(r.beta_rel_2)).exp()
    }

    /// Tabulates reliability for every elapsed step up to forced death.
    pub fn table(&self) -> ReliabilityTable {
        ReliabilityTable {
            values: (0..=self.t_life + 1).map(|n| self.at_elapsed(n)).collect(),
        }
    }
}

/// `Rel(n)` for n = 0..=t_life+1; zero beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityTable {
    values: Vec<f64>,
}

impl ReliabilityTable {
    pub fn from_values(values: Vec<f64>) -> Self {
        ReliabilityTable { values }
    }

    #[inline]
    pub fn rel(&self, n: usize) -> f64 {
        self.values.get(n).copied().unwrap_or(0.0)
    }

    /// Probability of failing during step n (n ≥ 1): Rel(n-1) - Rel(n).
    #[inline]
    pub fn failure_mass(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        self.rel(n - 1) - self.rel(n)
    }

    /// Failure probability during step n given survival through n-1.
    /// At the truncation boundary 0/0 resolves to 1.
    #[inline]
    pub fn conditional_failure(&self, n: usize) -> f64 {
        let prev = self.rel(n - 1);
        if prev <= 0.0 {
            1.0
        } else {
            (self.failure_mass(n) / prev).clamp(0.0, 1.0)
        }
    }

    pub fn t_life(&self) -> usize {
        self.values.len().saturating_sub(2)
    }
}

pub fn reliability(t: usize, t_launch: usize, law: &ReliabilityLaw) -> f64 {
    law.at_elapsed(t - t_launch)
}

/// Unconditional probability that a satellite launched at `t_launch` fails in step `t`.
pub fn in_orbit_failure_mass(t: usize, t_launch: usize, law: &ReliabilityLaw) -> f64 {
    let n = t - t_launch;
    law.at_elapsed(n - 1) - law.at_elapsed(n)
}

pub fn conditional_failure_prob(t: usize, t_launch: usize, law: &ReliabilityLaw) -> f64 {
    let n = t - t_launch;
    let prev = law.at_elapsed(n - 1);
    if prev <= 0.0 {
        1.0
    } else {
        ((prev - law.at_elapsed(n)) / prev).clamp(0.0, 1.0)
    }
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// CDF of |N(0, σ²)| at `x`. A zero scale is a point mass at 0.
pub fn half_normal_cdf(x: f64, sigma: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else if sigma <= 0.0 {
        1.0
    } else {
        // 2Φ(x/σ) - 1 without cancellation.
        1.0 - erfc(x / (sigma * std::f64::consts::SQRT_2))
    }
}

/// Extra transfer ΔV needed to correct the launcher's injection error.
pub fn sample_injection_error<R: Rng + ?Sized>(rng: &mut R, sigma_oi: f64) -> f64 {
    if sigma_oi <= 0.0 {
        return 0.0;
    }
    let z: f64 = rng.sample(StandardNormal);
    (z * sigma_oi).abs()
}
