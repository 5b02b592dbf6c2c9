//! The operator's greedy decision engine.
//!
//! At Decision 1 the operator compares the equivalent-annuity utility of a
//! replacement launch against that of the best refuelling extension; at
//! Decision 2 only the extension length is chosen. Every utility is an
//! expectation over the discrete event tree that follows the decision:
//! in-orbit failure of the current satellite, launch and transfer outcome of
//! a replacement, propellant depletion, and service success.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{DesignPoint, ScenarioParams, TimeGrid};
use crate::stochastics::{
    expected_market_growth, half_normal_cdf, obsolescence_factor, ReliabilityLaw, ReliabilityTable,
};
use crate::vehicle::{design_vehicle, MassCostBreakdown};

/// Equivalent-annuity factor for `n` steps at per-step rate `r`.
pub fn ea_factor(r: f64, n: usize) -> f64 {
    debug_assert!(n >= 1);
    if r == 0.0 {
        return 1.0 / n as f64;
    }
    let rn = r * n as f64;
    rn.exp() * r.exp_m1() / rn.exp_m1()
}

/// State of the satellite currently in orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SatelliteState {
    pub t_launch: usize,
    pub t_tech: usize,
    pub m_dry: f64,
    pub m_p_rem: f64,
    pub isp: f64,
    pub t_life: usize,
}

/// Step-invariant quantities of one design: its breakdown, reliability table
/// and the probability that a freshly launched unit can fly `n` steps.
#[derive(Debug, Clone)]
pub struct DesignModel {
    pub x: DesignPoint,
    pub breakdown: MassCostBreakdown,
    pub rel: ReliabilityTable,
    /// `capable[n]` = P[transfer succeeds and leaves ΔV for ≥ n steps],
    /// n = 0..=t_life+1. `capable[0]` is the transfer success probability.
    pub capable: Vec<f64>,
    pub t_life: usize,
}

impl DesignModel {
    pub fn new(p: &ScenarioParams, x: DesignPoint) -> Result<Self> {
        let breakdown = design_vehicle(p, &x)?;
        let law = ReliabilityLaw::new(p, x.t_life_yr);
        let t_life = law.t_life;
        let grid = p.discretize();
        let margin = breakdown.dv_des - p.dv_ot_ideal;
        let capable = (0..=t_life + 1)
            .map(|n| half_normal_cdf(margin - n as f64 * grid.dv_stk_step, p.sigma_oi))
            .collect();
        Ok(DesignModel {
            x,
            breakdown,
            rel: law.table(),
            capable,
            t_life,
        })
    }
}

/// Probability that a replacement does not reach operation: launch failure
/// or an injection error larger than the design's ΔV margin.
pub fn replacement_failure_prob(p: &ScenarioParams, b: &MassCostBreakdown) -> f64 {
    let p_success = half_normal_cdf(b.dv_des - p.dv_ot_ideal, p.sigma_oi);
    1.0 - (1.0 - p.p_lau) * p_success
}

/// Expected gross revenue `s` steps after `t` for a satellite of technology
/// vintage `t_tech`, given today's market factor.
pub fn expected_revenue(p: &ScenarioParams, phi_now: f64, t: usize, t_tech: usize, s: usize) -> f64 {
    p.r0 * p.dt_yr
        * phi_now.max(0.0)
        * expected_market_growth(s, p)
        * obsolescence_factor(t + s, t_tech, p.dt_yr, p.theta_obs)
}

/// Expected discounted net profit of the operating satellite over the next
/// `horizon` steps, conditional on it being alive at `t`.
pub fn expected_profit_to_action(
    p: &ScenarioParams,
    t: usize,
    sat: &SatelliteState,
    rel: &ReliabilityTable,
    horizon: usize,
    phi_now: f64,
) -> f64 {
    let a = t - sat.t_launch;
    let alive = rel.rel(a);
    if alive <= 0.0 {
        return 0.0;
    }
    let r = p.rate_per_step();
    (1..=horizon)
        .map(|s| {
            (1.0 - p.alpha_op)
                * expected_revenue(p, phi_now, t, sat.t_tech, s)
                * (rel.rel(a + s) / alive)
                * (-r * s as f64).exp()
        })
        .sum()
}

/// Propellant that must be delivered at the service to extend operation by
/// exactly `k` steps, given the state `lead` steps before the service. The
/// delivery is sized on the post-service wet mass, which burns more per step
/// than the pre-service one.
pub fn refuel_mass(k: usize, lead: usize, sat: &SatelliteState, p: &ScenarioParams, grid: &TimeGrid) -> f64 {
    let c = p.g0 * sat.isp;
    let x = grid.dv_stk_step / c;
    (sat.m_dry + sat.m_p_rem) * (-x * lead as f64).exp() * (x * k as f64).exp_m1()
}

/// Last step at which the satellite can still perform station keeping,
/// starting from step `t` with its current propellant.
pub fn depletion_step(t: usize, sat: &SatelliteState, p: &ScenarioParams, grid: &TimeGrid) -> usize {
    if sat.m_p_rem <= 0.0 {
        return t;
    }
    if grid.dv_stk_step <= 0.0 {
        return usize::MAX / 2;
    }
    let steps = p.g0 * sat.isp * ((sat.m_dry + sat.m_p_rem) / sat.m_dry).ln() / grid.dv_stk_step;
    // Absorb rounding from the per-step draws that produced m_p_rem.
    t + (steps + 1e-9).floor() as usize
}

/// Feasible extension lengths `{1, ..., k_max}` for a service `lead` steps
/// from `t`. Empty when the satellite would deplete before the service.
pub fn feasible_extension_steps(
    t: usize,
    lead: usize,
    sat: &SatelliteState,
    p: &ScenarioParams,
    grid: &TimeGrid,
) -> Vec<usize> {
    let remaining = depletion_step(t, sat, p, grid).saturating_sub(t);
    let service_at = t + lead;
    let life_end = sat.t_launch + sat.t_life;
    if remaining < lead || service_at >= life_end {
        return Vec::new();
    }
    let cap = life_end - service_at;
    (1..=cap)
        .take_while(|&k| refuel_mass(k, lead, sat, p, grid) <= p.m_oor_cap)
        .collect()
}

/// Everything a utility evaluation needs, flattened to per-step arrays so
/// that toy configurations can be built by hand.
///
/// Indices: `old_net[s]` and `old_survival[s]` refer to step `t + s`;
/// `new_net[j]` to step `t + lead + j` of a replacement; `new_rel[n]` and
/// `capable[n]` to `n` steps after the replacement launch; `oor_cost[k]` to
/// an extension of `k` steps. Index 0 of `old_net`, `new_net` and
/// `oor_cost` is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Lookahead {
    pub rate: f64,
    pub lead: usize,
    pub old_net: Vec<f64>,
    pub old_survival: Vec<f64>,
    pub new_net: Vec<f64>,
    pub new_rel: Vec<f64>,
    pub capable: Vec<f64>,
    pub p_lau: f64,
    pub p_oor: f64,
    pub c_ioc: f64,
    pub oor_cost: Vec<f64>,
}

impl Lookahead {
    fn disc(&self, s: usize) -> f64 {
        (-self.rate * s as f64).exp()
    }

    fn old_cf(&self, s: usize) -> f64 {
        self.old_net[s] * self.disc(s)
    }

    /// Expected profit until the action, survival-weighted.
    pub fn expected_profit(&self) -> f64 {
        (1..=self.lead).map(|s| self.old_cf(s) * self.old_survival[s]).sum()
    }

    /// Profit until the action for a satellite known to survive it.
    fn full_profit(&self) -> f64 {
        (1..=self.lead).map(|s| self.old_cf(s)).sum()
    }

    pub fn p_rep(&self) -> f64 {
        1.0 - (1.0 - self.p_lau) * self.capable[0]
    }

    /// Probability that the replacement's first terminating event (in-orbit
    /// failure or depletion) falls in its `n`-th step of operation.
    pub fn next_event_mass(&self, n: usize) -> f64 {
        let rel = |i: usize| self.new_rel.get(i).copied().unwrap_or(0.0);
        let cap = |i: usize| self.capable.get(i).copied().unwrap_or(0.0);
        let fail = rel(n - 1) - rel(n);
        cap(n) * fail + (cap(n - 1) - cap(n)) * rel(n - 1)
    }

    /// Utility of launching a replacement `lead` steps from now.
    pub fn u_rep(&self) -> f64 {
        let ep = self.expected_profit();
        let l = self.lead;
        let invest = ep - self.c_ioc * self.disc(l);
        let mut u = self.p_rep() * ea_factor(self.rate, l) * ep;
        let mut earned = 0.0;
        let horizon = self.new_rel.len().saturating_sub(1);
        for n in 1..=horizon {
            if n >= 2 {
                earned += self.new_net[n - 1] * self.disc(l + n - 1);
            }
            let w = self.next_event_mass(n);
            if w != 0.0 {
                u += (1.0 - self.p_lau) * w * ea_factor(self.rate, l + n) * (invest + earned);
            }
        }
        u
    }

    /// Largest extension representable by the arrays.
    pub fn k_max(&self) -> usize {
        self.oor_cost.len().saturating_sub(1)
    }

    /// Utility of refuelling for `k` extra steps, for every `k` in 1..=k_max.
    pub fn u_oor_all(&self) -> Vec<f64> {
        let l = self.lead;
        let ea = |n: usize| ea_factor(self.rate, n);
        let s = &self.old_survival;
        let ep = self.expected_profit();
        let epf = self.full_profit();
        let keep = 1.0 - self.p_oor;
        // Lost before the service, or the service itself fails.
        let u1 = ea(l) * (ep - keep * s[l] * epf);
        let mut out = Vec::with_capacity(self.k_max());
        // Running sums over the extension window e = l+1..=l+k:
        // q1 = Σ q(e)·ea(e), q2 = Σ q(e)·ea(e)·G(e-1), g = G(l+k).
        let (mut q1, mut q2, mut g) = (0.0, 0.0, 0.0);
        for k in 1..=self.k_max() {
            let e = l + k;
            let q = s[e - 1] - s[e];
            q1 += q * ea(e);
            q2 += q * ea(e) * g;
            g += self.old_cf(e);
            let base = epf - self.oor_cost[k] * self.disc(l);
            let u2 = base * q1 + q2;
            let u3 = s[e] * ea(e + 1) * (base + g);
            out.push(u1 + keep * (u2 + u3));
        }
        out
    }

    /// Best extension length with its utility; ties go to the shorter one.
    pub fn best_oor(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, u) in self.u_oor_all().into_iter().enumerate() {
            if best.is_none_or(|(_, b)| u > b) {
                best = Some((i + 1, u));
            }
        }
        best
    }
}

/// Builds the lookahead arrays for a decision at step `t` with the given
/// lead time and candidate extensions. The current satellite earns nothing
/// after `earning_steps` (its depletion, when no service is planned).
#[allow(clippy::too_many_arguments)]
pub fn lookahead(
    p: &ScenarioParams,
    grid: &TimeGrid,
    t: usize,
    sat: &SatelliteState,
    current: &DesignModel,
    replacement: &DesignModel,
    lead: usize,
    extensions: &[usize],
    phi_now: f64,
    earning_steps: usize,
) -> Result<Lookahead> {
    let k_max = extensions.last().copied().unwrap_or(0);
    let a = t - sat.t_launch;
    let alive = current.rel.rel(a);
    let span = lead + k_max + 1;
    let net = |tech: usize, s: usize| (1.0 - p.alpha_op) * expected_revenue(p, phi_now, t, tech, s);
    let old_net = (0..=span)
        .map(|s| if s > earning_steps { 0.0 } else { net(sat.t_tech, s) })
        .collect();
    let old_survival = (0..=span)
        .map(|s| {
            if alive > 0.0 {
                current.rel.rel(a + s) / alive
            } else if s == 0 {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let horizon = replacement.t_life + 1;
    let new_net = (0..=horizon).map(|j| net(t + lead, lead + j)).collect();
    let new_rel = (0..=horizon).map(|n| replacement.rel.rel(n)).collect();
    let mut oor_cost = vec![0.0];
    for &k in extensions {
        let m = refuel_mass(k, lead, sat, p, grid);
        oor_cost.push(crate::vehicle::oor_service_cost(p, m)?);
    }
    Ok(Lookahead {
        rate: p.rate_per_step(),
        lead,
        old_net,
        old_survival,
        new_net,
        new_rel,
        capable: replacement.capable.clone(),
        p_lau: p.p_lau,
        p_oor: p.p_oor,
        c_ioc: replacement.breakdown.c_ioc,
        oor_cost,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "choice", rename_all = "snake_case")]
pub enum Choice {
    Replace,
    Refuel { k: usize, m_p_oor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecisionOutcome {
    pub choice: Choice,
    pub utility: f64,
    pub u_rep: f64,
    pub u_oor: Option<f64>,
}

/// Steps from `t` until a refuelling service chosen now would take place:
/// the projected depletion, but never sooner than `t_oor` nor later than
/// `t_rep` ahead.
pub fn refuel_lead(t: usize, sat: &SatelliteState, p: &ScenarioParams, grid: &TimeGrid) -> usize {
    depletion_step(t, sat, p, grid)
        .saturating_sub(t)
        .clamp(grid.t_oor, grid.t_rep)
}

/// Replacement utility at Decision 1. The current satellite stops earning
/// at its projected depletion if that comes before the replacement.
pub fn utility_replacement(
    p: &ScenarioParams,
    grid: &TimeGrid,
    t: usize,
    sat: &SatelliteState,
    current: &DesignModel,
    replacement: &DesignModel,
    phi_now: f64,
) -> Result<f64> {
    let remaining = depletion_step(t, sat, p, grid).saturating_sub(t);
    lookahead(
        p,
        grid,
        t,
        sat,
        current,
        replacement,
        grid.t_rep,
        &[],
        phi_now,
        remaining,
    )
    .map(|l| l.u_rep())
}

/// Best refuelling extension for a service `lead` steps ahead.
#[allow(clippy::too_many_arguments)]
pub fn utility_oor(
    p: &ScenarioParams,
    grid: &TimeGrid,
    t: usize,
    sat: &SatelliteState,
    current: &DesignModel,
    lead: usize,
    phi_now: f64,
) -> Result<(usize, f64)> {
    let ks = feasible_extension_steps(t, lead, sat, p, grid);
    if ks.is_empty() {
        return Err(Error::EmptyExtensionSet);
    }
    let la = lookahead(p, grid, t, sat, current, current, lead, &ks, phi_now, usize::MAX)?;
    la.best_oor().ok_or(Error::EmptyExtensionSet)
}

/// Decision 1: replace after `t_rep` steps, or refuel after
/// [`refuel_lead`] steps.
pub fn decide_replacement_or_refuel(
    p: &ScenarioParams,
    grid: &TimeGrid,
    t: usize,
    sat: &SatelliteState,
    design: &DesignModel,
    phi_now: f64,
) -> Result<DecisionOutcome> {
    let u_rep = utility_replacement(p, grid, t, sat, design, design, phi_now)?;
    let lead = refuel_lead(t, sat, p, grid);
    let ks = feasible_extension_steps(t, lead, sat, p, grid);
    let best = if ks.is_empty() {
        None
    } else {
        lookahead(p, grid, t, sat, design, design, lead, &ks, phi_now, usize::MAX)?.best_oor()
    };
    Ok(match best {
        Some((k, u)) if u > u_rep => DecisionOutcome {
            choice: Choice::Refuel {
                k,
                m_p_oor: refuel_mass(k, lead, sat, p, grid),
            },
            utility: u,
            u_rep,
            u_oor: Some(u),
        },
        _ => DecisionOutcome {
            choice: Choice::Replace,
            utility: u_rep,
            u_rep,
            u_oor: best.map(|b| b.1),
        },
    })
}

/// Decision 2: the extension length for a service `t_oor` steps ahead.
/// `None` when no extension is feasible any more.
pub fn decide_refuel_amount(
    p: &ScenarioParams,
    grid: &TimeGrid,
    t: usize,
    sat: &SatelliteState,
    design: &DesignModel,
    phi_now: f64,
) -> Result<Option<DecisionOutcome>> {
    match utility_oor(p, grid, t, sat, design, grid.t_oor, phi_now) {
        Ok((k, u)) => Ok(Some(DecisionOutcome {
            choice: Choice::Refuel {
                k,
                m_p_oor: refuel_mass(k, grid.t_oor, sat, p, grid),
            },
            utility: u,
            u_rep: f64::NAN,
            u_oor: Some(u),
        })),
        Err(Error::EmptyExtensionSet) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::baseline_chemical;
    use crate::vehicle::propellant_for_dv;
    use approx::assert_relative_eq;

    fn chem() -> ScenarioParams {
        baseline_chemical().params
    }

    #[test]
    fn ea_single_step() {
        let r = 0.01;
        assert_relative_eq!(ea_factor(r, 1), r.exp(), max_relative = 1e-14);
    }

    #[test]
    fn ea_zero_rate_limit() {
        assert_eq!(ea_factor(0.0, 8), 0.125);
        assert_relative_eq!(ea_factor(1e-12, 8), 0.125, max_relative = 1e-9);
    }

    #[test]
    fn ea_pinned() {
        // e^{rn}(e^r-1)/(e^{rn}-1), r = ln(1.03)/52, n = 156, at 50 digits
        let r = 1.03f64.ln() / 52.0;
        assert_relative_eq!(ea_factor(r, 156), EA_156, max_relative = 1e-12);
    }
    const EA_156: f64 = 0.006_700_579_955_895_206;

    fn sat_at(p: &ScenarioParams, m_p_rem: f64) -> SatelliteState {
        let b = design_vehicle(p, &DesignPoint::new(15.0, 3500.0)).unwrap();
        SatelliteState {
            t_launch: 0,
            t_tech: 0,
            m_dry: b.m_dry,
            m_p_rem,
            isp: p.isp,
            t_life: p.life_steps(15.0),
        }
    }

    #[test]
    fn zero_horizon_profit() {
        let p = chem();
        let d = DesignModel::new(&p, DesignPoint::new(15.0, 3500.0)).unwrap();
        let sat = sat_at(&p, 1000.0);
        assert_eq!(expected_profit_to_action(&p, 10, &sat, &d.rel, 0, 1.0), 0.0);
    }

    #[test]
    fn deterministic_profit_is_geometric_series() {
        let mut p = chem();
        p.mu_mar = 0.0;
        p.theta_obs = 1e12;
        p.rel.alpha_rel = 1.0;
        p.rel.theta_rel_1 = 1e300;
        let d = DesignModel::new(&p, DesignPoint::new(15.0, 3500.0)).unwrap();
        let sat = sat_at(&p, 1000.0);
        let r = p.rate_per_step();
        let n = 156;
        let closed = 0.9 * 70.0 / 52.0 * (-r).exp() * (-(-r * n as f64).exp_m1()) / (-(-r).exp_m1());
        let got = expected_profit_to_action(&p, 5, &sat, &d.rel, n, 1.0);
        assert_relative_eq!(got, closed, max_relative = 1e-9);
    }

    #[test]
    fn replacement_failure_cases() {
        let mut p = chem();
        p.p_lau = 0.0;
        let mut b = MassCostBreakdown {
            dv_des: p.dv_ot_ideal,
            ..Default::default()
        };
        assert_eq!(replacement_failure_prob(&p, &b), 1.0);
        b.dv_des = p.dv_ot_ideal + p.sigma_oi;
        // 1 - erf(1/√2)
        assert_relative_eq!(
            replacement_failure_prob(&p, &b),
            0.317_310_507_862_914_1,
            max_relative = 1e-9
        );
        p.p_lau = 0.03;
        b.dv_des = 1e9;
        assert_relative_eq!(replacement_failure_prob(&p, &b), 0.03, max_relative = 1e-12);
    }

    #[test]
    fn refuel_mass_basics() {
        let p = chem();
        let g = p.discretize();
        let sat = sat_at(&p, 800.0);
        assert_eq!(refuel_mass(0, g.t_rep, &sat, &p, &g), 0.0);
        let ms: Vec<f64> = (1..50).map(|k| refuel_mass(k, g.t_rep, &sat, &p, &g)).collect();
        assert!(ms.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn extension_set_is_prefix_within_capacity() {
        let p = chem();
        let g = p.discretize();
        let sat = sat_at(&p, 800.0);
        let ks = feasible_extension_steps(0, g.t_rep, &sat, &p, &g);
        let k_max = *ks.last().unwrap();
        assert_eq!(ks, (1..=k_max).collect::<Vec<_>>());
        assert!(refuel_mass(k_max, g.t_rep, &sat, &p, &g) <= 100.0);
        assert!(refuel_mass(k_max + 1, g.t_rep, &sat, &p, &g) > 100.0);
    }

    #[test]
    fn extension_set_empty_when_depleting_first() {
        let p = chem();
        let g = p.discretize();
        let sat = sat_at(&p, 10.0);
        assert!(feasible_extension_steps(0, g.t_rep, &sat, &p, &g).is_empty());
    }

    #[test]
    fn depletion_closed_form_matches_iteration() {
        let p = chem();
        let g = p.discretize();
        for &m0 in &[0.0, 1.0, 250.0, 1234.5, 3000.0] {
            let sat = sat_at(&p, m0);
            let closed = depletion_step(7, &sat, &p, &g) - 7;
            let mut m = m0;
            let mut n = 0;
            loop {
                let burn = propellant_for_dv(sat.m_dry + m, g.dv_stk_step, p.isp, p.g0);
                if burn > m + 1e-9 {
                    break;
                }
                m -= burn;
                n += 1;
            }
            assert_eq!(closed, n, "m0 = {m0}");
        }
    }

    #[test]
    fn refuel_extends_depletion_by_about_k() {
        let p = chem();
        let g = p.discretize();
        let x = g.dv_stk_step / (p.g0 * p.isp);
        let launch = sat_at(&p, 600.0);
        let t = depletion_step(0, &launch, &p, &g) - g.t_rep;
        let mass_after = |n: usize| (launch.m_dry + launch.m_p_rem) * (-x * n as f64).exp() - launch.m_dry;
        let decision = SatelliteState {
            m_p_rem: mass_after(t),
            ..launch
        };
        let leftover = mass_after(t + g.t_rep);
        for k in [1usize, 10, 50, 100, 300, 500] {
            let serviced = SatelliteState {
                m_p_rem: leftover + refuel_mass(k, g.t_rep, &decision, &p, &g),
                ..launch
            };
            let ext = depletion_step(0, &serviced, &p, &g);
            assert!(ext.abs_diff(k) <= 1, "k = {k}, ext = {ext}");
        }
    }

    fn toy() -> Lookahead {
        Lookahead {
            rate: 0.05,
            lead: 2,
            old_net: vec![0.0, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5],
            old_survival: vec![1.0, 0.9, 0.8, 0.6, 0.5, 0.2, 0.0],
            new_net: vec![0.0, 2.0, 2.1, 2.2],
            new_rel: vec![1.0, 0.95, 0.7, 0.0],
            capable: vec![0.9, 0.8, 0.5, 0.1],
            p_lau: 0.1,
            p_oor: 0.2,
            c_ioc: 3.0,
            oor_cost: vec![0.0, 0.5, 0.7, 0.9],
        }
    }

    #[test]
    fn next_event_masses_sum_to_transfer_success() {
        let la = toy();
        let total: f64 = (1..la.new_rel.len()).map(|n| la.next_event_mass(n)).sum();
        assert_relative_eq!(total, la.capable[0], max_relative = 1e-12);
    }

    #[test]
    fn certain_replacement_failure_keeps_only_failure_branch() {
        let mut la = toy();
        la.p_lau = 1.0;
        let want = la.p_rep() * ea_factor(la.rate, la.lead) * la.expected_profit();
        assert_relative_eq!(la.u_rep(), want, max_relative = 1e-12);
    }

    #[test]
    fn certain_service_failure_is_flat_in_k() {
        let mut la = toy();
        la.p_oor = 1.0;
        let u = la.u_oor_all();
        assert!(u.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(la.best_oor().unwrap().0, 1);
    }

    #[test]
    fn huge_ioc_collapses_to_failure_branch() {
        let mut la = toy();
        la.c_ioc = 1e12;
        assert!(la.u_rep() < 0.0);
        la.c_ioc = 0.0;
        let cheap = la.u_rep();
        la.c_ioc = 3.0;
        assert!(la.u_rep() < cheap);
    }

    #[test]
    fn huge_service_fee_selects_replacement() {
        let mut p = chem();
        p.c_oor_f = 1e9;
        let g = p.discretize();
        let d = DesignModel::new(&p, DesignPoint::new(15.0, 3500.0)).unwrap();
        let sat = sat_at(&p, 400.0);
        let t = depletion_step(0, &sat, &p, &g) - g.t_rep;
        let out = decide_replacement_or_refuel(&p, &g, t, &sat, &d, 1.0).unwrap();
        assert_eq!(out.choice, Choice::Replace);
        assert!(out.u_oor.unwrap() < out.u_rep);
    }

    #[test]
    fn utilities_scale_with_money() {
        let la = toy();
        let mut scaled = la.clone();
        let c = 3.7;
        scaled.old_net.iter_mut().for_each(|v| *v *= c);
        scaled.new_net.iter_mut().for_each(|v| *v *= c);
        scaled.c_ioc *= c;
        scaled.oor_cost.iter_mut().for_each(|v| *v *= c);
        assert_relative_eq!(scaled.u_rep(), c * la.u_rep(), max_relative = 1e-12);
        for (a, b) in scaled.u_oor_all().iter().zip(la.u_oor_all()) {
            assert_relative_eq!(*a, c * b, max_relative = 1e-12);
        }
    }
}
