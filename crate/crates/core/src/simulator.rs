//! Discrete-time lifecycle simulation and the Monte Carlo estimator.
//!
//! Each step `t = 1..=t_sim` resolves in this order: market update, in-orbit
//! failure check over `(t-1, t]`, station-keeping burn and net revenue for a
//! satellite still holding propellant, actions scheduled for `t` (launch or
//! refuelling service), and finally the decision checks. Step 0 holds the
//! initial launch only.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::policy::{
    decide_refuel_amount, decide_replacement_or_refuel, depletion_step, refuel_lead, Choice, DesignModel,
    SatelliteState,
};
use crate::scenario::{DesignPoint, ScenarioParams, TimeGrid};
use crate::stochastics::{market_step, revenue, sample_injection_error, MarketState, RngStream};
use crate::vehicle::{oor_service_cost, propellant_for_dv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CashKind {
    Revenue,
    Opcost,
    Ioc,
    Oor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub step: usize,
    pub amount: f64,
    pub kind: CashKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Launch,
    LaunchFailure,
    TransferFailure { dv_err: f64 },
    InOrbitFailure,
    Depletion,
    Retire,
    ReplaceChosen { u_rep: f64, u_oor: Option<f64> },
    RefuelChosen { k: usize, u_rep: f64, u_oor: f64 },
    RefuelSized { k: usize, m_p_oor: f64 },
    RefuelCancelled,
    Service { m_p_oor: f64 },
    ServiceFailure,
}

impl Event {
    pub fn tag(&self) -> &'static str {
        match self {
            Event::Launch => "launch",
            Event::LaunchFailure => "launch_failure",
            Event::TransferFailure { .. } => "transfer_failure",
            Event::InOrbitFailure => "in_orbit_failure",
            Event::Depletion => "depletion",
            Event::Retire => "retire",
            Event::ReplaceChosen { .. } => "decision1_replace",
            Event::RefuelChosen { .. } => "decision1_refuel",
            Event::RefuelSized { .. } => "decision2",
            Event::RefuelCancelled => "refuel_cancelled",
            Event::Service { .. } => "oor_service",
            Event::ServiceFailure => "oor_failure",
        }
    }
}

/// One lifecycle trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SimOutcome {
    pub npv: f64,
    pub ledger: Vec<LedgerEntry>,
    pub events: Vec<(usize, Event)>,
}

impl SimOutcome {
    /// NPV recomputed from the ledger.
    pub fn ledger_npv(&self, rate_per_step: f64) -> f64 {
        self.ledger
            .iter()
            .map(|e| e.amount * (-rate_per_step * e.step as f64).exp())
            .sum()
    }

    /// Writes `step,event,cash` rows; operating steps appear as `operate`
    /// with their net cash flow.
    pub fn write_event_log(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        w.write_record(["step", "event", "cash"])
            .map_err(|e| Error::csv(path, e))?;
        let mut rows: Vec<(usize, u8, String, f64)> = Vec::new();
        for (step, ev) in &self.events {
            rows.push((*step, 0, ev.tag().to_string(), 0.0));
        }
        for e in &self.ledger {
            match e.kind {
                CashKind::Ioc | CashKind::Oor => {
                    let tag = if e.kind == CashKind::Ioc {
                        "launch"
                    } else {
                        "oor_service"
                    };
                    if let Some(r) = rows.iter_mut().find(|r| r.0 == e.step && r.2 == tag) {
                        r.3 += e.amount;
                    }
                }
                CashKind::Revenue | CashKind::Opcost => match rows.last_mut() {
                    Some(r) if r.0 == e.step && r.2 == "operate" => r.3 += e.amount,
                    _ => rows.push((e.step, 1, "operate".into(), e.amount)),
                },
            }
        }
        rows.sort_by_key(|r| (r.0, r.1));
        for (step, _, tag, cash) in rows {
            w.write_record([step.to_string(), tag, cash.to_string()])
                .map_err(|e| Error::csv(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Sample mean and (n-1) standard deviation of the NPV at one design point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

impl McEstimate {
    pub fn from_samples(v: &[f64]) -> Self {
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let ss: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
        let std = if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 };
        McEstimate { n, mean, std }
    }

    /// Mean over spread; infinite when the spread is zero.
    pub fn ratio(&self) -> f64 {
        if self.std > 0.0 {
            self.mean / self.std
        } else {
            f64::INFINITY.copysign(self.mean)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct PendingService {
    at: usize,
    m_p_oor: f64,
}

#[derive(Debug, Clone, Copy)]
struct Active {
    sat: SatelliteState,
    depletion_at: usize,
    decided: bool,
    decision2_at: Option<usize>,
    service: Option<PendingService>,
}

/// A design prepared for repeated simulation.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub params: ScenarioParams,
    pub grid: TimeGrid,
    pub design: DesignModel,
}

struct Run<'a> {
    sim: &'a Simulation,
    rng: ChaCha8Rng,
    market: MarketState,
    active: Option<Active>,
    next_launch: Option<usize>,
    npv: f64,
    record: bool,
    out: SimOutcome,
}

impl<'a> Run<'a> {
    fn cash(&mut self, step: usize, amount: f64, kind: CashKind) {
        self.npv += amount * (-self.sim.params.rate_per_step() * step as f64).exp();
        if self.record {
            self.out.ledger.push(LedgerEntry { step, amount, kind });
        }
    }

    fn event(&mut self, step: usize, e: Event) {
        if self.record {
            self.out.events.push((step, e));
        }
    }

    /// Keeps the earlier of an existing and a new replacement slot.
    fn schedule_launch(&mut self, at: usize) {
        self.next_launch = Some(self.next_launch.map_or(at, |s| s.min(at)));
    }

    fn launch(&mut self, t: usize) {
        let p = &self.sim.params;
        let d = &self.sim.design;
        let t_rep = self.sim.grid.t_rep;
        if self.rng.random::<f64>() < p.p_lau {
            self.event(t, Event::LaunchFailure);
            self.schedule_launch(t + t_rep);
            return;
        }
        let dv_err = sample_injection_error(&mut self.rng, p.sigma_oi);
        let dv_ot = p.dv_ot_ideal + dv_err;
        if dv_ot > d.breakdown.dv_des {
            self.event(t, Event::TransferFailure { dv_err });
            self.schedule_launch(t + t_rep);
            return;
        }
        let b = &d.breakdown;
        let m_p_rem = (b.m_p_des - propellant_for_dv(b.m_wet, dv_ot, p.isp, p.g0)).max(0.0);
        let sat = SatelliteState {
            t_launch: t,
            t_tech: t,
            m_dry: b.m_dry,
            m_p_rem,
            isp: p.isp,
            t_life: d.t_life,
        };
        let depletion_at = depletion_step(t, &sat, p, &self.sim.grid);
        self.active = Some(Active {
            sat,
            depletion_at,
            decided: false,
            decision2_at: None,
            service: None,
        });
        self.event(t, Event::Launch);
        self.cash(t, -b.c_ioc, CashKind::Ioc);
    }

    fn lose_satellite(&mut self, t: usize, e: Event) {
        self.active = None;
        self.event(t, e);
        self.schedule_launch(t + self.sim.grid.t_rep);
    }

    fn operate(&mut self, t: usize) {
        let p = &self.sim.params;
        let Some(mut a) = self.active else { return };
        let elapsed = t - a.sat.t_launch;
        let q = self.sim.design.rel.conditional_failure(elapsed);
        if self.rng.random::<f64>() < q {
            self.lose_satellite(t, Event::InOrbitFailure);
            return;
        }
        if t > a.depletion_at {
            self.active = None;
            self.event(t, Event::Depletion);
            if self.next_launch.is_none() {
                self.schedule_launch(t + self.sim.grid.t_rep);
            }
            return;
        }
        let burn = propellant_for_dv(a.sat.m_dry + a.sat.m_p_rem, self.sim.grid.dv_stk_step, p.isp, p.g0);
        a.sat.m_p_rem = (a.sat.m_p_rem - burn).max(0.0);
        self.active = Some(a);
        let r = revenue(t, a.sat.t_tech, &self.market, p);
        self.cash(t, r, CashKind::Revenue);
        self.cash(t, -p.alpha_op * r, CashKind::Opcost);
    }

    fn act(&mut self, t: usize) -> Result<()> {
        if self.next_launch == Some(t) {
            self.next_launch = None;
            if self.active.take().is_some() {
                self.event(t, Event::Retire);
            }
            self.launch(t);
            return Ok(());
        }
        let Some(mut a) = self.active else {
            return Ok(());
        };
        let Some(svc) = a.service.filter(|s| s.at == t) else {
            return Ok(());
        };
        let p = &self.sim.params;
        if self.rng.random::<f64>() < p.p_oor {
            self.lose_satellite(t, Event::ServiceFailure);
            return Ok(());
        }
        let cost = oor_service_cost(p, svc.m_p_oor)?;
        a.sat.m_p_rem += svc.m_p_oor;
        a.depletion_at = depletion_step(t, &a.sat, p, &self.sim.grid);
        a.decided = false;
        a.decision2_at = None;
        a.service = None;
        self.active = Some(a);
        self.event(t, Event::Service { m_p_oor: svc.m_p_oor });
        self.cash(t, -cost, CashKind::Oor);
        Ok(())
    }

    fn decide(&mut self, t: usize) -> Result<()> {
        let Some(mut a) = self.active else {
            return Ok(());
        };
        let (p, g, d) = (&self.sim.params, &self.sim.grid, &self.sim.design);
        let phi = self.market.revenue_factor();
        if !a.decided && a.depletion_at.saturating_sub(t) <= g.t_rep {
            a.decided = true;
            let out = decide_replacement_or_refuel(p, g, t, &a.sat, d, phi)?;
            match out.choice {
                Choice::Replace => {
                    self.event(
                        t,
                        Event::ReplaceChosen {
                            u_rep: out.u_rep,
                            u_oor: out.u_oor,
                        },
                    );
                    self.schedule_launch(t + g.t_rep);
                }
                Choice::Refuel { k, m_p_oor } => {
                    self.event(
                        t,
                        Event::RefuelChosen {
                            k,
                            u_rep: out.u_rep,
                            u_oor: out.utility,
                        },
                    );
                    let at = t + refuel_lead(t, &a.sat, p, g);
                    a.decision2_at = Some(at - g.t_oor);
                    a.service = Some(PendingService { at, m_p_oor });
                }
            }
        }
        if a.decision2_at == Some(t) {
            a.decision2_at = None;
            match decide_refuel_amount(p, g, t, &a.sat, d, phi)? {
                Some(out) => {
                    if let Choice::Refuel { k, m_p_oor } = out.choice {
                        a.service = Some(PendingService {
                            at: t + g.t_oor,
                            m_p_oor,
                        });
                        self.event(t, Event::RefuelSized { k, m_p_oor });
                    }
                }
                None => {
                    a.service = None;
                    self.event(t, Event::RefuelCancelled);
                    self.schedule_launch(t + g.t_rep);
                }
            }
        }
        self.active = Some(a);
        Ok(())
    }
}

impl Simulation {
    pub fn new(p: &ScenarioParams, x: DesignPoint) -> Result<Self> {
        p.validate()?;
        Ok(Simulation {
            params: p.clone(),
            grid: p.discretize(),
            design: DesignModel::new(p, x)?,
        })
    }

    /// Simulates one replicate. With `record` off only the NPV is kept.
    pub fn run(&self, stream: RngStream, record: bool) -> Result<SimOutcome> {
        let mut run = Run {
            sim: self,
            rng: stream.rng(),
            market: MarketState::default(),
            active: None,
            next_launch: None,
            npv: 0.0,
            record,
            out: SimOutcome::default(),
        };
        let p = &self.params;
        run.launch(0);
        run.decide(0)?;
        for t in 1..=self.grid.t_sim {
            run.market = market_step(
                run.market,
                p.dt_yr,
                p.mu_mar,
                p.sigma_mar,
                p.market_multiplicative,
                &mut run.rng,
            );
            run.operate(t);
            run.act(t)?;
            run.decide(t)?;
        }
        let mut out = run.out;
        out.npv = run.npv;
        Ok(out)
    }

    pub fn estimate(&self, n: usize, master_seed: u64, experiment: u64) -> Result<McEstimate> {
        let npvs = (0..n as u64)
            .into_par_iter()
            .map(|j| {
                self.run(RngStream::new(master_seed, experiment, j), false)
                    .map(|o| o.npv)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(McEstimate::from_samples(&npvs))
    }
}

/// One full lifecycle trajectory with ledger and event log.
pub fn run_lifecycle(p: &ScenarioParams, x: DesignPoint, stream: RngStream) -> Result<SimOutcome> {
    Simulation::new(p, x)?.run(stream, true)
}

/// Monte Carlo NPV statistics over `n` replicates of experiment `experiment`.
pub fn mc_estimate(
    p: &ScenarioParams,
    x: DesignPoint,
    n: usize,
    master_seed: u64,
    experiment: u64,
) -> Result<McEstimate> {
    if n < 2 {
        return Err(Error::invariant("replicates", "need at least two"));
    }
    Simulation::new(p, x)?.estimate(n, master_seed, experiment)
}

/// Writes the event log of one replicate as CSV.
pub fn dump_event_log(outcome: &SimOutcome, path: &Path) -> Result<()> {
    outcome.write_event_log(path)?;
    let mut f = std::fs::OpenOptions::new()
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    writeln!(f, "# npv={}", outcome.npv).map_err(|e| Error::io(path, e))
}
