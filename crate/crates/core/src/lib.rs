//! Lifecycle simulation and surrogate-assisted architecture optimization for
//! refuelable GEO communication satellites.
//!
//! The pipeline runs Monte Carlo lifecycles over a grid of designs
//! `(T_life, m_p,des)`, fits Gaussian-process surrogates to the mean NPV and
//! to its mean-over-spread ratio, and searches the surrogates with NSGA-II.

pub mod bench;
pub mod error;
pub mod pareto;
pub mod policy;
pub mod scenario;
pub mod simulator;
pub mod stochastics;
pub mod surrogate;
pub mod vehicle;

pub use error::{Error, Result};
pub use scenario::{load_scenario, DesignPoint, DesignSpace, Scenario, ScenarioParams, TimeGrid};
pub use vehicle::MassCostBreakdown;
