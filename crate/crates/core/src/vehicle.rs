//! Mass and cost estimating relationships, plus rocket-equation arithmetic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{DesignPoint, ScenarioParams};

/// Subsystem masses (kg), costs ($M) and ΔV capability (m/s) of one design.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MassCostBreakdown {
    pub m_base: f64,
    pub m_pl: f64,
    pub m_ps: f64,
    pub m_str: f64,
    pub m_adcs: f64,
    pub m_serv: f64,
    pub m_dry: f64,
    pub m_p_des: f64,
    pub m_wet: f64,
    pub c_sat: f64,
    pub c_lau: f64,
    pub c_ioc: f64,
    pub dv_des: f64,
}

/// Lifetime scaling of base and payload mass relative to the reference lifetime.
pub fn lifetime_mass_factor(kappa: f64, t_life_yr: f64, t_ref_yr: f64) -> f64 {
    (1.0 + kappa * (t_life_yr - 3.0)) / (1.0 + kappa * (t_ref_yr - 3.0))
}

/// Sizes the vehicle. Structure and ADCS are fractions of the dry mass that
/// contains them, so the dry mass is the fixed point
/// `m_dry = (m_base + m_pl + m_ps + m_serv) / (1 - α_str - α_adcs)`.
pub fn size_vehicle(p: &ScenarioParams, x: &DesignPoint) -> Result<MassCostBreakdown> {
    let scale = lifetime_mass_factor(p.kappa, x.t_life_yr, p.t_ref_yr);
    let m_base = p.m_base_ref * scale;
    let m_pl = p.m_pl_ref * scale;
    let m_ps = p.a_prop * x.m_p_des.powf(2.0 / 3.0) + p.b_prop;
    let m_serv = p.m_serv;
    let m_dry = (m_base + m_pl + m_ps + m_serv) / (1.0 - p.alpha_str - p.alpha_adcs);
    let m_str = p.alpha_str * m_dry;
    let m_adcs = p.alpha_adcs * m_dry;
    let m_wet = m_dry + x.m_p_des;
    let dv_des = dv_capacity(m_wet, m_dry, p.isp, p.g0);
    let b = MassCostBreakdown {
        m_base,
        m_pl,
        m_ps,
        m_str,
        m_adcs,
        m_serv,
        m_dry,
        m_p_des: x.m_p_des,
        m_wet,
        dv_des,
        ..Default::default()
    };
    let finite = [m_base, m_pl, m_ps, m_dry, m_wet, dv_des].iter().all(|v| v.is_finite());
    if !finite || m_base < 0.0 || m_pl < 0.0 || m_dry <= 0.0 {
        return Err(Error::NonFinite("size_vehicle"));
    }
    Ok(b)
}

/// Fills satellite, launch and initial-operating-capability costs.
pub fn cost_vehicle(p: &ScenarioParams, b: &MassCostBreakdown) -> Result<MassCostBreakdown> {
    let bus = b.m_dry - b.m_pl - b.m_serv;
    if bus.is_nan() || bus <= 0.0 {
        return Err(Error::NonPositiveBusMass(bus));
    }
    // USCM8 in FY2010 $K, escalated by CPI and converted to $M.
    let c_sat = 1.124 * 1.234 * (283.5 * bus.powf(0.716) + 189.0 * b.m_pl + p.c_serv) * p.cpi_ratio / 1000.0;
    let c_lau = p.c_lau * b.m_wet;
    let c_ioc = (1.0 + p.alpha_ins) * c_sat + c_lau;
    Ok(MassCostBreakdown {
        c_sat,
        c_lau,
        c_ioc,
        ..*b
    })
}

/// Sized and costed breakdown in one call.
pub fn design_vehicle(p: &ScenarioParams, x: &DesignPoint) -> Result<MassCostBreakdown> {
    cost_vehicle(p, &size_vehicle(p, x)?)
}

/// Price of delivering `m_p_oor` kg of propellant under linear pricing.
pub fn oor_service_cost(p: &ScenarioParams, m_p_oor: f64) -> Result<f64> {
    if m_p_oor > p.m_oor_cap {
        return Err(Error::CapacityExceeded {
            requested: m_p_oor,
            capacity: p.m_oor_cap,
        });
    }
    Ok(p.c_oor_v * m_p_oor.max(0.0) + p.c_oor_f)
}

/// Propellant burned to deliver `dv` starting from gross mass `m0`.
pub fn propellant_for_dv(m0: f64, dv: f64, isp: f64, g0: f64) -> f64 {
    m0 * -(-dv / (g0 * isp)).exp_m1()
}

/// ΔV available from burning a vehicle down from `m_wet` to `m_dry`.
pub fn dv_capacity(m_wet: f64, m_dry: f64, isp: f64, g0: f64) -> f64 {
    g0 * isp * (m_wet / m_dry).ln()
}

/// Propellant a design must carry to perform the ideal transfer plus station
/// keeping for its whole design lifetime. Solved by bisection on `m_p_des`
/// because the dry mass grows with the tank.
pub fn full_life_propellant(p: &ScenarioParams, t_life_yr: f64) -> Result<f64> {
    let required = p.dv_ot_ideal + p.dv_stk_yr * t_life_yr;
    let dv_at = |m: f64| size_vehicle(p, &DesignPoint::new(t_life_yr, m)).map(|b| b.dv_des);
    let mut lo = 0.0;
    let mut hi = 1.0;
    while dv_at(hi)? < required {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::NonFinite("full_life_propellant"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dv_at(mid)? < required {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * hi.max(1.0) {
            break;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{baseline_chemical, STANDARD_GRAVITY};
    use approx::assert_relative_eq;

    fn chem() -> ScenarioParams {
        baseline_chemical().params
    }

    #[test]
    fn reference_design_dry_mass() {
        let b = size_vehicle(&chem(), &DesignPoint::new(15.0, 3500.0)).unwrap();
        assert!((b.m_dry - 1930.0).abs() / 1930.0 < 0.01, "m_dry = {}", b.m_dry);
    }

    #[test]
    fn zero_propellant_sizing() {
        let b = size_vehicle(&chem(), &DesignPoint::new(15.0, 0.0)).unwrap();
        assert_eq!(b.m_ps, 0.455);
        assert_relative_eq!(b.m_dry, (1100.0 + 0.455 + 1.1) / 0.73, max_relative = 1e-12);
        assert_eq!(b.dv_des, 0.0);
    }

    #[test]
    fn no_mass_growth_without_kappa() {
        let mut p = chem();
        p.kappa = 0.0;
        let a = size_vehicle(&p, &DesignPoint::new(5.0, 2000.0)).unwrap();
        let b = size_vehicle(&p, &DesignPoint::new(15.0, 2000.0)).unwrap();
        assert_eq!(a.m_base + a.m_pl, b.m_base + b.m_pl);
    }

    #[test]
    fn identities_hold() {
        let b = size_vehicle(&chem(), &DesignPoint::new(11.0, 2700.0)).unwrap();
        assert_eq!(b.m_wet, b.m_dry + b.m_p_des);
        let sum = b.m_base + b.m_pl + b.m_ps + b.m_str + b.m_adcs + b.m_serv;
        assert_relative_eq!(sum, b.m_dry, max_relative = 1e-12);
        assert_relative_eq!(b.m_str, 0.21 * b.m_dry, max_relative = 1e-12);
        assert_relative_eq!(b.m_adcs, 0.06 * b.m_dry, max_relative = 1e-12);
    }

    #[test]
    fn satellite_cost_at_reference_masses() {
        // Hand-entered masses, independent of the sizing path.
        let b = MassCostBreakdown {
            m_dry: 1930.0,
            m_pl: 500.0,
            m_serv: 1.1,
            m_wet: 5430.0,
            ..Default::default()
        };
        let c = cost_vehicle(&chem(), &b).unwrap();
        assert_relative_eq!(c.c_sat, 297.615_485_669_393_5, max_relative = 1e-9);
        assert_relative_eq!(c.c_lau, 54.3, max_relative = 1e-12);
        assert_relative_eq!(c.c_ioc, 1.2 * c.c_sat + 54.3, max_relative = 1e-12);
    }

    #[test]
    fn degenerate_ioc() {
        let mut p = chem();
        p.alpha_ins = 0.0;
        p.c_lau = 0.0;
        let c = design_vehicle(&p, &DesignPoint::new(15.0, 3500.0)).unwrap();
        assert_eq!(c.c_ioc, c.c_sat);
    }

    #[test]
    fn bus_mass_guard() {
        let b = MassCostBreakdown {
            m_dry: 500.0,
            m_pl: 500.0,
            m_serv: 1.1,
            ..Default::default()
        };
        assert!(matches!(cost_vehicle(&chem(), &b), Err(Error::NonPositiveBusMass(_))));
    }

    #[test]
    fn service_pricing() {
        let p = chem();
        assert_relative_eq!(oor_service_cost(&p, 100.0).unwrap(), 20.0, max_relative = 1e-12);
        assert_eq!(oor_service_cost(&p, 0.0).unwrap(), p.c_oor_f);
        assert!(matches!(
            oor_service_cost(&p, 101.0),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn rocket_equation_examples() {
        assert_eq!(propellant_for_dv(5430.0, 0.0, 230.0, STANDARD_GRAVITY), 0.0);
        let m = propellant_for_dv(5430.0, 1477.0, 230.0, STANDARD_GRAVITY);
        assert_relative_eq!(m, 2_608.964_592_718_271, max_relative = 1e-9);
    }

    #[test]
    fn full_life_propellant_meets_requirement() {
        let p = chem();
        let m = full_life_propellant(&p, 15.0).unwrap();
        let b = size_vehicle(&p, &DesignPoint::new(15.0, m)).unwrap();
        assert_relative_eq!(b.dv_des, 1477.0 + 750.0, max_relative = 1e-8);
        assert!(m > 3000.0 && m < 3500.0, "m = {m}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rocket_equation_inverse(m0 in 10.0f64..1e4, dv in 0.0f64..5000.0, isp in 100.0f64..4000.0) {
                let mp = propellant_for_dv(m0, dv, isp, STANDARD_GRAVITY);
                prop_assume!(m0 - mp > 0.0);
                let back = dv_capacity(m0, m0 - mp, isp, STANDARD_GRAVITY);
                prop_assert!((back - dv).abs() <= 1e-9 * dv.max(1e-300) || (dv == 0.0 && back.abs() < 1e-12));
            }

            #[test]
            fn monotone_in_design(t in 5.0f64..14.0, m in 1500.0f64..3400.0, dt in 0.0f64..1.0, dm in 0.0f64..100.0) {
                let p = chem();
                let a = design_vehicle(&p, &DesignPoint::new(t, m)).unwrap();
                let b = design_vehicle(&p, &DesignPoint::new(t + dt, m)).unwrap();
                let c = design_vehicle(&p, &DesignPoint::new(t, m + dm)).unwrap();
                for other in [b, c] {
                    prop_assert!(other.m_dry >= a.m_dry);
                    prop_assert!(other.m_wet >= a.m_wet);
                    prop_assert!(other.c_sat >= a.c_sat);
                    prop_assert!(other.c_ioc >= a.c_ioc);
                }
            }

            #[test]
            fn fixed_point_consistency(t in 5.0f64..15.0, m in 0.0f64..4000.0) {
                let p = chem();
                let b = size_vehicle(&p, &DesignPoint::new(t, m)).unwrap();
                prop_assert!((p.alpha_str * b.m_dry - b.m_str).abs() <= 1e-12 * b.m_str);
                prop_assert!((p.alpha_adcs * b.m_dry - b.m_adcs).abs() <= 1e-12 * b.m_adcs);
            }
        }
    }
}
