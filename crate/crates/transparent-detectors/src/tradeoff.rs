//! Entangling-gate time against decoherence time on a transparent cycle.
//!
//! Per cycle the pair gains negativity `λ²/2 (|M| - 2 I² f(r, Θ))` while a
//! single detector decoheres at rate `λ² I² cosh² r / T`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::entanglement::squeeze_penalty;
use crate::fmt::g17;
use crate::{Error, Result};

/// `|M|` this many times `|I_{++}|²` counts as M-dominated.
pub const REGIME_THRESHOLD: f64 = 10.0;
/// `λ² max(|M|, I²)` above this leaves the perturbative regime.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffInputs {
    pub m_abs: f64,
    pub i_plus_abs: f64,
    pub r: f64,
    pub theta: f64,
    pub lambda: f64,
    /// Proper duration of one cycle.
    pub t_cycle: f64,
    /// Target negativity.
    pub n_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    MDominant,
    Comparable,
    Infeasible,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::MDominant => "M-dominant",
            Regime::Comparable => "comparable",
            Regime::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffRow {
    pub inputs: TradeoffInputs,
    /// Infinite when the per-cycle negativity is not positive.
    pub tau_gate: f64,
    /// Infinite when the signal integral vanishes.
    pub tau_dec: f64,
    pub ratio: f64,
    pub feasible: bool,
    pub regime: Regime,
    pub perturbative: bool,
}

impl TradeoffInputs {
    fn validate(&self) -> Result<()> {
        let ok = [self.m_abs, self.i_plus_abs, self.r, self.lambda, self.t_cycle, self.n_star]
            .iter()
            .all(|x| x.is_finite() && *x >= 0.0)
            && self.theta.is_finite()
            && self.lambda > 0.0
            && self.t_cycle > 0.0
            && self.n_star > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInputs(format!("{self:?}")))
        }
    }

    pub fn negativity_per_cycle(&self) -> f64 {
        let i2 = self.i_plus_abs * self.i_plus_abs;
        0.5 * self.lambda * self.lambda * (self.m_abs - 2.0 * i2 * squeeze_penalty(self.r, self.theta))
    }
}

pub fn tau_gate(x: &TradeoffInputs) -> Result<f64> {
    x.validate()?;
    let per = x.negativity_per_cycle();
    Ok(if per > 0.0 { x.n_star * x.t_cycle / per } else { f64::INFINITY })
}

pub fn tau_dec(x: &TradeoffInputs) -> Result<f64> {
    x.validate()?;
    let rate = x.lambda * x.lambda * x.i_plus_abs * x.i_plus_abs * x.r.cosh().powi(2);
    Ok(if rate > 0.0 { x.t_cycle / rate } else { f64::INFINITY })
}

pub fn evaluate(x: &TradeoffInputs) -> Result<TradeoffRow> {
    let (tg, td) = (tau_gate(x)?, tau_dec(x)?);
    let ratio = if tg.is_infinite() {
        f64::INFINITY
    } else if td.is_infinite() {
        0.0
    } else {
        tg / td
    };
    let i2 = x.i_plus_abs * x.i_plus_abs;
    let regime = if tg.is_infinite() {
        Regime::Infeasible
    } else if x.m_abs > REGIME_THRESHOLD * i2 {
        Regime::MDominant
    } else {
        Regime::Comparable
    };
    Ok(TradeoffRow {
        inputs: *x,
        tau_gate: tg,
        tau_dec: td,
        ratio,
        feasible: ratio < 1.0,
        regime,
        perturbative: x.lambda * x.lambda * x.m_abs.max(i2) <= PERTURBATIVE_LIMIT,
    })
}

pub fn write_csv<W: Write>(rows: &[TradeoffRow], mut w: W) -> Result<()> {
    writeln!(w, "M_abs,I_plus_abs,r,Theta,tau_gate,tau_dec,ratio,feasible,regime")?;
    for row in rows {
        let x = &row.inputs;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            g17(x.m_abs),
            g17(x.i_plus_abs),
            g17(x.r),
            g17(x.theta),
            g17(row.tau_gate),
            g17(row.tau_dec),
            g17(row.ratio),
            row.feasible,
            row.regime.as_str()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> TradeoffInputs {
        TradeoffInputs { m_abs: 100.0, i_plus_abs: 1.0, r: 0.0, theta: 0.0, lambda: 0.01, t_cycle: 78.5, n_star: 1.0 }
    }

    #[test]
    fn m_dominant_ratio() {
        let row = evaluate(&base()).unwrap();
        assert!((row.ratio - 2.0 / 98.0).abs() < 1e-14);
        assert!(row.feasible);
        assert_eq!(row.regime, Regime::MDominant);
    }

    #[test]
    fn below_threshold_is_infeasible() {
        let row = evaluate(&TradeoffInputs { m_abs: 1.5, ..base() }).unwrap();
        assert!(row.tau_gate.is_infinite() && !row.feasible);
        assert_eq!(row.regime, Regime::Infeasible);
    }

    #[test]
    fn silent_signal_never_decoheres() {
        let row = evaluate(&TradeoffInputs { i_plus_abs: 0.0, ..base() }).unwrap();
        assert!(row.tau_dec.is_infinite());
        assert_eq!(row.ratio, 0.0);
    }

    #[test]
    fn perturbativity_flag() {
        assert!(evaluate(&base()).unwrap().perturbative);
        assert!(!evaluate(&TradeoffInputs { lambda: 0.1, ..base() }).unwrap().perturbative);
        assert!(evaluate(&TradeoffInputs { t_cycle: 0.0, ..base() }).is_err());
    }
}
