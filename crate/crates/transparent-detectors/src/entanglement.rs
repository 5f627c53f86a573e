//! Two-detector state after one transparent window, to second order in the
//! coupling, and the negativity harvested into it.
//!
//! Basis order is `|00>, |10>, |01>, |11>` (index `q1 + 2 q2`).

use std::io::Write;

use num_complex::Complex64;

use crate::fmt::g17;
use crate::gates::{field_moments, FieldState};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::phase_integrals::{PhaseIntegralSet, Sign, BOUNDARY_TOL};
use crate::{Error, Result};

/// Hermitian, unit-trace 4x4 state.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDensityMatrix {
    pub m: CMatrix,
}

impl TwoQubitDensityMatrix {
    pub fn new(m: CMatrix) -> Self {
        assert_eq!(m.n, 4);
        Self { m }
    }

    /// Transpose on the first qubit.
    pub fn partial_transpose_first(&self) -> CMatrix {
        let mut out = CMatrix::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                let (i1, i2, j1, j2) = (i & 1, i >> 1, j & 1, j >> 1);
                out[(i, j)] = self.m[(j1 | (i2 << 1), i1 | (j2 << 1))];
            }
        }
        out
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    /// `[[[re, im], ...], ...]` rows.
    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<[f64; 2]>> =
            (0..4).map(|i| (0..4).map(|j| [self.m[(i, j)].re, self.m[(i, j)].im]).collect()).collect();
        serde_json::to_string(&rows).expect("plain data serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
            return Err(Error::Config("density matrix must be 4x4".into()));
        }
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|[a, b]| Complex64::new(*a, *b)).collect()).collect();
        Ok(Self::new(CMatrix::from_rows(&rows)))
    }
}

/// Assemble the second-order state for detectors `i1`, `i2` that start in
/// `|00>` with the field in `field`.
pub fn build_rho_f(
    i1: &PhaseIntegralSet,
    i2: &PhaseIntegralSet,
    field: &FieldState,
    lambda: f64,
    m_term: Complex64,
) -> Result<TwoQubitDensityMatrix> {
    let noise = i1.pm.norm().max(i2.pm.norm());
    if noise >= BOUNDARY_TOL {
        return Err(Error::TransparencyRequired(noise));
    }
    let f = field_moments(field)?;
    let l = Complex64::new(lambda, 0.0);
    let l2 = lambda * lambda;
    let i = Complex64::i();
    let (p1, p2) = (i1.pp, i2.pp);
    let (q1, q2) = (i1.mm, i2.mm);
    let aad = f.a_adag;
    let mut r = CMatrix::zeros(4);
    r[(0, 0)] = 1.0 - l2 * (p1.norm_sqr() + p2.norm_sqr()) * aad;
    r[(0, 1)] = i * l * q1 * f.a;
    r[(0, 2)] = i * l * q2 * f.a;
    r[(0, 3)] = 0.5 * l2 * m_term.conj() - l2 * q1 * q2 * f.aa;
    r[(1, 0)] = -i * l * p1 * f.a_dag;
    r[(2, 0)] = -i * l * p2 * f.a_dag;
    r[(1, 1)] = l2 * p1.norm_sqr() * aad;
    r[(1, 2)] = l2 * q2 * p1 * aad;
    r[(2, 1)] = l2 * p2 * q1 * aad;
    r[(2, 2)] = l2 * p2.norm_sqr() * aad;
    r[(3, 0)] = 0.5 * l2 * m_term - l2 * p1 * p2 * f.adag_adag;
    let mut h = r.hermitize();
    let tr = h.trace().re;
    h = h.scale(Complex64::new(1.0 / tr, 0.0));
    Ok(TwoQubitDensityMatrix::new(h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativityMethod {
    Numeric,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NegativityReport {
    pub negativity: f64,
    /// Partial-transpose spectrum, ascending (numeric route only).
    pub eigenvalues: Option<[f64; 4]>,
    pub m: Option<Complex64>,
    pub theta: Option<f64>,
    pub method: NegativityMethod,
}

/// Sum of the magnitudes of the negative partial-transpose eigenvalues.
pub fn negativity_numeric(rho: &TwoQubitDensityMatrix) -> NegativityReport {
    let ev = hermitian_eigenvalues(&rho.partial_transpose_first());
    let negativity = ev.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
    NegativityReport {
        negativity,
        eigenvalues: Some([ev[0], ev[1], ev[2], ev[3]]),
        m: None,
        theta: None,
        method: NegativityMethod::Numeric,
    }
}

/// `Θ = arg M - 2 arg I_{++} + φ + k a`.
pub fn big_theta(m_term: Complex64, i_pp: Complex64, phi: f64, ka: f64) -> f64 {
    m_term.arg() - 2.0 * i_pp.arg() + phi + ka
}

/// `cosh² r - sinh(2r) cos Θ / 2`, the squeezing penalty on the negativity.
pub fn squeeze_penalty(r: f64, theta: f64) -> f64 {
    r.cosh().powi(2) - 0.5 * (2.0 * r).sinh() * theta.cos()
}

/// Leading-order negativity `λ²/2 (|M| - 2 I² f(r, Θ))`, clamped at zero.
pub fn closed_form_negativity(m_abs: f64, i_abs: f64, r: f64, theta: f64, lambda: f64) -> f64 {
    (0.5 * lambda * lambda * (m_abs - 2.0 * i_abs * i_abs * squeeze_penalty(r, theta))).max(0.0)
}

/// Closed-form route. For coherent states only the centred moments enter,
/// so they match the vacuum.
pub fn negativity_closed_form(
    m_term: Complex64,
    i_pp: Complex64,
    field: &FieldState,
    lambda: f64,
    ka: f64,
) -> Result<NegativityReport> {
    field.validate()?;
    let r = match *field {
        FieldState::Squeezed { r, .. } => r,
        _ => 0.0,
    };
    let theta = big_theta(m_term, i_pp, field.phi(), ka);
    Ok(NegativityReport {
        negativity: closed_form_negativity(m_term.norm(), i_pp.norm(), r, theta, lambda),
        eigenvalues: None,
        m: Some(m_term),
        theta: Some(theta),
        method: NegativityMethod::ClosedForm,
    })
}

/// Squeezing that minimises [`squeeze_penalty`] at fixed Θ.
///
/// Negative values mean squeezing along the opposite quadrature.
pub fn optimal_squeezing(theta: f64) -> Result<f64> {
    let c = theta.cos();
    if c.abs() >= 1.0 - 1e-15 {
        return Err(Error::ThetaDegenerate(c));
    }
    Ok(0.5 * c.atanh())
}

/// `<ĝ ĝ†>` of the centred field operator `ĝ = b̂1 + b̂2†`.
pub fn gg_dagger_expectation(i_abs: f64, lambda: f64, field: &FieldState, theta: f64) -> Result<f64> {
    let f = field_moments(field)?;
    let a_mp = f.centered(Sign::Minus, Sign::Plus).re;
    let a_mm = f.centered(Sign::Minus, Sign::Minus).norm();
    Ok(lambda * lambda * i_abs * i_abs * (2.0 * a_mp - 1.0 - 2.0 * a_mm * theta.cos()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub r: f64,
    pub negativity: f64,
    pub negativity_vacuum: f64,
    /// NaN where Θ is degenerate.
    pub r_opt: f64,
}

/// Closed-form negativity over a Θ × r grid.
pub fn negativity_vs_r_sweep(m_abs: f64, i_abs: f64, thetas: &[f64], rs: &[f64], lambda: f64) -> Vec<SweepRow> {
    let vac = closed_form_negativity(m_abs, i_abs, 0.0, 0.0, lambda);
    let mut out = Vec::with_capacity(thetas.len() * rs.len());
    for &theta in thetas {
        let r_opt = optimal_squeezing(theta).unwrap_or(f64::NAN);
        for &r in rs {
            out.push(SweepRow {
                theta,
                r,
                negativity: closed_form_negativity(m_abs, i_abs, r, theta, lambda),
                negativity_vacuum: vac,
                r_opt,
            });
        }
    }
    out
}

/// Best `(Θ, r, N)` per Θ; ties keep the smaller r.
pub fn sweep_argmax(rows: &[SweepRow]) -> Vec<(f64, f64, f64)> {
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    for row in rows {
        match out.last_mut() {
            Some(best) if best.0 == row.theta => {
                if row.negativity > best.2 {
                    *best = (row.theta, row.r, row.negativity);
                }
            }
            _ => out.push((row.theta, row.r, row.negativity)),
        }
    }
    out
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> Result<()> {
    writeln!(w, "Theta,r,negativity,negativity_vacuum,r_opt")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            g17(row.theta),
            g17(row.r),
            g17(row.negativity),
            g17(row.negativity_vacuum),
            g17(row.r_opt)
        )?;
    }
    Ok(())
}
