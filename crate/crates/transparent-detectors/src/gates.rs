//! Gates induced by driving the field mode on a transparent cycle.
//!
//! To first order a coherent drive `α` rotates a detector about an axis in
//! the x-y plane set by `α* I_{++}`; the second-order shift `δ` tilts the
//! axis toward z.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::phase_integrals::{epsilon, DetectorLayout, RunningIntegrals, Sign};
use crate::trajectory::CycleSpec;
use crate::{Error, Result};

pub const DEFAULT_DRIVE_CEILING: f64 = 100.0;

/// Initial state of the single field mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldState {
    Vacuum,
    Coherent { alpha: Complex64 },
    /// `S(r, φ)|0>` with `S = exp(r/2 (e^{-iφ} a² - e^{iφ} a†²))`.
    Squeezed { r: f64, phi: f64 },
}

impl FieldState {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldState::Vacuum => Ok(()),
            FieldState::Coherent { alpha } if alpha.re.is_finite() && alpha.im.is_finite() => Ok(()),
            FieldState::Squeezed { r, phi } if r.is_finite() && r >= 0.0 && phi.is_finite() => Ok(()),
            bad => Err(Error::InvalidFieldState(format!("{bad:?}"))),
        }
    }

    /// Squeezing phase, zero for unsqueezed states.
    pub fn phi(&self) -> f64 {
        match *self {
            FieldState::Squeezed { phi, .. } => phi,
            _ => 0.0,
        }
    }
}

/// First and second moments of the mode; `a^+` is `a†`, `a^-` is `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentTable {
    pub a: Complex64,
    pub a_dag: Complex64,
    pub aa: Complex64,
    pub adag_adag: Complex64,
    pub adag_a: Complex64,
    pub a_adag: Complex64,
}

impl MomentTable {
    pub fn mean(&self, s: Sign) -> Complex64 {
        match s {
            Sign::Plus => self.a_dag,
            Sign::Minus => self.a,
        }
    }

    /// `<a^{s1} a^{s2}>`.
    pub fn ordered(&self, s1: Sign, s2: Sign) -> Complex64 {
        match (s1, s2) {
            (Sign::Plus, Sign::Plus) => self.adag_adag,
            (Sign::Plus, Sign::Minus) => self.adag_a,
            (Sign::Minus, Sign::Plus) => self.a_adag,
            (Sign::Minus, Sign::Minus) => self.aa,
        }
    }

    /// `<a^{s1} a^{s2}> - <a^{s1}><a^{s2}>`.
    pub fn centered(&self, s1: Sign, s2: Sign) -> Complex64 {
        self.ordered(s1, s2) - self.mean(s1) * self.mean(s2)
    }
}

pub fn field_moments(state: &FieldState) -> Result<MomentTable> {
    state.validate()?;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    Ok(match *state {
        FieldState::Vacuum => {
            MomentTable { a: zero, a_dag: zero, aa: zero, adag_adag: zero, adag_a: zero, a_adag: one }
        }
        FieldState::Coherent { alpha } => {
            let n = alpha.norm_sqr();
            MomentTable {
                a: alpha,
                a_dag: alpha.conj(),
                aa: alpha * alpha,
                adag_adag: (alpha * alpha).conj(),
                adag_a: n.into(),
                a_adag: (n + 1.0).into(),
            }
        }
        FieldState::Squeezed { r, phi } => {
            let sc = -r.sinh() * r.cosh();
            MomentTable {
                a: zero,
                a_dag: zero,
                aa: Complex64::from_polar(sc, phi),
                adag_adag: Complex64::from_polar(sc, -phi),
                adag_a: r.sinh().powi(2).into(),
                a_adag: r.cosh().powi(2).into(),
            }
        }
    })
}

/// Second-order coefficients of the effective Hamiltonian over one cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct EffHamCoeffs {
    n_det: usize,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    /// Proper duration of the cycle.
    pub cycle_t: f64,
}

impl EffHamCoeffs {
    pub fn detectors(&self) -> usize {
        self.n_det
    }

    /// `A^{(jk)}_{s1 s3}`.
    pub fn a(&self, j: usize, k: usize, s1: Sign, s3: Sign) -> Complex64 {
        self.a[((j * self.n_det + k) * 2 + s1.index()) * 2 + s3.index()]
    }

    /// `B^{(j)}_{s2 s4}`.
    pub fn b(&self, j: usize, s2: Sign, s4: Sign) -> Complex64 {
        self.b[(j * 2 + s2.index()) * 2 + s4.index()]
    }
}

/// `A^{(jk)}_{s1s3} = -1/2 Σ ∫ dI_{j,s1s2} I_{k,s3s4} ε_{s2s4}` and
/// `B^{(j)}_{s2s4} = 1/2 Σ ∫ dI_{j,s1s2} I_{j,s3s4} ε_{s1s3}`.
pub fn compute_ab(cycle: &CycleSpec, omega: f64, k: f64, layout: &DetectorLayout) -> Result<EffHamCoeffs> {
    let n = layout.len();
    let run = RunningIntegrals::new(cycle, omega, k);
    let off = &layout.offsets;
    let mut a = Vec::with_capacity(4 * n * n);
    for j in 0..n {
        for kk in 0..n {
            for s1 in Sign::BOTH {
                for s3 in Sign::BOTH {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for s2 in Sign::BOTH {
                        let s4 = s2.flip();
                        acc += run.ordered_product((off[j], s1, s2), (off[kk], s3, s4))? * epsilon(s2, s4);
                    }
                    a.push(-0.5 * acc);
                }
            }
        }
    }
    let mut b = Vec::with_capacity(4 * n);
    for j in 0..n {
        for s2 in Sign::BOTH {
            for s4 in Sign::BOTH {
                let mut acc = Complex64::new(0.0, 0.0);
                for s1 in Sign::BOTH {
                    let s3 = s1.flip();
                    acc += run.ordered_product((off[j], s1, s2), (off[j], s3, s4))? * epsilon(s1, s3);
                }
                b.push(0.5 * acc);
            }
        }
    }
    Ok(EffHamCoeffs { n_det: n, a, b, cycle_t: cycle.proper_duration() })
}

/// Second-order shift `δ_j = Σ B_{s2s4} <a^{s4} a^{s2}> - 1/2 Σ A^{(jj)}_{s2s4} ε_{s2s4}`.
pub fn contract_delta(coeffs: &EffHamCoeffs, moments: &MomentTable, j: usize) -> Complex64 {
    let mut d = Complex64::new(0.0, 0.0);
    for s2 in Sign::BOTH {
        for s4 in Sign::BOTH {
            d += coeffs.b(j, s2, s4) * moments.ordered(s4, s2);
            d -= 0.5 * coeffs.a(j, j, s2, s4) * epsilon(s2, s4);
        }
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub axis: [f64; 3],
    pub angle: f64,
}

/// Single-qubit rotation produced by drive `alpha` over `cycles` cycles.
pub fn single_qubit_rotation(
    i_plus: Complex64,
    delta: Complex64,
    alpha: Complex64,
    lambda: f64,
    cycles: u32,
) -> Result<Rotation> {
    let c = alpha.conj() * i_plus;
    let z = (Complex64::new(0.0, -lambda) * delta).re;
    let n = [c.re, -c.im, z];
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if len == 0.0 {
        return Err(Error::ZeroRotation);
    }
    Ok(Rotation { axis: [n[0] / len, n[1] / len, n[2] / len], angle: 2.0 * lambda * len * cycles as f64 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GatePlan {
    pub alpha: Complex64,
    pub cycles: u32,
    /// Achieved axis, which may tilt away from the target when `δ ≠ 0`.
    pub axis: [f64; 3],
    pub angle: f64,
    /// Angle between achieved and target axes.
    pub tilt_diagnostic: f64,
}

#[derive(Serialize, Deserialize)]
struct GatePlanJson {
    alpha_re: f64,
    alpha_im: f64,
    cycles: u32,
    axis: [f64; 3],
    angle: f64,
    tilt_diagnostic: f64,
}

impl GatePlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GatePlanJson {
            alpha_re: self.alpha.re,
            alpha_im: self.alpha.im,
            cycles: self.cycles,
            axis: self.axis,
            angle: self.angle,
            tilt_diagnostic: self.tilt_diagnostic,
        })
        .expect("plain data serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: GatePlanJson = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Self {
            alpha: Complex64::new(j.alpha_re, j.alpha_im),
            cycles: j.cycles,
            axis: j.axis,
            angle: j.angle,
            tilt_diagnostic: j.tilt_diagnostic,
        })
    }
}

/// Smallest cycle count and matching drive that realise the target rotation.
pub fn plan_gate(
    target_axis: [f64; 3],
    target_angle: f64,
    i_plus: Complex64,
    delta: Complex64,
    lambda: f64,
    max_cycles: u32,
    ceiling: f64,
) -> Result<GatePlan> {
    let len = target_axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(len > 0.0) || !(target_angle > 0.0) || !(lambda > 0.0) {
        return Err(Error::Unreachable("need a nonzero axis, positive angle and coupling".into()));
    }
    let t = target_axis.map(|x| x / len);
    let z0 = (Complex64::new(0.0, -lambda) * delta).re;
    let rho = t[0].hypot(t[1]);
    let finish = |alpha: Complex64, cycles: u32| {
        let rot = single_qubit_rotation(i_plus, delta, alpha, lambda, cycles)?;
        let dot: f64 = rot.axis.iter().zip(&t).map(|(a, b)| a * b).sum();
        Ok(GatePlan { alpha, cycles, axis: rot.axis, angle: rot.angle, tilt_diagnostic: dot.clamp(-1.0, 1.0).acos() })
    };

    if rho < 1e-12 {
        // pure z rotation: only the shift can supply it, with no drive
        if z0 == 0.0 || z0.signum() != t[2].signum() {
            return Err(Error::Unreachable("no drive-free rotation about this z direction".into()));
        }
        let n = target_angle / (2.0 * lambda * z0.abs());
        let cycles = n.round();
        if (n - cycles).abs() > 1e-9 || cycles < 1.0 || cycles > max_cycles as f64 {
            return Err(Error::Unreachable(format!("z rotation needs {n} cycles")));
        }
        return finish(Complex64::new(0.0, 0.0), cycles as u32);
    }
    if z0 == 0.0 && t[2].abs() > 1e-12 {
        return Err(Error::Unreachable("axis leaves the x-y plane but the shift vanishes".into()));
    }
    if i_plus.norm() == 0.0 {
        return Err(Error::Unreachable("signal integral vanishes".into()));
    }
    let psi = t[1].atan2(t[0]);
    for cycles in 1..=max_cycles {
        let n_len = target_angle / (cycles as f64 * 2.0 * lambda);
        let c2 = n_len * n_len - z0 * z0;
        if c2 < 0.0 {
            if cycles == 1 {
                return Err(Error::Unreachable("the shift alone over-rotates".into()));
            }
            break;
        }
        let c = Complex64::from_polar(c2.sqrt(), -psi);
        let alpha = (c / i_plus).conj();
        if alpha.norm() <= ceiling {
            return finish(alpha, cycles);
        }
    }
    Err(Error::DriveCeilingExceeded(ceiling))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_moments() {
        let m = field_moments(&FieldState::Vacuum).unwrap();
        assert_eq!(m.a_adag, c(1.0, 0.0));
        assert_eq!(m.adag_a, c(0.0, 0.0));
        assert_eq!(m.centered(Sign::Minus, Sign::Plus), c(1.0, 0.0));
    }

    #[test]
    fn coherent_centered_moments_are_vacuum() {
        let m = field_moments(&FieldState::Coherent { alpha: c(1.5, -0.7) }).unwrap();
        assert!((m.centered(Sign::Minus, Sign::Plus) - 1.0).norm() < 1e-14);
        assert!(m.centered(Sign::Plus, Sign::Plus).norm() < 1e-14);
        assert!(m.centered(Sign::Minus, Sign::Minus).norm() < 1e-14);
    }

    #[test]
    fn squeezed_moments() {
        let m = field_moments(&FieldState::Squeezed { r: 0.8, phi: 0.3 }).unwrap();
        assert!((m.adag_a.re - 0.8f64.sinh().powi(2)).abs() < 1e-14);
        assert!((m.a_adag - m.adag_a - 1.0).norm() < 1e-14);
        assert!((m.adag_adag - m.aa.conj()).norm() < 1e-15);
        assert!((m.adag_adag.norm() - 0.5 * 1.6f64.sinh()).abs() < 1e-14);
        assert!(field_moments(&FieldState::Squeezed { r: -0.1, phi: 0.0 }).is_err());
    }

    #[test]
    fn rotation_examples() {
        let r = single_qubit_rotation(c(0.7, 0.0), c(0.0, 0.2), c(0.0, 0.0), 0.1, 1).unwrap();
        assert_eq!(r.axis, [0.0, 0.0, 1.0]);
        assert!((r.angle - 2.0 * 0.1 * 0.1 * 0.2).abs() < 1e-16);
        let r = single_qubit_rotation(c(0.7, 0.0), c(0.0, 0.0), c(0.0, 0.0), 0.1, 1);
        assert_eq!(r, Err(Error::ZeroRotation));
        // α* I = i: axis -y
        let r = single_qubit_rotation(c(1.0, 0.0), c(0.0, 0.0), c(0.0, -1.0), 0.1, 3).unwrap();
        assert!((r.axis[1] + 1.0).abs() < 1e-15);
        assert!((r.angle - 0.6).abs() < 1e-15);
    }

    #[test]
    fn plan_sigma_x_pi() {
        let ip = Complex64::from_polar(0.79, 1.1);
        let p = plan_gate([1.0, 0.0, 0.0], PI, ip, c(0.0, 0.0), 0.05, 100, 100.0).unwrap();
        // α* I real positive
        assert!((p.alpha.arg() - ip.arg()).abs() < 1e-12);
        assert!((p.angle - PI).abs() < 1e-12);
        assert!(p.tilt_diagnostic < 1e-9);
    }

    #[test]
    fn plan_errors() {
        let ip = c(0.5, 0.2);
        let r = plan_gate([0.0, 0.6, 0.8], 1.0, ip, c(0.0, 0.0), 0.01, 10, 100.0);
        assert!(matches!(r, Err(Error::Unreachable(_))));
        let r = plan_gate([1.0, 0.0, 0.0], PI, ip, c(0.0, 0.0), 1e-4, 2, 100.0);
        assert!(matches!(r, Err(Error::DriveCeilingExceeded(_))));
    }

    #[test]
    fn plan_json_round_trip() {
        let p = GatePlan { alpha: c(1.0, -2.0), cycles: 3, axis: [0.0, 1.0, 0.0], angle: 1.5, tilt_diagnostic: 0.0 };
        let j = p.to_json();
        assert!(j.contains("\"alpha_re\"") && j.contains("\"tilt_diagnostic\""));
        assert_eq!(GatePlan::from_json(&j).unwrap(), p);
    }
}
