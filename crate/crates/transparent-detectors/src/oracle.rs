//! Exact reference: integrate the interaction-picture Schrödinger equation
//! for the detectors plus a truncated Fock mode, then compare with the
//! second-order formulas.
//!
//! `H(τ) = λ Σ_j Σ_{s1 s2} e^{i φ_{j,s1 s2}(τ)} σ_j^{s1} a^{s2}`, stepped with
//! the fourth-order commutator-free Magnus scheme.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::{build_rho_f, negativity_closed_form, negativity_numeric, TwoQubitDensityMatrix};
use crate::gates::{field_moments, FieldState};
use crate::linalg::CMatrix;
use crate::phase_integrals::{compute_m, layout_integrals, DetectorLayout, Sign};
use crate::trajectory::CycleSpec;
use crate::{Error, Result};

pub const DEFAULT_N_MAX: usize = 32;
pub const DEFAULT_STEPS: usize = 4096;
pub const STEP_TOL: f64 = 1e-9;
pub const LEAKAGE_TOL: f64 = 1e-8;
const MAX_STEPS: usize = 1 << 20;
/// Smallest truncation the leakage monitor can work with.
pub const MIN_N_MAX: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockConfig {
    /// Highest Fock level kept; the mode has `n_max + 1` levels.
    pub n_max: usize,
    pub steps_per_segment: usize,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self { n_max: DEFAULT_N_MAX, steps_per_segment: DEFAULT_STEPS }
    }
}

/// Coefficient of each `σ_j^{s1} a^{s2}` term, slot `(j * 2 + s1) * 2 + s2`.
struct Coupling {
    c: Vec<Complex64>,
}

struct Space {
    n_det: usize,
    n_max: usize,
    qdim: usize,
    sqrt_n: Vec<f64>,
}

impl Space {
    fn new(n_det: usize, n_max: usize) -> Self {
        Self { n_det, n_max, qdim: 1 << n_det, sqrt_n: (0..=n_max + 1).map(|n| (n as f64).sqrt()).collect() }
    }

    fn dim(&self) -> usize {
        self.qdim * (self.n_max + 1)
    }

    /// `out = Σ c σ^{s1} a^{s2} v`
    fn apply(&self, h: &Coupling, v: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for n in 0..=self.n_max {
            for q in 0..self.qdim {
                let amp = v[q + self.qdim * n];
                if amp == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..self.n_det {
                    let bit = 1 << j;
                    // σ⁺ raises, σ⁻ lowers
                    let (s1, q2) = if q & bit == 0 { (Sign::Plus, q | bit) } else { (Sign::Minus, q & !bit) };
                    let base = (j * 2 + s1.index()) * 2;
                    if n < self.n_max {
                        let c = h.c[base + Sign::Plus.index()] * self.sqrt_n[n + 1];
                        out[q2 + self.qdim * (n + 1)] += c * amp;
                    }
                    if n > 0 {
                        let c = h.c[base + Sign::Minus.index()] * self.sqrt_n[n];
                        out[q2 + self.qdim * (n - 1)] += c * amp;
                    }
                }
            }
        }
    }

    /// `exp(-i h B) v` by Taylor series.
    fn exp_apply(&self, b: &Coupling, h: f64, v: &mut [Complex64], scratch: &mut [Complex64]) {
        let mut term = v.to_vec();
        let norm0 = norm(v).max(1e-300);
        for m in 1..60 {
            self.apply(b, &term, scratch);
            let f = Complex64::new(0.0, -h / m as f64);
            for (t, s) in term.iter_mut().zip(scratch.iter()) {
                *t = s * f;
            }
            for (x, t) in v.iter_mut().zip(&term) {
                *x += t;
            }
            if norm(&term) < 1e-17 * norm0 {
                break;
            }
        }
    }

    fn top_population(&self, v: &[Complex64]) -> f64 {
        let lo = self.n_max.saturating_sub(1);
        (lo..=self.n_max).flat_map(|n| (0..self.qdim).map(move |q| (q, n))).map(|(q, n)| v[q + self.qdim * n].norm_sqr()).sum()
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Fock amplitudes of the initial mode state.
pub fn initial_field(field: &FieldState, n_max: usize) -> Result<Vec<Complex64>> {
    field.validate()?;
    let dim = n_max + 1;
    let mut amp = vec![Complex64::new(0.0, 0.0); dim];
    match *field {
        FieldState::Vacuum => amp[0] = Complex64::new(1.0, 0.0),
        FieldState::Coherent { alpha } => {
            amp[0] = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
            for n in 1..dim {
                amp[n] = amp[n - 1] * alpha / (n as f64).sqrt();
            }
            let s = norm(&amp);
            amp.iter_mut().for_each(|x| *x /= s);
        }
        FieldState::Squeezed { r, phi } => {
            let mut g = CMatrix::zeros(dim);
            let e = Complex64::from_polar(0.5 * r, -phi);
            for n in 0..dim.saturating_sub(2) {
                let s = ((n + 1) as f64 * (n + 2) as f64).sqrt();
                // (r/2)(e^{-iφ} a² - e^{iφ} a†²)
                g[(n, n + 2)] += e * s;
                g[(n + 2, n)] -= e.conj() * s;
            }
            let s = g.expm();
            amp = (0..dim).map(|i| s[(i, 0)]).collect();
            let exact = squeezed_amplitudes(r, phi, n_max);
            let overlap: Complex64 = exact.iter().zip(&amp).map(|(a, b)| a.conj() * b).sum();
            let fid = overlap.norm_sqr();
            if r <= 1.5 && fid < 1.0 - 1e-10 {
                return Err(Error::InitialStateFidelity(fid));
            }
        }
    }
    Ok(amp)
}

/// Analytic squeezed-vacuum amplitudes, truncated (not renormalised).
pub fn squeezed_amplitudes(r: f64, phi: f64, n_max: usize) -> Vec<Complex64> {
    let mut amp = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let ratio = -Complex64::from_polar(r.tanh(), phi);
    let mut c = Complex64::new(1.0 / r.cosh().sqrt(), 0.0);
    for m in 0..=n_max / 2 {
        amp[2 * m] = c;
        // c_{2m+2} / c_{2m} = ratio * sqrt((2m+1)(2m+2)) / (2(m+1))
        let mf = m as f64;
        c *= ratio * ((2.0 * mf + 1.0) * (2.0 * mf + 2.0)).sqrt() / (2.0 * (mf + 1.0));
    }
    amp
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub psi: Vec<Complex64>,
    /// Reduced detector state, index `Σ_j q_j 2^j`.
    pub rho_detectors: CMatrix,
    pub norm_drift: f64,
    /// Largest top-two-level population seen at any segment boundary.
    pub leakage: f64,
    pub steps_per_segment: usize,
}

struct Stepper<'a> {
    cycle: &'a CycleSpec,
    omega: f64,
    k: f64,
    offsets: &'a [f64],
    lambda: f64,
    space: Space,
}

impl Stepper<'_> {
    /// Coupling `Σ_w λ w e^{iφ(τ_w)}` summed over weighted times.
    fn coupling(&self, seg: usize, pts: &[(f64, f64)]) -> Coupling {
        let a = self.cycle.anchors()[seg];
        let s = self.cycle.segments()[seg];
        let slope = s.gamma() * (1.0 - s.velocity);
        let mut c = Vec::with_capacity(4 * self.offsets.len());
        for &off in self.offsets {
            for s1 in Sign::BOTH {
                for s2 in Sign::BOTH {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(tau, w) in pts {
                        let tmx = a.t - a.x + slope * (tau - a.tau) - off;
                        acc += Complex64::from_polar(w * self.lambda, s1.value() * self.omega * tau + s2.value() * self.k * tmx);
                    }
                    c.push(acc);
                }
            }
        }
        Coupling { c }
    }

    fn run(&self, psi0: &[Complex64], steps: usize) -> (Vec<Complex64>, f64) {
        let sq = 3f64.sqrt() / 6.0;
        let (c1, c2) = (0.5 - sq, 0.5 + sq);
        let (big, small) = (0.25 + sq, 0.25 - sq);
        let mut v = psi0.to_vec();
        let mut scratch = vec![Complex64::new(0.0, 0.0); v.len()];
        let mut leak = self.space.top_population(&v);
        for seg in 0..self.cycle.segments().len() {
            let (t0, t1) = (self.cycle.anchors()[seg].tau, self.cycle.anchors()[seg + 1].tau);
            let h = (t1 - t0) / steps as f64;
            for n in 0..steps {
                let t = t0 + h * n as f64;
                let (ta, tb) = (t + c1 * h, t + c2 * h);
                let first = self.coupling(seg, &[(ta, big), (tb, small)]);
                let second = self.coupling(seg, &[(ta, small), (tb, big)]);
                self.space.exp_apply(&first, h, &mut v, &mut scratch);
                self.space.exp_apply(&second, h, &mut v, &mut scratch);
            }
            leak = leak.max(self.space.top_population(&v));
        }
        (v, leak)
    }
}

/// Integrate from `|0...0> ⊗ field` across `cycle`, doubling the step count
/// until the final state moves by less than [`STEP_TOL`].
pub fn evolve_exact(
    cycle: &CycleSpec,
    omega: f64,
    k: f64,
    layout: &DetectorLayout,
    field: &FieldState,
    lambda: f64,
    cfg: &FockConfig,
) -> Result<EvolutionResult> {
    if cfg.n_max < MIN_N_MAX || cfg.steps_per_segment == 0 || layout.is_empty() {
        return Err(Error::InvalidInputs(format!("{cfg:?} with {} detectors", layout.len())));
    }
    let space = Space::new(layout.len(), cfg.n_max);
    let amp = initial_field(field, cfg.n_max)?;
    let mut psi0 = vec![Complex64::new(0.0, 0.0); space.dim()];
    for (n, a) in amp.iter().enumerate() {
        psi0[space.qdim * n] = *a;
    }
    let initial_leak = space.top_population(&psi0);
    if initial_leak >= LEAKAGE_TOL {
        return Err(Error::TruncationLeakage(initial_leak));
    }
    let qdim = space.qdim;
    let stepper = Stepper { cycle, omega, k, offsets: &layout.offsets, lambda, space };

    let mut steps = cfg.steps_per_segment;
    let (mut prev, _) = stepper.run(&psi0, steps);
    let (psi, leakage) = loop {
        if steps * 2 > MAX_STEPS {
            return Err(Error::StepNonConvergence(f64::NAN));
        }
        steps *= 2;
        let (next, leak) = stepper.run(&psi0, steps);
        let change = norm(&next.iter().zip(&prev).map(|(a, b)| a - b).collect::<Vec<_>>());
        if change < STEP_TOL {
            break (next, leak);
        }
        if steps * 2 > MAX_STEPS {
            return Err(Error::StepNonConvergence(change));
        }
        prev = next;
    };
    if leakage >= LEAKAGE_TOL {
        return Err(Error::TruncationLeakage(leakage));
    }
    let mut rho = CMatrix::zeros(qdim);
    for n in 0..=cfg.n_max {
        for q in 0..qdim {
            for q2 in 0..qdim {
                rho[(q, q2)] += psi[q + qdim * n] * psi[q2 + qdim * n].conj();
            }
        }
    }
    Ok(EvolutionResult { norm_drift: (norm(&psi) - 1.0).abs(), psi, rho_detectors: rho, leakage, steps_per_segment: steps })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub lambdas: Vec<f64>,
    /// Largest entry-wise gap between exact and second-order states.
    pub max_err: Vec<f64>,
    /// Least-squares slope of `ln max_err` against `ln λ`.
    pub fit_slope: f64,
    pub negativity_exact: Vec<f64>,
    pub negativity_closed_form: Vec<f64>,
    pub excitation_exact: Vec<f64>,
    pub excitation_second_order: Vec<f64>,
    pub leakage: f64,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }

    /// Excitation-probability gaps, one per λ.
    pub fn excitation_err(&self) -> Vec<f64> {
        self.excitation_exact.iter().zip(&self.excitation_second_order).map(|(a, b)| (a - b).abs()).collect()
    }

    /// Fails unless the slope is at least `min_slope` and every halving of
    /// λ shrinks the excitation gap by at least `min_shrink`.
    pub fn check(&self, min_slope: f64, min_shrink: f64) -> Result<()> {
        if !(self.fit_slope >= min_slope) {
            return Err(Error::ValidationFailed(format!("slope {} below {min_slope}", self.fit_slope)));
        }
        let err = self.excitation_err();
        for i in 1..self.lambdas.len() {
            let halvings = (self.lambdas[i - 1] / self.lambdas[i]).log2();
            let need = min_shrink.powf(halvings);
            if err[i] > 0.0 && err[i - 1] / err[i] < need {
                return Err(Error::ValidationFailed(format!(
                    "excitation gap shrank {}x between λ = {} and {}",
                    err[i - 1] / err[i],
                    self.lambdas[i - 1],
                    self.lambdas[i]
                )));
            }
        }
        Ok(())
    }
}

pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// At least three positive couplings with a common ratio.
pub fn check_lambdas(lambdas: &[f64]) -> std::result::Result<(), String> {
    if lambdas.len() < 3 || lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(format!("need at least three positive couplings, got {lambdas:?}"));
    }
    let q = lambdas[1] / lambdas[0];
    if (q - 1.0).abs() < 1e-12 || lambdas.windows(2).any(|w| ((w[1] / w[0]) / q - 1.0).abs() > 1e-9) {
        return Err(format!("couplings {lambdas:?} are not a geometric progression"));
    }
    Ok(())
}

/// Compare exact evolution with the second-order state at several λ.
pub fn validate_perturbative(
    cycle: &CycleSpec,
    omega: f64,
    k: f64,
    layout: &DetectorLayout,
    field: &FieldState,
    lambdas: &[f64],
    cfg: &FockConfig,
) -> Result<ConvergenceReport> {
    check_lambdas(lambdas).map_err(Error::InvalidInputs)?;
    let ints = layout_integrals(cycle, omega, k, layout);
    let m_term = compute_m(cycle, omega, k, layout, true)?;
    let moments = field_moments(field)?;
    let ka = k * (layout.offsets[1] - layout.offsets[0]);
    let mut rep = ConvergenceReport {
        lambdas: lambdas.to_vec(),
        max_err: Vec::new(),
        fit_slope: f64::NAN,
        negativity_exact: Vec::new(),
        negativity_closed_form: Vec::new(),
        excitation_exact: Vec::new(),
        excitation_second_order: Vec::new(),
        leakage: 0.0,
    };
    for &lambda in lambdas {
        let pair = evolve_exact(cycle, omega, k, layout, field, lambda, cfg)?;
        let pert = build_rho_f(&ints[0], &ints[1], field, lambda, m_term)?;
        let err = pair.rho_detectors.data.iter().zip(&pert.m.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        rep.max_err.push(err);
        let exact_state = TwoQubitDensityMatrix::new(pair.rho_detectors.clone());
        rep.negativity_exact.push(negativity_numeric(&exact_state).negativity);
        rep.negativity_closed_form.push(negativity_closed_form(m_term, ints[0].pp, field, lambda, ka)?.negativity);

        let single = evolve_exact(cycle, omega, k, &DetectorLayout::single(), field, lambda, cfg)?;
        rep.excitation_exact.push(single.rho_detectors[(1, 1)].re);
        rep.excitation_second_order.push(lambda * lambda * ints[0].pp.norm_sqr() * moments.a_adag.re);
        rep.leakage = rep.leakage.max(pair.leakage).max(single.leakage);
    }
    rep.fit_slope = fit_slope(&rep.lambdas, &rep.max_err);
    Ok(rep)
}
