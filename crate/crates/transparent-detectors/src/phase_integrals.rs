//! Phase integrals `I_{s1 s2} = ∫ dτ exp(i s1 Ω τ + i s2 k (t - x))` over a
//! worldline window, and the τ-ordered second-order term `M`.
//!
//! On a uniform segment the exponent is linear in τ, so each segment
//! contributes a closed-form geometric term.

use num_complex::Complex64;

use crate::quadrature::{gl32_refined, integrate_adaptive};
use crate::trajectory::{Anchor, CycleSpec, Segment};
use crate::{Error, Result};

/// Below this `|w Δτ|` the closed form switches to its Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-6;
/// Boundary terms smaller than this are treated as zero on transparent cycles.
pub const BOUNDARY_TOL: f64 = 1e-8;
const M_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

/// Levi-Civita symbol on signs with `eps(-, +) = +1`.
pub fn epsilon(a: Sign, b: Sign) -> f64 {
    match (a, b) {
        (Sign::Minus, Sign::Plus) => 1.0,
        (Sign::Plus, Sign::Minus) => -1.0,
        _ => 0.0,
    }
}

/// Spatial offsets `a_j` of co-moving detectors; detector 0 sits at offset 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorLayout {
    pub offsets: Vec<f64>,
}

impl DetectorLayout {
    pub fn single() -> Self {
        Self { offsets: vec![0.0] }
    }

    pub fn pair(a: f64) -> Self {
        Self { offsets: vec![0.0, a] }
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// The four phase integrals of one detector over one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseIntegralSet {
    pub pp: Complex64,
    pub pm: Complex64,
    pub mp: Complex64,
    pub mm: Complex64,
    pub omega: f64,
    pub k: f64,
    pub detector: usize,
}

impl PhaseIntegralSet {
    pub fn get(&self, s1: Sign, s2: Sign) -> Complex64 {
        match (s1, s2) {
            (Sign::Plus, Sign::Plus) => self.pp,
            (Sign::Plus, Sign::Minus) => self.pm,
            (Sign::Minus, Sign::Plus) => self.mp,
            (Sign::Minus, Sign::Minus) => self.mm,
        }
    }

    /// The noise integral that transparency drives to zero.
    pub fn i_minus(&self) -> Complex64 {
        self.pm
    }

    /// The signal integral that sets gate strength.
    pub fn i_plus(&self) -> Complex64 {
        self.pp
    }
}

fn phase(omega: f64, k: f64, s1: Sign, s2: Sign, tau: f64, t_minus_x: f64) -> f64 {
    s1.value() * omega * tau + s2.value() * k * t_minus_x
}

/// Detuning of `(s1, s2)` on a segment: d(phase)/dτ.
fn detuning(seg: &Segment, omega: f64, k: f64, s1: Sign, s2: Sign) -> f64 {
    s1.value() * omega + s2.value() * k * seg.gamma() * (1.0 - seg.velocity)
}

/// `∫_0^Δ e^{i w u} du` with a Taylor branch near `w Δ = 0`.
fn geometric(w: f64, delta: f64) -> Complex64 {
    let x = w * delta;
    if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        return Complex64::new(1.0 - x2 / 6.0, x / 2.0 - x2 * x / 24.0) * delta;
    }
    // e^{ix/2} sin(x/2)/(x/2) keeps precision for moderate x
    let half = 0.5 * x;
    Complex64::from_polar(delta * half.sin() / half, half)
}

/// Closed-form contribution of one segment starting at `anchor`.
pub fn segment_integral(seg: &Segment, anchor: &Anchor, omega: f64, k: f64, s1: Sign, s2: Sign) -> Complex64 {
    let w = detuning(seg, omega, k, s1, s2);
    let ph0 = phase(omega, k, s1, s2, anchor.tau, anchor.t - anchor.x);
    Complex64::from_polar(1.0, ph0) * geometric(w, seg.proper_duration())
}

fn offset_factor(k: f64, s2: Sign, offset: f64) -> Complex64 {
    Complex64::from_polar(1.0, -s2.value() * k * offset)
}

/// All four integrals over the cycle for a detector displaced by `offset`.
pub fn cycle_integrals(cycle: &CycleSpec, omega: f64, k: f64, offset: f64) -> PhaseIntegralSet {
    let mut v = [Complex64::new(0.0, 0.0); 4];
    for (i, seg) in cycle.segments().iter().enumerate() {
        let a = &cycle.anchors()[i];
        for (slot, (s1, s2)) in SIGN_PAIRS.iter().enumerate() {
            v[slot] += segment_integral(seg, a, omega, k, *s1, *s2);
        }
    }
    for (slot, (_, s2)) in SIGN_PAIRS.iter().enumerate() {
        v[slot] *= offset_factor(k, *s2, offset);
    }
    PhaseIntegralSet { pp: v[0], pm: v[1], mp: v[2], mm: v[3], omega, k, detector: 0 }
}

/// One [`PhaseIntegralSet`] per detector of `layout`.
pub fn layout_integrals(cycle: &CycleSpec, omega: f64, k: f64, layout: &DetectorLayout) -> Vec<PhaseIntegralSet> {
    let base = cycle_integrals(cycle, omega, k, 0.0);
    layout
        .offsets
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let f = |s2| offset_factor(k, s2, a);
            PhaseIntegralSet {
                pp: base.pp * f(Sign::Plus),
                pm: base.pm * f(Sign::Minus),
                mp: base.mp * f(Sign::Plus),
                mm: base.mm * f(Sign::Minus),
                detector: j,
                ..base
            }
        })
        .collect()
}

const SIGN_PAIRS: [(Sign, Sign); 4] =
    [(Sign::Plus, Sign::Plus), (Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus), (Sign::Minus, Sign::Minus)];

fn slot(s1: Sign, s2: Sign) -> usize {
    2 * s1.index() + s2.index()
}

/// Reference value by adaptive quadrature of the raw integrand.
pub fn quadrature_integral(
    cycle: &CycleSpec,
    omega: f64,
    k: f64,
    s1: Sign,
    s2: Sign,
    offset: f64,
    rel_tol: f64,
) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for (i, seg) in cycle.segments().iter().enumerate() {
        let a = cycle.anchors()[i];
        let (g, v) = (seg.gamma(), seg.velocity);
        let f = |tau: f64| {
            let dt = (tau - a.tau) * g;
            let (t, x) = (a.t + dt, a.x + v * dt);
            Complex64::from_polar(1.0, phase(omega, k, s1, s2, tau, t - x - offset))
        };
        let end = cycle.anchors()[i + 1].tau;
        total += integrate_adaptive(f, a.tau, end, rel_tol, 1e-3 * rel_tol * (end - a.tau))?;
    }
    Ok(total)
}

/// Running integrals `I_{s1 s2}(τ)` measured from the start of a window.
#[derive(Debug, Clone)]
pub struct RunningIntegrals<'a> {
    cycle: &'a CycleSpec,
    omega: f64,
    k: f64,
    /// prefix[i][slot] = integral up to the start of segment i
    prefix: Vec<[Complex64; 4]>,
}

impl<'a> RunningIntegrals<'a> {
    pub fn new(cycle: &'a CycleSpec, omega: f64, k: f64) -> Self {
        let mut prefix = Vec::with_capacity(cycle.segments().len() + 1);
        let mut acc = [Complex64::new(0.0, 0.0); 4];
        prefix.push(acc);
        for (i, seg) in cycle.segments().iter().enumerate() {
            let a = &cycle.anchors()[i];
            for (s1, s2) in SIGN_PAIRS {
                acc[slot(s1, s2)] += segment_integral(seg, a, omega, k, s1, s2);
            }
            prefix.push(acc);
        }
        Self { cycle, omega, k, prefix }
    }

    pub fn cycle(&self) -> &CycleSpec {
        self.cycle
    }

    /// Integrand `dI/dτ` at τ.
    pub fn density(&self, tau: f64, s1: Sign, s2: Sign, offset: f64) -> Complex64 {
        let (t, x) = self.cycle.event_at(tau);
        Complex64::from_polar(1.0, phase(self.omega, self.k, s1, s2, tau, t - x - offset))
    }

    /// `I_{s1 s2}` accumulated from the window start up to τ.
    pub fn value(&self, tau: f64, s1: Sign, s2: Sign, offset: f64) -> Complex64 {
        let c = self.cycle;
        if c.segments().is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let i = c.segment_at(tau);
        let (seg, a) = (&c.segments()[i], &c.anchors()[i]);
        let w = detuning(seg, self.omega, self.k, s1, s2);
        let ph0 = phase(self.omega, self.k, s1, s2, a.tau, a.t - a.x);
        let partial = Complex64::from_polar(1.0, ph0) * geometric(w, tau - a.tau);
        (self.prefix[i][slot(s1, s2)] + partial) * offset_factor(self.k, s2, offset)
    }

    /// Window totals for the four sign pairs.
    pub fn total(&self, s1: Sign, s2: Sign, offset: f64) -> Complex64 {
        self.prefix.last().unwrap()[slot(s1, s2)] * offset_factor(self.k, s2, offset)
    }

    /// `∫ dτ dI_{j,s1 s2}(τ) I_{l,s3 s4}(τ)` with τ-ordering built in.
    ///
    /// Each segment uses Gauss–Legendre 32 refined by halving.
    pub fn ordered_product(&self, first: (f64, Sign, Sign), second: (f64, Sign, Sign)) -> Result<Complex64> {
        let (a1, s1, s2) = first;
        let (a2, s3, s4) = second;
        let c = self.cycle;
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..c.segments().len() {
            let (lo, hi) = (c.anchors()[i].tau, c.anchors()[i + 1].tau);
            let seg_val = |tau: f64| {
                let tau = tau.clamp(lo, hi);
                self.density(tau, s1, s2, a1) * self.value(tau, s3, s4, a2)
            };
            total += gl32_refined(&seg_val, lo, hi, M_REL_TOL, 1e-15 * (hi - lo))?;
        }
        Ok(total)
    }
}

/// Second-order term `M` for a two-detector layout.
///
/// `M = (I1++ I2+- + I2++ I1+-) - 2 ∫ (dI1+- I2++ + dI2+- I1++)`; with
/// `transparent` set the boundary part is checked to vanish and dropped.
pub fn compute_m(cycle: &CycleSpec, omega: f64, k: f64, layout: &DetectorLayout, transparent: bool) -> Result<Complex64> {
    if layout.len() != 2 {
        return Err(Error::DetectorCount { expected: 2, got: layout.len() });
    }
    let (a1, a2) = (layout.offsets[0], layout.offsets[1]);
    let run = RunningIntegrals::new(cycle, omega, k);
    let (p, m) = (Sign::Plus, Sign::Minus);
    let boundary = run.total(p, p, a1) * run.total(p, m, a2) + run.total(p, p, a2) * run.total(p, m, a1);
    let ordered = run.ordered_product((a1, p, m), (a2, p, p))? + run.ordered_product((a2, p, m), (a1, p, p))?;
    if transparent {
        if boundary.norm() >= BOUNDARY_TOL {
            return Err(Error::TransparencyAssertionFailed(boundary.norm()));
        }
        return Ok(-2.0 * ordered);
    }
    Ok(boundary - 2.0 * ordered)
}
