//! Piecewise-inertial worldlines in 1+1 dimensions (c = 1).
//!
//! A segment moves at constant velocity `v` for a coordinate duration `T`,
//! which takes proper time `T / gamma`. A [`CycleSpec`] chains segments and
//! caches the `(t, x, tau)` anchor at every segment boundary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Positions closer than this count as "returned to start".
pub const CYCLIC_TOL: f64 = 1e-12;

pub fn lorentz_gamma(v: f64) -> f64 {
    1.0 / (1.0 - v * v).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(rename = "v")]
    pub velocity: f64,
    #[serde(rename = "T")]
    pub coord_duration: f64,
}

impl Segment {
    pub fn new(velocity: f64, coord_duration: f64) -> Result<Self> {
        if !velocity.is_finite() || velocity.abs() >= 1.0 {
            return Err(Error::InvalidSegment(format!("|v| = {velocity} must be below 1")));
        }
        if !coord_duration.is_finite() || coord_duration <= 0.0 {
            return Err(Error::InvalidSegment(format!(
                "duration {coord_duration} must be positive"
            )));
        }
        Ok(Self { velocity, coord_duration })
    }

    pub fn gamma(&self) -> f64 {
        lorentz_gamma(self.velocity)
    }

    pub fn proper_duration(&self) -> f64 {
        self.coord_duration / self.gamma()
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.velocity, self.coord_duration).map(|_| ())
    }
}

/// Event on the worldline, tagged with the detector's proper time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub t: f64,
    pub x: f64,
    pub tau: f64,
}

/// Ordered segments plus derived boundary anchors.
///
/// `anchors[i]` is where segment `i` starts; the final anchor is the end of
/// the cycle, so there is always one more anchor than segment.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleSpec {
    segments: Vec<Segment>,
    anchors: Vec<Anchor>,
    cyclic: bool,
}

impl CycleSpec {
    /// Zero-length window sitting at a single event.
    pub fn empty(t0: f64, x0: f64, tau0: f64) -> Self {
        Self { segments: Vec::new(), anchors: vec![Anchor { t: t0, x: x0, tau: tau0 }], cyclic: true }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    pub fn start(&self) -> Anchor {
        self.anchors[0]
    }

    pub fn end(&self) -> Anchor {
        *self.anchors.last().unwrap()
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn proper_duration(&self) -> f64 {
        self.end().tau - self.start().tau
    }

    pub fn coord_duration(&self) -> f64 {
        self.end().t - self.start().t
    }

    /// Segment index containing proper time `tau` (clamped to the window).
    pub fn segment_at(&self, tau: f64) -> usize {
        let n = self.segments.len();
        if n == 0 {
            return 0;
        }
        let idx = self.anchors[1..].partition_point(|a| a.tau <= tau);
        idx.min(n - 1)
    }

    /// `(t, x)` at proper time `tau`.
    pub fn event_at(&self, tau: f64) -> (f64, f64) {
        if self.segments.is_empty() {
            let a = self.start();
            return (a.t, a.x);
        }
        let i = self.segment_at(tau);
        let (a, s) = (self.anchors[i], self.segments[i]);
        let dt = (tau - a.tau) * s.gamma();
        (a.t + dt, a.x + s.velocity * dt)
    }

    /// `points_per_segment` evenly spaced `(tau, t, x)` samples per segment.
    pub fn sample_worldline(&self, points_per_segment: usize) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(self.segments.len() * points_per_segment);
        for (i, s) in self.segments.iter().enumerate() {
            let a = self.anchors[i];
            let dtau = s.proper_duration();
            for j in 0..points_per_segment {
                let f = j as f64 / (points_per_segment.max(2) - 1) as f64;
                let dt = f * s.coord_duration;
                out.push([a.tau + f * dtau, a.t + dt, a.x + s.velocity * dt]);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CycleSpecJson::from(self)).expect("plain data serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: CycleSpecJson = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        raw.try_into()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CycleSpecJson {
    segments: Vec<Segment>,
    t0: f64,
    x0: f64,
    tau0: f64,
}

impl From<&CycleSpec> for CycleSpecJson {
    fn from(c: &CycleSpec) -> Self {
        let a = c.start();
        Self { segments: c.segments.clone(), t0: a.t, x0: a.x, tau0: a.tau }
    }
}

impl TryFrom<CycleSpecJson> for CycleSpec {
    type Error = Error;
    fn try_from(raw: CycleSpecJson) -> Result<Self> {
        build_cycle(&raw.segments, raw.t0, raw.x0, raw.tau0)
    }
}

/// Chain segments from `(t0, x0, tau0)`, accumulating the anchors.
pub fn build_cycle(segments: &[Segment], t0: f64, x0: f64, tau0: f64) -> Result<CycleSpec> {
    if segments.is_empty() {
        return Err(Error::EmptySegmentList);
    }
    let mut anchors = Vec::with_capacity(segments.len() + 1);
    let mut a = Anchor { t: t0, x: x0, tau: tau0 };
    anchors.push(a);
    for s in segments {
        s.validate()?;
        a.t += s.coord_duration;
        a.x += s.velocity * s.coord_duration;
        a.tau += s.proper_duration();
        anchors.push(a);
    }
    let cyclic = (a.x - x0).abs() < CYCLIC_TOL;
    Ok(CycleSpec { segments: segments.to_vec(), anchors, cyclic })
}

/// Inputs of the four-segment family `rest(T_a), +v_b, -v_c, rest(T_a)`.
///
/// The cycle must last `pi n / omega` in proper time and `pi m / k` in
/// coordinate time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityParams {
    pub omega: f64,
    pub k: f64,
    pub m: u32,
    pub n: u32,
    pub t_a: f64,
    pub v_c: f64,
}

impl PeriodicityParams {
    /// Proper duration of one cycle.
    pub fn n_o(&self) -> f64 {
        PI * self.n as f64 / self.omega
    }

    /// Coordinate duration of one cycle.
    pub fn m_k(&self) -> f64 {
        PI * self.m as f64 / self.k
    }

    pub fn same_family(&self, other: &Self) -> bool {
        self.omega == other.omega && self.k == other.k && self.m == other.m && self.n == other.n
    }

    fn check_admissible(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.k > 0.0 && self.omega.is_finite() && self.k.is_finite()) {
            return Err(Error::InadmissibleParams("omega and k must be positive".into()));
        }
        if self.m == 0 || self.n == 0 {
            return Err(Error::InadmissibleParams("m and n must be positive".into()));
        }
        if !(self.t_a > 0.0) {
            return Err(Error::InadmissibleParams(format!("T_a = {} must be positive", self.t_a)));
        }
        let (mk, no) = (self.m_k(), self.n_o());
        if mk <= 2.0 * self.t_a || no <= 2.0 * self.t_a {
            return Err(Error::InadmissibleParams(format!(
                "2 T_a = {} must stay below both m_k = {mk} and n_o = {no}",
                2.0 * self.t_a
            )));
        }
        if mk <= no {
            return Err(Error::InadmissibleParams(format!(
                "coordinate period {mk} must exceed proper period {no}"
            )));
        }
        Ok(())
    }

    /// Lower bound on `gamma_c` for which a physical `gamma_b` exists.
    pub fn gamma_c_lower_bound(&self) -> Result<f64> {
        self.check_admissible()?;
        let (mk, no) = (self.m_k(), self.n_o());
        Ok((mk - no).powi(2) / (2.0 * (mk - 2.0 * self.t_a) * (no - 2.0 * self.t_a)) + 1.0)
    }

    /// The same bound expressed as a speed.
    pub fn v_c_lower_bound(&self) -> Result<f64> {
        let g = self.gamma_c_lower_bound()?;
        Ok((1.0 - 1.0 / (g * g)).sqrt())
    }
}

/// Outcome of [`solve_periodic_cycle`]: the cycle plus its free parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCycle {
    pub params: PeriodicityParams,
    pub v_b: f64,
    pub gamma_b: f64,
    pub t_b: f64,
    pub t_c: f64,
    pub cycle: CycleSpec,
}

/// Fix `v_b, T_b, T_c` so the four-segment cycle meets both periods and
/// returns to its starting position.
pub fn solve_periodic_cycle(params: &PeriodicityParams) -> Result<PeriodicCycle> {
    let bound = params.v_c_lower_bound()?;
    let v_c = params.v_c;
    if !(v_c > bound) || v_c >= 1.0 {
        return Err(Error::VelocityBoundViolated { v_c, bound });
    }
    let (mk, no, ta) = (params.m_k(), params.n_o(), params.t_a);
    let gamma_c = lorentz_gamma(v_c);
    let p = (mk - 2.0 * ta) / (mk - no);
    let q = 2.0 * p * (1.0 - p) * (1.0 - gamma_c);
    let gamma_b = (q + gamma_c) / (q - 1.0);
    if !gamma_b.is_finite() || gamma_b <= 1.0 {
        return Err(Error::UnphysicalGammaB(gamma_b));
    }
    let v_b = (1.0 - 1.0 / (gamma_b * gamma_b)).sqrt();
    let t_b = (mk - no) / (1.0 - 1.0 / gamma_b + (v_b / v_c) * (1.0 - 1.0 / gamma_c));
    let t_c = v_b * t_b / v_c;
    if !(t_b > 0.0 && t_c > 0.0) {
        return Err(Error::UnphysicalGammaB(gamma_b));
    }
    let segments = [
        Segment::new(0.0, ta)?,
        Segment::new(v_b, t_b)?,
        Segment::new(-v_c, t_c)?,
        Segment::new(0.0, ta)?,
    ];
    let cycle = build_cycle(&segments, 0.0, 0.0, 0.0)?;
    Ok(PeriodicCycle { params: *params, v_b, gamma_b, t_b, t_c, cycle })
}

/// Chain cycles end to end; the whole list is traversed `repeats` times.
pub fn concat_intervals(intervals: &[&CycleSpec], repeats: usize) -> Result<CycleSpec> {
    if intervals.is_empty() || repeats == 0 {
        return Err(Error::EmptySegmentList);
    }
    if let Some(i) = intervals.iter().position(|c| !c.is_cyclic()) {
        return Err(Error::NonCyclicInterval(i));
    }
    let mut segs = Vec::new();
    for _ in 0..repeats {
        for c in intervals {
            segs.extend_from_slice(c.segments());
        }
    }
    let a = intervals[0].start();
    build_cycle(&segs, a.t, a.x, a.tau)
}
