//! Grid search for transparent cycles: points of the `(v_c, T_a)` plane
//! where the noise integral `I_{+-}` vanishes.
//!
//! Scan the plane, trace `Re = 0` and `Im = 0` with marching squares, seed
//! Newton from cells crossed by both curves, keep what polishes.

use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fmt::g17;
use crate::phase_integrals::{cycle_integrals, PhaseIntegralSet};
use crate::trajectory::{concat_intervals, solve_periodic_cycle, CycleSpec, PeriodicCycle, PeriodicityParams};
use crate::{Error, Result};

pub const DEFAULT_POLISH_TOL: f64 = 1e-10;
const FD_STEP: f64 = 1e-7;
const MAX_NEWTON: usize = 50;
const DAMPING: f64 = 0.5;
const MAX_HALVINGS: usize = 40;
/// `|I_{++}|` below this marks a pairing whose signal cancels.
pub const TRIVIAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    pub v_c_range: (f64, f64),
    pub t_a_range: (f64, f64),
    /// Nodes along `(v_c, T_a)`.
    pub resolution: (usize, usize),
    pub omega: f64,
    pub k: f64,
    pub m: u32,
    pub n: u32,
}

impl SearchGrid {
    pub fn validate(&self) -> Result<()> {
        let (v0, v1) = self.v_c_range;
        let (t0, t1) = self.t_a_range;
        if !(v0 < v1 && v0 >= 0.0 && v1 <= 1.0) {
            return Err(Error::InvalidGrid(format!("v_c range ({v0}, {v1})")));
        }
        if !(t0 < t1 && t0 >= 0.0 && t1.is_finite()) {
            return Err(Error::InvalidGrid(format!("T_a range ({t0}, {t1})")));
        }
        if self.resolution.0 < 8 || self.resolution.1 < 8 {
            return Err(Error::InvalidGrid(format!("resolution {:?} below 8", self.resolution)));
        }
        Ok(())
    }

    fn step(&self) -> (f64, f64) {
        (
            (self.v_c_range.1 - self.v_c_range.0) / self.resolution.0 as f64,
            (self.t_a_range.1 - self.t_a_range.0) / self.resolution.1 as f64,
        )
    }

    /// Node coordinates sit at cell centres, so open ranges are never touched.
    pub fn v_c(&self, i: usize) -> f64 {
        self.v_c_range.0 + (i as f64 + 0.5) * self.step().0
    }

    pub fn t_a(&self, j: usize) -> f64 {
        self.t_a_range.0 + (j as f64 + 0.5) * self.step().1
    }

    pub fn params(&self, v_c: f64, t_a: f64) -> PeriodicityParams {
        PeriodicityParams { omega: self.omega, k: self.k, m: self.m, n: self.n, t_a, v_c }
    }

    fn contains(&self, v_c: f64, t_a: f64) -> bool {
        v_c > self.v_c_range.0 && v_c < self.v_c_range.1 && t_a > self.t_a_range.0 && t_a < self.t_a_range.1
    }
}

/// Noise integral of the periodic cycle at `(v_c, T_a)`, or `None` where no
/// physical cycle exists.
pub fn noise_at(grid: &SearchGrid, v_c: f64, t_a: f64) -> Option<Complex64> {
    let pc = solve_periodic_cycle(&grid.params(v_c, t_a)).ok()?;
    Some(cycle_integrals(&pc.cycle, grid.omega, grid.k, 0.0).pm)
}

/// `I_{+-}` sampled on the grid; `None` marks the unphysical mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanField {
    pub grid: SearchGrid,
    /// Row-major over `(v_c index, T_a index)`.
    pub values: Vec<Option<Complex64>>,
}

impl ScanField {
    pub fn at(&self, i: usize, j: usize) -> Option<Complex64> {
        self.values[i * self.grid.resolution.1 + j]
    }

    pub fn physical_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "v_c,T_a,re_Iminus,im_Iminus,physical")?;
        let (nv, nt) = self.grid.resolution;
        for i in 0..nv {
            for j in 0..nt {
                let (re, im, ok) = match self.at(i, j) {
                    Some(z) => (z.re, z.im, true),
                    None => (f64::NAN, f64::NAN, false),
                };
                writeln!(w, "{},{},{},{},{}", g17(self.grid.v_c(i)), g17(self.grid.t_a(j)), g17(re), g17(im), ok)?;
            }
        }
        Ok(())
    }
}

/// Evaluate the noise integral on every node.
///
/// Rows are index-addressed, so the thread count never changes the result.
pub fn scan(grid: &SearchGrid) -> Result<ScanField> {
    grid.validate()?;
    let (nv, nt) = grid.resolution;
    let values = (0..nv * nt)
        .into_par_iter()
        .map(|idx| noise_at(grid, grid.v_c(idx / nt), grid.t_a(idx % nt)))
        .collect();
    Ok(ScanField { grid: *grid, values })
}

pub type Polyline = Vec<(f64, f64)>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ZeroCurves {
    pub re: Vec<Polyline>,
    pub im: Vec<Polyline>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct EdgeKey {
    /// 0: edge along v_c from node (i, j); 1: edge along T_a.
    dir: u8,
    i: usize,
    j: usize,
}

#[derive(Debug, Clone, Copy)]
struct CellSegment {
    a: (EdgeKey, (f64, f64)),
    b: (EdgeKey, (f64, f64)),
}

/// Zero-crossing segments of one component inside cell `(i, j)`, or `None`
/// when any corner is unphysical.
fn cell_segments(field: &ScanField, i: usize, j: usize, comp: fn(Complex64) -> f64) -> Option<Vec<CellSegment>> {
    let g = &field.grid;
    let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
    let mut vals = [0.0; 4];
    for (c, &(ci, cj)) in corners.iter().enumerate() {
        vals[c] = comp(field.at(ci, cj)?);
    }
    // bottom, right, top, left
    let edges = [
        (EdgeKey { dir: 0, i, j }, 0, 1),
        (EdgeKey { dir: 1, i: i + 1, j }, 1, 2),
        (EdgeKey { dir: 0, i, j: j + 1 }, 3, 2),
        (EdgeKey { dir: 1, i, j }, 0, 3),
    ];
    let pos = |c: usize| (g.v_c(corners[c].0), g.t_a(corners[c].1));
    let mut hits: [Option<(EdgeKey, (f64, f64))>; 4] = [None; 4];
    for (e, &(key, c0, c1)) in edges.iter().enumerate() {
        let (f0, f1) = (vals[c0], vals[c1]);
        if (f0 >= 0.0) != (f1 >= 0.0) {
            let s = f0 / (f0 - f1);
            let (p0, p1) = (pos(c0), pos(c1));
            hits[e] = Some((key, (p0.0 + s * (p1.0 - p0.0), p0.1 + s * (p1.1 - p0.1))));
        }
    }
    let found: Vec<_> = hits.iter().flatten().copied().collect();
    Some(match found.len() {
        2 => vec![CellSegment { a: found[0], b: found[1] }],
        4 => {
            let centre: f64 = vals.iter().sum::<f64>() / 4.0;
            let h = |e: usize| hits[e].unwrap();
            if (centre >= 0.0) == (vals[0] >= 0.0) {
                vec![CellSegment { a: h(0), b: h(1) }, CellSegment { a: h(2), b: h(3) }]
            } else {
                vec![CellSegment { a: h(3), b: h(0) }, CellSegment { a: h(1), b: h(2) }]
            }
        }
        _ => Vec::new(),
    })
}

fn re_part(z: Complex64) -> f64 {
    z.re
}

fn im_part(z: Complex64) -> f64 {
    z.im
}

fn trace(field: &ScanField, comp: fn(Complex64) -> f64) -> Vec<Polyline> {
    let (nv, nt) = field.grid.resolution;
    let mut segs = Vec::new();
    for i in 0..nv - 1 {
        for j in 0..nt - 1 {
            if let Some(s) = cell_segments(field, i, j, comp) {
                segs.extend(s);
            }
        }
    }
    let mut by_edge: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (idx, s) in segs.iter().enumerate() {
        by_edge.entry(s.a.0).or_default().push(idx);
        by_edge.entry(s.b.0).or_default().push(idx);
    }
    let mut used = vec![false; segs.len()];
    let mut lines = Vec::new();
    // open chains first (start at an edge with one segment), then loops
    let mut starts: Vec<usize> = (0..segs.len())
        .filter(|&k| by_edge[&segs[k].a.0].len() == 1 || by_edge[&segs[k].b.0].len() == 1)
        .collect();
    starts.extend(0..segs.len());
    for start in starts {
        if used[start] {
            continue;
        }
        used[start] = true;
        let s = segs[start];
        let (mut line, mut tail) = if by_edge[&s.a.0].len() == 1 {
            (vec![s.a.1, s.b.1], s.b.0)
        } else {
            (vec![s.b.1, s.a.1], s.a.0)
        };
        while let Some(&next) = by_edge[&tail].iter().find(|&&k| !used[k]) {
            used[next] = true;
            let n = segs[next];
            let (far, key) = if n.a.0 == tail { (n.b.1, n.b.0) } else { (n.a.1, n.a.0) };
            line.push(far);
            tail = key;
        }
        lines.push(line);
    }
    lines
}

/// Trace `Re I_{+-} = 0` and `Im I_{+-} = 0`, skipping cells that touch the mask.
pub fn extract_zero_curves(field: &ScanField) -> ZeroCurves {
    ZeroCurves { re: trace(field, re_part), im: trace(field, im_part) }
}

/// A polished transparent cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct Intersection {
    pub label: String,
    pub v_c: f64,
    pub t_a: f64,
    /// `|I_{+-}|` at the polished point.
    pub residual: f64,
    pub cycle: PeriodicCycle,
}

impl Intersection {
    pub fn params(&self) -> &PeriodicityParams {
        &self.cycle.params
    }

    pub fn integrals(&self) -> PhaseIntegralSet {
        let p = self.params();
        cycle_integrals(&self.cycle.cycle, p.omega, p.k, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolishDiagnostic {
    Diverged { seed: (f64, f64), last: (f64, f64), residual: f64 },
    LeftWindow { seed: (f64, f64), last: (f64, f64) },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub intersections: Vec<Intersection>,
    pub diagnostics: Vec<PolishDiagnostic>,
    pub candidate_cells: usize,
}

impl SearchOutcome {
    pub fn by_label(&self, label: &str) -> Option<&Intersection> {
        self.intersections.iter().find(|x| x.label == label)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "label,v_c,T_a,residual,v_b,T_b,gamma_b")?;
        for x in &self.intersections {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                x.label,
                g17(x.v_c),
                g17(x.t_a),
                g17(x.residual),
                g17(x.cycle.v_b),
                g17(x.cycle.t_b),
                g17(x.cycle.gamma_b)
            )?;
        }
        Ok(())
    }
}

fn seg_cross(p: &CellSegment, q: &CellSegment) -> Option<(f64, f64)> {
    let (a, b, c, d) = (p.a.1, p.b.1, q.a.1, q.b.1);
    let r = (b.0 - a.0, b.1 - a.1);
    let s = (d.0 - c.0, d.1 - c.1);
    let den = r.0 * s.1 - r.1 * s.0;
    if den == 0.0 {
        return None;
    }
    let t = ((c.0 - a.0) * s.1 - (c.1 - a.1) * s.0) / den;
    let u = ((c.0 - a.0) * r.1 - (c.1 - a.1) * r.0) / den;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some((a.0 + t * r.0, a.1 + t * r.1))
}

/// Damped Newton on `(Re, Im) I_{+-}` from `seed`.
pub fn polish(grid: &SearchGrid, seed: (f64, f64), tol: f64) -> std::result::Result<(f64, f64, f64), PolishDiagnostic> {
    let hv = FD_STEP * (grid.v_c_range.1 - grid.v_c_range.0);
    let ht = FD_STEP * (grid.t_a_range.1 - grid.t_a_range.0);
    let mut x = seed;
    let Some(mut f) = noise_at(grid, x.0, x.1) else {
        return Err(PolishDiagnostic::Diverged { seed, last: x, residual: f64::INFINITY });
    };
    for _ in 0..MAX_NEWTON {
        if f.norm() < tol {
            return Ok((x.0, x.1, f.norm()));
        }
        let diverged = PolishDiagnostic::Diverged { seed, last: x, residual: f.norm() };
        let (Some(fv), Some(ft)) = (noise_at(grid, x.0 + hv, x.1), noise_at(grid, x.0, x.1 + ht)) else {
            return Err(diverged);
        };
        let (jv, jt) = ((fv - f) / hv, (ft - f) / ht);
        let det = jv.re * jt.im - jt.re * jv.im;
        if det == 0.0 || !det.is_finite() {
            return Err(diverged);
        }
        let dv = -(jt.im * f.re - jt.re * f.im) / det;
        let dt = -(-jv.im * f.re + jv.re * f.im) / det;
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = (x.0 + scale * dv, x.1 + scale * dt);
            if let Some(ft) = noise_at(grid, trial.0, trial.1) {
                if ft.norm() < f.norm() {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            scale *= DAMPING;
        }
        let Some((nx, nf)) = accepted else {
            return Err(diverged);
        };
        x = nx;
        f = nf;
    }
    if f.norm() < tol {
        Ok((x.0, x.1, f.norm()))
    } else {
        Err(PolishDiagnostic::Diverged { seed, last: x, residual: f.norm() })
    }
}

/// Seed Newton in every cell crossed by both zero curves, polish, and merge
/// duplicates that land in the same cell.
pub fn find_intersections(field: &ScanField, polish_tol: f64) -> Result<SearchOutcome> {
    let g = field.grid;
    g.validate()?;
    let (nv, nt) = g.resolution;
    let mut seeds = Vec::new();
    for i in 0..nv - 1 {
        for j in 0..nt - 1 {
            let (Some(re), Some(im)) = (cell_segments(field, i, j, re_part), cell_segments(field, i, j, im_part))
            else {
                continue;
            };
            if re.is_empty() || im.is_empty() {
                continue;
            }
            let centre = (0.5 * (g.v_c(i) + g.v_c(i + 1)), 0.5 * (g.t_a(j) + g.t_a(j + 1)));
            let cross = re.iter().flat_map(|p| im.iter().filter_map(move |q| seg_cross(p, q))).next();
            seeds.push(cross.unwrap_or(centre));
        }
    }
    let candidate_cells = seeds.len();
    let results: Vec<_> = seeds.par_iter().map(|&s| (s, polish(&g, s, polish_tol))).collect();

    let mut diagnostics = Vec::new();
    let mut polished = Vec::new();
    for (seed, r) in results {
        match r {
            Ok((v, t, res)) if g.contains(v, t) => polished.push((v, t, res)),
            Ok((v, t, _)) => diagnostics.push(PolishDiagnostic::LeftWindow { seed, last: (v, t) }),
            Err(d) => diagnostics.push(d),
        }
    }
    // lowest residual wins, then smaller v_c, then smaller T_a
    polished.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.total_cmp(&b.0)).then(a.1.total_cmp(&b.1)));
    let (cv, ct) = g.step();
    let mut kept: Vec<(f64, f64, f64)> = Vec::new();
    for p in polished {
        if !kept.iter().any(|q| (q.0 - p.0).abs() < cv && (q.1 - p.1).abs() < ct) {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    let mut intersections = Vec::new();
    for (idx, (v, t, res)) in kept.into_iter().enumerate() {
        let cycle = solve_periodic_cycle(&g.params(v, t))?;
        intersections.push(Intersection { label: format!("P{}", idx + 1), v_c: v, t_a: t, residual: res, cycle });
    }
    Ok(SearchOutcome { intersections, diagnostics, candidate_cells })
}

/// Scan, trace and polish in one go.
pub fn search(grid: &SearchGrid, polish_tol: f64) -> Result<(ScanField, ZeroCurves, SearchOutcome)> {
    let field = scan(grid)?;
    let curves = extract_zero_curves(&field);
    let outcome = find_intersections(&field, polish_tol)?;
    Ok((field, curves, outcome))
}

/// Two transparent cycles traversed back to back.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoIntervalTrajectory {
    pub first: String,
    pub second: String,
    pub cycle: CycleSpec,
    pub integrals: PhaseIntegralSet,
    /// Set when the signal integral cancels along with the noise.
    pub trivially_cancelling: bool,
}

/// Chain `a` then `b`; both must come from the same periodicity family.
pub fn pair(a: &Intersection, b: &Intersection) -> Result<TwoIntervalTrajectory> {
    if !a.params().same_family(b.params()) {
        return Err(Error::InsufficientIntersections(1));
    }
    let cycle = concat_intervals(&[&a.cycle.cycle, &b.cycle.cycle], 1)?;
    let integrals = cycle_integrals(&cycle, a.params().omega, a.params().k, 0.0);
    Ok(TwoIntervalTrajectory {
        first: a.label.clone(),
        second: b.label.clone(),
        cycle,
        trivially_cancelling: integrals.pp.norm() < TRIVIAL_TOL,
        integrals,
    })
}

/// Every ordered pairing of distinct intersections that share a family.
pub fn pair_intervals(intersections: &[Intersection]) -> Result<Vec<TwoIntervalTrajectory>> {
    let mut out = Vec::new();
    for (i, a) in intersections.iter().enumerate() {
        for b in &intersections[i + 1..] {
            if a.params().same_family(b.params()) {
                out.push(pair(a, b)?);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InsufficientIntersections(intersections.len()));
    }
    Ok(out)
}
