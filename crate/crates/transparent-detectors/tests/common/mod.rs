#![allow(dead_code)]

use std::sync::OnceLock;

use transparent_detectors::phase_integrals::{compute_m, layout_integrals, DetectorLayout, PhaseIntegralSet};
use transparent_detectors::search::{pair, search, SearchGrid, SearchOutcome, TwoIntervalTrajectory, DEFAULT_POLISH_TOL};
use transparent_detectors::Complex64;

pub const OMEGA: f64 = 1.2;
pub const K: f64 = 1.0;

pub fn grid(res: usize) -> SearchGrid {
    SearchGrid { v_c_range: (0.4, 0.9), t_a_range: (0.0, 6.0), resolution: (res, res), omega: OMEGA, k: K, m: 16, n: 15 }
}

pub struct Published {
    pub outcome: SearchOutcome,
    pub traj: TwoIntervalTrajectory,
    pub layout: DetectorLayout,
    pub ints: Vec<PhaseIntegralSet>,
    pub m: Complex64,
}

/// The P1 + P2 transparent pair, found once per test binary.
pub fn published() -> &'static Published {
    static CELL: OnceLock<Published> = OnceLock::new();
    CELL.get_or_init(|| {
        let (_, _, outcome) = search(&grid(128), DEFAULT_POLISH_TOL).unwrap();
        let traj = pair(outcome.by_label("P1").unwrap(), outcome.by_label("P2").unwrap()).unwrap();
        let layout = DetectorLayout::pair(0.0);
        let ints = layout_integrals(&traj.cycle, OMEGA, K, &layout);
        let m = compute_m(&traj.cycle, OMEGA, K, &layout, true).unwrap();
        Published { outcome, traj, layout, ints, m }
    })
}

/// Squeezing phase that realises a chosen Θ on the published pair.
pub fn phi_for_theta(p: &Published, theta: f64) -> f64 {
    theta - p.m.arg() + 2.0 * p.ints[0].pp.arg()
}

/// Composite 5-point Gauss–Legendre on `n` equal pieces.
pub fn gl5<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mid = a + (i as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W) {
            acc += f(mid + 0.5 * h * x) * w;
        }
    }
    acc * (0.5 * h)
}
