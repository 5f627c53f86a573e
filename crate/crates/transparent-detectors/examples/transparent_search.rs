//! Scan the (v_c, T_a) plane for cycles whose noise integral vanishes.

use transparent_detectors::search::{pair_intervals, search, SearchGrid, DEFAULT_POLISH_TOL};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = SearchGrid {
        v_c_range: (0.4, 0.9),
        t_a_range: (0.0, 6.0),
        resolution: (256, 256),
        omega: 1.2,
        k: 1.0,
        m: 16,
        n: 15,
    };
    let (field, curves, outcome) = search(&grid, DEFAULT_POLISH_TOL)?;
    println!(
        "{} physical nodes, {} Re=0 / {} Im=0 curve pieces, {} candidate cells",
        field.physical_count(),
        curves.re.len(),
        curves.im.len(),
        outcome.candidate_cells
    );
    for x in &outcome.intersections {
        println!(
            "{}: v_c = {:.6}, T_a = {:.6}, v_b = {:.6}, |I_pm| = {:.1e}",
            x.label, x.v_c, x.t_a, x.cycle.v_b, x.residual
        );
    }
    for t in pair_intervals(&outcome.intersections)? {
        let i = t.integrals;
        println!(
            "{} + {}: |I_pm| = {:.1e}, I_pp = {:.6} {:+.6}i{}",
            t.first,
            t.second,
            i.pm.norm(),
            i.pp.re,
            i.pp.im,
            if t.trivially_cancelling { " (cancels)" } else { "" }
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
