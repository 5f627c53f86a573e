//! Solve the four-segment periodicity constraints at one grid point and
//! compare closed-form phase integrals with brute-force quadrature.

use transparent_detectors::phase_integrals::{cycle_integrals, quadrature_integral, Sign};
use transparent_detectors::trajectory::{solve_periodic_cycle, PeriodicityParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = PeriodicityParams { omega: 1.2, k: 1.0, m: 16, n: 15, t_a: 2.9, v_c: 0.66 };
    println!("v_c must exceed {:.6}", params.v_c_lower_bound()?);
    let sol = solve_periodic_cycle(&params)?;
    println!("v_b = {:.6}  T_b = {:.6}  T_c = {:.6}  gamma_b = {:.6}", sol.v_b, sol.t_b, sol.t_c, sol.gamma_b);

    let c = &sol.cycle;
    println!(
        "proper {:.12} (want {:.12}), coordinate {:.12} (want {:.12}), cyclic: {}",
        c.proper_duration(),
        params.n_o(),
        c.coord_duration(),
        params.m_k(),
        c.is_cyclic()
    );

    let ints = cycle_integrals(c, params.omega, params.k, 0.0);
    for (s1, s2) in [(Sign::Plus, Sign::Plus), (Sign::Plus, Sign::Minus)] {
        let q = quadrature_integral(c, params.omega, params.k, s1, s2, 0.0, 1e-12)?;
        let v = ints.get(s1, s2);
        println!("I[{s1:?},{s2:?}] = {v:.10}  quadrature gap {:.2e}", (v - q).norm());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
