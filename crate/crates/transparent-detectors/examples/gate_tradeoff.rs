//! Entangling time against decoherence time as M shrinks toward the
//! signal strength.

use transparent_detectors::tradeoff::{evaluate, TradeoffInputs};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let base = TradeoffInputs {
        m_abs: 0.0,
        i_plus_abs: 0.79,
        r: 0.0,
        theta: 0.0,
        lambda: 0.01,
        t_cycle: 39.27,
        n_star: 0.01,
    };
    println!("{:>8} {:>6} {:>14} {:>14} {:>10}  regime", "|M|/I^2", "r", "tau_gate", "tau_dec", "ratio");
    for ratio in [100.0, 30.0, 10.0, 5.0, 3.0, 2.5, 2.0, 1.5] {
        for r in [0.0, 0.5] {
            let x = TradeoffInputs { m_abs: ratio * base.i_plus_abs.powi(2), r, ..base };
            let row = evaluate(&x)?;
            println!(
                "{ratio:>8} {r:>6} {:>14.6e} {:>14.6e} {:>10.4} {} {}",
                row.tau_gate,
                row.tau_dec,
                row.ratio,
                row.regime.as_str(),
                if row.feasible { "feasible" } else { "infeasible" }
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
