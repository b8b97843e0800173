//! Pancake radius and height margin across dimensions, and the sphere window.

use mcf_lab::barriers::{pancake_margin, pancake_radius, sphere_window, PancakeConstants};

fn main() -> mcf_lab::Result<()> {
    let pc = PancakeConstants::default();
    println!("{:>2} {:>6} {:>5} {:>14} {:>14}", "n", "lambda", "T", "R", "Q");
    for n in 1..=4 {
        for lambda in [0.1, 0.5] {
            for t in [0.0, 2.0] {
                let r = pancake_radius(n, lambda, t, pc)?;
                let q = pancake_margin(n, lambda, t)?;
                println!("{n:>2} {lambda:>6} {t:>5} {r:>14.9} {q:>14.9}");
            }
        }
    }
    for n in 1..=3 {
        println!("sphere window delta=0.2 n={n}: {:.6}", sphere_window(0.0, 0.2, n)?);
    }
    Ok(())
}
