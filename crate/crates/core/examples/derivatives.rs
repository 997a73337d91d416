//! Derivative profiles of the irreducibles of GL_n(E) read off the mirabolic
//! tower, together with cuspidality and genericity.
//!
//! Usage: `derivatives [p] [n]` (default `2 2`: E = F_4, GL_2).

use std::sync::Arc;

use whittaker_bench::bz::BzTower;
use whittaker_bench::field::build_tower;
use whittaker_bench::matgroup::DEFAULT_BUDGET;

fn main() -> whittaker_bench::error::Result<()> {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let p = args.first().copied().unwrap_or(2);
    let n = args.get(1).copied().unwrap_or(2) as usize;
    let t = BzTower::new(Arc::new(build_tower(p, 1)?), n, true, DEFAULT_BUDGET, 1)?;
    let top = t.gl(n);
    println!("GL_{n}(F_{})  {} irreducibles", t.q_ext(), top.table.len());
    println!("{:>4} {:>6} {:>8} {:>8}  derivative dimensions k=1..{n}", "pi", "dim", "cusp", "generic");
    for (pi, chi) in top.table.chars.iter().enumerate() {
        let prof = t.derivative_profile(pi)?;
        let dims: Vec<String> = prof.derivatives.iter().map(|d| d.dim.to_string()).collect();
        println!("{pi:>4} {:>6} {:>8} {:>8}  {}", prof.dim, t.is_cuspidal(n, chi), t.is_generic(n, chi)?, dims.join(" "));
    }
    if n == 2 {
        let (computed, predicted) = t.relative_cuspidal_classify()?;
        println!("\nrelatively cuspidal {computed:?}  predicted {predicted:?}");
    }
    Ok(())
}
