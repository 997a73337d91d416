//! Bernstein–Zelevinsky checks on the mirabolic tower.
//!
//! `cargo run --release --example bz_tower -- [p] [n] [top]`

use std::sync::Arc;
use std::time::Instant;

use whittaker_bench::bz::{kirillov_report, BzTower};
use whittaker_bench::field::build_tower;
use whittaker_bench::matgroup::DEFAULT_BUDGET;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let p: u32 = args.first().map_or(Ok(2), |s| s.parse())?;
    let n: usize = args.get(1).map_or(Ok(3), |s| s.parse())?;
    let top = args.get(2).is_some_and(|s| s == "top");
    let t0 = Instant::now();
    let t = BzTower::new(Arc::new(build_tower(p, 1)?), n, top, DEFAULT_BUDGET, 1)?;
    println!("tower built in {:.2?}", t0.elapsed());
    for m in 1..=n {
        println!("P_{m}: {} classes", t.p(m).table.len());
        let mut r = t.relations_report(m);
        r.extend(t.kable_report(m));
        for row in r.rows.iter().filter(|x| x.micros > 500_000) {
            println!("    slow: {} {} {}us", row.anchor, row.params, row.micros);
        }
        println!("  relations + kable: {} rows, {} failed ({:.2?})", r.rows.len(), r.failures().count(), t0.elapsed());
    }
    if top {
        let mut r = t.filtration_report()?;
        r.extend(kirillov_report(&t)?);
        r.extend(t.leibniz_report()?);
        if n == 2 {
            r.extend(t.counterexample_report()?);
            let (c, pr) = t.relative_cuspidal_classify()?;
            println!("relatively cuspidal: {c:?}\npredicted:           {pr:?}");
        }
        println!("GL_{n}: {} rows, {} failed ({:.2?})", r.rows.len(), r.failures().count(), t0.elapsed());
        for f in r.failures() {
            println!("  FAIL {} {} lhs={} rhs={}", f.anchor, f.params, f.lhs, f.rhs);
        }
    }
    Ok(())
}
