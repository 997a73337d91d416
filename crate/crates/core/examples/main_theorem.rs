//! Period of the Bessel function against the base-change degree ratio.
//!
//! Usage: `main_theorem [p k]` (default `3 1`, i.e. GL_2(F_9) over GL_2(F_3)).

use std::time::Instant;

use whittaker_bench::matgroup::tower::Involution;
use whittaker_bench::matgroup::DEFAULT_BUDGET;
use whittaker_bench::periods::{side, verify_main_theorem, Mode};
use whittaker_bench::report::VerificationReport;
use whittaker_bench::setting::Setting;

fn main() -> whittaker_bench::error::Result<()> {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (p, k) = match args[..] {
        [p, k, ..] => (p, k),
        _ => (3, 1),
    };
    let t = Instant::now();
    let s = Setting::build(2, p, k, DEFAULT_BUDGET, 1)?;
    println!("{}  |G| = {}  tables in {:.2?}", s.label(), s.group().order(), t.elapsed());
    println!("constant |G|/(|G_sigma||G_tau|) = {}", s.main_constant());
    for iota in [Involution::Sigma, Involution::Tau] {
        let t = Instant::now();
        let sd = side(&s, iota)?;
        println!("\nH = G_{}  ({} generic, {:.2?})", iota.symbol(), sd.values.len(), t.elapsed());
        println!("{:>4} {:>5} {:>10} {:>10} {:>6}", "pi", "dim", "lambda", "predicted", "rho");
        for v in &sd.values {
            if !sd.distinguished[v.pi] {
                continue;
            }
            let pair = sd.pairs.iter().find(|m| m.pi == v.pi).unwrap();
            let rho = pair.rho.map(|r| s.sub_table(iota.opposite()).degrees[r]);
            let pred = v.predicted.as_ref().map_or("-".into(), |x| x.to_string());
            println!("{:>4} {:>5} {:>10} {:>10} {:>6?}", v.pi, s.table.degrees[v.pi], v.lambda, pred, rho);
        }
        let mut rep = VerificationReport::new(s.label());
        verify_main_theorem(&s, &sd, Mode::Exact, &mut rep);
        println!("rows {}  failures {}", rep.rows.len(), rep.failures().count());
        for r in rep.failures() {
            println!("  FAIL {} {} : {} vs {}", r.anchor, r.params, r.lhs, r.rhs);
        }
    }
    Ok(())
}
