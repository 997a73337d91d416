//! Degree profiles of a few character tables, with timings.
//!
//! Usage: `cargo run --release --example character_tables [p d n [--mirabolic]]`

use std::sync::Arc;
use std::time::Instant;

use whittaker_bench::chartable::character_table;
use whittaker_bench::field::Field;
use whittaker_bench::matgroup::FiniteGroup;

fn profile(degrees: &[u64]) -> String {
    let mut out: Vec<(u64, usize)> = Vec::new();
    for &d in degrees {
        match out.last_mut() {
            Some(x) if x.0 == d => x.1 += 1,
            _ => out.push((d, 1)),
        }
    }
    out.iter().map(|(d, c)| format!("{c}x{d}")).collect::<Vec<_>>().join(" ")
}

fn main() {
    let mirabolic_flag = std::env::args().any(|a| a == "--mirabolic");
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let cases: Vec<(u32, u32, usize, bool)> = if args.len() == 3 {
        vec![(args[0], args[1], args[2] as usize, mirabolic_flag)]
    } else {
        vec![(2, 1, 2, false), (2, 2, 2, false), (3, 2, 2, false), (2, 1, 3, false), (2, 2, 2, true), (3, 2, 2, true)]
    };
    for (p, d, n, mirabolic) in cases {
        let f = Arc::new(Field::new(p, d).unwrap());
        let t0 = Instant::now();
        let g = if mirabolic {
            FiniteGroup::mirabolic(f, n, 1 << 21).unwrap()
        } else {
            FiniteGroup::general_linear(f, n, 1 << 21).unwrap()
        };
        let built = t0.elapsed();
        let t = character_table(&g, 1).unwrap();
        println!(
            "{:<12} order {:>7}  classes {:>3}  [{}]  group {:.2?} table {:.2?}",
            g.name,
            g.order(),
            t.num_classes(),
            profile(&t.degrees),
            built,
            t0.elapsed() - built
        );
    }
}
