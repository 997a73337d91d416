//! Bessel functions by simultaneous diagonalization of the Hecke algebra of the
//! Gelfand-Graev representation, against the character-sum route.
//!
//! Usage: `hecke_route [p d n]` (default runs the split desk-scale contexts).

use std::sync::Arc;
use std::time::Instant;

use whittaker_bench::chartable::character_table;
use whittaker_bench::field::{AdditiveCharacter, Field};
use whittaker_bench::gelfand_graev::{bessel_via_hecke, GelfandGraev};
use whittaker_bench::matgroup::bruhat::NCharacter;
use whittaker_bench::matgroup::{FiniteGroup, DEFAULT_BUDGET};

fn main() -> whittaker_bench::error::Result<()> {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let cases = match args[..] {
        [p, d, n, ..] => vec![(p, d, n as usize)],
        _ => vec![(2, 1, 2), (3, 1, 2), (2, 2, 2), (5, 1, 2), (2, 1, 3), (3, 1, 3)],
    };
    println!("{:<12} {:>6} {:>10} {:>10} {:>8}", "group", "cells", "chars", "hecke", "agree");
    for (p, d, n) in cases {
        let field = Arc::new(Field::new(p, d)?);
        let g = FiniteGroup::general_linear(field.clone(), n, DEFAULT_BUDGET)?;
        let t = character_table(&g, 1)?;
        let gg = GelfandGraev::new(&g, NCharacter::standard(AdditiveCharacter::on_field(&field, 1), n))?;
        let t0 = Instant::now();
        let tables = gg.all_bessel(&t)?;
        let chars = t0.elapsed();
        let t1 = Instant::now();
        let h = bessel_via_hecke(&gg, &t, &tables, 1)?;
        let hecke = t1.elapsed();
        println!(
            "{:<12} {:>6} {:>10.2?} {:>10.2?} {:>8}",
            format!("GL_{n}(F_{})", field.size()),
            h.dimension,
            chars,
            hecke,
            h.sets_equal()
        );
    }
    Ok(())
}
