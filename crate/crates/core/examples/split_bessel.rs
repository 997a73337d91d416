//! Bessel functions of the split group GL_n(F_q) on their relevant cells, with
//! the mean square of each against `1/dim π`.
//!
//! Usage: `split_bessel [p d n]` (default `3 1 2`).

use std::sync::Arc;

use whittaker_bench::chartable::character_table;
use whittaker_bench::field::{AdditiveCharacter, Field};
use whittaker_bench::gelfand_graev::GelfandGraev;
use whittaker_bench::matgroup::bruhat::NCharacter;
use whittaker_bench::matgroup::{FiniteGroup, DEFAULT_BUDGET};

fn main() -> whittaker_bench::error::Result<()> {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (p, d, n) = match args[..] {
        [p, d, n, ..] => (p, d, n as usize),
        _ => (3, 1, 2),
    };
    let field = Arc::new(Field::new(p, d)?);
    let g = FiniteGroup::general_linear(field.clone(), n, DEFAULT_BUDGET)?;
    let t = character_table(&g, 1)?;
    let gg = GelfandGraev::new(&g, NCharacter::standard(AdditiveCharacter::on_field(&field, 1), n))?;
    let sizes = gg.cell_sizes();
    let tables = gg.all_bessel(&t)?;
    println!("GL_{n}(F_{})  {} relevant cells, {} generic irreducibles", field.size(), gg.cells.len(), tables.len());
    for b in &tables {
        let dim = t.degrees[b.pi];
        println!("\npi={} dim={dim}  mean square {}  (1/dim = 1/{dim})", b.pi, gg.mean_square(b, &sizes));
        for (i, cell) in gg.cells.iter().enumerate() {
            let torus: Vec<String> = cell.torus.iter().map(|&x| field.log(x).map_or("0".into(), |e| format!("z^{e}"))).collect();
            println!("  {:<12} {:<24} {}", format!("{:?}", cell.composition), torus.join(" "), b.at(i));
        }
    }
    Ok(())
}
