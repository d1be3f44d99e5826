//! Writes the codebook design problem as an LP-format integer program that
//! any ILP solver can read.
//!
//! cargo run --example export_lp [path]

use mute::optimizer::{exact_search, export_lp, OptimizerConfig};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "codebook_4x4x2.lp".into());
    let cfg = OptimizerConfig::new(4, 2);
    let stats = export_lp(&cfg, &path).unwrap();
    println!(
        "{path}: {} binary variables ({} bit, {} xor), {} popcount rows, {} xor rows, {} separation rows",
        stats.variables(),
        stats.x_vars,
        stats.y_vars,
        stats.popcount_rows,
        stats.xor_rows,
        stats.distance_rows
    );
    println!("exhaustive optimum for comparison: {}", exact_search(&cfg).unwrap().objective);
}
