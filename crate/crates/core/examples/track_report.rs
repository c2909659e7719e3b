//! Channel weights of every outgoing track, heaviest first.
//!
//! ```text
//! cargo run --example track_report
//! ```

use mott::model::ModelConfig;
use mott::packet::track_report;

fn main() -> mott::Result<()> {
    let cfg = ModelConfig::new(0.2, 1.0, &[[0.0, 0.0, 2.0], [2.5, 0.0, 0.0]], 3.0);
    let rows = track_report(&cfg)?;
    let total: f64 = rows.iter().map(|r| r.weight).sum();
    println!(" j  n          V       Z       weight      share");
    for r in &rows {
        println!(
            "{:>2}  {:?}  {:.3}  {:.3}  {:.4e}  {:.4}",
            r.j + 1,
            r.n,
            r.momentum,
            r.z_shift,
            r.weight,
            r.weight / total
        );
    }
    Ok(())
}
