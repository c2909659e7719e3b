//! Lower bound on the second-order phase gradient away from the cones.
//!
//! ```text
//! cargo run --release --example phase_bound
//! ```

use mott::oracle::second_order_phase_bound;
use mott::model::ModelConfig;

fn main() -> mott::Result<()> {
    let layouts: [&[[f64; 3]]; 3] = [
        &[[0.0, 0.0, 2.0]],
        &[[0.0, 0.0, 2.0], [2.5, 0.0, 0.0]],
        &[[0.0, 0.0, 2.0], [1.5, 0.0, 2.0], [0.0, -3.0, 0.5]],
    ];
    for pos in layouts {
        let cfg = ModelConfig::new(0.2, 1.0, pos, 5.0);
        let b = second_order_phase_bound(&cfg, cfg.t_final, 100_000)?;
        println!(
            "{} oscillators: min |grad|^2 = {:.5} at pair {:?}, Delta^2 = {:.5}, margin {:.5}",
            pos.len(),
            b.min_grad_sq,
            (b.pair.0 + 1, b.pair.1 + 1),
            b.delta_sq,
            b.min_grad_sq - b.delta_sq
        );
    }
    Ok(())
}
