//! Admissibility checks and the derived geometry of an oscillator layout.
//!
//! ```text
//! cargo run --example geometry
//! ```

use mott::model::{derive_geometry, in_cone, validate_config, ModelConfig, Vec3};

fn main() -> mott::Result<()> {
    let cfg = ModelConfig::new(0.2, 1.0, &[[0.0, 0.0, 2.0], [2.5, 0.0, 0.0], [0.0, -3.0, 0.5]], 4.0);
    validate_config(&cfg)?;
    let g = derive_geometry(&cfg)?;
    for (j, tau) in g.tau.iter().enumerate() {
        println!("oscillator {}: tau = {tau:.4}  direction = {:.4?}", j + 1, g.directions[j].as_slice());
    }
    println!("theta0 = {:.4}  delta = {:.4}", g.theta0, g.delta);
    println!("T_osc = {:.4}  T_transit = {:.4}  ratio = {:.4}", g.t_osc, g.t_transit, g.ratio);

    let u = Vec3::new(0.1, 0.0, 1.0).normalize();
    let owners: Vec<usize> = (0..g.tau.len()).filter(|&j| in_cone(&u, j, &g)).map(|j| j + 1).collect();
    println!("direction {:.3?} lies in cones {owners:?}", u.as_slice());

    let bad = ModelConfig::new(0.2, 1.0, &[[0.0, 0.0, 1.0], [0.0, 0.0, 2.0]], 4.0);
    if let Err(e) = validate_config(&bad) {
        println!("rejected layout: {e}");
    }
    Ok(())
}
