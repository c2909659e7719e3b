//! One first-order coefficient against the outgoing packet it should reduce to.
//!
//! ```text
//! cargo run --release --example duhamel_coefficient
//! ```

use std::time::Instant;

use mott::model::{derive_geometry, ModelConfig, Vec3};
use mott::oracle::{first_order_coeffs, leading_consistency, Region};
use mott::packet::{make_packet, packet_eval};

fn main() -> mott::Result<()> {
    let base = ModelConfig::new(0.2, 1.0, &[[0.0, 0.0, 2.0]], 3.0);
    let channels = [[0, 0, 0], [0, 0, 1], [1, 0, 0], [0, 1, 1]];
    let x = Vec3::new(0.7, -0.4, 2.3);
    for &eps in &[0.4, 0.2, 0.1] {
        let cfg = base.with_epsilon(eps);
        let geom = derive_geometry(&cfg)?;
        let start = Instant::now();
        let coeffs = first_order_coeffs(&cfg, &geom, 0, &channels, 3.0, &x, Region::Cone, 0.0)?;
        let secs = start.elapsed().as_secs_f64();
        println!("eps = {eps}  ({secs:.3} s for {} channels)", channels.len());
        for c in &coeffs {
            let p = make_packet(&cfg, 0, c.n)?;
            let lead = packet_eval(&p, &(x * eps)) * eps * eps;
            let check = leading_consistency(&cfg, 0, &c.n, &x)?;
            println!(
                "  n = {:?}  I = {:.6e}  eps^2 P = {:.6e}  |I - eps^2 P| / |eps^2 P| = {:.3e}  quad err {:.1e}  leading term mismatch {:.1e}",
                c.n,
                c.value,
                lead,
                (c.value - lead).norm() / lead.norm(),
                c.est_error / c.value.norm(),
                check.rel_diff()
            );
        }
    }
    Ok(())
}
