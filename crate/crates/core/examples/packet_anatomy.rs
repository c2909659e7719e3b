//! One outgoing packet: amplitude, moments, norm and free evolution.
//!
//! ```text
//! cargo run --release --example packet_anatomy
//! ```

use mott::model::ModelConfig;
use mott::packet::{channel_weight, make_packet, packet_eval, packet_moments, packet_norm_sq, EvolvedPacket};

fn main() -> mott::Result<()> {
    let cfg = ModelConfig::new(0.2, 1.0, &[[0.0, 0.0, 2.0], [2.5, 0.0, 0.0]], 3.0);
    let p = make_packet(&cfg, 1, [1, 0, 1])?;
    println!("direction {:?}  V = {}  Z = {}  |C| = {:.6e}", p.dir.as_slice(), p.momentum, p.z_shift, p.amplitude.norm());
    println!("norm^2 = {:.6e}  weight eps^4 |P|^2 = {:.6e}", packet_norm_sq(&p), channel_weight(&p));

    let m = packet_moments(&p);
    for (ax, name) in ["t1", "t2", "long"].iter().enumerate() {
        println!(
            "{name:>4}: <R> = {:+.6}  dR = {:.6}  <P> = {:+.6}  dP = {:.6}",
            m.pos_mean[ax], m.pos_std[ax], m.mom_mean[ax], m.mom_std[ax]
        );
    }

    // Off the axis: odd transverse modes vanish on it.
    let [e1, e2] = p.transverse_axes();
    let off = (e1 * 0.5 + e2 * 0.3) * p.eps;
    println!("P beside its centre: {:.6e}", packet_eval(&p, &(off + p.dir * p.z_shift)));
    for &t in &[0.5, 1.0, 2.0] {
        let e = EvolvedPacket::new(&p, t)?;
        let moved = off + p.dir * (p.z_shift + p.momentum * t);
        println!("t = {t}: norm^2 = {:.6e}  value beside the moved centre {:.6e}", e.norm_sq(), e.eval(&moved));
    }
    Ok(())
}
