//! Off-cone first-order term against the on-cone term for the second of two oscillators.
//!
//! ```text
//! cargo run --release --example nonstationary_study
//! ```

use mott::harness::{run_nonstationary_study, StudySpec};
use mott::model::ModelConfig;
use mott::oracle::TubeGrid;

fn main() -> mott::Result<()> {
    let cfg = ModelConfig::new(0.2, 1.0, &[[0.0, 0.0, 2.0], [2.5, 0.0, 0.0]], 3.0);
    let spec = StudySpec {
        oscillator: 1,
        grid: TubeGrid { radius: 5.0, n_radial: 3, n_azimuth: 4, z_min: -3.0, z_max: 6.0, n_long: 6 },
        ..StudySpec::for_config(&cfg)
    };
    let study = run_nonstationary_study(&cfg, &spec, &[0.4, 0.3, 0.25, 0.2])?;
    for p in &study.points {
        println!("eps {:.2}: complement {:.4e}  cone {:.4e}  ratio {:.4e}", p.eps, p.complement, p.cone, p.ratio());
    }
    println!("ratio slope {:.2} (r2 {:.4})", study.fit.slope, study.fit.r2);
    Ok(())
}
