//! Residual of the first-order expansion on a tube grid, over the desk-scale eps range.
//!
//! Takes a couple of minutes on one core.
//!
//! ```text
//! cargo run --release --example scaling_study
//! ```

use mott::harness::{run_scaling_study, StudySpec, DEFAULT_EPS};
use mott::model::ModelConfig;

fn main() -> mott::Result<()> {
    let cfg = ModelConfig::new(0.2, 1.0, &[[0.0, 0.0, 2.0]], 3.0);
    let spec = StudySpec::for_config(&cfg);
    let study = run_scaling_study(&cfg, &spec, &DEFAULT_EPS)?;
    println!("  eps    residual    reference   rel      coverage  quad_err");
    for p in &study.points {
        println!(
            "  {:.2}  {:.4e}  {:.4e}  {:.4}  {:.4}    {:.1e}",
            p.eps,
            p.residual,
            p.reference,
            p.residual / p.reference,
            p.coverage,
            p.quad_error
        );
    }
    println!("residual slope {:.3} (r2 {:.4})", study.fit_abs.slope, study.fit_abs.r2);
    println!("relative slope {:.3}, reference slope {:.3}", study.fit_rel.slope, study.fit_ref.slope);
    Ok(())
}
