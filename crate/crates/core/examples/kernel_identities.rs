//! The exact-identity suite, plus the real-time eigen-sum that does not converge pointwise.
//!
//! ```text
//! cargo run --release --example kernel_identities
//! ```

use mott::harness::{mehler_error, run_identity_suite, SuiteSpec};
use mott::model::ModelConfig;

fn main() -> mott::Result<()> {
    let cfg = ModelConfig::new(0.2, 1.0, &[[0.0, 0.0, 2.0], [2.5, 0.0, 0.0]], 3.0);
    let report = run_identity_suite(&cfg, &SuiteSpec::default())?;
    for r in &report.rows {
        println!("{:<20} {:>12.3e}  tol {:.1e}  {}", r.name, r.measured, r.tolerance, if r.pass { "ok" } else { "FAIL" });
    }
    println!("suite passes: {}", report.pass());

    println!("\nMehler eigen-sum, max relative error on the 9x9 grid, t in {{0.4, 0.7, 1.3}}:");
    for &eta in &[0.0, 0.1, 0.3, 0.5] {
        let row: Vec<String> = [30, 60, 120]
            .iter()
            .map(|&n| format!("n<={n}: {:.2e}", mehler_error(&[0.4, 0.7, 1.3], eta, n).unwrap()))
            .collect();
        println!("  t - {eta}i  {}", row.join("  "));
    }
    Ok(())
}
