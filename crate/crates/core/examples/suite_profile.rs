//! A reduced benchmark suite and its performance profiles.
use hinf_core::bench::{performance_profile, run_suite, summarize, tau_grid, SuiteConfig};

fn main() -> hinf_core::Result<()> {
    let mut cfg = SuiteConfig::paper_default(20.0, 0.75);
    cfg.n_plants = 10;
    cfg.n_noise_per_plant = 3;
    let records = run_suite(&cfg)?;
    for m in summarize(&cfg, &records).methods {
        println!("{:<8} median rel error {:.4}", m.method, m.median_rel_error);
    }
    for curve in performance_profile(&records, &tau_grid(0.1, 6))? {
        let pts: Vec<String> = curve
            .points
            .iter()
            .map(|(t, f)| format!("{t:.2}:{f:.2}"))
            .collect();
        println!("{:<8} {}", curve.method, pts.join("  "));
    }
    Ok(())
}
