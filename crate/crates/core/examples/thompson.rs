//! Weighted Thompson sampling: where the input power ends up.
use hinf_core::estimators::{wts_run, EstimatorConfig};
use hinf_core::oracle::{NoiseModel, QuerySession};
use hinf_core::signals::{hinf_norm, FirFilter};

fn main() -> hinf_core::Result<()> {
    let g = FirFilter::from_real(&[0.5, 0.9, 0.4, -0.3, 0.2])?;
    let truth = hinf_norm(&g, 1e-10)?;
    let mut cfg = EstimatorConfig::wts().with_seed(4);
    cfg.cyclic_prefix = Some(4);
    let mut s = QuerySession::new(g, 50, 1.0, 200, NoiseModel::real(0.05), 9)?;
    let out = wts_run(&mut s, &cfg)?;
    println!(
        "estimate {:.6} at omega {:.4}",
        out.trace.final_estimate, out.bin_frequencies[out.best_bin]
    );
    println!(
        "truth    {:.6} at omega {:.4}",
        truth.value, truth.argmax_freq
    );
    for (w, p) in out.bin_frequencies.iter().zip(&out.profile) {
        if *p > 0.01 {
            println!("  omega {w:.4}: power {p:.3}");
        }
    }
    Ok(())
}
