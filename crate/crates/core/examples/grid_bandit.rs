//! MOSS grid bandit on a frequency oracle with a single on-grid peak.
use hinf_core::estimators::{grid_mab_run, EstimatorConfig};
use hinf_core::oracle::FreqQuerySession;
use hinf_core::signals::{dft_matrix, FirFilter};
use hinf_core::Complex64;

fn main() -> hinf_core::Result<()> {
    let arms = 8;
    let g = FirFilter::new(dft_matrix(arms)?.inverse_column(3))?.scaled(Complex64::new(0.5, 0.0));
    for n in [200, 2000] {
        let mut s = FreqQuerySession::new(g.clone(), n, 1.0, 11)?;
        let out = grid_mab_run(&mut s, &EstimatorConfig::grid_mab(arms).with_seed(5))?;
        println!(
            "N={n:<5} chosen arm {} estimate {:.4} pulls {:?}",
            out.chosen_arm, out.trace.final_estimate, out.pulls
        );
    }
    Ok(())
}
