//! Power methods A and B on a noiseless session, against the section's operator norm.
use hinf_core::estimators::{estimate, EstimatorConfig};
use hinf_core::oracle::{NoiseModel, QuerySession};
use hinf_core::signals::{operator_norm, toeplitz_matrix, FirFilter};

fn main() -> hinf_core::Result<()> {
    let g = FirFilter::from_real(&[1.0, 0.7, 0.3])?;
    let dim = 12;
    let want = operator_norm(&toeplitz_matrix(&g, dim)?)?;
    for cfg in [EstimatorConfig::power_a(), EstimatorConfig::power_b()] {
        let mut s = QuerySession::new(g.clone(), dim, 1.0, 200, NoiseModel::real(0.0), 0)?;
        let tr = estimate(&mut s, &cfg.with_seed(3))?;
        let every = tr.per_round.len() / 5;
        let trend: Vec<String> = tr
            .per_round
            .iter()
            .step_by(every.max(1))
            .map(|h| format!("{h:.6}"))
            .collect();
        println!(
            "{}: {} -> {:.10} (||T|| = {want:.10})",
            tr.variant,
            trend.join(" "),
            tr.final_estimate
        );
    }
    Ok(())
}
