//! Sector test: is the Nyquist plot inside the disk over [a, b]?
use hinf_core::estimators::{estimate, sector_test, EstimatorConfig};
use hinf_core::oracle::{NoiseModel, QuerySession};
use hinf_core::signals::{hinf_norm, FirFilter};

fn main() -> hinf_core::Result<()> {
    let (a, b) = (-1.0, 2.0);
    let g = FirFilter::from_real(&[0.5, 0.4, 0.3])?;
    let shifted = g.shifted((a + b) / 2.0);
    let exact = hinf_norm(&shifted, 1e-10)?.value;
    let mut s = QuerySession::new(shifted, 3, 1.0, 400, NoiseModel::real(0.05), 6)?;
    let est = estimate(&mut s, &EstimatorConfig::plugin(3).with_seed(1))?.final_estimate;
    println!(
        "shifted norm {est:.4} (exact {exact:.4}), radius {:.4}",
        (b - a) / 2.0
    );
    println!("verdict: {:?}", sector_test(est, a, b, 0.05)?);
    Ok(())
}
