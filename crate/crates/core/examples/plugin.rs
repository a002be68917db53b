//! Least-squares plugin estimate under noise, for growing budgets.
use hinf_core::estimators::{estimate, EstimatorConfig};
use hinf_core::oracle::{NoiseModel, QuerySession};
use hinf_core::signals::{hinf_norm, FirFilter};

fn main() -> hinf_core::Result<()> {
    let g = FirFilter::from_real(&[1.0, 0.5, -0.4, 0.25])?;
    let truth = hinf_norm(&g, 1e-10)?.value;
    println!("truth {truth:.6}");
    for n in [10, 100, 1000] {
        let mut s = QuerySession::new(g.clone(), 20, 1.0, n, NoiseModel::real(0.1), 1)?;
        let tr = estimate(&mut s, &EstimatorConfig::plugin(4).with_seed(2))?;
        println!(
            "N={n:<5} estimate {:.6}  rel error {:.2e}",
            tr.final_estimate,
            (tr.final_estimate - truth).abs() / truth
        );
    }
    Ok(())
}
