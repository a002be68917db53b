//! Two-point lower bound for active algorithms, checked against an estimator.
use hinf_core::estimators::EstimatorConfig;
use hinf_core::lowerbound::{
    active_certificate, active_hard_prior, estimate_tv_mc, two_point_bayes_risk, FinitePrior,
    SessionParams,
};
use hinf_core::oracle::NoiseModel;
use hinf_core::signals::ComplexVec;

fn main() -> hinf_core::Result<()> {
    let (r, n) = (8, 128);
    let cert = active_certificate(r, n, 1.0, 1.0)?;
    println!("{}", serde_json::to_string_pretty(&cert)?);

    let tau = cert.high_min;
    let zero = FinitePrior::zero(r)?;
    let hard = active_hard_prior(r, tau)?;
    let inputs = vec![ComplexVec::basis(r, 0); n];
    let tv = estimate_tv_mc(&zero, &hard, &inputs, 1.0, 20_000, 1)?;
    println!(
        "Monte Carlo TV under impulses: {:.4} +- {:.4}",
        tv.value, tv.std_err
    );

    let params = SessionParams {
        dim: r,
        input_cap: 1.0,
        budget: n,
        noise: NoiseModel::complex(1.0),
    };
    let risk = two_point_bayes_risk(&EstimatorConfig::plugin(r), &zero, &hard, &params, 200, 2)?;
    println!(
        "plugin Bayes risk {:.4} +- {:.4} >= {:.5}",
        risk.mean, risk.std_err, cert.risk_lower
    );
    Ok(())
}
