//! Passive construction: input covariance, index set, and the hard prior.
use hinf_core::lowerbound::{
    admissible_index_set, chi_sq_mixture, passive_hard_prior, passive_sample_requirement,
    passive_tau, session_covariance, InputDistribution,
};
use hinf_core::signals::{ComplexVec, Field};
use hinf_core::Complex64;

fn main() -> hinf_core::Result<()> {
    let (r, n, sigma) = (8, 400, 1.0);
    let cov = session_covariance(
        &InputDistribution::UniformSphere {
            radius: 1.0,
            field: Field::Complex,
        },
        r,
        20_000,
        7,
    )?;
    println!("gamma (min eigenvalue) = {:.4}", cov.min_eigenvalue);
    let set = admissible_index_set(&cov.matrix, 1.0)?;
    println!("index set {:?}, mean a = {:.4}", set.indices, set.mean);

    let tau = passive_tau(sigma, r, n)?;
    let prior = passive_hard_prior(&cov.matrix, tau, 1.0)?;
    println!(
        "tau = {tau:.4}, member norms {:?}",
        prior
            .member_norms()?
            .iter()
            .map(|h| format!("{h:.3}"))
            .collect::<Vec<_>>()
    );
    println!(
        "sample size the chi-square argument needs: {:.3e}",
        passive_sample_requirement(r, 1.0, cov.min_eigenvalue)?
    );

    let impulses = vec![ComplexVec::basis(r, 0).scaled(Complex64::new(1.0, 0.0)); 20];
    let chi = chi_sq_mixture(&impulses, &prior, sigma)?;
    println!(
        "chi-square under 20 impulses: {:.4}, TV <= {:.4}",
        chi.chi_sq.unwrap(),
        chi.tv_upper
    );
    Ok(())
}
