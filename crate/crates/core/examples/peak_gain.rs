//! Certified peak gain of a filter, compared with the DFT lower bound and the
//! Toeplitz-section operator norm.
use hinf_core::signals::{
    dft_norm_lower_bound, hinf_norm, operator_norm, toeplitz_matrix, FirFilter,
};

fn main() -> hinf_core::Result<()> {
    let g = FirFilter::from_real(&[1.0, -0.6, 0.35, 0.2, -0.1])?;
    let res = hinf_norm(&g, 1e-10)?;
    println!(
        "||H||_inf     = {:.10} at omega = {:.6}",
        res.value, res.argmax_freq
    );
    println!(
        "error bound   = {:.2e} ({} grid points)",
        res.error_bound, res.grid_points
    );
    println!("||F g||_inf   = {:.10}", dft_norm_lower_bound(&g));
    for dim in [5, 20, 80] {
        let op = operator_norm(&toeplitz_matrix(&g, dim)?)?;
        println!("||T(g)||, L={dim:<3} = {op:.10}");
    }
    Ok(())
}
