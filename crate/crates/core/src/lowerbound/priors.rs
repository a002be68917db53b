use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FinitePrior, PriorKind};
use crate::error::{Error, Result};
use crate::estimators;
use crate::rng;
use crate::signals::{dft_matrix, toeplitz_of_vec, CMatrix, ComplexVec, Field, FirFilter};

/// Eigenvalues down to `-PSD_TOL * ||Sigma||` are treated as rounding and clamped.
const PSD_TOL: f64 = 1e-10;

/// `{tau F^{-1} e_i}` for `i = 0..r`. Each member has `F theta = tau e_i`,
/// so its peak gain is at least `tau`.
pub fn active_hard_prior(r: usize, tau: f64) -> Result<FinitePrior> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau", "must be positive"));
    }
    let f = dft_matrix(r)?;
    let support = (0..r)
        .map(|i| FirFilter::new(f.inverse_column(i).scaled(Complex64::new(tau, 0.0))))
        .collect::<Result<Vec<_>>>()?;
    FinitePrior::with_kind(support, PriorKind::ActiveHard { tau })
}

fn hermitian_eigen(sigma: &CMatrix) -> Result<(DVector<f64>, CMatrix, f64)> {
    if !sigma.is_square() || sigma.nrows() == 0 {
        return Err(Error::invalid(
            "sigma",
            "matrix must be square and non-empty",
        ));
    }
    let scale = sigma.norm().max(f64::MIN_POSITIVE);
    let asym = (sigma - sigma.adjoint()).norm();
    if asym > 1e-10 * scale {
        return Err(Error::invalid(
            "sigma",
            format!("not Hermitian (asymmetry {asym:e})"),
        ));
    }
    let herm = (sigma + sigma.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    Ok((eig.eigenvalues, eig.eigenvectors, scale))
}

fn spectral_map(vectors: &CMatrix, values: impl Iterator<Item = f64>) -> CMatrix {
    let diag = DVector::from_iterator(vectors.ncols(), values.map(|v| Complex64::new(v, 0.0)));
    vectors * DMatrix::from_diagonal(&diag) * vectors.adjoint()
}

/// Hermitian PSD square root; slightly negative eigenvalues are clamped to 0.
pub fn psd_sqrt(sigma: &CMatrix) -> Result<CMatrix> {
    let (values, vectors, scale) = hermitian_eigen(sigma)?;
    let min = values.min();
    if min < -PSD_TOL * scale {
        return Err(Error::NotPsd { eigenvalue: min });
    }
    Ok(spectral_map(
        &vectors,
        values.iter().map(|&v| v.max(0.0).sqrt()),
    ))
}

/// `Sigma^{-1/2}` for Hermitian positive definite `Sigma`.
pub fn psd_inv_sqrt(sigma: &CMatrix) -> Result<CMatrix> {
    let (values, vectors, scale) = hermitian_eigen(sigma)?;
    let min = values.min();
    if min < -PSD_TOL * scale {
        return Err(Error::NotPsd { eigenvalue: min });
    }
    if min <= PSD_TOL * scale {
        return Err(Error::Singular { eigenvalue: min });
    }
    Ok(spectral_map(
        &vectors,
        values.iter().map(|&v| 1.0 / v.sqrt()),
    ))
}

/// How a passive algorithm draws its inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputDistribution {
    /// A deterministic schedule `u_1, ..., u_N`.
    Fixed(Vec<ComplexVec>),
    /// Uniform on the sphere of the given radius.
    UniformSphere { radius: f64, field: Field },
}

#[derive(Clone, Debug)]
pub struct CovarianceReport {
    /// `(1/N) sum_t E[T(u_t)^* T(u_t)]`.
    pub matrix: CMatrix,
    /// Smallest eigenvalue: the admissibility level `gamma`.
    pub min_eigenvalue: f64,
    /// Per-entry standard errors of the real and imaginary parts for Monte
    /// Carlo schedules.
    pub std_err: Option<DMatrix<f64>>,
}

fn gram_of_input(u: &ComplexVec, dim: usize) -> CMatrix {
    let t = toeplitz_of_vec(u.as_slice(), dim);
    t.adjoint() * t
}

pub fn session_covariance(
    dist: &InputDistribution,
    dim: usize,
    samples: usize,
    seed: u64,
) -> Result<CovarianceReport> {
    if dim == 0 {
        return Err(Error::invalid("dim", "must be positive"));
    }
    let (matrix, std_err) = match dist {
        InputDistribution::Fixed(inputs) => {
            if inputs.is_empty() {
                return Err(Error::EmptyData("input schedule"));
            }
            let mut acc = CMatrix::zeros(dim, dim);
            for u in inputs {
                if u.len() != dim {
                    return Err(Error::Dimension {
                        context: "schedule input",
                        expected: dim,
                        got: u.len(),
                    });
                }
                acc += gram_of_input(u, dim);
            }
            (acc / Complex64::new(inputs.len() as f64, 0.0), None)
        }
        InputDistribution::UniformSphere { radius, field } => {
            if samples == 0 {
                return Err(Error::invalid("samples", "need at least one sample"));
            }
            let mut stream = rng::stream(&[seed, 0x636f_76]);
            let mut sum = CMatrix::zeros(dim, dim);
            let mut sq_re = DMatrix::<f64>::zeros(dim, dim);
            let mut sq_im = DMatrix::<f64>::zeros(dim, dim);
            for _ in 0..samples {
                let u = estimators::random_unit(&mut stream, dim, *field)
                    .scaled(Complex64::new(*radius, 0.0));
                let g = gram_of_input(&u, dim);
                for (idx, z) in g.iter().enumerate() {
                    sq_re[idx] += z.re * z.re;
                    sq_im[idx] += z.im * z.im;
                }
                sum += g;
            }
            let n = samples as f64;
            let mean = sum / Complex64::new(n, 0.0);
            let se = DMatrix::from_fn(dim, dim, |i, j| {
                let m = mean[(i, j)];
                let var_re = (sq_re[(i, j)] / n - m.re * m.re).max(0.0);
                let var_im = (sq_im[(i, j)] / n - m.im * m.im).max(0.0);
                ((var_re + var_im) / n).sqrt()
            });
            (mean, Some(se))
        }
    };
    let (values, _, _) = hermitian_eigen(&matrix)?;
    Ok(CovarianceReport {
        min_eigenvalue: values.min(),
        matrix,
        std_err,
    })
}

/// Indices `i` with `a_i = (F Sigma^{1/2} F^{-1})_{ii} <= 2 mean(a)`.
#[derive(Clone, Debug)]
pub struct IndexSet {
    pub indices: Vec<usize>,
    /// `a_i` for every `i`.
    pub diag: Vec<f64>,
    pub mean: f64,
    /// `||F Sigma^{-1/2} F^{-1} e_i||_inf` for each selected index.
    pub column_inf_norms: Vec<f64>,
    /// Whether `mean(a) <= M`, which upgrades the column bound to `1 / (2M)`.
    pub mean_within_cap: bool,
}

/// Markov selection of at least `r/2` indices whose transformed
/// `Sigma^{-1/2}` columns have sup-norm at least `1 / (2 mean(a))`.
pub fn admissible_index_set(sigma: &CMatrix, input_cap: f64) -> Result<IndexSet> {
    let r = sigma.nrows();
    let root = psd_sqrt(sigma)?;
    let inv_root = psd_inv_sqrt(sigma)?;
    let f = dft_matrix(r)?;
    let fd = f.to_dense();
    let finv = f.inverse_dense();
    let conj_root = &fd * root * &finv;
    let conj_inv = &fd * inv_root * &finv;

    let diag: Vec<f64> = (0..r).map(|i| conj_root[(i, i)].re.max(0.0)).collect();
    let mean = diag.iter().sum::<f64>() / r as f64;
    let indices: Vec<usize> = (0..r).filter(|&i| diag[i] <= 2.0 * mean).collect();
    let column_inf_norms = indices
        .iter()
        .map(|&i| {
            conj_inv
                .column(i)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(IndexSet {
        indices,
        diag,
        mean,
        column_inf_norms,
        mean_within_cap: mean <= input_cap * (1.0 + 1e-12),
    })
}

/// `{tau Sigma^{-1/2} F^{-1} e_i : i in I}` with `I` from [`admissible_index_set`].
pub fn passive_hard_prior(sigma: &CMatrix, tau: f64, input_cap: f64) -> Result<FinitePrior> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau", "must be positive"));
    }
    let r = sigma.nrows();
    let set = admissible_index_set(sigma, input_cap)?;
    let inv_root = psd_inv_sqrt(sigma)?;
    let f = dft_matrix(r)?;
    let support = set
        .indices
        .iter()
        .map(|&i| {
            let col = DVector::from_column_slice(f.inverse_column(i).as_slice());
            let theta = &inv_root * col * Complex64::new(tau, 0.0);
            FirFilter::from_complex(theta.iter().copied().collect())
        })
        .collect::<Result<Vec<_>>>()?;
    FinitePrior::with_kind(support, PriorKind::PassiveHard { tau, input_cap })
}
