//! Closed-form squared Wasserstein-2 distances between Gaussians.
//!
//! Three forms, trading accuracy for speed:
//!
//! * **full** — the exact closed form
//!   ‖μ₁−μ₂‖² + tr Σ₁ + tr Σ₂ − 2·tr((Σ₁^{1/2} Σ₂ Σ₁^{1/2})^{1/2}),
//!   requiring one matrix square root per component and one symmetric
//!   eigenvalue problem per pair.
//! * **scaled** — assumes every covariance is a positive per-node scaling
//!   of one shared matrix (the shape produced by
//!   [`crate::gmm::scale_project`]); the distance needs only the shared
//!   eigenvalues λₓ and the two node scales:
//!   ‖μᵢ−μⱼ‖² + Σₓ λₓ/dᵢₓ + λₓ/dⱼₓ − 2λₓ/√(dᵢₓ dⱼₓ).
//! * **tied** — assumes all covariances are equal, leaving only
//!   ‖μᵢ−μⱼ‖².
//!
//! All three clamp small negative floating-point residue to zero.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gmm::GaussianComponent;

/// Absolute asymmetry tolerated by [`sqrtm_psd`] before erroring.
const SYM_TOL: f64 = 1e-9;

/// Residual bound for the square-root verification ‖R·R − M‖_F.
const RESIDUAL_TOL: f64 = 1e-7;

/// Off-diagonal mass (relative to 1+‖M‖_F) below which a rotated matrix
/// counts as diagonalized; 100× stricter than [`RESIDUAL_TOL`] so the
/// square root built from it passes verification with margin.
const OFF_DIAG_TOL: f64 = 1e-9;

/// Frobenius norm of the off-diagonal part.
fn off_diagonal_norm(t: &DMatrix<f64>) -> f64 {
    let d = t.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += t[(i, j)] * t[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// One cyclic Jacobi sweep: rotates every (p, q) plane of the symmetric
/// matrix `t` to zero t[(p,q)], accumulating the rotations into `v`.
fn jacobi_sweep(t: &mut DMatrix<f64>, v: &mut DMatrix<f64>) {
    let d = t.nrows();
    for p in 0..d {
        for q in (p + 1)..d {
            let apq = t[(p, q)];
            if apq.abs() <= f64::EPSILON * (t[(p, p)].abs() + t[(q, q)].abs()) {
                continue;
            }
            let theta = (t[(q, q)] - t[(p, p)]) / (2.0 * apq);
            let tan = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (tan * tan + 1.0).sqrt();
            let s = tan * c;
            for k in 0..d {
                let tkp = t[(k, p)];
                let tkq = t[(k, q)];
                t[(k, p)] = c * tkp - s * tkq;
                t[(k, q)] = s * tkp + c * tkq;
            }
            for k in 0..d {
                let tpk = t[(p, k)];
                let tqk = t[(q, k)];
                t[(p, k)] = c * tpk - s * tqk;
                t[(q, k)] = s * tpk + c * tqk;
            }
            for k in 0..d {
                let vkp = v[(k, p)];
                let vkq = v[(k, q)];
                v[(k, p)] = c * vkp - s * vkq;
                v[(k, q)] = s * vkp + c * vkq;
            }
        }
    }
}

/// Eigendecomposition of a symmetric matrix with a verified backward
/// error: the library solver's basis V is kept, but the eigenvalues are
/// replaced by the Rayleigh quotients diag(VᵀMV), and if the off-diagonal
/// mass of VᵀMV shows the decomposition is inaccurate (the QL iteration
/// can be off by ~1e-5 on flat-spectrum covariances), cyclic Jacobi
/// sweeps finish the diagonalization. Returns (V, eigenvalues).
fn symmetric_eigen_refined(sym: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let d = sym.nrows();
    let mut v = sym.clone().symmetric_eigen().eigenvectors;
    let mut t = v.transpose() * sym * &v;
    t = (&t + t.transpose()) * 0.5;
    let bound = OFF_DIAG_TOL * (1.0 + sym.norm());
    let mut sweeps = 0;
    while off_diagonal_norm(&t) > bound && sweeps < 10 {
        jacobi_sweep(&mut t, &mut v);
        sweeps += 1;
    }
    (v, DVector::from_iterator(d, (0..d).map(|i| t[(i, i)])))
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

fn squared_mean_gap(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Principal square root of a symmetric PSD matrix via eigendecomposition
/// V·√Λ·Vᵀ. Small negative eigenvalues (floating-point residue) are
/// clamped to zero. The result is verified: ‖R·R − M‖_F must stay within
/// 1e−7·(1+‖M‖_F).
pub fn sqrtm_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "square root needs a square matrix, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let d = m.nrows();
    let mut asym = 0.0f64;
    for i in 0..d {
        for j in (i + 1)..d {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > SYM_TOL {
        return Err(Error::Domain(format!(
            "matrix is asymmetric by {asym:.3e} (tolerance {SYM_TOL:.0e})"
        )));
    }
    let sym = (m + m.transpose()) * 0.5;
    let (v, vals) = symmetric_eigen_refined(&sym);
    let sqrt_vals = DVector::from_iterator(d, vals.iter().map(|&l| l.max(0.0).sqrt()));
    let r = &v * DMatrix::from_diagonal(&sqrt_vals) * v.transpose();
    let r = (&r + r.transpose()) * 0.5;
    let residual = (&r * &r - &sym).norm();
    if residual > RESIDUAL_TOL * (1.0 + sym.norm()) {
        return Err(Error::Numerical(format!(
            "matrix square root residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(r)
}

/// Full closed-form W₂² given a precomputed square root and trace of the
/// first covariance; lets a caller amortize the square root across many
/// pairs sharing one side.
pub(crate) fn w2_full_from_sqrt(
    mean_a: &DVector<f64>,
    trace_a: f64,
    sqrt_a: &DMatrix<f64>,
    b: &GaussianComponent,
) -> Result<f64> {
    check_dims(mean_a.len(), b.dim())?;
    let m = sqrt_a * &b.cov * sqrt_a;
    let m = (&m + m.transpose()) * 0.5;
    let cross: f64 = m
        .symmetric_eigenvalues()
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .sum();
    let d2 = squared_mean_gap(mean_a, &b.mean) + trace_a + b.cov.trace() - 2.0 * cross;
    Ok(d2.max(0.0))
}

/// Exact squared Wasserstein-2 distance between two Gaussians.
///
/// Identical inputs short-circuit to exactly 0 so that self-distances
/// survive a later square root without eigensolver residue.
pub fn gaussian_w2_full(a: &GaussianComponent, b: &GaussianComponent) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    if a == b {
        return Ok(0.0);
    }
    let sqrt_a = sqrtm_psd(&a.cov)?;
    w2_full_from_sqrt(&a.mean, a.cov.trace(), &sqrt_a, b)
}

/// Squared W₂ under the shared-spectrum assumption: covariances
/// Σᵥ = Dᵥ^{-1/2} Σ̄ Dᵥ^{-1/2} with Dᵥ = diag(node scales), λ the
/// eigenvalues of Σ̄. Computed coordinate by coordinate.
pub fn gaussian_w2_scaled(
    mu_i: &DVector<f64>,
    mu_j: &DVector<f64>,
    shared_eigs: &DVector<f64>,
    d_i: &DVector<f64>,
    d_j: &DVector<f64>,
) -> Result<f64> {
    check_dims(mu_i.len(), mu_j.len())?;
    check_dims(mu_i.len(), shared_eigs.len())?;
    check_dims(d_i.len(), shared_eigs.len())?;
    check_dims(d_j.len(), shared_eigs.len())?;
    let mut acc = squared_mean_gap(mu_i, mu_j);
    for x in 0..shared_eigs.len() {
        let (lam, di, dj) = (shared_eigs[x], d_i[x], d_j[x]);
        if !(di > 0.0) || !(dj > 0.0) {
            return Err(Error::Domain(format!(
                "node scales must be strictly positive, got {di} and {dj}"
            )));
        }
        // Equal scales make the covariance term vanish identically;
        // skipping it keeps self-distances free of √(dᵢdⱼ) rounding.
        if di != dj {
            acc += lam / di + lam / dj - 2.0 * lam / (di * dj).sqrt();
        }
    }
    Ok(acc.max(0.0))
}

/// Squared W₂ under the tied assumption (all covariances equal): just the
/// squared Euclidean distance between the means.
pub fn gaussian_w2_tied(mu_i: &DVector<f64>, mu_j: &DVector<f64>) -> Result<f64> {
    check_dims(mu_i.len(), mu_j.len())?;
    Ok(squared_mean_gap(mu_i, mu_j))
}
