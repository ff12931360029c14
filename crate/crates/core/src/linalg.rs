//! Thin wrappers over the dense eigensolvers plus the symmetric-unitary
//! eigendecomposition used for Floquet operators.

use faer::{Mat, MatRef, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub fn hermitian_eigvals(m: MatRef<'_, C64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::numeric(format!("hermitian eigensolver failed: {e:?}")))
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: MatRef<'_, C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::numeric(format!("hermitian eigensolver failed: {e:?}")))?;
    let vals = evd.S().column_vector().iter().map(|v| v.re).collect();
    Ok((vals, evd.U().to_owned()))
}

pub fn real_symmetric_eigen(m: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::numeric(format!("symmetric eigensolver failed: {e:?}")))?;
    let vals = evd.S().column_vector().iter().copied().collect();
    Ok((vals, evd.U().to_owned()))
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_defect(m: MatRef<'_, C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `max |A - B|` over entries.
pub fn max_abs_diff(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// `max |U^dagger U - I|`.
pub fn unitarity_defect(u: MatRef<'_, C64>) -> f64 {
    let prod = u.adjoint() * u;
    let id = Mat::<C64>::identity(u.nrows(), u.ncols());
    max_abs_diff(prod.as_ref(), id.as_ref())
}

/// `V f(lambda) V^dagger` for a Hermitian matrix, with `f` applied to the eigenvalues.
pub fn hermitian_function(vals: &[f64], vecs: MatRef<'_, C64>, f: impl Fn(f64) -> f64) -> Mat<C64> {
    let n = vecs.nrows();
    let scaled = Mat::<C64>::from_fn(n, vals.len(), |i, k| vecs[(i, k)] * f(vals[k]));
    scaled * vecs.adjoint()
}

/// Eigendecomposition of a complex symmetric unitary matrix `S = A + iB`.
///
/// `A` and `B` are real, symmetric and commute, so they share a real orthogonal
/// eigenbasis. `A` is diagonalized directly; clusters of (near-)degenerate
/// eigenvalues of `A` (which pair phases `phi` and `-phi`) are split by
/// diagonalizing `B` inside the cluster. Returns the phases `phi_k` with
/// `S q_k = e^{i phi_k} q_k` and the real orthogonal eigenvector matrix.
pub fn symmetric_unitary_eigen(re: MatRef<'_, f64>, im: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    const CLUSTER_GAP: f64 = 1e-6;

    let n = re.nrows();
    assert_eq!(re.shape(), (n, n));
    assert_eq!(im.shape(), (n, n));
    let (a_vals, mut q) = real_symmetric_eigen(re)?;

    let mut cos = a_vals.clone();
    let bq = im * q.as_ref();
    let mut sin: Vec<f64> = (0..n)
        .map(|k| (0..n).map(|i| q[(i, k)] * bq[(i, k)]).sum())
        .collect();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && a_vals[end] - a_vals[end - 1] < CLUSTER_GAP {
            end += 1;
        }
        let size = end - start;
        if size > 1 {
            let block = q.as_ref().subcols(start, size);
            let bblock = bq.as_ref().subcols(start, size);
            let small = block.transpose() * bblock;
            let small = Mat::<f64>::from_fn(size, size, |i, j| 0.5 * (small[(i, j)] + small[(j, i)]));
            let (svals, rot) = real_symmetric_eigen(small.as_ref())?;
            let rotated = block * rot.as_ref();
            let arot = re * rotated.as_ref();
            for c in 0..size {
                let col = start + c;
                for i in 0..n {
                    q[(i, col)] = rotated[(i, c)];
                }
                cos[col] = (0..n).map(|i| rotated[(i, c)] * arot[(i, c)]).sum();
                sin[col] = svals[c];
            }
        }
        start = end;
    }

    let phases = cos.iter().zip(&sin).map(|(c, s)| s.atan2(*c)).collect();
    Ok((phases, q))
}
