//! Reduced density matrices of contiguous blocks, von Neumann entropy and
//! Uhlmann fidelity.

use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigvals, hermiticity_defect};
use crate::state::StateVector;

/// Eigenvalues below this magnitude contribute nothing to entropies.
pub const EIGEN_FLOOR: f64 = 1e-14;
/// Eigenvalues down to `-NEGATIVE_SLACK` are treated as round-off zeros.
pub const NEGATIVE_SLACK: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-8;

/// Density matrix of the contiguous block of sites `first..=last` (1-based).
#[derive(Clone, Debug)]
pub struct ReducedDensityMatrix {
    matrix: Mat<C64>,
    first: usize,
    last: usize,
}

impl ReducedDensityMatrix {
    /// Wraps an explicit matrix for sites `first..=last`; checks the shape only.
    pub fn from_matrix(matrix: Mat<C64>, first: usize, last: usize) -> Result<Self> {
        if first == 0 || last < first {
            return Err(Error::config(format!("bad site block {first}..={last}")));
        }
        let dim = 1usize << (last - first + 1);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::config(format!(
                "matrix is {}x{}, block of {} sites needs {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols(),
                last - first + 1
            )));
        }
        Ok(ReducedDensityMatrix { matrix, first, last })
    }

    pub fn matrix(&self) -> MatRef<'_, C64> {
        self.matrix.as_ref()
    }

    /// Number of kept sites.
    pub fn block_size(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn kept_sites(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=self.last
    }

    pub fn trace(&self) -> C64 {
        (0..self.matrix.nrows()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.check_hermitian()?;
        hermitian_eigvals(self.matrix.as_ref())
    }

    fn check_hermitian(&self) -> Result<()> {
        let defect = hermiticity_defect(self.matrix.as_ref());
        if defect > HERMITIAN_TOL {
            return Err(Error::numeric(format!("density matrix not Hermitian (defect {defect:.3e})")));
        }
        Ok(())
    }
}

fn block_view(psi: &StateVector, low_sites: usize) -> MatRef<'_, C64> {
    let rows = 1usize << low_sites;
    let cols = psi.dim() / rows;
    MatRef::from_column_major_slice(psi.amplitudes(), rows, cols)
}

/// Keeps sites `1..=a` and traces out `a+1..=L`.
pub fn reduce_to_block(psi: &StateVector, a: usize) -> Result<ReducedDensityMatrix> {
    let l = psi.sites();
    if a == 0 || a >= l {
        return Err(Error::config(format!("block size {a} must satisfy 1 <= A < L = {l}")));
    }
    let m = block_view(psi, a);
    let rho = m * m.adjoint();
    Ok(ReducedDensityMatrix { matrix: rho, first: 1, last: a })
}

/// Keeps the last `n` sites `L-n+1..=L` and traces out the rest.
pub fn reduce_to_tail(psi: &StateVector, n: usize) -> Result<ReducedDensityMatrix> {
    let l = psi.sites();
    if n == 0 || n >= l {
        return Err(Error::config(format!("block size {n} must satisfy 1 <= n < L = {l}")));
    }
    let m = block_view(psi, l - n);
    let rho = m.transpose() * m.conjugate();
    Ok(ReducedDensityMatrix { matrix: rho, first: l - n + 1, last: l })
}

/// `-sum lambda ln lambda` over eigenvalues, natural logarithm.
pub fn entanglement_entropy(rho: &ReducedDensityMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(&rho.eigenvalues()?))
}

pub fn entropy_of_spectrum(eigs: &[f64]) -> f64 {
    eigs.iter()
        .filter(|&&p| p > EIGEN_FLOOR)
        .map(|&p| -p * p.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Entanglement entropy of sites `1..=a` for a pure state.
pub fn block_entropy(psi: &StateVector, a: usize) -> Result<f64> {
    entanglement_entropy(&reduce_to_block(psi, a)?)
}

/// Principal square root of a positive semidefinite Hermitian matrix,
/// clamping slightly negative eigenvalues to zero.
fn psd_sqrt(m: MatRef<'_, C64>) -> Result<Mat<C64>> {
    let (vals, vecs) = hermitian_eigen(m)?;
    if let Some(bad) = vals.iter().find(|&&v| v < -NEGATIVE_SLACK) {
        return Err(Error::numeric(format!("matrix is not positive semidefinite (eigenvalue {bad:.3e})")));
    }
    Ok(crate::linalg::hermitian_function(&vals, vecs.as_ref(), |v| v.max(0.0).sqrt()))
}

/// `F = (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2`, clamped to `[0, 1]`.
pub fn uhlmann_fidelity(rho1: &ReducedDensityMatrix, rho2: &ReducedDensityMatrix) -> Result<f64> {
    let (m1, m2) = (rho1.matrix(), rho2.matrix());
    if m1.nrows() != m2.nrows() {
        return Err(Error::config(format!(
            "fidelity of {}x{} and {}x{} matrices",
            m1.nrows(),
            m1.ncols(),
            m2.nrows(),
            m2.ncols()
        )));
    }
    rho1.check_hermitian()?;
    rho2.check_hermitian()?;
    let s = psd_sqrt(m1)?;
    let inner = s.as_ref() * m2 * s.as_ref();
    let n = inner.nrows();
    let inner = Mat::<C64>::from_fn(n, n, |i, j| 0.5 * (inner[(i, j)] + inner[(j, i)].conj()));
    let root_trace: f64 = hermitian_eigvals(inner.as_ref())?
        .into_iter()
        .map(|v| v.max(0.0).sqrt())
        .sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}
