//! Lanczos approximation of `exp(-i H t) v` for a real symmetric `H` given only
//! through its action.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::real_symmetric_eigen;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovOptions {
    /// Target a-posteriori residual per substep.
    pub tol: f64,
    /// Largest Krylov subspace before the step is split.
    pub max_dim: usize,
    /// Largest number of substeps per call.
    pub max_substeps: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions { tol: 1e-10, max_dim: 30, max_substeps: 1024 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KrylovStats {
    pub substeps: usize,
    pub max_dim_used: usize,
    pub worst_residual: f64,
}

enum StepOutcome {
    Converged { dim: usize, residual: f64 },
    Stalled { residual: f64 },
}

/// `exp(-i H time) psi` where `op(x, y)` writes `y = H x`.
pub fn expm_apply<F>(op: &F, psi: &[C64], time: f64, opts: &KrylovOptions) -> Result<(Vec<C64>, KrylovStats)>
where
    F: Fn(&[C64], &mut [C64]),
{
    let mut substeps = 1usize;
    let mut last_residual = f64::NAN;
    while substeps <= opts.max_substeps {
        let tau = time / substeps as f64;
        let mut current = psi.to_vec();
        let mut stats = KrylovStats { substeps, ..Default::default() };
        let mut ok = true;
        for _ in 0..substeps {
            match lanczos_step(op, &mut current, tau, opts)? {
                StepOutcome::Converged { dim, residual } => {
                    stats.max_dim_used = stats.max_dim_used.max(dim);
                    stats.worst_residual = stats.worst_residual.max(residual);
                }
                StepOutcome::Stalled { residual } => {
                    last_residual = residual;
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok((current, stats));
        }
        substeps *= 2;
    }
    Err(Error::KrylovNonConvergence {
        residual: last_residual,
        tol: opts.tol,
        substeps: opts.max_substeps,
        dim: opts.max_dim,
    })
}

/// One Lanczos propagation of `v` by `tau`, in place on success.
fn lanczos_step<F>(op: &F, v: &mut [C64], tau: f64, opts: &KrylovOptions) -> Result<StepOutcome>
where
    F: Fn(&[C64], &mut [C64]),
{
    let n = v.len();
    let beta0 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if beta0 == 0.0 || tau == 0.0 {
        return Ok(StepOutcome::Converged { dim: 0, residual: 0.0 });
    }

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(opts.max_dim);
    basis.push(v.iter().map(|a| a / beta0).collect());
    let mut alphas: Vec<f64> = Vec::with_capacity(opts.max_dim);
    let mut betas: Vec<f64> = Vec::with_capacity(opts.max_dim);
    let mut w = vec![C64::new(0.0, 0.0); n];
    let mut residual = f64::INFINITY;

    for step in 0..opts.max_dim {
        op(&basis[step], &mut w);
        let cur = &basis[step];
        let alpha: f64 = cur.iter().zip(&w).map(|(q, x)| (q.conj() * x).re).sum();
        // Three-term recurrence, fused with the overlap `corr = <q, w>` used for one
        // extra orthogonalisation against the current vector and with `|w|^2`.
        let mut corr = C64::new(0.0, 0.0);
        let mut norm2 = 0.0;
        match step.checked_sub(1) {
            Some(prev) => {
                let b = betas[prev];
                for ((x, q), p) in w.iter_mut().zip(cur).zip(&basis[prev]) {
                    *x -= q * alpha + p * b;
                    corr += q.conj() * *x;
                    norm2 += x.norm_sqr();
                }
            }
            None => {
                for (x, q) in w.iter_mut().zip(cur) {
                    *x -= q * alpha;
                    corr += q.conj() * *x;
                    norm2 += x.norm_sqr();
                }
            }
        }
        alphas.push(alpha);
        // |w - corr q|^2 = |w|^2 - |corr|^2 for normalised q.
        let beta = (norm2 - corr.norm_sqr()).max(0.0).sqrt();

        let m = step + 1;
        let coeffs = tridiagonal_expm_first_column(&alphas, &betas, tau)?;
        residual = beta * coeffs[m - 1].norm();
        let breakdown = beta <= 1e-13 * (alphas.iter().fold(0.0f64, |a, x| a.max(x.abs())) + 1.0);
        if residual < opts.tol || breakdown {
            let scaled: Vec<C64> = coeffs.iter().map(|c| c * beta0).collect();
            for (i, x) in v.iter_mut().enumerate() {
                *x = basis.iter().zip(&scaled).map(|(q, c)| q[i] * c).sum();
            }
            return Ok(StepOutcome::Converged { dim: m, residual });
        }
        betas.push(beta);
        if m < opts.max_dim {
            let next = w.iter().zip(cur).map(|(x, q)| (x - q * corr) / beta).collect();
            basis.push(next);
        }
    }
    Ok(StepOutcome::Stalled { residual })
}

/// `exp(-i T tau) e_1` for the symmetric tridiagonal `T` with the given diagonal
/// and off-diagonal.
fn tridiagonal_expm_first_column(diag: &[f64], off: &[f64], tau: f64) -> Result<Vec<C64>> {
    let m = diag.len();
    let t = Mat::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            diag[i]
        } else if i + 1 == j {
            off[i]
        } else if j + 1 == i {
            off[j]
        } else {
            0.0
        }
    });
    let (vals, vecs) = real_symmetric_eigen(t.as_ref())?;
    Ok((0..m)
        .map(|i| {
            (0..m)
                .map(|k| C64::from_polar(vecs[(i, k)] * vecs[(0, k)], -vals[k] * tau))
                .sum()
        })
        .collect())
}
