//! The one-period Floquet operator `U_F = exp(-i K T sum_j (j-j0)^2 sigma^z_j) exp(-i H_XY T)`.
//!
//! Two propagators are available: a dense one that stores `exp(-i H_XY T)` as a
//! full matrix (built from the eigendecomposition of `H_XY`), and a matrix-free
//! one that applies it with Lanczos. The static part does not depend on the kick,
//! so a [`StaticPropagator`] can be shared by many operators in a sweep.

mod hamiltonian;
mod krylov;

use std::sync::Arc;

use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;

pub use hamiltonian::StaticHamiltonian;
pub use krylov::{expm_apply, KrylovOptions, KrylovStats};

use crate::config::{dense_max_l, ChainConfig};
use crate::error::{Error, Result};
use crate::linalg::real_symmetric_eigen;
use crate::state::StateVector;

/// Diagonal kick factor in the z-basis.
#[derive(Clone, Debug)]
pub struct KickProfile {
    coefficients: Vec<f64>,
    angles: Vec<f64>,
    phases: Vec<C64>,
}

impl KickProfile {
    pub fn new(cfg: &ChainConfig) -> Self {
        let coefficients = cfg.kick_coefficients();
        let dim = cfg.dim();
        let mut angles = vec![0.0; dim];
        for (b, angle) in angles.iter_mut().enumerate() {
            *angle = coefficients
                .iter()
                .enumerate()
                .map(|(j, c)| if (b >> j) & 1 == 1 { *c } else { -*c })
                .sum();
        }
        let phases = angles.iter().map(|a| C64::from_polar(1.0, -a)).collect();
        KickProfile { coefficients, angles, phases }
    }

    /// `K T (j - j0)^2` per site.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `sum_j kappa_j s_j` per basis state; the kick multiplies by `exp(-i angle)`.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn phases(&self) -> &[C64] {
        &self.phases
    }
}

/// `exp(-i H_XY T)` stored densely together with the spectrum of `H_XY`.
#[derive(Debug)]
pub struct DensePropagator {
    ham: StaticHamiltonian,
    period: f64,
    energies: Vec<f64>,
    matrix: Mat<C64>,
}

impl DensePropagator {
    pub fn new(ham: StaticHamiltonian, period: f64) -> Result<Self> {
        let h = ham.dense()?;
        let (energies, modes) = real_symmetric_eigen(h.as_ref())?;
        drop(h);
        let dim = ham.dim();
        // exp(-iHT) = V cos(ET) V^T - i V sin(ET) V^T with V real.
        let vc = Mat::<f64>::from_fn(dim, dim, |i, k| modes[(i, k)] * (energies[k] * period).cos());
        let re = vc.as_ref() * modes.transpose();
        drop(vc);
        let vs = Mat::<f64>::from_fn(dim, dim, |i, k| modes[(i, k)] * (energies[k] * period).sin());
        let im = vs.as_ref() * modes.transpose();
        drop(vs);
        let matrix = Mat::<C64>::from_fn(dim, dim, |i, k| C64::new(re[(i, k)], -im[(i, k)]));
        Ok(DensePropagator { ham, period, energies, matrix })
    }

    pub fn hamiltonian(&self) -> &StaticHamiltonian {
        &self.ham
    }

    /// Eigenvalues of `H_XY`, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn matrix(&self) -> MatRef<'_, C64> {
        self.matrix.as_ref()
    }
}

#[derive(Clone, Debug)]
pub enum StaticPropagator {
    Dense(Arc<DensePropagator>),
    MatrixFree { ham: StaticHamiltonian, period: f64, options: KrylovOptions },
}

impl StaticPropagator {
    pub fn dense(cfg: &ChainConfig) -> Result<Self> {
        let ham = StaticHamiltonian::from_config(cfg)?;
        Ok(StaticPropagator::Dense(Arc::new(DensePropagator::new(ham, cfg.t)?)))
    }

    pub fn matrix_free(cfg: &ChainConfig) -> Result<Self> {
        let ham = StaticHamiltonian::from_config(cfg)?;
        Ok(StaticPropagator::MatrixFree { ham, period: cfg.t, options: KrylovOptions::default() })
    }

    /// Dense when `L` is within the dense limit, matrix-free otherwise.
    pub fn auto(cfg: &ChainConfig) -> Result<Self> {
        if cfg.l <= dense_max_l() {
            Self::dense(cfg)
        } else {
            Self::matrix_free(cfg)
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, StaticPropagator::Dense(_))
    }

    fn matches(&self, cfg: &ChainConfig) -> bool {
        let (ham, period) = match self {
            StaticPropagator::Dense(d) => (&d.ham, d.period),
            StaticPropagator::MatrixFree { ham, period, .. } => (ham, *period),
        };
        ham.sites() == cfg.l && ham.coupling() == cfg.j && ham.field() == cfg.omega && period == cfg.t
    }

    fn apply(&self, psi: &[C64]) -> Result<Vec<C64>> {
        match self {
            StaticPropagator::Dense(d) => {
                let x = faer::ColRef::from_slice(psi);
                let y = d.matrix.as_ref() * x;
                Ok(y.iter().copied().collect())
            }
            StaticPropagator::MatrixFree { ham, period, options } => {
                let op = |x: &[C64], y: &mut [C64]| ham.apply(x, y);
                let (out, _) = expm_apply(&op, psi, *period, options)?;
                Ok(out)
            }
        }
    }
}

/// Number of kicks and recording cadence for stroboscopic evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvolutionSchedule {
    pub n_kicks: usize,
    pub stride: usize,
}

impl EvolutionSchedule {
    pub fn new(n_kicks: usize, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::config("record stride must be >= 1"));
        }
        Ok(EvolutionSchedule { n_kicks, stride })
    }

    pub fn every_kick(n_kicks: usize) -> Self {
        EvolutionSchedule { n_kicks, stride: 1 }
    }

    /// Kick counts at which snapshots are recorded, starting with 0.
    pub fn record_points(&self) -> impl Iterator<Item = usize> {
        (0..=self.n_kicks).step_by(self.stride)
    }

    pub fn n_records(&self) -> usize {
        self.n_kicks / self.stride + 1
    }
}

#[derive(Clone, Debug)]
pub struct FloquetOperator {
    config: ChainConfig,
    kick: KickProfile,
    propagator: StaticPropagator,
}

impl FloquetOperator {
    pub fn with_propagator(cfg: &ChainConfig, propagator: StaticPropagator) -> Result<Self> {
        cfg.validate()?;
        if !propagator.matches(cfg) {
            return Err(Error::config("static propagator was built for different L, J, Omega or T"));
        }
        Ok(FloquetOperator { config: *cfg, kick: KickProfile::new(cfg), propagator })
    }

    pub fn dense(cfg: &ChainConfig) -> Result<Self> {
        Self::with_propagator(cfg, StaticPropagator::dense(cfg)?)
    }

    pub fn matrix_free(cfg: &ChainConfig) -> Result<Self> {
        Self::with_propagator(cfg, StaticPropagator::matrix_free(cfg)?)
    }

    /// Same static part, different kick strength or centre offset.
    pub fn rekick(&self, k: f64, j0_offset: f64) -> Result<Self> {
        let cfg = self.config.with_kick(k).with_offset(j0_offset);
        Self::with_propagator(&cfg, self.propagator.clone())
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn kick(&self) -> &KickProfile {
        &self.kick
    }

    pub fn propagator(&self) -> &StaticPropagator {
        &self.propagator
    }

    pub fn is_dense(&self) -> bool {
        self.propagator.is_dense()
    }

    /// Full `U_F` matrix; `None` on the matrix-free path.
    pub fn dense_matrix(&self) -> Option<Mat<C64>> {
        match &self.propagator {
            StaticPropagator::Dense(d) => {
                let dim = self.config.dim();
                let ph = self.kick.phases();
                Some(Mat::<C64>::from_fn(dim, dim, |i, k| ph[i] * d.matrix[(i, k)]))
            }
            StaticPropagator::MatrixFree { .. } => None,
        }
    }

    /// One kick cycle: static evolution for `T`, then the kick.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.check_dims(psi)?;
        let mut out = self.propagator.apply(psi.amplitudes())?;
        for (a, p) in out.iter_mut().zip(self.kick.phases()) {
            *a *= p;
        }
        Ok(StateVector::from_raw(psi.sites(), out))
    }

    /// `U_F^n psi`.
    pub fn apply_n(&self, psi: &StateVector, n: usize) -> Result<StateVector> {
        self.check_dims(psi)?;
        let mut cur = psi.clone();
        for _ in 0..n {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    /// Streams snapshots `U_F^{k*stride} psi0` to `visit(kicks, state)`.
    pub fn evolve_with<F>(&self, psi0: &StateVector, schedule: &EvolutionSchedule, mut visit: F) -> Result<()>
    where
        F: FnMut(usize, &StateVector) -> Result<()>,
    {
        self.check_dims(psi0)?;
        if schedule.stride == 0 {
            return Err(Error::config("record stride must be >= 1"));
        }
        let mut cur = psi0.clone();
        visit(0, &cur)?;
        for n in 1..=schedule.n_kicks {
            cur = self.apply(&cur)?;
            if n % schedule.stride == 0 {
                visit(n, &cur)?;
            }
        }
        Ok(())
    }

    /// Collects all snapshots; use [`evolve_with`](Self::evolve_with) for large chains.
    pub fn evolve(&self, psi0: &StateVector, schedule: &EvolutionSchedule) -> Result<Vec<StateVector>> {
        let mut out = Vec::with_capacity(schedule.n_records());
        self.evolve_with(psi0, schedule, |_, s| {
            out.push(s.clone());
            Ok(())
        })?;
        Ok(out)
    }

    fn check_dims(&self, psi: &StateVector) -> Result<()> {
        if psi.sites() != self.config.l {
            return Err(Error::config(format!(
                "state has {} sites, operator has {}",
                psi.sites(),
                self.config.l
            )));
        }
        Ok(())
    }
}

pub fn build_static_hamiltonian(cfg: &ChainConfig) -> Result<StaticHamiltonian> {
    StaticHamiltonian::from_config(cfg)
}

/// Dense operator when `L` is within the dense limit, matrix-free otherwise.
pub fn build_floquet(cfg: &ChainConfig) -> Result<FloquetOperator> {
    FloquetOperator::with_propagator(cfg, StaticPropagator::auto(cfg)?)
}

pub fn apply_floquet(u: &FloquetOperator, psi: &StateVector) -> Result<StateVector> {
    u.apply(psi)
}

pub fn evolve(u: &FloquetOperator, psi0: &StateVector, schedule: &EvolutionSchedule) -> Result<Vec<StateVector>> {
    u.evolve(psi0, schedule)
}
