//! Floquet eigenanalysis and eigenstate-ensemble diagnostics.
//!
//! Eigenphases follow `U_F |a> = exp(-i theta_a) |a>` with `theta_a` in `(-pi, pi]`
//! sorted ascending; quasi-energies are `eps_a = theta_a / T`, i.e. the spectrum of
//! `H_F = (i/T) ln U_F` on the principal branch.

use std::f64::consts::PI;

use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ChainConfig;
use crate::density::block_entropy;
use crate::error::{Error, Result};
use crate::floquet::{FloquetOperator, StaticPropagator};
use crate::linalg::symmetric_unitary_eigen;
use crate::state::{spin_z, StateVector};

/// Default number of centre-offset realizations for gap statistics.
pub const DEFAULT_REALIZATIONS: usize = 20;
/// Default half-width of the uniform centre-offset distribution.
pub const DEFAULT_OFFSET_RANGE: f64 = 0.02;

#[derive(Clone, Debug)]
pub struct FloquetSpectrum {
    config: ChainConfig,
    phases: Vec<f64>,
    vectors: Mat<C64>,
}

impl FloquetSpectrum {
    /// Assembles a spectrum from explicit data (phases need not be sorted).
    pub fn from_parts(config: ChainConfig, phases: Vec<f64>, vectors: Mat<C64>) -> Result<Self> {
        let dim = config.dim();
        if phases.len() != dim || vectors.nrows() != dim || vectors.ncols() != dim {
            return Err(Error::config("spectrum dimensions do not match the configuration"));
        }
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]));
        let sorted_phases = order.iter().map(|&k| phases[k]).collect();
        let sorted_vectors = Mat::<C64>::from_fn(dim, dim, |i, c| vectors[(i, order[c])]);
        Ok(FloquetSpectrum { config, phases: sorted_phases, vectors: sorted_vectors })
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    /// `theta_a` in `(-pi, pi]`, ascending.
    pub fn eigenphases(&self) -> &[f64] {
        &self.phases
    }

    /// `eps_a = theta_a / T`.
    pub fn quasienergies(&self) -> Vec<f64> {
        self.phases.iter().map(|p| p / self.config.t).collect()
    }

    /// Eigenvectors as columns, in the order of [`eigenphases`](Self::eigenphases).
    pub fn eigenvectors(&self) -> MatRef<'_, C64> {
        self.vectors.as_ref()
    }

    pub fn eigenstate(&self, a: usize) -> StateVector {
        let amps = self.vectors.col(a).iter().copied().collect();
        StateVector::from_raw(self.config.l, amps)
    }

    /// `c_a = <a|psi>` for every eigenstate.
    pub fn overlaps(&self, psi: &StateVector) -> Result<Vec<C64>> {
        if psi.sites() != self.config.l {
            return Err(Error::config("state and spectrum have different sizes"));
        }
        let x = faer::ColRef::from_slice(psi.amplitudes());
        let c = self.vectors.adjoint() * x;
        Ok(c.iter().copied().collect())
    }

    /// `V diag(exp(-i theta)) V^dagger`.
    pub fn reconstruct(&self) -> Mat<C64> {
        let dim = self.dim();
        let scaled = Mat::<C64>::from_fn(dim, dim, |i, a| self.vectors[(i, a)] * C64::from_polar(1.0, -self.phases[a]));
        scaled * self.vectors.adjoint()
    }
}

/// Full eigendecomposition of a dense Floquet operator.
///
/// `U_F = D W` with `D` the diagonal kick and `W = exp(-i H_XY T)` complex
/// symmetric, so `S = D^{1/2} W D^{1/2}` is a symmetric unitary similar to `U_F`.
/// Its real and imaginary parts commute and are diagonalized in a common real
/// basis; eigenvectors of `U_F` are `D^{1/2} q`.
pub fn diagonalize_floquet(u: &FloquetOperator) -> Result<FloquetSpectrum> {
    let dense = match u.propagator() {
        StaticPropagator::Dense(d) => d.clone(),
        StaticPropagator::MatrixFree { .. } => {
            return Err(Error::config("diagonalization needs the dense propagator"));
        }
    };
    let dim = u.config().dim();
    let half: Vec<C64> = u.kick().angles().iter().map(|a| C64::from_polar(1.0, -0.5 * a)).collect();
    let w = dense.matrix();
    let sym = |i: usize, k: usize| half[i] * w[(i, k)] * half[k];
    let re = Mat::<f64>::from_fn(dim, dim, |i, k| sym(i, k).re);
    let im = Mat::<f64>::from_fn(dim, dim, |i, k| sym(i, k).im);
    let (angles, q) = symmetric_unitary_eigen(re.as_ref(), im.as_ref())?;
    drop(re);
    drop(im);
    let phases: Vec<f64> = angles.iter().map(|&a| fold_phase(-a)).collect();
    let vectors = Mat::<C64>::from_fn(dim, dim, |i, a| half[i] * q[(i, a)]);
    drop(q);
    FloquetSpectrum::from_parts(*u.config(), phases, vectors)
}

/// Maps an angle onto `(-pi, pi]`.
pub fn fold_phase(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// `I_F = (1/D) sum_a sum_p |<p|a>|^4`.
pub fn mean_ipr(spec: &FloquetSpectrum) -> f64 {
    per_state_ipr(spec).iter().sum::<f64>() / spec.dim() as f64
}

pub fn per_state_ipr(spec: &FloquetSpectrum) -> Vec<f64> {
    spec.vectors
        .col_iter()
        .map(|col| col.iter().map(|v| v.norm_sqr() * v.norm_sqr()).sum())
        .collect()
}

/// `sum_j (-1)^j sigma^z_j` evaluated in basis state `b` (sites 1-based).
fn staggered(b: usize, l: usize) -> f64 {
    (1..=l).map(|j| if j % 2 == 0 { spin_z(b, j) } else { -spin_z(b, j) }).sum()
}

/// `(1/L) sum_j (-1)^j <a|sigma^z_j|a>` for each eigenstate.
pub fn per_state_staggered_mag(spec: &FloquetSpectrum) -> Vec<f64> {
    let l = spec.config.l;
    let m: Vec<f64> = (0..spec.dim()).map(|b| staggered(b, l) / l as f64).collect();
    spec.vectors
        .col_iter()
        .map(|col| col.iter().zip(&m).map(|(v, mb)| v.norm_sqr() * mb).sum())
        .collect()
}

/// `O_F = (1/L) sum_j sum_a (-1)^j |c_a|^2 <a|sigma^z_j|a>`.
pub fn diagonal_ensemble_staggered_mag(spec: &FloquetSpectrum, psi0: &StateVector) -> Result<f64> {
    let c = spec.overlaps(psi0)?;
    Ok(per_state_staggered_mag(spec).iter().zip(&c).map(|(m, c)| m * c.norm_sqr()).sum())
}

/// Entanglement entropy of sites `1..=a` for every eigenstate.
pub fn per_state_block_entropy(spec: &FloquetSpectrum, a: usize) -> Result<Vec<f64>> {
    (0..spec.dim()).map(|k| block_entropy(&spec.eigenstate(k), a)).collect()
}

pub fn mean_block_entropy(spec: &FloquetSpectrum, a: usize) -> Result<f64> {
    let s = per_state_block_entropy(spec, a)?;
    Ok(s.iter().sum::<f64>() / s.len() as f64)
}

/// `S_F`: mean half-chain entropy over all eigenstates; requires even `L`.
pub fn mean_half_chain_entropy(spec: &FloquetSpectrum) -> Result<f64> {
    let l = spec.config.l;
    if l % 2 != 0 {
        return Err(Error::config(format!("half-chain entropy needs even L, got {l}")));
    }
    mean_block_entropy(spec, l / 2)
}

/// Mean of `min(d_a, d_{a+1}) / max(d_a, d_{a+1})` over consecutive gaps of
/// the sorted phases, without a wrap-around gap. Pairs of zero gaps are skipped.
pub fn gap_ratio(sorted_phases: &[f64]) -> f64 {
    let gaps: Vec<f64> = sorted_phases.windows(2).map(|w| w[1] - w[0]).collect();
    let mut total = 0.0;
    let mut count = 0usize;
    for pair in gaps.windows(2) {
        let (lo, hi) = if pair[0] < pair[1] { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
        if hi > 0.0 {
            total += lo / hi;
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizationGap {
    pub j0_offset: f64,
    pub r_bar: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapRatioSummary {
    pub r_bar: f64,
    pub seed: u64,
    pub realizations: Vec<RealizationGap>,
}

/// Centre offsets drawn uniformly from `[-range, range]` by a seeded generator.
pub fn sample_offsets(n: usize, range: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| if range > 0.0 { rng.gen_range(-range..=range) } else { 0.0 })
        .collect()
}

/// Gap ratio averaged over eigenphases and `n_realizations` random centre offsets.
pub fn mean_gap_ratio(config: &ChainConfig, n_realizations: usize, offset_range: f64, seed: u64) -> Result<GapRatioSummary> {
    if n_realizations == 0 {
        return Err(Error::config("need at least one realization"));
    }
    if !(offset_range >= 0.0) {
        return Err(Error::config("offset range must be >= 0"));
    }
    let base = FloquetOperator::dense(config)?;
    let realizations = sample_offsets(n_realizations, offset_range, seed)
        .into_iter()
        .map(|off| {
            let u = base.rekick(config.k, config.j0_offset + off)?;
            let spec = diagonalize_floquet(&u)?;
            Ok(RealizationGap { j0_offset: config.j0_offset + off, r_bar: gap_ratio(spec.eigenphases()) })
        })
        .collect::<Result<Vec<_>>>()?;
    let r_bar = realizations.iter().map(|r| r.r_bar).sum::<f64>() / realizations.len() as f64;
    Ok(GapRatioSummary { r_bar, seed, realizations })
}

/// Ensemble averages of one Floquet spectrum.
#[derive(Clone, Debug)]
pub struct SpectralDiagnostics {
    pub ipr: f64,
    pub staggered_mag: f64,
    pub entropy: f64,
    pub entropy_block: usize,
    pub gap_ratio: f64,
    pub ipr_per_state: Vec<f64>,
    pub entropy_per_state: Vec<f64>,
    pub overlap_weights: Vec<f64>,
}

impl SpectralDiagnostics {
    /// `I_F`, `O_F` (against `psi0`), mean entropy of sites `1..=floor(L/2)` and `r_bar`.
    pub fn compute(spec: &FloquetSpectrum, psi0: &StateVector) -> Result<Self> {
        let l = spec.config().l;
        let block = l / 2;
        let ipr_per_state = per_state_ipr(spec);
        let entropy_per_state = per_state_block_entropy(spec, block)?;
        let overlap_weights: Vec<f64> = spec.overlaps(psi0)?.iter().map(|c| c.norm_sqr()).collect();
        let staggered_mag = per_state_staggered_mag(spec)
            .iter()
            .zip(&overlap_weights)
            .map(|(m, w)| m * w)
            .sum();
        let d = spec.dim() as f64;
        Ok(SpectralDiagnostics {
            ipr: ipr_per_state.iter().sum::<f64>() / d,
            staggered_mag,
            entropy: entropy_per_state.iter().sum::<f64>() / d,
            entropy_block: block,
            gap_ratio: gap_ratio(spec.eigenphases()),
            ipr_per_state,
            entropy_per_state,
            overlap_weights,
        })
    }
}

/// `<psi|H_F|psi> = sum_a |<a|psi>|^2 eps_a`.
pub fn effective_hamiltonian_energy(spec: &FloquetSpectrum, psi: &StateVector) -> Result<f64> {
    let c = spec.overlaps(psi)?;
    let t = spec.config.t;
    Ok(c.iter().zip(&spec.phases).map(|(c, p)| c.norm_sqr() * p / t).sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThermalFit {
    pub beta_eff: f64,
    pub epsilon_p: f64,
    pub bracket: (f64, f64),
    /// `|<psi|H_F|psi> - Tr(H_F rho_beta)|` at the returned `beta_eff`.
    pub residual: f64,
    /// The target is reachable only in the `|beta| -> infinity` limit; `beta_eff`
    /// sits at the expanded bracket edge.
    pub saturated: bool,
}

/// Thermal energy `Tr(H_F e^{-beta H_F}) / Tr(e^{-beta H_F})` over quasi-energies.
pub fn thermal_energy(energies: &[f64], beta: f64) -> f64 {
    let shift = if beta >= 0.0 {
        energies.iter().cloned().fold(f64::INFINITY, f64::min)
    } else {
        energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    };
    let (mut num, mut den) = (0.0, 0.0);
    for &e in energies {
        let w = (-beta * (e - shift)).exp();
        num += w * e;
        den += w;
    }
    num / den
}

/// Solves `Tr[H_F (|psi0><psi0| - rho_beta)] = 0` for `beta` by bisection.
pub fn effective_inverse_temperature(spec: &FloquetSpectrum, psi0: &StateVector) -> Result<ThermalFit> {
    let beta_max = 1e3 * spec.config.t;
    solve_beta(&spec.quasienergies(), effective_hamiltonian_energy(spec, psi0)?, beta_max)
}

const BRACKET_DOUBLINGS: usize = 40;

pub fn solve_beta(energies: &[f64], target: f64, beta_max: f64) -> Result<ThermalFit> {
    let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min).max(f64::MIN_POSITIVE);
    let slack = 1e-12 * width;
    if !target.is_finite() || target < min - slack || target > max + slack {
        return Err(Error::ThermalUnsolvable { target, min, max });
    }
    let f = |b: f64| thermal_energy(energies, b) - target;
    let edge = |beta: f64| ThermalFit {
        beta_eff: beta,
        epsilon_p: target,
        bracket: (-beta_max, beta_max),
        residual: f(beta).abs(),
        saturated: true,
    };
    // the spectral edges are reached only as |beta| -> infinity
    if target <= min + slack {
        return Ok(edge(beta_max));
    }
    if target >= max - slack {
        return Ok(edge(-beta_max));
    }

    let (mut lo, mut hi) = (-beta_max, beta_max);
    let mut doublings = 0;
    // f is decreasing: need f(lo) >= 0 >= f(hi)
    while f(hi) > 0.0 && doublings < BRACKET_DOUBLINGS {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }
    while f(lo) < 0.0 && doublings < BRACKET_DOUBLINGS {
        hi = lo;
        lo *= 2.0;
        doublings += 1;
    }
    let bracket = (lo, hi);
    if f(hi) > 0.0 {
        return Ok(ThermalFit { beta_eff: hi, epsilon_p: target, bracket, residual: f(hi).abs(), saturated: true });
    }
    if f(lo) < 0.0 {
        return Ok(ThermalFit { beta_eff: lo, epsilon_p: target, bracket, residual: f(lo).abs(), saturated: true });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (f(lo).abs(), f(hi).abs());
    let beta_eff = if flo < fhi { lo } else { hi };
    Ok(ThermalFit { beta_eff, epsilon_p: target, bracket, residual: flo.min(fhi), saturated: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_phase_branch() {
        assert!((fold_phase(-PI) - PI).abs() < 1e-15);
        assert!((fold_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(fold_phase(0.25), 0.25);
    }

    #[test]
    fn gap_ratio_of_equal_spacing_is_one() {
        let phases: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        assert!((gap_ratio(&phases) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gap_ratio_by_hand() {
        // gaps 1, 2, 4 -> ratios 1/2, 1/2
        assert!((gap_ratio(&[0.0, 1.0, 3.0, 7.0]) - 0.5).abs() < 1e-15);
        assert_eq!(gap_ratio(&[0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn thermal_energy_is_decreasing() {
        let e = [-3.0, -1.0, 0.2, 0.5, 2.5];
        let mut prev = f64::INFINITY;
        for k in -40..=40 {
            let cur = thermal_energy(&e, k as f64 * 0.25);
            assert!(cur < prev);
            prev = cur;
        }
    }

    #[test]
    fn beta_of_mean_energy_is_zero() {
        let e = [-3.0, -1.0, 0.2, 0.5, 2.5];
        let mean = e.iter().sum::<f64>() / e.len() as f64;
        let fit = solve_beta(&e, mean, 62.5).unwrap();
        assert!(fit.beta_eff.abs() < 1e-8);
        assert!(!fit.saturated);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn beta_edge_cases() {
        let e = [-3.0, -1.0, 0.2, 0.5, 2.5];
        let ground = solve_beta(&e, -3.0, 62.5).unwrap();
        assert!(ground.saturated && ground.beta_eff == 62.5);
        let top = solve_beta(&e, 2.5, 62.5).unwrap();
        assert!(top.saturated && top.beta_eff == -62.5);
        assert!(matches!(solve_beta(&e, -4.0, 62.5), Err(Error::ThermalUnsolvable { .. })));
        let near = solve_beta(&e, -2.0, 62.5).unwrap();
        assert!(!near.saturated && near.beta_eff > 0.0);
        assert!((thermal_energy(&e, near.beta_eff) + 2.0).abs() < 1e-10);
    }

    #[test]
    fn offsets_are_seeded_and_bounded() {
        let a = sample_offsets(20, 0.02, 7);
        assert_eq!(a, sample_offsets(20, 0.02, 7));
        assert_ne!(a, sample_offsets(20, 0.02, 8));
        assert!(a.iter().all(|x| x.abs() <= 0.02));
        assert!(sample_offsets(3, 0.0, 1).iter().all(|x| *x == 0.0));
    }
}
