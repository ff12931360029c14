//! Independent reference implementations used as test oracles, plus the
//! property checks shared by the property suites and the acceptance run.
#![allow(dead_code)]

use faer::Mat;
use kickchain::density::{block_entropy, reduce_to_block, reduce_to_tail, uhlmann_fidelity, ReducedDensityMatrix};
use kickchain::floquet::{EvolutionSchedule, FloquetOperator};
use kickchain::linalg::unitarity_defect;
use kickchain::scaling::{collapse, CollapseGrid, ScalingDataset, ScalingPoint};
use kickchain::{ChainConfig, StateVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_state(l: usize, seed: u64) -> StateVector {
    let mut r = rng(seed);
    let amps: Vec<C64> = (0..1usize << l).map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
    StateVector::normalized(l, amps).unwrap()
}

/// Kronecker product.
pub fn kron(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    Mat::from_fn(a.nrows() * b.nrows(), a.ncols() * b.ncols(), |i, j| {
        a[(i / b.nrows(), j / b.ncols())] * b[(i % b.nrows(), j % b.ncols())]
    })
}

pub fn identity(n: usize) -> Mat<C64> {
    Mat::from_fn(n, n, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn scale(m: &Mat<C64>, s: f64) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

/// Single-site operators in the basis `(down, up)` = `(bit 0, bit 1)`.
pub fn pauli(which: char) -> Mat<C64> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let rows: [[C64; 2]; 2] = match which {
        'x' => [[z, o], [o, z]],
        'y' => [[z, i], [-i, z]],  // sigma^y with |up> = bit 1 listed second
        'z' => [[-o, z], [z, o]],
        _ => unreachable!(),
    };
    Mat::from_fn(2, 2, |r, col| rows[r][col])
}

/// `op` acting on `site` (1-based) of an `l`-site chain; site 1 is the least
/// significant bit, i.e. the rightmost Kronecker factor.
pub fn embed(op: &Mat<C64>, site: usize, l: usize) -> Mat<C64> {
    let mut out = identity(1);
    for s in (1..=l).rev() {
        out = kron(&out, &if s == site { op.clone() } else { identity(2) });
    }
    out
}

/// `sum_j hop (s+_j s-_{j+1} + h.c.) + omega sigma^x_j` from Kronecker products,
/// with `s+ = |up><down|` so the flip-flop matrix element equals `hop`.
pub fn kron_hamiltonian(l: usize, hop: f64, omega: f64) -> Mat<C64> {
    let d = 1usize << l;
    let mut h = Mat::<C64>::zeros(d, d);
    let raise = Mat::from_fn(2, 2, |r, col| if r == 1 && col == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let lower = Mat::from_fn(2, 2, |r, col| if r == 0 && col == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
    for j in 1..=l {
        h = h + scale(&embed(&pauli('x'), j, l), omega);
        if j < l {
            let a = embed(&raise, j, l) * embed(&lower, j + 1, l);
            let b = embed(&lower, j, l) * embed(&raise, j + 1, l);
            h = h + scale(&(a + b), hop);
        }
    }
    h
}

/// `exp(-i H t)` via the Hermitian eigendecomposition of the oracle Hamiltonian.
pub fn oracle_expm(h: &Mat<C64>, t: f64) -> Mat<C64> {
    let evd = h.self_adjoint_eigen(faer::Side::Lower).unwrap();
    let u = evd.U();
    let s = evd.S().column_vector();
    let n = h.nrows();
    let scaled = Mat::from_fn(n, n, |i, k| u[(i, k)] * C64::from_polar(1.0, -s[k].re * t));
    scaled * u.adjoint()
}

/// `rho_A` for sites `1..=a` by an explicit sum over the traced indices.
pub fn brute_partial_trace(psi: &StateVector, a: usize) -> Mat<C64> {
    let l = psi.sites();
    let da = 1usize << a;
    let db = 1usize << (l - a);
    let amps = psi.amplitudes();
    Mat::from_fn(da, da, |i, k| {
        let mut acc = c(0.0, 0.0);
        for rest in 0..db {
            acc += amps[i | (rest << a)] * amps[k | (rest << a)].conj();
        }
        acc
    })
}

/// `(Tr |sqrt(rho1) sqrt(rho2)|)^2` from singular values.
pub fn svd_fidelity(r1: &Mat<C64>, r2: &Mat<C64>) -> f64 {
    let s1 = psd_sqrt(r1);
    let s2 = psd_sqrt(r2);
    let prod = &s1 * &s2;
    let sv = prod.singular_values().unwrap();
    sv.iter().sum::<f64>().powi(2)
}

fn psd_sqrt(m: &Mat<C64>) -> Mat<C64> {
    let evd = m.self_adjoint_eigen(faer::Side::Lower).unwrap();
    let u = evd.U();
    let s = evd.S().column_vector();
    let n = m.nrows();
    let scaled = Mat::from_fn(n, n, |i, k| u[(i, k)] * s[k].re.max(0.0).sqrt());
    scaled * u.adjoint()
}

/// Random full-rank density matrix `G G^dagger / Tr`.
pub fn random_density(n: usize, seed: u64) -> Mat<C64> {
    let mut r = rng(seed);
    let g = Mat::from_fn(n, n, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
    let m = &g * g.adjoint();
    let tr: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    scale(&m, 1.0 / tr)
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` divided out.
pub fn haar_unitary(n: usize, r: &mut ChaCha8Rng) -> Mat<C64> {
    let g = Mat::from_fn(n, n, |_, _| {
        let (u1, u2): (f64, f64) = (r.gen_range(1e-300..1.0), r.gen_range(0.0..1.0));
        C64::from_polar((-2.0 * u1.ln()).sqrt(), 2.0 * std::f64::consts::PI * u2)
    });
    let qr = g.qr();
    let q = qr.compute_Q();
    let rr = qr.R();
    Mat::from_fn(n, n, |i, k| {
        let d = rr[(k, k)];
        q[(i, k)] * (d / d.norm()).conj()
    })
}

// ---- property checks -------------------------------------------------------

pub fn unitarity_defect_of(cfg: &ChainConfig) -> f64 {
    let u = FloquetOperator::dense(cfg).unwrap();
    unitarity_defect(u.dense_matrix().unwrap().as_ref())
}

/// Max deviation of `<sigma^z_j>` after `n` kicks at `J = 0` from independent
/// single-spin evolutions.
pub fn factorization_defect(cfg: &ChainConfig, pattern_bits: usize, n: usize) -> f64 {
    assert_eq!(cfg.j, 0.0);
    let l = cfg.l;
    let psi = StateVector::basis(l, pattern_bits).unwrap();
    let u = FloquetOperator::matrix_free(cfg).unwrap();
    let out = u.apply_n(&psi, n).unwrap();
    let kappa = cfg.kick_coefficients();
    let (ct, st) = ((cfg.omega * cfg.t).cos(), (cfg.omega * cfg.t).sin());
    let mut worst: f64 = 0.0;
    for j in 1..=l {
        // amplitudes (down, up) of one spin
        let mut v = if pattern_bits >> (j - 1) & 1 == 1 { [c(0.0, 0.0), c(1.0, 0.0)] } else { [c(1.0, 0.0), c(0.0, 0.0)] };
        for _ in 0..n {
            let rot = [v[0] * ct - c(0.0, st) * v[1], v[1] * ct - c(0.0, st) * v[0]];
            v = [rot[0] * C64::from_polar(1.0, kappa[j - 1]), rot[1] * C64::from_polar(1.0, -kappa[j - 1])];
        }
        let sz = v[1].norm_sqr() - v[0].norm_sqr();
        worst = worst.max((sz - out.sigma_z(j).unwrap()).abs());
    }
    worst
}

/// Max amplitude difference between dense and Krylov evolution over `n` kicks.
pub fn path_defect(cfg: &ChainConfig, seed: u64, n: usize) -> f64 {
    let psi = random_state(cfg.l, seed);
    let dense = FloquetOperator::dense(cfg).unwrap();
    let free = FloquetOperator::matrix_free(cfg).unwrap();
    let schedule = EvolutionSchedule::every_kick(n);
    let a = dense.evolve(&psi, &schedule).unwrap();
    let b = free.evolve(&psi, &schedule).unwrap();
    a.iter()
        .zip(&b)
        .flat_map(|(x, y)| x.amplitudes().iter().zip(y.amplitudes()).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

/// `|S(1..=a) - S(a+1..=L)|` for a random pure state.
pub fn entropy_asymmetry(l: usize, a: usize, seed: u64) -> f64 {
    let psi = random_state(l, seed);
    let left = block_entropy(&psi, a).unwrap();
    let right = kickchain::density::entanglement_entropy(&reduce_to_tail(&psi, l - a).unwrap()).unwrap();
    (left - right).abs()
}

/// Uhlmann fidelity of two random 2-qubit reduced states against the SVD oracle.
pub fn fidelity_oracle_gap(seed: u64) -> f64 {
    let r1 = random_density(4, seed);
    let r2 = random_density(4, seed ^ 0x5eed);
    let a = ReducedDensityMatrix::from_matrix(r1.clone(), 1, 2).unwrap();
    let b = ReducedDensityMatrix::from_matrix(r2.clone(), 1, 2).unwrap();
    let f = uhlmann_fidelity(&a, &b).unwrap();
    let g = uhlmann_fidelity(&b, &a).unwrap();
    (f - svd_fidelity(&r1, &r2)).abs().max((f - g).abs())
}

/// Partial trace against the brute-force sum.
pub fn partial_trace_gap(l: usize, a: usize, seed: u64) -> f64 {
    let psi = random_state(l, seed);
    let rho = reduce_to_block(&psi, a).unwrap();
    let oracle = brute_partial_trace(&psi, a);
    kickchain::linalg::max_abs_diff(rho.matrix(), oracle.as_ref())
}

/// Dataset sampled from `atan(x / 4)` with `x = (K - k_c) L^{1/nu}`.
pub fn planted_dataset(k_c: f64, nu: f64, scale: f64, shift: f64) -> ScalingDataset {
    let mut points = Vec::new();
    for l in [8usize, 10, 12] {
        for i in 0..=16 {
            let k = 0.05 * i as f64;
            let x = (k - k_c) * (l as f64).powf(1.0 / nu);
            points.push(ScalingPoint { l, k, samples: vec![scale * (x / 4.0).atan() + shift] });
        }
    }
    ScalingDataset::new("O_F", points).unwrap()
}

/// `(|K_c - planted|, |nu - planted|)` after a collapse.
pub fn collapse_recovery(k_c: f64, nu: f64) -> (f64, f64) {
    let ds = planted_dataset(k_c, nu, 1.0, 0.0);
    let r = collapse(&ds, &CollapseGrid::default_for(&ds)).unwrap();
    ((r.k_c - k_c).abs(), (r.nu - nu).abs())
}
