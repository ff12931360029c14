use faer::Mat;
use num_complex::Complex64 as C64;

use crate::config::{dense_max_l, ChainConfig, MATRIX_FREE_MAX_L};
use crate::error::{Error, Result};

/// `H_XY = sum_j J (s+_j s-_{j+1} + s+_{j+1} s-_j) + Omega sigma^x_j` on an open chain.
///
/// The flip-flop term is normalised so that exchanging an adjacent `up/down`
/// pair costs `2J`, i.e. `J (sigma^x sigma^x + sigma^y sigma^y)` per bond.
///
/// Matrix elements in the z-basis are real: `Omega` between states differing by
/// one spin flip and [`hop_amplitude`](Self::hop_amplitude) between states related
/// by exchanging an adjacent `up/down` pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaticHamiltonian {
    l: usize,
    j: f64,
    omega: f64,
}

impl StaticHamiltonian {
    pub fn new(l: usize, j: f64, omega: f64) -> Result<Self> {
        if l == 0 {
            return Err(Error::config("hamiltonian needs at least one site"));
        }
        if l > MATRIX_FREE_MAX_L {
            return Err(Error::TooLarge { l, max: MATRIX_FREE_MAX_L, what: "state-vector" });
        }
        if !j.is_finite() || !omega.is_finite() {
            return Err(Error::config("hamiltonian couplings must be finite"));
        }
        Ok(StaticHamiltonian { l, j, omega })
    }

    pub fn from_config(cfg: &ChainConfig) -> Result<Self> {
        cfg.validate()?;
        Self::new(cfg.l, cfg.j, cfg.omega)
    }

    pub fn sites(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        1usize << self.l
    }

    pub fn coupling(&self) -> f64 {
        self.j
    }

    pub fn field(&self) -> f64 {
        self.omega
    }

    /// Flip-flop matrix element `<..up down..|H|..down up..>`.
    pub fn hop_amplitude(&self) -> f64 {
        2.0 * self.j
    }

    /// Dense real symmetric matrix; refused above the dense-path limit.
    pub fn dense(&self) -> Result<Mat<f64>> {
        let max = dense_max_l();
        if self.l > max {
            return Err(Error::TooLarge { l: self.l, max, what: "dense" });
        }
        let dim = self.dim();
        let hop = self.hop_amplitude();
        let mut h = Mat::<f64>::zeros(dim, dim);
        for b in 0..dim {
            for site in 0..self.l {
                h[(b ^ (1 << site), b)] += self.omega;
            }
            for site in 0..self.l.saturating_sub(1) {
                if ((b >> site) ^ (b >> (site + 1))) & 1 == 1 {
                    h[(b ^ (0b11 << site), b)] += hop;
                }
            }
        }
        Ok(h)
    }

    /// `out = H x`.
    ///
    /// Works tile by tile: sites below `TILE_BITS` act inside a cache-sized tile
    /// as contiguous slice updates, higher sites pair whole tiles.
    pub fn apply(&self, x: &[C64], out: &mut [C64]) {
        let dim = self.dim();
        assert_eq!(x.len(), dim);
        assert_eq!(out.len(), dim);
        let l = self.l;
        let k = l.min(TILE_BITS);
        let m = 1usize << k;
        let hop = self.hop_amplitude();
        let omega = self.omega;
        for (t, y) in out.chunks_exact_mut(m).enumerate() {
            let tile = |u: usize| &x[u << k..(u + 1) << k];
            let xt = tile(t);

            y.fill(C64::new(0.0, 0.0));
            for s in 0..k {
                let h = 1usize << s;
                for (yb, xb) in y.chunks_exact_mut(2 * h).zip(xt.chunks_exact(2 * h)) {
                    let (ylo, yhi) = yb.split_at_mut(h);
                    let (xlo, xhi) = xb.split_at(h);
                    add_to(ylo, xhi, 1.0);
                    add_to(yhi, xlo, 1.0);
                }
            }
            for s in k..l {
                add_to(y, tile(t ^ (1 << (s - k))), 1.0);
            }
            if omega != 1.0 {
                for v in y.iter_mut() {
                    *v *= omega;
                }
            }

            // Exchange on bond (s, s+1) links the `01` and `10` quarters of each
            // aligned block of 4 * 2^s states.
            for s in 0..k.saturating_sub(1) {
                let h = 1usize << s;
                for (yb, xb) in y.chunks_exact_mut(4 * h).zip(xt.chunks_exact(4 * h)) {
                    let (y01, y10) = yb[h..3 * h].split_at_mut(h);
                    let (x01, x10) = xb[h..3 * h].split_at(h);
                    add_to(y01, x10, hop);
                    add_to(y10, x01, hop);
                }
            }
            if k < l {
                // Bond (k-1, k): bit k-1 lives in the tile offset, bit k in the tile index.
                let half = m / 2;
                let xp = tile(t ^ 1);
                if t & 1 == 0 {
                    add_to(&mut y[half..], &xp[..half], hop);
                } else {
                    add_to(&mut y[..half], &xp[half..], hop);
                }
            }
            for s in k..l.saturating_sub(1) {
                let q = s - k;
                if ((t >> q) ^ (t >> (q + 1))) & 1 == 1 {
                    add_to(y, tile(t ^ (0b11 << q)), hop);
                }
            }
        }
    }
}

/// Sites handled inside one tile of `2^TILE_BITS` amplitudes (64 KiB).
const TILE_BITS: usize = 12;

#[inline]
fn add_to(y: &mut [C64], x: &[C64], c: f64) {
    for (a, b) in y.iter_mut().zip(x) {
        *a += b * c;
    }
}
