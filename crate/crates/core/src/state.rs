//! State vectors in the computational z-basis.
//!
//! Basis index `b` encodes a spin configuration with site `j` (1-based) stored in
//! bit `j - 1`; a set bit means spin up. Site 1 is the least significant bit.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::config::MATRIX_FREE_MAX_L;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    /// Eigenvalue of `sigma^z`.
    pub fn sz(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

/// Value (+1 / -1) of `sigma^z_site` in basis state `b`; `site` is 1-based.
#[inline]
pub fn spin_z(b: usize, site: usize) -> f64 {
    if (b >> (site - 1)) & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// A normalized pure state of `l` spins.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    l: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps raw amplitudes; the length must be `2^l` and the norm is checked.
    pub fn from_amplitudes(l: usize, amps: Vec<C64>) -> Result<Self> {
        check_sites(l)?;
        if amps.len() != 1usize << l {
            return Err(Error::config(format!(
                "amplitude vector has length {}, expected 2^{l}",
                amps.len()
            )));
        }
        let norm = norm(&amps);
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::config(format!("state is not normalized (norm {norm})")));
        }
        Ok(StateVector { l, amps })
    }

    /// Normalizes `amps` first; fails for a zero vector.
    pub fn normalized(l: usize, mut amps: Vec<C64>) -> Result<Self> {
        let n = norm(&amps);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::numeric("cannot normalize a zero vector"));
        }
        amps.iter_mut().for_each(|a| *a /= n);
        Self::from_amplitudes(l, amps)
    }

    pub(crate) fn from_raw(l: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << l);
        StateVector { l, amps }
    }

    /// Computational basis state `|b>`.
    pub fn basis(l: usize, b: usize) -> Result<Self> {
        check_sites(l)?;
        let dim = 1usize << l;
        if b >= dim {
            return Err(Error::config(format!("basis index {b} out of range for L = {l}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[b] = C64::new(1.0, 0.0);
        Ok(StateVector { l, amps })
    }

    pub fn sites(&self) -> usize {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// `<psi|phi>`
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `<sigma^z_site>`, `site` in `1..=L`.
    pub fn sigma_z(&self, site: usize) -> Result<f64> {
        if site == 0 || site > self.l {
            return Err(Error::config(format!("site {site} outside 1..={}", self.l)));
        }
        Ok(self.sigma_z_unchecked(site))
    }

    pub(crate) fn sigma_z_unchecked(&self, site: usize) -> f64 {
        let bit = 1usize << (site - 1);
        self.amps
            .iter()
            .enumerate()
            .map(|(b, a)| if b & bit != 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    }

    /// All `<sigma^z_j>` for `j = 1..=L` in one pass.
    pub fn sigma_z_profile(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.l];
        for (b, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                if (b >> j) & 1 == 1 {
                    *o += p;
                } else {
                    *o -= p;
                }
            }
        }
        out
    }

    /// Spin-up density `P_up(j) = (<sigma^z_j> + 1) / 2` for every site.
    pub fn up_density(&self) -> Vec<f64> {
        self.sigma_z_profile().into_iter().map(|s| 0.5 * (s + 1.0)).collect()
    }
}

pub(crate) fn norm(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn check_sites(l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::config("a state needs at least one site"));
    }
    if l > MATRIX_FREE_MAX_L {
        return Err(Error::TooLarge { l, max: MATRIX_FREE_MAX_L, what: "state-vector" });
    }
    Ok(())
}

/// Per-site up/down pattern of a product state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpec {
    pattern: Vec<Spin>,
}

impl ProductSpec {
    pub fn new(pattern: Vec<Spin>) -> Self {
        ProductSpec { pattern }
    }

    /// `up down up down ...` starting with site 1 up.
    pub fn neel(l: usize) -> Self {
        Self::from_fn(l, |j| if j % 2 == 1 { Spin::Up } else { Spin::Down })
    }

    pub fn vacuum(l: usize) -> Self {
        Self::from_fn(l, |_| Spin::Down)
    }

    /// One up spin at `site` (1-based), all others down.
    pub fn single_excitation(l: usize, site: usize) -> Self {
        Self::from_fn(l, |j| if j == site { Spin::Up } else { Spin::Down })
    }

    /// Sites `1..=floor(L/2)` up, the rest down.
    pub fn domain_wall(l: usize) -> Self {
        Self::from_fn(l, |j| if j <= l / 2 { Spin::Up } else { Spin::Down })
    }

    /// Parses `u`/`d` (or `1`/`0`, arrows) per site, site 1 first.
    pub fn parse_pattern(s: &str) -> Result<Self> {
        let pattern = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'u' | 'U' | '1' | '↑' => Ok(Spin::Up),
                'd' | 'D' | '0' | '↓' => Ok(Spin::Down),
                other => Err(Error::config(format!("bad spin symbol {other:?} in pattern {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if pattern.is_empty() {
            return Err(Error::config("empty spin pattern"));
        }
        Ok(ProductSpec { pattern })
    }

    fn from_fn(l: usize, f: impl Fn(usize) -> Spin) -> Self {
        ProductSpec { pattern: (1..=l).map(f).collect() }
    }

    pub fn len(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pattern.is_empty()
    }

    pub fn spins(&self) -> &[Spin] {
        &self.pattern
    }

    /// Basis index of the pattern.
    pub fn index(&self) -> usize {
        self.pattern
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Spin::Up)
            .fold(0usize, |acc, (j, _)| acc | (1 << j))
    }
}

/// Builds the product state for `spec` on `l` sites.
pub fn make_product_state(l: usize, spec: &ProductSpec) -> Result<StateVector> {
    if spec.len() != l {
        return Err(Error::config(format!(
            "pattern has {} sites but the chain has {l}",
            spec.len()
        )));
    }
    StateVector::basis(l, spec.index())
}

/// Two-configuration entangled states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntangledKind {
    /// `(|up_i down_j> + |down_i up_j>)/sqrt(2)` with every other spin down.
    BellPair(usize, usize),
    /// `(|c> + |c'>)/sqrt(2)` where `c` has site 1 down, sites `2..=(L+1)/2` up
    /// and the rest down, and `c'` is its global spin flip.
    GlobalBell,
}

pub fn make_entangled_state(l: usize, kind: EntangledKind) -> Result<StateVector> {
    check_sites(l)?;
    let (a, b) = match kind {
        EntangledKind::BellPair(i, j) => {
            if i == j {
                return Err(Error::config(format!("bell pair needs distinct sites, got {i} twice")));
            }
            if i == 0 || j == 0 || i > l || j > l {
                return Err(Error::config(format!("bell pair sites ({i}, {j}) outside 1..={l}")));
            }
            (1usize << (i - 1), 1usize << (j - 1))
        }
        EntangledKind::GlobalBell => {
            if l < 2 {
                return Err(Error::config("global bell state needs L >= 2"));
            }
            let c = (2..=(l + 1) / 2).fold(0usize, |acc, j| acc | (1 << (j - 1)));
            (c, !c & ((1usize << l) - 1))
        }
    };
    let mut amps = vec![C64::new(0.0, 0.0); 1usize << l];
    amps[a] = C64::new(FRAC_1_SQRT_2, 0.0);
    amps[b] = C64::new(FRAC_1_SQRT_2, 0.0);
    Ok(StateVector::from_raw(l, amps))
}

/// Named initial states accepted by the CLI and the FFI layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StatePreset {
    Neel,
    Vacuum,
    DomainWall,
    SingleExcitation(usize),
    Pattern(ProductSpec),
    Entangled(EntangledKind),
}

impl StatePreset {
    pub fn build(&self, l: usize) -> Result<StateVector> {
        match self {
            StatePreset::Neel => make_product_state(l, &ProductSpec::neel(l)),
            StatePreset::Vacuum => make_product_state(l, &ProductSpec::vacuum(l)),
            StatePreset::DomainWall => make_product_state(l, &ProductSpec::domain_wall(l)),
            StatePreset::SingleExcitation(site) => {
                if *site == 0 || *site > l {
                    return Err(Error::config(format!("excitation site {site} outside 1..={l}")));
                }
                make_product_state(l, &ProductSpec::single_excitation(l, *site))
            }
            StatePreset::Pattern(spec) => make_product_state(l, spec),
            StatePreset::Entangled(kind) => make_entangled_state(l, *kind),
        }
    }

    /// Product pattern of the preset, if it is a product state.
    pub fn product_spec(&self, l: usize) -> Option<ProductSpec> {
        match self {
            StatePreset::Neel => Some(ProductSpec::neel(l)),
            StatePreset::Vacuum => Some(ProductSpec::vacuum(l)),
            StatePreset::DomainWall => Some(ProductSpec::domain_wall(l)),
            StatePreset::SingleExcitation(site) => Some(ProductSpec::single_excitation(l, *site)),
            StatePreset::Pattern(spec) => Some(spec.clone()),
            StatePreset::Entangled(_) => None,
        }
    }
}

impl FromStr for StatePreset {
    type Err = Error;

    /// Accepts `neel`, `vacuum`, `domain_wall`, `single:<site>`, `bell_pair:<i>,<j>`,
    /// `global_bell` or `pattern:<udud...>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let parse_site = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::config(format!("bad site number {t:?} in state {s:?}")))
        };
        match (head.to_ascii_lowercase().as_str(), arg) {
            ("neel", None) => Ok(StatePreset::Neel),
            ("vacuum", None) => Ok(StatePreset::Vacuum),
            ("domain_wall", None) => Ok(StatePreset::DomainWall),
            ("global_bell", None) => Ok(StatePreset::Entangled(EntangledKind::GlobalBell)),
            ("single" | "single_excitation", Some(a)) => {
                Ok(StatePreset::SingleExcitation(parse_site(a)?))
            }
            ("bell_pair", Some(a)) => {
                let (i, j) = a
                    .split_once(',')
                    .ok_or_else(|| Error::config(format!("bell_pair needs two sites: {s:?}")))?;
                Ok(StatePreset::Entangled(EntangledKind::BellPair(parse_site(i)?, parse_site(j)?)))
            }
            ("pattern", Some(a)) => Ok(StatePreset::Pattern(ProductSpec::parse_pattern(a)?)),
            _ => Err(Error::config(format!("unknown state preset {s:?}"))),
        }
    }
}

impl fmt::Display for StatePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatePreset::Neel => write!(f, "neel"),
            StatePreset::Vacuum => write!(f, "vacuum"),
            StatePreset::DomainWall => write!(f, "domain_wall"),
            StatePreset::SingleExcitation(s) => write!(f, "single:{s}"),
            StatePreset::Pattern(p) => {
                let text: String =
                    p.spins().iter().map(|s| if *s == Spin::Up { 'u' } else { 'd' }).collect();
                write!(f, "pattern:{text}")
            }
            StatePreset::Entangled(EntangledKind::BellPair(i, j)) => write!(f, "bell_pair:{i},{j}"),
            StatePreset::Entangled(EntangledKind::GlobalBell) => write!(f, "global_bell"),
        }
    }
}
