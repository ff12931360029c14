//! Finite-size scaling: data collapse in `(K - K_c) L^{1/nu}` and contour tracing
//! on `(K, J)` grids.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bandwidth of the local-linear master curve, in median abscissa spacings.
pub const BANDWIDTH_SPACINGS: f64 = 3.0;
/// Candidates in which fewer points than this fraction find partners from other
/// sizes are rejected.
pub const MIN_OVERLAP: f64 = 0.5;
pub const DEFAULT_BOOTSTRAP: usize = 100;
/// Contour level of the IPR boundary guide.
pub const DEFAULT_BOUNDARY_LEVEL: f64 = 0.009;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub l: usize,
    pub k: f64,
    /// One value per realization; the point value is their mean.
    pub samples: Vec<f64>,
}

impl ScalingPoint {
    pub fn value(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingDataset {
    pub observable: String,
    pub points: Vec<ScalingPoint>,
}

impl ScalingDataset {
    pub fn new(observable: impl Into<String>, points: Vec<ScalingPoint>) -> Result<Self> {
        let ds = ScalingDataset { observable: observable.into(), points };
        ds.validate()?;
        Ok(ds)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut ls: Vec<usize> = self.points.iter().map(|p| p.l).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    pub fn kicks(&self) -> Vec<f64> {
        let mut ks: Vec<f64> = self.points.iter().map(|p| p.k).collect();
        ks.sort_by(f64::total_cmp);
        ks.dedup();
        ks
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes().len() < 3 {
            return Err(Error::Data(format!("collapse needs at least 3 system sizes, got {:?}", self.sizes())));
        }
        if self.points.iter().any(|p| p.samples.is_empty() || !p.k.is_finite()) {
            return Err(Error::Data("every point needs a finite K and at least one sample".into()));
        }
        Ok(())
    }

    fn values(&self) -> Vec<f64> {
        self.points.iter().map(ScalingPoint::value).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseResult {
    pub observable: String,
    pub k_c: f64,
    pub nu: f64,
    pub cost: f64,
    /// Cost of the unscaled curves (`x = K`).
    pub raw_cost: f64,
    /// Rescaling does not improve on the raw curves.
    pub non_critical: bool,
    pub k_c_std: Option<f64>,
    pub nu_std: Option<f64>,
    pub bootstrap_samples: usize,
    pub seed: Option<u64>,
}

/// Candidate grids for a collapse.
#[derive(Clone, Debug, PartialEq)]
pub struct CollapseGrid {
    pub k_c: Vec<f64>,
    pub nu: Vec<f64>,
}

impl CollapseGrid {
    /// `K_c` on the data's `K` range at a quarter of its smallest spacing;
    /// `nu` from 0.3 to 1.2 in steps of 0.01.
    pub fn default_for(ds: &ScalingDataset) -> Self {
        let ks = ds.kicks();
        let (lo, hi) = (ks[0], ks[ks.len() - 1]);
        let step = ks.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let step = if step.is_finite() && step > 0.0 { step / 4.0 } else { 0.01 };
        let n = ((hi - lo) / step).round() as usize;
        CollapseGrid {
            k_c: (0..=n).map(|i| lo + i as f64 * step).collect(),
            nu: (0..=90).map(|i| 0.3 + 0.01 * i as f64).collect(),
        }
    }
}

/// Mean squared residual of every point against a local-linear fit through the
/// points of the other sizes.
pub fn collapse_cost(ls: &[usize], xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let mut sorted: Vec<f64> = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).filter(|g| *g > 0.0).collect();
    if gaps.is_empty() {
        return f64::INFINITY;
    }
    gaps.sort_by(f64::total_cmp);
    let h = BANDWIDTH_SPACINGS * gaps[gaps.len() / 2];

    let mut total = 0.0;
    let mut used = 0usize;
    for i in 0..n {
        let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let mut partners = 0usize;
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..n {
            if ls[k] == ls[i] {
                continue;
            }
            let d = (xs[k] - xs[i]) / h;
            if d.abs() >= 1.0 {
                continue;
            }
            let w = (1.0 - d.abs().powi(3)).powi(3);
            let dx = xs[k] - xs[i];
            sw += w;
            sx += w * dx;
            sy += w * ys[k];
            sxx += w * dx * dx;
            sxy += w * dx * ys[k];
            partners += 1;
            xmin = xmin.min(xs[k]);
            xmax = xmax.max(xs[k]);
        }
        if partners < 2 || xmin >= xmax {
            continue;
        }
        let det = sw * sxx - sx * sx;
        if det.abs() <= 1e-300 {
            continue;
        }
        let intercept = (sxx * sy - sx * sxy) / det;
        total += (ys[i] - intercept).powi(2);
        used += 1;
    }
    if (used as f64) < MIN_OVERLAP * n as f64 {
        return f64::INFINITY;
    }
    total / used as f64
}

fn rescaled(ds: &ScalingDataset, k_c: f64, nu: f64) -> Vec<f64> {
    ds.points.iter().map(|p| (p.k - k_c) * (p.l as f64).powf(1.0 / nu)).collect()
}

fn cost_at(ds: &ScalingDataset, ls: &[usize], ys: &[f64], k_c: f64, nu: f64) -> f64 {
    collapse_cost(ls, &rescaled(ds, k_c, nu), ys)
}

fn grid_search(ds: &ScalingDataset, ys: &[f64], grid: &CollapseGrid) -> (f64, f64, f64) {
    let ls: Vec<usize> = ds.points.iter().map(|p| p.l).collect();
    let candidates: Vec<(f64, f64)> = grid.k_c.iter().flat_map(|&k| grid.nu.iter().map(move |&n| (k, n))).collect();
    let scored: Vec<f64> = candidates.par_iter().map(|&(k, n)| cost_at(ds, &ls, ys, k, n)).collect();
    // first minimum in grid order, independent of scheduling
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    for (&(k, n), &c) in candidates.iter().zip(&scored) {
        if c < best.2 {
            best = (k, n, c);
        }
    }
    if !best.2.is_finite() {
        return best;
    }
    let mut dk = step_of(&grid.k_c);
    let mut dn = step_of(&grid.nu);
    let (k_lo, k_hi) = bounds(&grid.k_c);
    let (n_lo, n_hi) = bounds(&grid.nu);
    for _ in 0..3 {
        let (k0, n0, _) = best;
        for a in -5..=5 {
            for b in -5..=5 {
                let k = (k0 + a as f64 * dk / 5.0).clamp(k_lo, k_hi);
                let n = (n0 + b as f64 * dn / 5.0).clamp(n_lo.max(1e-3), n_hi);
                let c = cost_at(ds, &ls, ys, k, n);
                if c < best.2 {
                    best = (k, n, c);
                }
            }
        }
        dk /= 5.0;
        dn /= 5.0;
    }
    best
}

fn step_of(v: &[f64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min).min(1.0)
}

fn bounds(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Grid minimizer of the collapse cost followed by local refinement.
pub fn collapse(ds: &ScalingDataset, grid: &CollapseGrid) -> Result<CollapseResult> {
    ds.validate()?;
    if grid.k_c.is_empty() || grid.nu.is_empty() || grid.nu.iter().any(|n| !(*n > 0.0)) {
        return Err(Error::config("collapse grids must be non-empty with nu > 0"));
    }
    let ys = ds.values();
    let (k_c, nu, cost) = grid_search(ds, &ys, grid);
    if !cost.is_finite() {
        return Err(Error::numeric("no candidate produced overlapping curves"));
    }
    let ls: Vec<usize> = ds.points.iter().map(|p| p.l).collect();
    let ks: Vec<f64> = ds.points.iter().map(|p| p.k).collect();
    let raw_cost = collapse_cost(&ls, &ks, &ys);
    Ok(CollapseResult {
        observable: ds.observable.clone(),
        k_c,
        nu,
        cost,
        raw_cost,
        non_critical: raw_cost <= cost * (1.0 + 1e-9) + 1e-300,
        k_c_std: None,
        nu_std: None,
        bootstrap_samples: 0,
        seed: None,
    })
}

/// [`collapse`] plus the spread of `(K_c, nu)` over `n` resamplings of each
/// point's realizations.
pub fn collapse_with_bootstrap(ds: &ScalingDataset, grid: &CollapseGrid, n: usize, seed: u64) -> Result<CollapseResult> {
    let mut result = collapse(ds, grid)?;
    if n == 0 {
        return Ok(result);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let resampled: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            ds.points
                .iter()
                .map(|p| {
                    let m = p.samples.len();
                    (0..m).map(|_| p.samples[rng.gen_range(0..m)]).sum::<f64>() / m as f64
                })
                .collect()
        })
        .collect();
    let fits: Vec<(f64, f64, f64)> = resampled.iter().map(|ys| grid_search(ds, ys, grid)).collect();
    let fits: Vec<&(f64, f64, f64)> = fits.iter().filter(|f| f.2.is_finite()).collect();
    if fits.len() >= 2 {
        let std = |sel: fn(&(f64, f64, f64)) -> f64| {
            let m = fits.iter().map(|f| sel(f)).sum::<f64>() / fits.len() as f64;
            (fits.iter().map(|f| (sel(f) - m).powi(2)).sum::<f64>() / (fits.len() - 1) as f64).sqrt()
        };
        result.k_c_std = Some(std(|f| f.0));
        result.nu_std = Some(std(|f| f.1));
    }
    result.bootstrap_samples = fits.len();
    result.seed = Some(seed);
    Ok(result)
}

/// `(L, K, x, value)` rows of the collapsed curves.
pub fn collapsed_curve(ds: &ScalingDataset, k_c: f64, nu: f64) -> Vec<(usize, f64, f64, f64)> {
    let mut rows: Vec<_> = ds
        .points
        .iter()
        .zip(rescaled(ds, k_c, nu))
        .map(|(p, x)| (p.l, p.k, x, p.value()))
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    rows
}

/// Values on a rectangular `(K, J)` grid, `values[j_index][k_index]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2 {
    pub ks: Vec<f64>,
    pub js: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl Grid2 {
    /// Builds the grid from scattered `(K, J, value)` triples, averaging repeats.
    pub fn from_triples(triples: &[(f64, f64, f64)]) -> Result<Self> {
        let mut cells: BTreeMap<(u64, u64), (f64, usize)> = BTreeMap::new();
        for &(k, j, v) in triples {
            let e = cells.entry((key(j), key(k))).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
        let mut ks: Vec<f64> = triples.iter().map(|t| t.0).collect();
        let mut js: Vec<f64> = triples.iter().map(|t| t.1).collect();
        for v in [&mut ks, &mut js] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        let mut values = vec![vec![f64::NAN; ks.len()]; js.len()];
        for (jj, &j) in js.iter().enumerate() {
            for (kk, &k) in ks.iter().enumerate() {
                match cells.get(&(key(j), key(k))) {
                    Some(&(s, c)) => values[jj][kk] = s / c as f64,
                    None => return Err(Error::Data(format!("grid is missing the point K={k}, J={j}"))),
                }
            }
        }
        Ok(Grid2 { ks, js, values })
    }
}

fn key(x: f64) -> u64 {
    // order-preserving for the non-negative grid coordinates used here
    x.to_bits()
}

/// Contour `value = level` as polylines of `(K, J)` points, from per-cell edge
/// crossings of the bilinear interpolant.
pub fn boundary_trace(grid: &Grid2, level: f64) -> Vec<Vec<(f64, f64)>> {
    let mut segments: Vec<[(f64, f64); 2]> = Vec::new();
    let (nk, nj) = (grid.ks.len(), grid.js.len());
    if nk < 2 || nj < 2 {
        return Vec::new();
    }
    for jj in 0..nj - 1 {
        for kk in 0..nk - 1 {
            let (k0, k1, j0, j1) = (grid.ks[kk], grid.ks[kk + 1], grid.js[jj], grid.js[jj + 1]);
            let v00 = grid.values[jj][kk] - level;
            let v10 = grid.values[jj][kk + 1] - level;
            let v01 = grid.values[jj + 1][kk] - level;
            let v11 = grid.values[jj + 1][kk + 1] - level;
            if [v00, v10, v01, v11].iter().any(|v| !v.is_finite()) {
                continue;
            }
            // edges in cyclic order: bottom, right, top, left
            let corners = [(k0, j0, v00), (k1, j0, v10), (k1, j1, v11), (k0, j1, v01)];
            let mut pts = Vec::with_capacity(4);
            for e in 0..4 {
                let (ka, ja, va) = corners[e];
                let (kb, jb, vb) = corners[(e + 1) % 4];
                if (va < 0.0) != (vb < 0.0) {
                    let s = va / (va - vb);
                    pts.push((ka + s * (kb - ka), ja + s * (jb - ja)));
                }
            }
            match pts.len() {
                2 => segments.push([pts[0], pts[1]]),
                4 => {
                    let centre = 0.25 * (v00 + v10 + v01 + v11);
                    if (centre < 0.0) == (v00 < 0.0) {
                        segments.push([pts[0], pts[1]]);
                        segments.push([pts[2], pts[3]]);
                    } else {
                        segments.push([pts[3], pts[0]]);
                        segments.push([pts[1], pts[2]]);
                    }
                }
                _ => {}
            }
        }
    }
    join_segments(segments)
}

fn join_segments(mut segments: Vec<[(f64, f64); 2]>) -> Vec<Vec<(f64, f64)>> {
    let close = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12;
    let mut lines = Vec::new();
    while let Some(first) = segments.pop() {
        let mut line = vec![first[0], first[1]];
        loop {
            let tail = *line.last().unwrap();
            let head = line[0];
            if let Some(i) = segments.iter().position(|s| close(s[0], tail) || close(s[1], tail)) {
                let s = segments.swap_remove(i);
                line.push(if close(s[0], tail) { s[1] } else { s[0] });
            } else if let Some(i) = segments.iter().position(|s| close(s[0], head) || close(s[1], head)) {
                let s = segments.swap_remove(i);
                line.insert(0, if close(s[0], head) { s[1] } else { s[0] });
            } else {
                break;
            }
        }
        lines.push(line);
    }
    lines.sort_by(|a, b| a[0].1.total_cmp(&b[0].1).then(a[0].0.total_cmp(&b[0].0)));
    lines
}

/// First `K` (scanning upward) where the row at `j` crosses `level`, with
/// linear interpolation in `K` and, off-grid, in `J`.
pub fn crossing_at(grid: &Grid2, level: f64, j: f64) -> Option<f64> {
    let nj = grid.js.len();
    let row: Vec<f64> = if let Some(jj) = grid.js.iter().position(|&g| (g - j).abs() < 1e-12) {
        grid.values[jj].clone()
    } else {
        let hi = grid.js.partition_point(|&g| g < j);
        if hi == 0 || hi == nj {
            return None;
        }
        let s = (j - grid.js[hi - 1]) / (grid.js[hi] - grid.js[hi - 1]);
        grid.values[hi - 1].iter().zip(&grid.values[hi]).map(|(a, b)| a + s * (b - a)).collect()
    };
    for kk in 0..grid.ks.len().saturating_sub(1) {
        let (a, b) = (row[kk] - level, row[kk + 1] - level);
        if a == 0.0 {
            return Some(grid.ks[kk]);
        }
        if (a < 0.0) != (b < 0.0) {
            let s = a / (a - b);
            return Some(grid.ks[kk] + s * (grid.ks[kk + 1] - grid.ks[kk]));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(k_c: f64, nu: f64) -> ScalingDataset {
        let mut points = Vec::new();
        for l in [8usize, 10, 12] {
            for i in 0..=16 {
                let k = 0.05 * i as f64;
                let x = (k - k_c) * (l as f64).powf(1.0 / nu);
                points.push(ScalingPoint { l, k, samples: vec![(x / 4.0).atan()] });
            }
        }
        ScalingDataset::new("O_F", points).unwrap()
    }

    #[test]
    fn recovers_planted_point() {
        let ds = planted(0.4, 0.7);
        let r = collapse(&ds, &CollapseGrid::default_for(&ds)).unwrap();
        assert!((r.k_c - 0.4).abs() < 0.01, "{r:?}");
        assert!((r.nu - 0.7).abs() < 0.05, "{r:?}");
        assert!(!r.non_critical);
    }

    #[test]
    fn identical_curves_are_non_critical() {
        let mut points = Vec::new();
        for l in [8usize, 10, 12] {
            for i in 0..=16 {
                let k = 0.05 * i as f64;
                points.push(ScalingPoint { l, k, samples: vec![(3.0 * k).sin()] });
            }
        }
        let ds = ScalingDataset::new("O_F", points).unwrap();
        let r = collapse(&ds, &CollapseGrid::default_for(&ds)).unwrap();
        assert!(r.non_critical, "{r:?}");
    }

    #[test]
    fn too_few_sizes() {
        let points = vec![
            ScalingPoint { l: 8, k: 0.1, samples: vec![1.0] },
            ScalingPoint { l: 10, k: 0.1, samples: vec![1.0] },
        ];
        assert!(matches!(ScalingDataset::new("O_F", points), Err(Error::Data(_))));
    }

    fn analytic_grid(n: usize) -> Grid2 {
        let ks: Vec<f64> = (0..n).map(|i| 0.1 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let js: Vec<f64> = ks.iter().map(|k| k + 0.37 / (n - 1) as f64).collect();
        let values = js.iter().map(|&j| ks.iter().map(|&k| k / (k + j)).collect()).collect();
        Grid2 { ks, js, values }
    }

    #[test]
    fn contour_of_ratio_is_diagonal() {
        let g = analytic_grid(21);
        let lines = boundary_trace(&g, 0.5);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].len() > 10);
        for &(k, j) in &lines[0] {
            assert!((k - j).abs() < 0.01, "{k} {j}");
        }
        assert!((crossing_at(&g, 0.5, 1.0).unwrap() - 1.0).abs() < 0.1);
    }

    #[test]
    fn constant_field_has_no_contour() {
        let mut g = analytic_grid(5);
        for row in &mut g.values {
            row.iter_mut().for_each(|v| *v = 0.3);
        }
        assert!(boundary_trace(&g, 0.009).is_empty());
        assert!(crossing_at(&g, 0.009, 1.0).is_none());
    }

    #[test]
    fn grid_from_triples() {
        let t = [(0.0, 1.0, 2.0), (1.0, 1.0, 3.0), (0.0, 2.0, 4.0), (1.0, 2.0, 5.0), (1.0, 2.0, 7.0)];
        let g = Grid2::from_triples(&t).unwrap();
        assert_eq!(g.values, vec![vec![2.0, 3.0], vec![4.0, 6.0]]);
        assert!(Grid2::from_triples(&t[..3]).is_err());
    }
}
