//! Stroboscopic observables: spin-up densities, imbalance, subsystem entropy and
//! fidelity, edge-spin spectra and lifetimes.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::config::ChainConfig;
use crate::density::{entanglement_entropy, reduce_to_block, uhlmann_fidelity, ReducedDensityMatrix};
use crate::error::{Error, Result};
use crate::floquet::{EvolutionSchedule, FloquetOperator};
use crate::state::StateVector;

/// Kick window `[100T, 200T]` for the time-averaged imbalance.
pub const IMBALANCE_WINDOW: (usize, usize) = (100, 200);
/// Kick window `[400T, 600T]` for the saturation entropy.
pub const SATURATION_WINDOW: (usize, usize) = (400, 600);
/// Shortest series accepted by [`edge_spin_spectrum`].
pub const MIN_SPECTRUM_SAMPLES: usize = 256;
/// Zero-padding factor of the DFT.
pub const ZERO_PAD: usize = 4;
/// Minimum dip and recovery of the envelope for a minimum to count.
pub const ENVELOPE_PROMINENCE: f64 = 0.05;
/// Records per envelope window needed for a jitter-free envelope: sampling a
/// cosine `n` times per period misses its peak by at most `1 - cos(pi / n)`,
/// about 0.02 for 16 samples, safely below [`ENVELOPE_PROMINENCE`].
pub const MIN_ENVELOPE_SAMPLES: f64 = 16.0;

/// What to record besides `P_up` and `<sigma^z_1>`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Observables {
    /// Block `1..=A` for `S_A(t)` and `F_A(t)`.
    pub subsystem: Option<usize>,
    /// Record the entropy of sites `1..=floor(L/2)`.
    pub half_chain_entropy: bool,
}

impl Observables {
    pub fn densities_only() -> Self {
        Self::default()
    }

    pub fn with_subsystem(mut self, a: usize) -> Self {
        self.subsystem = Some(a);
        self
    }

    pub fn with_half_chain_entropy(mut self) -> Self {
        self.half_chain_entropy = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub config: ChainConfig,
    pub stride: usize,
    /// Kick count of every record (time is `kicks * T`).
    pub kicks: Vec<usize>,
    /// `p_up[record][j - 1]`.
    pub p_up: Vec<Vec<f64>>,
    pub imbalance: Vec<f64>,
    pub sz1: Vec<f64>,
    pub subsystem: Option<usize>,
    pub subsystem_entropy: Option<Vec<f64>>,
    pub subsystem_fidelity: Option<Vec<f64>>,
    pub half_chain_entropy: Option<Vec<f64>>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.kicks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kicks.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.kicks.iter().map(|&n| n as f64 * self.config.t).collect()
    }

    /// `P_up(j, .)` for one site (1-based).
    pub fn site_series(&self, j: usize) -> Result<Vec<f64>> {
        if j == 0 || j > self.config.l {
            return Err(Error::config(format!("site {j} outside 1..={}", self.config.l)));
        }
        Ok(self.p_up.iter().map(|row| row[j - 1]).collect())
    }

    fn window(&self, window: (usize, usize)) -> Result<std::ops::Range<usize>> {
        let (t1, t2) = window;
        let horizon = self.kicks.last().copied().unwrap_or(0);
        if t1 > t2 || t2 > horizon {
            return Err(Error::config(format!(
                "window [{t1}, {t2}] kicks is outside the simulated range [0, {horizon}]"
            )));
        }
        let start = self.kicks.partition_point(|&n| n < t1);
        let end = self.kicks.partition_point(|&n| n <= t2);
        if start == end {
            return Err(Error::config(format!("no records inside window [{t1}, {t2}]")));
        }
        Ok(start..end)
    }
}

/// `(1/L) sum_j (-1)^{j+1} P_up(j)`.
pub fn imbalance(p_up: &[f64]) -> f64 {
    let total: f64 = p_up
        .iter()
        .enumerate()
        .map(|(i, p)| if i % 2 == 0 { *p } else { -*p })
        .sum();
    total / p_up.len() as f64
}

/// Matrix-free evolution of `psi0` with the requested observables.
pub fn run_dynamics(config: &ChainConfig, psi0: &StateVector, schedule: &EvolutionSchedule, obs: Observables) -> Result<TimeSeries> {
    let u = FloquetOperator::matrix_free(config)?;
    run_dynamics_with(&u, psi0, schedule, obs)
}

pub fn run_dynamics_with(u: &FloquetOperator, psi0: &StateVector, schedule: &EvolutionSchedule, obs: Observables) -> Result<TimeSeries> {
    let config = *u.config();
    let l = config.l;
    if let Some(a) = obs.subsystem {
        if a == 0 || a >= l {
            return Err(Error::config(format!("subsystem size {a} outside 1..{l}")));
        }
    }
    let half = l / 2;
    let rho0: Option<ReducedDensityMatrix> = obs.subsystem.map(|a| reduce_to_block(psi0, a)).transpose()?;

    let n = schedule.n_records();
    let mut ts = TimeSeries {
        config,
        stride: schedule.stride,
        kicks: Vec::with_capacity(n),
        p_up: Vec::with_capacity(n),
        imbalance: Vec::with_capacity(n),
        sz1: Vec::with_capacity(n),
        subsystem: obs.subsystem,
        subsystem_entropy: obs.subsystem.map(|_| Vec::with_capacity(n)),
        subsystem_fidelity: obs.subsystem.map(|_| Vec::with_capacity(n)),
        half_chain_entropy: obs.half_chain_entropy.then(|| Vec::with_capacity(n)),
    };
    u.evolve_with(psi0, schedule, |kicks, psi| {
        let p = psi.up_density();
        ts.kicks.push(kicks);
        ts.imbalance.push(imbalance(&p));
        ts.sz1.push(2.0 * p[0] - 1.0);
        ts.p_up.push(p);
        if let (Some(a), Some(rho0)) = (obs.subsystem, rho0.as_ref()) {
            let rho = reduce_to_block(psi, a)?;
            ts.subsystem_entropy.as_mut().unwrap().push(entanglement_entropy(&rho)?);
            ts.subsystem_fidelity.as_mut().unwrap().push(uhlmann_fidelity(&rho, rho0)?);
        }
        if let Some(s) = ts.half_chain_entropy.as_mut() {
            let value = if obs.subsystem == Some(half) {
                *ts.subsystem_entropy.as_ref().unwrap().last().unwrap()
            } else {
                entanglement_entropy(&reduce_to_block(psi, half)?)?
            };
            s.push(value);
        }
        Ok(())
    })?;
    Ok(ts)
}

/// Mean imbalance over the records with kick count in `[t1, t2]`.
pub fn time_averaged_imbalance(ts: &TimeSeries, window: (usize, usize)) -> Result<f64> {
    let r = ts.window(window)?;
    Ok(mean(&ts.imbalance[r]))
}

/// Mean half-chain entropy over the records with kick count in `[t1, t2]`.
pub fn saturation_entropy(ts: &TimeSeries, window: (usize, usize)) -> Result<f64> {
    let series = ts
        .half_chain_entropy
        .as_ref()
        .ok_or_else(|| Error::config("half-chain entropy was not recorded"))?;
    let r = ts.window(window)?;
    Ok(mean(&series[r]))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEstimate {
    /// Cycles per kick period.
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Parabolically interpolated location of the largest positive-frequency bin.
    pub peak_frequency: f64,
    /// Spacing of the zero-padded frequency grid.
    pub bin_width: f64,
}

/// DFT magnitude of `P_up(j, .)`.
pub fn edge_spin_spectrum(ts: &TimeSeries, j: usize) -> Result<SpectrumEstimate> {
    spectrum(&ts.site_series(j)?, ts.stride as f64)
}

/// Mean-removed, rectangular-window DFT with `ZERO_PAD`-fold padding.
/// `spacing` is the sample interval in kicks.
pub fn spectrum(samples: &[f64], spacing: f64) -> Result<SpectrumEstimate> {
    if samples.len() < MIN_SPECTRUM_SAMPLES {
        return Err(Error::config(format!(
            "spectrum needs at least {MIN_SPECTRUM_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let avg = mean(samples);
    let n_pad = samples.len() * ZERO_PAD;
    let mut buf: Vec<C64> = samples.iter().map(|x| C64::new(x - avg, 0.0)).collect();
    buf.resize(n_pad, C64::new(0.0, 0.0));
    FftPlanner::<f64>::new().plan_fft_forward(n_pad).process(&mut buf);

    let bin_width = 1.0 / (n_pad as f64 * spacing);
    let half = n_pad / 2;
    let magnitudes: Vec<f64> = buf[..=half].iter().map(|c| c.norm()).collect();
    let frequencies: Vec<f64> = (0..=half).map(|k| k as f64 * bin_width).collect();

    let k = (1..=half)
        .max_by(|&a, &b| magnitudes[a].total_cmp(&magnitudes[b]))
        .unwrap_or(1);
    let mut shift = 0.0;
    if k < half {
        let (a, b, c) = (magnitudes[k - 1], magnitudes[k], magnitudes[k + 1]);
        let denom = a - 2.0 * b + c;
        if denom != 0.0 {
            shift = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
        }
    }
    Ok(SpectrumEstimate { frequencies, magnitudes, peak_frequency: (k as f64 + shift) * bin_width, bin_width })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LifetimeEstimate {
    /// In units of `T`; equals the horizon when `open_ended`.
    pub tau: f64,
    pub envelope: Vec<f64>,
    /// Record index of the first envelope minimum.
    pub minimum_index: Option<usize>,
    /// No qualifying minimum within the simulated window: `tau >= horizon`.
    pub open_ended: bool,
}

/// Lifetime from the upper envelope of `<sigma^z_1>`.
pub fn lifetime(ts: &TimeSeries) -> Result<LifetimeEstimate> {
    let rabi_kicks = (PI / (ts.config.omega * ts.config.t)).round();
    envelope_lifetime(&ts.sz1, &ts.kicks, rabi_kicks)
}

/// The envelope joins samples that are maxima of a centred window of
/// `window_kicks`; `tau` is the kick count of the bottom of its first valley: a
/// point at least `ENVELOPE_PROMINENCE` below the preceding envelope maximum,
/// with nothing lower before the envelope recovers by the same amount.
pub fn envelope_lifetime(values: &[f64], kicks: &[usize], window_kicks: f64) -> Result<LifetimeEstimate> {
    if values.len() != kicks.len() || values.len() < 3 {
        return Err(Error::config("lifetime needs at least three aligned samples"));
    }
    if !(window_kicks >= 1.0) {
        return Err(Error::config("envelope window must span at least one kick"));
    }
    let n = values.len();
    let spacing = (kicks[1] - kicks[0]).max(1) as f64;
    if window_kicks / spacing < MIN_ENVELOPE_SAMPLES {
        return Err(Error::config(format!(
            "record stride {spacing} too coarse for a {window_kicks}-kick envelope window"
        )));
    }
    let half = ((window_kicks / spacing) / 2.0).round().max(1.0) as usize;
    let peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            values[lo..=hi].iter().all(|&v| v <= values[i])
        })
        .collect();
    let envelope = interpolate(&peaks, values, n);

    let horizon = *kicks.last().unwrap() as f64;
    let mut best_before = f64::NEG_INFINITY;
    let mut found = None;
    for w in 0..peaks.len() {
        let i = peaks[w];
        let v = values[i];
        if w > 0 && best_before - v >= ENVELOPE_PROMINENCE {
            // Valley bottom: nothing lower before the envelope climbs back up.
            let later = &peaks[w + 1..];
            if let Some(r) = later.iter().position(|&k| values[k] >= v + ENVELOPE_PROMINENCE) {
                if later[..r].iter().all(|&k| values[k] >= v) {
                    found = Some(i);
                    break;
                }
            }
        }
        best_before = best_before.max(v);
    }
    Ok(match found {
        Some(i) => LifetimeEstimate { tau: kicks[i] as f64, envelope, minimum_index: Some(i), open_ended: false },
        None => LifetimeEstimate { tau: horizon, envelope, minimum_index: None, open_ended: true },
    })
}

fn interpolate(peaks: &[usize], values: &[f64], n: usize) -> Vec<f64> {
    match peaks {
        [] => vec![f64::NAN; n],
        [only] => vec![values[*only]; n],
        _ => (0..n)
            .map(|i| {
                let k = peaks.partition_point(|&p| p <= i);
                if k == 0 {
                    values[peaks[0]]
                } else if k == peaks.len() {
                    values[peaks[k - 1]]
                } else {
                    let (a, b) = (peaks[k - 1], peaks[k]);
                    let s = (i - a) as f64 / (b - a) as f64;
                    values[a] + s * (values[b] - values[a])
                }
            })
            .collect(),
    }
}
