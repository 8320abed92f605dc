//! Two-ball surrogate: a separation multiplied by random dispersion ratios
//! until it passes the divergence threshold.
//!
//! Two pieces connect the surrogate to full simulations:
//! * [`divergence_distribution`] gives the exact first-passage law on a
//!   fine log grid, which reaches probabilities far too small to sample.
//! * [`NbBridge`] carries the ball-count dependence, which the surrogate
//!   lacks. It fits `N_c(paired) - N_c(surrogate) = a + c·log2 N_b` on
//!   calibration cells and applies that offset at any `(k, N_b)`.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{DispersionHistogram, TriangleFit, BINS_PER_BIT, CENTER_BIN, N_BINS};
use crate::error::{Error, Result};
use crate::seeds::derive_seed;

pub const DEFAULT_MAX_STEPS: u32 = 1000;
/// Calibration cells below this mean sit on the `N_c ≥ 1` floor, where the
/// linear offset model does not apply.
pub const DEFAULT_MIN_CALIBRATION_NC: f64 = 2.0;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Empirical { cdf: Vec<f64>, probs: Vec<f64> },
    Triangular(TriangleFit),
}

/// Draws `log2(out/in)` dispersion ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSampler {
    source: Source,
    jitter: bool,
}

impl RatioSampler {
    /// Inverse-CDF sampler over histogram bins, with uniform jitter inside
    /// each bin.
    pub fn empirical(hist: &DispersionHistogram) -> Result<Self> {
        if hist.is_empty() {
            return Err(Error::DegenerateSampler("empty histogram".into()));
        }
        let probs = hist.normalized();
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self {
            source: Source::Empirical { cdf, probs },
            jitter: true,
        })
    }

    /// Sampler for the continuous two-slope density of a triangle fit.
    pub fn triangular(fit: &TriangleFit) -> Result<Self> {
        if !(fit.s_u > 0.0 && fit.s_d < 0.0 && fit.s_u.is_finite() && fit.s_d.is_finite()) {
            return Err(Error::DegenerateSampler(format!(
                "slopes {} and {} do not define a density",
                fit.s_u, fit.s_d
            )));
        }
        Ok(Self {
            source: Source::Triangular(*fit),
            jitter: false,
        })
    }

    /// Empirical draws land on bin centres.
    pub fn without_jitter(mut self) -> Self {
        self.jitter = false;
        self
    }

    /// Natural-log decay rates of the two legs, per bin, and the left-leg probability.
    fn legs(fit: &TriangleFit) -> (f64, f64, f64) {
        let up = fit.s_u_per_bin() * std::f64::consts::LN_2;
        let down = -fit.s_d_per_bin() * std::f64::consts::LN_2;
        let p_left = (1.0 / up) / (1.0 / up + 1.0 / down);
        (up, down, p_left)
    }

    fn a_to_log2_ratio(a: f64) -> f64 {
        (CENTER_BIN as f64 - a) / BINS_PER_BIT
    }

    pub fn sample_log2_ratio<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let a = match &self.source {
            Source::Empirical { cdf, .. } => {
                let u: f64 = rng.random();
                let bin = cdf.partition_point(|&c| c <= u).min(N_BINS - 1);
                let jitter = if self.jitter { rng.random::<f64>() - 0.5 } else { 0.0 };
                bin as f64 + jitter
            }
            Source::Triangular(fit) => {
                let (up, down, p_left) = Self::legs(fit);
                let e = -(1.0 - rng.random::<f64>()).ln();
                if rng.random_bool(p_left) {
                    fit.peak as f64 - e / up
                } else {
                    fit.peak as f64 + e / down
                }
            }
        };
        Self::a_to_log2_ratio(a)
    }

    pub fn sample_ratio<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_log2_ratio(rng).exp2()
    }

    /// Exact mean of `log2(out/in)` under the sampler.
    pub fn mean_log2_ratio(&self) -> f64 {
        let mean_a = match &self.source {
            Source::Empirical { probs, .. } => probs.iter().enumerate().map(|(b, p)| b as f64 * p).sum(),
            Source::Triangular(fit) => {
                let (up, down, p_left) = Self::legs(fit);
                fit.peak as f64 - p_left / up + (1.0 - p_left) / down
            }
        };
        Self::a_to_log2_ratio(mean_a)
    }

    /// `P(log2 ratio ≥ x)`.
    pub fn tail_probability(&self, x: f64) -> f64 {
        // log2 ratio ≥ x  ⇔  A ≤ 128 - 4x
        let a_max = CENTER_BIN as f64 - BINS_PER_BIT * x;
        match &self.source {
            Source::Empirical { probs, .. } => probs
                .iter()
                .enumerate()
                .map(|(b, p)| {
                    let (lo, hi) = if self.jitter { (b as f64 - 0.5, b as f64 + 0.5) } else { (b as f64, b as f64) };
                    if hi <= a_max {
                        *p
                    } else if lo > a_max || hi == lo {
                        0.0
                    } else {
                        p * (a_max - lo) / (hi - lo)
                    }
                })
                .sum(),
            Source::Triangular(fit) => self.triangular_cdf_a(fit, a_max),
        }
    }

    /// `P(A ≤ a)` for the triangular density.
    fn triangular_cdf_a(&self, fit: &TriangleFit, a: f64) -> f64 {
        let (up, down, p_left) = Self::legs(fit);
        let d = a - fit.peak as f64;
        if d <= 0.0 {
            p_left * (up * d).exp()
        } else {
            p_left + (1.0 - p_left) * (1.0 - (-down * d).exp())
        }
    }

    /// Probabilities of the step `log2 ratio` rounded to multiples of `h`,
    /// as `(lowest index, masses)`. Mass beyond ±`span` bits is folded onto
    /// the ends.
    fn step_kernel(&self, h: f64, span: f64) -> (i64, Vec<f64>) {
        let j_max = (span / h).ceil() as i64;
        let cell = |j: i64| ((j as f64 - 0.5) * h, (j as f64 + 0.5) * h);
        // P(log2 ratio < x)
        let cdf = |x: f64| -> f64 { 1.0 - self.tail_probability(x) };
        let mut w: Vec<f64> = (-j_max..=j_max)
            .map(|j| {
                let (lo, hi) = cell(j);
                match &self.source {
                    Source::Empirical { probs, .. } if !self.jitter => probs
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| {
                            let x = Self::a_to_log2_ratio(*b as f64);
                            x >= lo && x < hi
                        })
                        .map(|(_, p)| p)
                        .sum(),
                    _ => (cdf(hi) - cdf(lo)).max(0.0),
                }
            })
            .collect();
        let (lo, _) = cell(-j_max);
        let (_, hi) = cell(j_max);
        w[0] += cdf(lo).max(0.0);
        *w.last_mut().expect("non-empty") += self.tail_probability(hi).max(0.0);
        // trim zero ends
        let first = w.iter().position(|&p| p > 0.0).unwrap_or(0);
        let last = w.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        (first as i64 - j_max, w[first..=last].to_vec())
    }
}

/// Critical-step statistics of the surrogate at one perturbation exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateStats {
    pub epsilon_exp: u32,
    pub trials: u64,
    /// Trials that hit the step budget without diverging.
    pub budget_exceeded: u64,
    pub mean: f64,
    pub variance: f64,
    /// `counts[n - 1]` is the number of trials with `N_c = n`.
    pub counts: Vec<u64>,
}

impl SurrogateStats {
    pub fn diverged(&self) -> u64 {
        self.trials - self.budget_exceeded
    }

    pub fn sem(&self) -> f64 {
        (self.variance / self.diverged().max(1) as f64).sqrt()
    }

    /// Empirical `P(N_c = n)` for `n = 1..`.
    pub fn probabilities(&self) -> Vec<f64> {
        let t = self.trials.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }
}

/// Steps for one trial; `None` when the budget runs out.
fn surrogate_trial<R: Rng + ?Sized>(
    sampler: &RatioSampler,
    start: f64,
    target: f64,
    max_steps: u32,
    rng: &mut R,
) -> Option<u32> {
    let mut x = start;
    for step in 1..=max_steps {
        x += sampler.sample_log2_ratio(rng);
        if x >= target {
            return Some(step);
        }
    }
    None
}

/// Monte Carlo critical step: start from `Δ = 2^-k`, multiply by sampled
/// ratios until `Δ ≥ threshold`. The comparison runs on `log2 Δ`.
pub fn surrogate_nc(
    sampler: &RatioSampler,
    k: u32,
    threshold: f64,
    trials: u64,
    seed: u64,
    max_steps: u32,
) -> Result<SurrogateStats> {
    if k < 1 || trials < 1 || !(threshold > 0.0) {
        return Err(Error::Config(format!(
            "surrogate needs k ≥ 1, trials ≥ 1, threshold > 0 (got {k}, {trials}, {threshold})"
        )));
    }
    let target = threshold.log2();
    let steps: Vec<Option<u32>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed("surrogate", seed, &[k as u64, t]));
            surrogate_trial(sampler, -(k as f64), target, max_steps, &mut rng)
        })
        .collect();
    let mut counts = Vec::new();
    let (mut sum, mut sum_sq, mut exceeded) = (0u64, 0u64, 0u64);
    for s in steps {
        match s {
            Some(n) => {
                let n = n as u64;
                if counts.len() < n as usize {
                    counts.resize(n as usize, 0);
                }
                counts[n as usize - 1] += 1;
                sum += n;
                sum_sq += n * n;
            }
            None => exceeded += 1,
        }
    }
    let done = trials - exceeded;
    let (mean, variance) = if done == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let m = sum as f64 / done as f64;
        let v = if done > 1 {
            (sum_sq as f64 - done as f64 * m * m) / (done - 1) as f64
        } else {
            0.0
        };
        (m, v.max(0.0))
    };
    Ok(SurrogateStats {
        epsilon_exp: k,
        trials,
        budget_exceeded: exceeded,
        mean,
        variance,
        counts,
    })
}

/// Grid resolution of [`divergence_distribution`], in bits.
pub const DP_RESOLUTION: f64 = 1.0 / 16.0;

/// Exact first-passage probabilities `P(N_c = n)`, `n = 1..=max_steps`, of
/// the surrogate walk on a grid of [`DP_RESOLUTION`] bits.
///
/// Separations more than 64 bits below the start are held at that floor.
pub fn divergence_distribution(
    sampler: &RatioSampler,
    k: u32,
    threshold: f64,
    max_steps: u32,
) -> Result<Vec<f64>> {
    if k < 1 || !(threshold > 0.0) {
        return Err(Error::Config(format!("need k ≥ 1 and threshold > 0, got {k}, {threshold}")));
    }
    let h = DP_RESOLUTION;
    let (j0, kernel) = sampler.step_kernel(h, 64.0);
    // distance below the threshold, in grid cells
    let start = ((k as f64 + threshold.log2()) / h).round() as i64;
    if start <= 0 {
        return Ok(vec![1.0]);
    }
    let y_max = start + (64.0 / h) as i64;
    let mut p = vec![0.0; y_max as usize + 1];
    p[start as usize] = 1.0;
    let mut out = Vec::with_capacity(max_steps as usize);
    for _ in 0..max_steps {
        let mut next = vec![0.0; p.len()];
        let mut crossed = 0.0;
        for (y, &mass) in p.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (i, &w) in kernel.iter().enumerate() {
                let y2 = y as i64 - (j0 + i as i64);
                if y2 <= 0 {
                    crossed += mass * w;
                } else {
                    next[y2.min(y_max) as usize] += mass * w;
                }
            }
        }
        out.push(crossed);
        p = next;
        if p.iter().sum::<f64>() < 1e-300 {
            break;
        }
    }
    Ok(out)
}

/// One paired-simulation cell used to calibrate the ball-count offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCell {
    pub k: u32,
    pub n_balls: usize,
    pub nc_mean: f64,
    pub nc_sem: f64,
}

/// Fitted offset `N_c(paired) - N_c(surrogate) = a + c·log2 N_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbBridge {
    pub a: f64,
    pub c: f64,
    /// Covariance of `(a, c)`.
    pub covariance: [[f64; 2]; 2],
    pub log2_nb_min: f64,
    pub log2_nb_max: f64,
    pub cells_used: usize,
    pub min_nc: f64,
    surrogate: BTreeMap<u32, (f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BridgeCell {
    pub k: u32,
    pub log2_nb: f64,
    pub nc_mean: f64,
    pub nc_ci_low: f64,
    pub nc_ci_high: f64,
    pub crossed_axis: bool,
    pub extrapolated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BridgeCrossing {
    pub k: u32,
    pub log2_nb: f64,
    pub std_err: f64,
    pub extrapolated: bool,
}

impl NbBridge {
    /// Calibrate on cells whose paired mean is at least `min_nc`.
    pub fn calibrate(surrogate: &[SurrogateStats], cells: &[CalibrationCell], min_nc: f64) -> Result<Self> {
        let table: BTreeMap<u32, (f64, f64)> = surrogate
            .iter()
            .filter(|s| s.mean.is_finite())
            .map(|s| (s.epsilon_exp, (s.mean, s.sem())))
            .collect();
        let mut rows = Vec::new();
        for cell in cells.iter().filter(|c| c.nc_mean >= min_nc) {
            let &(s, s_sem) = table.get(&cell.k).ok_or_else(|| {
                Error::Config(format!("no surrogate statistics for calibration k = {}", cell.k))
            })?;
            let var = cell.nc_sem * cell.nc_sem + s_sem * s_sem;
            let w = if var > 0.0 { 1.0 / var } else { 1.0 };
            rows.push(((cell.n_balls as f64).log2(), cell.nc_mean - s, w));
        }
        let mut xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        if rows.len() < 3 || xs.len() < 2 {
            return Err(Error::RankDeficient(format!(
                "{} usable calibration cells over {} ball counts",
                rows.len(),
                xs.len()
            )));
        }
        let (sw, swx, swxx, swy, swxy) = rows.iter().fold((0.0, 0.0, 0.0, 0.0, 0.0), |acc, &(x, y, w)| {
            (acc.0 + w, acc.1 + w * x, acc.2 + w * x * x, acc.3 + w * y, acc.4 + w * x * y)
        });
        let det = sw * swxx - swx * swx;
        let c = (sw * swxy - swx * swy) / det;
        let a = (swy - c * swx) / sw;
        let wss: f64 = rows.iter().map(|&(x, y, w)| w * (y - a - c * x).powi(2)).sum();
        let scale = if rows.len() > 2 { wss / (rows.len() - 2) as f64 } else { 0.0 };
        let covariance = [
            [scale * swxx / det, -scale * swx / det],
            [-scale * swx / det, scale * sw / det],
        ];
        Ok(Self {
            a,
            c,
            covariance,
            log2_nb_min: xs[0],
            log2_nb_max: xs[xs.len() - 1],
            cells_used: rows.len(),
            min_nc,
            surrogate: table,
        })
    }

    fn surrogate_at(&self, k: u32) -> Result<(f64, f64)> {
        self.surrogate
            .get(&k)
            .copied()
            .ok_or_else(|| Error::Config(format!("no surrogate statistics for k = {k}")))
    }

    fn offset_var(&self, x: f64) -> f64 {
        let v = &self.covariance;
        v[0][0] + 2.0 * x * v[0][1] + x * x * v[1][1]
    }

    pub fn predict(&self, k: u32, log2_nb: f64) -> Result<BridgeCell> {
        let (s, s_sem) = self.surrogate_at(k)?;
        let nc = s + self.a + self.c * log2_nb;
        let half = Z95 * (s_sem * s_sem + self.offset_var(log2_nb)).max(0.0).sqrt();
        Ok(BridgeCell {
            k,
            log2_nb,
            nc_mean: nc,
            nc_ci_low: nc - half,
            nc_ci_high: nc + half,
            crossed_axis: nc < 1.0,
            extrapolated: !(self.log2_nb_min..=self.log2_nb_max).contains(&log2_nb),
        })
    }

    /// `log2 N_b` where the bridged `N_c` reaches 1.
    pub fn axis_crossing(&self, k: u32) -> Result<BridgeCrossing> {
        if self.c >= 0.0 {
            return Err(Error::NoCrossing(format!("ball-count slope {} is not negative", self.c)));
        }
        let (s, s_sem) = self.surrogate_at(k)?;
        let x = (1.0 - self.a - s) / self.c;
        // x depends on (s, a, c) through -(1 - a - s)/c²·dc - (da + ds)/c
        let g_a = -1.0 / self.c;
        let g_c = -x / self.c;
        let v = &self.covariance;
        let var = g_a * g_a * (v[0][0] + s_sem * s_sem) + 2.0 * g_a * g_c * v[0][1] + g_c * g_c * v[1][1];
        Ok(BridgeCrossing {
            k,
            log2_nb: x,
            std_err: var.max(0.0).sqrt(),
            extrapolated: !(self.log2_nb_min..=self.log2_nb_max).contains(&x),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeSurface {
    pub bridge: NbBridge,
    pub cells: Vec<BridgeCell>,
    pub warnings: Vec<String>,
}

impl BridgeSurface {
    pub fn write_csv<W: Write>(&self, mut w: W, metadata: &[(String, String)]) -> Result<()> {
        for (k, v) in metadata {
            writeln!(w, "# {k} = {v}")?;
        }
        let b = &self.bridge;
        writeln!(w, "# model = N_c(surrogate, k) + a + c*log2_nb")?;
        writeln!(w, "# bridge_a = {}", b.a)?;
        writeln!(w, "# bridge_c = {}", b.c)?;
        writeln!(w, "# calibrated_log2_nb = [{}, {}]", b.log2_nb_min, b.log2_nb_max)?;
        writeln!(w, "# calibration_cells = {}", b.cells_used)?;
        writeln!(w, "# calibration_min_nc = {}", b.min_nc)?;
        for warning in &self.warnings {
            writeln!(w, "# warning = {warning}")?;
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["k", "log2_nb", "nc_mean", "nc_ci_low", "nc_ci_high", "crossed_axis"])?;
        for c in &self.cells {
            out.write_record([
                c.k.to_string(),
                c.log2_nb.to_string(),
                c.nc_mean.to_string(),
                c.nc_ci_low.to_string(),
                c.nc_ci_high.to_string(),
                c.crossed_axis.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Surface of bridged `N_c` estimates over `ks × log2_nbs`.
pub fn nb_scaling_bridge(
    surrogate: &[SurrogateStats],
    calibration: &[CalibrationCell],
    ks: &[u32],
    log2_nbs: &[f64],
) -> Result<BridgeSurface> {
    let bridge = NbBridge::calibrate(surrogate, calibration, DEFAULT_MIN_CALIBRATION_NC)?;
    let mut cells = Vec::with_capacity(ks.len() * log2_nbs.len());
    for &k in ks {
        for &x in log2_nbs {
            cells.push(bridge.predict(k, x)?);
        }
    }
    let mut warnings = Vec::new();
    let outside = cells.iter().filter(|c| c.extrapolated).count();
    if outside > 0 {
        warnings.push(format!(
            "{outside} cells lie outside the calibrated range log2(N_b) in [{}, {}]",
            bridge.log2_nb_min, bridge.log2_nb_max
        ));
    }
    Ok(BridgeSurface {
        bridge,
        cells,
        warnings,
    })
}
