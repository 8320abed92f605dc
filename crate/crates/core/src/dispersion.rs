//! Velocity-dispersion histograms built from twin shocks.
//!
//! Each matched shock contributes `A_n = 128 + 4·log2(|ΔV_in| / |ΔV_out|)`,
//! rounded to one of 256 bins. Bin 128 is a shock that neither amplifies nor
//! damps the velocity difference; lower bins are dispersive.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TableConfig;
use crate::paired::{make_paired, MatchedShock, PerturbationSpec};
use crate::seeds::derive_seed;

pub const N_BINS: usize = 256;
pub const CENTER_BIN: usize = 128;
/// Bins per bit of the in/out ratio.
pub const BINS_PER_BIT: f64 = 4.0;
/// Bins per decade of the in/out ratio.
pub const BINS_PER_DECADE: f64 = BINS_PER_BIT * std::f64::consts::LOG2_10;
/// Fewer samples than this cannot support a triangle fit.
pub const MIN_FIT_SAMPLES: u64 = 10_000;
/// Bins with fewer counts than this end a triangle leg.
pub const MIN_FIT_COUNT: u64 = 10;
pub const INVARIANCE_THRESHOLD: f64 = 0.05;

/// `A_n` for one shock.
pub fn a_n(v_in_diff: f64, v_out_diff: f64) -> f64 {
    CENTER_BIN as f64 + BINS_PER_BIT * (v_in_diff / v_out_diff).log2()
}

/// Out/in ratio at a (fractional) bin position.
pub fn ratio_at(a_n: f64) -> f64 {
    ((CENTER_BIN as f64 - a_n) / BINS_PER_BIT).exp2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockDispersionSample {
    pub v_in_diff: f64,
    pub v_out_diff: f64,
    pub a_n: f64,
}

impl ShockDispersionSample {
    /// `None` when either difference is zero or the coordinate is not finite.
    pub fn new(v_in_diff: f64, v_out_diff: f64) -> Option<Self> {
        if !(v_in_diff > 0.0 && v_out_diff > 0.0) {
            return None;
        }
        let a = a_n(v_in_diff, v_out_diff);
        a.is_finite().then_some(Self {
            v_in_diff,
            v_out_diff,
            a_n: a,
        })
    }

    pub fn from_shock(m: &MatchedShock) -> Option<Self> {
        Self::new(m.v_in_diff(), m.v_out_diff())
    }

    pub fn ratio(&self) -> f64 {
        self.v_out_diff / self.v_in_diff
    }

    pub fn bin(&self) -> usize {
        self.a_n.clamp(0.0, (N_BINS - 1) as f64).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionHistogram {
    bins: Vec<u64>,
    total: u64,
    degenerate: u64,
    clamped_low: u64,
    clamped_high: u64,
    pub radius: f64,
    pub void_ratio: f64,
    pub n_balls: usize,
}

impl DispersionHistogram {
    pub fn new(radius: f64, void_ratio: f64, n_balls: usize) -> Self {
        Self {
            bins: vec![0; N_BINS],
            total: 0,
            degenerate: 0,
            clamped_low: 0,
            clamped_high: 0,
            radius,
            void_ratio,
            n_balls,
        }
    }

    pub fn for_table(config: &TableConfig) -> Self {
        Self::new(config.radius, config.void_ratio(), config.n_balls)
    }

    /// Histogram from raw bin counts.
    pub fn from_counts(counts: &[u64], radius: f64, void_ratio: f64, n_balls: usize) -> Result<Self> {
        if counts.len() != N_BINS {
            return Err(Error::Config(format!("{} bins, expected {N_BINS}", counts.len())));
        }
        let mut h = Self::new(radius, void_ratio, n_balls);
        h.bins.copy_from_slice(counts);
        h.total = counts.iter().sum();
        Ok(h)
    }

    pub fn record_shock(&mut self, sample: &ShockDispersionSample) {
        let a = sample.a_n;
        if a < -0.5 {
            self.clamped_low += 1;
        } else if a >= N_BINS as f64 - 0.5 {
            self.clamped_high += 1;
        }
        self.bins[sample.bin()] += 1;
        self.total += 1;
    }

    /// Record a raw in/out pair; zero differences go to the degenerate tally.
    pub fn record_pair(&mut self, v_in_diff: f64, v_out_diff: f64) {
        match ShockDispersionSample::new(v_in_diff, v_out_diff) {
            Some(s) => self.record_shock(&s),
            None => self.degenerate += 1,
        }
    }

    /// Add another histogram's counts. Table parameters are kept from `self`.
    pub fn merge(&mut self, other: &Self) {
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.total += other.total;
        self.degenerate += other.degenerate;
        self.clamped_low += other.clamped_low;
        self.clamped_high += other.clamped_high;
    }

    pub fn bins(&self) -> &[u64] {
        &self.bins
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn degenerate(&self) -> u64 {
        self.degenerate
    }

    pub fn clamped(&self) -> (u64, u64) {
        (self.clamped_low, self.clamped_high)
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Most populated bin; the lowest index wins ties. `None` when empty.
    pub fn mode(&self) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        let max = *self.bins.iter().max()?;
        self.bins.iter().position(|&c| c == max)
    }

    /// Mass strictly below and strictly above bin 128.
    pub fn split_mass(&self) -> (u64, u64) {
        (
            self.bins[..CENTER_BIN].iter().sum(),
            self.bins[CENTER_BIN + 1..].iter().sum(),
        )
    }

    pub fn normalized(&self) -> Vec<f64> {
        let t = self.total.max(1) as f64;
        self.bins.iter().map(|&c| c as f64 / t).collect()
    }

    pub fn mean_a_n(&self) -> Option<f64> {
        if self.is_empty() {
            return None;
        }
        let s: f64 = self.bins.iter().enumerate().map(|(b, &c)| b as f64 * c as f64).sum();
        Some(s / self.total as f64)
    }

    /// Mean of `log2(out/in)` over the binned samples.
    pub fn mean_log2_ratio(&self) -> Option<f64> {
        self.mean_a_n().map(|a| (CENTER_BIN as f64 - a) / BINS_PER_BIT)
    }

    /// Average out/in ratio on the logarithmic axis of the histogram, i.e.
    /// the ratio at the mean bin position.
    pub fn mean_ratio(&self) -> Option<f64> {
        self.mean_a_n().map(ratio_at)
    }

    pub fn write_csv<W: Write>(&self, mut w: W, metadata: &[(String, String)]) -> Result<()> {
        for (k, v) in metadata {
            writeln!(w, "# {k} = {v}")?;
        }
        let (lo, hi) = self.clamped();
        for (k, v) in [
            ("radius", self.radius.to_string()),
            ("void_ratio", self.void_ratio.to_string()),
            ("n_balls", self.n_balls.to_string()),
            ("total", self.total.to_string()),
            ("degenerate", self.degenerate.to_string()),
            ("clamped_low", lo.to_string()),
            ("clamped_high", hi.to_string()),
        ] {
            writeln!(w, "# {k} = {v}")?;
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["bin", "A_n_center", "count", "normalized"])?;
        let norm = self.normalized();
        for (b, (&c, p)) in self.bins.iter().zip(norm).enumerate() {
            out.write_record([b.to_string(), (b as f64).to_string(), c.to_string(), p.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Read a histogram written by [`DispersionHistogram::write_csv`].
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut text = String::new();
        let mut meta = std::collections::HashMap::new();
        for line in reader.lines() {
            let line = line?;
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                }
            } else {
                text.push_str(&line);
                text.push('\n');
            }
        }
        let get = |k: &str| -> Result<f64> {
            meta.get(k)
                .ok_or_else(|| Error::Config(format!("histogram file lacks '{k}'")))?
                .parse()
                .map_err(|_| Error::Config(format!("bad '{k}' in histogram file")))
        };
        let mut counts = vec![0u64; N_BINS];
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        for row in rd.records() {
            let row = row?;
            let bin: usize = row[0].parse().map_err(|_| Error::Config("bad bin".into()))?;
            let count: u64 = row[2].parse().map_err(|_| Error::Config("bad count".into()))?;
            *counts
                .get_mut(bin)
                .ok_or_else(|| Error::Config(format!("bin {bin} out of range")))? = count;
        }
        let mut h = Self::from_counts(&counts, get("radius")?, get("void_ratio")?, get("n_balls")? as usize)?;
        h.degenerate = get("degenerate").unwrap_or(0.0) as u64;
        h.clamped_low = get("clamped_low").unwrap_or(0.0) as u64;
        h.clamped_high = get("clamped_high").unwrap_or(0.0) as u64;
        Ok(h)
    }
}

/// Gather at least `n_shocks_target` twin-shock samples from successive
/// seeded trials, each run until divergence.
///
/// Trials run in parallel batches and are consumed in index order; the last
/// trial contributes only what is needed, so the histogram depends on the
/// seed alone.
pub fn collect_dispersion(
    config: TableConfig,
    epsilon_exp: u32,
    n_shocks_target: u64,
    seed: u64,
    max_shocks_per_ball: f64,
) -> Result<DispersionHistogram> {
    config.validate()?;
    PerturbationSpec::new(epsilon_exp, 0)?;
    let mut hist = DispersionHistogram::for_table(&config);
    let batch = rayon::current_num_threads().max(1) as u64;
    let mut next = 0u64;
    let mut consecutive_aborts = 0;
    while hist.total < n_shocks_target {
        let shards: Vec<(Vec<Option<ShockDispersionSample>>, Option<String>)> = (next..next + batch)
            .into_par_iter()
            .map(|t| {
                let trial_seed = derive_seed("dispersion", seed, &[t]);
                let sign_seed = derive_seed("dispersion-signs", seed, &[t]);
                let mut samples = Vec::new();
                let pert = PerturbationSpec::new(epsilon_exp, sign_seed).expect("validated above");
                match make_paired(config, pert, trial_seed) {
                    Ok(mut pair) => {
                        let rec = pair.run_observed(max_shocks_per_ball, &mut |m| {
                            samples.push(ShockDispersionSample::from_shock(m));
                        });
                        (samples, rec.abort_reason)
                    }
                    Err(e) => (samples, Some(e.to_string())),
                }
            })
            .collect();
        next += batch;
        for (samples, abort) in shards {
            if abort.is_some() && samples.is_empty() {
                consecutive_aborts += 1;
                if consecutive_aborts >= 16 {
                    return Err(Error::Config(format!(
                        "dispersion trials keep aborting: {}",
                        abort.unwrap_or_default()
                    )));
                }
            } else {
                consecutive_aborts = 0;
            }
            for s in samples {
                if hist.total >= n_shocks_target {
                    break;
                }
                match s {
                    Some(s) => hist.record_shock(&s),
                    None => hist.degenerate += 1,
                }
            }
        }
    }
    Ok(hist)
}

/// Two-segment fit of `log2(count + 1)` against bin index, meeting at the mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleFit {
    /// Mode bin.
    pub peak: usize,
    /// Fitted `log2(count + 1)` at the peak, from the ascending leg.
    pub peak_height: f64,
    /// Ascending slope, log2 counts per decade of ratio (low bins side).
    pub s_u: f64,
    /// Descending slope, log2 counts per decade of ratio (high bins side).
    pub s_d: f64,
    /// RMS residual of both legs, in log2 counts.
    pub residual: f64,
    pub bins_up: usize,
    pub bins_down: usize,
}

impl TriangleFit {
    /// Ascending slope per bin.
    pub fn s_u_per_bin(&self) -> f64 {
        self.s_u / BINS_PER_DECADE
    }

    pub fn s_d_per_bin(&self) -> f64 {
        self.s_d / BINS_PER_DECADE
    }
}

fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (slope, intercept, ss)
}

/// Fit the triangular shape of a dispersion histogram.
///
/// Each leg starts at the mode and extends outward over the contiguous run of
/// bins holding at least [`MIN_FIT_COUNT`] samples.
pub fn fit_triangle(hist: &DispersionHistogram) -> Result<TriangleFit> {
    if hist.total() < MIN_FIT_SAMPLES {
        return Err(Error::Fit(format!(
            "{} samples, need at least {MIN_FIT_SAMPLES}",
            hist.total()
        )));
    }
    let peak = hist.mode().expect("non-empty");
    let bins = hist.bins();
    let mut lo = peak;
    while lo > 0 && bins[lo - 1] >= MIN_FIT_COUNT {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < N_BINS && bins[hi + 1] >= MIN_FIT_COUNT {
        hi += 1;
    }
    let (up, down) = (peak - lo, hi - peak);
    if up < 5 || down < 5 {
        return Err(Error::Fit(format!(
            "{up} populated bins below the mode and {down} above, need 5 on each side"
        )));
    }
    let y = |b: usize| ((bins[b] + 1) as f64).log2();
    let leg = |range: std::ops::RangeInclusive<usize>| {
        let xs: Vec<f64> = range.clone().map(|b| b as f64).collect();
        let ys: Vec<f64> = range.map(y).collect();
        line_fit(&xs, &ys)
    };
    let (su, iu, ssu) = leg(lo..=peak);
    let (sd, _, ssd) = leg(peak..=hi);
    if !(su > 0.0 && sd < 0.0) {
        return Err(Error::Fit(format!("slopes {su} and {sd} do not form a peak")));
    }
    Ok(TriangleFit {
        peak,
        peak_height: iu + su * peak as f64,
        s_u: su * BINS_PER_DECADE,
        s_d: sd * BINS_PER_DECADE,
        residual: ((ssu + ssd) / (up + down + 2) as f64).sqrt(),
        bins_up: up,
        bins_down: down,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    /// Total-variation distance between the normalized histograms.
    pub distance: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn total_variation(a: &DispersionHistogram, b: &DispersionHistogram) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    0.5 * a
        .normalized()
        .iter()
        .zip(b.normalized())
        .map(|(p, q)| (p - q).abs())
        .sum::<f64>()
}

pub fn invariance_check(a: &DispersionHistogram, b: &DispersionHistogram) -> InvarianceReport {
    let distance = total_variation(a, b);
    InvarianceReport {
        distance,
        threshold: INVARIANCE_THRESHOLD,
        pass: distance < INVARIANCE_THRESHOLD,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(vi: f64, vo: f64) -> ShockDispersionSample {
        ShockDispersionSample::new(vi, vo).unwrap()
    }

    /// Noiseless triangle in the per-decade slope units of [`TriangleFit`].
    pub(crate) fn synthetic(peak: usize, s_u: f64, s_d: f64, height: f64) -> DispersionHistogram {
        let counts: Vec<u64> = (0..N_BINS)
            .map(|b| {
                let d = b as f64 - peak as f64;
                let slope = if d < 0.0 { s_u } else { s_d } / BINS_PER_DECADE;
                let y = height + slope * d;
                (y.exp2() - 1.0).max(0.0).round() as u64
            })
            .collect();
        DispersionHistogram::from_counts(&counts, 16.0, 0.33, 128).unwrap()
    }

    #[test]
    fn bin_examples() {
        assert_eq!(sample(1.0, 1.0).bin(), 128);
        assert_eq!(sample(1e-9, 2e-9).bin(), 124);
        assert_eq!(sample(1.0, 0.25).bin(), 136);
        assert_relative_eq!(ratio_at(124.0), 2.0);
        assert!(ShockDispersionSample::new(0.0, 1.0).is_none());
        assert!(ShockDispersionSample::new(1.0, 0.0).is_none());
    }

    #[test]
    fn bins_are_monotone_in_log_ratio() {
        let mut last = 0;
        for i in 0..400 {
            let r = ((i as f64 - 200.0) / 4.0).exp2();
            let b = sample(r, 1.0).bin();
            assert!(b >= last);
            last = b;
        }
    }

    #[test]
    fn clamps_and_degenerates_are_counted() {
        let mut h = DispersionHistogram::new(16.0, 0.33, 2);
        h.record_pair(1.0, 1e-40);
        h.record_pair(1e-40, 1.0);
        h.record_pair(0.0, 1.0);
        h.record_pair(1.0, 1.0);
        assert_eq!(h.total(), 3);
        assert_eq!(h.degenerate(), 1);
        assert_eq!(h.clamped(), (1, 1));
        assert_eq!(h.bins()[255], 1);
        assert_eq!(h.bins()[0], 1);
        assert_eq!(h.bins().iter().sum::<u64>(), h.total());
    }

    #[test]
    fn merge_is_additive() {
        let mut a = DispersionHistogram::new(16.0, 0.33, 2);
        let mut b = a.clone();
        a.record_pair(1.0, 2.0);
        b.record_pair(1.0, 1.0);
        b.record_pair(0.0, 1.0);
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        assert_eq!(ab.bins(), ba.bins());
        assert_eq!(ab.total(), 2);
        assert_eq!(ab.degenerate(), 1);
    }

    #[test]
    fn fit_recovers_synthetic_slopes() {
        let h = synthetic(128, 2.2, -5.0, 40.0);
        let f = fit_triangle(&h).unwrap();
        assert_eq!(f.peak, 128);
        assert_relative_eq!(f.s_u, 2.2, max_relative = 0.01);
        assert_relative_eq!(f.s_d, -5.0, max_relative = 0.01);
    }

    #[test]
    fn flat_histogram_fails_to_fit() {
        let h = DispersionHistogram::from_counts(&[1000; N_BINS], 16.0, 0.33, 128).unwrap();
        assert!(matches!(fit_triangle(&h), Err(Error::Fit(_))));
        let small = synthetic(128, 2.2, -5.0, 8.0);
        assert!(fit_triangle(&small).is_err());
    }

    #[test]
    fn invariance_examples() {
        let h = synthetic(128, 2.2, -5.0, 20.0);
        let r = invariance_check(&h, &h.clone());
        assert_eq!(r.distance, 0.0);
        assert!(r.pass);
        let shifted = synthetic(100, 2.2, -5.0, 20.0);
        assert!(!invariance_check(&h, &shifted).pass);
    }

    #[test]
    fn csv_round_trip() {
        let h = synthetic(126, 2.0, -4.0, 14.0);
        let mut buf = Vec::new();
        h.write_csv(&mut buf, &[("seed".into(), "3".into())]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# seed = 3\n"));
        assert!(text.contains("bin,A_n_center,count,normalized"));
        let back = DispersionHistogram::read_csv(&buf[..]).unwrap();
        assert_eq!(back.bins(), h.bins());
        assert_eq!(back.radius, h.radius);
    }

    #[test]
    fn zero_target_gives_empty_histogram() {
        let cfg = TableConfig::with_void_ratio(16, 0.33);
        let h = collect_dispersion(cfg, 20, 0, 1, 50.0).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn collection_is_seeded() {
        let cfg = TableConfig::with_void_ratio(16, 0.33);
        let a = collect_dispersion(cfg, 20, 500, 9, 50.0).unwrap();
        let b = collect_dispersion(cfg, 20, 500, 9, 50.0).unwrap();
        assert_eq!(a.total(), 500);
        assert_eq!(a, b);
    }
}
