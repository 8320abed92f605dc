//! One pipeline per figure. Each writes a CSV data file and an SVG chart
//! into the given directory and returns the computed data.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::output::{metadata_lines, write_metadata};
use super::plot::{chart, Series, Style};
use super::sweep::{run_sweep, SweepResult};
use crate::dispersion::{collect_dispersion, fit_triangle, DispersionHistogram, TriangleFit, CENTER_BIN};
use crate::error::{Error, Result};
use crate::geometry::{Boundary, TableConfig};
use crate::info::{demon_condition, demon_frontier, DemonFrontier, DemonVerdict, ShockCount};
use crate::paired::{run_trial, PerturbationSpec, TrialRecord, DEFAULT_MAX_SHOCKS_PER_BALL};
use crate::scaling::{DomainBox, ScalingFit};
use crate::seeds::{derive_seed, sha256_hex};
use crate::two_ball::{
    divergence_distribution, nb_scaling_bridge, surrogate_nc, BridgeCrossing, BridgeSurface, CalibrationCell,
    RatioSampler, SurrogateStats, DEFAULT_MAX_STEPS,
};

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn provenance<P: Serialize>(params: &P, seed: u64) -> Vec<(String, String)> {
    let text = toml::to_string(params).expect("parameters serialize");
    metadata_lines(&sha256_hex(text.as_bytes()), seed, &text)
}

fn csv_writer<W: Write>(mut w: W, meta: &[(String, String)]) -> Result<csv::Writer<W>> {
    write_metadata(&mut w, meta)?;
    Ok(csv::Writer::from_writer(w))
}

/// Parameters of the reference dispersion histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HistogramParams {
    pub n_balls: usize,
    pub void_ratio: f64,
    /// Overrides the radius implied by `void_ratio`.
    pub radius: Option<f64>,
    pub epsilon_exp: u32,
    pub samples: u64,
    pub seed: u64,
}

impl Default for HistogramParams {
    fn default() -> Self {
        Self {
            n_balls: 128,
            void_ratio: 0.33,
            radius: None,
            epsilon_exp: 35,
            samples: 100_000,
            seed: 1,
        }
    }
}

impl HistogramParams {
    pub fn table(&self) -> TableConfig {
        let t = TableConfig::with_void_ratio(self.n_balls, self.void_ratio);
        match self.radius {
            Some(r) => TableConfig { radius: r, ..t },
            None => t,
        }
    }

    pub fn collect(&self) -> Result<DispersionHistogram> {
        collect_dispersion(self.table(), self.epsilon_exp, self.samples, self.seed, DEFAULT_MAX_SHOCKS_PER_BALL)
    }
}

// ---------------------------------------------------------------- fig2

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig2Params {
    pub ks: Vec<u32>,
    pub n_balls: usize,
    pub void_ratio: f64,
    pub boundary: Boundary,
    pub seed: u64,
    pub max_shocks_per_ball: f64,
}

impl Default for Fig2Params {
    fn default() -> Self {
        Self {
            ks: vec![5, 10, 15, 20, 25, 30, 35],
            n_balls: 128,
            void_ratio: 0.33,
            boundary: Boundary::Walls,
            seed: 1,
            max_shocks_per_ball: DEFAULT_MAX_SHOCKS_PER_BALL,
        }
    }
}

pub struct Fig2Output {
    /// One traced trial per perturbation exponent, all from the same billiard.
    pub trials: Vec<TrialRecord>,
    /// Mean increase of the critical step per step of the exponent list.
    pub mean_stagger: f64,
}

/// Separation traces of one billiard under successively smaller perturbations.
pub fn fig2(params: &Fig2Params, out_dir: &Path) -> Result<Fig2Output> {
    let table = TableConfig::with_void_ratio(params.n_balls, params.void_ratio).boundary(params.boundary);
    table.validate()?;
    let sign_seed = derive_seed("fig2-signs", params.seed, &[]);
    let trials: Vec<TrialRecord> = params
        .ks
        .iter()
        .map(|&k| {
            let pert = PerturbationSpec::new(k, sign_seed)?;
            Ok(run_trial(table, pert, params.seed, params.max_shocks_per_ball, true))
        })
        .collect::<Result<_>>()?;
    let steps: Vec<f64> = trials.iter().map(|t| t.critical_step as f64).collect();
    let mean_stagger = if steps.len() > 1 {
        (steps[steps.len() - 1] - steps[0]) / (steps.len() - 1) as f64
    } else {
        0.0
    };

    let meta = provenance(params, params.seed);
    let mut w = csv_writer(create(out_dir, "fig2_traces.csv")?, &meta)?;
    w.write_record(["k", "shocks_per_ball", "mean_dp", "max_dp"])?;
    for t in &trials {
        for p in t.delta_p_trace.iter().flatten() {
            w.write_record([
                t.epsilon_exp.to_string(),
                p.shocks_per_ball.to_string(),
                p.mean_dp.to_string(),
                p.max_dp.to_string(),
            ])?;
        }
    }
    w.flush()?;
    let mut w = csv_writer(create(out_dir, "fig2_summary.csv")?, &meta)?;
    w.write_record(["k", "critical_step", "shocks_per_ball", "termination", "cause"])?;
    for t in &trials {
        w.write_record([
            t.epsilon_exp.to_string(),
            t.critical_step.to_string(),
            t.shocks_per_ball.to_string(),
            t.termination.as_str().to_string(),
            t.cause.map(|c| c.as_str()).unwrap_or("").to_string(),
        ])?;
    }
    w.flush()?;

    let series: Vec<Series> = trials
        .iter()
        .map(|t| {
            let pts = t
                .delta_p_trace
                .iter()
                .flatten()
                .filter(|p| p.max_dp > 0.0)
                .map(|p| (p.shocks_per_ball, p.max_dp.log2()))
                .collect();
            Series::new(format!("k = {}", t.epsilon_exp), pts)
        })
        .collect();
    chart(
        &out_dir.join("fig2.svg"),
        "Twin separation growth",
        "shocks per ball",
        "log2 max separation (px)",
        &series,
        Style::Lines,
    )?;
    Ok(Fig2Output { trials, mean_stagger })
}

// ---------------------------------------------------------------- fig3

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig3Params {
    pub ks: Vec<u32>,
    pub n_balls: Vec<usize>,
    pub void_ratio: f64,
    pub trials: u32,
    pub seed: u64,
    pub max_shocks_per_ball: f64,
}

impl Default for Fig3Params {
    fn default() -> Self {
        Self {
            ks: vec![5, 15, 25, 35],
            n_balls: vec![8, 16, 32, 64, 128, 256, 512],
            void_ratio: 0.33,
            trials: 200,
            seed: 1,
            max_shocks_per_ball: DEFAULT_MAX_SHOCKS_PER_BALL,
        }
    }
}

impl Fig3Params {
    pub fn config(&self, boundary: Boundary) -> ExperimentConfig {
        let mut c = ExperimentConfig {
            seed: self.seed,
            trials: self.trials,
            max_shocks_per_ball: self.max_shocks_per_ball,
            ..ExperimentConfig::default()
        };
        c.table.boundary = boundary;
        c.sweep.epsilon_exps = self.ks.clone();
        c.sweep.n_balls = self.n_balls.clone();
        c.sweep.void_ratio = self.void_ratio;
        c
    }
}

pub struct Fig3Output {
    pub walls: SweepResult,
    pub periodic: SweepResult,
}

/// Critical step against ball count, with walls and on a torus.
pub fn fig3(params: &Fig3Params, out_dir: &Path) -> Result<Fig3Output> {
    let walls = run_sweep(&params.config(Boundary::Walls))?;
    let periodic = run_sweep(&params.config(Boundary::Periodic))?;
    walls.write_csv(create(out_dir, "fig3_walls.csv")?)?;
    periodic.write_csv(create(out_dir, "fig3_periodic.csv")?)?;
    let mut series = Vec::new();
    for res in [&walls, &periodic] {
        for &k in &params.ks {
            let pts = res
                .cells
                .iter()
                .filter(|c| c.key.epsilon_exp == k)
                .map(|c| (c.log2_nb(), c.nc_mean))
                .collect();
            let b = res.cells[0].key.boundary;
            series.push(Series::new(format!("k = {k}, {b}"), pts));
        }
    }
    chart(
        &out_dir.join("fig3.svg"),
        "Critical step versus ball count",
        "log2 N_b",
        "mean N_c",
        &series,
        Style::LinesAndPoints,
    )?;
    Ok(Fig3Output { walls, periodic })
}

// ---------------------------------------------------------------- fig4

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig4Params {
    pub n_balls: usize,
    pub radii: Vec<f64>,
    pub epsilon_exp: u32,
    pub samples: u64,
    pub seed: u64,
}

impl Default for Fig4Params {
    fn default() -> Self {
        Self {
            n_balls: 128,
            radii: vec![16.0, 8.0, 4.0, 2.0, 1.0],
            epsilon_exp: 45,
            samples: 100_000,
            seed: 1,
        }
    }
}

/// Dispersion histograms at fixed ball count for several radii.
pub fn fig4(params: &Fig4Params, out_dir: &Path) -> Result<Vec<DispersionHistogram>> {
    let hists: Vec<DispersionHistogram> = params
        .radii
        .iter()
        .map(|&r| {
            HistogramParams {
                n_balls: params.n_balls,
                radius: Some(r),
                epsilon_exp: params.epsilon_exp,
                samples: params.samples,
                seed: params.seed,
                ..HistogramParams::default()
            }
            .collect()
        })
        .collect::<Result<_>>()?;
    let mut w = csv_writer(create(out_dir, "fig4.csv")?, &provenance(params, params.seed))?;
    w.write_record(["radius", "void_ratio", "bin", "A_n_center", "count", "normalized", "mean_ratio"])?;
    for h in &hists {
        let mean = h.mean_ratio().unwrap_or(f64::NAN);
        for (b, (&c, p)) in h.bins().iter().zip(h.normalized()).enumerate() {
            w.write_record([
                h.radius.to_string(),
                h.void_ratio.to_string(),
                b.to_string(),
                (b as f64).to_string(),
                c.to_string(),
                p.to_string(),
                mean.to_string(),
            ])?;
        }
    }
    w.flush()?;
    let series: Vec<Series> = hists
        .iter()
        .map(|h| {
            let pts = h
                .bins()
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(b, &c)| {
                    let log10_ratio = (CENTER_BIN as f64 - b as f64) / 4.0 * std::f64::consts::LOG10_2;
                    (log10_ratio, (c as f64).log2())
                })
                .collect();
            Series::new(format!("R = {}, void ratio {:.3}", h.radius, h.void_ratio), pts)
        })
        .collect();
    chart(
        &out_dir.join("fig4.svg"),
        "Velocity dispersion across one shock",
        "log10(out/in velocity difference)",
        "log2 count",
        &series,
        Style::Lines,
    )?;
    Ok(hists)
}

// ---------------------------------------------------------------- fig5

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig5Params {
    pub histogram: HistogramParams,
    pub surrogate_trials: u64,
    pub ks: Vec<u32>,
    pub log2_nbs: Vec<f64>,
    /// Paired sweep used for calibration when no cells are supplied.
    pub calibration_ks: Vec<u32>,
    pub calibration_n_balls: Vec<usize>,
    pub calibration_trials: u32,
    pub seed: u64,
}

impl Default for Fig5Params {
    fn default() -> Self {
        Self {
            histogram: HistogramParams::default(),
            surrogate_trials: 20_000,
            ks: (1..=9).map(|i| 5 * i).collect(),
            log2_nbs: (3..=17).map(f64::from).collect(),
            calibration_ks: vec![15, 20, 25, 30, 35],
            calibration_n_balls: vec![16, 32, 64, 128, 256, 512],
            calibration_trials: 200,
            seed: 1,
        }
    }
}

pub struct Fig5Output {
    pub histogram: DispersionHistogram,
    pub surrogate: Vec<SurrogateStats>,
    pub surface: BridgeSurface,
    pub crossings: Vec<BridgeCrossing>,
}

/// Surrogate statistics for each exponent, drawing from `sampler`.
pub fn surrogate_table(sampler: &RatioSampler, ks: &[u32], trials: u64, seed: u64) -> Result<Vec<SurrogateStats>> {
    ks.iter()
        .map(|&k| surrogate_nc(sampler, k, 1.0, trials, seed, DEFAULT_MAX_STEPS))
        .collect()
}

/// Calibration cells from a sweep.
pub fn calibration_cells(sweep: &SweepResult) -> Vec<CalibrationCell> {
    sweep
        .cells
        .iter()
        .filter(|c| c.nc_mean.is_finite())
        .map(|c| CalibrationCell {
            k: c.key.epsilon_exp,
            n_balls: c.key.n_balls,
            nc_mean: c.nc_mean,
            nc_sem: c.nc_sem,
        })
        .collect()
}

/// Surrogate-extended critical-step surface over a wide ball-count range.
pub fn fig5(
    params: &Fig5Params,
    histogram: Option<DispersionHistogram>,
    calibration: Option<Vec<CalibrationCell>>,
    out_dir: &Path,
) -> Result<Fig5Output> {
    let histogram = match histogram {
        Some(h) => h,
        None => params.histogram.collect()?,
    };
    let calibration = match calibration {
        Some(c) => c,
        None => {
            let mut cfg = ExperimentConfig {
                seed: params.seed,
                trials: params.calibration_trials,
                ..ExperimentConfig::default()
            };
            cfg.sweep.epsilon_exps = params.calibration_ks.clone();
            cfg.sweep.n_balls = params.calibration_n_balls.clone();
            cfg.sweep.void_ratio = params.histogram.void_ratio;
            calibration_cells(&run_sweep(&cfg)?)
        }
    };
    let sampler = RatioSampler::empirical(&histogram)?;
    let mut ks: Vec<u32> = params.ks.iter().chain(calibration.iter().map(|c| &c.k)).copied().collect();
    ks.sort_unstable();
    ks.dedup();
    let surrogate = surrogate_table(&sampler, &ks, params.surrogate_trials, params.seed)?;
    let surface = nb_scaling_bridge(&surrogate, &calibration, &params.ks, &params.log2_nbs)?;
    let crossings = params
        .ks
        .iter()
        .filter_map(|&k| surface.bridge.axis_crossing(k).ok())
        .collect::<Vec<_>>();

    let mut meta = provenance(params, params.seed);
    for c in &crossings {
        meta.push((format!("axis_crossing_k{}", c.k), format!("{} +- {}", c.log2_nb, c.std_err)));
    }
    surface.write_csv(create(out_dir, "fig5_surface.csv")?, &meta)?;
    let mut w = csv_writer(create(out_dir, "fig5_surrogate.csv")?, &provenance(params, params.seed))?;
    w.write_record(["k", "trials", "budget_exceeded", "nc_mean", "nc_variance"])?;
    for s in &surrogate {
        w.write_record([
            s.epsilon_exp.to_string(),
            s.trials.to_string(),
            s.budget_exceeded.to_string(),
            s.mean.to_string(),
            s.variance.to_string(),
        ])?;
    }
    w.flush()?;
    let series: Vec<Series> = params
        .ks
        .iter()
        .map(|&k| {
            let pts = surface
                .cells
                .iter()
                .filter(|c| c.k == k)
                .map(|c| (c.log2_nb, c.nc_mean))
                .collect();
            Series::new(format!("k = {k}"), pts)
        })
        .collect();
    chart(
        &out_dir.join("fig5.svg"),
        "Two-ball model critical step",
        "log2 N_b",
        "N_c",
        &series,
        Style::Lines,
    )?;
    Ok(Fig5Output {
        histogram,
        surrogate,
        surface,
        crossings,
    })
}

// ---------------------------------------------------------------- fig6

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig6Params {
    pub ks: Vec<u32>,
    pub max_steps: u32,
    pub histogram: HistogramParams,
}

impl Default for Fig6Params {
    fn default() -> Self {
        Self {
            ks: vec![5, 15, 25, 35, 45],
            max_steps: 100,
            histogram: HistogramParams::default(),
        }
    }
}

pub struct Fig6Output {
    pub triangle: TriangleFit,
    /// `(k, P(N_c = n) for n = 1..)`.
    pub curves: Vec<(u32, Vec<f64>)>,
}

/// Divergence-probability law of the surrogate fed by the fitted triangle.
pub fn fig6(params: &Fig6Params, histogram: Option<DispersionHistogram>, out_dir: &Path) -> Result<Fig6Output> {
    let histogram = match histogram {
        Some(h) => h,
        None => params.histogram.collect()?,
    };
    let triangle = fit_triangle(&histogram)?;
    let sampler = RatioSampler::triangular(&triangle)?;
    let curves: Vec<(u32, Vec<f64>)> = params
        .ks
        .iter()
        .map(|&k| Ok((k, divergence_distribution(&sampler, k, 1.0, params.max_steps)?)))
        .collect::<Result<_>>()?;
    let mut meta = provenance(params, params.histogram.seed);
    meta.push(("triangle_peak".into(), triangle.peak.to_string()));
    meta.push(("triangle_s_u".into(), triangle.s_u.to_string()));
    meta.push(("triangle_s_d".into(), triangle.s_d.to_string()));
    let mut w = csv_writer(create(out_dir, "fig6.csv")?, &meta)?;
    w.write_record(["k", "n_c", "probability", "log10_probability"])?;
    for (k, probs) in &curves {
        for (i, p) in probs.iter().enumerate() {
            w.write_record([k.to_string(), (i + 1).to_string(), p.to_string(), p.log10().to_string()])?;
        }
    }
    w.flush()?;
    let series: Vec<Series> = curves
        .iter()
        .map(|(k, probs)| {
            let pts = probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(i, p)| ((i + 1) as f64, p.log10()))
                .collect();
            Series::new(format!("k = {k}"), pts)
        })
        .collect();
    chart(
        &out_dir.join("fig6.svg"),
        "Divergence probability per critical step",
        "N_c",
        "log10 P_d",
        &series,
        Style::Lines,
    )?;
    Ok(Fig6Output { triangle, curves })
}

// ---------------------------------------------------------------- fig7

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig7Params {
    pub p_i: u32,
    pub p_c: u32,
    pub nb_list: Vec<u64>,
    /// Critical step per ball count; ignored when a fit is supplied.
    pub nc_list: Vec<f64>,
}

impl Default for Fig7Params {
    fn default() -> Self {
        Self {
            p_i: 40,
            p_c: 10,
            nb_list: vec![200, 500, 1000, 2000, 5000],
            nc_list: vec![10.0, 9.0, 8.0, 7.0, 6.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemonRow {
    pub n_balls: u64,
    pub n_c: f64,
    /// `P_c·N_c`, per ball.
    pub trajectory_bits: f64,
    /// `2·P_i`, per ball.
    pub initial_bits: f64,
    pub verdict: DemonVerdict,
}

/// Trajectory versus initial-condition information along a ball-count ladder.
pub fn fig7(params: &Fig7Params, fit: Option<&ScalingFit>, out_dir: &Path) -> Result<Vec<DemonRow>> {
    crate::info::PrecisionBudget::new(params.p_i, params.p_c)?;
    let ncs: Vec<f64> = match fit {
        Some(f) => params
            .nb_list
            .iter()
            .map(|&n| f.predict((params.p_i - params.p_c) as f64, (n as f64).log2()))
            .collect(),
        None => {
            if params.nc_list.len() != params.nb_list.len() {
                return Err(Error::Config(format!(
                    "{} ball counts but {} critical steps",
                    params.nb_list.len(),
                    params.nc_list.len()
                )));
            }
            params.nc_list.clone()
        }
    };
    let rows: Vec<DemonRow> = params
        .nb_list
        .iter()
        .zip(&ncs)
        .map(|(&n_balls, &n_c)| {
            let count = if n_c.fract() == 0.0 && n_c >= 0.0 {
                ShockCount::whole(n_c as u64)
            } else {
                ShockCount::from_f64(n_c)
            };
            DemonRow {
                n_balls,
                n_c,
                trajectory_bits: params.p_c as f64 * n_c,
                initial_bits: 2.0 * params.p_i as f64,
                verdict: demon_condition(params.p_i, params.p_c, count),
            }
        })
        .collect();
    let mut w = csv_writer(create(out_dir, "fig7.csv")?, &provenance(params, 0))?;
    w.write_record(["n_balls", "n_c", "trajectory_bits", "initial_bits", "verdict"])?;
    for r in &rows {
        w.write_record([
            r.n_balls.to_string(),
            r.n_c.to_string(),
            r.trajectory_bits.to_string(),
            r.initial_bits.to_string(),
            r.verdict.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    let lx = |r: &DemonRow| (r.n_balls as f64).log2();
    let series = vec![
        Series::new("trajectory bits", rows.iter().map(|r| (lx(r), r.trajectory_bits)).collect()),
        Series::new("initial bits", rows.iter().map(|r| (lx(r), r.initial_bits)).collect()),
    ];
    chart(
        &out_dir.join("fig7.svg"),
        "Information per ball",
        "log2 N_b",
        "bits",
        &series,
        Style::LinesAndPoints,
    )?;
    Ok(rows)
}

// ---------------------------------------------------------------- fig8

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig8Params {
    pub p_i: Vec<u32>,
    pub p_c: Vec<u32>,
    /// Coefficients of the scaling law.
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for Fig8Params {
    fn default() -> Self {
        Self {
            p_i: vec![20, 25, 30, 35, 40, 45, 50, 55],
            p_c: vec![5, 10, 15],
            a: 2.8,
            b: 0.21,
            c: -0.35,
        }
    }
}

impl Fig8Params {
    pub fn fit(&self) -> ScalingFit {
        ScalingFit::exact(
            self.a,
            self.b,
            self.c,
            DomainBox {
                k_min: f64::NEG_INFINITY,
                k_max: f64::INFINITY,
                log2_nb_min: f64::NEG_INFINITY,
                log2_nb_max: f64::INFINITY,
            },
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub p_i: u32,
    pub p_c: u32,
    pub frontier: Option<DemonFrontier>,
}

/// Ball-count thresholds of the paradox for a grid of precisions.
pub fn fig8(params: &Fig8Params, fit: Option<&ScalingFit>, out_dir: &Path) -> Result<Vec<FrontierRow>> {
    let own = params.fit();
    let fit = fit.unwrap_or(&own);
    let mut rows = Vec::new();
    for &p_c in &params.p_c {
        for &p_i in params.p_i.iter().filter(|&&p| p > p_c) {
            rows.push(FrontierRow {
                p_i,
                p_c,
                frontier: demon_frontier(p_i, p_c, fit).ok(),
            });
        }
    }
    let mut meta = provenance(params, 0);
    meta.push(("fit".into(), format!("A = {}, B = {}, C = {}", fit.a, fit.b, fit.c)));
    let mut w = csv_writer(create(out_dir, "fig8.csv")?, &meta)?;
    w.write_record(["p_i", "p_c", "nc_threshold", "log2_nb", "n_balls"])?;
    for r in &rows {
        let (t, x, n) = match r.frontier {
            Some(f) => (f.nc_threshold.to_string(), f.log2_nb.to_string(), f.n_balls.to_string()),
            None => ((2.0 * r.p_i as f64 / r.p_c as f64).to_string(), String::new(), String::new()),
        };
        w.write_record([r.p_i.to_string(), r.p_c.to_string(), t, x, n])?;
    }
    w.flush()?;
    let series: Vec<Series> = params
        .p_c
        .iter()
        .map(|&p_c| {
            let pts = rows
                .iter()
                .filter(|r| r.p_c == p_c)
                .filter_map(|r| r.frontier.map(|f| (f.log2_nb, f.nc_threshold)))
                .collect();
            Series::new(format!("P_c = {p_c}"), pts)
        })
        .collect();
    chart(
        &out_dir.join("fig8.svg"),
        "Paradox frontier",
        "log2 N_b",
        "N_c threshold",
        &series,
        Style::Points,
    )?;
    Ok(rows)
}

/// Every file a figure pipeline writes, for listing after a run.
pub fn outputs(figure: u8) -> Vec<PathBuf> {
    let names: &[&str] = match figure {
        2 => &["fig2_traces.csv", "fig2_summary.csv", "fig2.svg"],
        3 => &["fig3_walls.csv", "fig3_periodic.csv", "fig3.svg"],
        4 => &["fig4.csv", "fig4.svg"],
        5 => &["fig5_surface.csv", "fig5_surrogate.csv", "fig5.svg"],
        6 => &["fig6.csv", "fig6.svg"],
        7 => &["fig7.csv", "fig7.svg"],
        8 => &["fig8.csv", "fig8.svg"],
        _ => &[],
    };
    names.iter().map(PathBuf::from).collect()
}
