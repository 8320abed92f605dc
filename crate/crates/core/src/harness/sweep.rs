use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, WORKERS_ENV};
use super::output::{metadata_lines, write_metadata};
use crate::error::{Error, Result};
use crate::geometry::{Boundary, TableConfig};
use crate::paired::{run_trial, DivergenceCause, PerturbationSpec, Termination, TrialRecord};
use crate::scaling::ScalingPoint;
use crate::seeds::derive_seed;

/// Coordinates of one sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellKey {
    pub epsilon_exp: u32,
    pub n_balls: usize,
    pub radius: f64,
    pub boundary: Boundary,
}

impl CellKey {
    fn coordinates(&self) -> [u64; 4] {
        let b = match self.boundary {
            Boundary::Walls => 0,
            Boundary::Periodic => 1,
        };
        [self.epsilon_exp as u64, self.n_balls as u64, self.radius.to_bits(), b]
    }
}

/// `(trial seed, sign seed)` for trial `index` of a cell.
pub fn trial_seeds(master: u64, key: &CellKey, index: u64) -> (u64, u64) {
    let c = key.coordinates();
    let parts = [c[0], c[1], c[2], c[3], index];
    (derive_seed("trial", master, &parts), derive_seed("signs", master, &parts))
}

/// Integer tallies of a cell; merging is exact, so shard order never matters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellAccumulator {
    pub trials: u64,
    pub diverged: u64,
    pub censored: u64,
    pub sum_nc: u64,
    pub sum_nc_sq: u64,
    /// Sum over diverged trials of all per-ball shock counters.
    pub sum_shock_counts: u64,
    pub separation: u64,
    pub partner_mismatch: u64,
    pub desynchronized: u64,
    /// `(trial index, reason)` of aborted trials, sorted by index.
    pub aborts: Vec<(u64, String)>,
}

impl CellAccumulator {
    pub fn add(&mut self, index: u64, rec: &TrialRecord) {
        self.trials += 1;
        match rec.termination {
            Termination::NumericalAbort => {
                let reason = rec.abort_reason.clone().unwrap_or_default();
                let at = self.aborts.partition_point(|(i, _)| *i < index);
                self.aborts.insert(at, (index, reason));
            }
            Termination::MaxShocksReached => self.censored += 1,
            Termination::Diverged => {
                let n = rec.critical_step as u64;
                self.diverged += 1;
                self.sum_nc += n;
                self.sum_nc_sq += n * n;
                self.sum_shock_counts += (rec.shocks_per_ball * rec.config.n_balls as f64).round() as u64;
                match rec.cause {
                    Some(DivergenceCause::Separation) => self.separation += 1,
                    Some(DivergenceCause::PartnerMismatch) => self.partner_mismatch += 1,
                    Some(DivergenceCause::Desynchronized) => self.desynchronized += 1,
                    None => {}
                }
            }
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.trials += other.trials;
        self.diverged += other.diverged;
        self.censored += other.censored;
        self.sum_nc += other.sum_nc;
        self.sum_nc_sq += other.sum_nc_sq;
        self.sum_shock_counts += other.sum_shock_counts;
        self.separation += other.separation;
        self.partner_mismatch += other.partner_mismatch;
        self.desynchronized += other.desynchronized;
        self.aborts.extend(other.aborts.iter().cloned());
        self.aborts.sort_by_key(|(i, _)| *i);
    }

    pub fn summarize(&self, key: CellKey, table: &TableConfig) -> CellSummary {
        let n = self.diverged as f64;
        let mean = if self.diverged > 0 { self.sum_nc as f64 / n } else { f64::NAN };
        let var = if self.diverged > 1 {
            ((self.sum_nc_sq as f64 - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        CellSummary {
            key,
            void_ratio: table.void_ratio(),
            trials: self.trials,
            completed: self.trials - self.aborts.len() as u64,
            diverged: self.diverged,
            censored: self.censored,
            aborts: self.aborts.len() as u64,
            nc_mean: mean,
            nc_std: var.sqrt(),
            nc_sem: if self.diverged > 0 { (var / n).sqrt() } else { f64::NAN },
            shocks_per_ball_mean: if self.diverged > 0 {
                self.sum_shock_counts as f64 / (n * key.n_balls as f64)
            } else {
                f64::NAN
            },
            separation: self.separation,
            partner_mismatch: self.partner_mismatch,
            desynchronized: self.desynchronized,
            abort_reasons: self.aborts.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub key: CellKey,
    pub void_ratio: f64,
    /// Trials attempted.
    pub trials: u64,
    /// Trials that ran to completion, i.e. `trials - aborts`.
    pub completed: u64,
    pub diverged: u64,
    /// Trials that reached the shock budget without diverging.
    pub censored: u64,
    pub aborts: u64,
    /// Mean critical step over diverged trials.
    pub nc_mean: f64,
    pub nc_std: f64,
    pub nc_sem: f64,
    /// Mean of the unrounded shocks-per-ball at divergence.
    pub shocks_per_ball_mean: f64,
    pub separation: u64,
    pub partner_mismatch: u64,
    pub desynchronized: u64,
    pub abort_reasons: Vec<(u64, String)>,
}

impl CellSummary {
    pub fn log2_nb(&self) -> f64 {
        (self.key.n_balls as f64).log2()
    }

    pub fn scaling_point(&self) -> ScalingPoint {
        ScalingPoint::from_sem(self.key.epsilon_exp as f64, self.log2_nb(), self.nc_mean, self.nc_sem)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub config_toml: String,
}

impl Provenance {
    pub fn for_config(config: &ExperimentConfig) -> Self {
        Self {
            config_hash: config.hash(),
            seed: config.seed,
            version: super::VERSION.to_string(),
            config_toml: config.canonical_toml(),
        }
    }

    pub fn metadata(&self) -> Vec<(String, String)> {
        metadata_lines(&self.config_hash, self.seed, &self.config_toml)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub provenance: Provenance,
    pub cells: Vec<CellSummary>,
    /// Every trial, grouped by cell in grid order.
    pub records: Vec<TrialRecord>,
}

const CELL_HEADER: [&str; 17] = [
    "k",
    "n_balls",
    "log2_nb",
    "radius",
    "void_ratio",
    "boundary",
    "trials",
    "diverged",
    "censored",
    "aborts",
    "nc_mean",
    "nc_std",
    "nc_sem",
    "shocks_per_ball_mean",
    "separation",
    "partner_mismatch",
    "desynchronized",
];

impl SweepResult {
    pub fn cell(&self, epsilon_exp: u32, n_balls: usize) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.key.epsilon_exp == epsilon_exp && c.key.n_balls == n_balls)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write_metadata(&mut w, &self.provenance.metadata())?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CELL_HEADER)?;
        for c in &self.cells {
            out.write_record([
                c.key.epsilon_exp.to_string(),
                c.key.n_balls.to_string(),
                c.log2_nb().to_string(),
                c.key.radius.to_string(),
                c.void_ratio.to_string(),
                c.key.boundary.to_string(),
                c.trials.to_string(),
                c.diverged.to_string(),
                c.censored.to_string(),
                c.aborts.to_string(),
                c.nc_mean.to_string(),
                c.nc_std.to_string(),
                c.nc_sem.to_string(),
                c.shocks_per_ball_mean.to_string(),
                c.separation.to_string(),
                c.partner_mismatch.to_string(),
                c.desynchronized.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_trials_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write_metadata(&mut w, &self.provenance.metadata())?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "k",
            "n_balls",
            "radius",
            "boundary",
            "seed",
            "critical_step",
            "shocks_per_ball",
            "termination",
            "cause",
            "divergence_ball",
            "max_delta_p",
            "sim_time",
            "abort_reason",
        ])?;
        for r in &self.records {
            out.write_record([
                r.epsilon_exp.to_string(),
                r.config.n_balls.to_string(),
                r.config.radius.to_string(),
                r.config.boundary.to_string(),
                r.seed.to_string(),
                r.critical_step.to_string(),
                r.shocks_per_ball.to_string(),
                r.termination.as_str().to_string(),
                r.cause.map(|c| c.as_str()).unwrap_or("").to_string(),
                r.divergence_ball.map(|b| b.to_string()).unwrap_or_default(),
                r.max_delta_p.to_string(),
                r.sim_time.to_string(),
                r.abort_reason.clone().unwrap_or_default(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// Cell rows of a sweep CSV, as `(k, n_balls, nc_mean, nc_sem)`.
pub fn read_sweep_csv<R: BufRead>(reader: R) -> Result<Vec<(u32, usize, f64, f64)>> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let headers = rd.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("sweep file lacks column '{name}'")))
    };
    let (ck, cn, cm, cs) = (col("k")?, col("n_balls")?, col("nc_mean")?, col("nc_sem")?);
    let bad = |what: &str| Error::Config(format!("unreadable {what} in sweep file"));
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        rows.push((
            rec[ck].parse().map_err(|_| bad("k"))?,
            rec[cn].parse().map_err(|_| bad("n_balls"))?,
            rec[cm].parse().map_err(|_| bad("nc_mean"))?,
            rec[cs].parse().map_err(|_| bad("nc_sem"))?,
        ));
    }
    Ok(rows)
}

fn worker_count(config: &ExperimentConfig) -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &usize| n > 0)
        .or((config.workers > 0).then_some(config.workers))
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Run every cell of the grid, with the worker count taken from the
/// environment, then the config, then the machine.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep_with_workers(config, worker_count(config))
}

pub fn run_sweep_with_workers(config: &ExperimentConfig, workers: usize) -> Result<SweepResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;

    let radii: Vec<Option<f64>> = if config.sweep.radii.is_empty() {
        vec![None]
    } else {
        config.sweep.radii.iter().map(|&r| Some(r)).collect()
    };
    let mut cells = Vec::new();
    for &k in &config.sweep.epsilon_exps {
        for &n in &config.sweep.n_balls {
            for &r in &radii {
                let table = config.table_for(n, r);
                let key = CellKey {
                    epsilon_exp: k,
                    n_balls: n,
                    radius: table.radius,
                    boundary: table.boundary,
                };
                cells.push((key, table));
            }
        }
    }
    let trials = config.trials as u64;
    let jobs: Vec<(usize, u64)> = (0..cells.len()).flat_map(|c| (0..trials).map(move |t| (c, t))).collect();
    let records: Vec<TrialRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, t)| {
                let (key, table) = &cells[c];
                let (seed, sign_seed) = trial_seeds(config.seed, key, t);
                let pert = PerturbationSpec::new(key.epsilon_exp, sign_seed).expect("validated");
                run_trial(*table, pert, seed, config.max_shocks_per_ball, config.record_traces)
            })
            .collect()
    });

    let summaries = cells
        .iter()
        .enumerate()
        .map(|(c, (key, table))| {
            let mut acc = CellAccumulator::default();
            for (t, rec) in records[c * trials as usize..(c + 1) * trials as usize].iter().enumerate() {
                acc.add(t as u64, rec);
            }
            acc.summarize(*key, table)
        })
        .collect();
    Ok(SweepResult {
        provenance: Provenance::for_config(config),
        cells: summaries,
        records,
    })
}
