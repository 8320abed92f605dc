use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twin_billiard::dispersion::{fit_triangle, DispersionHistogram};
use twin_billiard::geometry::{Boundary, TableConfig};
use twin_billiard::harness::figures::{self, HistogramParams};
use twin_billiard::harness::{
    read_sweep_csv, run_sweep, run_sweep_with_workers, write_metadata, ExperimentConfig, WORKERS_ENV,
};
use twin_billiard::info::{demon_condition, demon_frontier, ShockCount};
use twin_billiard::paired::{run_trial, PerturbationSpec, DEFAULT_MAX_SHOCKS_PER_BALL};
use twin_billiard::scaling::{axis_crossing, fit_scaling, precision_tradeoff, ScalingFit, ScalingPoint};
use twin_billiard::two_ball::{surrogate_nc, RatioSampler, DEFAULT_MAX_STEPS};
use twin_billiard::{Error, Result};

#[derive(Parser)]
#[command(version, about = "Twin hard-disk billiards and their divergence statistics")]
struct Cli {
    /// Worker threads (overrides the environment variable).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one paired trial.
    Simulate(SimulateArgs),
    /// Run a seeded parameter sweep.
    Sweep(SweepArgs),
    /// Collect a velocity-dispersion histogram.
    Dispersion(DispersionArgs),
    /// Two-ball surrogate critical steps.
    TwoBall(TwoBallArgs),
    /// Fit the scaling law to sweep output.
    Fit(FitArgs),
    /// Paradox verdict and ball-count frontier.
    Demon(DemonArgs),
    /// Pair trajectories and first-shock stagger.
    Fig2(Fig2Args),
    /// Mean critical shocks against ball count, walls and torus.
    Fig3(Fig3Args),
    /// Dispersion histograms across disk radii.
    Fig4(Fig4Args),
    /// Surrogate against paired critical shocks.
    Fig5(Fig5Args),
    /// Divergence-step distributions from the triangular model.
    Fig6(Fig6Args),
    /// Valid-information table against ball count.
    Fig7(Fig7Args),
    /// Critical ball count against initial precision.
    Fig8(Fig8Args),
}

#[derive(Args, Clone)]
struct TableArgs {
    #[arg(long, default_value_t = 128)]
    nb: usize,
    #[arg(long, default_value_t = 0.33)]
    void_ratio: f64,
    /// Disk radius; overrides the void ratio.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = Boundary::Walls)]
    boundary: Boundary,
}

impl TableArgs {
    fn table(&self) -> TableConfig {
        let t = TableConfig::with_void_ratio(self.nb, self.void_ratio).boundary(self.boundary);
        match self.radius {
            Some(r) => TableConfig { radius: r, ..t },
            None => t,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, default_value_t = 35)]
    k: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_SHOCKS_PER_BALL)]
    max_shocks: f64,
    /// Write the separation trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    nb_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long)]
    void_ratio: Option<f64>,
    #[arg(long)]
    boundary: Option<Boundary>,
    #[arg(long)]
    max_shocks: Option<f64>,
    #[arg(long)]
    record_traces: bool,
    /// Per-cell summary CSV.
    #[arg(long)]
    out: PathBuf,
    /// Per-trial CSV.
    #[arg(long)]
    trials_out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct HistogramArgs {
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, default_value_t = 35)]
    k: u32,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl HistogramArgs {
    fn params(&self) -> HistogramParams {
        HistogramParams {
            n_balls: self.table.nb,
            void_ratio: self.table.void_ratio,
            radius: self.table.radius,
            epsilon_exp: self.k,
            samples: self.samples,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct DispersionArgs {
    #[command(flatten)]
    hist: HistogramArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SamplerKind {
    Empirical,
    Triangular,
}

#[derive(Args)]
struct TwoBallArgs {
    /// Histogram CSV written by `dispersion`; collected afresh when absent.
    #[arg(long)]
    histogram: Option<PathBuf>,
    #[command(flatten)]
    hist: HistogramArgs,
    #[arg(long, value_enum, default_value_t = SamplerKind::Empirical)]
    sampler: SamplerKind,
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25,30,35,40,45")]
    k_list: Vec<u32>,
    #[arg(long, default_value_t = 20_000)]
    trials: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// Sweep CSV files.
    #[arg(long, required = true, num_args = 1..)]
    sweep: Vec<PathBuf>,
    #[arg(long)]
    unweighted: bool,
    /// Cells with a mean below this are left out.
    #[arg(long, default_value_t = 0.0)]
    min_nc: f64,
    /// Write the `key = value` report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append the fit as a CSV row here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CoefficientArgs {
    /// Fit report written by `fit`; overrides the coefficients below.
    #[arg(long)]
    fit: Option<PathBuf>,
    #[arg(long, default_value_t = 2.8, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 0.21, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, default_value_t = -0.35, allow_negative_numbers = true)]
    c: f64,
}

impl CoefficientArgs {
    fn load(&self) -> Result<Option<ScalingFit>> {
        self.fit
            .as_ref()
            .map(|p| ScalingFit::from_report(&std::fs::read_to_string(p)?))
            .transpose()
    }

    fn fit(&self) -> Result<ScalingFit> {
        Ok(match self.load()? {
            Some(f) => f,
            None => figures::Fig8Params {
                a: self.a,
                b: self.b,
                c: self.c,
                ..Default::default()
            }
            .fit(),
        })
    }
}

#[derive(Args)]
struct DemonArgs {
    #[arg(long = "pi")]
    p_i: u32,
    #[arg(long = "pc")]
    p_c: u32,
    /// Critical step to judge; the frontier is computed when absent.
    #[arg(long)]
    nc: Option<f64>,
    #[command(flatten)]
    coefficients: CoefficientArgs,
}

#[derive(Args)]
struct OutDir {
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct Fig2Args {
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25,30,35")]
    k: Vec<u32>,
    #[arg(long, default_value_t = 128)]
    nb: usize,
    #[arg(long, default_value_t = 0.33)]
    void_ratio: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct Fig3Args {
    #[arg(long, value_delimiter = ',', default_value = "5,15,25,35")]
    k: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128,256,512")]
    nb_list: Vec<usize>,
    #[arg(long, default_value_t = 0.33)]
    void_ratio: f64,
    #[arg(long, default_value_t = 200)]
    trials: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct Fig4Args {
    #[arg(long, default_value_t = 128)]
    nb: usize,
    #[arg(long, value_delimiter = ',', default_value = "16,8,4,2,1")]
    radii: Vec<f64>,
    #[arg(long, default_value_t = 45)]
    k: u32,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct Fig5Args {
    #[arg(long)]
    histogram: Option<PathBuf>,
    /// Sweep CSV used for calibration; a sweep is run when absent.
    #[arg(long)]
    sweep: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25,30,35,40,45")]
    k: Vec<u32>,
    #[arg(long, default_value_t = 17)]
    max_log2_nb: u32,
    #[arg(long, default_value_t = 20_000)]
    trials: u64,
    #[arg(long, default_value_t = 200)]
    calibration_trials: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct Fig6Args {
    #[arg(long)]
    histogram: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "5,15,25,35,45")]
    k: Vec<u32>,
    #[arg(long, default_value_t = 100)]
    max_steps: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct Fig7Args {
    #[arg(long = "pi", default_value_t = 40)]
    p_i: u32,
    #[arg(long = "pc", default_value_t = 10)]
    p_c: u32,
    #[arg(long, value_delimiter = ',', default_value = "200,500,1000,2000,5000")]
    nb_list: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "10,9,8,7,6")]
    nc_list: Vec<f64>,
    /// Fit report; when given, critical steps come from the fit.
    #[arg(long)]
    fit: Option<PathBuf>,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct Fig8Args {
    #[arg(long = "pi", value_delimiter = ',', default_value = "20,25,30,35,40,45,50,55")]
    p_i: Vec<u32>,
    #[arg(long = "pc", value_delimiter = ',', default_value = "5,10,15")]
    p_c: Vec<u32>,
    #[command(flatten)]
    coefficients: CoefficientArgs,
    #[command(flatten)]
    out: OutDir,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn read_histogram(path: &Path) -> Result<DispersionHistogram> {
    DispersionHistogram::read_csv(BufReader::new(File::open(path)?))
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let table = a.table.table();
    table.validate()?;
    let rec = run_trial(table, PerturbationSpec::new(a.k, a.seed)?, a.seed, a.max_shocks, a.trace.is_some());
    println!("termination = {}", rec.termination.as_str());
    println!("critical_step = {}", rec.critical_step);
    println!("shocks_per_ball = {}", rec.shocks_per_ball);
    println!("cause = {}", rec.cause.map(|c| c.as_str()).unwrap_or("none"));
    println!("max_delta_p = {}", rec.max_delta_p);
    println!("sim_time = {}", rec.sim_time);
    if let Some(reason) = &rec.abort_reason {
        println!("abort_reason = {reason}");
    }
    if let Some(path) = a.trace {
        let mut w = create(&path)?;
        write_metadata(&mut w, &[("seed".into(), a.seed.to_string()), ("k".into(), a.k.to_string())])?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["shocks_per_ball", "mean_dp", "max_dp"])?;
        for p in rec.delta_p_trace.iter().flatten() {
            out.write_record([p.shocks_per_ball.to_string(), p.mean_dp.to_string(), p.max_dp.to_string()])?;
        }
        out.flush()?;
    }
    Ok(())
}

fn sweep(a: SweepArgs, workers: Option<usize>) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = a.k_list {
        cfg.sweep.epsilon_exps = v;
    }
    if let Some(v) = a.nb_list {
        cfg.sweep.n_balls = v;
    }
    if let Some(v) = a.radii {
        cfg.sweep.radii = v;
    }
    if let Some(v) = a.void_ratio {
        cfg.sweep.void_ratio = v;
    }
    if let Some(v) = a.boundary {
        cfg.table.boundary = v;
    }
    if let Some(v) = a.max_shocks {
        cfg.max_shocks_per_ball = v;
    }
    cfg.record_traces |= a.record_traces;
    let res = match workers {
        Some(n) => run_sweep_with_workers(&cfg, n)?,
        None => run_sweep(&cfg)?,
    };
    res.write_csv(create(&a.out)?)?;
    if let Some(p) = a.trials_out {
        res.write_trials_csv(create(&p)?)?;
    }
    for c in &res.cells {
        println!(
            "k = {:2}  N_b = {:5}  N_c = {:7.3} ± {:.3}  ({} diverged, {} censored, {} aborted)",
            c.key.epsilon_exp, c.key.n_balls, c.nc_mean, c.nc_sem, c.diverged, c.censored, c.aborts
        );
    }
    Ok(())
}

fn dispersion(a: DispersionArgs) -> Result<()> {
    let p = a.hist.params();
    let h = p.collect()?;
    let meta = vec![
        ("version".to_string(), twin_billiard::harness::VERSION.to_string()),
        ("seed".to_string(), p.seed.to_string()),
        ("epsilon_exp".to_string(), p.epsilon_exp.to_string()),
        ("boundary".to_string(), a.hist.table.boundary.to_string()),
    ];
    h.write_csv(create(&a.out)?, &meta)?;
    let (below, above) = h.split_mass();
    println!("radius = {}", h.radius);
    println!("void_ratio = {}", h.void_ratio);
    println!("samples = {}", h.total());
    println!("mode = {}", h.mode().map_or("none".into(), |m| m.to_string()));
    println!("below_128 = {below}");
    println!("above_128 = {above}");
    println!("mean_ratio = {}", h.mean_ratio().unwrap_or(f64::NAN));
    match fit_triangle(&h) {
        Ok(t) => println!("s_u = {}\ns_d = {}", t.s_u, t.s_d),
        Err(e) => println!("triangle = {e}"),
    }
    Ok(())
}

fn two_ball(a: TwoBallArgs) -> Result<()> {
    let h = match &a.histogram {
        Some(p) => read_histogram(p)?,
        None => a.hist.params().collect()?,
    };
    let sampler = match a.sampler {
        SamplerKind::Empirical => RatioSampler::empirical(&h)?,
        SamplerKind::Triangular => RatioSampler::triangular(&fit_triangle(&h)?)?,
    };
    let mut w = create(&a.out)?;
    write_metadata(
        &mut w,
        &[
            ("version".into(), twin_billiard::harness::VERSION.into()),
            ("seed".into(), a.hist.seed.to_string()),
            ("threshold".into(), "1".into()),
        ],
    )?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["k", "trials", "budget_exceeded", "nc_mean", "nc_variance"])?;
    for &k in &a.k_list {
        let s = surrogate_nc(&sampler, k, 1.0, a.trials, a.hist.seed, DEFAULT_MAX_STEPS)?;
        println!("k = {k:2}  N_c = {:.3}  var = {:.3}", s.mean, s.variance);
        out.write_record([
            k.to_string(),
            s.trials.to_string(),
            s.budget_exceeded.to_string(),
            s.mean.to_string(),
            s.variance.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn fit(a: FitArgs) -> Result<()> {
    let mut points = Vec::new();
    for path in &a.sweep {
        for (k, nb, mean, sem) in read_sweep_csv(BufReader::new(File::open(path)?))? {
            if mean.is_finite() && mean >= a.min_nc {
                let p = ScalingPoint::from_sem(k as f64, (nb as f64).log2(), mean, sem);
                points.push(if a.unweighted { ScalingPoint { weight: 1.0, ..p } } else { p });
            }
        }
    }
    let fit = fit_scaling(&points)?;
    let report = fit.report();
    print!("{report}");
    match precision_tradeoff(&fit) {
        Ok(f) => println!("precision_tradeoff = {f}"),
        Err(e) => println!("precision_tradeoff = {e}"),
    }
    for k in [5.0, 10.0, 15.0] {
        if let Ok(x) = axis_crossing(&fit, k) {
            let note = if x.extrapolated { " (extrapolated)" } else { "" };
            println!("axis_crossing_k{k} = {} +- {}{note}", x.log2_nb, x.std_err);
        }
    }
    if let Some(p) = a.out {
        create(&p)?.write_all(report.as_bytes())?;
    }
    if let Some(p) = a.csv {
        let exists = p.exists();
        let file = std::fs::OpenOptions::new().create(true).append(true).open(&p)?;
        let mut out = csv::Writer::from_writer(file);
        if !exists {
            out.write_record(ScalingFit::CSV_HEADER)?;
        }
        out.write_record(fit.csv_row())?;
        out.flush()?;
    }
    Ok(())
}

fn demon(a: DemonArgs) -> Result<()> {
    match a.nc {
        Some(nc) => {
            let count = if nc.fract() == 0.0 && nc >= 0.0 {
                ShockCount::whole(nc as u64)
            } else {
                ShockCount::from_f64(nc)
            };
            println!("trajectory_bits = {}", a.p_c as f64 * nc);
            println!("initial_bits = {}", 2 * a.p_i);
            println!("verdict = {}", demon_condition(a.p_i, a.p_c, count).as_str());
        }
        None => {
            let f = demon_frontier(a.p_i, a.p_c, &a.coefficients.fit()?)?;
            println!("nc_threshold = {}", f.nc_threshold);
            println!("log2_nb = {}", f.log2_nb);
            println!("n_balls = {}", f.n_balls);
        }
    }
    Ok(())
}

fn list(dir: &Path, figure: u8) {
    for f in figures::outputs(figure) {
        println!("{}", dir.join(f).display());
    }
}

fn run(cli: Cli) -> Result<()> {
    let workers = cli.workers.or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse().ok()));
    if let Some(n) = workers.filter(|&n| n > 0) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a, cli.workers),
        Command::Dispersion(a) => dispersion(a),
        Command::TwoBall(a) => two_ball(a),
        Command::Fit(a) => fit(a),
        Command::Demon(a) => demon(a),
        Command::Fig2(a) => {
            let p = figures::Fig2Params {
                ks: a.k,
                n_balls: a.nb,
                void_ratio: a.void_ratio,
                seed: a.seed,
                ..Default::default()
            };
            let out = figures::fig2(&p, &a.out.out_dir)?;
            for t in &out.trials {
                println!("k = {:2}  N_c = {}", t.epsilon_exp, t.critical_step);
            }
            println!("mean_stagger = {}", out.mean_stagger);
            list(&a.out.out_dir, 2);
            Ok(())
        }
        Command::Fig3(a) => {
            let p = figures::Fig3Params {
                ks: a.k,
                n_balls: a.nb_list,
                void_ratio: a.void_ratio,
                trials: a.trials,
                seed: a.seed,
                ..Default::default()
            };
            figures::fig3(&p, &a.out.out_dir)?;
            list(&a.out.out_dir, 3);
            Ok(())
        }
        Command::Fig4(a) => {
            let p = figures::Fig4Params {
                n_balls: a.nb,
                radii: a.radii,
                epsilon_exp: a.k,
                samples: a.samples,
                seed: a.seed,
            };
            for h in figures::fig4(&p, &a.out.out_dir)? {
                println!(
                    "R = {:5}  void_ratio = {:.4}  mode = {:?}  mean_ratio = {:.4}",
                    h.radius,
                    h.void_ratio,
                    h.mode(),
                    h.mean_ratio().unwrap_or(f64::NAN)
                );
            }
            list(&a.out.out_dir, 4);
            Ok(())
        }
        Command::Fig5(a) => {
            let p = figures::Fig5Params {
                ks: a.k,
                log2_nbs: (3..=a.max_log2_nb).map(f64::from).collect(),
                surrogate_trials: a.trials,
                calibration_trials: a.calibration_trials,
                seed: a.seed,
                histogram: HistogramParams {
                    seed: a.seed,
                    ..Default::default()
                },
                ..Default::default()
            };
            let hist = a.histogram.as_deref().map(read_histogram).transpose()?;
            let calibration = match &a.sweep {
                Some(path) => Some(
                    read_sweep_csv(BufReader::new(File::open(path)?))?
                        .into_iter()
                        .map(|(k, n_balls, nc_mean, nc_sem)| twin_billiard::two_ball::CalibrationCell {
                            k,
                            n_balls,
                            nc_mean,
                            nc_sem,
                        })
                        .collect(),
                ),
                None => None,
            };
            let out = figures::fig5(&p, hist, calibration, &a.out.out_dir)?;
            for c in &out.crossings {
                println!("k = {:2}  crossing log2 N_b = {:.2} ± {:.2}", c.k, c.log2_nb, c.std_err);
            }
            list(&a.out.out_dir, 5);
            Ok(())
        }
        Command::Fig6(a) => {
            let p = figures::Fig6Params {
                ks: a.k,
                max_steps: a.max_steps,
                histogram: HistogramParams {
                    seed: a.seed,
                    ..Default::default()
                },
            };
            let hist = a.histogram.as_deref().map(read_histogram).transpose()?;
            let out = figures::fig6(&p, hist, &a.out.out_dir)?;
            for (k, probs) in &out.curves {
                println!("k = {k:2}  P_d(1) = {:e}", probs.first().copied().unwrap_or(0.0));
            }
            list(&a.out.out_dir, 6);
            Ok(())
        }
        Command::Fig7(a) => {
            let p = figures::Fig7Params {
                p_i: a.p_i,
                p_c: a.p_c,
                nb_list: a.nb_list,
                nc_list: a.nc_list,
            };
            let fit = a
                .fit
                .as_ref()
                .map(|f| ScalingFit::from_report(&std::fs::read_to_string(f)?))
                .transpose()?;
            println!("n_balls,n_c,trajectory_bits,initial_bits,verdict");
            for r in figures::fig7(&p, fit.as_ref(), &a.out.out_dir)? {
                println!(
                    "{},{},{},{},{}",
                    r.n_balls,
                    r.n_c,
                    r.trajectory_bits,
                    r.initial_bits,
                    r.verdict.as_str()
                );
            }
            list(&a.out.out_dir, 7);
            Ok(())
        }
        Command::Fig8(a) => {
            let c = &a.coefficients;
            let p = figures::Fig8Params {
                p_i: a.p_i,
                p_c: a.p_c,
                a: c.a,
                b: c.b,
                c: c.c,
            };
            let fit = c.load()?;
            for r in figures::fig8(&p, fit.as_ref(), &a.out.out_dir)? {
                match r.frontier {
                    Some(f) => println!("P_i = {:2}  P_c = {:2}  N_b >= {}", r.p_i, r.p_c, f.n_balls),
                    None => println!("P_i = {:2}  P_c = {:2}  no frontier", r.p_i, r.p_c),
                }
            }
            list(&a.out.out_dir, 8);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
