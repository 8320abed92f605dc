//! Two-ball surrogate: a random multiplicative walk on the separation,
//! sampled by Monte Carlo and solved exactly, then bridged to ball count
//! with a few paired cells.
//!
//! ```text
//! cargo run --release --example two_ball
//! ```

use twin_billiard::harness::figures::{calibration_cells, surrogate_table, HistogramParams};
use twin_billiard::harness::{run_sweep, ExperimentConfig};
use twin_billiard::two_ball::{divergence_distribution, nb_scaling_bridge, RatioSampler, DEFAULT_MAX_STEPS};

fn main() -> twin_billiard::Result<()> {
    let hist = HistogramParams {
        samples: 30_000,
        ..HistogramParams::default()
    }
    .collect()?;
    let sampler = RatioSampler::empirical(&hist)?;
    println!("mean log2 ratio per shock {:.3}", sampler.mean_log2_ratio());

    let ks = [10, 20, 30];
    let stats = surrogate_table(&sampler, &ks, 20_000, 3)?;
    for (s, &k) in stats.iter().zip(&ks) {
        let exact = divergence_distribution(&sampler, k, 1.0, DEFAULT_MAX_STEPS)?;
        let mean: f64 = exact.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        println!("k = {k}: Monte Carlo N_c {:.3} +- {:.3}, exact {mean:.3}", s.mean, s.sem());
    }

    let mut config = ExperimentConfig {
        trials: 40,
        ..ExperimentConfig::default()
    };
    config.sweep.epsilon_exps = ks.to_vec();
    config.sweep.n_balls = vec![16, 32, 64];
    let cells = calibration_cells(&run_sweep(&config)?);
    let surface = nb_scaling_bridge(&stats, &cells, &[10, 20], &[4.0, 8.0, 12.0, 16.0])?;
    println!("bridge a {:.3}, c {:.3} per doubling", surface.bridge.a, surface.bridge.c);
    for c in &surface.cells {
        println!(
            "  k {:2} log2 N_b {:4.1}: N_c {:6.2} [{:.2}, {:.2}]{}",
            c.k,
            c.log2_nb,
            c.nc_mean,
            c.nc_ci_low,
            c.nc_ci_high,
            if c.extrapolated { " extrapolated" } else { "" }
        );
    }
    for w in &surface.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
