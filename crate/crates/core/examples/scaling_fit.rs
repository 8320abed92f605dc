//! Weighted fit of critical step against offset exponent and ball count,
//! with axis crossings and the precision trade-off.
//!
//! ```text
//! cargo run --release --example scaling_fit
//! ```

use twin_billiard::harness::{run_sweep, ExperimentConfig};
use twin_billiard::scaling::{axis_crossing, fit_scaling, precision_tradeoff};

fn main() -> twin_billiard::Result<()> {
    let mut config = ExperimentConfig {
        trials: 60,
        ..ExperimentConfig::default()
    };
    config.sweep.epsilon_exps = vec![15, 20, 25, 30];
    config.sweep.n_balls = vec![16, 32, 64, 128];
    let sweep = run_sweep(&config)?;
    let points: Vec<_> = sweep.cells.iter().map(|c| c.scaling_point()).collect();

    let fit = fit_scaling(&points)?;
    print!("{}", fit.report());
    println!("balls per extra bit of precision: x{:.3}", precision_tradeoff(&fit)?);
    for k in [5.0, 10.0, 15.0] {
        let c = axis_crossing(&fit, k)?;
        println!(
            "k = {k}: N_c reaches 1 at log2 N_b = {:.2} +- {:.2}{}",
            c.log2_nb,
            c.std_err,
            if c.extrapolated { " (extrapolated)" } else { "" }
        );
    }
    Ok(())
}
