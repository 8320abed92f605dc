//! A seeded sweep over offset exponent and ball count, written as CSV with
//! provenance lines.
//!
//! ```text
//! cargo run --release --example sweep > sweep.csv
//! ```

use twin_billiard::harness::{run_sweep, ExperimentConfig};

const CONFIG: &str = r#"
seed = 11
trials = 40

[sweep]
epsilon_exps = [10, 20, 30]
n_balls = [16, 64]
"#;

fn main() -> twin_billiard::Result<()> {
    let config = ExperimentConfig::from_toml(CONFIG)?;
    let result = run_sweep(&config)?;
    for c in &result.cells {
        eprintln!(
            "k = {:2}  N_b = {:3}  N_c = {:6.3} +- {:.3}",
            c.key.epsilon_exp, c.key.n_balls, c.nc_mean, c.nc_sem
        );
    }
    result.write_csv(std::io::stdout().lock())
}
