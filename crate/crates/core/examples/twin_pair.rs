//! Two billiards that differ by a tiny initial offset, run until their
//! collision histories part.
//!
//! ```text
//! cargo run --release --example twin_pair -- 25
//! ```

use twin_billiard::geometry::TableConfig;
use twin_billiard::paired::{make_paired, PerturbationSpec, DEFAULT_MAX_SHOCKS_PER_BALL};

fn main() -> twin_billiard::Result<()> {
    let k: u32 = std::env::args().nth(1).map_or(Ok(25), |s| s.parse()).expect("exponent");
    let config = TableConfig::with_void_ratio(128, 0.33);
    let perturbation = PerturbationSpec::new(k, 99)?;
    println!("offset 2^-{k} = {:.3e} px on every coordinate", perturbation.epsilon());

    let record = make_paired(config, perturbation, 5)?
        .with_trace(true)
        .run_until_divergence(DEFAULT_MAX_SHOCKS_PER_BALL);
    let trace = record.delta_p_trace.as_deref().unwrap_or_default();
    let stride = trace.len().div_ceil(12).max(1);
    for p in trace.iter().step_by(stride).chain(trace.last()) {
        println!(
            "  {:6.2} shocks/ball  mean dp {:.3e}  max dp {:.3e}",
            p.shocks_per_ball, p.mean_dp, p.max_dp
        );
    }
    println!(
        "{}: critical step {} after {:.2} shocks per ball, cause {}, ball {:?}",
        record.termination.as_str(),
        record.critical_step,
        record.shocks_per_ball,
        record.cause.map_or("none", |c| c.as_str()),
        record.divergence_ball
    );
    Ok(())
}
