//! Information bookkeeping: bits held by a twin pair, the linear loss model
//! and the paradox verdict with its ball-count frontier.
//!
//! ```text
//! cargo run --release --example demon
//! ```

use twin_billiard::info::{
    billiard_information, demon_condition, demon_frontier, initial_billiard_information, linear_loss_model,
    PrecisionBudget, DEFAULT_DP_MAX,
};
use twin_billiard::harness::figures::Fig8Params;

fn main() -> twin_billiard::Result<()> {
    let dp_max = DEFAULT_DP_MAX;
    let n = 128;
    println!("initial bits at offset 2^-30: {:.1}", initial_billiard_information(n, dp_max, 2f64.powi(-30)));
    let grown: Vec<f64> = (0..n).map(|i| 2f64.powi(-30 + (i % 20) as i32)).collect();
    println!("after some growth: {:.1}", billiard_information(&grown, dp_max)?);

    let budget = PrecisionBudget::new(40, 10)?;
    for shocks in [1.0, 3.0, 5.0, 7.0] {
        let bits = linear_loss_model(shocks, 8.0, budget.additional().into(), budget.calculation.into(), 1000)?;
        println!("  {shocks} shocks per ball: {bits:.0} valid bits over 1000 balls");
    }

    for nc in [10u64, 9, 8, 7, 6] {
        println!("N_c {nc}: {}", demon_condition(budget.initial, budget.calculation, nc).as_str());
    }

    let fit = Fig8Params::default().fit();
    for p_i in [30, 40, 50] {
        let f = demon_frontier(p_i, 10, &fit)?;
        println!("P_i {p_i}: paradox once N_c < {}, from N_b = {}", f.nc_threshold, f.n_balls);
    }
    Ok(())
}
