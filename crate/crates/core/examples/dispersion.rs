//! Histogram of how shocks amplify the velocity difference between twins,
//! with the two-leg fit of its log counts.
//!
//! ```text
//! cargo run --release --example dispersion
//! ```

use twin_billiard::dispersion::{fit_triangle, invariance_check, CENTER_BIN};
use twin_billiard::harness::figures::HistogramParams;

fn main() -> twin_billiard::Result<()> {
    let params = HistogramParams {
        samples: 40_000,
        ..HistogramParams::default()
    };
    let hist = params.collect()?;
    let (below, above) = hist.split_mass();
    println!(
        "{} shocks, {} degenerate, mode bin {:?} (center {CENTER_BIN})",
        hist.total(),
        hist.degenerate(),
        hist.mode()
    );
    println!("amplifying {below}, damping {above}, geometric mean ratio {:.2}", hist.mean_ratio().unwrap_or(f64::NAN));

    let t = fit_triangle(&hist)?;
    println!(
        "peak {:.1}, rising leg {:.2} per decade over {} bins, falling leg {:.2} over {} bins",
        t.peak, t.s_u, t.bins_up, t.s_d, t.bins_down
    );

    let other = HistogramParams {
        seed: 2,
        ..params
    }
    .collect()?;
    let r = invariance_check(&hist, &other);
    println!("reseeded total variation {:.4} (threshold {}): {}", r.distance, r.threshold, if r.pass { "same" } else { "different" });
    Ok(())
}
