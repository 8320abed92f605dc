//! Render the figure pipelines into a directory. The cheap tables run by
//! default; pass `all` to include the simulation-backed figures.
//!
//! ```text
//! cargo run --release --example figures -- out all
//! ```

use std::path::PathBuf;

use twin_billiard::harness::figures::{self, Fig2Params, Fig6Params, Fig7Params, Fig8Params};

fn main() -> twin_billiard::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "figures".into()));
    let all = args.next().as_deref() == Some("all");
    std::fs::create_dir_all(&dir)?;

    for row in figures::fig7(&Fig7Params::default(), None, &dir)? {
        println!(
            "N_b {:5}  N_c {:4.1}  trajectory {:5.1} bits  initial {:3} bits  {}",
            row.n_balls,
            row.n_c,
            row.trajectory_bits,
            row.initial_bits,
            row.verdict.as_str()
        );
    }
    for row in figures::fig8(&Fig8Params::default(), None, &dir)? {
        match row.frontier {
            Some(f) => println!("P_i {:2}, P_c {:2}: N_b >= {}", row.p_i, row.p_c, f.n_balls),
            None => println!("P_i {:2}, P_c {:2}: no crossing", row.p_i, row.p_c),
        }
    }
    if all {
        figures::fig2(&Fig2Params::default(), &dir)?;
        let fig6 = figures::fig6(&Fig6Params::default(), None, &dir)?;
        println!("triangle legs {:.2} / {:.2}", fig6.triangle.s_u, fig6.triangle.s_d);
    }
    for n in [2u8, 6, 7, 8] {
        for p in figures::outputs(n).iter().map(|f| dir.join(f)).filter(|p| p.exists()) {
            println!("{}", p.display());
        }
    }
    Ok(())
}
