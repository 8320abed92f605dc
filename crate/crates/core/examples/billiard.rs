//! A single hard-disk billiard: random placement, event stepping and the
//! conserved quantities.
//!
//! ```text
//! cargo run --release --example billiard
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twin_billiard::geometry::{Boundary, TableConfig, World};

fn main() -> twin_billiard::Result<()> {
    for boundary in [Boundary::Walls, Boundary::Periodic] {
        let config = TableConfig::with_void_ratio(64, 0.33).boundary(boundary);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut world = World::random(config, &mut rng, 0.0)?;
        let (e0, p0) = (world.kinetic_energy(), world.momentum());

        while world.counters().ball_shocks < 100_000 {
            world.step()?;
        }
        let c = world.counters();
        let p = world.momentum();
        println!("{boundary}: radius {:.2}, packing {:.3}", config.radius, config.void_ratio());
        println!(
            "  t = {:.1}, {} shocks, {} wall hits, {} wraps, {:.1} shocks per ball",
            world.now(),
            c.ball_shocks,
            c.wall_hits,
            c.wraps,
            2.0 * c.ball_shocks as f64 / config.n_balls as f64
        );
        println!(
            "  energy drift {:.2e}, momentum change ({:.2e}, {:.2e}), closest pair gap {:.3e}",
            (world.kinetic_energy() - e0).abs() / e0,
            p.x - p0.x,
            p.y - p0.y,
            world.min_separation()
        );
    }
    Ok(())
}
