use std::f64::consts::TAU;

use rand::Rng;

use super::collision::{
    displacement, elastic_exchange, time_to_ball_collision, time_to_ball_collision_periodic,
    time_to_wall_collision, time_to_wrap, walls_in_contact, wrap, OVERLAP_TOL, TIE_WINDOW,
};
use super::event::{EventQueue, Scheduled};
use super::{BallState, Boundary, CollisionEvent, EventKind, TableConfig, Vec2};
use crate::error::{Error, Result};

/// Rejection-sampling attempts per disk before placement is declared impossible.
const PLACEMENT_ATTEMPTS: usize = 200_000;

/// Velocities of the two disks just before and just after a ball-ball shock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockDetail {
    pub vin: [Vec2; 2],
    pub vout: [Vec2; 2],
}

/// One processed event. `shock` is set for ball-ball events that exchanged
/// momentum, and is `None` for a ball-ball event skipped as already separating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub event: CollisionEvent,
    pub shock: Option<ShockDetail>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WorldCounters {
    pub ball_shocks: u64,
    pub wall_hits: u64,
    pub wraps: u64,
    pub skipped: u64,
}

enum Validity {
    Valid,
    OwnerStale,
    PartnerStale,
}

/// Event-driven billiard of identical hard disks.
///
/// Every ball holds at most one live prediction in the queue (its earliest
/// event). A prediction is invalidated by bumping the trajectory epoch of a
/// ball it involves; a popped prediction whose partner moved on triggers a
/// fresh prediction for its owner.
#[derive(Debug, Clone)]
pub struct World {
    config: TableConfig,
    balls: Vec<BallState>,
    now: f64,
    epochs: Vec<u64>,
    queue: EventQueue,
    staged: Option<Scheduled>,
    counters: WorldCounters,
}

impl World {
    /// Build a world from explicit ball states. Ids are reassigned to match
    /// vector positions.
    pub fn new(config: TableConfig, mut balls: Vec<BallState>) -> Result<Self> {
        config.validate()?;
        if balls.len() != config.n_balls {
            return Err(Error::Config(format!(
                "expected {} balls, got {}",
                config.n_balls,
                balls.len()
            )));
        }
        for (id, b) in balls.iter_mut().enumerate() {
            b.id = id;
            if !(b.pos.is_finite() && b.vel.is_finite()) {
                return Err(Error::Config(format!("ball {id} has a non-finite state")));
            }
            let (lo, hi) = match config.boundary {
                Boundary::Walls => (config.radius - OVERLAP_TOL, config.side - config.radius + OVERLAP_TOL),
                Boundary::Periodic => (0.0, config.side),
            };
            if b.pos.x < lo || b.pos.x > hi || b.pos.y < lo || b.pos.y > hi {
                return Err(Error::Config(format!("ball {id} at {} lies outside the table", b.pos)));
            }
        }
        let contact = 2.0 * config.radius;
        for i in 0..balls.len() {
            for j in i + 1..balls.len() {
                let sep = displacement(balls[i].pos, balls[j].pos, &config).norm();
                if sep < contact - OVERLAP_TOL {
                    return Err(Error::Overlap {
                        i,
                        j,
                        separation: sep,
                        contact,
                    });
                }
            }
        }
        let n = balls.len();
        let mut world = Self {
            config,
            balls,
            now: 0.0,
            epochs: vec![0; n],
            queue: EventQueue::default(),
            staged: None,
            counters: WorldCounters::default(),
        };
        world.schedule_all()?;
        Ok(world)
    }

    /// Random non-overlapping placement with unit speeds in uniformly random
    /// directions. `clearance` pixels of extra room are kept between disks and
    /// between disks and walls.
    pub fn random<R: Rng + ?Sized>(config: TableConfig, rng: &mut R, clearance: f64) -> Result<Self> {
        let balls = random_balls(&config, rng, clearance)?;
        Self::new(config, balls)
    }

    pub fn config(&self) -> &TableConfig {
        &self.config
    }

    pub fn balls(&self) -> &[BallState] {
        &self.balls
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn counters(&self) -> WorldCounters {
        self.counters
    }

    /// Sum of the per-ball shock counters.
    pub fn total_ball_shock_count(&self) -> u64 {
        self.balls.iter().map(|b| b.shocks).sum()
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.balls.iter().map(|b| b.vel.norm_sq()).sum::<f64>()
    }

    pub fn momentum(&self) -> Vec2 {
        self.balls.iter().fold(Vec2::ZERO, |acc, b| acc + b.vel)
    }

    /// Smallest centre distance over all pairs (minimum image when periodic).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.balls.len() {
            for j in i + 1..self.balls.len() {
                let d = displacement(self.balls[i].pos, self.balls[j].pos, &self.config).norm();
                best = best.min(d);
            }
        }
        best
    }

    /// Absolute time of the next event, if any.
    pub fn peek_time(&mut self) -> Result<Option<f64>> {
        if self.staged.is_none() {
            self.staged = self.next_event()?;
        }
        Ok(self.staged.map(|s| s.event.time))
    }

    /// Process the next event.
    pub fn step(&mut self) -> Result<Option<Step>> {
        let next = match self.staged.take() {
            Some(s) => Some(s),
            None => self.next_event()?,
        };
        match next {
            Some(s) => self.apply(s).map(Some),
            None => Ok(None),
        }
    }

    /// Process every event up to `now + duration`, then fly freely to that time.
    pub fn advance(&mut self, duration: f64) -> Result<()> {
        let target = self.now + duration;
        while let Some(t) = self.peek_time()? {
            if t > target {
                break;
            }
            self.step()?;
        }
        self.drift_to(target);
        Ok(())
    }

    /// Free flight of every ball up to absolute time `t`. Events before `t`
    /// are not processed; callers must check [`World::peek_time`] first.
    pub fn drift_to(&mut self, t: f64) {
        let dt = t - self.now;
        if dt <= 0.0 {
            return;
        }
        for b in &mut self.balls {
            b.pos += b.vel * dt;
        }
        self.now = t;
    }

    /// Negate every velocity and rebuild the event queue.
    pub fn reverse_velocities(&mut self) -> Result<()> {
        for b in &mut self.balls {
            b.vel = -b.vel;
        }
        for e in &mut self.epochs {
            *e += 1;
        }
        self.queue.clear();
        self.staged = None;
        self.schedule_all()
    }

    fn schedule_all(&mut self) -> Result<()> {
        for i in 0..self.balls.len() {
            self.schedule(i)?;
        }
        Ok(())
    }

    fn pair_time(&self, i: usize, k: usize) -> Result<Option<f64>> {
        let (a, b) = (&self.balls[i], &self.balls[k]);
        match self.config.boundary {
            Boundary::Walls => time_to_ball_collision(a, b, self.config.radius),
            Boundary::Periodic => {
                time_to_ball_collision_periodic(a, b, self.config.radius, self.config.side)
            }
        }
    }

    /// Predict the earliest event of ball `i` from the current state.
    fn schedule(&mut self, i: usize) -> Result<()> {
        let mut best: Option<(f64, EventKind, Option<usize>)> = None;
        let better = |best: &Option<(f64, EventKind, Option<usize>)>, t: f64, kind: &EventKind| match best {
            None => true,
            Some((bt, bk, _)) => t < *bt || (t == *bt && kind.tie_order(bk).is_lt()),
        };
        for k in 0..self.balls.len() {
            if k == i {
                continue;
            }
            if let Some(t) = self.pair_time(i, k)? {
                let kind = EventKind::BallBall { i, j: k };
                if better(&best, t, &kind) {
                    best = Some((t, kind, Some(k)));
                }
            }
        }
        let ball = &self.balls[i];
        let boundary = match self.config.boundary {
            Boundary::Walls => time_to_wall_collision(ball, &self.config)
                .map(|(t, wall)| (t, EventKind::BallWall { ball: i, wall })),
            Boundary::Periodic => time_to_wrap(ball, self.config.side)
                .map(|(t, axis)| (t, EventKind::Wrap { ball: i, axis })),
        };
        if let Some((t, kind)) = boundary {
            if better(&best, t, &kind) {
                best = Some((t, kind, None));
            }
        }
        if let Some((dt, kind, partner)) = best {
            self.queue.push(Scheduled {
                event: CollisionEvent {
                    time: self.now + dt,
                    kind,
                },
                owner: i,
                owner_epoch: self.epochs[i],
                partner: partner.map(|k| (k, self.epochs[k])),
            });
        }
        Ok(())
    }

    fn validity(&self, s: &Scheduled) -> Validity {
        if self.epochs[s.owner] != s.owner_epoch {
            return Validity::OwnerStale;
        }
        match s.partner {
            Some((k, e)) if self.epochs[k] != e => Validity::PartnerStale,
            _ => Validity::Valid,
        }
    }

    fn pop_valid(&mut self) -> Result<Option<Scheduled>> {
        while let Some(s) = self.queue.pop() {
            match self.validity(&s) {
                Validity::Valid => return Ok(Some(s)),
                Validity::OwnerStale => {}
                Validity::PartnerStale => self.schedule(s.owner)?,
            }
        }
        Ok(None)
    }

    /// Earliest valid event; among events within [`TIE_WINDOW`] of it, the one
    /// with the lowest (kind, lowest ball index) wins.
    fn next_event(&mut self) -> Result<Option<Scheduled>> {
        'outer: loop {
            let Some(first) = self.pop_valid()? else {
                return Ok(None);
            };
            let mut candidates = vec![first];
            while let Some(top) = self.queue.peek() {
                if top.event.time - first.event.time >= TIE_WINDOW {
                    break;
                }
                let top = self.queue.pop().expect("peeked");
                match self.validity(&top) {
                    Validity::Valid => candidates.push(top),
                    Validity::OwnerStale => {}
                    Validity::PartnerStale => {
                        self.schedule(top.owner)?;
                        for c in candidates {
                            self.queue.push(c);
                        }
                        continue 'outer;
                    }
                }
            }
            let best = candidates
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    a.event
                        .kind
                        .tie_order(&b.event.kind)
                        .then(a.event.time.total_cmp(&b.event.time))
                })
                .map(|(idx, _)| idx)
                .expect("non-empty");
            let chosen = candidates.swap_remove(best);
            for c in candidates {
                self.queue.push(c);
            }
            return Ok(Some(chosen));
        }
    }

    fn apply(&mut self, s: Scheduled) -> Result<Step> {
        let t = s.event.time.max(self.now);
        self.drift_to(t);
        let mut shock = None;
        match s.event.kind {
            EventKind::BallBall { i, j } => {
                let d = displacement(self.balls[i].pos, self.balls[j].pos, &self.config);
                let contact = 2.0 * self.config.radius;
                let sep = d.norm();
                if sep < contact - OVERLAP_TOL {
                    return Err(Error::Overlap {
                        i,
                        j,
                        separation: sep,
                        contact,
                    });
                }
                let vin = [self.balls[i].vel, self.balls[j].vel];
                match elastic_exchange(vin[0], vin[1], d) {
                    Some((va, vb)) => {
                        self.balls[i].vel = va;
                        self.balls[j].vel = vb;
                        self.balls[i].shocks += 1;
                        self.balls[j].shocks += 1;
                        self.counters.ball_shocks += 1;
                        self.epochs[i] += 1;
                        self.epochs[j] += 1;
                        shock = Some(ShockDetail { vin, vout: [va, vb] });
                        self.schedule(i)?;
                        self.schedule(j)?;
                    }
                    None => {
                        self.counters.skipped += 1;
                        self.epochs[i] += 1;
                        self.schedule(i)?;
                    }
                }
            }
            EventKind::BallWall { ball, wall } => {
                let contacts = walls_in_contact(&self.balls[ball], &self.config);
                let b = &mut self.balls[ball];
                let axis = wall.axis();
                let flipped = -axis.get(b.vel);
                axis.set(&mut b.vel, flipped);
                for w in contacts.into_iter().flatten() {
                    let other = w.axis();
                    if other != axis {
                        let flipped = -other.get(b.vel);
                        other.set(&mut b.vel, flipped);
                    }
                }
                if self.config.count_wall_shocks {
                    b.shocks += 1;
                }
                self.counters.wall_hits += 1;
                self.epochs[ball] += 1;
                self.schedule(ball)?;
            }
            EventKind::Wrap { ball, axis } => {
                self.balls[ball] = wrap(&self.balls[ball], axis, self.config.side);
                self.counters.wraps += 1;
                self.epochs[ball] += 1;
                self.schedule(ball)?;
            }
        }
        Ok(Step {
            event: CollisionEvent {
                time: t,
                kind: s.event.kind,
            },
            shock,
        })
    }
}

/// Uniform rejection sampling of `config.n_balls` disks with unit-speed
/// velocities in uniformly random directions.
pub fn random_balls<R: Rng + ?Sized>(
    config: &TableConfig,
    rng: &mut R,
    clearance: f64,
) -> Result<Vec<BallState>> {
    config.validate()?;
    let r = config.radius;
    let (lo, hi) = match config.boundary {
        Boundary::Walls => (r + clearance, config.side - r - clearance),
        Boundary::Periodic => (0.0, config.side),
    };
    if hi <= lo {
        return Err(Error::Config("clearance leaves no room on the table".into()));
    }
    let min_sep = 2.0 * r + clearance;
    let mut balls: Vec<BallState> = Vec::with_capacity(config.n_balls);
    for id in 0..config.n_balls {
        let mut placed = None;
        for _ in 0..PLACEMENT_ATTEMPTS {
            let p = Vec2::new(rng.random_range(lo..hi), rng.random_range(lo..hi));
            let free = balls
                .iter()
                .all(|b| displacement(b.pos, p, config).norm_sq() >= min_sep * min_sep);
            if free {
                placed = Some(p);
                break;
            }
        }
        let Some(pos) = placed else {
            return Err(Error::Placement {
                placed: balls.len(),
                wanted: config.n_balls,
            });
        };
        let vel = Vec2::from_angle(rng.random_range(0.0..TAU));
        balls.push(BallState::new(id, pos, vel));
    }
    Ok(balls)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_ball_table() -> TableConfig {
        TableConfig::new(2, 16.0)
    }

    #[test]
    fn single_flight_is_exact() {
        let cfg = TableConfig::new(2, 16.0);
        let balls = vec![
            BallState::new(0, Vec2::new(1000.0, 1000.0), Vec2::new(0.5, 0.25)),
            BallState::new(1, Vec2::new(3000.0, 3000.0), Vec2::new(0.0, 0.0)),
        ];
        let mut w = World::new(cfg, balls).unwrap();
        w.advance(100.0).unwrap();
        assert_eq!(w.balls()[0].pos, Vec2::new(1050.0, 1025.0));
        assert_eq!(w.counters(), WorldCounters::default());
    }

    #[test]
    fn head_on_pair_swaps() {
        let balls = vec![
            BallState::new(0, Vec2::new(1000.0, 2048.0), Vec2::new(1.0, 0.0)),
            BallState::new(1, Vec2::new(1100.0, 2048.0), Vec2::new(-1.0, 0.0)),
        ];
        let mut w = World::new(two_ball_table(), balls).unwrap();
        w.advance(50.0).unwrap();
        assert_eq!(w.balls()[0].vel, Vec2::new(-1.0, 0.0));
        assert_eq!(w.balls()[1].vel, Vec2::new(1.0, 0.0));
        assert_eq!(w.counters().ball_shocks, 1);
        assert_eq!(w.balls()[0].shocks, 1);
    }

    #[test]
    fn corner_hit_reflects_both_components() {
        let balls = vec![
            BallState::new(0, Vec2::new(4000.0, 4000.0), Vec2::new(1.0, 1.0)),
            BallState::new(1, Vec2::new(100.0, 100.0), Vec2::new(0.0, 0.0)),
        ];
        let mut w = World::new(two_ball_table(), balls).unwrap();
        let step = w.step().unwrap().unwrap();
        assert!((step.event.time - 80.0).abs() < 1e-12);
        assert_eq!(w.balls()[0].vel, Vec2::new(-1.0, -1.0));
        // one event, not two
        assert_eq!(w.counters().wall_hits, 1);
        assert_eq!(w.balls()[0].shocks, 0);
    }

    #[test]
    fn wall_shocks_counted_on_request() {
        let mut cfg = two_ball_table();
        cfg.count_wall_shocks = true;
        let balls = vec![
            BallState::new(0, Vec2::new(100.0, 2048.0), Vec2::new(-1.0, 0.0)),
            BallState::new(1, Vec2::new(3000.0, 3000.0), Vec2::new(0.0, 0.0)),
        ];
        let mut w = World::new(cfg, balls).unwrap();
        w.advance(90.0).unwrap();
        assert_eq!(w.balls()[0].shocks, 1);
        assert_eq!(w.balls()[0].vel, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn periodic_wrap_keeps_velocity() {
        let cfg = two_ball_table().boundary(Boundary::Periodic);
        let balls = vec![
            BallState::new(0, Vec2::new(4090.0, 2048.0), Vec2::new(1.0, 0.0)),
            BallState::new(1, Vec2::new(2000.0, 100.0), Vec2::new(0.0, 0.0)),
        ];
        let mut w = World::new(cfg, balls).unwrap();
        w.advance(10.0).unwrap();
        assert!((w.balls()[0].pos.x - 4.0).abs() < 1e-9);
        assert_eq!(w.balls()[0].vel, Vec2::new(1.0, 0.0));
        assert_eq!(w.counters().wraps, 1);
        assert_eq!(w.balls()[0].shocks, 0);
    }

    #[test]
    fn random_worlds_are_reproducible() {
        use rand::SeedableRng;
        let cfg = TableConfig::with_void_ratio(64, 0.3);
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut a = World::random(cfg, &mut r1, 0.0).unwrap();
        let mut b = World::random(cfg, &mut r2, 0.0).unwrap();
        a.advance(500.0).unwrap();
        b.advance(500.0).unwrap();
        assert_eq!(a.balls(), b.balls());
        assert!(a.min_separation() >= 2.0 * cfg.radius - 1e-6);
    }

    #[test]
    fn overlapping_start_is_rejected() {
        let balls = vec![
            BallState::new(0, Vec2::new(100.0, 100.0), Vec2::new(1.0, 0.0)),
            BallState::new(1, Vec2::new(110.0, 100.0), Vec2::new(0.0, 0.0)),
        ];
        assert!(matches!(World::new(two_ball_table(), balls), Err(Error::Overlap { .. })));
    }
}
