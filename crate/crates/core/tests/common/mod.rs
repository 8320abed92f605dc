#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twin_billiard::geometry::{random_balls, BallState, TableConfig, Vec2, World};

/// Brute-force reference integrator: fixed time steps, with each contact
/// located by bisection on the step in which an overlap first appears.
///
/// Positions are kept relative to the last contact so that repeated small
/// steps do not accumulate rounding.
pub struct FixedStepOracle {
    pub pos: Vec<[f64; 2]>,
    pub vel: Vec<[f64; 2]>,
    pub radius: f64,
    pub side: f64,
    pub t: f64,
    pub dt: f64,
    pub contacts: usize,
    base: Vec<[f64; 2]>,
    t_base: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Contact {
    Pair(usize, usize),
    Wall(usize, usize, f64),
}

impl FixedStepOracle {
    pub fn new(balls: &[BallState], radius: f64, side: f64, dt: f64) -> Self {
        Self {
            pos: balls.iter().map(|b| [b.pos.x, b.pos.y]).collect(),
            vel: balls.iter().map(|b| [b.vel.x, b.vel.y]).collect(),
            radius,
            side,
            t: 0.0,
            dt,
            contacts: 0,
            base: balls.iter().map(|b| [b.pos.x, b.pos.y]).collect(),
            t_base: 0.0,
        }
    }

    /// Position of ball `i` a flight `tau` after the current time.
    fn at(&self, i: usize, tau: f64) -> [f64; 2] {
        let dt = (self.t - self.t_base) + tau;
        [self.base[i][0] + self.vel[i][0] * dt, self.base[i][1] + self.vel[i][1] * dt]
    }

    /// Approaching contacts that are violated after a flight of `tau`.
    fn violations(&self, tau: f64) -> Vec<Contact> {
        let n = self.pos.len();
        let r = self.radius;
        let mut out = Vec::new();
        for i in 0..n {
            let p = self.at(i, tau);
            for axis in 0..2 {
                if p[axis] < r && self.vel[i][axis] < 0.0 {
                    out.push(Contact::Wall(i, axis, r));
                }
                if p[axis] > self.side - r && self.vel[i][axis] > 0.0 {
                    out.push(Contact::Wall(i, axis, self.side - r));
                }
            }
            for j in i + 1..n {
                let q = self.at(j, tau);
                let d = [q[0] - p[0], q[1] - p[1]];
                let v = [self.vel[j][0] - self.vel[i][0], self.vel[j][1] - self.vel[i][1]];
                if d[0] * d[0] + d[1] * d[1] < 4.0 * r * r && d[0] * v[0] + d[1] * v[1] < 0.0 {
                    out.push(Contact::Pair(i, j));
                }
            }
        }
        out
    }

    fn fly(&mut self, tau: f64) {
        for i in 0..self.pos.len() {
            self.pos[i] = self.at(i, tau);
        }
        self.t += tau;
    }

    fn rebase(&mut self) {
        self.base.clone_from(&self.pos);
        self.t_base = self.t;
    }

    fn resolve(&mut self, c: Contact) {
        match c {
            Contact::Wall(i, axis, _) => self.vel[i][axis] = -self.vel[i][axis],
            Contact::Pair(i, j) => {
                let d = [self.pos[j][0] - self.pos[i][0], self.pos[j][1] - self.pos[i][1]];
                let dd = d[0] * d[0] + d[1] * d[1];
                let v = [self.vel[j][0] - self.vel[i][0], self.vel[j][1] - self.vel[i][1]];
                let s = (d[0] * v[0] + d[1] * v[1]) / dd;
                for a in 0..2 {
                    self.vel[i][a] += s * d[a];
                    self.vel[j][a] -= s * d[a];
                }
            }
        }
        self.contacts += 1;
    }

    /// Integrate up to absolute time `t_end`.
    pub fn run_to(&mut self, t_end: f64) {
        while self.t < t_end {
            let step = self.dt.min(t_end - self.t);
            if self.violations(step).is_empty() {
                self.fly(step);
                continue;
            }
            let (mut lo, mut hi) = (0.0, step);
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.violations(mid).is_empty() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let found = self.violations(hi);
            self.fly(hi);
            self.rebase();
            for c in found {
                self.resolve(c);
            }
        }
    }
}

pub fn seeded_world(config: TableConfig, seed: u64) -> World {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    World::random(config, &mut rng, 0.0).expect("placement succeeds")
}

pub fn seeded_balls(config: &TableConfig, seed: u64) -> Vec<BallState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_balls(config, &mut rng, 0.0).expect("placement succeeds")
}

pub fn max_coordinate_gap(world: &World, oracle: &FixedStepOracle) -> f64 {
    world
        .balls()
        .iter()
        .zip(&oracle.pos)
        .map(|(b, p)| (b.pos.x - p[0]).abs().max((b.pos.y - p[1]).abs()))
        .fold(0.0, f64::max)
}

pub fn relative_drift(a: f64, b: f64) -> f64 {
    ((a - b) / a).abs()
}

pub fn vec_drift(a: Vec2, b: Vec2, scale: f64) -> f64 {
    (a - b).norm() / scale
}
