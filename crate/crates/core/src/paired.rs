//! Twin billiards offset by ±ε per ball and axis, advanced on one clock until
//! their histories decorrelate.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::collision::displacement;
use crate::geometry::{random_balls, BallState, Boundary, EventKind, TableConfig, Vec2, World};

/// Separation (pixels) beyond which a coupled pair counts as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1.0;

/// Smallest and largest accepted `k` in `ε = 2^-k`.
pub const MIN_EPSILON_EXP: u32 = 5;
pub const MAX_EPSILON_EXP: u32 = 52;

/// Default shock budget per ball before a trial gives up.
pub const DEFAULT_MAX_SHOCKS_PER_BALL: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    /// `k` in `ε = 2^-k` pixels.
    pub epsilon_exp: u32,
    /// Seed of the per-ball, per-axis sign draws.
    pub sign_seed: u64,
}

impl PerturbationSpec {
    pub fn new(epsilon_exp: u32, sign_seed: u64) -> Result<Self> {
        let p = Self {
            epsilon_exp,
            sign_seed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_EPSILON_EXP..=MAX_EPSILON_EXP).contains(&self.epsilon_exp) {
            return Err(Error::Config(format!(
                "epsilon exponent {} outside [{MIN_EPSILON_EXP}, {MAX_EPSILON_EXP}]",
                self.epsilon_exp
            )));
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        (-(self.epsilon_exp as f64)).exp2()
    }

    /// One `[x, y]` sign pair per ball; `true` means `+ε`.
    pub fn signs(&self, n_balls: usize) -> Vec<[bool; 2]> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.sign_seed);
        (0..n_balls).map(|_| [rng.random_bool(0.5), rng.random_bool(0.5)]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceCause {
    /// A coupled pair drifted more than one pixel apart.
    Separation,
    /// A ball met different partners in the two billiards.
    PartnerMismatch,
    /// One billiard ran two or more shocks ahead for the same ball.
    Desynchronized,
}

impl DivergenceCause {
    pub fn as_str(&self) -> &'static str {
        match self {
            DivergenceCause::Separation => "separation",
            DivergenceCause::PartnerMismatch => "partner_mismatch",
            DivergenceCause::Desynchronized => "desynchronized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PairStatus {
    Correlated,
    Diverged {
        ball: usize,
        shock_index: u64,
        cause: DivergenceCause,
    },
    Desynchronized {
        ball: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Diverged,
    MaxShocksReached,
    NumericalAbort,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Diverged => "diverged",
            Termination::MaxShocksReached => "max_shocks_reached",
            Termination::NumericalAbort => "numerical_abort",
        }
    }
}

/// Mean and largest pair separation right after a shock of billiard A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub shocks_per_ball: f64,
    pub mean_dp: f64,
    pub max_dp: f64,
}

/// Outcome of one seeded paired run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub config: TableConfig,
    pub epsilon_exp: u32,
    /// Critical step `N_c`: the shock-per-ball period in which the run
    /// stopped, `ceil(shocks_per_ball)`. At least 1 for a divergence.
    pub critical_step: u32,
    /// Shock counters summed over balls and divided by `N_b` at the stop event.
    pub shocks_per_ball: f64,
    pub total_ball_shocks: u64,
    pub divergence_ball: Option<usize>,
    pub cause: Option<DivergenceCause>,
    pub termination: Termination,
    pub abort_reason: Option<String>,
    pub max_delta_p: f64,
    pub sim_time: f64,
    pub delta_p_trace: Option<Vec<TracePoint>>,
}

impl TrialRecord {
    pub fn diverged(&self) -> bool {
        self.termination == Termination::Diverged
    }
}

/// The same ball's shock seen in both billiards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedShock {
    pub ball: usize,
    pub partner: usize,
    /// 1-based index of this shock in the ball's history.
    pub index: u64,
    /// Velocity before the shock, in billiard A and B.
    pub vin: [Vec2; 2],
    /// Velocity after the shock, in billiard A and B.
    pub vout: [Vec2; 2],
}

impl MatchedShock {
    pub fn v_in_diff(&self) -> f64 {
        (self.vin[0] - self.vin[1]).norm()
    }

    pub fn v_out_diff(&self) -> f64 {
        (self.vout[0] - self.vout[1]).norm()
    }
}

#[derive(Debug, Clone, Copy)]
struct ShockRecord {
    partner: usize,
    vin: Vec2,
    vout: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    A = 0,
    B = 1,
}

/// Two synchronized copies of one billiard.
#[derive(Debug, Clone)]
pub struct PairedWorld {
    world_a: World,
    world_b: World,
    seed: u64,
    epsilon_exp: u32,
    pending: Vec<[VecDeque<ShockRecord>; 2]>,
    matched: Vec<u64>,
    last_dq: Vec<f64>,
    separations: Vec<f64>,
    status: PairStatus,
    record_trace: bool,
    trace: Vec<TracePoint>,
}

/// Build a seeded twin pair: billiard A from `seed`, billiard B with every
/// coordinate shifted by ±ε and identical velocities.
pub fn make_paired(config: TableConfig, perturbation: PerturbationSpec, seed: u64) -> Result<PairedWorld> {
    perturbation.validate()?;
    let eps = perturbation.epsilon();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let balls = random_balls(&config, &mut rng, 3.0 * eps)?;
    let signs = perturbation.signs(config.n_balls);
    let mut pair = PairedWorld::from_balls(config, balls, &signs, eps)?;
    pair.seed = seed;
    pair.epsilon_exp = perturbation.epsilon_exp;
    Ok(pair)
}

impl PairedWorld {
    /// Twin pair from explicit states for billiard A; `epsilon` may be zero.
    pub fn from_balls(
        config: TableConfig,
        balls: Vec<BallState>,
        signs: &[[bool; 2]],
        epsilon: f64,
    ) -> Result<Self> {
        if signs.len() != balls.len() {
            return Err(Error::Config("one sign pair per ball required".into()));
        }
        let shift = |c: f64, plus: bool| {
            let v = if plus { c + epsilon } else { c - epsilon };
            match config.boundary {
                Boundary::Walls => v,
                Boundary::Periodic => v.rem_euclid(config.side),
            }
        };
        let twins: Vec<BallState> = balls
            .iter()
            .zip(signs)
            .map(|(b, s)| BallState {
                pos: Vec2::new(shift(b.pos.x, s[0]), shift(b.pos.y, s[1])),
                ..*b
            })
            .collect();
        let n = balls.len();
        let world_a = World::new(config, balls)?;
        let world_b = World::new(config, twins)?;
        let mut pair = Self {
            world_a,
            world_b,
            seed: 0,
            epsilon_exp: if epsilon > 0.0 { (-epsilon.log2()).round() as u32 } else { 0 },
            pending: (0..n).map(|_| [VecDeque::new(), VecDeque::new()]).collect(),
            matched: vec![0; n],
            last_dq: vec![0.0; n],
            separations: vec![0.0; n],
            status: PairStatus::Correlated,
            record_trace: false,
            trace: Vec::new(),
        };
        pair.refresh_separations();
        Ok(pair)
    }

    /// Keep a per-shock Δp series in the trial record (off by default).
    pub fn with_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    pub fn world_a(&self) -> &World {
        &self.world_a
    }

    pub fn world_b(&self) -> &World {
        &self.world_b
    }

    pub fn status(&self) -> PairStatus {
        self.status
    }

    pub fn n_balls(&self) -> usize {
        self.world_a.balls().len()
    }

    /// Pair separations as of the last shock of billiard A.
    pub fn pair_separations(&self) -> &[f64] {
        &self.separations
    }

    /// Number of ball-ball shocks of `ball` already seen in both billiards.
    pub fn matched_shocks(&self, ball: usize) -> u64 {
        self.matched[ball]
    }

    /// Distance between the two copies of `ball` at the later of the two
    /// billiard clocks; the lagging copy is flown freely to that time.
    pub fn delta_p(&self, ball: usize) -> f64 {
        let t = self.world_a.now().max(self.world_b.now());
        let a = &self.world_a.balls()[ball];
        let b = &self.world_b.balls()[ball];
        let pa = a.position_at(t - self.world_a.now());
        let pb = b.position_at(t - self.world_b.now());
        displacement(pa, pb, self.world_a.config()).norm()
    }

    /// `|v_A - v_B|` of `ball` right after its last shock seen in both
    /// billiards; zero before the first one.
    pub fn delta_q_at_shock(&self, ball: usize) -> f64 {
        self.last_dq[ball]
    }

    fn refresh_separations(&mut self) -> (f64, usize, f64) {
        let mut max = 0.0;
        let mut arg = 0;
        let mut sum = 0.0;
        for i in 0..self.n_balls() {
            let d = self.delta_p(i);
            self.separations[i] = d;
            sum += d;
            if d > max {
                max = d;
                arg = i;
            }
        }
        (max, arg, sum / self.n_balls() as f64)
    }

    fn shocks_per_ball(&self) -> f64 {
        self.world_a.total_ball_shock_count() as f64 / self.n_balls() as f64
    }

    /// Advance until divergence or until `max_shocks_per_ball` is spent.
    pub fn run_until_divergence(&mut self, max_shocks_per_ball: f64) -> TrialRecord {
        self.run_observed(max_shocks_per_ball, &mut |_| {})
    }

    /// As [`PairedWorld::run_until_divergence`], handing every matched shock to `observer`.
    pub fn run_observed(
        &mut self,
        max_shocks_per_ball: f64,
        observer: &mut dyn FnMut(&MatchedShock),
    ) -> TrialRecord {
        match self.drive(max_shocks_per_ball, observer) {
            Ok(termination) => self.record(termination, None),
            Err(e) => self.record(Termination::NumericalAbort, Some(e.to_string())),
        }
    }

    fn drive(
        &mut self,
        max_shocks_per_ball: f64,
        observer: &mut dyn FnMut(&MatchedShock),
    ) -> Result<Termination> {
        if self.status != PairStatus::Correlated {
            return Ok(Termination::Diverged);
        }
        loop {
            let ta = self.world_a.peek_time()?;
            let tb = self.world_b.peek_time()?;
            let side = match (ta, tb) {
                (None, None) => return Ok(Termination::MaxShocksReached),
                (Some(_), None) => Side::A,
                (None, Some(_)) => Side::B,
                (Some(a), Some(b)) => {
                    if b < a {
                        Side::B
                    } else {
                        Side::A
                    }
                }
            };
            let world = match side {
                Side::A => &mut self.world_a,
                Side::B => &mut self.world_b,
            };
            let Some(step) = world.step()? else {
                continue;
            };
            let (EventKind::BallBall { i, j }, Some(shock)) = (step.event.kind, step.shock) else {
                continue;
            };
            self.note_shock(side, i, j, shock.vin[0], shock.vout[0], observer);
            if self.status == PairStatus::Correlated {
                self.note_shock(side, j, i, shock.vin[1], shock.vout[1], observer);
            }
            if self.status != PairStatus::Correlated {
                return Ok(Termination::Diverged);
            }
            if side == Side::A {
                let (max, arg, mean) = self.refresh_separations();
                let spb = self.shocks_per_ball();
                if self.record_trace {
                    self.trace.push(TracePoint {
                        shocks_per_ball: spb,
                        mean_dp: mean,
                        max_dp: max,
                    });
                }
                if max > DIVERGENCE_THRESHOLD {
                    self.status = PairStatus::Diverged {
                        ball: arg,
                        shock_index: self.world_a.balls()[arg].shocks,
                        cause: DivergenceCause::Separation,
                    };
                    return Ok(Termination::Diverged);
                }
                if spb >= max_shocks_per_ball {
                    return Ok(Termination::MaxShocksReached);
                }
            }
        }
    }

    fn note_shock(
        &mut self,
        side: Side,
        ball: usize,
        partner: usize,
        vin: Vec2,
        vout: Vec2,
        observer: &mut dyn FnMut(&MatchedShock),
    ) {
        let own = side as usize;
        let other = 1 - own;
        let rec = ShockRecord { partner, vin, vout };
        if let Some(twin) = self.pending[ball][other].pop_front() {
            if twin.partner != partner {
                self.status = PairStatus::Diverged {
                    ball,
                    shock_index: self.matched[ball] + 1,
                    cause: DivergenceCause::PartnerMismatch,
                };
                return;
            }
            self.matched[ball] += 1;
            let (a, b) = if side == Side::A { (rec, twin) } else { (twin, rec) };
            let m = MatchedShock {
                ball,
                partner,
                index: self.matched[ball],
                vin: [a.vin, b.vin],
                vout: [a.vout, b.vout],
            };
            self.last_dq[ball] = m.v_out_diff();
            observer(&m);
        } else {
            let queue = &mut self.pending[ball][own];
            queue.push_back(rec);
            if queue.len() >= 2 {
                self.status = PairStatus::Desynchronized { ball };
            }
        }
    }

    fn record(&mut self, termination: Termination, abort_reason: Option<String>) -> TrialRecord {
        let spb = self.shocks_per_ball();
        let (ball, cause) = match self.status {
            PairStatus::Correlated => (None, None),
            PairStatus::Diverged { ball, cause, .. } => (Some(ball), Some(cause)),
            PairStatus::Desynchronized { ball } => (Some(ball), Some(DivergenceCause::Desynchronized)),
        };
        let critical_step = match termination {
            Termination::Diverged => (spb.ceil() as u32).max(1),
            _ => spb.ceil() as u32,
        };
        TrialRecord {
            seed: self.seed,
            config: *self.world_a.config(),
            epsilon_exp: self.epsilon_exp,
            critical_step,
            shocks_per_ball: spb,
            total_ball_shocks: self.world_a.counters().ball_shocks,
            divergence_ball: ball,
            cause,
            termination,
            abort_reason,
            max_delta_p: self.separations.iter().copied().fold(0.0, f64::max),
            sim_time: self.world_a.now(),
            delta_p_trace: self.record_trace.then(|| std::mem::take(&mut self.trace)),
        }
    }
}

/// Seeded paired trial, start to finish.
pub fn run_trial(
    config: TableConfig,
    perturbation: PerturbationSpec,
    seed: u64,
    max_shocks_per_ball: f64,
    record_trace: bool,
) -> TrialRecord {
    match make_paired(config, perturbation, seed) {
        Ok(pair) => pair
            .with_trace(record_trace)
            .run_until_divergence(max_shocks_per_ball),
        Err(e) => TrialRecord {
            seed,
            config,
            epsilon_exp: perturbation.epsilon_exp,
            critical_step: 0,
            shocks_per_ball: 0.0,
            total_ball_shocks: 0,
            divergence_ball: None,
            cause: None,
            termination: Termination::NumericalAbort,
            abort_reason: Some(e.to_string()),
            max_delta_p: 0.0,
            sim_time: 0.0,
            delta_p_trace: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twin_offsets_follow_signs() {
        let cfg = TableConfig::new(2, 16.0);
        let balls = vec![
            BallState::new(0, Vec2::new(100.0, 200.0), Vec2::new(1.0, 0.0)),
            BallState::new(1, Vec2::new(3000.0, 3000.0), Vec2::new(0.0, 1.0)),
        ];
        let eps = (-35f64).exp2();
        let pair = PairedWorld::from_balls(cfg, balls, &[[true, false], [false, true]], eps).unwrap();
        let twin = pair.world_b().balls()[0];
        assert_eq!(twin.pos, Vec2::new(100.0 + eps, 200.0 - eps));
        assert_eq!(twin.vel, pair.world_a().balls()[0].vel);
    }

    #[test]
    fn initial_separation_is_eps_root_two() {
        let cfg = TableConfig::with_void_ratio(32, 0.2);
        let p = PerturbationSpec::new(5, 3).unwrap();
        let pair = make_paired(cfg, p, 11).unwrap();
        let expected = (-5f64).exp2() * 2f64.sqrt();
        for i in 0..32 {
            assert!((pair.delta_p(i) - expected).abs() < 1e-12);
            assert_eq!(pair.delta_q_at_shock(i), 0.0);
        }
    }

    #[test]
    fn perturbation_range_is_enforced() {
        assert!(PerturbationSpec::new(4, 0).is_err());
        assert!(PerturbationSpec::new(53, 0).is_err());
        assert!(PerturbationSpec::new(45, 0).is_ok());
    }

    #[test]
    fn identical_twins_never_diverge() {
        let cfg = TableConfig::new(2, 16.0);
        let balls = vec![
            BallState::new(0, Vec2::new(1000.0, 2048.0), Vec2::new(1.0, 0.0)),
            BallState::new(1, Vec2::new(3000.0, 2048.0), Vec2::new(-1.0, 0.0)),
        ];
        let mut pair = PairedWorld::from_balls(cfg, balls, &[[true, true], [true, true]], 0.0).unwrap();
        let rec = pair.run_until_divergence(50.0);
        assert_eq!(rec.termination, Termination::MaxShocksReached);
        assert_eq!(rec.max_delta_p, 0.0);
        assert!(rec.shocks_per_ball >= 50.0);
    }

    #[test]
    fn same_seed_same_record() {
        let cfg = TableConfig::with_void_ratio(32, 0.33);
        let p = PerturbationSpec::new(20, 9).unwrap();
        let a = run_trial(cfg, p, 5, 200.0, true);
        let b = run_trial(cfg, p, 5, 200.0, true);
        assert_eq!(a, b);
        assert!(a.diverged());
        assert!(a.critical_step >= 1);
    }
}
