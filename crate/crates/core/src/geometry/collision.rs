//! Time-of-impact and collision-resolution kernels for equal-mass hard disks.

use serde::{Deserialize, Serialize};

use super::{BallState, Boundary, TableConfig, Vec2};
use crate::error::{Error, Result};

/// Slack on the `|Δpos| = 2R` contact predicate, in pixels.
pub const CONTACT_TOL: f64 = 1e-9;
/// Interpenetration beyond this depth (pixels) is a numerical failure.
pub const OVERLAP_TOL: f64 = 1e-6;
/// Events closer than this in time are treated as simultaneous.
pub const TIE_WINDOW: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WallId {
    /// x = R
    Left = 0,
    /// x = L - R
    Right = 1,
    /// y = R
    Bottom = 2,
    /// y = L - R
    Top = 3,
}

impl WallId {
    pub fn axis(self) -> Axis {
        match self {
            WallId::Left | WallId::Right => Axis::X,
            WallId::Bottom | WallId::Top => Axis::Y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X = 0,
    Y = 1,
}

impl Axis {
    #[inline]
    pub fn get(self, v: Vec2) -> f64 {
        match self {
            Axis::X => v.x,
            Axis::Y => v.y,
        }
    }

    #[inline]
    pub fn set(self, v: &mut Vec2, value: f64) {
        match self {
            Axis::X => v.x = value,
            Axis::Y => v.y = value,
        }
    }
}

pub(crate) enum Impact {
    Never,
    At(f64),
    Overlap(f64),
}

/// Smallest `t ≥ 0` with `|d + t·v| = contact`, where `d` and `v` are the
/// relative displacement and velocity of the second disk seen from the first.
pub(crate) fn impact_time(d: Vec2, v: Vec2, contact: f64) -> Impact {
    let b = d.dot(v);
    let dd = d.norm_sq();
    let c = dd - contact * contact;
    if c < 0.0 {
        let separation = dd.sqrt();
        if separation < contact - OVERLAP_TOL {
            return Impact::Overlap(separation);
        }
    }
    if b >= 0.0 {
        return Impact::Never;
    }
    if c <= 0.0 {
        return Impact::At(0.0);
    }
    let vv = v.norm_sq();
    let disc = b * b - vv * c;
    if disc < 0.0 {
        return Impact::Never;
    }
    // c / (-b + sqrt(disc)) is the small root without cancellation
    Impact::At(c / (-b + disc.sqrt()))
}

/// Time until two free disks of radius `radius` touch, or `None` if they never do.
pub fn time_to_ball_collision(a: &BallState, b: &BallState, radius: f64) -> Result<Option<f64>> {
    match impact_time(b.pos - a.pos, b.vel - a.vel, 2.0 * radius) {
        Impact::Never => Ok(None),
        Impact::At(t) => Ok(Some(t)),
        Impact::Overlap(separation) => Err(Error::Overlap {
            i: a.id,
            j: b.id,
            separation,
            contact: 2.0 * radius,
        }),
    }
}

/// Same as [`time_to_ball_collision`] on a torus of side `side`: every
/// neighbouring image of `b` is tried and the earliest contact wins.
pub fn time_to_ball_collision_periodic(
    a: &BallState,
    b: &BallState,
    radius: f64,
    side: f64,
) -> Result<Option<f64>> {
    let v = b.vel - a.vel;
    let base = b.pos - a.pos;
    let mut best: Option<f64> = None;
    for mx in [-1.0, 0.0, 1.0] {
        for my in [-1.0, 0.0, 1.0] {
            let d = base + Vec2::new(mx * side, my * side);
            match impact_time(d, v, 2.0 * radius) {
                Impact::Never => {}
                Impact::At(t) => {
                    if best.is_none_or(|tb| t < tb) {
                        best = Some(t);
                    }
                }
                Impact::Overlap(separation) => {
                    return Err(Error::Overlap {
                        i: a.id,
                        j: b.id,
                        separation,
                        contact: 2.0 * radius,
                    })
                }
            }
        }
    }
    Ok(best)
}

/// Minimum-image representative of a displacement on a torus of side `side`.
#[inline]
pub fn minimum_image(d: Vec2, side: f64) -> Vec2 {
    let wrap = |c: f64| c - side * (c / side).round();
    Vec2::new(wrap(d.x), wrap(d.y))
}

fn wall_time_on_axis(pos: f64, vel: f64, radius: f64, side: f64) -> Option<(f64, bool)> {
    if vel < 0.0 {
        Some((((pos - radius) / -vel).max(0.0), false))
    } else if vel > 0.0 {
        Some((((side - radius - pos) / vel).max(0.0), true))
    } else {
        None
    }
}

/// Earliest time at which `a` touches one of the four borders.
///
/// When the two axes are reached together (within [`TIE_WINDOW`]) the wall
/// with the lower [`WallId`] is reported.
pub fn time_to_wall_collision(a: &BallState, table: &TableConfig) -> Option<(f64, WallId)> {
    let x = wall_time_on_axis(a.pos.x, a.vel.x, table.radius, table.side)
        .map(|(t, hi)| (t, if hi { WallId::Right } else { WallId::Left }));
    let y = wall_time_on_axis(a.pos.y, a.vel.y, table.radius, table.side)
        .map(|(t, hi)| (t, if hi { WallId::Top } else { WallId::Bottom }));
    match (x, y) {
        (None, None) => None,
        (Some(e), None) | (None, Some(e)) => Some(e),
        (Some(ex), Some(ey)) => {
            if (ex.0 - ey.0).abs() < TIE_WINDOW {
                Some(if ex.1 <= ey.1 { (ex.0.min(ey.0), ex.1) } else { (ex.0.min(ey.0), ey.1) })
            } else if ex.0 < ey.0 {
                Some(ex)
            } else {
                Some(ey)
            }
        }
    }
}

/// Walls the ball is touching right now (both of them at a corner).
pub fn walls_in_contact(a: &BallState, table: &TableConfig) -> [Option<WallId>; 2] {
    let mut out = [None, None];
    let x = wall_time_on_axis(a.pos.x, a.vel.x, table.radius, table.side);
    if let Some((t, hi)) = x {
        if t <= TIE_WINDOW {
            out[0] = Some(if hi { WallId::Right } else { WallId::Left });
        }
    }
    let y = wall_time_on_axis(a.pos.y, a.vel.y, table.radius, table.side);
    if let Some((t, hi)) = y {
        if t <= TIE_WINDOW {
            out[1] = Some(if hi { WallId::Top } else { WallId::Bottom });
        }
    }
    out
}

/// Time until `a` crosses a border of the periodic table, with the axis crossed.
pub fn time_to_wrap(a: &BallState, side: f64) -> Option<(f64, Axis)> {
    let on_axis = |p: f64, v: f64| {
        if v > 0.0 {
            Some(((side - p) / v).max(0.0))
        } else if v < 0.0 {
            Some((p / -v).max(0.0))
        } else {
            None
        }
    };
    match (on_axis(a.pos.x, a.vel.x), on_axis(a.pos.y, a.vel.y)) {
        (None, None) => None,
        (Some(t), None) => Some((t, Axis::X)),
        (None, Some(t)) => Some((t, Axis::Y)),
        (Some(tx), Some(ty)) => {
            if tx <= ty || (tx - ty).abs() < TIE_WINDOW {
                Some((tx.min(ty), Axis::X))
            } else {
                Some((ty, Axis::Y))
            }
        }
    }
}

/// Equal-mass elastic exchange along the line of centres `d = pos_b - pos_a`.
/// Returns `None` when the pair is not approaching.
#[inline]
pub(crate) fn elastic_exchange(va: Vec2, vb: Vec2, d: Vec2) -> Option<(Vec2, Vec2)> {
    let n = d * (1.0 / d.norm());
    let vn = (va - vb).dot(n);
    if vn <= 0.0 {
        return None;
    }
    let dv = n * vn;
    Some((va - dv, vb + dv))
}

/// Collide two touching disks: normal velocity components are swapped,
/// tangential components kept, and both shock counters incremented.
pub fn resolve_ball_collision(
    a: &BallState,
    b: &BallState,
    radius: f64,
) -> Result<(BallState, BallState)> {
    let d = b.pos - a.pos;
    let separation = d.norm();
    let contact = 2.0 * radius;
    if (separation - contact).abs() > CONTACT_TOL {
        return Err(Error::NotInContact {
            i: a.id,
            j: b.id,
            separation,
            contact,
        });
    }
    let (va, vb) =
        elastic_exchange(a.vel, b.vel, d).ok_or(Error::Separating { i: a.id, j: b.id })?;
    let mut a2 = *a;
    let mut b2 = *b;
    a2.vel = va;
    b2.vel = vb;
    a2.shocks += 1;
    b2.shocks += 1;
    Ok((a2, b2))
}

/// Specular reflection on `wall`. The shock counter is left alone; counting
/// wall shocks is the caller's policy.
pub fn resolve_wall_collision(a: &BallState, wall: WallId) -> BallState {
    let mut out = *a;
    let axis = wall.axis();
    axis.set(&mut out.vel, -axis.get(a.vel));
    out
}

/// Move a ball sitting on a periodic border to the opposite side.
pub fn wrap(a: &BallState, axis: Axis, side: f64) -> BallState {
    let mut out = *a;
    let p = axis.get(a.pos);
    let v = axis.get(a.vel);
    let shifted = if v > 0.0 || (v == 0.0 && p >= side) {
        (p - side).max(0.0)
    } else {
        (p + side).min(side)
    };
    axis.set(&mut out.pos, shifted);
    out
}

/// Displacement `b - a`, taken as the minimum image on a periodic table.
pub(crate) fn displacement(a: Vec2, b: Vec2, table: &TableConfig) -> Vec2 {
    match table.boundary {
        Boundary::Walls => b - a,
        Boundary::Periodic => minimum_image(b - a, table.side),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(id: usize, p: (f64, f64), v: (f64, f64)) -> BallState {
        BallState::new(id, Vec2::new(p.0, p.1), Vec2::new(v.0, v.1))
    }

    #[test]
    fn head_on_gap_closes() {
        let a = ball(0, (0.0, 0.0), (1.0, 0.0));
        let b = ball(1, (10.0, 0.0), (0.0, 0.0));
        assert_eq!(time_to_ball_collision(&a, &b, 2.0).unwrap(), Some(6.0));
    }

    #[test]
    fn parallel_motion_never_collides() {
        let a = ball(0, (0.0, 0.0), (1.0, 0.5));
        let b = ball(1, (10.0, 0.0), (1.0, 0.5));
        assert_eq!(time_to_ball_collision(&a, &b, 2.0).unwrap(), None);
    }

    #[test]
    fn graze_boundary() {
        let a = ball(0, (0.0, 0.0), (1.0, 0.0));
        let miss = ball(1, (10.0, 4.0001), (0.0, 0.0));
        let hit = ball(1, (10.0, 3.9999), (0.0, 0.0));
        assert_eq!(time_to_ball_collision(&a, &miss, 2.0).unwrap(), None);
        let t = time_to_ball_collision(&a, &hit, 2.0).unwrap().unwrap();
        // touching point: x offset sqrt(16 - 3.9999^2)
        let expected = 10.0 - (16.0f64 - 3.9999f64 * 3.9999).sqrt();
        assert!((t - expected).abs() < 1e-9, "{t} vs {expected}");
    }

    #[test]
    fn overlap_is_reported() {
        let a = ball(0, (0.0, 0.0), (1.0, 0.0));
        let b = ball(1, (3.0, 0.0), (0.0, 0.0));
        assert!(matches!(
            time_to_ball_collision(&a, &b, 2.0),
            Err(Error::Overlap { .. })
        ));
    }

    #[test]
    fn touching_separating_pair_is_left_alone() {
        let a = ball(0, (0.0, 0.0), (-1.0, 0.0));
        let b = ball(1, (4.0, 0.0), (1.0, 0.0));
        assert_eq!(time_to_ball_collision(&a, &b, 2.0).unwrap(), None);
        assert!(matches!(
            resolve_ball_collision(&a, &b, 2.0),
            Err(Error::Separating { .. })
        ));
    }

    #[test]
    fn periodic_collision_through_the_border() {
        let table = TableConfig::new(2, 16.0).boundary(Boundary::Periodic);
        let a = ball(0, (10.0, 100.0), (-1.0, 0.0));
        let b = ball(1, (4050.0, 100.0), (0.0, 0.0));
        let t = time_to_ball_collision_periodic(&a, &b, table.radius, table.side)
            .unwrap()
            .unwrap();
        // gap through the border is 56 px, closes to 32 at speed 1
        assert!((t - 24.0).abs() < 1e-9);
    }

    #[test]
    fn wall_times() {
        let table = TableConfig::new(2, 16.0);
        let a = ball(0, (100.0, 2048.0), (-1.0, 0.0));
        assert_eq!(time_to_wall_collision(&a, &table), Some((84.0, WallId::Left)));
        let still = ball(0, (100.0, 2048.0), (0.0, 0.0));
        assert_eq!(time_to_wall_collision(&still, &table), None);
        let diag = ball(0, (2048.0, 2048.0), (1.0, 1.0));
        assert_eq!(time_to_wall_collision(&diag, &table), Some((2032.0, WallId::Right)));
    }

    #[test]
    fn equal_mass_exchanges() {
        let a = ball(0, (0.0, 0.0), (1.0, 0.0));
        let b = ball(1, (4.0, 0.0), (-1.0, 0.0));
        let (a2, b2) = resolve_ball_collision(&a, &b, 2.0).unwrap();
        assert_eq!(a2.vel, Vec2::new(-1.0, 0.0));
        assert_eq!(b2.vel, Vec2::new(1.0, 0.0));
        assert_eq!((a2.shocks, b2.shocks), (1, 1));

        let b = ball(1, (4.0, 0.0), (0.0, 0.0));
        let (a2, b2) = resolve_ball_collision(&a, &b, 2.0).unwrap();
        assert_eq!(a2.vel, Vec2::ZERO);
        assert_eq!(b2.vel, Vec2::new(1.0, 0.0));
    }

    #[test]
    fn oblique_exchange_conserves_energy_and_momentum() {
        let s = 4.0 / 2f64.sqrt();
        let a = ball(0, (0.0, 0.0), (1.0, 0.0));
        let b = ball(1, (s, s), (0.0, 0.0));
        let (a2, b2) = resolve_ball_collision(&a, &b, 2.0).unwrap();
        let e0 = 0.5 * (a.vel.norm_sq() + b.vel.norm_sq());
        let e1 = 0.5 * (a2.vel.norm_sq() + b2.vel.norm_sq());
        assert!((e1 - e0).abs() <= 1e-12 * e0);
        let p0 = a.vel + b.vel;
        let p1 = a2.vel + b2.vel;
        assert!((p1 - p0).norm() <= 1e-12 * p0.norm());
        // the normal component (along 45°) moved entirely to b
        assert!((b2.vel.x - 0.5).abs() < 1e-12 && (b2.vel.y - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reflections_and_wraps() {
        let a = ball(0, (16.0, 50.0), (-3.0, 2.0));
        assert_eq!(resolve_wall_collision(&a, WallId::Left).vel, Vec2::new(3.0, 2.0));
        let w = ball(0, (4096.0, 50.0), (1.0, 0.25));
        let wrapped = wrap(&w, Axis::X, 4096.0);
        assert_eq!(wrapped.pos, Vec2::new(0.0, 50.0));
        assert_eq!(wrapped.vel, w.vel);
    }

    #[test]
    fn corner_contact_reports_both_walls() {
        let table = TableConfig::new(2, 16.0);
        let a = ball(0, (4080.0, 4080.0), (1.0, 1.0));
        assert_eq!(walls_in_contact(&a, &table), [Some(WallId::Right), Some(WallId::Top)]);
    }
}
