use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{Axis, WallId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    BallBall { i: usize, j: usize },
    BallWall { ball: usize, wall: WallId },
    Wrap { ball: usize, axis: Axis },
}

impl EventKind {
    /// Rank used to order simultaneous events: ball-ball, then wall, then wrap.
    pub fn rank(&self) -> u8 {
        match self {
            EventKind::BallBall { .. } => 0,
            EventKind::BallWall { .. } => 1,
            EventKind::Wrap { .. } => 2,
        }
    }

    pub fn lowest_ball(&self) -> usize {
        match *self {
            EventKind::BallBall { i, j } => i.min(j),
            EventKind::BallWall { ball, .. } | EventKind::Wrap { ball, .. } => ball,
        }
    }

    fn secondary(&self) -> usize {
        match *self {
            EventKind::BallBall { i, j } => i.max(j),
            EventKind::BallWall { wall, .. } => wall as usize,
            EventKind::Wrap { axis, .. } => axis as usize,
        }
    }

    /// Deterministic order among events sharing a time slot.
    pub fn tie_order(&self, other: &EventKind) -> Ordering {
        (self.rank(), self.lowest_ball(), self.secondary()).cmp(&(
            other.rank(),
            other.lowest_ball(),
            other.secondary(),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    /// Absolute world time of the event.
    pub time: f64,
    pub kind: EventKind,
}

/// A prediction made on behalf of `owner`. It stays valid while the owner and
/// the partner (if any) keep the trajectory epochs recorded here.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scheduled {
    pub event: CollisionEvent,
    pub owner: usize,
    pub owner_epoch: u64,
    pub partner: Option<(usize, u64)>,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    // reversed so that BinaryHeap pops the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .event
            .time
            .total_cmp(&self.event.time)
            .then_with(|| other.event.kind.tie_order(&self.event.kind))
            .then_with(|| other.owner.cmp(&self.owner))
    }
}

#[derive(Debug, Default, Clone)]
pub(crate) struct EventQueue {
    heap: BinaryHeap<Scheduled>,
}

impl EventQueue {
    pub fn push(&mut self, s: Scheduled) {
        self.heap.push(s);
    }

    pub fn pop(&mut self) -> Option<Scheduled> {
        self.heap.pop()
    }

    pub fn peek(&self) -> Option<&Scheduled> {
        self.heap.peek()
    }

    pub fn clear(&mut self) {
        self.heap.clear();
    }
}
