//! Discrete-event simulation of a fixed-priority preemptive core.
//!
//! Independent of the response-time recurrence: jobs are released at
//! `k * T` from a synchronous start, the highest-priority pending job runs,
//! and finish times are recorded. It serves as the reference the analysis is
//! tested against.

use std::collections::VecDeque;

use super::task::CoreTaskSet;
use crate::model::Micros;

/// Simulations releasing more jobs than this are cut short.
pub const MAX_SIM_JOBS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub start: Micros,
    pub end: Micros,
    /// Index into the simulated set's tasks.
    pub task: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Job {
    pub task: usize,
    pub release: Micros,
    pub finish: Micros,
}

impl Job {
    pub fn response(&self) -> Micros {
        Micros(self.finish.0 - self.release.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTrace {
    /// Busy intervals, in time order; idle time is absent.
    pub segments: Vec<Segment>,
    /// Completed jobs in completion order.
    pub jobs: Vec<Job>,
    /// Jobs are released in `[0, horizon)`.
    pub horizon: Micros,
    /// The requested horizon was reduced to stay under [`MAX_SIM_JOBS`].
    pub capped: bool,
}

impl SimTrace {
    pub fn worst_response(&self, task: usize) -> Option<Micros> {
        self.jobs.iter().filter(|j| j.task == task).map(Job::response).max()
    }

    /// Jobs of `task` that finished later than `deadline` after release.
    pub fn misses(&self, task: usize, deadline: Micros) -> impl Iterator<Item = &Job> {
        self.jobs.iter().filter(move |j| j.task == task && j.response() > deadline)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Least common multiple of the periods; `None` on overflow or an empty set.
pub fn hyperperiod(set: &CoreTaskSet) -> Option<Micros> {
    let mut acc: u64 = 1;
    for t in &set.tasks {
        let p = t.period.0.max(1);
        acc = (acc / gcd(acc, p)).checked_mul(p)?;
    }
    (!set.tasks.is_empty()).then_some(Micros(acc))
}

fn jobs_within(set: &CoreTaskSet, horizon: u64) -> u64 {
    set.tasks.iter().map(|t| horizon.div_ceil(t.period.0.max(1))).fold(0u64, u64::saturating_add)
}

/// Simulates the set from a synchronous release at t = 0. Every job
/// released before `horizon` runs to completion, so the trace may extend
/// past the horizon.
pub fn simulate(set: &CoreTaskSet, horizon: Micros) -> SimTrace {
    let mut horizon = horizon.0;
    let mut capped = false;
    if jobs_within(set, horizon) > MAX_SIM_JOBS {
        // Largest horizon keeping the job count in bounds.
        let (mut lo, mut hi) = (0u64, horizon);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if jobs_within(set, mid) <= MAX_SIM_JOBS {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        horizon = lo;
        capped = true;
    }

    let n = set.tasks.len();
    let mut next_release = vec![0u64; n];
    // Pending jobs per task: (release, remaining work).
    let mut pending: Vec<VecDeque<(u64, u64)>> = vec![VecDeque::new(); n];
    let mut segments: Vec<Segment> = Vec::new();
    let mut jobs = Vec::new();
    let mut now = 0u64;

    loop {
        for (i, t) in set.tasks.iter().enumerate() {
            while next_release[i] <= now && next_release[i] < horizon {
                pending[i].push_back((next_release[i], t.wcet.0));
                next_release[i] += t.period.0.max(1);
            }
        }
        let upcoming = next_release.iter().copied().filter(|&r| r < horizon).min();
        // Tasks are ordered highest priority first.
        let Some(running) = pending.iter().position(|q| !q.is_empty()) else {
            match upcoming {
                Some(r) => {
                    now = r;
                    continue;
                }
                None => break,
            }
        };
        let (release, remaining) = pending[running][0];
        let finish = now + remaining;
        let end = upcoming.map_or(finish, |r| r.min(finish));
        if end > now {
            match segments.last_mut() {
                Some(last) if last.task == running && last.end.0 == now => last.end = Micros(end),
                _ => segments.push(Segment { start: Micros(now), end: Micros(end), task: running }),
            }
        }
        if end == finish {
            pending[running].pop_front();
            jobs.push(Job { task: running, release: Micros(release), finish: Micros(finish) });
        } else {
            pending[running][0].1 = remaining - (end - now);
        }
        now = end;
    }

    SimTrace { segments, jobs, horizon: Micros(horizon), capped }
}
