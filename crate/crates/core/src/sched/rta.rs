//! Fixed-priority preemptive response-time analysis for one core.
//!
//! Tasks are independent, released synchronously at the critical instant,
//! with no blocking, jitter or offsets. The worst-case response of a task is
//! the least fixpoint of `R = C + sum over higher-priority j of ceil(R / T_j) * C_j`,
//! iterated from `R = C` and abandoned as soon as it passes the deadline.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use super::task::{CoreTaskSet, RtTask};
use crate::model::Micros;

/// Outcome of the response-time recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseTime {
    Finite(Micros),
    /// The iteration exceeded the deadline (or the core is overloaded).
    Diverged,
}

impl ResponseTime {
    pub fn finite(self) -> Option<Micros> {
        match self {
            ResponseTime::Finite(r) => Some(r),
            ResponseTime::Diverged => None,
        }
    }
}

impl fmt::Display for ResponseTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResponseTime::Finite(r) => write!(f, "{r}"),
            ResponseTime::Diverged => f.write_str("diverged"),
        }
    }
}

// JSON form: microseconds as a number, or the string "diverged".
impl Serialize for ResponseTime {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ResponseTime::Finite(r) => s.serialize_u64(r.0),
            ResponseTime::Diverged => s.serialize_str("diverged"),
        }
    }
}

impl<'de> Deserialize<'de> for ResponseTime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = ResponseTime;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("microseconds or \"diverged\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ResponseTime, E> {
                Ok(ResponseTime::Finite(Micros(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ResponseTime, E> {
                if v == "diverged" {
                    Ok(ResponseTime::Diverged)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Worst-case response time of `task` under interference from
/// `higher_priority`.
pub fn response_time(task: &RtTask, higher_priority: &[RtTask]) -> ResponseTime {
    let deadline = task.deadline.0;
    let mut r = task.wcet.0;
    loop {
        if r > deadline {
            return ResponseTime::Diverged;
        }
        let mut next = Some(task.wcet.0);
        for hp in higher_priority {
            next = next.and_then(|acc| {
                let jobs = r.div_ceil(hp.period.0.max(1));
                jobs.checked_mul(hp.wcet.0).and_then(|w| acc.checked_add(w))
            });
        }
        let Some(next) = next else { return ResponseTime::Diverged };
        if next == r {
            return ResponseTime::Finite(Micros(r));
        }
        r = next;
    }
}

/// Exact `sum of C_i / T_i`.
pub fn utilization(set: &CoreTaskSet) -> BigRational {
    set.tasks.iter().fold(BigRational::zero(), |acc, t| {
        acc + BigRational::new(BigInt::from(t.wcet.0), BigInt::from(t.period.0.max(1)))
    })
}

/// `num/den` in lowest terms.
pub fn format_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskResult {
    pub task: RtTask,
    pub response: ResponseTime,
}

impl TaskResult {
    pub fn deadline_met(&self) -> bool {
        matches!(self.response, ResponseTime::Finite(r) if r <= self.task.deadline)
    }

    /// `D - R` when the response is finite.
    pub fn slack(&self) -> Option<Micros> {
        self.response.finite().map(|r| Micros(self.task.deadline.0 - r.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreResult {
    pub set: CoreTaskSet,
    pub utilization: BigRational,
    pub tasks: Vec<TaskResult>,
}

impl CoreResult {
    pub fn schedulable(&self) -> bool {
        self.tasks.iter().all(TaskResult::deadline_met)
    }

    pub fn overloaded(&self) -> bool {
        self.utilization > BigRational::one()
    }
}

/// Analyzes one core. An overloaded core (U > 1) is not analyzed further:
/// every task on it is reported as diverged.
pub fn analyze_core(set: &CoreTaskSet) -> CoreResult {
    let u = utilization(set);
    let overloaded = u > BigRational::one();
    let tasks = set
        .tasks
        .iter()
        .enumerate()
        .map(|(i, task)| TaskResult {
            task: task.clone(),
            response: if overloaded { ResponseTime::Diverged } else { response_time(task, &set.tasks[..i]) },
        })
        .collect();
    CoreResult { set: set.clone(), utilization: u, tasks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CoreRef;

    fn ms(v: u64) -> Micros {
        Micros::from_ms(v)
    }

    #[test]
    fn no_interference() {
        let t = RtTask::periodic("a", ms(30), ms(200), ms(100), 1);
        assert_eq!(response_time(&t, &[]), ResponseTime::Finite(ms(30)));
    }

    #[test]
    fn one_preemption() {
        let hp = RtTask::periodic("hi", ms(30), ms(200), ms(200), 2);
        let lo = RtTask::periodic("lo", ms(50), ms(500), ms(100), 1);
        assert_eq!(response_time(&lo, &[hp]), ResponseTime::Finite(ms(80)));
    }

    #[test]
    fn past_the_deadline() {
        let hp = RtTask::periodic("hi", ms(60), ms(100), ms(100), 2);
        let lo = RtTask::periodic("lo", ms(90), ms(200), ms(200), 1);
        // 90 -> 150 -> 210 > 200
        assert_eq!(response_time(&lo, &[hp]), ResponseTime::Diverged);
    }

    #[test]
    fn wcet_above_deadline_diverges_immediately() {
        let t = RtTask::periodic("a", ms(100), ms(200), ms(50), 1);
        assert_eq!(response_time(&t, &[]), ResponseTime::Diverged);
    }

    #[test]
    fn utilization_is_exact() {
        let set = |ts: Vec<RtTask>| CoreTaskSet::new(CoreRef::new("P", "c0"), ts);
        let single = set(vec![RtTask::periodic("a", ms(30), ms(200), ms(100), 1)]);
        assert_eq!(format_ratio(&utilization(&single)), "3/20");
        assert_eq!(format_ratio(&utilization(&set(vec![]))), "0/1");
        let shared: Vec<RtTask> = (0..2)
            .flat_map(|n| [100, 80, 60].map(|c| RtTask::periodic(format!("n{n}.{c}"), ms(c), ms(200), ms(50), 1)))
            .collect();
        assert_eq!(format_ratio(&utilization(&set(shared))), "12/5");
    }

    #[test]
    fn overloaded_core_is_aborted() {
        let set = CoreTaskSet::from_ordered(
            CoreRef::new("P", "c0"),
            vec![
                RtTask::periodic("a", ms(10), ms(100), ms(100), 0),
                RtTask::periodic("b", ms(95), ms(100), ms(100), 0),
            ],
        );
        let res = analyze_core(&set);
        assert!(res.overloaded());
        assert!(res.tasks.iter().all(|t| t.response == ResponseTime::Diverged));
        assert!(!res.schedulable());
    }

    #[test]
    fn response_json() {
        assert_eq!(serde_json::to_string(&ResponseTime::Finite(Micros(72000))).unwrap(), "72000");
        assert_eq!(serde_json::to_string(&ResponseTime::Diverged).unwrap(), "\"diverged\"");
        let back: ResponseTime = serde_json::from_str("\"diverged\"").unwrap();
        assert_eq!(back, ResponseTime::Diverged);
    }
}
