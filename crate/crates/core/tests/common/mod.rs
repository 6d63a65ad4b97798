#![allow(dead_code)]

use std::path::PathBuf;

use iotforge::dsl::{parse_model, SourceFile};
use iotforge::model::{CoreRef, Micros, Model};
use iotforge::sched::{CoreTaskSet, RtTask};
use rand::Rng;

pub const CLEAN: &[&str] = &["safety", "safety_fixed", "single_node", "minimal", "seed"];

/// Each seeded-violation fixture and the one rule it breaks.
pub const SEEDED: &[(&str, &str)] = &[
    ("bad_state", "V_STATE_EVENTS"),
    ("bad_port_match", "V_PORT_MATCH"),
    ("bad_action_direction", "V_ACTION_DIRECTION"),
    ("bad_event_port", "V_EVENT_PORT"),
    ("bad_sm_initial", "V_SM_INITIAL"),
    ("bad_guard_type", "V_GUARD_TYPE"),
    ("bad_alloc_missing", "V_ALLOC_MISSING"),
    ("bad_alloc_core", "V_ALLOC_CORE"),
    ("bad_rt_values", "V_RT_VALUES"),
    ("bad_entity_parts", "V_ENTITY_PARTS"),
    ("bad_payload_cycle", "V_PAYLOAD_CYCLE"),
    ("bad_dup_name", "V_DUP_NAME"),
];

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixtures_dir().join(format!("{name}.ciot"))
}

pub fn golden_path(name: &str) -> PathBuf {
    fixtures_dir().join("golden").join(format!("{name}.report.json"))
}

pub fn all_fixtures() -> Vec<&'static str> {
    CLEAN.iter().copied().chain(SEEDED.iter().map(|(n, _)| *n)).collect()
}

pub fn source(name: &str) -> SourceFile {
    let path = fixture_path(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    SourceFile::new(path.display().to_string(), text)
}

pub fn load(name: &str) -> Model {
    parse_model(&source(name)).unwrap_or_else(|d| panic!("{name}: {d:#?}"))
}

pub const PERIODS_MS: [u64; 5] = [50, 100, 200, 400, 500];

/// Splits `total` into `n` utilizations with a uniform distribution over
/// the simplex.
pub fn uunifast(rng: &mut impl Rng, n: usize, total: f64) -> Vec<f64> {
    let mut sum = total;
    let mut out = Vec::with_capacity(n);
    for i in 1..n {
        let next = sum * rng.gen::<f64>().powf(1.0 / (n - i) as f64);
        out.push(sum - next);
        sum = next;
    }
    out.push(sum);
    out
}

/// A random task set in priority order (first is highest). Periods come
/// from [`PERIODS_MS`], deadlines lie in `[C, T]`.
pub fn random_set(rng: &mut impl Rng, n: usize, total_u: f64) -> CoreTaskSet {
    let tasks = uunifast(rng, n, total_u)
        .into_iter()
        .enumerate()
        .map(|(i, u)| {
            let t = Micros::from_ms(PERIODS_MS[rng.gen_range(0..PERIODS_MS.len())]);
            let c = ((u * t.0 as f64).round() as u64).clamp(1, t.0);
            let d = rng.gen_range(c..=t.0);
            RtTask::periodic(format!("t{i}"), Micros(c), t, Micros(d), 0)
        })
        .collect();
    CoreTaskSet::from_ordered(CoreRef::new("P", "c0"), tasks)
}
