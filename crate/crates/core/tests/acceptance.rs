//! End-to-end acceptance suite. Runs without the libtest harness so that
//! each criterion prints exactly one PASS/FAIL line.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use iotforge::dsl::{parse_str, serialize_model};
use iotforge::instance::build_instance_model;
use iotforge::model::{ActionKind, ComponentKind, CoreRef, EventKind, Micros, Model, PortDirection};
use iotforge::sched::{analyze, analyze_core, hyperperiod, simulate, ResponseTime};
use iotforge::thingml::{check, generate, ConstructKind, ThingOutline};
use iotforge::validate::validate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use tower::ServiceExt;

use common::*;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("safety fixture flips to schedulable after rework", flip),
        ("200 ms tasks finish within 100 ms", periodicity),
        ("response-time analysis matches simulation", rta_vs_simulation),
        ("overloaded sets are never schedulable", overload),
        ("ThingML mapping is total and stable", mapping),
        ("validator corpus hits exactly the seeded rules", validator_corpus),
        ("parse, print, parse round-trips", round_trip),
        ("CLI exit codes and golden reports", cli_contract),
        ("service answers like the CLI", service_parity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let elapsed = start.elapsed();
        match result {
            Ok(()) => println!("criterion {} PASS  {name} ({elapsed:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {e}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn flip() -> Outcome {
    let start = Instant::now();
    let original = analyze(&load("safety")).map_err(|e| e.to_string())?;
    ensure!(!original.schedulable(), "original safety model reported schedulable");

    let mut reworked = load("safety");
    for rt in &mut reworked.rt_annotations {
        ensure!(rt.wcet.0 * 3 % 10 == 0, "wcet of {} does not scale exactly", rt.target);
        rt.wcet = Micros(rt.wcet.0 * 3 / 10);
        rt.deadline = Micros::from_ms(100);
    }
    let placement = [
        ("plant.n1", "P1", "c0"),
        ("plant.n2", "P2", "c0"),
        ("plant.n3", "P3", "c0"),
        ("plant.n4", "P4", "c0"),
        ("plant.battery", "P2", "c1"),
    ];
    for alloc in &mut reworked.allocations {
        let (_, p, c) = placement.iter().find(|(i, _, _)| *i == alloc.instance).ok_or("unexpected allocation")?;
        alloc.core = CoreRef::new(*p, *c);
    }
    let report = analyze(&reworked).map_err(|e| e.to_string())?;
    ensure!(report.schedulable(), "reworked model is not schedulable");
    for t in report.cores.iter().flat_map(|c| &c.tasks) {
        let r = t.r_us.finite().ok_or(format!("{} diverged", t.id))?;
        ensure!(r <= Micros::from_ms(100), "{} has R = {r}", t.id);
    }
    let fixture = analyze(&load("safety_fixed")).map_err(|e| e.to_string())?;
    ensure!(fixture == report, "safety_fixed fixture does not match the reworked model");
    ensure!(start.elapsed() < Duration::from_secs(1), "took {:?}", start.elapsed());
    Ok(())
}

fn periodicity() -> Outcome {
    let report = analyze(&load("safety_fixed")).map_err(|e| e.to_string())?;
    let mut seen = 0;
    for t in report.cores.iter().flat_map(|c| &c.tasks).filter(|t| t.t_us == 200_000) {
        seen += 1;
        let r = t.r_us.finite().ok_or(format!("{} diverged", t.id))?.0;
        ensure!(r <= 100_000 && 100_000 <= t.t_us, "{}: R = {r} us", t.id);
        ensure!(t.slack_us.is_some_and(|s| s > 0), "{} has no positive slack", t.id);
    }
    ensure!(seen == 12, "expected 12 tasks with a 200 ms period, found {seen}");
    Ok(())
}

fn rta_vs_simulation() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let (mut sets, mut finite, mut diverged) = (0, 0, 0);
    while sets < 150 {
        let n = rng.gen_range(1..=6);
        let u = rng.gen_range(0.05..=0.95);
        let set = random_set(&mut rng, n, u);
        let result = analyze_core(&set);
        if result.utilization > num_rational::BigRational::new(95.into(), 100.into()) {
            continue;
        }
        sets += 1;
        let horizon = Micros(2 * hyperperiod(&set).ok_or("no hyperperiod")?.0);
        let trace = simulate(&set, horizon);
        ensure!(!trace.capped, "simulation of set {sets} was capped");
        for (i, t) in result.tasks.iter().enumerate() {
            let worst = trace.worst_response(i).ok_or("task never ran")?;
            match t.response {
                ResponseTime::Finite(r) => {
                    finite += 1;
                    ensure!(r == worst, "set {sets} task {i}: analysis {r:?}, simulation {worst:?} ({set:?})");
                    ensure!(
                        trace.misses(i, t.task.deadline).next().is_none(),
                        "set {sets} task {i} missed in simulation"
                    );
                }
                ResponseTime::Diverged => {
                    diverged += 1;
                    ensure!(
                        trace.misses(i, t.task.deadline).next().is_some(),
                        "set {sets} task {i}: diverged but no simulated miss"
                    );
                }
            }
        }
    }
    ensure!(finite > 0 && diverged > 0, "degenerate sample: {finite} finite, {diverged} diverged");
    ensure!(start.elapsed() < Duration::from_secs(30), "took {:?}", start.elapsed());
    Ok(())
}

fn overload() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let one = num_rational::BigRational::from_integer(1.into());
    let mut sets = 0;
    while sets < 50 {
        let n = rng.gen_range(1..=6);
        let u = rng.gen_range(1.01..=2.0);
        let set = random_set(&mut rng, n, u);
        let result = analyze_core(&set);
        if result.utilization <= one {
            continue;
        }
        sets += 1;
        ensure!(!result.schedulable(), "set with U = {} reported schedulable", result.utilization);
        let trace = simulate(&set, Micros(2 * hyperperiod(&set).ok_or("no hyperperiod")?.0));
        let missed = result.tasks.iter().enumerate().any(|(i, t)| trace.misses(i, t.task.deadline).next().is_some());
        ensure!(missed, "overloaded set with U = {} never missed in simulation", result.utilization);
    }
    Ok(())
}

fn lower_first(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_ascii_lowercase().to_string() + c.as_str()).unwrap_or_default()
}

fn count_leaves(model: &Model, component: &str) -> (usize, usize) {
    let c = model.component(component).expect("component");
    let mut counts = (if c.kind == ComponentKind::Entity { 0 } else { 1 }, c.connections.len());
    for part in &c.parts {
        let (i, k) = count_leaves(model, &part.component);
        counts.0 += i;
        counts.1 += k;
    }
    counts
}

fn mapping() -> Outcome {
    let model = load("safety");
    let units = generate(&model).map_err(|e| format!("{e:?}"))?;
    let mut things: BTreeMap<String, ThingOutline> = BTreeMap::new();
    let mut messages = Vec::new();
    let mut config = None;
    for unit in &units {
        let outline = check(&unit.text).map_err(|e| format!("{}:{e}", unit.file_name))?;
        for t in outline.things {
            things.insert(t.name.clone(), t);
        }
        messages.extend(outline.fragments.into_iter().flat_map(|f| f.messages));
        config = config.or(outline.configurations.into_iter().next());
    }
    let provenance: Vec<_> = units.iter().flat_map(|u| &u.provenance).collect();
    let sources = |kind: ConstructKind| -> Vec<String> {
        provenance.iter().filter(|p| p.kind == kind).map(|p| p.source.clone()).collect()
    };
    let once = |kind: ConstructKind, expected: BTreeSet<String>| -> Outcome {
        let got = sources(kind);
        let set: BTreeSet<String> = got.iter().cloned().collect();
        ensure!(set.len() == got.len(), "{kind:?}: duplicate provenance");
        ensure!(set == expected, "{kind:?}: provenance {set:?} != model {expected:?}");
        Ok(())
    };

    let components: Vec<_> = model.components().filter(|c| c.kind != ComponentKind::Entity).collect();
    ensure!(things.len() == components.len(), "{} things for {} components", things.len(), components.len());
    once(ConstructKind::Thing, components.iter().map(|c| c.name.clone()).collect())?;
    ensure!(
        messages.len() == model.payloads.len(),
        "{} messages for {} payloads",
        messages.len(),
        model.payloads.len()
    );
    once(ConstructKind::Message, model.payloads.iter().map(|p| p.name.clone()).collect())?;

    let (mut states, mut transitions, mut ports, mut props) =
        (BTreeSet::new(), BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
    for c in &components {
        let thing = things.get(&c.name).ok_or(format!("no thing {}", c.name))?;
        props.extend(c.properties.iter().map(|p| format!("{}.{}", c.name, p.name)));
        ensure!(thing.properties.len() == c.properties.len(), "{}: property count", c.name);
        ensure!(thing.functions.len() == c.provided_operations(&model).len(), "{}: function count", c.name);
        for port in &c.ports {
            ports.insert(format!("{}.{}", c.name, port.name));
            let (mut sends, mut receives) = (Vec::new(), Vec::new());
            if let Some(sm) = &c.statemachine {
                for ev in sm.events.iter().filter(|e| e.port.as_deref() == Some(port.name.as_str())) {
                    match (ev.kind, &sm.action(&ev.action).unwrap().kind) {
                        (EventKind::Outgoing, ActionKind::Send { payload }) => sends.push(lower_first(payload)),
                        (EventKind::Incoming, ActionKind::Receive { payload }) => receives.push(lower_first(payload)),
                        _ => {}
                    }
                }
            }
            sends.dedup();
            receives.dedup();
            let emitted = thing.port(&port.name).ok_or(format!("{}: no port {}", c.name, port.name))?;
            let provided = match port.direction {
                PortDirection::Provided => true,
                PortDirection::Required => false,
                PortDirection::Bidirectional => c.kind != ComponentKind::Board,
            };
            ensure!(emitted.provided == provided, "{}.{}: direction", c.name, port.name);
            ensure!(emitted.sends == sends, "{}.{}: sends {:?} != {:?}", c.name, port.name, emitted.sends, sends);
            ensure!(
                emitted.receives == receives,
                "{}.{}: receives {:?} != {:?}",
                c.name,
                port.name,
                emitted.receives,
                receives
            );
        }
        let Some(sm) = &c.statemachine else {
            ensure!(thing.statechart.is_none(), "{}: unexpected statechart", c.name);
            continue;
        };
        let chart = thing.statechart.as_ref().ok_or(format!("{}: no statechart", c.name))?;
        ensure!(chart.states.len() == sm.states.len(), "{}: state count", c.name);
        transitions.extend((0..sm.transitions.len()).map(|i| format!("{}.transitions[{i}]", c.name)));
        for s in &sm.states {
            states.insert(format!("{}.{}", c.name, s.name));
            let emitted =
                chart.states.iter().find(|e| e.name == s.name).ok_or(format!("{}: no state {}", c.name, s.name))?;
            let expected: Vec<&str> =
                sm.transitions.iter().filter(|t| t.source == s.name).map(|t| t.target.as_str()).collect();
            ensure!(
                emitted.transitions == expected,
                "{}.{}: transitions {:?} != {expected:?}",
                c.name,
                s.name,
                emitted.transitions
            );
            ensure!(emitted.internals == s.internal_events.len(), "{}.{}: internal count", c.name, s.name);
        }
    }
    once(ConstructKind::State, states)?;
    once(ConstructKind::Transition, transitions)?;
    once(ConstructKind::Port, ports)?;
    once(ConstructKind::Property, props)?;

    let (instances, connections) = count_leaves(&model, "plant");
    let config = config.ok_or("no configuration")?;
    ensure!(
        config.instances.len() == instances && config.connectors.len() == connections,
        "configuration has {} instances and {} connectors, expected {instances} and {connections}",
        config.instances.len(),
        config.connectors.len()
    );
    ensure!((instances, connections) == (25, 20), "instance oracle gave {instances}/{connections}");
    let im = build_instance_model(&model).map_err(|e| e.to_string())?;
    ensure!(im.component_instances().count() == instances, "instance model disagrees with the count oracle");

    let single = generate(&load("single_node")).map_err(|e| format!("{e:?}"))?;
    let single_cfg = check(&single.last().unwrap().text).map_err(|e| e.to_string())?.configurations.remove(0);
    ensure!(
        single_cfg.instances.len() == 6 && single_cfg.connectors.len() == 5,
        "single node: {} instances, {} connectors",
        single_cfg.instances.len(),
        single_cfg.connectors.len()
    );

    let digest = |units: &[iotforge::thingml::ThingmlUnit]| {
        let mut h = Sha256::new();
        for u in units {
            h.update(u.file_name.as_bytes());
            h.update([0]);
            h.update(u.text.as_bytes());
        }
        h.finalize().to_vec()
    };
    let first = digest(&units);
    for run in 0..10 {
        let again = generate(&load("safety")).map_err(|e| format!("{e:?}"))?;
        ensure!(digest(&again) == first, "output hash changed on run {run}");
    }
    Ok(())
}

fn validator_corpus() -> Outcome {
    for name in CLEAN {
        let diags = validate(&load(name));
        ensure!(diags.is_empty(), "{name}: {diags:?}");
    }
    for (name, code) in SEEDED {
        let diags = validate(&load(name));
        let codes: BTreeSet<&str> = diags.iter().map(|d| d.code.as_str()).collect();
        ensure!(codes == BTreeSet::from([*code]), "{name}: expected only {code}, got {codes:?}");
    }
    Ok(())
}

fn round_trip() -> Outcome {
    for name in all_fixtures() {
        let model = load(name);
        let text = serialize_model(&model);
        let again = parse_str(&text).map_err(|d| format!("{name}: reparse failed: {d:?}"))?;
        ensure!(again == model, "{name}: structure changed");
        ensure!(serialize_model(&again) == text, "{name}: printing is not a fixpoint");
    }
    Ok(())
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_iotforge"))
        .args(args)
        .env("IOTFORGE_COLOR", "never")
        .output()
        .expect("run iotforge");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn cli_contract() -> Outcome {
    let path = |n: &str| fixture_path(n).display().to_string();
    for name in all_fixtures() {
        let seeded = SEEDED.iter().any(|(n, _)| *n == name);
        let (code, _) = cli(&["validate", &path(name)]);
        ensure!(code == if seeded { 1 } else { 0 }, "validate {name}: exit {code}");
        let (code, json) = cli(&["analyze", "--format", "json", &path(name)]);
        let expected = match name {
            _ if seeded => 1,
            "safety" => 3,
            _ => 0,
        };
        ensure!(code == expected, "analyze {name}: exit {code}, expected {expected}");
        if !seeded {
            let golden = std::fs::read_to_string(golden_path(name)).map_err(|e| format!("{name}: {e}"))?;
            ensure!(json == golden, "analyze {name}: output differs from golden report");
        }
    }
    let (code, _) = cli(&["validate", "/nonexistent/model.ciot"]);
    ensure!(code == 2, "missing file: exit {code}");
    let (code, _) = cli(&["analyze", &path("safety_fixed"), "--format", "json"]);
    ensure!(code == 0, "flag after path: exit {code}");
    Ok(())
}

fn service_parity() -> Outcome {
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(|e| e.to_string())?;
    rt.block_on(async {
        let post = |text: String| async move {
            let body = serde_json::json!({ "model_text": text }).to_string();
            let req =
                Request::post("/v1/analyze").header("content-type", "application/json").body(Body::from(body)).unwrap();
            let resp = iotforge::service::router().oneshot(req).await.unwrap();
            let status = resp.status();
            (status, resp.into_body().collect().await.unwrap().to_bytes())
        };
        for name in all_fixtures() {
            let (status, bytes) = post(source(name).text).await;
            ensure!(status == StatusCode::OK, "{name}: HTTP {status}");
            let body: serde_json::Value = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
            let (code, out) = cli(&["analyze", "--format", "json", &fixture_path(name).display().to_string()]);
            if code == 1 {
                ensure!(body["status"] == "invalid", "{name}: status {}", body["status"]);
                let (_, listing) = cli(&["validate", "--format", "json", &fixture_path(name).display().to_string()]);
                let listing: serde_json::Value = serde_json::from_str(&listing).map_err(|e| e.to_string())?;
                ensure!(body["diagnostics"] == listing[0]["diagnostics"], "{name}: diagnostics differ");
            } else {
                let report: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
                ensure!(body["report"] == report, "{name}: report differs from CLI");
                let status = if code == 0 { "ok" } else { "unschedulable" };
                ensure!(body["status"] == status, "{name}: status {} for exit {code}", body["status"]);
            }
        }
        let text = source("safety").text;
        let handles: Vec<_> = (0..16).map(|_| tokio::spawn(post(text.clone()))).collect();
        let mut bodies = Vec::new();
        for h in handles {
            bodies.push(h.await.map_err(|e| e.to_string())?.1);
        }
        ensure!(bodies.windows(2).all(|w| w[0] == w[1]), "concurrent responses differ");
        Ok(())
    })
}
