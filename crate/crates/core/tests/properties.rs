mod common;

use iotforge::dsl::{parse_str, serialize_model};
use iotforge::model::{BinOp, CoreRef, Expr, Literal, Loc, Micros};
use iotforge::sched::{analyze, analyze_core, hyperperiod, simulate, CoreTaskSet, ResponseTime, RtTask};
use proptest::prelude::*;

use common::{load, PERIODS_MS};

/// `(period index, wcet per mille of period, deadline position in [C, T] per mille)`
fn task_params() -> impl Strategy<Value = Vec<(usize, u64, u64)>> {
    prop::collection::vec((0..PERIODS_MS.len(), 1u64..400, 0u64..=1000), 1..=6)
}

fn build(params: &[(usize, u64, u64)], scale: u64) -> Vec<RtTask> {
    params
        .iter()
        .enumerate()
        .map(|(i, &(p, c, d))| {
            let t = PERIODS_MS[p] * 1000;
            let c = (t * c / 1000).max(1);
            let d = c + (t - c) * d / 1000;
            RtTask::periodic(format!("t{i}"), Micros(c * scale), Micros(t * scale), Micros(d * scale), 0)
        })
        .collect()
}

fn ordered(tasks: Vec<RtTask>) -> CoreTaskSet {
    CoreTaskSet::from_ordered(CoreRef::new("P", "c0"), tasks)
}

fn responses(set: &CoreTaskSet) -> Vec<ResponseTime> {
    analyze_core(set).tasks.into_iter().map(|t| t.response).collect()
}

/// Diverged sorts above every finite response.
fn rank(r: ResponseTime) -> u64 {
    r.finite().map_or(u64::MAX, |m| m.0)
}

proptest! {
    #[test]
    fn response_times_grow_with_wcet(params in task_params(), which in any::<prop::sample::Index>(), extra in 1u64..50_000) {
        let tasks = build(&params, 1);
        let before = responses(&ordered(tasks.clone()));
        let mut bumped = tasks;
        let k = which.index(bumped.len());
        bumped[k].wcet = Micros((bumped[k].wcet.0 + extra).min(bumped[k].deadline.0));
        let after = responses(&ordered(bumped));
        for (b, a) in before.iter().zip(&after) {
            prop_assert!(rank(*a) >= rank(*b), "{b:?} -> {a:?}");
        }
    }

    #[test]
    fn scaling_time_scales_responses(params in task_params(), k in 2u64..7) {
        let base = responses(&ordered(build(&params, 1)));
        let scaled = responses(&ordered(build(&params, k)));
        for (b, s) in base.iter().zip(&scaled) {
            match (b, s) {
                (ResponseTime::Finite(b), ResponseTime::Finite(s)) => prop_assert_eq!(b.0 * k, s.0),
                (ResponseTime::Diverged, ResponseTime::Diverged) => {}
                _ => prop_assert!(false, "{b:?} scaled to {s:?}"),
            }
        }
    }

    #[test]
    fn declaration_order_does_not_matter_with_distinct_priorities(
        params in task_params(),
        perm in Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let tasks: Vec<RtTask> = build(&params, 1)
            .into_iter()
            .enumerate()
            .map(|(i, t)| RtTask { priority: 10 + i as u32, order: i, ..t })
            .collect();
        let reference = analyze_core(&CoreTaskSet::new(CoreRef::new("P", "c0"), tasks.clone()));
        let shuffled: Vec<RtTask> = perm
            .iter()
            .filter(|&&i| i < tasks.len())
            .enumerate()
            .map(|(order, &i)| RtTask { order, ..tasks[i].clone() })
            .collect();
        let other = analyze_core(&CoreTaskSet::new(CoreRef::new("P", "c0"), shuffled));
        for t in &reference.tasks {
            let o = other.tasks.iter().find(|o| o.task.id == t.task.id).unwrap();
            prop_assert_eq!(t.response, o.response, "{}", t.task.id);
        }
    }

    #[test]
    fn analysis_never_undercuts_simulation(params in task_params()) {
        let set = ordered(build(&params, 1));
        let result = analyze_core(&set);
        let trace = simulate(&set, hyperperiod(&set).unwrap());
        prop_assume!(!trace.capped);
        for (i, t) in result.tasks.iter().enumerate() {
            if let (Some(r), Some(w)) = (t.response.finite(), trace.worst_response(i)) {
                prop_assert!(w <= r, "task {i}: simulated {w:?} above analysis {r:?}");
            }
        }
    }

    #[test]
    fn allocation_declaration_order_does_not_matter(
        perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let model = load("safety_fixed");
        let mut shuffled = model.clone();
        shuffled.allocations = perm.iter().map(|&i| model.allocations[i].clone()).collect();
        prop_assert_eq!(analyze(&model).unwrap(), analyze(&shuffled).unwrap());
    }
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..1000).prop_map(|v| Expr::Lit(Literal::Int(v))),
        Just(Expr::Prop("value".into(), Loc::default())),
    ];
    let arith = leaf.prop_recursive(3, 12, 2, |inner| {
        (prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]), inner.clone(), inner)
            .prop_map(|(op, l, r)| Expr::binary(op, l, r))
    });
    let cmp = (
        prop::sample::select(vec![BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne]),
        arith.clone(),
        arith,
    )
        .prop_map(|(op, l, r)| Expr::binary(op, l, r));
    cmp.prop_recursive(2, 8, 2, |inner| {
        (prop::sample::select(vec![BinOp::And, BinOp::Or]), inner.clone(), inner)
            .prop_map(|(op, l, r)| Expr::binary(op, l, r))
    })
}

proptest! {
    #[test]
    fn printed_models_parse_back(guard in expr(), wcet in 1u64..50, deadline in 50u64..500, priority in 1u32..100) {
        let mut model = load("seed");
        model.elements[0].statemachine.as_mut().unwrap().transitions[1].guard = Some(guard);
        let rt = &mut model.rt_annotations[0];
        rt.wcet = Micros::from_ms(wcet);
        rt.deadline = Micros::from_ms(deadline);
        rt.priority = priority;
        let text = serialize_model(&model);
        let again = parse_str(&text).map_err(|d| TestCaseError::fail(format!("{d:?}\n{text}")))?;
        prop_assert_eq!(&again, &model);
        prop_assert_eq!(serialize_model(&again), text);
    }
}
