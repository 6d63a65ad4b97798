//! Compares analytical response times with a fixed-priority preemptive
//! simulation over two hyperperiods, for a hand-written task set.
//!
//! ```text
//! cargo run --example simulate_oracle
//! ```

use iotforge::model::{CoreRef, Micros};
use iotforge::sched::{analyze_core, format_ratio, hyperperiod, simulate, CoreTaskSet, RtTask};

fn main() {
    let ms = Micros::from_ms;
    let set = CoreTaskSet::from_ordered(
        CoreRef::new("P1", "c0"),
        vec![
            RtTask::periodic("sense", ms(10), ms(50), ms(50), 0),
            RtTask::periodic("filter", ms(20), ms(100), ms(80), 0),
            RtTask::periodic("uplink", ms(60), ms(200), ms(200), 0),
        ],
    );
    let result = analyze_core(&set);
    let horizon = Micros(2 * hyperperiod(&set).expect("hyperperiod").0);
    let trace = simulate(&set, horizon);
    println!("U = {}, horizon {horizon}", format_ratio(&result.utilization));
    println!("{:<8} {:>10} {:>14}", "task", "analysis", "simulated max");
    for (i, t) in result.tasks.iter().enumerate() {
        let r = t.response.finite().map_or("diverged".to_string(), |r| r.to_string());
        let w = trace.worst_response(i).map_or("-".to_string(), |w| w.to_string());
        println!("{:<8} {r:>10} {w:>14}", t.task.id);
    }
}
