//! Component models of industrial IoT systems: a textual format, a
//! well-formedness checker, a ThingML code generator and fixed-priority
//! schedulability analysis over software-to-hardware allocations.

pub mod cli;
pub mod diag;
pub mod dsl;
pub mod instance;
pub mod model;
pub mod ops;
pub mod sched;
pub mod service;
pub mod thingml;
pub mod validate;
