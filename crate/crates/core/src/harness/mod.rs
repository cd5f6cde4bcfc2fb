//! Seeded generators and the theorem-validation suites.

pub mod generators;
pub mod report;
pub mod suites;

pub use generators::{gen_instance, gen_tuple, DMode, GeneratorSpec, QMode, TupleKind};
pub use report::{FailureRecord, FixtureCheck, SuiteReport};
pub use suites::{non_uniqueness_target, run_suite, run_trial, Sizes, SuiteId, TrialOutcome};
