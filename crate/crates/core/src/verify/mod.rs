//! Property suites, golden scenarios and the reports they produce.
//!
//! Every check becomes an [`Assertion`] with its expected and measured value.
//! Reports are deterministic for a fixed seed: sections are sorted by name
//! and wall-clock times never reach the serialized forms.

mod examples;
mod properties;
mod report;
mod scenario;
pub mod selftest;

pub use examples::{run_example, run_paper_examples, EXAMPLE_NAMES};
pub use properties::run_property_suite;
pub use report::{Assertion, OutputFormat, Report, Section};
pub use scenario::{
    run_scenario, Expectation, Scenario, DEFAULT_BUDGET, DEFAULT_SEED, DEFAULT_TOL, POSITIVITY_SAMPLES,
    RESIDUAL_SAMPLES,
};
pub use selftest::run_selftest;
