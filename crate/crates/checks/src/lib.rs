//! Verification layer for the wavelet-convolution core: an independent
//! reference evaluator, a basis-probed dense-operator oracle, and named
//! pass/fail suites that the CLI `check` command and the acceptance tests
//! both run.

pub mod dense;
pub mod reference;
pub mod suites;

pub use suites::{run_all, suite_names, CheckConfig, SuiteOutcome};
