//! Verification harness: named suites over the catalog and their reports.

pub mod report;
pub mod suites;

pub use report::{Check, Status, VerificationReport, SCHEMA_VERSION};
pub use suites::{registry, run_suite, Options, Suite, SuiteError, SUITE_NAMES};

/// Thread count from `AMBIENT_THREADS`, default 1.
pub fn thread_count() -> usize {
    std::env::var("AMBIENT_THREADS").ok().and_then(|s| s.parse().ok()).filter(|&n| n > 0).unwrap_or(1)
}

/// Runs `f` on a rayon pool sized by [`thread_count`].
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(thread_count()).build().expect("thread pool");
    pool.install(f)
}
