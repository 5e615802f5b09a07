//! Multiply-accumulate counters for instrumented runs.
//!
//! The direct convolution and wavelet kernels report how many MACs they
//! execute so the cost model in [`crate::analysis`] can be checked against
//! the implementation instead of against itself. Counting is off by default
//! and costs one thread-local flag test per output pixel when off.
//!
//! Counters are thread-local: an instrumented run and its counts stay on one
//! thread.

use std::cell::Cell;

/// Which stage of the layer a MAC belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Conv,
    Wt,
    Iwt,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MacCounts {
    pub conv: u64,
    pub wt: u64,
    pub iwt: u64,
}

impl MacCounts {
    pub fn total(&self) -> u64 {
        self.conv + self.wt + self.iwt
    }
}

thread_local! {
    static ENABLED: Cell<bool> = const { Cell::new(false) };
    static STAGE: Cell<Stage> = const { Cell::new(Stage::Conv) };
    static COUNTS: Cell<MacCounts> = const { Cell::new(MacCounts { conv: 0, wt: 0, iwt: 0 }) };
}

/// True while a [`counted`] run is in progress. Kernels consult this to
/// pick the strict every-tap-executes path over equivalent fast paths.
#[inline]
pub fn is_counting() -> bool {
    ENABLED.with(|e| e.get())
}

/// Record `n` MACs against the current stage. No-op unless counting is on.
#[inline]
pub fn add(n: u64) {
    if ENABLED.with(|e| e.get()) {
        let stage = STAGE.with(|s| s.get());
        COUNTS.with(|c| {
            let mut counts = c.get();
            match stage {
                Stage::Conv => counts.conv += n,
                Stage::Wt => counts.wt += n,
                Stage::Iwt => counts.iwt += n,
            }
            c.set(counts);
        });
    }
}

/// Run `f` with MACs attributed to `stage`, restoring the previous stage.
pub fn with_stage<R>(stage: Stage, f: impl FnOnce() -> R) -> R {
    let prev = STAGE.with(|s| s.replace(stage));
    let out = f();
    STAGE.with(|s| s.set(prev));
    out
}

/// Run `f` with counting enabled and return its result plus the MACs it
/// executed. Nested counted runs see their own counts only.
pub fn counted<R>(f: impl FnOnce() -> R) -> (R, MacCounts) {
    let prev_enabled = ENABLED.with(|e| e.replace(true));
    let prev_counts = COUNTS.with(|c| c.replace(MacCounts::default()));
    let prev_stage = STAGE.with(|s| s.replace(Stage::Conv));
    let out = f();
    let counts = COUNTS.with(|c| c.get());
    ENABLED.with(|e| e.set(prev_enabled));
    COUNTS.with(|c| c.set(prev_counts));
    STAGE.with(|s| s.set(prev_stage));
    (out, counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disabled_by_default() {
        add(5);
        let (_, counts) = counted(|| ());
        assert_eq!(counts.total(), 0);
    }

    #[test]
    fn counts_by_stage() {
        let ((), counts) = counted(|| {
            add(3);
            with_stage(Stage::Wt, || add(7));
            with_stage(Stage::Iwt, || add(11));
            add(1);
        });
        assert_eq!(counts, MacCounts { conv: 4, wt: 7, iwt: 11 });
    }

    #[test]
    fn nested_counts_are_isolated() {
        let ((), outer) = counted(|| {
            add(2);
            let ((), inner) = counted(|| add(9));
            assert_eq!(inner.conv, 9);
            add(2);
        });
        assert_eq!(outer.conv, 4);
    }
}
