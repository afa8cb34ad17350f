//! Shared fixtures for the benchmarks.

use submax::instances::{gen_instance, GraphFamily};
use submax::SetFunctionInstance;

/// A memoized max-cut instance from the synthetic generators.
pub fn cut(family: GraphFamily, seed: u64) -> SetFunctionInstance {
    gen_instance(family, seed)
        .and_then(|c| c.into_instance())
        .expect("benchmark instances are valid")
}
