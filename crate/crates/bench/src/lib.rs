//! Fixtures shared by the benchmarks.

use visco_core::dynamics::{init, InitSpec, State};
use visco_core::{Grid2, ModelParams};

/// A warm-started state on an `n × n` grid with nontrivial `F`.
pub fn fixture(n: usize) -> State {
    let grid = Grid2::periodic(n).expect("benchmark grids are valid");
    init(&InitSpec::warm_start(0.5, 0.1, 7), &grid).expect("warm start converges")
}

pub fn fixture_params() -> ModelParams {
    ModelParams::regularized(0.01, 0.01)
}
