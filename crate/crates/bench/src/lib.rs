//! Fixtures shared by the criterion benchmarks in `benches/`.

use fcns_core::harness::{make_initial, InitKind};
use fcns_core::{Grid, PhysParams, State};

/// Grid sizes the kernel benchmarks sweep over.
pub const SIZES: [usize; 3] = [64, 128, 256];

pub fn params() -> PhysParams {
    PhysParams::new(0.5, 1.0).expect("valid parameters")
}

/// Smooth band-limited state of amplitude 0.05 on an `n x n` grid.
pub fn fixture_state(n: usize) -> State {
    let grid = Grid::new(n, 20.0 * std::f64::consts::PI).expect("power-of-two grid");
    make_initial(InitKind::RandomBand, 0.05, 0.0, &grid, 42).expect("fixture state")
}
