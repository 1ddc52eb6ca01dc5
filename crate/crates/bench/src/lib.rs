//! Benchmark fixtures shared by the criterion targets.

use rtgrowth::{Discretization, FluidConfig};

/// Resolutions swept by the per-mode benchmarks.
pub const RESOLUTIONS: [usize; 3] = [32, 64, 128];

pub fn reference() -> FluidConfig {
    FluidConfig::reference()
}

pub fn disc(n: usize) -> Discretization {
    Discretization::new(n).expect("benchmark resolutions are valid")
}
