//! Encoder assembly, divergence accounting, limits and the figure sweeps.

mod encoder;
mod experiments;
mod limits;

pub use encoder::{bits_for, DivergenceReport, IldEncoder};
pub use experiments::{
    fig4_rows, fig5_k_grid, fig5_rows, log2_size, optimal_dm_marker, typical_set_experiment, typical_set_k, Fig4Row,
    Fig5Config, Fig5Row, TypicalSetRun,
};
pub use limits::{k_max, llf_divergence_upper, llf_upper_curve, lower_bound, n_up_exact, LlfUpper, LowerBound};

use crate::partition::Partition;
use crate::scalar::Real;

/// `D(U_K || [q_{S_1} .. q_{S_K}])`
pub fn selection_divergence<T: Real>(part: &Partition<T>) -> T {
    part.selection_divergence()
}
