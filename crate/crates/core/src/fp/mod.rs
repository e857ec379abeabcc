//! Flower-petals operators: the symmetric adjacency `Ã_p` built from the
//! core↔petal incidence, its Laplacian `L_p = I − Ã_p`, the two-step random
//! walk it comes from, precomputed propagated feature blocks and a dense
//! spectral filtering oracle.

mod filter;
mod operator;
mod propagate;
mod spectra;
mod walk;

pub use filter::{polynomial_filter, spectral_filter_oracle};
pub use operator::{build_fp_adjacency, build_fp_laplacian, build_operators, FpOperator};
pub use propagate::{propagate_features, PropagatedFeatures, DEFAULT_HOPS};
pub use spectra::{spectra_report, OrderSpectrum, SpectraReport};
pub use walk::{two_step_walk, walk_matrix, WalkState};
