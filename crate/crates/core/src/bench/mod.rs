//! Monte-Carlo benchmark: densities, samplers, ISE quadrature, split-based
//! baselines and the MISE harness.

pub mod density;
pub mod harness;
pub mod ise;
pub mod rng;
pub mod split;

pub use density::{sample_density, Density, DensitySpec};
pub use harness::{
    run_benchmark, run_replication, BenchmarkConfig, FailureRecord, Method, MiseReport, MiseRow,
};
pub use ise::{asymptotic_ise, empirical_sigma, ise, GridEstimate, IseGrid};
pub use split::{av_split, rt_aggregate, SplitFit, SplitScheme};
