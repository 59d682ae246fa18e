//! Nested δ-method machinery for counting integer points on a pair of quadrics.

pub mod arith;
pub mod bivariate;
pub mod charsum;
pub mod counting;
pub mod delta_kernel;
pub mod error;
pub mod forms;
pub mod integrals;
pub mod local_series;
pub mod pairs;
pub mod quadrature;
pub mod report;

pub use charsum::{CharSumConfig, CharSumValue, Method};
pub use counting::{CountConfig, DecompositionTrace, PoissonCheck};
pub use delta_kernel::{BumpSpec, DeltaKernel};
pub use error::{Error, Result};
pub use forms::{PairSpec, QuadraticForm, QuadricPair, RealBox};
pub use integrals::{J0Method, SingularIntegralEstimate, WeightFunction, WeightKind};
pub use local_series::{DensityEstimate, EulerFactorEstimate, SeriesParams, SingularSeriesEstimate};
pub use report::ExperimentReport;
