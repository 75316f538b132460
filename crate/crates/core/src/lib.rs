//! Monotone submodular maximization subject to an explicitly represented matroid.
//!
//! The solver combines a lazily refreshed, sampled residual greedy over a dynamic
//! maximum-weight base with a decreasing-threshold continuous greedy, and rounds the
//! resulting fractional point with swap rounding. Partition and graphic matroids get
//! dedicated data structures; brute-force routines are kept alongside as test oracles.
//!
//! Module map:
//!
//! * [`oracle`]: value oracles with call counting, built-in objectives, multilinear sampling
//! * [`matroid`]: partition / graphic matroids, independence state, brute-force utilities
//! * [`dynbase`]: maximum-weight base under decrease-weight updates, with bucketed weights
//! * [`euler`]: Euler-tour forest (link, cut, same-tree)
//! * [`lazy`]: the lazy sampling greedy
//! * [`continuous`]: the decreasing-threshold continuous greedy
//! * [`rounding`]: swap rounding (generic, partition and graphic fast paths)
//! * [`pipeline`]: end-to-end solver, welfare reduction, baselines, reports

pub mod continuous;
pub mod dynbase;
pub mod error;
pub mod euler;
pub mod exec;
pub mod gen;
pub mod io;
pub mod lazy;
pub mod matroid;
pub mod oracle;
pub mod pipeline;
pub mod rounding;
pub mod selfcheck;
pub mod set;

pub use error::{Error, Result};
pub use matroid::{GraphicMatroid, IndepState, MatroidInstance, PartitionMatroid};
pub use oracle::{
    Anchor, ContractedOracle, CoverageObjective, FacilityLocationObjective, FractionalPoint, ModularObjective,
    SetFunction, ValuationOracle,
};
pub use set::ElementSet;
