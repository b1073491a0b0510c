//! Finite element solver for two-dimensional Helmholtz scattering by an
//! unbounded rough surface.
//!
//! The surface is flattened by a smooth change of variables, the resulting
//! strip problem is Floquet-Bloch transformed into a family of quasi-periodic
//! cell problems, and the family is discretized with N piecewise-constant
//! samples in the quasi-periodicity parameter and P1 elements in space. The
//! truncated surface perturbation couples the samples; the coupled block
//! system is solved with block-ILU(0) preconditioned GMRES.

pub mod assembly;
pub mod bloch;
pub mod dtn;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod mesh;
pub mod postprocess;
pub mod quadrature;
pub mod solver;
pub mod source;
pub mod sparse;
pub mod special;

pub use num_complex::Complex64;

pub use assembly::{BlockSystem, CouplingBlocks, CouplingMode, CouplingOperator};
pub use bloch::{BlochField, BlochGrid};
pub use dtn::DtnConfig;
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, ExperimentReport, SurfaceSpec};
pub use geometry::{CoefficientField, FlatteningMap, SurfaceProfile};
pub use mesh::{NodeClass, PeriodicCellMesh};
pub use postprocess::{ConvergenceRow, ConvergenceTable};
pub use solver::{GmresOutcome, GmresStatus, PreconditionerKind, SolverOptions};
pub use source::{DirichletTable, PointSource};
