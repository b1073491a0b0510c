//! Restarted GMRES with a block-diagonal ILU(0) preconditioner.

mod gmres;
mod ilu;
mod lu;

pub use gmres::{gmres_solve, GmresOutcome, GmresStatus};
pub use ilu::{block_ilu0, BlockIlu0, Ilu0};
pub use lu::{block_lu, BlockLu};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square operator x ↦ y.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

/// Approximate inverse applied in place.
pub trait Preconditioner: Sync {
    fn solve_in_place(&self, r: &mut [Complex64]);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub restart: usize,
    pub maxit: usize,
    pub preconditioner: PreconditionerKind,
}

/// Block-diagonal preconditioner built from the diagonal blocks A_j.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PreconditionerKind {
    /// Incomplete LU on the sparsity pattern of each block.
    #[default]
    Ilu0,
    /// Sparse LU with partial pivoting of each block; only the coupling is
    /// left to GMRES. Costs fill-in memory.
    BlockLu,
}

impl std::str::FromStr for PreconditionerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ilu0" => Ok(PreconditionerKind::Ilu0),
            "block_lu" => Ok(PreconditionerKind::BlockLu),
            other => Err(Error::Parameter(format!("unknown preconditioner `{other}`; use ilu0 or block_lu"))),
        }
    }
}

impl PreconditionerKind {
    pub fn name(self) -> &'static str {
        match self {
            PreconditionerKind::Ilu0 => "ilu0",
            PreconditionerKind::BlockLu => "block_lu",
        }
    }
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-8, restart: 50, maxit: 2000, preconditioner: PreconditionerKind::Ilu0 }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) || self.restart == 0 || self.maxit == 0 {
            return Err(Error::Parameter(format!(
                "solver options need tol in (0, 1), restart >= 1, maxit >= 1: {self:?}"
            )));
        }
        Ok(())
    }
}

impl LinearOperator for crate::sparse::CsrMatrix {
    fn dim(&self) -> usize {
        self.n_rows()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.matvec(x, y);
    }
}
