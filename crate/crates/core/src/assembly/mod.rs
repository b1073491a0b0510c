//! Block system (A + B) W = F: α-integrated diagonal blocks, the truncated
//! surface coupling and the Dirichlet right-hand side.

mod coupling;
mod diagonal;

use num_complex::Complex64;

pub use coupling::{assemble_coupling_explicit, CouplingBlocks, CouplingOperator, EXPLICIT_STORAGE_LIMIT};
pub use diagonal::{assemble_diagonal_block, DiagonalAssembler};

use crate::error::{Error, Result};
use crate::mesh::PeriodicCellMesh;
use crate::solver::LinearOperator;
use crate::source::DirichletTable;
use crate::sparse::CsrMatrix;

/// Constant per-triangle data of P1 elements.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Element {
    pub nodes: [usize; 3],
    pub coords: [[f64; 2]; 3],
    pub area: f64,
    pub grads: [[f64; 2]; 3],
}

pub(crate) fn elements(mesh: &PeriodicCellMesh) -> Vec<Element> {
    mesh.triangles()
        .iter()
        .zip(mesh.triangle_coords())
        .map(|(&nodes, &p)| {
            let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
            let mut grads = [[0.0; 2]; 3];
            for a in 0..3 {
                let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                grads[a] = [(p[b][1] - p[c][1]) / det, (p[c][0] - p[b][0]) / det];
            }
            Element { nodes, coords: p, area: 0.5 * det, grads }
        })
        .collect()
}

/// Right-hand side: zero on non-bottom nodes, c_{j,ℓ} on bottom nodes.
pub fn assemble_rhs(table: &DirichletTable, mesh: &PeriodicCellMesh) -> Result<Vec<Complex64>> {
    if table.n_bottom() != mesh.nx() {
        return Err(Error::Parameter(format!(
            "boundary table has {} nodes, mesh has {}",
            table.n_bottom(),
            mesh.nx()
        )));
    }
    let (m, mp, n) = (mesh.m(), mesh.m_prime(), table.n());
    let mut f = vec![Complex64::new(0.0, 0.0); n * mp];
    for j in 0..n {
        for b in 0..mesh.nx() {
            f[j * mp + m + b] = table.get(j, b);
        }
    }
    Ok(f)
}

/// Which representation of the coupling to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingMode {
    /// Explicit when N ≤ 16 and M′ ≤ 5000, matrix-free otherwise.
    Auto,
    Explicit,
    MatrixFree,
}

impl CouplingMode {
    pub fn resolve(self, n: usize, m_prime: usize) -> CouplingMode {
        match self {
            CouplingMode::Auto if n <= 16 && m_prime <= 5000 => CouplingMode::Explicit,
            CouplingMode::Auto => CouplingMode::MatrixFree,
            other => other,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Coupling {
    /// Flat surface coincident with h₀: B ≡ 0.
    Zero,
    Explicit(CouplingBlocks),
    MatrixFree(CouplingOperator),
}

#[derive(Clone, Debug)]
pub struct BlockSystem {
    n: usize,
    m: usize,
    m_prime: usize,
    diag: Vec<CsrMatrix>,
    coupling: Coupling,
    rhs: Vec<Complex64>,
}

impl BlockSystem {
    pub fn new(diag: Vec<CsrMatrix>, coupling: Coupling, rhs: Vec<Complex64>, m: usize) -> Result<Self> {
        let n = diag.len();
        let m_prime = diag.first().map_or(0, |d| d.n_rows());
        if n == 0 || rhs.len() != n * m_prime || diag.iter().any(|d| d.n_rows() != m_prime || d.n_cols() != m_prime) {
            return Err(Error::Parameter("inconsistent block system dimensions".into()));
        }
        Ok(Self { n, m, m_prime, diag, coupling, rhs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn m_prime(&self) -> usize {
        self.m_prime
    }

    pub fn diag_blocks(&self) -> &[CsrMatrix] {
        &self.diag
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn rhs(&self) -> &[Complex64] {
        &self.rhs
    }

    /// y = B x only.
    pub fn apply_coupling(&self, x: &[Complex64], y: &mut [Complex64]) {
        match &self.coupling {
            Coupling::Zero => y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0)),
            Coupling::Explicit(b) => b.apply(x, y),
            Coupling::MatrixFree(op) => op.apply(x, y),
        }
    }
}

impl LinearOperator for BlockSystem {
    fn dim(&self) -> usize {
        self.n * self.m_prime
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.apply_coupling(x, y);
        let mp = self.m_prime;
        for (j, a) in self.diag.iter().enumerate() {
            a.matvec_add(&x[j * mp..(j + 1) * mp], &mut y[j * mp..(j + 1) * mp]);
        }
    }
}
