use num_complex::Complex64;

use super::{elements, Element};
use crate::bloch::BlochGrid;
use crate::dtn::{dtn_interval_matrix, DtnConfig, TraceTransform};
use crate::mesh::PeriodicCellMesh;
use crate::sparse::CsrMatrix;

/// Shared pattern and α-independent pieces of the diagonal blocks.
///
/// For the periodic part w₀ of w = e^{−iαx₁}w₀ the cell form is
/// ∫ (∇−iαe₁)w₀·conj((∇−iαe₁)v₀) − k² w₀ v̄₀ minus the DtN term, so a test
/// row m and trial column ℓ carry S + iα(D − Dᵀ) + (α² − k²)M with
/// D[m, ℓ] = ∫ ∂₁φ_ℓ φ_m. Integrating over an α interval uses the exact
/// moments of 1, α and α².
#[derive(Clone, Debug)]
pub struct DiagonalAssembler {
    k: f64,
    m: usize,
    pattern: CsrMatrix,
    stiffness: Vec<f64>,
    mass: Vec<f64>,
    skew: Vec<f64>,
    /// (storage position, test top index, trial top index)
    boundary: Vec<(usize, usize, usize)>,
    trace: TraceTransform,
    dtn: DtnConfig,
}

impl DiagonalAssembler {
    pub fn new(mesh: &PeriodicCellMesh, dtn: &DtnConfig) -> Self {
        let m = mesh.m();
        let mp = mesh.m_prime();
        let elems = elements(mesh);
        let top = mesh.top_nodes();
        let zero = Complex64::new(0.0, 0.0);
        let mut trip = Vec::with_capacity(9 * elems.len() + top.len() * top.len() + mp - m);
        for e in &elems {
            for &r in &e.nodes {
                if r < m {
                    for &c in &e.nodes {
                        trip.push((r, c, zero));
                    }
                }
            }
        }
        for &r in &top {
            for &c in &top {
                trip.push((r, c, zero));
            }
        }
        for r in m..mp {
            trip.push((r, r, zero));
        }
        let pattern = CsrMatrix::from_triplets(mp, mp, trip);
        let nnz = pattern.nnz();
        let (mut stiffness, mut mass, mut skew) = (vec![0.0; nnz], vec![0.0; nnz], vec![0.0; nnz]);
        for e in &elems {
            add_element(e, m, &pattern, &mut stiffness, &mut mass, &mut skew);
        }
        let mut boundary = Vec::with_capacity(top.len() * top.len());
        for (tm, &r) in top.iter().enumerate() {
            for (tl, &c) in top.iter().enumerate() {
                boundary.push((pattern.position(r, c).expect("top pattern"), tm, tl));
            }
        }
        let trace = TraceTransform::new(mesh, dtn.lambda_star(), dtn.j_dtn());
        Self { k: dtn.k(), m, pattern, stiffness, mass, skew, boundary, trace, dtn: dtn.clone() }
    }

    pub fn pattern(&self) -> &CsrMatrix {
        &self.pattern
    }

    /// ∫ over [lo, hi] of the cell form, with identity rows for bottom nodes.
    pub fn interval_block(&self, lo: f64, hi: f64) -> CsrMatrix {
        let len = hi - lo;
        let mid = 0.5 * (lo + hi);
        let m1 = len * mid;
        let m2 = len * (mid * mid + len * len / 12.0);
        let mut values: Vec<Complex64> = (0..self.pattern.nnz())
            .map(|p| {
                Complex64::new(
                    len * (self.stiffness[p] - self.k * self.k * self.mass[p]) + m2 * self.mass[p],
                    m1 * self.skew[p],
                )
            })
            .collect();
        let q = dtn_interval_matrix(&self.dtn, &self.trace, lo, hi);
        for &(pos, tm, tl) in &self.boundary {
            values[pos] += q.get(tm, tl);
        }
        for r in self.m..self.pattern.n_rows() {
            values[self.pattern.position(r, r).unwrap()] = Complex64::new(1.0, 0.0);
        }
        CsrMatrix::from_parts(
            self.pattern.n_rows(),
            self.pattern.n_cols(),
            self.pattern.row_ptr().to_vec(),
            self.pattern.col_idx().to_vec(),
            values,
        )
    }

    /// A_j for zero-based interval j of the grid.
    pub fn block(&self, grid: &BlochGrid, j: usize) -> CsrMatrix {
        let (lo, hi) = grid.interval(j);
        self.interval_block(lo, hi)
    }
}

fn add_element(e: &Element, m: usize, pattern: &CsrMatrix, s: &mut [f64], mass: &mut [f64], skew: &mut [f64]) {
    for a in 0..3 {
        let r = e.nodes[a];
        if r >= m {
            continue;
        }
        for b in 0..3 {
            let pos = pattern.position(r, e.nodes[b]).expect("element pattern");
            let g = &e.grads;
            s[pos] += e.area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
            mass[pos] += e.area / 12.0 * if a == b { 2.0 } else { 1.0 };
            // D[a, b] − D[b, a] with D[a, b] = ∫ ∂₁λ_b λ_a = area/3 ∂₁λ_b
            skew[pos] += e.area / 3.0 * (g[b][0] - g[a][0]);
        }
    }
}

/// A_j assembled from scratch; prefer [`DiagonalAssembler`] for many blocks.
pub fn assemble_diagonal_block(j: usize, mesh: &PeriodicCellMesh, dtn: &DtnConfig, grid: &BlochGrid) -> CsrMatrix {
    DiagonalAssembler::new(mesh, dtn).block(grid, j)
}
