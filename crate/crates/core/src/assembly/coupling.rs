use num_complex::Complex64;
use rayon::prelude::*;

use super::{elements, Element};
use crate::bloch::{BlochGrid, PhaseDft};
use crate::error::{Error, Result};
use crate::geometry::{truncation_cells, CoefficientField};
use crate::mesh::PeriodicCellMesh;
use crate::quadrature::TriangleRule;
use crate::sparse::CsrMatrix;

/// Upper bound on N²·nnz for explicit coupling storage.
pub const EXPLICIT_STORAGE_LIMIT: usize = 200_000_000;

/// Mesh columns per work unit of the matrix-free apply. Fixed so the
/// reduction order does not depend on the thread count.
const COLUMNS_PER_GROUP: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A quadrature point of a triangle below the support top H₀.
#[derive(Clone, Copy, Debug)]
struct QuadPoint {
    x: [f64; 2],
    /// Row of the group's x₁ table.
    xi: usize,
    weight: f64,
    lambdas: [f64; 3],
}

#[derive(Clone, Debug)]
struct CouplingElement {
    elem: Element,
    /// Local slots (column offset · (ny+1) + row) within the element's group.
    slots: [usize; 3],
    quad: Vec<QuadPoint>,
}

/// A run of mesh columns with the cell-shifted surface data at every
/// distinct quadrature abscissa: table[xi · cells + c] = (ζ, ζ′, s, s′)
/// at x₁ + Λp_c. Points of one column share their abscissae across rows.
#[derive(Clone, Debug)]
struct Group {
    c0: usize,
    c1: usize,
    elems: Vec<CouplingElement>,
    table: Vec<[f64; 4]>,
}

/// Matrix-free application of the truncated coupling
/// B[(n,m),(j,ℓ)] = Σ_{p ∈ cells} ∫ A(x₁+Λp, x₂) ∇U·conj∇V − k² c U conj V
/// with U, V the physical-cell images of the basis functions (j,ℓ), (n,m).
///
/// At each quadrature point the j-sum of the synthesis and the n-sum of the
/// projection are length-N DFTs, using e^{−iα_jΛp} = e^{−iα_0Λp} e^{−2πi jp/N}.
#[derive(Clone, Debug)]
pub struct CouplingOperator {
    grid: BlochGrid,
    field: CoefficientField,
    k: f64,
    cells: Vec<i64>,
    m: usize,
    m_prime: usize,
    nx: usize,
    ny: usize,
    groups: Vec<Group>,
    dft: PhaseDft,
}

impl CouplingOperator {
    /// Operator summed over Z_N.
    pub fn new(mesh: &PeriodicCellMesh, grid: &BlochGrid, field: &CoefficientField, k: f64) -> Self {
        Self::with_cells(mesh, grid, field, k, truncation_cells(grid.n()).collect())
    }

    /// Operator summed over an arbitrary list of physical cells.
    pub fn with_cells(mesh: &PeriodicCellMesh, grid: &BlochGrid, field: &CoefficientField, k: f64, cells: Vec<i64>) -> Self {
        let rule = TriangleRule::degree5();
        let elems = elements(mesh);
        let (nx, ny) = (mesh.nx(), mesh.ny());
        let top = field.support_top();
        let mut groups = Vec::new();
        let mut c0 = 0;
        while c0 < nx {
            let c1 = (c0 + COLUMNS_PER_GROUP).min(nx);
            let mut list = Vec::new();
            let mut abscissae: Vec<f64> = Vec::new();
            for c in c0..c1 {
                for t in mesh.column_triangles(c) {
                    let e = elems[t];
                    let quad: Vec<QuadPoint> = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(l, w)| {
                            let x = [0, 1].map(|d| l[0] * e.coords[0][d] + l[1] * e.coords[1][d] + l[2] * e.coords[2][d]);
                            let xi = match abscissae.iter().position(|&a| a.to_bits() == x[0].to_bits()) {
                                Some(i) => i,
                                None => {
                                    abscissae.push(x[0]);
                                    abscissae.len() - 1
                                }
                            };
                            QuadPoint { x, xi, weight: w * e.area, lambdas: *l }
                        })
                        .filter(|q| q.x[1] < top)
                        .collect();
                    if quad.is_empty() {
                        continue;
                    }
                    let slots = e.coords.map(|p| {
                        let col = (p[0] / mesh.dx()).round() as usize;
                        let row = ((p[1] - mesh.h0()) / mesh.dy()).round() as usize;
                        (col - c0) * (ny + 1) + row
                    });
                    list.push(CouplingElement { elem: e, slots, quad });
                }
            }
            let profile = field.map().profile();
            let table = abscissae
                .iter()
                .flat_map(|&x1| {
                    cells.iter().map(move |&p| {
                        let xp = x1 + grid.lambda() * p as f64;
                        let (z, dz) = profile.height_and_slope(xp);
                        let (s, ds) = grid.envelope_with_slope(xp);
                        [z, dz, s, ds]
                    })
                })
                .collect();
            groups.push(Group { c0, c1, elems: list, table });
            c0 = c1;
        }
        Self {
            grid: grid.clone(),
            field: field.clone(),
            k,
            cells,
            m: mesh.m(),
            m_prime: mesh.m_prime(),
            nx,
            ny,
            groups,
            dft: PhaseDft::new(grid.n()),
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.n() * self.m_prime
    }

    pub fn cells(&self) -> &[i64] {
        &self.cells
    }

    /// out = B w.
    pub fn apply(&self, w: &[Complex64], out: &mut [Complex64]) {
        let n = self.grid.n();
        let mp = self.m_prime;
        assert_eq!(w.len(), n * mp);
        assert_eq!(out.len(), n * mp);
        let partial: Vec<Vec<Complex64>> = self.groups.par_iter().map(|g| self.apply_group(g, w)).collect();
        out.iter_mut().for_each(|v| *v = ZERO);
        let rows = self.ny + 1;
        for (Group { c0, c1, .. }, buf) in self.groups.iter().zip(&partial) {
            let width = (c1 - c0 + 1) * rows;
            for off in 0..=(c1 - c0) {
                let col = c0 + off;
                for r in 1..rows {
                    let dof = dof_of(self.nx, self.ny, col, r);
                    for j in 0..n {
                        out[j * mp + dof] += buf[j * width + off * rows + r];
                    }
                }
            }
        }
        // Bottom test rows are Dirichlet rows.
        for j in 0..n {
            out[j * mp + self.m..(j + 1) * mp].iter_mut().for_each(|v| *v = ZERO);
        }
    }

    fn apply_group(&self, group: &Group, w: &[Complex64]) -> Vec<Complex64> {
        let (c0, c1) = (group.c0, group.c1);
        let n = self.grid.n();
        let nn = n as i64;
        let mp = self.m_prime;
        let rows = self.ny + 1;
        let width = (c1 - c0 + 1) * rows;
        let mut buf = vec![ZERO; n * width];
        let c_l = self.grid.c_lambda();
        let lambda = self.grid.lambda();
        let alphas = self.grid.alphas();
        let a0 = alphas[0];
        let step = self.grid.step();
        let k2 = self.k * self.k;
        let cell_phase: Vec<(usize, Complex64)> = self
            .cells
            .iter()
            .map(|&p| (p.rem_euclid(nn) as usize, Complex64::from_polar(1.0, -a0 * lambda * p as f64)))
            .collect();
        let mut scratch = vec![ZERO; self.dft.scratch_len()];
        let mut wv = vec![[ZERO; 3]; n];
        let mut gx = vec![ZERO; n];
        let mut gy = vec![ZERO; n];
        // forward inputs: value, α·value, ∂₁, ∂₂; projections: P0, P1, P2
        let mut fwd = vec![ZERO; 4 * n];
        let mut back = vec![ZERO; 3 * n];
        let mut phase = vec![ZERO; n];
        let map = self.field.map();
        let ncells = self.cells.len();
        for ce in &group.elems {
            let e = &ce.elem;
            for j in 0..n {
                let base = j * mp;
                wv[j] = e.nodes.map(|v| w[base + v]);
                gx[j] = (0..3).map(|a| wv[j][a] * e.grads[a][0]).sum();
                gy[j] = (0..3).map(|a| wv[j][a] * e.grads[a][1]).sum();
            }
            for q in &ce.quad {
                let x1 = q.x[0];
                let l = q.lambdas;
                let mut ph = Complex64::from_polar(1.0, -a0 * x1);
                let rot = Complex64::from_polar(1.0, -step * x1);
                for j in 0..n {
                    phase[j] = ph;
                    let val = wv[j][0] * l[0] + wv[j][1] * l[1] + wv[j][2] * l[2];
                    let v = ph * val;
                    fwd[j] = v;
                    fwd[n + j] = v * alphas[j];
                    fwd[2 * n + j] = ph * gx[j];
                    fwd[3 * n + j] = ph * gy[j];
                    ph *= rot;
                }
                self.dft.forward(&mut fwd, &mut scratch);
                back.iter_mut().for_each(|v| *v = ZERO);
                let mut any = false;
                let rows = &group.table[q.xi * ncells..(q.xi + 1) * ncells];
                for (&[z, dz, s, ds], &(pm, e_p)) in rows.iter().zip(&cell_phase) {
                    let (a, c) = map.perturbation_at_height(z, dz, q.x[1]);
                    if a == [0.0; 3] && c == 0.0 {
                        continue;
                    }
                    any = true;
                    let v = fwd[pm] * e_p;
                    let va = fwd[n + pm] * e_p;
                    let vx = fwd[2 * n + pm] * e_p;
                    let vy = fwd[3 * n + pm] * e_p;
                    let u = v * (c_l * s);
                    let u1 = (v * ds + Complex64::new(0.0, -s) * va + vx * s) * c_l;
                    let u2 = vy * (c_l * s);
                    let f1 = u1 * a[0] + u2 * a[1];
                    let f2 = u1 * a[1] + u2 * a[2];
                    let mv = u * (-k2 * c);
                    let scale = e_p.conj() * (q.weight * c_l);
                    back[pm] += (f1 * ds + mv * s) * scale;
                    back[n + pm] += f1 * (s * scale);
                    back[2 * n + pm] += f2 * (s * scale);
                }
                if !any {
                    continue;
                }
                self.dft.inverse(&mut back, &mut scratch);
                for i in 0..n {
                    let ph = phase[i].conj();
                    let value = (back[i] + Complex64::new(0.0, alphas[i]) * back[n + i]) * ph;
                    let g1 = back[n + i] * ph;
                    let g2 = back[2 * n + i] * ph;
                    let row = &mut buf[i * width..(i + 1) * width];
                    for a in 0..3 {
                        row[ce.slots[a]] += value * l[a] + g1 * e.grads[a][0] + g2 * e.grads[a][1];
                    }
                }
            }
        }
        buf
    }
}

fn dof_of(nx: usize, ny: usize, col: usize, r: usize) -> usize {
    let i = if col == 0 { nx } else { col };
    if r == 0 {
        nx * ny + i - 1
    } else {
        (r - 1) * nx + i - 1
    }
}

/// Explicit coupling blocks B_{nj} (test interval n, trial interval j), all
/// sharing one sparsity pattern: rows are non-bottom test nodes, columns
/// every node of the FEM stencil.
#[derive(Clone, Debug)]
pub struct CouplingBlocks {
    n: usize,
    pattern: CsrMatrix,
    values: Vec<Vec<Complex64>>,
}

impl CouplingBlocks {
    pub fn n(&self) -> usize {
        self.n
    }

    /// B_{nj} as a sparse matrix.
    pub fn block(&self, n: usize, j: usize) -> CsrMatrix {
        CsrMatrix::from_parts(
            self.pattern.n_rows(),
            self.pattern.n_cols(),
            self.pattern.row_ptr().to_vec(),
            self.pattern.col_idx().to_vec(),
            self.values[n * self.n + j].clone(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|b| b.iter().all(|v| *v == ZERO))
    }

    /// y = B x.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let mp = self.pattern.n_rows();
        let rp = self.pattern.row_ptr();
        let ci = self.pattern.col_idx();
        y.par_chunks_mut(mp).enumerate().for_each(|(n, yn)| {
            yn.iter_mut().for_each(|v| *v = ZERO);
            for j in 0..self.n {
                let vals = &self.values[n * self.n + j];
                let xj = &x[j * mp..(j + 1) * mp];
                for r in 0..mp {
                    let mut s = ZERO;
                    for k in rp[r]..rp[r + 1] {
                        s += vals[k] * xj[ci[k]];
                    }
                    yn[r] += s;
                }
            }
        });
    }
}

/// Explicit assembly of the coupling on Z_N with the 7-point rule.
///
/// Within a triangle the integrand for the pair (n, j) is a bilinear
/// polynomial in (α_n, α_j) times e^{i(n−j)ΔX}, so the cell sum is gathered
/// once per index difference and expanded afterwards.
pub fn assemble_coupling_explicit(
    mesh: &PeriodicCellMesh,
    grid: &BlochGrid,
    field: &CoefficientField,
    k: f64,
) -> Result<CouplingBlocks> {
    let n = grid.n();
    let m = mesh.m();
    let mp = mesh.m_prime();
    let elems = elements(mesh);
    let mut trip = Vec::with_capacity(9 * elems.len());
    for e in &elems {
        for &r in &e.nodes {
            if r < m {
                for &c in &e.nodes {
                    trip.push((r, c, ZERO));
                }
            }
        }
    }
    let pattern = CsrMatrix::from_triplets(mp, mp, trip);
    let needed = n * n * pattern.nnz();
    if needed > EXPLICIT_STORAGE_LIMIT {
        return Err(Error::StorageGuard { needed, limit: EXPLICIT_STORAGE_LIMIT });
    }
    let mut values = vec![vec![ZERO; pattern.nnz()]; n * n];
    let rule = TriangleRule::degree5();
    let cells: Vec<i64> = truncation_cells(n).collect();
    let c2 = grid.c_lambda() * grid.c_lambda();
    let lambda = grid.lambda();
    let step = grid.step();
    let alphas = grid.alphas();
    let nd = 2 * n - 1;
    // kernels[d][term][a][b], term: 0 → 1, 1 → α_n, 2 → α_j, 3 → α_jα_n
    let mut kernels = vec![[[[ZERO; 3]; 3]; 4]; nd];
    for e in &elems {
        if e.nodes.iter().all(|&v| v >= m) {
            continue;
        }
        kernels.iter_mut().for_each(|t| *t = [[[ZERO; 3]; 3]; 4]);
        let mut touched = false;
        for (l, wq) in rule.points.iter().zip(&rule.weights) {
            let x = [0, 1].map(|d| l[0] * e.coords[0][d] + l[1] * e.coords[1][d] + l[2] * e.coords[2][d]);
            for &p in &cells {
                let xp = x[0] + lambda * p as f64;
                let (a, c) = field.map().perturbation(xp, x[1]);
                if a == [0.0; 3] && c == 0.0 {
                    continue;
                }
                touched = true;
                let (s, ds) = grid.envelope_with_slope(xp);
                let w = wq * e.area * c2;
                let u0 = [0, 1, 2].map(|b| ds * l[b] + s * e.grads[b][0]);
                let u1 = [0, 1, 2].map(|b| s * l[b]);
                let u2 = [0, 1, 2].map(|b| s * e.grads[b][1]);
                let mut terms = [[[ZERO; 3]; 3]; 4];
                for ta in 0..3 {
                    for tb in 0..3 {
                        let p00 = a[0] * u0[tb] * u0[ta] + a[1] * (u2[tb] * u0[ta] + u0[tb] * u2[ta]) + a[2] * u2[tb] * u2[ta]
                            - k * k * c * u1[tb] * u1[ta];
                        let pn = a[0] * u0[tb] * u1[ta] + a[1] * u2[tb] * u1[ta];
                        let pj = a[0] * u1[tb] * u0[ta] + a[1] * u1[tb] * u2[ta];
                        let pjn = a[0] * u1[tb] * u1[ta];
                        terms[0][ta][tb] = Complex64::new(w * p00, 0.0);
                        terms[1][ta][tb] = Complex64::new(0.0, w * pn);
                        terms[2][ta][tb] = Complex64::new(0.0, -w * pj);
                        terms[3][ta][tb] = Complex64::new(w * pjn, 0.0);
                    }
                }
                let base = Complex64::from_polar(1.0, -((n - 1) as f64) * step * xp);
                let rot = Complex64::from_polar(1.0, step * xp);
                let mut ph = base;
                for kd in kernels.iter_mut() {
                    for t in 0..4 {
                        for ta in 0..3 {
                            for tb in 0..3 {
                                kd[t][ta][tb] += ph * terms[t][ta][tb];
                            }
                        }
                    }
                    ph *= rot;
                }
            }
        }
        if !touched {
            continue;
        }
        let pos: Vec<[Option<usize>; 3]> = (0..3)
            .map(|ta| {
                let r = e.nodes[ta];
                [0, 1, 2].map(|tb| if r < m { pattern.position(r, e.nodes[tb]) } else { None })
            })
            .collect();
        for ni in 0..n {
            for ji in 0..n {
                let kd = &kernels[ni + n - 1 - ji];
                let (an, aj) = (alphas[ni], alphas[ji]);
                let block = &mut values[ni * n + ji];
                for ta in 0..3 {
                    for tb in 0..3 {
                        if let Some(p) = pos[ta][tb] {
                            block[p] += kd[0][ta][tb] + kd[1][ta][tb] * an + kd[2][ta][tb] * aj + kd[3][ta][tb] * (an * aj);
                        }
                    }
                }
            }
        }
    }
    Ok(CouplingBlocks { n, pattern, values })
}
