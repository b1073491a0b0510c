//! Point-source data: the half-space Green's function, its Bloch-transformed
//! trace on the bottom boundary, and the exact reference field on Γ_H.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bloch::BlochGrid;
use crate::error::{Error, Result};
use crate::geometry::{truncation_cells, SurfaceProfile};
use crate::mesh::PeriodicCellMesh;
use crate::special::hankel_h0;

/// Default half-width of the cell window summed for the boundary data.
pub const DEFAULT_WINDOW: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSource {
    pub y: [f64; 2],
    pub k: f64,
}

impl PointSource {
    /// Requires 0 < y₂ < h₀ and k > 0.
    pub fn new(y: [f64; 2], k: f64, h0: f64) -> Result<Self> {
        if !(y[0].is_finite() && y[1] > 0.0 && y[1] < h0) {
            return Err(Error::Parameter(format!("source {y:?} must satisfy 0 < y2 < h0 = {h0}")));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Parameter(format!("wavenumber must be positive, got {k}")));
        }
        Ok(Self { y, k })
    }

    pub fn green(&self, x: [f64; 2]) -> Result<Complex64> {
        greens_halfspace(x, self.y, self.k)
    }
}

/// G(x, y) = (i/4)[H₀⁽¹⁾(k|x−y|) − H₀⁽¹⁾(k|x−y′|)], y′ = (y₁, −y₂).
pub fn greens_halfspace(x: [f64; 2], y: [f64; 2], k: f64) -> Result<Complex64> {
    let dx = x[0] - y[0];
    let r = dx.hypot(x[1] - y[1]);
    if r == 0.0 {
        return Err(Error::Singularity);
    }
    let r_img = dx.hypot(x[1] + y[1]);
    if r == r_img {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let diff = hankel_h0(k * r)? - hankel_h0(k * r_img)?;
    Ok(Complex64::new(0.0, 0.25) * diff)
}

/// Exact scattered field G((x₁, H), y) on the top boundary.
pub fn exact_reference_on_gamma_h(x1: f64, source: &PointSource, top: f64) -> Result<Complex64> {
    source.green([x1, top])
}

/// Boundary values c_{j,ℓ} for the bottom nodes, stored [j][bottom column].
#[derive(Clone, Debug)]
pub struct DirichletTable {
    n: usize,
    n_bottom: usize,
    values: Vec<Complex64>,
    tail_ratio: f64,
}

impl DirichletTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_bottom(&self) -> usize {
        self.n_bottom
    }

    pub fn get(&self, j: usize, b: usize) -> Complex64 {
        self.values[j * self.n_bottom + b]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Largest ratio of the outermost window term to its partial sum.
    pub fn tail_ratio(&self) -> f64 {
        self.tail_ratio
    }
}

/// c_{j,ℓ} = e^{iα_j x₁} C_Λ Σ_{|p| ≤ N_bc} d_p(x₁) e^{iα_j Λp}, where d_p
/// is G at the surface point (x₁+Λp, ζ(x₁+Λp)) for p ∈ Z_N and at
/// (x₁+Λp, h₀) otherwise. x₁ is the bottom node abscissa reduced to [0, Λ).
pub fn bloch_dirichlet_data(
    grid: &BlochGrid,
    mesh: &PeriodicCellMesh,
    profile: &SurfaceProfile,
    source: &PointSource,
    n_bc: usize,
) -> Result<DirichletTable> {
    let n = grid.n();
    if n_bc < n / 2 {
        return Err(Error::Parameter(format!("window N_bc = {n_bc} is smaller than N/2 = {}", n / 2)));
    }
    let lambda = grid.lambda();
    let h0 = mesh.h0();
    let cells = truncation_cells(n);
    // e^{iα_jΛp} = e^{iα_0Λp} e^{2πi jp/N}
    let roots: Vec<Complex64> = (0..n).map(|q| Complex64::from_polar(1.0, 2.0 * PI * q as f64 / n as f64)).collect();
    let bottoms = mesh.bottom_nodes();
    let per_node: Vec<(Vec<Complex64>, f64)> = bottoms
        .par_iter()
        .map(|&node| -> Result<(Vec<Complex64>, f64)> {
            let x1 = mesh.nodes()[node][0].rem_euclid(lambda);
            let mut acc = vec![Complex64::new(0.0, 0.0); n];
            let mut edge = 0.0f64;
            let nb = n_bc as i64;
            for p in -nb..=nb {
                let xp = x1 + lambda * p as f64;
                let height = if cells.contains(&p) { profile.height_and_slope(xp).0 } else { h0 };
                let d = source.green([xp, height])?;
                if p.abs() == nb {
                    edge = edge.max(d.norm());
                }
                let base = d * Complex64::from_polar(1.0, grid.alpha(0) * lambda * p as f64);
                let q = p.rem_euclid(n as i64) as usize;
                for (j, a) in acc.iter_mut().enumerate() {
                    *a += base * roots[(j * q) % n];
                }
            }
            let mut ratio = 0.0f64;
            for (j, a) in acc.iter_mut().enumerate() {
                ratio = ratio.max(edge / a.norm().max(f64::MIN_POSITIVE));
                *a *= Complex64::from_polar(grid.c_lambda(), grid.alpha(j) * x1);
            }
            Ok((acc, ratio))
        })
        .collect::<Result<_>>()?;
    let nb = bottoms.len();
    let mut values = vec![Complex64::new(0.0, 0.0); n * nb];
    let mut tail_ratio = 0.0f64;
    for (b, (acc, ratio)) in per_node.into_iter().enumerate() {
        tail_ratio = tail_ratio.max(ratio);
        for j in 0..n {
            values[j * nb + b] = acc[j];
        }
    }
    if tail_ratio > 1e-6 {
        log::warn!("boundary data window N_bc = {n_bc}: outermost term is {tail_ratio:.2e} of the partial sum");
    }
    Ok(DirichletTable { n, n_bottom: nb, values, tail_ratio })
}
