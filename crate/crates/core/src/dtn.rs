//! Quasi-periodic Dirichlet-to-Neumann map on the top boundary Γ_H.
//!
//! For a quasi-periodic trace with periodic part φ(x₁) = Σ φ̂(j) e^{iΛ*jx₁}
//! the map acts as φ ↦ Σ iβ_j(α) φ̂(j) e^{iΛ*jx₁}, β_j(α) = √(k² − (Λ*j − α)²).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::PeriodicCellMesh;
use crate::quadrature::gauss_legendre_on;

/// Gauss points per α interval for the DtN symbol.
pub const ALPHA_GAUSS_POINTS: usize = 5;

#[derive(Clone, Debug)]
pub struct DtnConfig {
    k: f64,
    lambda: f64,
    lambda_star: f64,
    j_dtn: usize,
}

impl DtnConfig {
    /// Requires j_dtn ≥ ceil(kΛ/2π) + 2 so every propagating mode is kept.
    pub fn new(k: f64, lambda: f64, j_dtn: usize) -> Result<Self> {
        if !(k > 0.0 && lambda > 0.0) {
            return Err(Error::Parameter(format!("need k > 0 and Λ > 0, got k = {k}, Λ = {lambda}")));
        }
        let min = Self::min_modes(k, lambda);
        if j_dtn < min {
            return Err(Error::Parameter(format!("J_dtn = {j_dtn} drops propagating modes; need at least {min}")));
        }
        Ok(Self { k, lambda, lambda_star: 2.0 * PI / lambda, j_dtn })
    }

    /// Smallest admissible cutoff, ceil(kΛ/2π) + 2.
    pub fn min_modes(k: f64, lambda: f64) -> usize {
        (k * lambda / (2.0 * PI)).ceil() as usize + 2
    }

    /// Default cutoff min(nx/2, 60), raised to the admissible minimum.
    pub fn default_modes(k: f64, mesh: &PeriodicCellMesh) -> usize {
        (mesh.nx() / 2).min(60).max(Self::min_modes(k, mesh.lambda()))
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda_star(&self) -> f64 {
        self.lambda_star
    }

    pub fn j_dtn(&self) -> usize {
        self.j_dtn
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let j = self.j_dtn as i64;
        -j..=j
    }

    /// Warns when some β_j(α) is within 1e-8 k of zero.
    pub fn check_wood_anomaly(&self, alpha: f64) {
        for j in self.modes() {
            let b = beta(self, j, alpha);
            if b.norm() < 1e-8 * self.k {
                log::warn!("Wood anomaly: beta_{j}({alpha}) = {b}");
            }
        }
    }
}

/// β_j(α) with Re ≥ 0, Im ≥ 0.
pub fn beta(config: &DtnConfig, j: i64, alpha: f64) -> Complex64 {
    let xi = config.lambda_star * j as f64 - alpha;
    let d = config.k * config.k - xi * xi;
    if d >= 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d).sqrt())
    }
}

/// ∫_a^b ((b−x)/(b−a), (x−a)/(b−a)) e^{−iξx} dx, exact.
pub fn linear_exp_integrals(a: f64, b: f64, xi: f64) -> (Complex64, Complex64) {
    let h = b - a;
    let z = xi * h;
    // I0 = ∫_0^h e^{−iξu} du / h, I1 = ∫_0^h (u/h) e^{−iξu} du / h
    let (i0, i1) = if z.abs() < 0.5 {
        let w = Complex64::new(0.0, -z);
        let (mut p, mut s0, mut s1) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut fact = 1.0;
        for n in 0..24 {
            if n > 0 {
                p *= w;
                fact *= n as f64;
            }
            s0 += p / (fact * (n + 1) as f64);
            s1 += p / (fact * (n + 2) as f64);
        }
        (s0, s1)
    } else {
        let e = Complex64::from_polar(1.0, -z);
        let i = Complex64::i();
        ((Complex64::new(1.0, 0.0) - e) / (i * z), i * e / z + (e - 1.0) / (z * z))
    };
    let shift = Complex64::from_polar(h, -xi * a);
    (shift * (i0 - i1), shift * i1)
}

/// Fourier coefficients of the top-boundary hat functions:
/// row j ∈ −J..=J, column = top node (column order).
#[derive(Clone, Debug)]
pub struct TraceTransform {
    j_dtn: usize,
    n_top: usize,
    coeffs: Vec<Complex64>,
}

impl TraceTransform {
    pub fn new(mesh: &PeriodicCellMesh, lambda_star: f64, j_dtn: usize) -> Self {
        let nx = mesh.nx();
        let dx = mesh.dx();
        let rows = 2 * j_dtn + 1;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); rows * nx];
        let inv_l = 1.0 / mesh.lambda();
        for (r, j) in (-(j_dtn as i64)..=j_dtn as i64).enumerate() {
            let xi = lambda_star * j as f64;
            for c in 0..nx {
                let (a, b) = (c as f64 * dx, (c + 1) as f64 * dx);
                let (left, right) = linear_exp_integrals(a, b, xi);
                // column c spans nodes c (≡ nx at c = 0) and c+1
                let ln = if c == 0 { nx - 1 } else { c - 1 };
                coeffs[r * nx + ln] += left * inv_l;
                coeffs[r * nx + c] += right * inv_l;
            }
        }
        Self { j_dtn, n_top: nx, coeffs }
    }

    pub fn n_top(&self) -> usize {
        self.n_top
    }

    /// φ̂^{(ℓ)}(j).
    pub fn get(&self, j: i64, l: usize) -> Complex64 {
        self.coeffs[(j + self.j_dtn as i64) as usize * self.n_top + l]
    }

    fn row(&self, j: i64) -> &[Complex64] {
        let r = (j + self.j_dtn as i64) as usize;
        &self.coeffs[r * self.n_top..(r + 1) * self.n_top]
    }

    /// Rank-one sum Σ_j w_j φ̂^{(ℓ)}(j) conj(φ̂^{(m)}(j)) as a dense matrix [m][ℓ].
    fn weighted_gram(&self, weights: impl Fn(i64) -> Complex64) -> BoundaryMatrix {
        let n = self.n_top;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for j in -(self.j_dtn as i64)..=self.j_dtn as i64 {
            let w = weights(j);
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            let row = self.row(j);
            for m in 0..n {
                let cm = row[m].conj() * w;
                for l in 0..n {
                    data[m * n + l] += cm * row[l];
                }
            }
        }
        BoundaryMatrix { n, data }
    }
}

/// Coefficients φ̂(j), |j| ≤ J, of the piecewise-linear interpolant of
/// `values` (given per top node in column order).
pub fn boundary_fourier_coeffs(mesh: &PeriodicCellMesh, values: &[Complex64], lambda_star: f64, j_dtn: usize) -> Vec<Complex64> {
    let t = TraceTransform::new(mesh, lambda_star, j_dtn);
    (-(j_dtn as i64)..=j_dtn as i64)
        .map(|j| t.row(j).iter().zip(values).map(|(a, b)| a * b).sum())
        .collect()
}

/// Dense matrix over the top-boundary nodes, indexed [test m][trial ℓ].
#[derive(Clone, Debug)]
pub struct BoundaryMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl BoundaryMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, m: usize, l: usize) -> Complex64 {
        self.data[m * self.n + l]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// v* Q v.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for m in 0..self.n {
            let row: Complex64 = (0..self.n).map(|l| self.data[m * self.n + l] * v[l]).sum();
            s += v[m].conj() * row;
        }
        s
    }
}

/// Q(α)[m, ℓ] = −iΛ Σ_j β_j(α) φ̂^{(ℓ)}(j) conj(φ̂^{(m)}(j)).
pub fn dtn_bilinear_matrix(config: &DtnConfig, mesh: &PeriodicCellMesh, alpha: f64) -> BoundaryMatrix {
    let t = TraceTransform::new(mesh, config.lambda_star, config.j_dtn);
    dtn_matrix_with(config, &t, |j| beta(config, j, alpha))
}

/// Propagating and evanescent parts (P, E) of Q(α).
pub fn dtn_split(config: &DtnConfig, mesh: &PeriodicCellMesh, alpha: f64) -> (BoundaryMatrix, BoundaryMatrix) {
    let t = TraceTransform::new(mesh, config.lambda_star, config.j_dtn);
    let prop = dtn_matrix_with(config, &t, |j| {
        let b = beta(config, j, alpha);
        if b.im == 0.0 { b } else { Complex64::new(0.0, 0.0) }
    });
    let evan = dtn_matrix_with(config, &t, |j| {
        let b = beta(config, j, alpha);
        if b.im == 0.0 { Complex64::new(0.0, 0.0) } else { b }
    });
    (prop, evan)
}

/// ∫_{lo}^{hi} Q(α) dα with Gauss-Legendre in α.
pub fn dtn_interval_matrix(config: &DtnConfig, trace: &TraceTransform, lo: f64, hi: f64) -> BoundaryMatrix {
    let (pts, wts) = gauss_legendre_on(ALPHA_GAUSS_POINTS, lo, hi);
    for &a in &pts {
        config.check_wood_anomaly(a);
    }
    dtn_matrix_with(config, trace, |j| pts.iter().zip(&wts).map(|(&a, &w)| beta(config, j, a) * w).sum())
}

fn dtn_matrix_with(config: &DtnConfig, trace: &TraceTransform, symbol: impl Fn(i64) -> Complex64) -> BoundaryMatrix {
    let scale = Complex64::new(0.0, -config.lambda);
    trace.weighted_gram(|j| scale * symbol(j))
}
