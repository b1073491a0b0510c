//! Discrete Floquet-Bloch transform on the α grid.
//!
//! Sign convention used throughout the crate: a quasi-periodic family is
//! stored through its periodic part, w(α, x) = e^{−iαx₁} w₀(α, x), and the
//! field in physical cell p (points x + (Λp, 0), x in the reference cell
//! [0, Λ)) is recovered as
//!
//!   u_p(x) = C_Λ Σ_j e^{−iα_j X} s(X) W_j(x),  X = x₁ + Λp,
//!
//! with the envelope s(X) = 2 sin(πX/(NΛ))/X. In terms of [`g_factor`] this
//! is C_Λ Σ_j g(j, −p, x₁) W_j(x).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::mesh::PeriodicCellMesh;

/// Direct j-summation is used below this N, an FFT above.
pub const FFT_THRESHOLD: usize = 32;

/// N-point midpoint grid on W* = (−π/Λ, π/Λ].
#[derive(Clone, Debug)]
pub struct BlochGrid {
    n: usize,
    lambda: f64,
    alphas: Vec<f64>,
    c_lambda: f64,
}

/// α_j = −π/Λ + π/(NΛ) + 2πj/(NΛ), j = 0..N (zero-based).
pub fn alpha_grid(n: usize, lambda: f64) -> Result<BlochGrid> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Parameter(format!("N must be even and at least 2, got {n}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("period must be positive, got {lambda}")));
    }
    let step = 2.0 * PI / (n as f64 * lambda);
    let alphas = (0..n).map(|j| -PI / lambda + 0.5 * step + step * j as f64).collect();
    Ok(BlochGrid { n, lambda, alphas, c_lambda: (lambda / (2.0 * PI)).sqrt() })
}

impl BlochGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn alpha(&self, j: usize) -> f64 {
        self.alphas[j]
    }

    /// C_Λ = √(Λ/2π).
    pub fn c_lambda(&self) -> f64 {
        self.c_lambda
    }

    /// Width 2π/(NΛ) of every α interval.
    pub fn step(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.lambda)
    }

    /// The j-th interval [α_j − step/2, α_j + step/2].
    pub fn interval(&self, j: usize) -> (f64, f64) {
        let h = 0.5 * self.step();
        (self.alphas[j] - h, self.alphas[j] + h)
    }

    /// s(t) = 2 sin(πt/(NΛ))/t, the envelope of the inverse-transform kernel.
    #[inline]
    pub fn envelope(&self, t: f64) -> f64 {
        envelope(t, PI / (self.n as f64 * self.lambda))
    }

    /// (s(t), s′(t)).
    #[inline]
    pub fn envelope_with_slope(&self, t: f64) -> (f64, f64) {
        let a = PI / (self.n as f64 * self.lambda);
        (envelope(t, a), envelope_slope(t, a))
    }
}

#[inline]
fn envelope(t: f64, a: f64) -> f64 {
    // a = π/(NΛ); |t| < 1e-6·NΛ means |a t| < π·1e-6.
    let at = a * t;
    if at.abs() < PI * 1e-6 {
        let q = at * at;
        2.0 * a * (1.0 - q / 6.0 + q * q / 120.0)
    } else {
        2.0 * at.sin() / t
    }
}

#[inline]
fn envelope_slope(t: f64, a: f64) -> f64 {
    let at = a * t;
    if at.abs() < 0.1 {
        // 2a Σ_{k≥1} (−1)^k 2k (at)^{2k−1} a / (2k+1)!
        let q = at * at;
        let series = -1.0 / 3.0 + q * (1.0 / 30.0 + q * (-1.0 / 840.0 + q * (1.0 / 45360.0 - q / 3991680.0)));
        2.0 * a * a * at * series
    } else {
        let (s, c) = at.sin_cos();
        2.0 * (at * c - s) / (t * t)
    }
}

/// g(j, m, x₁) = e^{−iα_j(x₁−Λm)} · 2 sin(π(x₁−Λm)/(NΛ))/(x₁−Λm),
/// equal to 2π/(NΛ) at x₁ = Λm. `j` is zero-based.
pub fn g_factor(grid: &BlochGrid, j: usize, m: i64, x1: f64) -> Complex64 {
    let t = x1 - grid.lambda * m as f64;
    Complex64::from_polar(grid.envelope(t), -grid.alphas[j] * t)
}

/// C_Λ Σ_m samples[m] e^{−iαΛm}.
pub fn forward_bloch(grid: &BlochGrid, cell_samples: &[(i64, Complex64)], alpha: f64) -> Complex64 {
    let sum: Complex64 = cell_samples
        .iter()
        .map(|&(m, v)| v * Complex64::from_polar(1.0, -alpha * grid.lambda * m as f64))
        .sum();
    sum * grid.c_lambda
}

/// Discrete unknown: N blocks of M′ nodal coefficients, stored block by block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochField {
    n: usize,
    m_prime: usize,
    coeffs: Vec<Complex64>,
}

impl BlochField {
    pub fn zeros(n: usize, m_prime: usize) -> Self {
        Self { n, m_prime, coeffs: vec![Complex64::new(0.0, 0.0); n * m_prime] }
    }

    pub fn from_vec(n: usize, m_prime: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != n * m_prime {
            return Err(Error::Parameter(format!(
                "coefficient vector has length {}, expected {n} x {m_prime}",
                coeffs.len()
            )));
        }
        Ok(Self { n, m_prime, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_prime(&self) -> usize {
        self.m_prime
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, j: usize, l: usize) -> Complex64 {
        self.coeffs[j * self.m_prime + l]
    }

    pub fn set(&mut self, j: usize, l: usize, v: Complex64) {
        self.coeffs[j * self.m_prime + l] = v;
    }

    pub fn block(&self, j: usize) -> &[Complex64] {
        &self.coeffs[j * self.m_prime..(j + 1) * self.m_prime]
    }

    /// P1 interpolant of block j at x.
    pub fn block_value(&self, mesh: &PeriodicCellMesh, j: usize, x: [f64; 2]) -> Complex64 {
        let (t, bary) = mesh.locate(x);
        let tri = mesh.triangles()[t];
        let b = self.block(j);
        (0..3).map(|v| b[tri[v]] * bary[v]).sum()
    }
}

/// Value in physical cell p at reference point x:
/// C_Λ Σ_j g(j, −p, x₁) W_j(x), summed directly.
pub fn inverse_bloch_eval(
    field: &BlochField,
    grid: &BlochGrid,
    mesh: &PeriodicCellMesh,
    p: i64,
    x: [f64; 2],
) -> Complex64 {
    let sum: Complex64 = (0..grid.n)
        .map(|j| g_factor(grid, j, -p, x[0]) * field.block_value(mesh, j, x))
        .sum();
    sum * grid.c_lambda
}

/// Length-N DFT pair used for the j ↔ p factorization
/// e^{−iα_j Λp} = e^{−iα_0 Λp} e^{−2πi jp/N}.
#[derive(Clone)]
pub struct PhaseDft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for PhaseDft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhaseDft").field("n", &self.n).finish()
    }
}

impl PhaseDft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scratch_len(&self) -> usize {
        self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len())
    }

    /// In place y_p = Σ_j e^{−2πi jp/N} x_j on every length-N chunk.
    pub fn forward(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, scratch);
    }

    /// In place y_n = Σ_p e^{+2πi np/N} x_p on every length-N chunk.
    pub fn inverse(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, scratch);
    }
}

/// How the j-sum of a synthesis is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthesisPath {
    Auto,
    Direct,
    Fft,
}

/// Values u_p(x) for all physical cells p in `cells` at one reference point.
pub fn inverse_bloch_cells(
    field: &BlochField,
    grid: &BlochGrid,
    mesh: &PeriodicCellMesh,
    x: [f64; 2],
    cells: &[i64],
    path: SynthesisPath,
) -> Vec<Complex64> {
    let n = grid.n;
    let use_fft = match path {
        SynthesisPath::Auto => n >= FFT_THRESHOLD,
        SynthesisPath::Direct => false,
        SynthesisPath::Fft => true,
    };
    if !use_fft {
        return cells.iter().map(|&p| inverse_bloch_eval(field, grid, mesh, p, x)).collect();
    }
    let mut v: Vec<Complex64> = (0..n)
        .map(|j| field.block_value(mesh, j, x) * Complex64::from_polar(1.0, -grid.alphas[j] * x[0]))
        .collect();
    let dft = PhaseDft::new(n);
    let mut scratch = vec![Complex64::new(0.0, 0.0); dft.scratch_len()];
    dft.forward(&mut v, &mut scratch);
    cells
        .iter()
        .map(|&p| {
            let t = x[0] + grid.lambda * p as f64;
            let twist = Complex64::from_polar(grid.envelope(t) * grid.c_lambda, -grid.alphas[0] * grid.lambda * p as f64);
            v[p.rem_euclid(n as i64) as usize] * twist
        })
        .collect()
}

/// Σ_ℓ (1+ℓ²)^r ‖u_ℓ‖² over (translate index, norm) pairs.
pub fn weighted_norm_sq(translate_norms: &[(i64, f64)], r: f64) -> f64 {
    translate_norms
        .iter()
        .map(|&(l, v)| (1.0 + (l * l) as f64).powf(r) * v * v)
        .sum()
}
