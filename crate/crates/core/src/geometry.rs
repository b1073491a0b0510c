//! Rough-surface profiles, the flattening map and its coefficient fields.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Constant(f64),
    Sine { mean: f64, amplitude: f64, frequency: f64 },
    Custom { f: ScalarFn, df: Option<ScalarFn>, fd_step: f64 },
}

/// Surface height function ζ together with its slope and bounds.
#[derive(Clone)]
pub struct SurfaceProfile {
    shape: Shape,
    inf_height: f64,
    sup_height: f64,
    lipschitz_bound: f64,
}

impl fmt::Debug for SurfaceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.shape {
            Shape::Constant(h) => format!("Constant({h})"),
            Shape::Sine { mean, amplitude, frequency } => {
                format!("Sine({mean} + {amplitude} sin({frequency} t))")
            }
            Shape::Custom { df, .. } => format!("Custom(analytic slope: {})", df.is_some()),
        };
        f.debug_struct("SurfaceProfile")
            .field("shape", &name)
            .field("inf_height", &self.inf_height)
            .field("sup_height", &self.sup_height)
            .field("lipschitz_bound", &self.lipschitz_bound)
            .finish()
    }
}

impl SurfaceProfile {
    pub fn constant(height: f64) -> Result<Self> {
        if !(height.is_finite() && height > 0.0) {
            return Err(Error::Parameter(format!("surface height must be positive, got {height}")));
        }
        Ok(Self { shape: Shape::Constant(height), inf_height: height, sup_height: height, lipschitz_bound: 0.0 })
    }

    /// ζ(t) = mean + amplitude·sin(frequency·t).
    pub fn sine(mean: f64, amplitude: f64, frequency: f64) -> Result<Self> {
        if ![mean, amplitude, frequency].iter().all(|v| v.is_finite()) {
            return Err(Error::Parameter("sine profile parameters must be finite".into()));
        }
        let a = amplitude.abs();
        if mean - a <= 0.0 {
            return Err(Error::Parameter(format!("sine profile dips to {} <= 0", mean - a)));
        }
        Ok(Self {
            shape: Shape::Sine { mean, amplitude, frequency },
            inf_height: mean - a,
            sup_height: mean + a,
            lipschitz_bound: a * frequency.abs(),
        })
    }

    /// User-supplied profile. Without `df` the slope is taken by central
    /// differences with step `1e-6 * lambda`.
    pub fn custom(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
        inf_height: f64,
        sup_height: f64,
        lipschitz_bound: f64,
        lambda: f64,
    ) -> Result<Self> {
        if !(inf_height > 0.0 && inf_height <= sup_height && lipschitz_bound >= 0.0 && lambda > 0.0) {
            return Err(Error::Parameter("custom profile bounds are inconsistent".into()));
        }
        Ok(Self {
            shape: Shape::Custom { f: Arc::new(f), df: df.map(Arc::from), fd_step: 1e-6 * lambda },
            inf_height,
            sup_height,
            lipschitz_bound,
        })
    }

    pub fn inf_height(&self) -> f64 {
        self.inf_height
    }

    pub fn sup_height(&self) -> f64 {
        self.sup_height
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.shape, Shape::Constant(_))
    }

    /// (ζ(t), ζ'(t)) without input validation.
    #[inline]
    pub fn height_and_slope(&self, t: f64) -> (f64, f64) {
        match &self.shape {
            Shape::Constant(h) => (*h, 0.0),
            Shape::Sine { mean, amplitude, frequency } => {
                let (s, c) = (frequency * t).sin_cos();
                (mean + amplitude * s, amplitude * frequency * c)
            }
            Shape::Custom { f, df, fd_step } => {
                let d = match df {
                    Some(df) => df(t),
                    None => (f(t + fd_step) - f(t - fd_step)) / (2.0 * fd_step),
                };
                (f(t), d)
            }
        }
    }
}

/// Evaluates (ζ(t), ζ'(t)).
pub fn eval_profile(profile: &SurfaceProfile, t: f64) -> Result<(f64, f64)> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("profile evaluated at non-finite t = {t}")));
    }
    Ok(profile.height_and_slope(t))
}

/// Half-width of the t-window on which the map is validated at construction.
const CHECK_HALF_WIDTH: f64 = 100.0;
const CHECK_NT: usize = 1024;
const CHECK_NY: usize = 64;

/// The map Θ from the flat strip x₂ > h₀ onto the region above the surface:
/// Θ(x) = (x₁, x₂ + (H₀−x₂)³/(H₀−h₀)³ (ζ(x₁)−h₀)) below H₀, identity above.
#[derive(Clone, Debug)]
pub struct FlatteningMap {
    profile: SurfaceProfile,
    h0: f64,
    big_h0: f64,
    top: f64,
    inv_band_cubed: f64,
}

impl FlatteningMap {
    /// Validates 0 < h₀ < H₀ < H, sup ζ < H₀, and det ∇Θ > 0 on a sample grid.
    pub fn new(profile: SurfaceProfile, h0: f64, big_h0: f64, top: f64) -> Result<Self> {
        if !(h0 > 0.0 && h0 < big_h0 && big_h0 < top) {
            return Err(Error::Parameter(format!(
                "need 0 < h0 < H0 < H, got h0 = {h0}, H0 = {big_h0}, H = {top}"
            )));
        }
        if profile.sup_height() >= big_h0 {
            return Err(Error::Parameter(format!(
                "surface reaches {} which is not below H0 = {big_h0}",
                profile.sup_height()
            )));
        }
        let band = big_h0 - h0;
        let map = Self { profile, h0, big_h0, top, inv_band_cubed: 1.0 / (band * band * band) };
        for it in 0..CHECK_NT {
            let x1 = -CHECK_HALF_WIDTH + 2.0 * CHECK_HALF_WIDTH * it as f64 / (CHECK_NT - 1) as f64;
            for iy in 0..CHECK_NY {
                let x2 = h0 + band * iy as f64 / CHECK_NY as f64;
                let det = map.jacobian_det(x1, x2);
                if !(det > 0.0) {
                    return Err(Error::SingularMap { x1, x2, det });
                }
            }
        }
        Ok(map)
    }

    pub fn profile(&self) -> &SurfaceProfile {
        &self.profile
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn big_h0(&self) -> f64 {
        self.big_h0
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    #[inline]
    fn blend(&self, x2: f64) -> (f64, f64) {
        let d = self.big_h0 - x2;
        (d * d * d * self.inv_band_cubed, -3.0 * d * d * self.inv_band_cubed)
    }

    #[inline]
    fn jacobian_det(&self, x1: f64, x2: f64) -> f64 {
        if x2 >= self.big_h0 {
            return 1.0;
        }
        let (z, _) = self.profile.height_and_slope(x1);
        let (_, dphi) = self.blend(x2);
        1.0 + dphi * (z - self.h0)
    }

    fn check_point(&self, x: [f64; 2]) -> Result<()> {
        if !(x[0].is_finite() && x[1].is_finite()) {
            return Err(Error::Domain(format!("non-finite point {x:?}")));
        }
        if x[1] < self.h0 {
            return Err(Error::Domain(format!("x2 = {} lies below h0 = {}", x[1], self.h0)));
        }
        Ok(())
    }

    /// The Jacobian ∇Θ(x) as rows [[∂₁Θ₁, ∂₂Θ₁], [∂₁Θ₂, ∂₂Θ₂]].
    pub fn jacobian(&self, x: [f64; 2]) -> Result<[[f64; 2]; 2]> {
        self.check_point(x)?;
        if x[1] >= self.big_h0 {
            return Ok([[1.0, 0.0], [0.0, 1.0]]);
        }
        let (z, dz) = self.profile.height_and_slope(x[0]);
        let (phi, dphi) = self.blend(x[1]);
        Ok([[1.0, 0.0], [phi * dz, 1.0 + dphi * (z - self.h0)]])
    }

    /// Perturbation (A_Θ − I, c_Θ − 1) at x, packed as ([a11, a12, a22], c).
    /// Zero above H₀. No validation; callers stay inside the strip.
    #[inline]
    pub fn perturbation(&self, x1: f64, x2: f64) -> ([f64; 3], f64) {
        if x2 >= self.big_h0 {
            return ([0.0; 3], 0.0);
        }
        let (z, dz) = self.profile.height_and_slope(x1);
        self.perturbation_at_height(z, dz, x2)
    }

    /// [`Self::perturbation`] with the surface height and slope at x₁ given.
    #[inline]
    pub fn perturbation_at_height(&self, z: f64, dz: f64, x2: f64) -> ([f64; 3], f64) {
        if x2 >= self.big_h0 {
            return ([0.0; 3], 0.0);
        }
        let (phi, dphi) = self.blend(x2);
        let det = 1.0 + dphi * (z - self.h0);
        let off = phi * dz;
        ([det - 1.0, -off, (1.0 + off * off) / det - 1.0], det - 1.0)
    }
}

/// Θ(x).
pub fn theta_map(map: &FlatteningMap, x: [f64; 2]) -> Result<[f64; 2]> {
    map.check_point(x)?;
    if x[1] >= map.big_h0 {
        return Ok(x);
    }
    let (z, _) = map.profile.height_and_slope(x[0]);
    let (phi, _) = map.blend(x[1]);
    Ok([x[0], x[1] + phi * (z - map.h0)])
}

/// (A_Θ, c_Θ) with c_Θ = |det ∇Θ| and A_Θ = c_Θ (∇Θ)⁻¹(∇Θ)⁻ᵀ.
pub fn theta_coefficients(map: &FlatteningMap, x: [f64; 2]) -> Result<([[f64; 2]; 2], f64)> {
    let j = map.jacobian(x)?;
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if !(det > 0.0) {
        return Err(Error::SingularMap { x1: x[0], x2: x[1], det });
    }
    let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
    let mut a = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            a[r][c] = det * (inv[r][0] * inv[c][0] + inv[r][1] * inv[c][1]);
        }
    }
    Ok((a, det))
}

/// Perturbation coefficients A = A_Θ − I, c = c_Θ − 1 of a flattening map.
#[derive(Clone, Debug)]
pub struct CoefficientField {
    map: FlatteningMap,
}

impl CoefficientField {
    pub fn new(map: FlatteningMap) -> Self {
        Self { map }
    }

    pub fn map(&self) -> &FlatteningMap {
        &self.map
    }

    /// Height above which A and c vanish.
    pub fn support_top(&self) -> f64 {
        self.map.big_h0
    }

    /// True when A ≡ 0 and c ≡ 0, i.e. the surface coincides with h₀.
    pub fn is_zero(&self) -> bool {
        match self.map.profile.shape {
            Shape::Constant(h) => h == self.map.h0,
            _ => false,
        }
    }

    pub fn eval(&self, x: [f64; 2]) -> Result<([[f64; 2]; 2], f64)> {
        let (mut a, c) = theta_coefficients(&self.map, x)?;
        a[0][0] -= 1.0;
        a[1][1] -= 1.0;
        Ok((a, c - 1.0))
    }
}

/// Cell indices Z_N = {−N/2+1, …, N/2}.
pub fn truncation_cells(n: usize) -> std::ops::RangeInclusive<i64> {
    let half = (n / 2) as i64;
    (1 - half)..=half
}

/// Coefficients of cell m seen from the reference cell: (A, c) at
/// (x₁ + Λm, x₂) when m ∈ Z_N, zero otherwise.
pub fn masked_cell_coefficients(
    field: &CoefficientField,
    x: [f64; 2],
    m: i64,
    n: usize,
    lambda: f64,
) -> Result<([[f64; 2]; 2], f64)> {
    if !truncation_cells(n).contains(&m) {
        return Ok(([[0.0; 2]; 2], 0.0));
    }
    field.eval([x[0] + lambda * m as f64, x[1]])
}
