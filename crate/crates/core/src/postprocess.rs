//! Trace reconstruction on Γ_H, relative L² errors and convergence rates.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::bloch::{BlochField, BlochGrid};
use crate::error::{Error, Result};
use crate::mesh::PeriodicCellMesh;

/// Field of the reference cell on the top boundary at the given abscissae:
/// C_Λ Σ_j e^{−iα_j x₁} s(x₁) W_j(x₁, H).
pub fn reconstruct_on_gamma_h(field: &BlochField, grid: &BlochGrid, mesh: &PeriodicCellMesh, sample_x1: &[f64]) -> Vec<Complex64> {
    let top = mesh.top_nodes();
    let dx = mesh.dx();
    let nx = mesh.nx();
    sample_x1
        .iter()
        .map(|&x1| {
            let f = x1.rem_euclid(mesh.lambda()) / dx;
            let c = (f.floor() as usize).min(nx - 1);
            let t = f - c as f64;
            // grid column c ↦ top node index c−1 (column 0 ≡ nx)
            let left = top[if c == 0 { nx - 1 } else { c - 1 }];
            let right = top[c];
            let s = grid.envelope(x1) * grid.c_lambda();
            (0..grid.n())
                .map(|j| {
                    let b = field.block(j);
                    let w = b[left] * (1.0 - t) + b[right] * t;
                    w * Complex64::from_polar(s, -grid.alpha(j) * x1)
                })
                .sum()
        })
        .collect()
}

/// Composite Simpson weights on `n_points` (odd) uniform points over [a, b].
pub fn simpson_weights(n_points: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    if n_points < 3 || n_points % 2 == 0 {
        return Err(Error::Parameter(format!("Simpson rule needs an odd point count >= 3, got {n_points}")));
    }
    let h = (b - a) / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| {
            let c = if i == 0 || i == n_points - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect())
}

/// Uniform sample abscissae 0, Λ/(4nx), …, Λ with their Simpson weights.
pub fn trace_samples(mesh: &PeriodicCellMesh) -> (Vec<f64>, Vec<f64>) {
    let n = 4 * mesh.nx() + 1;
    let xs = (0..n).map(|i| mesh.lambda() * i as f64 / (n - 1) as f64).collect();
    (xs, simpson_weights(n, 0.0, mesh.lambda()).expect("odd count"))
}

/// √(Σ w|numeric − exact|²) / √(Σ w|exact|²).
pub fn relative_l2_error(numeric: &[Complex64], exact: &[Complex64], weights: &[f64]) -> Result<f64> {
    if numeric.len() != exact.len() || exact.len() != weights.len() {
        return Err(Error::Parameter("sample vectors differ in length".into()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for ((a, b), w) in numeric.iter().zip(exact).zip(weights) {
        num += w * (a - b).norm_sqr();
        den += w * b.norm_sqr();
    }
    if den == 0.0 {
        return Err(Error::DegenerateReference);
    }
    Ok((num / den).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub err: f64,
    pub iterations: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTable {
    rows: Vec<ConvergenceRow>,
}

pub const CSV_HEADER: &str = "N,h,err,iters,seconds";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    N,
    H,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "N" | "n" => Ok(Axis::N),
            "h" | "H" => Ok(Axis::H),
            other => Err(Error::Parameter(format!("axis must be N or h, got {other}"))),
        }
    }
}

impl ConvergenceTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a row, replacing any existing row with the same (N, h).
    pub fn push(&mut self, row: ConvergenceRow) -> Result<()> {
        if !(row.err >= 0.0) {
            return Err(Error::Parameter(format!("error must be nonnegative, got {}", row.err)));
        }
        self.rows.retain(|r| !(r.n == row.n && r.h == row.h));
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[ConvergenceRow] {
        &self.rows
    }

    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(out, "{}", csv_row(r))?;
        }
        Ok(())
    }

    pub fn read_csv(input: impl BufRead) -> Result<Self> {
        let mut table = Self::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if i == 0 || line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = |msg: &str| Error::Config { line: i + 1, msg: msg.to_string() };
            if f.len() != 5 {
                return Err(bad("expected 5 comma-separated fields"));
            }
            table.push(ConvergenceRow {
                n: f[0].parse().map_err(|_| bad("bad N"))?,
                h: f[1].parse().map_err(|_| bad("bad h"))?,
                err: f[2].parse().map_err(|_| bad("bad err"))?,
                iterations: f[3].parse().map_err(|_| bad("bad iters"))?,
                seconds: f[4].parse().map_err(|_| bad("bad seconds"))?,
            })?;
        }
        Ok(table)
    }

    /// Gnuplot-friendly "x err" lines along an axis.
    pub fn write_rate_file(&self, axis: Axis, mut out: impl Write) -> std::io::Result<()> {
        for r in &self.rows {
            let x = match axis {
                Axis::N => r.n as f64,
                Axis::H => r.h,
            };
            writeln!(out, "{x} {:e}", r.err)?;
        }
        Ok(())
    }
}

pub fn csv_row(r: &ConvergenceRow) -> String {
    format!("{},{},{:.6e},{},{:.3}", r.n, r.h, r.err, r.iterations, r.seconds)
}

/// Least-squares slope of log(err) against log(axis value).
pub fn convergence_rates(table: &ConvergenceTable, axis: Axis) -> Result<f64> {
    let pts: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter(|r| r.err > 0.0)
        .map(|r| {
            let x = match axis {
                Axis::N => r.n as f64,
                Axis::H => r.h,
            };
            (x.ln(), r.err.ln())
        })
        .collect();
    log_slope(&pts)
}

/// Least-squares slope through (x, y) pairs.
pub fn log_slope(pts: &[(f64, f64)]) -> Result<f64> {
    let distinct = pts.iter().any(|p| (p.0 - pts[0].0).abs() > 0.0);
    if pts.len() < 2 || !distinct {
        return Err(Error::Parameter("need at least two rows with distinct abscissae".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Order log(e₁/e₂)/log(x₁/x₂) between two refinements.
pub fn successive_order(x1: f64, e1: f64, x2: f64, e2: f64) -> f64 {
    (e1 / e2).ln() / (x1 / x2).ln()
}
