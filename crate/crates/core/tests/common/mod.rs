//! Oracles and helpers shared by the integration tests.
#![allow(dead_code)]

pub mod criteria;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_cvec(rng: &mut StdRng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖a − b‖ / ‖b‖.
pub fn rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    d / norm(b)
}

/// Dense LU with partial pivoting, solving a x = b.
pub fn dense_solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        let piv = a[k][k];
        assert!(piv.norm() > 0.0, "singular matrix");
        for i in k + 1..n {
            let f = a[i][k] / piv;
            if f == ZERO {
                continue;
            }
            for j in k..n {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
            b[i] = b[i] - f * b[k];
        }
    }
    let mut x = vec![ZERO; n];
    for k in (0..n).rev() {
        let s: Complex64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// Eigenvalues of a Hermitian matrix through the real symmetric embedding
/// [[Re, −Im], [Im, Re]] and cyclic Jacobi rotations. Each eigenvalue
/// appears twice.
pub fn hermitian_eigenvalues(h: &[Vec<Complex64>]) -> Vec<f64> {
    let n = h.len();
    let m = 2 * n;
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = h[i][j].re;
            a[i + n][j + n] = h[i][j].re;
            a[i][j + n] = -h[i][j].im;
            a[i + n][j] = h[i][j].im;
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| a[i][i]).collect()
}

/// Gauss-Legendre nodes and weights on [a, b] by Newton iteration on P_n,
/// independent of the library's quadrature module.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w));
    }
    out
}

/// The 7-point degree-5 triangle rule as barycentric points and weights
/// (weights sum to 1).
pub fn dunavant7() -> Vec<([f64; 3], f64)> {
    let r = 15f64.sqrt();
    let (a1, b1) = ((6.0 - r) / 21.0, (9.0 + 2.0 * r) / 21.0);
    let (a2, b2) = ((6.0 + r) / 21.0, (9.0 - 2.0 * r) / 21.0);
    let (w1, w2) = ((155.0 - r) / 1200.0, (155.0 + r) / 1200.0);
    vec![
        ([1.0 / 3.0; 3], 9.0 / 40.0),
        ([a1, a1, b1], w1),
        ([a1, b1, a1], w1),
        ([b1, a1, a1], w1),
        ([a2, a2, b2], w2),
        ([a2, b2, a2], w2),
        ([b2, a2, a2], w2),
    ]
}

/// One acceptance check: printed as a single PASS/FAIL line.
#[derive(Clone, Debug)]
pub struct Check {
    pub id: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(id: &'static str, pass: bool, detail: String) -> Self {
        Self { id, pass, detail }
    }

    pub fn line(&self) -> String {
        format!("{} criterion {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.id, self.detail)
    }
}
