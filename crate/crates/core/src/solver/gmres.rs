use num_complex::Complex64;

use super::{LinearOperator, Preconditioner, SolverOptions};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GmresStatus {
    Converged,
    MaxIterations,
    /// A full restart cycle made no progress.
    Stagnated,
}

#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    /// ‖M⁻¹(b − Ax)‖ / ‖M⁻¹b‖ at exit.
    pub residual: f64,
    /// ‖b − Ax‖ / ‖b‖ at exit, from a fresh operator application.
    pub true_residual: f64,
    pub status: GmresStatus,
    /// Preconditioned relative residual after every iteration.
    pub history: Vec<f64>,
}

impl GmresOutcome {
    pub fn converged(&self) -> bool {
        self.status == GmresStatus::Converged
    }

    /// Turns a non-converged outcome into an error.
    pub fn into_result(self) -> Result<Self> {
        match self.status {
            GmresStatus::Converged => Ok(self),
            GmresStatus::MaxIterations => Err(Error::NotConverged {
                reason: "iteration limit",
                iterations: self.iterations,
                residual: self.residual,
            }),
            GmresStatus::Stagnated => Err(Error::NotConverged {
                reason: "stagnation",
                iterations: self.iterations,
                residual: self.residual,
            }),
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn true_residual(op: &dyn LinearOperator, x: &[Complex64], b: &[Complex64], bnorm: f64, work: &mut [Complex64]) -> f64 {
    op.apply(x, work);
    let r: f64 = work.iter().zip(b).map(|(ax, b)| (b - ax).norm_sqr()).sum::<f64>().sqrt();
    r / bnorm
}

/// Left-preconditioned restarted GMRES from a zero initial guess.
///
/// Converges when both the preconditioned and the unpreconditioned relative
/// residuals are at most `opts.tol`.
pub fn gmres_solve(
    op: &dyn LinearOperator,
    precond: Option<&dyn Preconditioner>,
    rhs: &[Complex64],
    opts: &SolverOptions,
) -> Result<GmresOutcome> {
    opts.validate()?;
    let n = op.dim();
    if rhs.len() != n {
        return Err(Error::Parameter(format!("rhs length {} does not match operator size {n}", rhs.len())));
    }
    let precondition = |v: &mut [Complex64]| {
        if let Some(p) = precond {
            p.solve_in_place(v);
        }
    };
    let mut x = vec![ZERO; n];
    let bnorm = norm(rhs);
    if bnorm == 0.0 {
        return Ok(GmresOutcome { x, iterations: 0, residual: 0.0, true_residual: 0.0, status: GmresStatus::Converged, history: vec![] });
    }
    let mut pb = rhs.to_vec();
    precondition(&mut pb);
    let pbnorm = norm(&pb);
    let m = opts.restart.min(n);
    let mut basis: Vec<Vec<Complex64>> = (0..=m).map(|_| vec![ZERO; n]).collect();
    let mut h = vec![vec![ZERO; m]; m + 1];
    let mut cs = vec![0.0f64; m];
    let mut sn = vec![ZERO; m];
    let mut g = vec![ZERO; m + 1];
    let mut work = vec![ZERO; n];
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut target = opts.tol;
    let mut residual = 1.0;
    let mut true_res = 1.0;
    let mut status = GmresStatus::MaxIterations;

    'outer: while iterations < opts.maxit {
        // r = M⁻¹(b − A x)
        op.apply(&x, &mut work);
        for (w, b) in work.iter_mut().zip(rhs) {
            *w = b - *w;
        }
        precondition(&mut work);
        let beta = norm(&work);
        let cycle_start = beta / pbnorm;
        residual = cycle_start;
        if residual <= target {
            true_res = true_residual(op, &x, rhs, bnorm, &mut work);
            if true_res <= opts.tol {
                status = GmresStatus::Converged;
                break;
            }
            target *= (0.5 * opts.tol / true_res).clamp(1e-3, 0.5);
            continue;
        }
        for (v, w) in basis[0].iter_mut().zip(&work) {
            *v = w / beta;
        }
        g.iter_mut().for_each(|v| *v = ZERO);
        g[0] = Complex64::new(beta, 0.0);
        let mut used = 0;
        for k in 0..m {
            if iterations >= opts.maxit {
                break;
            }
            iterations += 1;
            let (head, tail) = basis.split_at_mut(k + 1);
            let w = &mut tail[0];
            op.apply(&head[k], w);
            precondition(w);
            for (i, v) in head.iter().enumerate() {
                let hik = dot(v, w);
                h[i][k] = hik;
                for (wz, vz) in w.iter_mut().zip(v) {
                    *wz -= hik * vz;
                }
            }
            let hn = norm(w);
            h[k + 1][k] = Complex64::new(hn, 0.0);
            if hn > 0.0 {
                w.iter_mut().for_each(|z| *z /= hn);
            }
            for i in 0..k {
                let (a, b) = (h[i][k], h[i + 1][k]);
                h[i][k] = a * cs[i] + sn[i] * b;
                h[i + 1][k] = -sn[i].conj() * a + b * cs[i];
            }
            let (a, b) = (h[k][k], h[k + 1][k]);
            let r = a.norm().hypot(b.norm());
            if a.norm() == 0.0 {
                cs[k] = 0.0;
                sn[k] = Complex64::new(1.0, 0.0);
            } else {
                cs[k] = a.norm() / r;
                sn[k] = (a / a.norm()) * b.conj() / r;
            }
            h[k][k] = a * cs[k] + sn[k] * b;
            h[k + 1][k] = ZERO;
            g[k + 1] = -sn[k].conj() * g[k];
            g[k] *= cs[k];
            residual = g[k + 1].norm() / pbnorm;
            history.push(residual);
            log::debug!("gmres iteration {iterations}: residual {residual:.3e}");
            used = k + 1;
            if residual <= target || hn == 0.0 {
                break;
            }
        }
        // back substitution y = H⁻¹ g, x += V y
        let mut y = vec![ZERO; used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for j in (i + 1)..used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            for (xz, vz) in x.iter_mut().zip(&basis[i]) {
                *xz += yi * vz;
            }
        }
        if residual <= target {
            true_res = true_residual(op, &x, rhs, bnorm, &mut work);
            log::debug!("gmres cycle end: preconditioned {residual:.3e}, true {true_res:.3e}");
            if true_res <= opts.tol {
                status = GmresStatus::Converged;
                break 'outer;
            }
            target *= (0.5 * opts.tol / true_res).clamp(1e-3, 0.5);
        } else if used == m && residual >= cycle_start * (1.0 - 1e-10) {
            status = GmresStatus::Stagnated;
            break;
        }
    }
    if status != GmresStatus::Converged {
        true_res = true_residual(op, &x, rhs, bnorm, &mut work);
    }
    log::info!("gmres: {status:?} after {iterations} iterations, residual {residual:.3e} (true {true_res:.3e})");
    Ok(GmresOutcome { x, iterations, residual, true_residual: true_res, status, history })
}
