//! Bessel functions J₀, Y₀ and the Hankel function H₀⁽¹⁾ for real positive
//! arguments.
//!
//! Three regimes: ascending series for z ≤ 8, Miller's backward recurrence
//! with the Neumann series for Y₀ on (8, 25], and the Hankel asymptotic
//! expansion beyond.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_MAX: f64 = 8.0;
const MILLER_MAX: f64 = 25.0;

/// J₀(z) and Y₀(z) for z > 0.
pub fn bessel_j0_y0(z: f64) -> Result<(f64, f64)> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::Domain(format!("Bessel functions need z > 0, got {z}")));
    }
    Ok(if z <= SERIES_MAX {
        series(z)
    } else if z <= MILLER_MAX {
        miller(z)
    } else {
        let h = asymptotic(z);
        (h.re, h.im)
    })
}

/// H₀⁽¹⁾(z) = J₀(z) + i Y₀(z) for z > 0.
pub fn hankel_h0(z: f64) -> Result<Complex64> {
    let (j, y) = bessel_j0_y0(z)?;
    Ok(Complex64::new(j, y))
}

fn series(z: f64) -> (f64, f64) {
    let q = -0.25 * z * z;
    let mut term = 1.0;
    let mut j = 1.0;
    let mut harmonic = 0.0;
    let mut ysum = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        j += term;
        ysum -= harmonic * term;
        if term.abs() < 1e-18 * j.abs().max(1e-3) && k > 4 {
            break;
        }
    }
    let y = FRAC_2_PI * (((0.5 * z).ln() + EULER_GAMMA) * j + ysum);
    (j, y)
}

fn miller(z: f64) -> (f64, f64) {
    let mut n = (z + 30.0 + 10.0 * z.cbrt()) as usize;
    n += n % 2;
    let (mut next, mut cur) = (0.0f64, 1e-30f64);
    // norm = J₀ + 2 Σ J_{2k}; neumann = Σ (−1)^k J_{2k}/k.
    let mut norm = 0.0;
    let mut neumann = 0.0;
    let mut j0 = 0.0;
    for m in (1..=n).rev() {
        let prev = 2.0 * m as f64 / z * cur - next;
        next = cur;
        cur = prev;
        let order = m - 1;
        if order == 0 {
            j0 = cur;
            norm += cur;
        } else if order % 2 == 0 {
            norm += 2.0 * cur;
            let k = order / 2;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            neumann += sign * cur / k as f64;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            j0 *= 1e-250;
            norm *= 1e-250;
            neumann *= 1e-250;
        }
    }
    let j = j0 / norm;
    let y = FRAC_2_PI * (((0.5 * z).ln() + EULER_GAMMA) * j) - 2.0 * FRAC_2_PI * neumann / norm;
    (j, y)
}

fn asymptotic(z: f64) -> Complex64 {
    // H₀⁽¹⁾(z) ~ √(2/(πz)) e^{i(z−π/4)} Σ_k i^k a_k / z^k,
    // a_k = Π_{m≤k} (−(2m−1)²) / (k! 8^k).
    let mut sum = Complex64::new(1.0, 0.0);
    let mut a = 1.0;
    let mut ik = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        a *= -odd * odd / (k as f64 * 8.0 * z);
        if a.abs() > last {
            break;
        }
        last = a.abs();
        ik *= Complex64::i();
        sum += ik * a;
        if a.abs() < 1e-17 {
            break;
        }
    }
    let phase = Complex64::from_polar(1.0, z - FRAC_PI_4);
    (2.0 / (PI * z)).sqrt() * phase * sum
}
