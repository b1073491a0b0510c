use num_complex::Complex64;
use rayon::prelude::*;

use super::Preconditioner;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// ILU(0) factors stored in the pattern of the original matrix: the strict
/// lower part holds L (unit diagonal implied), the rest holds U.
#[derive(Clone, Debug)]
pub struct Ilu0 {
    lu: CsrMatrix,
    diag: Vec<usize>,
}

impl Ilu0 {
    /// `block` only labels a zero-pivot error.
    pub fn factor(a: &CsrMatrix, block: usize) -> Result<Self> {
        let n = a.n_rows();
        let mut lu = a.clone();
        let rp = lu.row_ptr().to_vec();
        let ci = lu.col_idx().to_vec();
        let mut diag = vec![usize::MAX; n];
        for r in 0..n {
            match lu.position(r, r) {
                Some(p) => diag[r] = p,
                None => return Err(Error::ZeroPivot { block, row: r }),
            }
        }
        let mut marker = vec![usize::MAX; n];
        let vals = lu.values_mut();
        for i in 0..n {
            for p in rp[i]..rp[i + 1] {
                marker[ci[p]] = p;
            }
            for p in rp[i]..rp[i + 1] {
                let k = ci[p];
                if k >= i {
                    break;
                }
                let pivot = vals[diag[k]];
                if pivot == Complex64::new(0.0, 0.0) {
                    return Err(Error::ZeroPivot { block, row: k });
                }
                let lik = vals[p] / pivot;
                vals[p] = lik;
                for q in (diag[k] + 1)..rp[k + 1] {
                    let t = marker[ci[q]];
                    if t != usize::MAX {
                        vals[t] -= lik * vals[q];
                    }
                }
            }
            if vals[diag[i]] == Complex64::new(0.0, 0.0) || !vals[diag[i]].is_finite() {
                return Err(Error::ZeroPivot { block, row: i });
            }
            for p in rp[i]..rp[i + 1] {
                marker[ci[p]] = usize::MAX;
            }
        }
        Ok(Self { lu, diag })
    }

    pub fn factors(&self) -> &CsrMatrix {
        &self.lu
    }

    /// Unit lower factor L as a standalone matrix.
    pub fn lower(&self) -> CsrMatrix {
        let mut t = Vec::new();
        for r in 0..self.lu.n_rows() {
            let (c, v) = self.lu.row(r);
            for (c, v) in c.iter().zip(v) {
                if *c < r {
                    t.push((r, *c, *v));
                }
            }
            t.push((r, r, Complex64::new(1.0, 0.0)));
        }
        CsrMatrix::from_triplets(self.lu.n_rows(), self.lu.n_cols(), t)
    }

    /// Upper factor U as a standalone matrix.
    pub fn upper(&self) -> CsrMatrix {
        let mut t = Vec::new();
        for r in 0..self.lu.n_rows() {
            let (c, v) = self.lu.row(r);
            for (c, v) in c.iter().zip(v) {
                if *c >= r {
                    t.push((r, *c, *v));
                }
            }
        }
        CsrMatrix::from_triplets(self.lu.n_rows(), self.lu.n_cols(), t)
    }

    /// Solves L U x = r in place.
    pub fn solve_in_place(&self, x: &mut [Complex64]) {
        let rp = self.lu.row_ptr();
        let ci = self.lu.col_idx();
        let v = self.lu.values();
        let n = x.len();
        for i in 0..n {
            let mut s = x[i];
            for p in rp[i]..self.diag[i] {
                s -= v[p] * x[ci[p]];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for p in (self.diag[i] + 1)..rp[i + 1] {
                s -= v[p] * x[ci[p]];
            }
            x[i] = s / v[self.diag[i]];
        }
    }
}

/// Block-diagonal ILU(0): one factorization per diagonal block.
#[derive(Clone, Debug)]
pub struct BlockIlu0 {
    blocks: Vec<Ilu0>,
    size: usize,
}

pub fn block_ilu0(diag_blocks: &[CsrMatrix]) -> Result<BlockIlu0> {
    let blocks = diag_blocks
        .par_iter()
        .enumerate()
        .map(|(j, a)| Ilu0::factor(a, j))
        .collect::<Result<Vec<_>>>()?;
    let size = diag_blocks.first().map_or(0, |a| a.n_rows());
    Ok(BlockIlu0 { blocks, size })
}

impl BlockIlu0 {
    pub fn blocks(&self) -> &[Ilu0] {
        &self.blocks
    }
}

impl Preconditioner for BlockIlu0 {
    fn solve_in_place(&self, r: &mut [Complex64]) {
        r.par_chunks_mut(self.size)
            .zip(self.blocks.par_iter())
            .for_each(|(x, f)| f.solve_in_place(x));
    }
}
