use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::MatMut;
use faer::prelude::Solve;
use num_complex::Complex64;
use rayon::prelude::*;

use super::Preconditioner;
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Sparse LU factors of every diagonal block.
pub struct BlockLu {
    blocks: Vec<Lu<usize, Complex64>>,
    size: usize,
}

impl std::fmt::Debug for BlockLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlockLu").field("blocks", &self.blocks.len()).field("size", &self.size).finish()
    }
}

fn factor(a: &CsrMatrix, block: usize) -> Result<Lu<usize, Complex64>> {
    let n = a.n_rows();
    let mut entries = Vec::with_capacity(a.nnz());
    for r in 0..n {
        for p in a.row_ptr()[r]..a.row_ptr()[r + 1] {
            entries.push(Triplet::new(r, a.col_idx()[p], a.values()[p]));
        }
    }
    let m = SparseColMat::<usize, Complex64>::try_new_from_triplets(n, a.n_cols(), &entries)
        .map_err(|e| Error::Parameter(format!("block {block}: {e:?}")))?;
    m.sp_lu().map_err(|_| Error::SingularBlock { block })
}

pub fn block_lu(diag_blocks: &[CsrMatrix]) -> Result<BlockLu> {
    let blocks = diag_blocks.par_iter().enumerate().map(|(j, a)| factor(a, j)).collect::<Result<Vec<_>>>()?;
    let size = diag_blocks.first().map_or(0, |a| a.n_rows());
    Ok(BlockLu { blocks, size })
}

impl Preconditioner for BlockLu {
    fn solve_in_place(&self, r: &mut [Complex64]) {
        let size = self.size;
        r.par_chunks_mut(size).zip(self.blocks.par_iter()).for_each(|(x, f)| {
            f.solve_in_place(MatMut::from_column_major_slice_mut(x, size, 1));
        });
    }
}
