//! Sparse direct solves behind one small interface.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par};

use crate::error::{Error, Result};

/// LU factorization of a sparse nonsymmetric `n×n` matrix given as
/// `(row, col, value)` triplets; duplicates are summed.
pub struct SparseLu {
    n: usize,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
}

impl SparseLu {
    pub fn factor(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        // Sequential kernels keep results bit-identical across machines and runs.
        faer::set_global_parallelism(Par::Seq);
        let entries: Vec<Triplet<usize, usize, f64>> =
            triplets.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &entries)
            .map_err(|e| Error::SingularJacobian(format!("matrix assembly failed: {e:?}")))?;
        let lu = mat
            .sp_lu()
            .map_err(|e| Error::SingularJacobian(format!("LU factorization failed: {e:?}")))?;
        Ok(SparseLu { n, lu })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(rhs.len(), self.n);
        let b = Mat::<f64>::from_fn(self.n, 1, |i, _| rhs[i]);
        let x = self.lu.solve(&b);
        let out: Vec<f64> = (0..self.n).map(|i| x[(i, 0)]).collect();
        if let Some(i) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::SingularJacobian(format!("non-finite solution component at row {i}")));
        }
        Ok(out)
    }
}

/// One-shot solve of `A·x = b`.
pub fn sparse_solve(n: usize, triplets: &[(usize, usize, f64)], rhs: &[f64]) -> Result<Vec<f64>> {
    SparseLu::factor(n, triplets)?.solve(rhs)
}
