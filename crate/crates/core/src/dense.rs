//! Dense-matrix reference engine.
//!
//! Materializes the follow transition matrix and both commit propagation
//! matrices explicitly and applies them as plain matrix–vector products.
//! Quadratic in memory, so only usable on small networks; it exists to
//! cross-check the sparse engine end to end.

use crate::error::{Error, Result};
use crate::graph::HeteroNetwork;
use crate::propagation::Propagator;
use crate::scalar::Scalar;

/// Largest developer or project count the dense engine accepts.
pub const DENSE_LIMIT: usize = 3000;

/// Row-major matrix.
#[derive(Debug, Clone, PartialEq)]
struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    #[inline]
    fn at(&mut self, r: usize, c: usize) -> &mut S {
        &mut self.data[r * self.cols + c]
    }

    /// `y = xᵀ M` (x indexed by row).
    fn left_mul(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.rows {
            return Err(Error::LengthMismatch { expected: self.rows, actual: x.len() });
        }
        let mut y = vec![S::zero(); self.cols];
        for (r, &xr) in x.iter().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            for (yc, &m) in y.iter_mut().zip(row) {
                *yc += xr * m;
            }
        }
        Ok(y)
    }
}

#[derive(Debug, Clone)]
pub struct DensePropagator<S> {
    /// `follow[f][d]`: probability that follower `f` passes score to `d`.
    follow: Matrix<S>,
    /// `dev_proj[d][p] = n(d,p) / total(d)`.
    dev_proj: Matrix<S>,
    /// `proj_dev[p][d] = n(d,p) / total(p)`.
    proj_dev: Matrix<S>,
    /// 0/1 commit adjacency, developer rows.
    adjacency: Matrix<S>,
}

impl<S: Scalar> DensePropagator<S> {
    pub fn new(net: &HeteroNetwork) -> Result<Self> {
        let (n_d, n_p) = (net.n_developers(), net.n_projects());
        let largest = n_d.max(n_p);
        if largest > DENSE_LIMIT {
            return Err(Error::TooLargeForDense { limit: DENSE_LIMIT, actual: largest });
        }

        let mut follow = Matrix::zeros(n_d, n_d);
        let mut out_degree = vec![0u64; n_d];
        for &(f, _) in net.follows() {
            out_degree[f.index()] += 1;
        }
        for &(f, t) in net.follows() {
            *follow.at(f.index(), t.index()) = S::one() / S::from_count(out_degree[f.index()]);
        }
        for f in (0..n_d).filter(|&f| out_degree[f] == 0) {
            for d in 0..n_d {
                *follow.at(f, d) = S::one() / S::from_len(n_d);
            }
        }

        let dev_total = net.developer_commit_totals();
        let proj_total = net.project_commit_totals();
        let mut dev_proj = Matrix::zeros(n_d, n_p);
        let mut proj_dev = Matrix::zeros(n_p, n_d);
        let mut adjacency = Matrix::zeros(n_d, n_p);
        for &(d, p, c) in net.commits() {
            let (di, pi) = (d.index(), p.index());
            *dev_proj.at(di, pi) = S::from_count(c) / S::from_count(dev_total[di]);
            *proj_dev.at(pi, di) = S::from_count(c) / S::from_count(proj_total[pi]);
            *adjacency.at(di, pi) = S::one();
        }
        Ok(Self { follow, dev_proj, proj_dev, adjacency })
    }

    fn binary_transpose_mul(&self, proj_scores: &[S]) -> Result<Vec<S>> {
        let m = &self.adjacency;
        if proj_scores.len() != m.cols {
            return Err(Error::LengthMismatch { expected: m.cols, actual: proj_scores.len() });
        }
        Ok((0..m.rows)
            .map(|d| (0..m.cols).map(|p| m.data[d * m.cols + p] * proj_scores[p]).sum())
            .collect())
    }
}

impl<S: Scalar> Propagator<S> for DensePropagator<S> {
    fn n_developers(&self) -> usize {
        self.follow.rows
    }

    fn n_projects(&self) -> usize {
        self.dev_proj.cols
    }

    fn follow(&self, dev_scores: &[S]) -> Result<Vec<S>> {
        self.follow.left_mul(dev_scores)
    }

    fn dev_to_proj(&self, dev_scores: &[S]) -> Result<Vec<S>> {
        self.dev_proj.left_mul(dev_scores)
    }

    fn proj_to_dev(&self, proj_scores: &[S]) -> Result<Vec<S>> {
        self.proj_dev.left_mul(proj_scores)
    }

    fn binary_dev_to_proj(&self, dev_scores: &[S]) -> Result<Vec<S>> {
        self.adjacency.left_mul(dev_scores)
    }

    fn binary_proj_to_dev(&self, proj_scores: &[S]) -> Result<Vec<S>> {
        self.binary_transpose_mul(proj_scores)
    }
}
