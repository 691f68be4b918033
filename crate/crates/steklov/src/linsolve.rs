//! Sparse SPD solves: reverse Cuthill-McKee ordering with an envelope
//! Cholesky factorization, falling back to diagonally preconditioned
//! conjugate gradients for systems too large to factor.

use thiserror::Error;

use crate::fem::SparseSymMatrix;

/// Systems up to this many unknowns are factored; larger ones use CG.
pub const CHOLESKY_DOF_LIMIT: usize = 50_000;

/// Relative residual tolerance for the inner CG solves.
pub const CG_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LinSolveError {
    #[error("matrix is not positive definite (pivot {pivot:.3e} at row {row})")]
    NotSpd { row: usize, pivot: f64 },
    #[error("conjugate gradients stalled at relative residual {achieved:.3e} (wanted {wanted:.3e})")]
    CgDidNotConverge { achieved: f64, wanted: f64 },
}

/// Reverse Cuthill-McKee ordering of the matrix graph.
///
/// Starts from a pseudo-peripheral vertex found by repeated BFS; visits
/// neighbors by increasing degree. Returns `perm` with `perm[new] = old`.
pub fn rcm_ordering(matrix: &SparseSymMatrix) -> Vec<usize> {
    let n = matrix.n();
    let degree = |v: usize| matrix.row(v).0.len();

    let bfs_levels = |start: usize, visited: &mut [bool], order: &mut Vec<usize>| -> usize {
        let base = order.len();
        order.push(start);
        visited[start] = true;
        let mut level_start = base;
        let mut last_level = base;
        while level_start < order.len() {
            let level_end = order.len();
            for idx in level_start..level_end {
                let v = order[idx];
                let mut next: Vec<usize> = matrix.row(v).0.iter().map(|&c| c as usize).filter(|&u| !visited[u]).collect();
                next.sort_by_key(|&u| (degree(u), u));
                for u in next {
                    if !visited[u] {
                        visited[u] = true;
                        order.push(u);
                    }
                }
            }
            last_level = level_start;
            level_start = level_end;
        }
        order[last_level..].iter().copied().min_by_key(|&u| (degree(u), u)).unwrap_or(start)
    };

    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    let mut cursor = 0;
    while order.len() < n {
        while visited[cursor] {
            cursor += 1;
        }
        // pseudo-peripheral start: two BFS sweeps from the min-degree vertex
        let mut component = Vec::new();
        let mut probe = visited.clone();
        let far = bfs_levels(cursor, &mut probe, &mut component);
        component.clear();
        let mut probe = visited.clone();
        bfs_levels(far, &mut probe, &mut component);
        for &v in &component {
            visited[v] = true;
        }
        order.extend_from_slice(&component);
    }
    order.reverse();
    order
}

/// Envelope (skyline) Cholesky factorization `A = LLᵀ` on a permuted
/// ordering. Row `i` of `L` is stored densely over `[first[i], i]`.
pub struct EnvelopeCholesky {
    perm: Vec<usize>,
    inv_perm: Vec<usize>,
    first: Vec<usize>,
    ptr: Vec<usize>,
    vals: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn new(matrix: &SparseSymMatrix) -> Result<Self, LinSolveError> {
        let n = matrix.n();
        let perm = rcm_ordering(matrix);
        let mut inv_perm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv_perm[old] = new;
        }

        let mut first = vec![0usize; n];
        for new in 0..n {
            let old = perm[new];
            let mut lo = new;
            for &c in matrix.row(old).0 {
                lo = lo.min(inv_perm[c as usize]);
            }
            first[new] = lo;
        }
        let mut ptr = Vec::with_capacity(n + 1);
        ptr.push(0usize);
        for i in 0..n {
            ptr.push(ptr[i] + (i - first[i] + 1));
        }
        let mut vals = vec![0.0; ptr[n]];
        for new in 0..n {
            let old = perm[new];
            let (cols, entries) = matrix.row(old);
            for (&c, &v) in cols.iter().zip(entries) {
                let cj = inv_perm[c as usize];
                if cj <= new {
                    vals[ptr[new] + (cj - first[new])] = v;
                }
            }
        }

        // in-place LLᵀ over the envelope
        for i in 0..n {
            for j in first[i]..=i {
                let lo = first[i].max(first[j]);
                let mut sum = vals[ptr[i] + (j - first[i])];
                let row_i = ptr[i] - first[i];
                let row_j = ptr[j] - first[j];
                for k in lo..j {
                    sum -= vals[row_i + k] * vals[row_j + k];
                }
                if j < i {
                    vals[ptr[i] + (j - first[i])] = sum / vals[ptr[j] + (j - first[j])];
                } else {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(LinSolveError::NotSpd { row: i, pivot: sum });
                    }
                    vals[ptr[i] + (i - first[i])] = sum.sqrt();
                }
            }
        }
        Ok(Self { perm, inv_perm, first, ptr, vals })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y: Vec<f64> = (0..n).map(|i| rhs[self.perm[i]]).collect();
        // forward: L y' = y
        for i in 0..n {
            let row = self.ptr[i] - self.first[i];
            let mut sum = y[i];
            for k in self.first[i]..i {
                sum -= self.vals[row + k] * y[k];
            }
            y[i] = sum / self.vals[row + i];
        }
        // backward: Lᵀ x = y', column sweep over the stored rows
        for j in (0..n).rev() {
            let row = self.ptr[j] - self.first[j];
            y[j] /= self.vals[row + j];
            let xj = y[j];
            for k in self.first[j]..j {
                y[k] -= self.vals[row + k] * xj;
            }
        }
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        x
    }
}

/// Diagonally preconditioned conjugate gradients; converges when the
/// preconditioned residual drops below `tol` relative to the right-hand
/// side.
pub fn conjugate_gradient(
    matrix: &SparseSymMatrix,
    rhs: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, LinSolveError> {
    let n = matrix.n();
    let inv_diag: Vec<f64> = matrix
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let rhs_norm = dot(rhs, rhs).sqrt();
    if rhs_norm == 0.0 {
        return Ok(x);
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(&ri, &di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut scratch = vec![0.0; n];
    for _ in 0..max_iter {
        matrix.mul_into(&p, &mut scratch);
        let alpha = rz / dot(&p, &scratch);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * scratch[i];
        }
        if dot(&r, &r).sqrt() <= tol * rhs_norm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(LinSolveError::CgDidNotConverge { achieved: dot(&r, &r).sqrt() / rhs_norm, wanted: tol })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Direct or iterative SPD solver, chosen by system size.
pub enum SpdSolver<'a> {
    Cholesky(EnvelopeCholesky),
    ConjugateGradient { matrix: &'a SparseSymMatrix, tol: f64 },
}

impl<'a> SpdSolver<'a> {
    pub fn new(matrix: &'a SparseSymMatrix) -> Result<Self, LinSolveError> {
        if matrix.n() <= CHOLESKY_DOF_LIMIT {
            Ok(SpdSolver::Cholesky(EnvelopeCholesky::new(matrix)?))
        } else {
            Ok(SpdSolver::ConjugateGradient { matrix, tol: CG_TOL })
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, LinSolveError> {
        match self {
            SpdSolver::Cholesky(factor) => Ok(factor.solve(rhs)),
            SpdSolver::ConjugateGradient { matrix, tol } => {
                conjugate_gradient(matrix, rhs, *tol, 20 * matrix.n())
            }
        }
    }
}
