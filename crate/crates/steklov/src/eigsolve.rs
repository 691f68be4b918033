//! Discrete generalized eigensolvers.
//!
//! The default path mirrors the resolvent operator `S = T⁻¹∘J`: block
//! subspace iteration on `S` with Rayleigh-Ritz extraction, where
//! `T = K + M` and every application of `S` is one sparse SPD solve. Its
//! eigenvalues `μ ∈ (0,1]` map to Steklov eigenvalues by `λ = 1/μ − 1`.
//! A dense Dirichlet-to-Neumann Schur complement provides an independent
//! second path for cross-validation on small problems.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fem::SparseSymMatrix;
use crate::linsolve::{LinSolveError, SpdSolver};

/// Guard band beyond the wanted modes in the iteration block.
const BLOCK_SLACK: usize = 5;
/// Iteration cap for the subspace iteration.
const MAX_ITER: usize = 500;
/// Fixed seed for the deterministic start block.
const START_SEED: u64 = 0x5354_454b_4c4f_56;

#[derive(Debug, Error)]
pub enum EigError {
    #[error("operator T is not positive definite: {0}")]
    NotSpd(#[from] LinSolveError),
    #[error("requested {requested} modes but only {available} boundary dofs carry mass")]
    TooManyModes { requested: usize, available: usize },
    #[error(
        "subspace iteration did not reach tol {tol:.3e} within {iterations} iterations (residuals {achieved:?})"
    )]
    NoConvergence { tol: f64, iterations: usize, achieved: Vec<f64> },
    #[error("mass matrix B is not positive definite")]
    MassNotSpd,
    #[error("projected eigenproblem failed to diagonalize")]
    ProjectionFailed,
}

/// The discrete operators restricted to free (non-Dirichlet) dofs.
///
/// `T = K + M` is the matrix of the scalar product `(u,v)_0`; it is SPD on
/// the free dofs, while the boundary mass `M` is positive semidefinite.
#[derive(Debug, Clone)]
pub struct OperatorBundle {
    pub stiffness: SparseSymMatrix,
    pub boundary_mass: SparseSymMatrix,
    pub t_matrix: SparseSymMatrix,
    /// Free-dof index map: `free_dofs[local] = global vertex index`.
    pub free_dofs: Vec<usize>,
}

impl OperatorBundle {
    /// Restricts `K` and `M` to the dofs where `dirichlet` is false.
    pub fn new(
        stiffness: &SparseSymMatrix,
        boundary_mass: &SparseSymMatrix,
        dirichlet: &[bool],
    ) -> Self {
        assert_eq!(dirichlet.len(), stiffness.n());
        let free_dofs: Vec<usize> =
            (0..stiffness.n()).filter(|&i| !dirichlet[i]).collect();
        let k = stiffness.restrict(&free_dofs);
        let m = boundary_mass.restrict(&free_dofs);
        let t = k.add(&m);
        Self { stiffness: k, boundary_mass: m, t_matrix: t, free_dofs }
    }

    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    /// Dofs whose boundary-mass diagonal is positive.
    pub fn n_boundary_dofs(&self) -> usize {
        self.boundary_mass.diagonal().iter().filter(|&&d| d > 0.0).count()
    }

    /// Scatters a free-dof vector back to full vertex numbering.
    pub fn embed(&self, free_vector: &[f64], n_total: usize) -> Vec<f64> {
        let mut full = vec![0.0; n_total];
        for (local, &global) in self.free_dofs.iter().enumerate() {
            full[global] = free_vector[local];
        }
        full
    }
}

/// Converged eigenpairs of the pencil `K v = λ M v`.
///
/// `mu` holds the resolvent eigenvalues in descending order; the matching
/// `lambda = 1/μ − 1` are therefore ascending, index for index. Vectors are
/// T-orthonormal; each residual is `‖Kv − λMv‖₂ / ‖v‖_T`.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub mu: Vec<f64>,
    pub lambda: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Block subspace iteration on `S = T⁻¹∘J`.
///
/// Each sweep applies `S` to the block (one SPD solve per column),
/// T-orthonormalizes, and extracts Ritz pairs of the projected mass form;
/// it stops when every wanted residual drops below `tol`.
pub fn solve_via_resolvent(
    bundle: &OperatorBundle,
    n_modes: usize,
    tol: f64,
) -> Result<EigenPairs, EigError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let n = bundle.n_free();
    let available = bundle.n_boundary_dofs();
    if n_modes == 0 || n_modes > available {
        return Err(EigError::TooManyModes { requested: n_modes, available });
    }
    let block = (n_modes + BLOCK_SLACK).min(n);
    let solver = SpdSolver::new(&bundle.t_matrix)?;

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut basis: Vec<Vec<f64>> =
        (0..block).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();

    let mut result: Option<EigenPairs> = None;
    let mut last_residuals = vec![f64::INFINITY; n_modes];
    for sweep in 1..=MAX_ITER {
        // apply S columnwise: solve T y = M x
        for column in basis.iter_mut() {
            let rhs = bundle.boundary_mass.mul(column);
            *column = solver.solve(&rhs)?;
        }
        t_orthonormalize(&mut basis, &bundle.t_matrix, &mut rng);

        // Rayleigh-Ritz on the projected mass form
        let m_basis: Vec<Vec<f64>> =
            basis.iter().map(|v| bundle.boundary_mass.mul(v)).collect();
        let mut projected = DMatrix::zeros(block, block);
        for i in 0..block {
            for j in 0..=i {
                let value = dot(&basis[i], &m_basis[j]);
                projected[(i, j)] = value;
                projected[(j, i)] = value;
            }
        }
        let eig = projected.symmetric_eigen();
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

        let rotated: Vec<Vec<f64>> = order
            .iter()
            .map(|&col| {
                let mut v = vec![0.0; n];
                for (b, basis_vec) in basis.iter().enumerate() {
                    let weight = eig.eigenvectors[(b, col)];
                    for (vi, &bi) in v.iter_mut().zip(basis_vec) {
                        *vi += weight * bi;
                    }
                }
                v
            })
            .collect();
        basis = rotated;

        let mu: Vec<f64> = order.iter().map(|&c| eig.eigenvalues[c]).collect();
        let mut residuals = Vec::with_capacity(n_modes);
        for i in 0..n_modes {
            let lambda = 1.0 / mu[i] - 1.0;
            let kv = bundle.stiffness.mul(&basis[i]);
            let mv = bundle.boundary_mass.mul(&basis[i]);
            let r: f64 = kv
                .iter()
                .zip(&mv)
                .map(|(&a, &b)| (a - lambda * b).powi(2))
                .sum::<f64>()
                .sqrt();
            residuals.push(r);
        }
        last_residuals = residuals.clone();

        if residuals.iter().all(|&r| r < tol) {
            let mu: Vec<f64> = mu[..n_modes].to_vec();
            let lambda: Vec<f64> = mu.iter().map(|&m| 1.0 / m - 1.0).collect();
            result = Some(EigenPairs {
                mu,
                lambda,
                vectors: basis[..n_modes].to_vec(),
                residuals,
                iterations: sweep,
            });
            break;
        }
    }
    result.ok_or(EigError::NoConvergence {
        tol,
        iterations: MAX_ITER,
        achieved: last_residuals,
    })
}

/// Modified Gram-Schmidt in the T inner product, with one
/// reorthogonalization pass. Columns that collapse (the block can exceed
/// the rank of `S`) are replaced by fresh deterministic random vectors.
fn t_orthonormalize(basis: &mut [Vec<f64>], t: &SparseSymMatrix, rng: &mut ChaCha8Rng) {
    let n = t.n();
    for i in 0..basis.len() {
        let (done, rest) = basis.split_at_mut(i);
        let current = &mut rest[0];
        let mut attempts = 0;
        loop {
            for _pass in 0..2 {
                for prev in done.iter() {
                    let tv = t.mul(prev);
                    let proj = dot(current, &tv);
                    for (vi, &pj) in current.iter_mut().zip(prev) {
                        *vi -= proj * pj;
                    }
                }
            }
            let norm = t.quadratic(current).max(0.0).sqrt();
            if norm > 1e-13 {
                for v in current.iter_mut() {
                    *v /= norm;
                }
                break;
            }
            // rank-deficient column: restart it
            attempts += 1;
            *current = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = t.quadratic(current).sqrt();
            for v in current.iter_mut() {
                *v /= norm;
            }
            assert!(attempts < 8, "orthogonalization failed to recover a full-rank block");
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Dense Dirichlet-to-Neumann matrix: the boundary Schur complement
/// `K_bb − K_bi K_ii⁻¹ K_ib`, one sparse SPD solve per boundary column.
pub fn dtn_schur(
    stiffness: &SparseSymMatrix,
    boundary: &[usize],
    interior: &[usize],
) -> Result<DMatrix<f64>, EigError> {
    let nb = boundary.len();
    let mut dtn = DMatrix::zeros(nb, nb);
    for (col, &bj) in boundary.iter().enumerate() {
        for (row, &bi) in boundary.iter().enumerate() {
            dtn[(row, col)] = stiffness.get(bi, bj);
        }
    }
    if interior.is_empty() {
        return Ok(dtn);
    }

    let mut interior_pos = vec![usize::MAX; stiffness.n()];
    for (pos, &g) in interior.iter().enumerate() {
        interior_pos[g] = pos;
    }
    let k_ii = stiffness.restrict(interior);
    let solver = SpdSolver::new(&k_ii)?;

    for (col, &bj) in boundary.iter().enumerate() {
        // K_ib e_j, gathered from the symmetric row of the boundary dof
        let mut rhs = vec![0.0; interior.len()];
        let (cols, vals) = stiffness.row(bj);
        for (&c, &v) in cols.iter().zip(vals) {
            let pos = interior_pos[c as usize];
            if pos != usize::MAX {
                rhs[pos] = v;
            }
        }
        let x = solver.solve(&rhs)?;
        for (row, &bi) in boundary.iter().enumerate() {
            let (cols, vals) = stiffness.row(bi);
            let mut coupling = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                let pos = interior_pos[c as usize];
                if pos != usize::MAX {
                    coupling += v * x[pos];
                }
            }
            dtn[(row, col)] -= coupling;
        }
    }
    // symmetric up to rounding; make it exact
    for i in 0..nb {
        for j in 0..i {
            let avg = 0.5 * (dtn[(i, j)] + dtn[(j, i)]);
            dtn[(i, j)] = avg;
            dtn[(j, i)] = avg;
        }
    }
    Ok(dtn)
}

/// Dense symmetric-definite pencil `A x = λ B x` via Cholesky reduction.
/// Returns all pairs with λ ascending and vectors B-orthonormal.
pub fn solve_gevp_dense(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<EigenPairs, EigError> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.nrows(), n);
    let chol = b.clone().cholesky().ok_or(EigError::MassNotSpd)?;
    let l = chol.l();

    // C = L⁻¹ A L⁻ᵀ
    let mut c = a.clone();
    l.solve_lower_triangular_mut(&mut c);
    c.transpose_mut();
    l.solve_lower_triangular_mut(&mut c);
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = avg;
            c[(j, i)] = avg;
        }
    }

    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let lt = l.transpose();
    let mut lambda = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &col in &order {
        let y = eig.eigenvectors.column(col).clone_owned();
        let x = lt
            .solve_upper_triangular(&y)
            .ok_or(EigError::ProjectionFailed)?;
        let value = eig.eigenvalues[col];
        let residual = (a * &x - b * &x * value).norm();
        lambda.push(value);
        vectors.push(x.iter().copied().collect::<Vec<f64>>());
        residuals.push(residual);
    }
    let mu = lambda.iter().map(|&l| 1.0 / (1.0 + l)).collect();
    Ok(EigenPairs { mu, lambda, vectors, residuals, iterations: 1 })
}

/// Convenience wrapper: converts dense input vectors for tests.
pub fn dvector(values: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(values)
}
