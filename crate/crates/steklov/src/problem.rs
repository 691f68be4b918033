//! Problem-level Steklov API: full, mixed (Dirichlet-Steklov) and weighted
//! variants, plus Rayleigh-quotient, orthogonality and minimax diagnostics.

use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::eigsolve::{solve_gevp_dense, solve_via_resolvent, EigError, OperatorBundle};
use crate::fem::{
    assemble_boundary_mass, assemble_stiffness, EdgeWeight, FeFunction, FemError, SparseSymMatrix,
};
use crate::mesh::{BoundaryTag, Mesh, TagSet};

/// Below this magnitude the boundary integral of an eigenfunction is
/// treated as zero and the sign convention falls back to the first
/// Steklov-boundary coefficient.
const SIGN_TOL: f64 = 1e-12;

/// Eigenvalues within this relative distance form one cluster; Gram and
/// convergence assertions are made blockwise on clusters.
pub const CLUSTER_REL_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SteklovError {
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Eig(#[from] EigError),
    #[error("mixed mode requires Sigma-tagged boundary edges")]
    NoSigmaBoundary,
    #[error("boundary trace is zero: the Rayleigh quotient is unbounded along this direction")]
    ZeroBoundaryTrace,
    #[error("operation needs {needed} modes but the spectrum holds {have}")]
    NeedMoreModes { needed: usize, have: usize },
}

/// Which Steklov problem to solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SteklovMode {
    /// Spectral condition on the whole boundary; λ₀ = 0 with constant
    /// eigenfunction.
    Full,
    /// Steklov condition on `Gamma`, homogeneous Dirichlet on `Sigma`;
    /// all eigenvalues strictly positive.
    Mixed,
    /// Mixed problem with the `Gamma` mass scaled by a constant weight.
    Weighted(f64),
}

impl SteklovMode {
    pub fn steklov_tags(&self) -> TagSet {
        match self {
            SteklovMode::Full => TagSet::ALL,
            SteklovMode::Mixed | SteklovMode::Weighted(_) => TagSet::GAMMA,
        }
    }

    pub fn weight(&self) -> EdgeWeight<'static> {
        match self {
            SteklovMode::Full | SteklovMode::Mixed => EdgeWeight::One,
            SteklovMode::Weighted(c) => EdgeWeight::Constant(*c),
        }
    }

    pub fn has_dirichlet(&self) -> bool {
        !matches!(self, SteklovMode::Full)
    }
}

/// Solver knobs; `tol` bounds the eigenpair residuals `‖Kv − λMv‖₂/‖v‖_T`.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub n_modes: usize,
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { n_modes: 1, tol: 1e-9 }
    }
}

/// An ascending Steklov spectrum with normalized, sign-fixed
/// eigenfunctions.
///
/// Eigenfunctions are scaled so that `∫ weight·u² dS = 1` over the Steklov
/// boundary, with the sign fixed so `∫ u dS ≥ 0` there (first boundary
/// coefficient positive when that integral vanishes).
#[derive(Debug, Clone)]
pub struct SteklovSpectrum {
    pub mode: SteklovMode,
    pub lambdas: Vec<f64>,
    pub eigenfunctions: Vec<FeFunction>,
    pub residuals: Vec<f64>,
}

impl SteklovSpectrum {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.eigenfunctions[0].mesh
    }

    /// Ranges of indices whose eigenvalues lie within [`CLUSTER_REL_TOL`]
    /// of each other.
    pub fn clusters(&self) -> Vec<std::ops::Range<usize>> {
        cluster_ranges(&self.lambdas)
    }
}

pub fn cluster_ranges(lambdas: &[f64]) -> Vec<std::ops::Range<usize>> {
    let mut ranges = Vec::new();
    let mut start = 0;
    for i in 1..=lambdas.len() {
        let same = i < lambdas.len()
            && (lambdas[i] - lambdas[i - 1]).abs()
                <= CLUSTER_REL_TOL * lambdas[i].abs().max(1e-300) + 1e-12;
        if !same {
            ranges.push(start..i);
            start = i;
        }
    }
    ranges
}

/// Solves the chosen Steklov problem for the `n_modes` smallest
/// eigenvalues with default tolerances.
pub fn solve_steklov(
    mesh: &Arc<Mesh>,
    mode: SteklovMode,
    n_modes: usize,
) -> Result<SteklovSpectrum, SteklovError> {
    solve_steklov_with(mesh, mode, SolverConfig { n_modes, ..Default::default() })
}

/// Full-control variant of [`solve_steklov`].
pub fn solve_steklov_with(
    mesh: &Arc<Mesh>,
    mode: SteklovMode,
    config: SolverConfig,
) -> Result<SteklovSpectrum, SteklovError> {
    if mode.has_dirichlet()
        && !mesh.boundary_edges.iter().any(|e| e.tag == BoundaryTag::Sigma)
    {
        return Err(SteklovError::NoSigmaBoundary);
    }
    let stiffness = assemble_stiffness(mesh)?;
    let mass = assemble_boundary_mass(mesh, mode.steklov_tags(), &mode.weight())?;
    let dirichlet = if mode.has_dirichlet() {
        mesh.vertices_on(TagSet::SIGMA)
    } else {
        vec![false; mesh.n_vertices()]
    };
    let bundle = OperatorBundle::new(&stiffness, &mass, &dirichlet);
    let pairs = solve_via_resolvent(&bundle, config.n_modes, config.tol)?;

    let mass_free = &bundle.boundary_mass;
    let ones = vec![1.0; bundle.n_free()];
    let mass_times_ones = mass_free.mul(&ones);
    let first_steklov_dof = mass_free.diagonal().iter().position(|&d| d > 0.0);

    let mut eigenfunctions = Vec::with_capacity(pairs.vectors.len());
    for vector in &pairs.vectors {
        let mut v = vector.clone();
        let norm = mass_free.quadratic(&v).max(0.0).sqrt();
        debug_assert!(norm > 0.0, "eigenfunction with zero boundary trace");
        for c in &mut v {
            *c /= norm;
        }
        let boundary_integral: f64 = mass_times_ones.iter().zip(&v).map(|(&m, &c)| m * c).sum();
        let flip = if boundary_integral < -SIGN_TOL {
            true
        } else if boundary_integral.abs() <= SIGN_TOL {
            first_steklov_dof.is_some_and(|i| v[i] < 0.0)
        } else {
            false
        };
        if flip {
            for c in &mut v {
                *c = -*c;
            }
        }
        let full = bundle.embed(&v, mesh.n_vertices());
        eigenfunctions.push(FeFunction::new(Arc::clone(mesh), full)?);
    }

    Ok(SteklovSpectrum {
        mode,
        lambdas: pairs.lambda,
        eigenfunctions,
        residuals: pairs.residuals,
    })
}

/// `uᵀKu / uᵀM_∂u` with the mode's boundary tags and weight. Fails when the
/// boundary trace vanishes (the quotient is unbounded along such
/// directions).
pub fn rayleigh_quotient(u: &FeFunction, mode: SteklovMode) -> Result<f64, SteklovError> {
    let stiffness = assemble_stiffness(&u.mesh)?;
    let mass = assemble_boundary_mass(&u.mesh, mode.steklov_tags(), &mode.weight())?;
    let numerator = stiffness.quadratic(&u.coeffs);
    let denominator = mass.quadratic(&u.coeffs);
    if denominator <= 0.0 {
        return Err(SteklovError::ZeroBoundaryTrace);
    }
    Ok(numerator / denominator)
}

/// Gram matrices of a computed spectrum and their off-diagonal deviations,
/// measured blockwise: entries inside an eigenvalue cluster are excluded,
/// since any orthonormal basis of the cluster subspace is acceptable.
#[derive(Debug, Clone)]
pub struct GramReport {
    pub boundary: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub max_offdiag_boundary: f64,
    pub max_offdiag_stiffness: f64,
}

pub fn orthogonality_gram(spec: &SteklovSpectrum) -> Result<GramReport, SteklovError> {
    let n = spec.len();
    if n < 1 {
        return Err(SteklovError::NeedMoreModes { needed: 1, have: 0 });
    }
    let mesh = spec.mesh();
    let stiffness = assemble_stiffness(mesh)?;
    let mass = assemble_boundary_mass(mesh, spec.mode.steklov_tags(), &spec.mode.weight())?;
    let gram_b = gram(&mass, spec);
    let gram_k = gram(&stiffness, spec);

    let clusters = spec.clusters();
    let same_cluster = |i: usize, j: usize| clusters.iter().any(|r| r.contains(&i) && r.contains(&j));
    let mut max_b: f64 = 0.0;
    let mut max_k: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j && !same_cluster(i, j) {
                max_b = max_b.max(gram_b[(i, j)].abs());
                max_k = max_k.max(gram_k[(i, j)].abs());
            }
        }
    }
    Ok(GramReport {
        boundary: gram_b,
        stiffness: gram_k,
        max_offdiag_boundary: max_b,
        max_offdiag_stiffness: max_k,
    })
}

fn gram(matrix: &SparseSymMatrix, spec: &SteklovSpectrum) -> DMatrix<f64> {
    let n = spec.len();
    let mut g = DMatrix::zeros(n, n);
    let products: Vec<Vec<f64>> =
        spec.eigenfunctions.iter().map(|u| matrix.mul(&u.coeffs)).collect();
    for i in 0..n {
        for j in 0..=i {
            let value: f64 = spec.eigenfunctions[i]
                .coeffs
                .iter()
                .zip(&products[j])
                .map(|(&a, &b)| a * b)
                .sum();
            g[(i, j)] = value;
            g[(j, i)] = value;
        }
    }
    g
}

/// Max of the Rayleigh quotient over the span of the first `n+1`
/// eigenfunctions, computed as the top eigenvalue of the projected pencil.
/// By the minimax characterization this equals `λ_n`.
pub fn minimax_check(spec: &SteklovSpectrum, n: usize) -> Result<f64, SteklovError> {
    if n + 1 > spec.len() {
        return Err(SteklovError::NeedMoreModes { needed: n + 1, have: spec.len() });
    }
    let mesh = spec.mesh();
    let stiffness = assemble_stiffness(mesh)?;
    let mass = assemble_boundary_mass(mesh, spec.mode.steklov_tags(), &spec.mode.weight())?;
    let dim = n + 1;
    let mut a = DMatrix::zeros(dim, dim);
    let mut b = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let ki = stiffness.mul(&spec.eigenfunctions[i].coeffs);
        let mi = mass.mul(&spec.eigenfunctions[i].coeffs);
        for j in 0..dim {
            let uj = &spec.eigenfunctions[j].coeffs;
            a[(i, j)] = uj.iter().zip(&ki).map(|(&x, &y)| x * y).sum();
            b[(i, j)] = uj.iter().zip(&mi).map(|(&x, &y)| x * y).sum();
        }
    }
    for i in 0..dim {
        for j in 0..i {
            let avg_a = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = avg_a;
            a[(j, i)] = avg_a;
            let avg_b = 0.5 * (b[(i, j)] + b[(j, i)]);
            b[(i, j)] = avg_b;
            b[(j, i)] = avg_b;
        }
    }
    let pairs = solve_gevp_dense(&a, &b)?;
    Ok(*pairs.lambda.last().unwrap())
}
