//! P1 finite-element assembly: stiffness, boundary mass, volume mass,
//! energy norms, and inter-mesh interpolation.
//!
//! All element integrals are exact closed forms (no volume quadrature), and
//! global sums are accumulated in a fixed element order, so assembled
//! matrices are byte-reproducible.

use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::mesh::{BoundaryTag, Mesh, MeshError, TagSet};

#[derive(Debug, Error)]
pub enum FemError {
    #[error("triangle {index} is degenerate (area {area:.3e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("boundary assembly selected no edges")]
    EmptyTagSelection,
    #[error("coefficient vector has length {got}, mesh has {expected} vertices")]
    LengthMismatch { got: usize, expected: usize },
    #[error("destination vertex {index} at ({x}, {y}) is not inside the source mesh")]
    UnlocatableVertex { index: usize, x: f64, y: f64 },
}

/// Symmetric sparse matrix in compressed-row storage (both triangles kept).
#[derive(Debug, Clone)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds the zero matrix over a fixed sparsity pattern. Rows must be
    /// sorted and duplicate-free.
    fn from_pattern(rows: Vec<Vec<u32>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for row in &rows {
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
        }
        let vals = vec![0.0; col_idx.len()];
        Self { n, row_ptr, col_idx, vals }
    }

    /// Builds from a dense symmetric matrix, dropping explicit zeros but
    /// always keeping the diagonal.
    pub fn from_dense(dense: &DMatrix<f64>) -> Self {
        let n = dense.nrows();
        assert_eq!(dense.ncols(), n);
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| dense[(i, j)] != 0.0 || i == j)
                    .map(|j| j as u32)
                    .collect()
            })
            .collect();
        let mut matrix = SparseSymMatrix::from_pattern(rows);
        for i in 0..n {
            for j in 0..n {
                if dense[(i, j)] != 0.0 {
                    matrix.add_at(i, j, dense[(i, j)]);
                }
            }
        }
        matrix
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.vals[span])
    }

    fn add_at(&mut self, i: usize, j: usize, value: f64) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        let cols = &self.col_idx[span.clone()];
        let offset = cols.binary_search(&(j as u32)).expect("entry outside pattern");
        self.vals[span.start + offset] += value;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`.
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_into(x, &mut y);
        y
    }

    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j as usize];
            }
            y[i] = acc;
        }
    }

    /// `uᵀ A v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        assert_eq!(u.len(), self.n);
        assert_eq!(v.len(), self.n);
        let mut acc = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut row_acc = 0.0;
            for (&j, &a) in cols.iter().zip(vals) {
                row_acc += a * v[j as usize];
            }
            acc += u[i] * row_acc;
        }
        acc
    }

    pub fn quadratic(&self, u: &[f64]) -> f64 {
        self.bilinear(u, u)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Entrywise sum; patterns are merged.
    pub fn add(&self, other: &SparseSymMatrix) -> SparseSymMatrix {
        assert_eq!(self.n, other.n);
        let mut rows = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let (a, _) = self.row(i);
            let (b, _) = other.row(i);
            let mut merged: Vec<u32> = a.iter().chain(b.iter()).copied().collect();
            merged.sort_unstable();
            merged.dedup();
            rows.push(merged);
        }
        let mut out = SparseSymMatrix::from_pattern(rows);
        for m in [self, other] {
            for i in 0..m.n {
                let (cols, vals) = m.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    out.add_at(i, j as usize, v);
                }
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> SparseSymMatrix {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= factor;
        }
        out
    }

    /// Restriction to the index set `keep` (rows and columns), preserving
    /// the order of `keep`.
    pub fn restrict(&self, keep: &[usize]) -> SparseSymMatrix {
        let mut new_index = vec![u32::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            new_index[old] = new as u32;
        }
        let mut rows = Vec::with_capacity(keep.len());
        let mut values = Vec::with_capacity(keep.len());
        for &old in keep {
            let (cols, vals) = self.row(old);
            let mut row = Vec::new();
            let mut row_vals = Vec::new();
            for (&j, &v) in cols.iter().zip(vals) {
                let nj = new_index[j as usize];
                if nj != u32::MAX {
                    row.push(nj);
                    row_vals.push(v);
                }
            }
            rows.push(row);
            values.push(row_vals);
        }
        let mut out = SparseSymMatrix::from_pattern(rows);
        let mut cursor = 0;
        for row_vals in values {
            for v in row_vals {
                out.vals[cursor] = v;
                cursor += 1;
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut dense = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                dense[(i, j as usize)] = v;
            }
        }
        dense
    }

    /// Largest `|A_ij − A_ji|`; zero for every assembled matrix.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(j as usize, i)).abs());
            }
        }
        worst
    }
}

/// Vertex-adjacency sparsity pattern (neighbors plus the diagonal).
fn volume_pattern(mesh: &Mesh) -> Vec<Vec<u32>> {
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); mesh.n_vertices()];
    for (i, row) in rows.iter_mut().enumerate() {
        row.push(i as u32);
    }
    for tri in &mesh.triangles {
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    rows[tri[a]].push(tri[b] as u32);
                }
            }
        }
    }
    for row in &mut rows {
        row.sort_unstable();
        row.dedup();
    }
    rows
}

/// Per-edge constant boundary weight.
pub enum EdgeWeight<'a> {
    One,
    Constant(f64),
    /// Constant per boundary part; this is the shape of the homogenized
    /// weight γ (C_b on Gamma, 1 on Sigma).
    PerTag { gamma: f64, sigma: f64 },
    /// Sampled at the edge midpoint.
    Midpoint(&'a dyn Fn([f64; 2], BoundaryTag) -> f64),
}

impl EdgeWeight<'_> {
    fn value(&self, midpoint: [f64; 2], tag: BoundaryTag) -> f64 {
        match self {
            EdgeWeight::One => 1.0,
            EdgeWeight::Constant(c) => *c,
            EdgeWeight::PerTag { gamma, sigma } => match tag {
                BoundaryTag::Gamma => *gamma,
                BoundaryTag::Sigma => *sigma,
            },
            EdgeWeight::Midpoint(f) => f(midpoint, tag),
        }
    }
}

/// Assembles the stiffness matrix `K_ij = ∫ ∇φ_i · ∇φ_j dx`.
pub fn assemble_stiffness(mesh: &Mesh) -> Result<SparseSymMatrix, FemError> {
    let mut matrix = SparseSymMatrix::from_pattern(volume_pattern(mesh));
    for (index, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.signed_area(index);
        if area <= 0.0 || !area.is_finite() {
            return Err(FemError::DegenerateTriangle { index, area });
        }
        let p = [mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]];
        // constant P1 gradients: b_i = y_{i+1} − y_{i+2}, c_i = x_{i+2} − x_{i+1}
        let mut b = [0.0; 3];
        let mut c = [0.0; 3];
        for i in 0..3 {
            let j = (i + 1) % 3;
            let k = (i + 2) % 3;
            b[i] = p[j][1] - p[k][1];
            c[i] = p[k][0] - p[j][0];
        }
        let scale = 1.0 / (4.0 * area);
        for i in 0..3 {
            for j in 0..3 {
                matrix.add_at(tri[i], tri[j], scale * (b[i] * b[j] + c[i] * c[j]));
            }
        }
    }
    Ok(matrix)
}

/// Assembles the boundary mass `M_ij = ∫_∂ weight · φ_i φ_j dS` over the
/// edges whose tag lies in `tags`. Rows of vertices not on the selected
/// boundary are zero.
pub fn assemble_boundary_mass(
    mesh: &Mesh,
    tags: TagSet,
    weight: &EdgeWeight,
) -> Result<SparseSymMatrix, FemError> {
    let selected: Vec<&crate::mesh::BoundaryEdge> =
        mesh.boundary_edges.iter().filter(|e| tags.contains(e.tag)).collect();
    if selected.is_empty() {
        return Err(FemError::EmptyTagSelection);
    }
    let mut rows: Vec<Vec<u32>> = vec![Vec::new(); mesh.n_vertices()];
    for edge in &selected {
        let [a, b] = edge.vertices;
        rows[a].extend_from_slice(&[a as u32, b as u32]);
        rows[b].extend_from_slice(&[a as u32, b as u32]);
    }
    for row in &mut rows {
        row.sort_unstable();
        row.dedup();
    }
    let mut matrix = SparseSymMatrix::from_pattern(rows);
    for edge in &selected {
        let [a, b] = edge.vertices;
        let pa = mesh.vertices[a];
        let pb = mesh.vertices[b];
        let length = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
        let midpoint = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
        let c = weight.value(midpoint, edge.tag) * length / 6.0;
        matrix.add_at(a, a, 2.0 * c);
        matrix.add_at(b, b, 2.0 * c);
        matrix.add_at(a, b, c);
        matrix.add_at(b, a, c);
    }
    Ok(matrix)
}

/// Assembles the volume mass `M_ij = ∫ φ_i φ_j dx`.
pub fn assemble_volume_mass(mesh: &Mesh) -> Result<SparseSymMatrix, FemError> {
    let mut matrix = SparseSymMatrix::from_pattern(volume_pattern(mesh));
    for (index, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.signed_area(index);
        if area <= 0.0 || !area.is_finite() {
            return Err(FemError::DegenerateTriangle { index, area });
        }
        let w = area / 12.0;
        for i in 0..3 {
            for j in 0..3 {
                matrix.add_at(tri[i], tri[j], if i == j { 2.0 * w } else { w });
            }
        }
    }
    Ok(matrix)
}

/// A P1 function: one coefficient per mesh vertex.
#[derive(Debug, Clone)]
pub struct FeFunction {
    pub mesh: Arc<Mesh>,
    pub coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn new(mesh: Arc<Mesh>, coeffs: Vec<f64>) -> Result<Self, FemError> {
        if coeffs.len() != mesh.n_vertices() {
            return Err(FemError::LengthMismatch { got: coeffs.len(), expected: mesh.n_vertices() });
        }
        Ok(Self { mesh, coeffs })
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: Arc<Mesh>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let coeffs = mesh.vertices.iter().map(|&v| f(v)).collect();
        Self { mesh, coeffs }
    }

    pub fn constant(mesh: Arc<Mesh>, value: f64) -> Self {
        let coeffs = vec![value; mesh.n_vertices()];
        Self { mesh, coeffs }
    }

    /// Point evaluation by barycentric interpolation.
    pub fn eval(&self, p: [f64; 2]) -> Result<f64, MeshError> {
        let (t, bary) = self.mesh.locate(p)?;
        let tri = self.mesh.triangles[t];
        Ok(bary[0] * self.coeffs[tri[0]]
            + bary[1] * self.coeffs[tri[1]]
            + bary[2] * self.coeffs[tri[2]])
    }
}

/// The pieces of the energy norm: `combined² = h1_semi² + boundary_l2²`,
/// which is `‖·‖_0` (weight 1 on the whole boundary), `‖·‖_ε` on a
/// perturbed mesh, or `‖·‖_γ` with the homogenized weight.
#[derive(Debug, Clone, Copy)]
pub struct NormReport {
    pub h1_semi: f64,
    pub l2: f64,
    pub boundary_l2: f64,
    pub combined: f64,
}

/// Evaluates the norm pieces of `u` with the given boundary tags/weight.
pub fn fe_norms(u: &FeFunction, tags: TagSet, weight: &EdgeWeight) -> Result<NormReport, FemError> {
    let stiffness = assemble_stiffness(&u.mesh)?;
    let volume = assemble_volume_mass(&u.mesh)?;
    let boundary = assemble_boundary_mass(&u.mesh, tags, weight)?;
    let h1_sq = stiffness.quadratic(&u.coeffs).max(0.0);
    let l2_sq = volume.quadratic(&u.coeffs).max(0.0);
    let bd_sq = boundary.quadratic(&u.coeffs).max(0.0);
    Ok(NormReport {
        h1_semi: h1_sq.sqrt(),
        l2: l2_sq.sqrt(),
        boundary_l2: bd_sq.sqrt(),
        combined: (h1_sq + bd_sq).sqrt(),
    })
}

/// Interpolates `u` onto the vertices of `dst`. Every destination vertex
/// must lie inside the source mesh.
pub fn interpolate_onto(u: &FeFunction, dst: &Arc<Mesh>) -> Result<FeFunction, FemError> {
    let mut coeffs = Vec::with_capacity(dst.n_vertices());
    for (index, &v) in dst.vertices.iter().enumerate() {
        let value = u
            .eval(v)
            .map_err(|_| FemError::UnlocatableVertex { index, x: v[0], y: v[1] })?;
        coeffs.push(value);
    }
    Ok(FeFunction { mesh: Arc::clone(dst), coeffs })
}
