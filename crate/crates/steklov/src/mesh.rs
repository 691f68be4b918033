//! Conforming P1 triangulations of perturbed strips and a polygonal disk.
//!
//! Strip meshes are generated on a structured grid and pushed onto `Ω_ε` by
//! the vertical shear `(x₁,x₂) ↦ (x₁, x₂ + (1 + x₂/d)·g_ε(x₁))`, which keeps
//! the combinatorial structure fixed across ε. The column count must place a
//! node on every kink of `g_ε`, so the discrete top boundary coincides with
//! the true graph for piecewise-linear profiles.

use std::io::{self, Write};

use thiserror::Error;

use crate::geometry::DomainSpec;

/// Tolerance factor for barycentric containment tests: `tol = 1e-12 · h`.
const LOCATE_TOL_FACTOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("nx = {nx} violates the oscillation-resolution rule: nx must be a multiple of {multiple} with at least {minimum} columns")]
    ResolutionRule { nx: usize, multiple: usize, minimum: usize },
    #[error("mesh resolution must be positive, got nx = {nx}, ny = {ny}")]
    EmptyResolution { nx: usize, ny: usize },
    #[error("strip mesh requires a whole number of profile periods (w/eps = {ratio})")]
    PartialPeriods { ratio: f64 },
    #[error("oscillation reaches too deep: sup g_eps = {sup_g} exceeds depth/2 = {limit}")]
    OscillationTooDeep { sup_g: f64, limit: f64 },
    #[error("triangle {index} is degenerate (signed area {area:.3e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("disk mesh requires n_rings >= 2 and n_sectors >= 8, got ({n_rings}, {n_sectors})")]
    DiskParameters { n_rings: usize, n_sectors: usize },
    #[error("point ({x}, {y}) not found in any mesh triangle")]
    PointNotFound { x: f64, y: f64 },
}

/// Boundary-part label: `Gamma` carries the Steklov condition, `Sigma` the
/// Dirichlet side/bottom in the mixed problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Gamma,
    Sigma,
}

/// Which boundary parts an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TagSet {
    pub gamma: bool,
    pub sigma: bool,
}

impl TagSet {
    pub const GAMMA: TagSet = TagSet { gamma: true, sigma: false };
    pub const SIGMA: TagSet = TagSet { gamma: false, sigma: true };
    pub const ALL: TagSet = TagSet { gamma: true, sigma: true };

    pub fn contains(&self, tag: BoundaryTag) -> bool {
        match tag {
            BoundaryTag::Gamma => self.gamma,
            BoundaryTag::Sigma => self.sigma,
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.gamma && !self.sigma
    }
}

/// An oriented boundary edge (endpoints in loop order) with its tag.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: BoundaryTag,
}

/// Columns and rows of the structured strip grid.
#[derive(Debug, Clone, Copy)]
pub struct MeshResolution {
    pub nx: usize,
    pub ny: usize,
}

impl MeshResolution {
    pub fn new(nx: usize, ny: usize) -> Self {
        Self { nx, ny }
    }

    /// Resolution with `per_period` columns per profile period (`per_period`
    /// itself for the unperturbed strip) and `rows` vertical rows.
    ///
    /// `per_period` must be even and at least 8 so that every kink of the
    /// triangle wave becomes a mesh node.
    pub fn per_period(domain: &DomainSpec, per_period: usize, rows: usize) -> Result<Self, MeshError> {
        if per_period < 8 || per_period % 2 != 0 {
            return Err(MeshError::ResolutionRule { nx: per_period, multiple: 2, minimum: 8 });
        }
        let periods = match domain.periods() {
            Some(p) => p as usize,
            None if domain.eps == 0.0 => 1,
            None => return Err(MeshError::PartialPeriods { ratio: domain.width / domain.eps }),
        };
        Ok(Self { nx: per_period * periods, ny: rows })
    }
}

/// Background bucket grid for expected-O(1) point location.
#[derive(Debug, Clone)]
struct LocatorGrid {
    nx: usize,
    ny: usize,
    min: [f64; 2],
    cell: [f64; 2],
    buckets: Vec<Vec<u32>>,
}

/// A conforming triangulation with tagged boundary edges.
///
/// Immutable after construction; point location is read-only and safe to
/// call from parallel queries.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    /// Vertex index triples, counter-clockwise.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Maximum edge length.
    pub h: f64,
    locator: LocatorGrid,
}

impl Mesh {
    /// Structured mesh of `Ω_ε`: grid on `(0,w) × (−d,0)`, each cell split
    /// along the lower-left-to-upper-right diagonal, then sheared so the top
    /// row lands exactly on the graph of `g_ε`. Top edges are tagged `Gamma`,
    /// all others `Sigma`.
    pub fn build_strip(domain: &DomainSpec, res: &MeshResolution) -> Result<Mesh, MeshError> {
        let (nx, ny) = (res.nx, res.ny);
        if nx == 0 || ny == 0 {
            return Err(MeshError::EmptyResolution { nx, ny });
        }
        if domain.eps > 0.0 {
            let periods = match domain.periods() {
                Some(p) => p as usize,
                None => return Err(MeshError::PartialPeriods { ratio: domain.width / domain.eps }),
            };
            if nx % (2 * periods) != 0 || nx / periods < 8 {
                return Err(MeshError::ResolutionRule {
                    nx,
                    multiple: 2 * periods,
                    minimum: 8 * periods,
                });
            }
            let limit = 0.5 * domain.depth;
            if domain.sup_g() >= limit {
                return Err(MeshError::OscillationTooDeep { sup_g: domain.sup_g(), limit });
            }
        }

        let (w, d) = (domain.width, domain.depth);
        let idx = |i: usize, j: usize| j * (nx + 1) + i;

        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            let y = if j == ny { 0.0 } else { -d * (1.0 - j as f64 / ny as f64) };
            for i in 0..=nx {
                let x = if i == nx { w } else { w * (i as f64 / nx as f64) };
                let (g, _) = domain.g_unchecked(x);
                // shear: bottom row fixed, top row lands on the graph
                let y_sheared = y + (1.0 + y / d) * g;
                vertices.push([x, y_sheared]);
            }
        }

        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let a = idx(i, j);
                let b = idx(i + 1, j);
                let c = idx(i + 1, j + 1);
                let e = idx(i, j + 1);
                triangles.push([a, b, c]);
                triangles.push([a, c, e]);
            }
        }

        let mut boundary_edges = Vec::with_capacity(2 * (nx + ny));
        for i in 0..nx {
            boundary_edges.push(BoundaryEdge { vertices: [idx(i, 0), idx(i + 1, 0)], tag: BoundaryTag::Sigma });
        }
        for j in 0..ny {
            boundary_edges.push(BoundaryEdge { vertices: [idx(nx, j), idx(nx, j + 1)], tag: BoundaryTag::Sigma });
        }
        for i in (0..nx).rev() {
            boundary_edges.push(BoundaryEdge { vertices: [idx(i + 1, ny), idx(i, ny)], tag: BoundaryTag::Gamma });
        }
        for j in (0..ny).rev() {
            boundary_edges.push(BoundaryEdge { vertices: [idx(0, j + 1), idx(0, j)], tag: BoundaryTag::Sigma });
        }

        Mesh::assemble(vertices, triangles, boundary_edges)
    }

    /// Concentric-ring triangulation of a regular polygon inscribed in the
    /// unit disk. All boundary edges are tagged `Gamma`.
    pub fn build_disk(n_rings: usize, n_sectors: usize) -> Result<Mesh, MeshError> {
        if n_rings < 2 || n_sectors < 8 {
            return Err(MeshError::DiskParameters { n_rings, n_sectors });
        }
        let ring_vertex = |k: usize, j: usize| 1 + (k - 1) * n_sectors + (j % n_sectors);

        let mut vertices = Vec::with_capacity(1 + n_rings * n_sectors);
        vertices.push([0.0, 0.0]);
        for k in 1..=n_rings {
            let r = k as f64 / n_rings as f64;
            for j in 0..n_sectors {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / n_sectors as f64;
                vertices.push([r * theta.cos(), r * theta.sin()]);
            }
        }

        let mut triangles = Vec::with_capacity(n_sectors * (2 * n_rings - 1));
        for j in 0..n_sectors {
            triangles.push([0, ring_vertex(1, j), ring_vertex(1, j + 1)]);
        }
        for k in 1..n_rings {
            for j in 0..n_sectors {
                let a = ring_vertex(k, j);
                let b = ring_vertex(k + 1, j);
                let c = ring_vertex(k + 1, j + 1);
                let e = ring_vertex(k, j + 1);
                triangles.push([a, b, c]);
                triangles.push([a, c, e]);
            }
        }

        let boundary_edges = (0..n_sectors)
            .map(|j| BoundaryEdge {
                vertices: [ring_vertex(n_rings, j), ring_vertex(n_rings, j + 1)],
                tag: BoundaryTag::Gamma,
            })
            .collect();

        Mesh::assemble(vertices, triangles, boundary_edges)
    }

    fn assemble(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Mesh, MeshError> {
        let mut h: f64 = 0.0;
        for (index, tri) in triangles.iter().enumerate() {
            let area = signed_area(&vertices, tri);
            if area <= 0.0 || !area.is_finite() {
                return Err(MeshError::DegenerateTriangle { index, area });
            }
            for e in 0..3 {
                let p = vertices[tri[e]];
                let q = vertices[tri[(e + 1) % 3]];
                h = h.max(((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt());
            }
        }
        let locator = LocatorGrid::build(&vertices, &triangles);
        Ok(Mesh { vertices, triangles, boundary_edges, h, locator })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn signed_area(&self, triangle: usize) -> f64 {
        signed_area(&self.vertices, &self.triangles[triangle])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.signed_area(t)).sum()
    }

    /// Total length of boundary edges whose tag is in `tags`.
    pub fn boundary_length(&self, tags: TagSet) -> f64 {
        self.boundary_edges
            .iter()
            .filter(|e| tags.contains(e.tag))
            .map(|e| self.edge_length(e.vertices))
            .sum()
    }

    pub fn edge_length(&self, [a, b]: [usize; 2]) -> f64 {
        let p = self.vertices[a];
        let q = self.vertices[b];
        ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt()
    }

    /// Marks every vertex incident to an edge carrying a tag in `tags`.
    pub fn vertices_on(&self, tags: TagSet) -> Vec<bool> {
        let mut mask = vec![false; self.vertices.len()];
        for edge in &self.boundary_edges {
            if tags.contains(edge.tag) {
                mask[edge.vertices[0]] = true;
                mask[edge.vertices[1]] = true;
            }
        }
        mask
    }

    /// Largest ratio of longest edge to shortest altitude over all
    /// triangles; an anisotropy diagnostic for strongly sheared meshes.
    pub fn max_aspect_ratio(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (t, tri) in self.triangles.iter().enumerate() {
            let mut longest: f64 = 0.0;
            for e in 0..3 {
                longest = longest.max(self.edge_length([tri[e], tri[(e + 1) % 3]]));
            }
            let altitude = 2.0 * self.signed_area(t) / longest;
            worst = worst.max(longest / altitude);
        }
        worst
    }

    /// `V − E + F`; equals 1 for a disk-topology triangulation.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(3 * self.triangles.len());
        for tri in &self.triangles {
            for e in 0..3 {
                let a = tri[e];
                let b = tri[(e + 1) % 3];
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }

    /// Finds a triangle containing `p` and its barycentric coordinates,
    /// which are guaranteed to lie in `[−tol, 1+tol]` with `tol = 1e-12·h`.
    pub fn locate(&self, p: [f64; 2]) -> Result<(usize, [f64; 3]), MeshError> {
        let tol = LOCATE_TOL_FACTOR * self.h;
        if let Some(hit) = self.scan(self.locator.candidates(p), p, tol) {
            return Ok(hit);
        }
        // Bucket miss (rounding at cell borders): fall back to a full scan.
        if let Some(hit) = self.scan(0..self.triangles.len() as u32, p, tol) {
            return Ok(hit);
        }
        Err(MeshError::PointNotFound { x: p[0], y: p[1] })
    }

    fn scan(
        &self,
        candidates: impl Iterator<Item = u32>,
        p: [f64; 2],
        tol: f64,
    ) -> Option<(usize, [f64; 3])> {
        let mut best: Option<(f64, usize, [f64; 3])> = None;
        for t in candidates {
            let bary = self.barycentric(t as usize, p);
            let min = bary[0].min(bary[1]).min(bary[2]);
            if best.as_ref().is_none_or(|(m, _, _)| min > *m) {
                best = Some((min, t as usize, bary));
            }
        }
        match best {
            Some((min, t, bary)) if min >= -tol => Some((t, bary)),
            _ => None,
        }
    }

    /// Barycentric coordinates of `p` with respect to triangle `t`.
    pub fn barycentric(&self, t: usize, p: [f64; 2]) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        let pa = self.vertices[a];
        let pb = self.vertices[b];
        let pc = self.vertices[c];
        let det = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]);
        let l1 = ((pb[0] - p[0]) * (pc[1] - p[1]) - (pc[0] - p[0]) * (pb[1] - p[1])) / det;
        let l2 = ((pc[0] - p[0]) * (pa[1] - p[1]) - (pa[0] - p[0]) * (pc[1] - p[1])) / det;
        [l1, l2, 1.0 - l1 - l2]
    }

    /// Legacy ASCII VTK export: POLYDATA points, boundary lines, triangles,
    /// and a cell-data scalar carrying the edge tag (1 = Gamma, 2 = Sigma,
    /// 0 = interior triangle).
    pub fn write_vtk(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "# vtk DataFile Version 3.0")?;
        writeln!(out, "steklov mesh")?;
        writeln!(out, "ASCII")?;
        writeln!(out, "DATASET POLYDATA")?;
        writeln!(out, "POINTS {} double", self.vertices.len())?;
        for v in &self.vertices {
            writeln!(out, "{:.17e} {:.17e} 0", v[0], v[1])?;
        }
        writeln!(out, "LINES {} {}", self.boundary_edges.len(), 3 * self.boundary_edges.len())?;
        for e in &self.boundary_edges {
            writeln!(out, "2 {} {}", e.vertices[0], e.vertices[1])?;
        }
        writeln!(out, "POLYGONS {} {}", self.triangles.len(), 4 * self.triangles.len())?;
        for t in &self.triangles {
            writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
        }
        let n_cells = self.boundary_edges.len() + self.triangles.len();
        writeln!(out, "CELL_DATA {n_cells}")?;
        writeln!(out, "SCALARS boundary_tag int 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for e in &self.boundary_edges {
            writeln!(out, "{}", if e.tag == BoundaryTag::Gamma { 1 } else { 2 })?;
        }
        for _ in &self.triangles {
            writeln!(out, "0")?;
        }
        Ok(())
    }
}

fn signed_area(vertices: &[[f64; 2]], tri: &[usize; 3]) -> f64 {
    let a = vertices[tri[0]];
    let b = vertices[tri[1]];
    let c = vertices[tri[2]];
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl LocatorGrid {
    fn build(vertices: &[[f64; 2]], triangles: &[[usize; 3]]) -> LocatorGrid {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for v in vertices {
            for k in 0..2 {
                min[k] = min[k].min(v[k]);
                max[k] = max[k].max(v[k]);
            }
        }
        let extent = [(max[0] - min[0]).max(1e-300), (max[1] - min[1]).max(1e-300)];
        let target = (triangles.len() as f64 / 2.0).sqrt().ceil().max(1.0);
        let aspect = (extent[0] / extent[1]).sqrt();
        let nx = ((target * aspect).ceil() as usize).max(1);
        let ny = ((target / aspect).ceil() as usize).max(1);
        let cell = [extent[0] / nx as f64, extent[1] / ny as f64];

        let mut buckets = vec![Vec::new(); nx * ny];
        let clamp = |v: f64, n: usize| (v.max(0.0) as usize).min(n - 1);
        for (t, tri) in triangles.iter().enumerate() {
            let xs = [vertices[tri[0]][0], vertices[tri[1]][0], vertices[tri[2]][0]];
            let ys = [vertices[tri[0]][1], vertices[tri[1]][1], vertices[tri[2]][1]];
            let x_lo = clamp(((xs.iter().cloned().fold(f64::INFINITY, f64::min) - min[0]) / cell[0]).floor(), nx);
            let x_hi = clamp(((xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - min[0]) / cell[0]).floor(), nx);
            let y_lo = clamp(((ys.iter().cloned().fold(f64::INFINITY, f64::min) - min[1]) / cell[1]).floor(), ny);
            let y_hi = clamp(((ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - min[1]) / cell[1]).floor(), ny);
            for cy in y_lo..=y_hi {
                for cx in x_lo..=x_hi {
                    buckets[cy * nx + cx].push(t as u32);
                }
            }
        }
        LocatorGrid { nx, ny, min, cell, buckets }
    }

    fn candidates(&self, p: [f64; 2]) -> impl Iterator<Item = u32> + '_ {
        let cx = (((p[0] - self.min[0]) / self.cell[0]).floor().max(0.0) as usize).min(self.nx - 1);
        let cy = (((p[1] - self.min[1]) / self.cell[1]).floor().max(0.0) as usize).min(self.ny - 1);
        self.buckets[cy * self.nx + cx].iter().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ProfileSpec;
    use proptest::prelude::*;

    fn triangle_domain(alpha: f64, eps: f64) -> DomainSpec {
        DomainSpec::new(1.0, 1.0, alpha, eps, ProfileSpec::triangle()).unwrap()
    }

    fn unit_square(n: usize) -> Mesh {
        Mesh::build_strip(&DomainSpec::unperturbed(1.0, 1.0), &MeshResolution::new(n, n)).unwrap()
    }

    #[test]
    fn flat_two_by_two_counts() {
        let mesh = unit_square(2);
        assert_eq!(mesh.n_vertices(), 9);
        assert_eq!(mesh.triangles.len(), 8);
        assert_eq!(mesh.boundary_edges.len(), 8);
        let gamma = mesh.boundary_edges.iter().filter(|e| e.tag == BoundaryTag::Gamma).count();
        assert_eq!(gamma, 2);
        assert_eq!(mesh.boundary_edges.len() - gamma, 6);
    }

    #[test]
    fn strip_area_identity() {
        // mean of the triangle wave is 1/4
        let domain = triangle_domain(1.0, 0.25);
        let mesh = Mesh::build_strip(&domain, &MeshResolution::per_period(&domain, 8, 8).unwrap()).unwrap();
        let expected = 1.0 + 0.25 * 0.25;
        assert!((mesh.total_area() - expected).abs() < 1e-13, "area = {}", mesh.total_area());
    }

    #[test]
    fn strip_positive_areas_and_exact_top() {
        let domain = triangle_domain(0.5, 1.0 / 16.0);
        let res = MeshResolution::per_period(&domain, 8, 16).unwrap();
        let mesh = Mesh::build_strip(&domain, &res).unwrap();
        for t in 0..mesh.triangles.len() {
            assert!(mesh.signed_area(t) > 0.0);
        }
        for edge in mesh.boundary_edges.iter().filter(|e| e.tag == BoundaryTag::Gamma) {
            for &v in &edge.vertices {
                let [x, y] = mesh.vertices[v];
                let (g, _) = domain.g(x).unwrap();
                assert_eq!(y, g, "Gamma vertex off the graph at x = {x}");
            }
        }
    }

    #[test]
    fn boundary_length_matches_exact_perimeter() {
        for (alpha, eps) in [(1.0, 0.25), (2.0, 0.125), (0.5, 1.0 / 16.0)] {
            let domain = triangle_domain(alpha, eps);
            let res = MeshResolution::per_period(&domain, 8, 8).unwrap();
            let mesh = Mesh::build_strip(&domain, &res).unwrap();
            let exact = domain.exact_perimeter();
            assert!(exact.whole_periods);
            assert!(
                (mesh.boundary_length(TagSet::ALL) - exact.value).abs() < 1e-12,
                "alpha = {alpha}, eps = {eps}"
            );
        }
    }

    #[test]
    fn boundary_edges_form_single_closed_loop() {
        let domain = triangle_domain(1.0, 0.25);
        let mesh = Mesh::build_strip(&domain, &MeshResolution::per_period(&domain, 8, 4).unwrap()).unwrap();
        let edges = &mesh.boundary_edges;
        let start = edges[0].vertices[0];
        let mut current = start;
        for edge in edges {
            assert_eq!(edge.vertices[0], current, "loop broken");
            current = edge.vertices[1];
        }
        assert_eq!(current, start, "loop not closed");
    }

    #[test]
    fn boundary_edges_belong_to_exactly_one_triangle() {
        let mesh = unit_square(3);
        for edge in &mesh.boundary_edges {
            let [a, b] = edge.vertices;
            let owners = mesh
                .triangles
                .iter()
                .filter(|tri| tri.contains(&a) && tri.contains(&b))
                .count();
            assert_eq!(owners, 1);
        }
    }

    #[test]
    fn euler_characteristic_is_one() {
        let mesh = unit_square(4);
        assert_eq!(mesh.euler_characteristic(), 1);
        let disk = Mesh::build_disk(3, 12).unwrap();
        assert_eq!(disk.euler_characteristic(), 1);
    }

    #[test]
    fn resolution_rule_enforced() {
        let domain = triangle_domain(1.0, 0.25);
        // 4 periods: nx must be a multiple of 8 and at least 32
        let err = Mesh::build_strip(&domain, &MeshResolution::new(28, 8)).unwrap_err();
        match err {
            MeshError::ResolutionRule { multiple, minimum, .. } => {
                assert_eq!(multiple, 8);
                assert_eq!(minimum, 32);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(Mesh::build_strip(&domain, &MeshResolution::new(32, 8)).is_ok());
    }

    #[test]
    fn disk_counts_and_parameter_bounds() {
        assert!(matches!(
            Mesh::build_disk(1, 8),
            Err(MeshError::DiskParameters { .. })
        ));
        let disk = Mesh::build_disk(2, 8).unwrap();
        assert_eq!(disk.n_vertices(), 17);
        assert_eq!(disk.triangles.len(), 24);
        assert!(disk.boundary_edges.iter().all(|e| e.tag == BoundaryTag::Gamma));
    }

    #[test]
    fn disk_boundary_is_inscribed_polygon() {
        for n_sectors in [8usize, 32, 128] {
            let disk = Mesh::build_disk(2, n_sectors).unwrap();
            let expected = 2.0 * n_sectors as f64 * (std::f64::consts::PI / n_sectors as f64).sin();
            assert!((disk.boundary_length(TagSet::ALL) - expected).abs() < 1e-12);
        }
        // inscribed polygon perimeter approaches 2π from below
        let fine = Mesh::build_disk(2, 512).unwrap().boundary_length(TagSet::ALL);
        assert!(fine < 2.0 * std::f64::consts::PI);
        assert!(2.0 * std::f64::consts::PI - fine < 1e-4);
    }

    #[test]
    fn locate_vertex_centroid_outside() {
        let mesh = unit_square(4);
        // a vertex: one barycentric coordinate is exactly 1
        let v = mesh.vertices[7];
        let (t, bary) = mesh.locate(v).unwrap();
        assert!(mesh.triangles[t].contains(&7));
        assert!(bary.iter().any(|&l| l == 1.0));

        let tri = mesh.triangles[5];
        let centroid = [
            (mesh.vertices[tri[0]][0] + mesh.vertices[tri[1]][0] + mesh.vertices[tri[2]][0]) / 3.0,
            (mesh.vertices[tri[0]][1] + mesh.vertices[tri[1]][1] + mesh.vertices[tri[2]][1]) / 3.0,
        ];
        let (t, bary) = mesh.locate(centroid).unwrap();
        assert_eq!(t, 5);
        for l in bary {
            assert!((l - 1.0 / 3.0).abs() < 1e-12);
        }

        assert!(matches!(
            mesh.locate([1.1, -0.5]),
            Err(MeshError::PointNotFound { .. })
        ));
    }

    #[test]
    fn vtk_export_contains_tags() {
        let mesh = unit_square(2);
        let mut buffer = Vec::new();
        mesh.write_vtk(&mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        assert!(text.contains("DATASET POLYDATA"));
        assert!(text.contains("POINTS 9 double"));
        assert!(text.contains("POLYGONS 8 32"));
        assert!(text.contains("CELL_DATA 16"));
    }

    #[test]
    fn interior_edges_shared_with_opposite_orientation() {
        let mesh = unit_square(3);
        let mut directed: Vec<(usize, usize)> = Vec::new();
        for tri in &mesh.triangles {
            for e in 0..3 {
                directed.push((tri[e], tri[(e + 1) % 3]));
            }
        }
        let boundary: Vec<(usize, usize)> =
            mesh.boundary_edges.iter().map(|e| (e.vertices[0], e.vertices[1])).collect();
        for &(a, b) in &directed {
            let twin = directed.iter().filter(|&&(c, d)| (c, d) == (b, a)).count();
            if boundary.contains(&(a, b)) {
                assert_eq!(twin, 0, "boundary edge ({a},{b}) has a twin");
            } else {
                assert_eq!(twin, 1, "interior edge ({a},{b}) lacks its twin");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn locate_random_points(x in 0.01f64..0.99, y in -0.99f64..-0.01) {
            let mesh = unit_square(8);
            let (t, bary) = mesh.locate([x, y]).unwrap();
            // reconstruct the point from its barycentric coordinates
            let tri = mesh.triangles[t];
            let mut p = [0.0, 0.0];
            for k in 0..3 {
                p[0] += bary[k] * mesh.vertices[tri[k]][0];
                p[1] += bary[k] * mesh.vertices[tri[k]][1];
            }
            prop_assert!((p[0] - x).abs() < 1e-12);
            prop_assert!((p[1] - y).abs() < 1e-12);
        }
    }
}
