//! The domain-perturbation apparatus: the connecting map `Φ_ε`/`E_ε`
//! between the fixed strip and its perturbed relatives, transported norms,
//! eigenfunction errors on the intersection, and the two boundary-measure
//! diagnostics that separate the three oscillation regimes.
//!
//! With `κ_ε = ‖g_ε − g‖_∞`, `k_ε = k̂·κ_ε` and `g̃_ε = g_ε − k_ε`, the
//! blend function
//!
//! ```text
//! h_ε(x₁,x₂) = 0                                  for x₂ ≤ g̃_ε(x₁)
//! h_ε(x₁,x₂) = g_ε(x₁)·((x₂ − g̃_ε)/(g_ε − g̃_ε))²  for g̃_ε < x₂ ≤ g_ε
//! ```
//!
//! defines `Φ_ε(x₁,x₂) = (x₁, x₂ − h_ε)`, which is the identity below the
//! blend layer and carries the oscillating top onto the flat one. For
//! `k̂ > 4` its Jacobian `1 − ∂h_ε/∂x₂` stays within `[1/2, 3/2]`; the
//! default `k̂ = 8` keeps it inside `(3/4, 1]`.

use std::sync::Arc;

use thiserror::Error;

use crate::fem::{
    assemble_stiffness, assemble_volume_mass, fe_norms, interpolate_onto, EdgeWeight, FeFunction,
    FemError, NormReport,
};
use crate::geometry::DomainSpec;
use crate::mesh::{BoundaryTag, Mesh, TagSet};

/// Default blend-layer thickness multiplier; any value above 4 is valid.
pub const DEFAULT_K_HAT: f64 = 8.0;

/// Certificate sample density: points per period horizontally, and levels
/// across the blend layer.
const CERT_SAMPLES_X: usize = 64;
const CERT_SAMPLES_Y: usize = 64;

#[derive(Debug, Error)]
pub enum PerturbError {
    #[error("k_hat must exceed 4, got {k_hat}")]
    KHatTooSmall { k_hat: f64 },
    #[error("blend layer of thickness {k_eps} exits the strip of depth {depth}")]
    BlendExitsStrip { k_eps: f64, depth: f64 },
    #[error(transparent)]
    Fem(#[from] FemError),
}

/// Verified bounds on the sampled Jacobian `1 − ∂h_ε/∂x₂`.
#[derive(Debug, Clone, Copy)]
pub struct JacobianCertificate {
    pub min_det: f64,
    pub max_det: f64,
    pub samples: usize,
}

/// The discrete connecting map between `Ω` and `Ω_ε`.
#[derive(Debug, Clone)]
pub struct ConnectingMap {
    pub domain: DomainSpec,
    pub k_hat: f64,
    /// `κ_ε = ‖g_ε − g‖_∞ = ε^α · max b`.
    pub kappa_eps: f64,
    /// Blend-layer thickness `k_ε = k̂·κ_ε`.
    pub k_eps: f64,
    certificate: JacobianCertificate,
}

impl ConnectingMap {
    /// Builds the map and samples its Jacobian certificate (at least 64
    /// points per period per layer level).
    ///
    /// The layer may touch the bottom (`k_ε = d`, where `h` vanishes
    /// anyway) but must not exit the strip.
    pub fn new(domain: &DomainSpec, k_hat: f64) -> Result<Self, PerturbError> {
        if !(k_hat > 4.0) {
            return Err(PerturbError::KHatTooSmall { k_hat });
        }
        let kappa_eps = domain.sup_g();
        let k_eps = k_hat * kappa_eps;
        if k_eps > domain.depth {
            return Err(PerturbError::BlendExitsStrip { k_eps, depth: domain.depth });
        }
        let mut map = Self {
            domain: *domain,
            k_hat,
            kappa_eps,
            k_eps,
            certificate: JacobianCertificate { min_det: 1.0, max_det: 1.0, samples: 0 },
        };
        map.certificate = map.sample_certificate();
        Ok(map)
    }

    /// Lower edge of the blend layer, `g̃_ε = g_ε − k_ε`.
    pub fn g_tilde(&self, x1: f64) -> f64 {
        self.domain.g_unchecked(x1).0 - self.k_eps
    }

    /// The blend function `h_ε`; zero at and below `g̃_ε`, equal to `g_ε`
    /// on the top graph.
    pub fn h(&self, p: [f64; 2]) -> f64 {
        if self.kappa_eps == 0.0 {
            return 0.0;
        }
        let (g, _) = self.domain.g_unchecked(p[0]);
        let q = ((p[1] - (g - self.k_eps)) / self.k_eps).clamp(0.0, 1.0);
        g * q * q
    }

    /// `∂h_ε/∂x₂` (one-sided at the layer edges).
    pub fn dh_dx2(&self, p: [f64; 2]) -> f64 {
        if self.kappa_eps == 0.0 {
            return 0.0;
        }
        let (g, _) = self.domain.g_unchecked(p[0]);
        let q = (p[1] - (g - self.k_eps)) / self.k_eps;
        if q <= 0.0 {
            0.0
        } else {
            2.0 * g * q.min(1.0) / self.k_eps
        }
    }

    /// `Φ_ε(x₁,x₂) = (x₁, x₂ − h_ε(x₁,x₂))`.
    pub fn phi(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0], p[1] - self.h(p)]
    }

    /// Jacobian determinant `det DΦ_ε = 1 − ∂h_ε/∂x₂`.
    pub fn jacobian(&self, p: [f64; 2]) -> f64 {
        1.0 - self.dh_dx2(p)
    }

    pub fn certificate(&self) -> JacobianCertificate {
        self.certificate
    }

    fn sample_certificate(&self) -> JacobianCertificate {
        if self.kappa_eps == 0.0 {
            return JacobianCertificate { min_det: 1.0, max_det: 1.0, samples: 1 };
        }
        let eps = self.domain.eps;
        let periods = (self.domain.width / eps).round().max(1.0) as usize;
        let mut min_det = f64::INFINITY;
        let mut max_det = f64::NEG_INFINITY;
        let mut samples = 0;
        for period in 0..periods {
            for i in 0..CERT_SAMPLES_X {
                let x = eps * (period as f64 + (i as f64 + 0.5) / CERT_SAMPLES_X as f64);
                let (g, _) = self.domain.g_unchecked(x);
                let lower = g - self.k_eps;
                // one point below the layer (identity region), then levels
                // strictly inside the layer
                let below = [x, (lower - 0.1 * self.k_eps).max(-self.domain.depth)];
                let det = self.jacobian(below);
                min_det = min_det.min(det);
                max_det = max_det.max(det);
                samples += 1;
                for j in 0..CERT_SAMPLES_Y {
                    let y = lower + self.k_eps * (j as f64 + 0.5) / CERT_SAMPLES_Y as f64;
                    let det = self.jacobian([x, y]);
                    min_det = min_det.min(det);
                    max_det = max_det.max(det);
                    samples += 1;
                }
            }
        }
        JacobianCertificate { min_det, max_det, samples }
    }
}

/// Transports `u ∈ H¹(Ω)` onto the perturbed mesh: the coefficient at each
/// vertex `x` of `eps_mesh` is `u(Φ_ε(x))`.
pub fn apply_e(
    u: &FeFunction,
    eps_mesh: &Arc<Mesh>,
    map: &ConnectingMap,
) -> Result<FeFunction, PerturbError> {
    let (w, d) = (map.domain.width, map.domain.depth);
    let mut coeffs = Vec::with_capacity(eps_mesh.n_vertices());
    for (index, &vertex) in eps_mesh.vertices.iter().enumerate() {
        let mut y = map.phi(vertex);
        // Φ_ε lands in the closed strip; snap off rounding dust
        y[0] = y[0].clamp(0.0, w);
        y[1] = y[1].clamp(-d, 0.0);
        let value = u
            .eval(y)
            .map_err(|_| FemError::UnlocatableVertex { index, x: y[0], y: y[1] })?;
        coeffs.push(value);
    }
    Ok(FeFunction::new(Arc::clone(eps_mesh), coeffs)?)
}

/// `‖E_ε u‖_ε`: transports `u` and evaluates the ε-norm (gradient energy
/// plus whole-boundary mass) on the perturbed mesh.
pub fn e_norm(
    u: &FeFunction,
    eps_mesh: &Arc<Mesh>,
    map: &ConnectingMap,
) -> Result<NormReport, PerturbError> {
    let transported = apply_e(u, eps_mesh, map)?;
    Ok(fe_norms(&transported, TagSet::ALL, &EdgeWeight::One)?)
}

/// `‖u_ε − u‖_{H¹(Ω_ε ∩ Ω)}`: since `g_ε ≥ 0` the intersection is `Ω`
/// itself, so `u_ε` is interpolated onto the mesh of `u` and the full H¹
/// norm (gradient energy plus volume mass) of the difference is returned.
/// The sign of `u_ε` is chosen to minimize the error, eigenfunctions being
/// defined only up to sign.
pub fn h1_intersection_error(u_eps: &FeFunction, u: &FeFunction) -> Result<f64, PerturbError> {
    let pulled = interpolate_onto(u_eps, &u.mesh)?;
    let stiffness = assemble_stiffness(&u.mesh)?;
    let volume = assemble_volume_mass(&u.mesh)?;
    let error_for = |sign: f64| {
        let diff: Vec<f64> =
            pulled.coeffs.iter().zip(&u.coeffs).map(|(&a, &b)| sign * a - b).collect();
        (stiffness.quadratic(&diff) + volume.quadratic(&diff)).sqrt()
    };
    Ok(error_for(1.0).min(error_for(-1.0)))
}

/// Residual of the weak-L¹ convergence of the surface element:
/// `|∫₀ʷ √(1+g_ε'²)·φ dx₁ − target·∫₀ʷ φ dx₁|`, with kink-aware composite
/// quadrature.
pub fn weak_l1_residual(
    domain: &DomainSpec,
    phi: impl Fn(f64) -> f64,
    target_weight: f64,
) -> f64 {
    debug_assert!(domain.eps > 0.0, "weak-L1 residual needs a perturbed domain");
    let weighted = domain.integrate_top(|x, _, slope| (1.0 + slope * slope).sqrt() * phi(x));
    let plain = domain.integrate_top(|x, _, _| phi(x));
    (weighted - target_weight * plain).abs()
}

/// Length of `{x₁ ∈ (0,w) : √(1+g_ε'(x₁)²) ≤ t}`; exact for
/// piecewise-constant slopes, closed-form for the raised cosine over whole
/// periods.
pub fn sublevel_measure(domain: &DomainSpec, t: f64) -> f64 {
    assert!(t > 0.0, "threshold must be positive");
    let w = domain.width;
    if t < 1.0 {
        return 0.0; // the surface element is at least 1
    }
    if domain.eps == 0.0 {
        return w;
    }
    use crate::geometry::ProfileKind;
    let slope_scale = domain.eps.powf(domain.alpha - 1.0);
    match domain.profile.kind {
        ProfileKind::Zero => w,
        ProfileKind::TriangleWave => {
            // |g_ε'| is the constant ε^{α−1}·A away from kinks
            let m = slope_scale * domain.profile.amplitude;
            if 1.0 + m * m <= t * t {
                w
            } else {
                0.0
            }
        }
        ProfileKind::RaisedCosine => {
            // |g_ε'| = m·|sin(2πy)| with m = ε^{α−1}·A·π
            let m = slope_scale * domain.profile.amplitude * std::f64::consts::PI;
            if m == 0.0 {
                return w;
            }
            let c = ((t * t - 1.0).sqrt() / m).min(1.0);
            w * 2.0 * c.asin() / std::f64::consts::PI
        }
    }
}

/// Oscillation regime by the exponent α.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// α > 1: the spectrum converges to the unperturbed one.
    Stability,
    /// α = 1: the spectrum converges to the weighted limit problem.
    Critical,
    /// α < 1: every positive eigenvalue degenerates to 0.
    Degeneration,
}

impl Regime {
    pub fn from_alpha(alpha: f64) -> Regime {
        if (alpha - 1.0).abs() < 1e-12 {
            Regime::Critical
        } else if alpha > 1.0 {
            Regime::Stability
        } else {
            Regime::Degeneration
        }
    }
}

/// The predicted limit of the perturbed spectrum: the homogenized weight
/// `C_b`, the regime, and the boundary weight γ (`C_b` on `Gamma`, 1 on
/// `Sigma`) of the critical limit problem.
#[derive(Debug, Clone, Copy)]
pub struct LimitDescriptor {
    pub c_b: f64,
    pub regime: Regime,
}

impl LimitDescriptor {
    pub fn new(domain: &DomainSpec) -> LimitDescriptor {
        LimitDescriptor { c_b: domain.profile.c_b(), regime: Regime::from_alpha(domain.alpha) }
    }

    /// The homogenized boundary weight of the critical limit problem.
    pub fn gamma(&self, tag: BoundaryTag) -> f64 {
        match tag {
            BoundaryTag::Gamma => self.c_b,
            BoundaryTag::Sigma => 1.0,
        }
    }

    /// Limit of `μ_n^ε` predicted from the unperturbed eigenvalue `μ_n^0`.
    pub fn predicted_limit(&self, mu0: f64) -> f64 {
        match self.regime {
            Regime::Stability => mu0,
            Regime::Critical => mu0 / self.c_b,
            Regime::Degeneration => 0.0,
        }
    }

    /// A convergence *ratio* `μ^ε/predicted` only makes sense when the
    /// predicted limit is nonzero.
    pub fn ratio_defined(&self) -> bool {
        self.regime != Regime::Degeneration
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ProfileSpec;
    use crate::mesh::MeshResolution;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn triangle_domain(alpha: f64, eps: f64) -> DomainSpec {
        DomainSpec::new(1.0, 1.0, alpha, eps, ProfileSpec::triangle()).unwrap()
    }

    #[test]
    fn identity_below_the_blend_layer() {
        let domain = triangle_domain(1.0, 0.125);
        let map = ConnectingMap::new(&domain, DEFAULT_K_HAT).unwrap();
        for x1 in [0.0, 0.11, 0.4375, 0.93] {
            let x2 = map.g_tilde(x1) - 1e-6;
            let p = [x1, x2];
            assert_eq!(map.phi(p), p);
            assert_eq!(map.h(p), 0.0);
            assert_eq!(map.jacobian(p), 1.0);
        }
    }

    #[test]
    fn top_graph_lands_on_the_flat_boundary() {
        let domain = triangle_domain(1.0, 0.25);
        let map = ConnectingMap::new(&domain, DEFAULT_K_HAT).unwrap();
        for x1 in [0.0, 0.1, 0.125, 0.3, 0.625] {
            let (g, _) = domain.g(x1).unwrap();
            let image = map.phi([x1, g]);
            assert_eq!(image[0], x1);
            assert_eq!(image[1], 0.0, "top vertex at x1 = {x1} did not land on Γ");
        }
    }

    #[test]
    fn k_hat_bound_is_enforced() {
        let domain = triangle_domain(1.0, 0.125);
        assert!(matches!(
            ConnectingMap::new(&domain, 4.0),
            Err(PerturbError::KHatTooSmall { .. })
        ));
        assert!(ConnectingMap::new(&domain, 4.01).is_ok());
    }

    #[test]
    fn blend_layer_must_stay_inside() {
        // alpha = 1/2, eps = 1/4: k_eps = 8·(1/2)·(1/2) = 2 > d = 1
        let domain = triangle_domain(0.5, 0.25);
        assert!(matches!(
            ConnectingMap::new(&domain, DEFAULT_K_HAT),
            Err(PerturbError::BlendExitsStrip { .. })
        ));
        // at eps = 1/16 the layer thickness is exactly 1 = d: allowed
        let domain = triangle_domain(0.5, 1.0 / 16.0);
        assert!(ConnectingMap::new(&domain, DEFAULT_K_HAT).is_ok());
    }

    #[test]
    fn jacobian_certificate_within_paper_bounds() {
        for (alpha, eps) in [(2.0, 0.25), (2.0, 1.0 / 32.0), (1.0, 0.125), (1.0, 1.0 / 32.0)] {
            let domain = triangle_domain(alpha, eps);
            let map = ConnectingMap::new(&domain, DEFAULT_K_HAT).unwrap();
            let cert = map.certificate();
            assert!(cert.min_det > 0.75, "min {}", cert.min_det);
            assert!(cert.max_det <= 1.0);
            // inside the paper's wider band as well
            assert!(cert.min_det >= 0.5 && cert.max_det <= 1.5);
            assert!(cert.samples >= 64 * 64);
        }
    }

    #[test]
    fn analytic_jacobian_bound_is_tight() {
        let domain = triangle_domain(1.0, 0.125);
        let map = ConnectingMap::new(&domain, DEFAULT_K_HAT).unwrap();
        // at the profile peak and the very top, ∂h/∂x₂ = 2/k̂ exactly
        let x_peak = 0.0625;
        let (g, _) = domain.g(x_peak).unwrap();
        assert!((map.dh_dx2([x_peak, g]) - 2.0 / DEFAULT_K_HAT).abs() < 1e-13);
    }

    #[test]
    fn apply_e_preserves_constants_and_x1_functions() {
        let domain = triangle_domain(1.0, 0.25);
        let map = ConnectingMap::new(&domain, DEFAULT_K_HAT).unwrap();
        let flat = Arc::new(
            Mesh::build_strip(&DomainSpec::unperturbed(1.0, 1.0), &MeshResolution::new(32, 16))
                .unwrap(),
        );
        let eps_mesh = Arc::new(
            Mesh::build_strip(&domain, &MeshResolution::new(32, 8)).unwrap(),
        );

        let one = FeFunction::constant(Arc::clone(&flat), 1.0);
        let transported = apply_e(&one, &eps_mesh, &map).unwrap();
        assert!(transported.coeffs.iter().all(|&c| c == 1.0));

        // columns of the two meshes line up, so an x₁-only function is
        // reproduced coefficientwise
        let fx = FeFunction::interpolate(Arc::clone(&flat), |p| 3.0 * p[0] - 1.0);
        let transported = apply_e(&fx, &eps_mesh, &map).unwrap();
        for (i, &v) in eps_mesh.vertices.iter().enumerate() {
            assert!(
                (transported.coeffs[i] - (3.0 * v[0] - 1.0)).abs() < 1e-12,
                "vertex {i} at x1 = {}",
                v[0]
            );
        }
    }

    #[test]
    fn e_norm_approaches_unperturbed_norm_in_the_stability_regime() {
        let flat = Arc::new(
            Mesh::build_strip(&DomainSpec::unperturbed(1.0, 1.0), &MeshResolution::new(64, 64))
                .unwrap(),
        );
        let u = FeFunction::interpolate(Arc::clone(&flat), |p| p[0] + p[1]);
        let report = fe_norms(&u, TagSet::ALL, &EdgeWeight::One).unwrap();
        let norm0 = report.combined;
        assert!((norm0 * norm0 - 10.0 / 3.0).abs() < 1e-12);

        let mut last_gap = f64::INFINITY;
        for eps in [0.25, 0.125, 1.0 / 16.0] {
            let domain = triangle_domain(2.0, eps);
            let map = ConnectingMap::new(&domain, DEFAULT_K_HAT).unwrap();
            let res = MeshResolution::per_period(&domain, 16, 64).unwrap();
            let eps_mesh = Arc::new(Mesh::build_strip(&domain, &res).unwrap());
            let norm_eps = e_norm(&u, &eps_mesh, &map).unwrap().combined;
            let gap = (norm_eps - norm0).abs();
            assert!(gap < last_gap, "gap {gap} did not shrink at eps = {eps}");
            last_gap = gap;
        }
        assert!(last_gap / norm0 < 0.01);
    }

    #[test]
    fn weak_l1_triangle_critical_is_exact() {
        let domain = triangle_domain(1.0, 0.125);
        let residual = weak_l1_residual(&domain, |_| 1.0, SQRT2);
        assert!(residual < 1e-12, "residual {residual}");
        let residual = weak_l1_residual(&domain, |x| x, SQRT2);
        assert!(residual < 1e-12, "residual {residual}");
    }

    #[test]
    fn weak_l1_stability_regime_converges_to_one() {
        let mut last = f64::INFINITY;
        for eps in [0.25, 0.125, 1.0 / 16.0, 1.0 / 32.0] {
            let domain = triangle_domain(2.0, eps);
            let residual = weak_l1_residual(&domain, |x| x, 1.0);
            assert!(residual < last);
            last = residual;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn weak_l1_raised_cosine_residual_decays_quadratically() {
        // the profile is symmetric within its period, which cancels the
        // first-order Riemann-sum term; the residual decays like ε²
        let profile = ProfileSpec::raised_cosine();
        let target = profile.c_b();
        let mut residuals = Vec::new();
        for eps in [0.25, 0.125, 1.0 / 16.0, 1.0 / 32.0] {
            let domain = DomainSpec::new(1.0, 1.0, 1.0, eps, profile).unwrap();
            residuals.push(weak_l1_residual(&domain, |x| x * x, target));
        }
        for pair in residuals.windows(2) {
            let ratio = pair[1] / pair[0];
            assert!((ratio - 0.25).abs() < 0.05, "ratio {ratio}");
        }
    }

    #[test]
    fn sublevel_measure_flat_and_triangle() {
        let flat = DomainSpec::unperturbed(1.0, 1.0);
        assert_eq!(sublevel_measure(&flat, 1.0), 1.0);
        assert_eq!(sublevel_measure(&flat, 0.5), 0.0);

        // α = 1: slope magnitude 1, so the surface element is √2 everywhere
        let critical = triangle_domain(1.0, 0.125);
        assert_eq!(sublevel_measure(&critical, 2.0), 1.0);
        assert_eq!(sublevel_measure(&critical, 1.2), 0.0);

        // α = 1/2: measure vanishes once eps < 1/(t²−1)
        let t = 2.0;
        let threshold = 1.0 / (t * t - 1.0); // = 1/3
        for eps in [0.25, 0.125] {
            let domain = triangle_domain(0.5, eps);
            let expected = if eps < threshold { 0.0 } else { 1.0 };
            assert_eq!(sublevel_measure(&domain, t), expected, "eps = {eps}");
        }
    }

    #[test]
    fn sublevel_measure_raised_cosine_degenerates() {
        use crate::geometry::ProfileKind;
        let profile = ProfileSpec::new(ProfileKind::RaisedCosine, 0.5).unwrap();
        let mut last = 1.0;
        for eps in [0.25, 0.125, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] {
            let domain = DomainSpec::new(1.0, 1.0, 0.5, eps, profile).unwrap();
            let measure = sublevel_measure(&domain, 3.0);
            assert!(measure <= last);
            last = measure;
        }
        assert!(last < 0.2, "measure did not shrink: {last}");
    }

    #[test]
    fn h1_error_small_for_matching_functions_and_sign_blind() {
        let flat = Arc::new(
            Mesh::build_strip(&DomainSpec::unperturbed(1.0, 1.0), &MeshResolution::new(32, 32))
                .unwrap(),
        );
        let domain = triangle_domain(2.0, 0.125);
        let eps_mesh = Arc::new(
            Mesh::build_strip(&domain, &MeshResolution::per_period(&domain, 8, 32).unwrap())
                .unwrap(),
        );
        let f = |p: [f64; 2]| (std::f64::consts::PI * p[0]).sin() * (p[1] + 1.0);
        let u = FeFunction::interpolate(Arc::clone(&flat), f);
        let u_eps = FeFunction::interpolate(Arc::clone(&eps_mesh), f);
        let error = h1_intersection_error(&u_eps, &u).unwrap();
        assert!(error < 0.1, "error {error}");

        let flipped = FeFunction::interpolate(Arc::clone(&eps_mesh), |p| -f(p));
        let error_flipped = h1_intersection_error(&flipped, &u).unwrap();
        assert!((error - error_flipped).abs() < 1e-12);
    }

    #[test]
    fn limit_descriptor_by_regime() {
        let mu0 = 3.0;
        let stable = LimitDescriptor::new(&triangle_domain(2.0, 0.125));
        assert_eq!(stable.regime, Regime::Stability);
        assert_eq!(stable.predicted_limit(mu0), mu0);

        let critical = LimitDescriptor::new(&triangle_domain(1.0, 0.125));
        assert_eq!(critical.regime, Regime::Critical);
        assert!((critical.predicted_limit(mu0) - mu0 / SQRT2).abs() < 1e-13);
        assert!((critical.gamma(BoundaryTag::Gamma) - SQRT2).abs() < 1e-13);
        assert_eq!(critical.gamma(BoundaryTag::Sigma), 1.0);
        assert!(critical.c_b >= 1.0);

        let degenerate = LimitDescriptor::new(&triangle_domain(0.5, 0.125));
        assert_eq!(degenerate.regime, Regime::Degeneration);
        assert_eq!(degenerate.predicted_limit(mu0), 0.0);
        assert!(!degenerate.ratio_defined());
    }
}
