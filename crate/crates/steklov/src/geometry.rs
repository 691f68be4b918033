//! Periodic boundary profiles and the perturbed strip family.
//!
//! The reference domain is the strip `Ω = (0,w) × (−d,0)`. Its perturbation
//! `Ω_ε` replaces the flat top by the graph of `g_ε(x₁) = ε^α · b(x₁/ε)`,
//! where `b ≥ 0` is a Lipschitz profile that is periodic over the unit cell
//! `Y = (−1/2, 1/2)`. Everything in this module is exact, closed-form
//! geometry; no mesh is involved.

use thiserror::Error;

/// Unit cell of the periodic profile.
pub const UNIT_CELL: (f64, f64) = (-0.5, 0.5);

/// Panels per smooth piece used by the composite 5-point Gauss rule.
///
/// Exact (up to rounding) for piecewise-constant slopes; for the raised
/// cosine the rule converges far below 1e-12 at this panel count.
const GAUSS_PANELS: usize = 64;

/// Abscissae/weights of the 5-point Gauss-Legendre rule on [-1, 1].
const GAUSS5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("x1 = {x1} lies outside the strip width [0, {width}]")]
    OutOfWidth { x1: f64, width: f64 },
    #[error("invalid domain parameter: {0}")]
    InvalidParameter(String),
}

/// Built-in profile shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// Distance to the nearest integer, scaled: `b(t) = A·dist(t, ℤ)`.
    /// Slope is `±A` a.e.; kinks at integers and half-integers.
    TriangleWave,
    /// `b(t) = A·(1 − cos 2πt)/2`, a smooth bump with `b(0) = 0`.
    RaisedCosine,
    /// `b ≡ 0`, the unperturbed boundary.
    Zero,
}

/// A nonnegative Y-periodic Lipschitz profile `b` with its a.e. slope.
///
/// Kink convention for the triangle wave: the one-sided left derivative is
/// returned, except at the cell-edge zeros (integer `t`) where the right
/// slope `+A` is used; `|b'|` is the same on both sides there, so no
/// integral ever sees the difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    pub amplitude: f64,
}

impl ProfileSpec {
    pub fn new(kind: ProfileKind, amplitude: f64) -> Result<Self, GeometryError> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(GeometryError::InvalidParameter(format!(
                "profile amplitude must be finite and nonnegative, got {amplitude}"
            )));
        }
        Ok(Self { kind, amplitude })
    }

    /// Triangle wave with unit amplitude (`max b = 1/2`).
    pub fn triangle() -> Self {
        Self { kind: ProfileKind::TriangleWave, amplitude: 1.0 }
    }

    /// Raised cosine with unit amplitude (`max b = 1`).
    pub fn raised_cosine() -> Self {
        Self { kind: ProfileKind::RaisedCosine, amplitude: 1.0 }
    }

    /// The flat profile `b ≡ 0`.
    pub fn zero() -> Self {
        Self { kind: ProfileKind::Zero, amplitude: 0.0 }
    }

    /// Evaluates `(b(t), b'(t))`; `t` may be any real, evaluation wraps by
    /// periodicity.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let a = self.amplitude;
        match self.kind {
            ProfileKind::Zero => (0.0, 0.0),
            ProfileKind::TriangleWave => {
                let u = t - t.floor();
                if u <= 0.5 {
                    (a * u, a)
                } else {
                    (a * (1.0 - u), -a)
                }
            }
            ProfileKind::RaisedCosine => {
                let u = t - t.floor();
                let angle = 2.0 * std::f64::consts::PI * u;
                (
                    a * 0.5 * (1.0 - angle.cos()),
                    a * std::f64::consts::PI * angle.sin(),
                )
            }
        }
    }

    /// `max_t b(t)`.
    pub fn max_value(&self) -> f64 {
        match self.kind {
            ProfileKind::Zero => 0.0,
            ProfileKind::TriangleWave => 0.5 * self.amplitude,
            ProfileKind::RaisedCosine => self.amplitude,
        }
    }

    /// Cell average `∫_Y b`.
    pub fn mean_value(&self) -> f64 {
        match self.kind {
            ProfileKind::Zero => 0.0,
            ProfileKind::TriangleWave => 0.25 * self.amplitude,
            ProfileKind::RaisedCosine => 0.5 * self.amplitude,
        }
    }

    /// Lipschitz constant of `b`.
    pub fn lipschitz_constant(&self) -> f64 {
        match self.kind {
            ProfileKind::Zero => 0.0,
            ProfileKind::TriangleWave => self.amplitude,
            ProfileKind::RaisedCosine => std::f64::consts::PI * self.amplitude,
        }
    }

    /// Break points of the slope within one period `[0, 1]`, in cell-relative
    /// coordinates, including both endpoints. Integrals split here so that
    /// the composite Gauss rule only ever sees smooth integrands.
    pub fn smooth_breakpoints(&self) -> Vec<f64> {
        match self.kind {
            ProfileKind::TriangleWave => vec![0.0, 0.5, 1.0],
            ProfileKind::RaisedCosine | ProfileKind::Zero => vec![0.0, 1.0],
        }
    }

    /// The homogenized boundary weight `C_b = ∫_Y √(1 + b'(y)²) dy`.
    ///
    /// Always ≥ 1, with equality exactly when the slope vanishes identically.
    pub fn c_b(&self) -> f64 {
        cell_quadrature(self, |_, slope| (1.0 + slope * slope).sqrt())
    }
}

/// Composite Gauss integration of `f(b(y), b'(y))` over the unit cell.
fn cell_quadrature(profile: &ProfileSpec, f: impl Fn(f64, f64) -> f64) -> f64 {
    let breaks = profile.smooth_breakpoints();
    let mut total = 0.0;
    for pair in breaks.windows(2) {
        total += composite_gauss(pair[0], pair[1], GAUSS_PANELS, |y| {
            let (value, slope) = profile.eval(y);
            f(value, slope)
        });
    }
    total
}

/// Composite 5-point Gauss-Legendre rule on `[a, b]` with `panels` panels.
pub fn composite_gauss(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let left = a + p as f64 * width;
        let mid = left + 0.5 * width;
        let half = 0.5 * width;
        let mut panel = 0.0;
        for (node, weight) in GAUSS5 {
            panel += weight * f(mid + half * node);
        }
        total += half * panel;
    }
    total
}

/// The perturbed strip `Ω_ε = {(x₁,x₂) : 0 < x₁ < w, −d < x₂ < g_ε(x₁)}`.
///
/// `eps = 0` denotes the unperturbed strip `Ω` with `g_0 ≡ 0`.
#[derive(Debug, Clone, Copy)]
pub struct DomainSpec {
    pub width: f64,
    pub depth: f64,
    pub alpha: f64,
    pub eps: f64,
    pub profile: ProfileSpec,
}

impl DomainSpec {
    /// Builds a domain, checking that the oscillation stays well clear of
    /// the bottom: `sup g_ε = ε^α · max b < d/2`.
    pub fn new(
        width: f64,
        depth: f64,
        alpha: f64,
        eps: f64,
        profile: ProfileSpec,
    ) -> Result<Self, GeometryError> {
        if !(width > 0.0) {
            return Err(GeometryError::InvalidParameter(format!("width must be positive, got {width}")));
        }
        if !(depth > 0.0) {
            return Err(GeometryError::InvalidParameter(format!("depth must be positive, got {depth}")));
        }
        if !(alpha > 0.0) {
            return Err(GeometryError::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        if !(eps >= 0.0) {
            return Err(GeometryError::InvalidParameter(format!("eps must be nonnegative, got {eps}")));
        }
        let spec = Self { width, depth, alpha, eps, profile };
        if spec.sup_g() >= 0.5 * depth {
            return Err(GeometryError::InvalidParameter(format!(
                "sup g_eps = {} must stay below depth/2 = {}",
                spec.sup_g(),
                0.5 * depth
            )));
        }
        Ok(spec)
    }

    /// The unperturbed strip `(0,w) × (−d,0)`.
    pub fn unperturbed(width: f64, depth: f64) -> Self {
        Self { width, depth, alpha: 1.0, eps: 0.0, profile: ProfileSpec::zero() }
    }

    /// `sup g_ε = ε^α · max b`; zero for the unperturbed strip.
    pub fn sup_g(&self) -> f64 {
        if self.eps == 0.0 {
            0.0
        } else {
            self.eps.powf(self.alpha) * self.profile.max_value()
        }
    }

    /// Evaluates `(g_ε(x₁), g_ε'(x₁))`. Fails outside `[0, w]`.
    pub fn g(&self, x1: f64) -> Result<(f64, f64), GeometryError> {
        if !(0.0..=self.width).contains(&x1) {
            return Err(GeometryError::OutOfWidth { x1, width: self.width });
        }
        Ok(self.g_unchecked(x1))
    }

    /// Same as [`DomainSpec::g`] without the width check; used by meshing
    /// and quadrature loops that supply in-range abscissae by construction.
    pub fn g_unchecked(&self, x1: f64) -> (f64, f64) {
        if self.eps == 0.0 {
            return (0.0, 0.0);
        }
        let (value, slope) = self.profile.eval(x1 / self.eps);
        (
            self.eps.powf(self.alpha) * value,
            self.eps.powf(self.alpha - 1.0) * slope,
        )
    }

    /// Number of whole profile periods across the width, when `w/ε` is an
    /// integer (to a 1e-9 relative tolerance); `None` otherwise or at ε = 0.
    pub fn periods(&self) -> Option<u64> {
        if self.eps <= 0.0 {
            return None;
        }
        let ratio = self.width / self.eps;
        let rounded = ratio.round();
        if rounded >= 1.0 && (ratio - rounded).abs() <= 1e-9 * rounded {
            Some(rounded as u64)
        } else {
            None
        }
    }

    /// Segments `[a, b] ⊂ [0, w]` on which `g_ε` is smooth.
    pub fn top_smooth_segments(&self) -> Vec<(f64, f64)> {
        if self.eps == 0.0 {
            return vec![(0.0, self.width)];
        }
        let breaks = self.profile.smooth_breakpoints();
        let mut cuts = vec![0.0];
        let mut k = 0.0;
        'outer: loop {
            for &b in &breaks[1..] {
                let x = self.eps * (k + b);
                if x >= self.width - 1e-14 * self.width {
                    break 'outer;
                }
                if x > *cuts.last().unwrap() {
                    cuts.push(x);
                }
            }
            k += 1.0;
        }
        cuts.push(self.width);
        cuts.windows(2).map(|p| (p[0], p[1])).collect()
    }

    /// Integrates `f(x₁, g_ε(x₁), g_ε'(x₁))` over `[0, w]` with panels that
    /// never straddle a slope kink.
    pub fn integrate_top(&self, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        for (a, b) in self.top_smooth_segments() {
            // match the panel density of the unit-cell quadrature so the
            // two routes agree to rounding on smooth profiles
            let panels = if self.eps == 0.0 { GAUSS_PANELS } else { 32 };
            total += composite_gauss(a, b, panels, |x| {
                let (value, slope) = self.g_unchecked(x);
                f(x, value, slope)
            });
        }
        total
    }

    /// Exact perimeter of `Ω_ε`: bottom + two sides + arclength of the top
    /// graph. The result is flagged when `w/ε` is not an integer, in which
    /// case the side heights `g_ε(0)` and `g_ε(w)` differ and the closed
    /// polygon is only an approximation.
    pub fn exact_perimeter(&self) -> PerimeterResult {
        let g0 = self.g_unchecked(0.0).0;
        let top = self.integrate_top(|_, _, slope| (1.0 + slope * slope).sqrt());
        let value = self.width + 2.0 * (self.depth + g0) + top;
        PerimeterResult { value, whole_periods: self.eps == 0.0 || self.periods().is_some() }
    }
}

/// Perimeter with a flag recording whether the side heights matched.
#[derive(Debug, Clone, Copy)]
pub struct PerimeterResult {
    pub value: f64,
    pub whole_periods: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn triangle_domain(alpha: f64, eps: f64) -> DomainSpec {
        DomainSpec::new(1.0, 1.0, alpha, eps, ProfileSpec::triangle()).unwrap()
    }

    #[test]
    fn triangle_eval_matches_hand_values() {
        let b = ProfileSpec::triangle();
        assert_eq!(b.eval(0.25), (0.25, 1.0));
        assert_eq!(b.eval(0.0), (0.0, 1.0));
        let (v, s) = b.eval(-0.3);
        assert!((v - 0.3).abs() < 1e-15);
        assert_eq!(s, -1.0);
        // peak keeps the left slope
        assert_eq!(b.eval(0.5), (0.5, 1.0));
    }

    #[test]
    fn raised_cosine_basics() {
        let b = ProfileSpec::raised_cosine();
        let (v0, s0) = b.eval(0.0);
        assert_eq!(v0, 0.0);
        assert_eq!(s0, 0.0);
        let (vmax, _) = b.eval(0.5);
        assert!((vmax - 1.0).abs() < 1e-15);
        // nonnegative over a sweep
        for i in 0..=1000 {
            let (v, _) = b.eval(i as f64 / 1000.0);
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn g_eps_hand_values() {
        let d = triangle_domain(1.0, 0.25);
        let (v, s) = d.g(1.0 / 16.0).unwrap();
        assert!((v - 0.0625).abs() < 1e-15);
        assert_eq!(s, 1.0);

        let d = triangle_domain(2.0, 0.125);
        for x in [0.01, 0.3, 0.77] {
            let (v, s) = d.g(x).unwrap();
            assert!(v <= 1.0 / 128.0 + 1e-15);
            assert!((s.abs() - 0.125).abs() < 1e-15);
        }

        let flat = DomainSpec::unperturbed(1.0, 1.0);
        assert_eq!(flat.g(0.5).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn g_eps_rejects_out_of_width() {
        let d = triangle_domain(1.0, 0.25);
        assert!(matches!(d.g(-0.1), Err(GeometryError::OutOfWidth { .. })));
        assert!(matches!(d.g(1.1), Err(GeometryError::OutOfWidth { .. })));
    }

    #[test]
    fn c_b_triangle_is_sqrt2() {
        let b = ProfileSpec::triangle();
        assert!((b.c_b() - SQRT2).abs() < 1e-14);
    }

    #[test]
    fn c_b_zero_profile_is_one() {
        assert!((ProfileSpec::zero().c_b() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn c_b_raised_cosine_matches_independent_quadrature() {
        // Independent oracle: 10^4-panel midpoint-refined Simpson rule over
        // the unit cell of sqrt(1 + b'(y)^2).
        let b = ProfileSpec::raised_cosine();
        let n = 10_000usize;
        let h = 1.0 / n as f64;
        let f = |y: f64| {
            let (_, slope) = b.eval(y);
            (1.0 + slope * slope).sqrt()
        };
        let mut oracle = 0.0;
        for i in 0..n {
            let a = -0.5 + i as f64 * h;
            oracle += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
        }
        assert!(
            (b.c_b() - oracle).abs() < 1e-10,
            "c_b = {}, oracle = {}",
            b.c_b(),
            oracle
        );
    }

    #[test]
    fn perimeter_unperturbed_unit_square_shell() {
        let d = DomainSpec::unperturbed(1.0, 1.0);
        let p = d.exact_perimeter();
        assert!(p.whole_periods);
        assert!((p.value - 4.0).abs() < 1e-13);
    }

    #[test]
    fn perimeter_alpha1_triangle_is_3_plus_sqrt2() {
        for eps in [0.25, 0.125, 1.0 / 16.0, 1.0 / 32.0] {
            let d = triangle_domain(1.0, eps);
            let p = d.exact_perimeter();
            assert!(p.whole_periods);
            assert!(
                (p.value - (3.0 + SQRT2)).abs() < 1e-12,
                "eps = {eps}: perimeter = {}",
                p.value
            );
        }
    }

    #[test]
    fn perimeter_alpha2_constant_slope_formula() {
        let d = triangle_domain(2.0, 0.125);
        let expected = 3.0 + (1.0 + 1.0 / 64.0f64).sqrt();
        assert!((d.exact_perimeter().value - expected).abs() < 1e-12);
    }

    #[test]
    fn perimeter_gap_shrinks_for_alpha_above_one() {
        let flat = DomainSpec::unperturbed(1.0, 1.0).exact_perimeter().value;
        let mut last = f64::INFINITY;
        for eps in [0.25, 0.125, 1.0 / 16.0, 1.0 / 32.0] {
            let gap = (triangle_domain(2.0, eps).exact_perimeter().value - flat).abs();
            assert!(gap < last, "gap did not decrease at eps = {eps}");
            last = gap;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn perimeter_flags_partial_periods() {
        let d = DomainSpec::new(1.0, 1.0, 1.0, 0.3, ProfileSpec::triangle()).unwrap();
        assert!(!d.exact_perimeter().whole_periods);
    }

    #[test]
    fn smooth_segments_cover_width() {
        let d = triangle_domain(1.0, 0.25);
        let segs = d.top_smooth_segments();
        assert_eq!(segs.len(), 8); // two kinks per period, four periods
        assert_eq!(segs[0].0, 0.0);
        assert_eq!(segs.last().unwrap().1, 1.0);
        for pair in segs.windows(2) {
            assert_eq!(pair[0].1, pair[1].0);
        }
    }

    proptest! {
        #[test]
        fn profile_periodicity_is_bitwise(i in -8192i64..8192) {
            // dyadic abscissae keep t + 1 exactly representable
            let t = i as f64 / 1024.0;
            for profile in [ProfileSpec::triangle(), ProfileSpec::raised_cosine(), ProfileSpec::zero()] {
                let a = profile.eval(t);
                let b = profile.eval(t + 1.0);
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn c_b_at_least_one(amplitude in 0.0f64..4.0) {
            for kind in [ProfileKind::TriangleWave, ProfileKind::RaisedCosine, ProfileKind::Zero] {
                let p = ProfileSpec::new(kind, amplitude).unwrap();
                let c = p.c_b();
                prop_assert!(c >= 1.0 - 1e-13);
                if kind == ProfileKind::Zero || amplitude == 0.0 {
                    prop_assert!((c - 1.0).abs() < 1e-13);
                } else {
                    prop_assert!(c > 1.0);
                }
            }
        }

        #[test]
        fn profile_is_nonnegative(t in -10.0f64..10.0) {
            for profile in [ProfileSpec::triangle(), ProfileSpec::raised_cosine()] {
                let (v, _) = profile.eval(t);
                prop_assert!(v >= 0.0);
            }
        }
    }
}
