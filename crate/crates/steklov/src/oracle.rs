//! Closed-form reference spectra: the mixed Dirichlet-Steklov strip by
//! separation of variables, and the classical Steklov disk.

/// `k`-th eigenvalue (k ≥ 1) of the mixed problem on `(0,w) × (−d,0)`:
/// Steklov condition on the top, Dirichlet on the sides and bottom.
///
/// Separation of variables gives `λ_k = (kπ/w)·coth(kπd/w)` with
/// eigenfunction `sin(kπx₁/w)·sinh(kπ(x₂+d)/w)`.
pub fn strip_mixed_eigenvalue(k: usize, width: f64, depth: f64) -> f64 {
    assert!(k >= 1, "mode index must be at least 1");
    let wavenumber = k as f64 * std::f64::consts::PI / width;
    wavenumber * coth(wavenumber * depth)
}

/// Eigenfunction of [`strip_mixed_eigenvalue`], unnormalized.
pub fn strip_mixed_eigenfunction(k: usize, width: f64, depth: f64, p: [f64; 2]) -> f64 {
    let wavenumber = k as f64 * std::f64::consts::PI / width;
    (wavenumber * p[0]).sin() * (wavenumber * (p[1] + depth)).sinh()
}

/// `n`-th eigenvalue of the full Steklov problem on the unit disk:
/// the sequence `0, 1, 1, 2, 2, 3, 3, …` with eigenfunctions
/// `r^k cos kθ`, `r^k sin kθ`.
pub fn disk_eigenvalue(n: usize) -> f64 {
    n.div_ceil(2) as f64
}

/// Overflow-safe hyperbolic cotangent: `coth x = 1 + 2/(e^{2x} − 1)`.
fn coth(x: f64) -> f64 {
    1.0 + 2.0 / (2.0 * x).exp_m1()
}
