use std::sync::Arc;
use steklov::*;
use steklov::problem::{solve_steklov, SteklovMode};
use steklov::perturb::h1_intersection_error;

fn main() {
    let flat = Arc::new(Mesh::build_strip(&DomainSpec::unperturbed(1.0,1.0), &MeshResolution::new(256, 64)).unwrap());
    let u0 = solve_steklov(&flat, SteklovMode::Mixed, 1).unwrap();
    let mut last = f64::INFINITY;
    for eps in [0.25, 0.125, 1.0/16.0, 1.0/32.0] {
        let domain = DomainSpec::new(1.0, 1.0, 2.0, eps, ProfileSpec::triangle()).unwrap();
        let res = MeshResolution::per_period(&domain, 8, 64).unwrap();
        let mesh = Arc::new(Mesh::build_strip(&domain, &res).unwrap());
        let spec = solve_steklov(&mesh, SteklovMode::Mixed, 1).unwrap();
        let err = h1_intersection_error(&spec.eigenfunctions[0], &u0.eigenfunctions[0]).unwrap();
        println!("eps={eps:.5} h1_err={err:.6e} decreasing={}", err < last);
        last = err;
    }
}
