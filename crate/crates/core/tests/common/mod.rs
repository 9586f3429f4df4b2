#![allow(dead_code)]

use num_complex::Complex64;
use qutritlab::linalg::ComplexMatrix;
use rand::Rng;
use std::f64::consts::PI;

pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    (-2.0 * (1.0 - u).ln()).sqrt() * (2.0 * PI * v).cos()
}

/// Haar-random unit ket.
pub fn random_ket<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Ginibre-distributed density matrix `G G† / tr(G G†)`.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    let gg = qutritlab::linalg::matmul(&g, &g.adjoint()).unwrap();
    let tr = gg.trace().re;
    // Symmetrize away rounding so the result is exactly Hermitian.
    let h = ComplexMatrix::from_fn(dim, |i, j| 0.5 * (gg[(i, j)] + gg[(j, i)].conj()));
    h.scale(1.0 / tr)
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    ComplexMatrix::from_fn(dim, |i, j| 0.5 * (g[(i, j)] + g[(j, i)].conj()))
}

pub fn random_unit8<R: Rng>(rng: &mut R) -> [f64; 8] {
    let mut v = [0.0; 8];
    for x in v.iter_mut() {
        *x = gaussian(rng);
    }
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| x / n)
}
