//! Single-qutrit states: coordinates, kets, Bloch vectors and densities.
//!
//! A density operator is `ρ = (1/3)(1 + c·λ)`. Pure states have `c = √3 n`
//! with `n·n = 1` and `n ⋆ n = n`, so `P_n = (1/3)(1 + √3 n·λ)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::su3::{self, Vec8};

/// Default tolerance for purity decisions.
pub const PURITY_TOL: f64 = 1e-10;
/// Tolerance on ket normalization.
pub const NORM_TOL: f64 = 1e-12;

pub type Ket3 = [Complex64; 3];

/// Coordinates `(θ, φ, χ1, χ2)` of a pure state
/// `e^{iχ1} sinθ cosφ |1⟩ + e^{iχ2} sinθ sinφ |2⟩ + cosθ |3⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureStateParams {
    pub theta: f64,
    pub phi: f64,
    pub chi1: f64,
    pub chi2: f64,
}

impl PureStateParams {
    pub fn new(theta: f64, phi: f64, chi1: f64, chi2: f64) -> Result<Self> {
        let p = Self {
            theta,
            phi,
            chi1,
            chi2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let in_range = |x: f64, hi: f64| (0.0..=hi).contains(&x);
        if !in_range(self.theta, FRAC_PI_2) || !in_range(self.phi, FRAC_PI_2) {
            return Err(Error::Range(format!(
                "theta, phi must lie in [0, pi/2], got ({}, {})",
                self.theta, self.phi
            )));
        }
        if !in_range(self.chi1, 2.0 * PI) || !in_range(self.chi2, 2.0 * PI) {
            return Err(Error::Range(format!(
                "chi1, chi2 must lie in [0, 2pi], got ({}, {})",
                self.chi1, self.chi2
            )));
        }
        Ok(())
    }

    /// Fixes the coordinates that the state does not depend on: at θ = 0 all
    /// of φ, χ1, χ2 are zeroed, at sinθ·sinφ = 0 χ2 is zeroed, at sinθ·cosφ = 0
    /// χ1 is zeroed. Used to compare parameter tuples in tests.
    pub fn canonicalize(&self) -> Self {
        let mut p = *self;
        if p.theta == 0.0 {
            return Self {
                theta: 0.0,
                phi: 0.0,
                chi1: 0.0,
                chi2: 0.0,
            };
        }
        if p.phi == 0.0 {
            p.chi2 = 0.0;
        }
        if p.phi == FRAC_PI_2 {
            p.chi1 = 0.0;
        }
        if p.chi1 == 2.0 * PI {
            p.chi1 = 0.0;
        }
        if p.chi2 == 2.0 * PI {
            p.chi2 = 0.0;
        }
        p
    }
}

pub fn params_to_ket(p: &PureStateParams) -> Result<Ket3> {
    p.validate()?;
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    Ok([
        Complex64::from_polar(st * cp, p.chi1),
        Complex64::from_polar(st * sp, p.chi2),
        Complex64::new(ct, 0.0),
    ])
}

/// A real 8-vector interpreted in the λ basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub Vec8);

impl BlochVector {
    pub fn components(&self) -> &Vec8 {
        &self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        su3::dot(&self.0, &other.0)
    }

    pub fn star(&self, other: &Self) -> Self {
        Self(su3::star(&self.0, &other.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.map(|x| x * s))
    }

    /// The basis state |a⟩, a ∈ {1, 2, 3}.
    pub fn basis_state(a: usize) -> Self {
        let h = 3f64.sqrt() / 2.0;
        let mut v = [0.0; 8];
        match a {
            1 => {
                v[2] = h;
                v[7] = 0.5;
            }
            2 => {
                v[2] = -h;
                v[7] = 0.5;
            }
            3 => v[7] = -1.0,
            _ => panic!("basis label must be 1, 2 or 3, got {a}"),
        }
        Self(v)
    }

    /// `P_n = (1/3)(1 + √3 n·λ)`, without any positivity check.
    pub fn projector(&self) -> ComplexMatrix {
        operator_from_bloch(&self.0.map(|x| x * 3f64.sqrt()))
    }
}

/// `n_j = (√3/2) ⟨ψ|λj|ψ⟩`.
pub fn ket_to_bloch(ket: &Ket3) -> Result<BlochVector> {
    let nrm = linalg::norm_sqr(ket);
    if (nrm - 1.0).abs() > NORM_TOL {
        return Err(Error::Norm((nrm - 1.0).abs()));
    }
    let b = su3::basis();
    let mut n = [0.0; 8];
    for (j, nj) in n.iter_mut().enumerate() {
        let v = b.lambda(j + 1).apply(ket).expect("3-vector");
        *nj = 3f64.sqrt() / 2.0 * linalg::inner(ket, &v).re;
    }
    Ok(BlochVector(n))
}

/// Closed-form Bloch vector of the parametrized ket; an independent route to
/// [`ket_to_bloch`]`(params_to_ket(p))`.
pub fn params_to_bloch(p: &PureStateParams) -> Result<BlochVector> {
    p.validate()?;
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    let dchi = p.chi2 - p.chi1;
    let s2 = st * st;
    let r3 = 3f64.sqrt();
    let n = [
        s2 * sp * cp * dchi.cos(),
        s2 * sp * cp * dchi.sin(),
        0.5 * s2 * (cp * cp - sp * sp),
        st * ct * cp * p.chi1.cos(),
        -st * ct * cp * p.chi1.sin(),
        st * ct * sp * p.chi2.cos(),
        -st * ct * sp * p.chi2.sin(),
        (1.0 - 3.0 * ct * ct) / (2.0 * r3),
    ];
    Ok(BlochVector(n.map(|x| r3 * x)))
}

/// `(1/3)(1 + c·λ)` with no positivity check.
pub fn operator_from_bloch(c: &Vec8) -> ComplexMatrix {
    let lam = su3::basis().dot_lambda(c);
    (&ComplexMatrix::identity(3) + &lam).scale(1.0 / 3.0)
}

/// A validated single-qutrit density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct QutritDensity {
    rho: ComplexMatrix,
}

impl QutritDensity {
    /// Checks dimension 3, Hermiticity, unit trace (1e-12) and positivity.
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if rho.dim() != 3 {
            return Err(Error::Shape(format!("qutrit density must be 3x3, got {}", rho.dim())));
        }
        let tr = rho.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::NotAState { min_eig: f64::NAN });
        }
        let min_eig = linalg::min_eigenvalue(&rho)?;
        if min_eig < -linalg::default_psd_tol(&rho) {
            return Err(Error::NotAState { min_eig });
        }
        Ok(Self { rho })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }
}

pub fn bloch_to_density(c: &Vec8) -> Result<QutritDensity> {
    QutritDensity::new(operator_from_bloch(c))
}

/// `c_α = (3/2) tr(ρ λα)` for α ∈ 0..=8.
pub fn density_to_bloch(rho: &QutritDensity) -> [f64; 9] {
    let b = su3::basis();
    let mut c = [0.0; 9];
    for (alpha, ca) in c.iter_mut().enumerate() {
        *ca = 1.5 * rho.rho.trace_product(b.lambda(alpha)).expect("3x3").re;
    }
    c
}

pub fn is_pure(n: &BlochVector, tol: f64) -> bool {
    if (n.dot(n) - 1.0).abs() > tol {
        return false;
    }
    let s = n.star(n);
    let resid: f64 = s
        .0
        .iter()
        .zip(&n.0)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    resid <= tol
}

/// `|⟨ψ|ψ′⟩|² = (1 + 2 n·m) / 3` for pure states.
pub fn overlap(n: &BlochVector, m: &BlochVector) -> f64 {
    (1.0 + 2.0 * n.dot(m)) / 3.0
}
