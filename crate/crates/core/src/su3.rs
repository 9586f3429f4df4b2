//! Gell-Mann operator basis for a qutrit and the SU(3) structure constants.
//!
//! `λ0 = √(2/3)·1` completes the eight generators to an orthogonal Hermitian
//! basis with `tr(λα λβ) = 2δαβ`. The generators multiply as
//!
//! ```text
//! λj λk = (2/3) δjk 1 + Σ_l (d_jkl + i f_jkl) λl
//! ```
//!
//! Indexing: `lambda(α)` takes α ∈ 0..=8. Structure-constant accessors take
//! generator labels j, k, l ∈ 1..=8. Real 8-vectors (`[f64; 8]`) store the
//! component along e_j at array index j − 1.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::linalg::{matmul, ComplexMatrix};

/// A real vector in the eight-dimensional Bloch space.
pub type Vec8 = [f64; 8];

#[derive(Debug, Clone)]
pub struct GellMannBasis {
    lambda: [ComplexMatrix; 9],
}

impl GellMannBasis {
    pub fn build() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let m = |rows: [[Complex64; 3]; 3]| {
            ComplexMatrix::from_fn(3, |r, c| rows[r][c])
        };
        let s3 = 1.0 / 3f64.sqrt();
        let lambda = [
            ComplexMatrix::identity(3).scale((2.0f64 / 3.0).sqrt()),
            m([[z, o, z], [o, z, z], [z, z, z]]),
            m([[z, -i, z], [i, z, z], [z, z, z]]),
            m([[o, z, z], [z, -o, z], [z, z, z]]),
            m([[z, z, o], [z, z, z], [o, z, z]]),
            m([[z, z, -i], [z, z, z], [i, z, z]]),
            m([[z, z, z], [z, z, o], [z, o, z]]),
            m([[z, z, z], [z, z, -i], [z, i, z]]),
            ComplexMatrix::from_real_diag(&[s3, s3, -2.0 * s3]),
        ];
        Self { lambda }
    }

    /// Builds a basis from arbitrary matrices. Only meant for fault-injection
    /// checks of the verification routines.
    pub fn from_matrices(lambda: [ComplexMatrix; 9]) -> Self {
        Self { lambda }
    }

    /// λα for α ∈ 0..=8.
    pub fn lambda(&self, alpha: usize) -> &ComplexMatrix {
        &self.lambda[alpha]
    }

    pub fn all(&self) -> &[ComplexMatrix; 9] {
        &self.lambda
    }

    /// Σ_j v_j λ_j over the eight generators.
    pub fn dot_lambda(&self, v: &Vec8) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(3);
        for (j, &vj) in v.iter().enumerate() {
            if vj != 0.0 {
                acc = &acc + &self.lambda[j + 1].scale(vj);
            }
        }
        acc
    }

    /// Σ_α c_α λ_α over the nine basis operators.
    pub fn expand(&self, c: &[f64; 9]) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(3);
        for (alpha, &ca) in c.iter().enumerate() {
            if ca != 0.0 {
                acc = &acc + &self.lambda[alpha].scale(ca);
            }
        }
        acc
    }
}

/// The tensors `f_jkl` (totally antisymmetric) and `d_jkl` (totally symmetric).
#[derive(Debug, Clone)]
pub struct StructureConstants {
    f: [[[f64; 8]; 8]; 8],
    d: [[[f64; 8]; 8]; 8],
}

impl StructureConstants {
    /// `f_jkl = tr([λj, λk] λl) / 4i`, `d_jkl = tr({λj, λk} λl) / 4`.
    pub fn compute(basis: &GellMannBasis) -> Self {
        let mut f = [[[0.0; 8]; 8]; 8];
        let mut d = [[[0.0; 8]; 8]; 8];
        for j in 0..8 {
            for k in 0..8 {
                let jk = matmul(basis.lambda(j + 1), basis.lambda(k + 1)).expect("3x3");
                let kj = matmul(basis.lambda(k + 1), basis.lambda(j + 1)).expect("3x3");
                let comm = &jk - &kj;
                let anti = &jk + &kj;
                for l in 0..8 {
                    let lam = basis.lambda(l + 1);
                    let tc = comm.trace_product(lam).expect("3x3");
                    let ta = anti.trace_product(lam).expect("3x3");
                    // tc / 4i = tc.im / 4 - i tc.re / 4; the real part is the constant.
                    f[j][k][l] = tc.im / 4.0;
                    d[j][k][l] = ta.re / 4.0;
                }
            }
        }
        Self { f, d }
    }

    /// `f_jkl` for generator labels in 1..=8.
    pub fn f(&self, j: usize, k: usize, l: usize) -> f64 {
        self.f[j - 1][k - 1][l - 1]
    }

    /// `d_jkl` for generator labels in 1..=8.
    pub fn d(&self, j: usize, k: usize, l: usize) -> f64 {
        self.d[j - 1][k - 1][l - 1]
    }

    /// `(a ⋆ b)_j = √3 Σ_kl d_jkl a_k b_l`.
    ///
    /// The √3 makes the pure-state conditions read `n·n = 1`, `n ⋆ n = n`.
    pub fn star(&self, a: &Vec8, b: &Vec8) -> Vec8 {
        let s3 = 3f64.sqrt();
        let mut out = [0.0; 8];
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..8 {
                if a[k] == 0.0 {
                    continue;
                }
                for l in 0..8 {
                    acc += self.d[j][k][l] * a[k] * b[l];
                }
            }
            *o = s3 * acc;
        }
        out
    }
}

static BASIS: OnceLock<GellMannBasis> = OnceLock::new();
static CONSTANTS: OnceLock<StructureConstants> = OnceLock::new();

/// Process-wide Gell-Mann basis.
pub fn basis() -> &'static GellMannBasis {
    BASIS.get_or_init(GellMannBasis::build)
}

/// Process-wide structure constants, computed from [`basis`] on first use.
pub fn structure_constants() -> &'static StructureConstants {
    CONSTANTS.get_or_init(|| StructureConstants::compute(basis()))
}

pub fn star(a: &Vec8, b: &Vec8) -> Vec8 {
    structure_constants().star(a, b)
}

pub fn dot(a: &Vec8, b: &Vec8) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unit vector e_j for j ∈ 1..=8.
pub fn unit(j: usize) -> Vec8 {
    let mut v = [0.0; 8];
    v[j - 1] = 1.0;
    v
}
