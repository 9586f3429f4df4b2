//! The isotropic two-qutrit family `ρ_ε = (1 − ε) M₉ + ε |Ψ⟩⟨Ψ|`.
//!
//! It is separable exactly for `ε ≤ 1/4`. Necessity follows from bounding the
//! correlation coefficients `c_jj`; sufficiency from an explicit ensemble of
//! twelve product states that reproduces `ρ_{1/4}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, tensor, ComplexMatrix, SubsystemShape};
use crate::report::{DecompositionTerm, SeparabilityReport, Verdict, Witness};
use crate::su3;

/// Separability threshold of the isotropic family.
pub const ISOTROPIC_THRESHOLD: f64 = 0.25;
/// `ε` within this distance of 1/4 is reported as a boundary case.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Signs of `c_jj / (3ε/2)` for j = 1..=8.
pub const CORRELATION_SIGNS: [f64; 8] = [1.0, -1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `(|11⟩ + |22⟩ + |33⟩)/√3`.
pub fn max_entangled_ket() -> Vec<Complex64> {
    let s = 1.0 / 3f64.sqrt();
    let mut psi = vec![c(0.0, 0.0); 9];
    for a in 0..3 {
        psi[4 * a] = c(s, 0.0);
    }
    psi
}

pub fn max_entangled() -> ComplexMatrix {
    ComplexMatrix::outer(&max_entangled_ket())
}

pub fn maximally_mixed_9() -> ComplexMatrix {
    ComplexMatrix::identity(9).scale(1.0 / 9.0)
}

pub fn two_qutrit_shape() -> SubsystemShape {
    SubsystemShape::uniform(3, 2).expect("valid shape")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicState {
    epsilon: f64,
}

impl IsotropicState {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::Range(format!("epsilon must lie in [0, 1], got {epsilon}")));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

pub fn isotropic_density(s: &IsotropicState) -> ComplexMatrix {
    let e = s.epsilon;
    &maximally_mixed_9().scale(1.0 - e) + &max_entangled().scale(e)
}

/// Coefficients of `ρ = (1/9) Σ c_αβ λα ⊗ λβ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoeffs2 {
    pub c: [[f64; 9]; 9],
}

impl ExpansionCoeffs2 {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let b = su3::basis();
        let mut acc = ComplexMatrix::zeros(9);
        for (alpha, row) in self.c.iter().enumerate() {
            for (beta, &cab) in row.iter().enumerate() {
                if cab != 0.0 {
                    acc = &acc + &tensor(b.lambda(alpha), b.lambda(beta)).scale(cab / 9.0);
                }
            }
        }
        acc
    }
}

/// `c_αβ = (9/4) tr(ρ λα ⊗ λβ)`.
pub fn expansion_coeffs(rho: &ComplexMatrix) -> Result<ExpansionCoeffs2> {
    if rho.dim() != 9 {
        return Err(Error::Shape(format!("two-qutrit operator must be 9x9, got {}", rho.dim())));
    }
    let b = su3::basis();
    let mut out = [[0.0; 9]; 9];
    for (alpha, row) in out.iter_mut().enumerate() {
        for (beta, cab) in row.iter_mut().enumerate() {
            let op = tensor(b.lambda(alpha), b.lambda(beta));
            *cab = 2.25 * rho.trace_product(&op)?.re;
        }
    }
    Ok(ExpansionCoeffs2 { c: out })
}

/// `Σ_j |c_jj| / 3`. A separable state cannot exceed 1; for `ρ_ε` this is 4ε.
pub fn necessity_bound(coeffs: &ExpansionCoeffs2) -> f64 {
    (1..9).map(|j| coeffs.c[j][j].abs()).sum::<f64>() / 3.0
}

/// The four phases `z ∈ {+1, −1, +i, −i}` of the product ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    MinusOne,
    PlusI,
    MinusI,
}

impl Phase {
    pub const ALL: [Phase; 4] = [Phase::PlusOne, Phase::MinusOne, Phase::PlusI, Phase::MinusI];

    pub fn value(self) -> Complex64 {
        match self {
            Phase::PlusOne => c(1.0, 0.0),
            Phase::MinusOne => c(-1.0, 0.0),
            Phase::PlusI => c(0.0, 1.0),
            Phase::MinusI => c(0.0, -1.0),
        }
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.value() == z)
            .ok_or_else(|| Error::Member(format!("phase {z} is not one of +1, -1, +i, -i")))
    }

    pub fn label(self) -> &'static str {
        match self {
            Phase::PlusOne => "+1",
            Phase::MinusOne => "-1",
            Phase::PlusI => "+i",
            Phase::MinusI => "-i",
        }
    }
}

/// `(|a⟩ + z|b⟩)/√2 ⊗ (|a⟩ + z*|b⟩)/√2` for basis labels `1 ≤ a < b ≤ 3`.
pub fn ensemble_member_ket(a: usize, b: usize, z: Phase) -> Result<Vec<Complex64>> {
    if !(1..=3).contains(&a) || !(1..=3).contains(&b) || b <= a {
        return Err(Error::Member(format!("need 1 <= a < b <= 3, got a={a}, b={b}")));
    }
    let h = 1.0 / 2f64.sqrt();
    let zv = z.value();
    let mut left = [c(0.0, 0.0); 3];
    let mut right = [c(0.0, 0.0); 3];
    left[a - 1] = c(h, 0.0);
    left[b - 1] = zv * h;
    right[a - 1] = c(h, 0.0);
    right[b - 1] = zv.conj() * h;
    Ok(linalg::tensor_kets(&left, &right))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleMember {
    pub a: usize,
    pub b: usize,
    pub z: Phase,
    pub weight: f64,
}

impl EnsembleMember {
    pub fn ket(&self) -> Vec<Complex64> {
        ensemble_member_ket(self.a, self.b, self.z).expect("members are constructed valid")
    }

    pub fn label(&self) -> String {
        format!("Phi[a={},b={},z={}]", self.a, self.b, self.z.label())
    }
}

/// The twelve members, each with weight `weight`.
pub fn ensemble_members(weight: f64) -> Vec<EnsembleMember> {
    let mut out = Vec::with_capacity(12);
    for (a, b) in [(1, 2), (1, 3), (2, 3)] {
        for z in Phase::ALL {
            out.push(EnsembleMember { a, b, z, weight });
        }
    }
    out
}

/// `(1/12) Σ_{a<b} Σ_z |Φ_z^(a,b)⟩⟨Φ_z^(a,b)|`.
pub fn ensemble_mixture() -> ComplexMatrix {
    ensemble_members(1.0 / 12.0)
        .iter()
        .fold(ComplexMatrix::zeros(9), |acc, m| {
            &acc + &ComplexMatrix::outer(&m.ket()).scale(m.weight)
        })
}

/// Smallest eigenvalue of the partial transpose on the second qutrit.
pub fn ppt_min_eig(rho: &ComplexMatrix) -> Result<f64> {
    let pt = linalg::partial_transpose(rho, &two_qutrit_shape(), 1)?;
    linalg::min_eigenvalue(&pt)
}

/// `(1 + d1 d2 a1 a2)⁻¹`, with `a1² ≥ a2²` the two largest eigenvalues of the
/// marginal of `|ψ⟩⟨ψ|` (the squared Schmidt coefficients).
pub fn vidal_tarrach_threshold(psi: &[Complex64], d1: usize, d2: usize) -> Result<f64> {
    if d1 == 0 || d2 == 0 || psi.len() != d1 * d2 {
        return Err(Error::Shape(format!(
            "ket of length {} does not match {d1}x{d2}",
            psi.len()
        )));
    }
    let nrm = linalg::norm_sqr(psi);
    if (nrm - 1.0).abs() > 1e-12 {
        return Err(Error::Norm((nrm - 1.0).abs()));
    }
    let rho = ComplexMatrix::outer(psi);
    let shape = SubsystemShape::new(vec![d1, d2])?;
    let keep = if d1 <= d2 { 0 } else { 1 };
    let marginal = linalg::partial_trace(&rho, &shape, keep)?;
    let mut eig = linalg::hermitian_eigenvalues(&marginal)?;
    eig.reverse();
    let a1 = eig[0].max(0.0).sqrt();
    let a2 = eig.get(1).copied().unwrap_or(0.0).max(0.0).sqrt();
    Ok(1.0 / (1.0 + (d1 * d2) as f64 * a1 * a2))
}

/// Product-state decomposition of `ρ_ε` for `ε ≤ 1/4`:
/// `ρ_ε = (1 − 4ε) M₉ + 4ε ρ_{1/4}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub members: Vec<EnsembleMember>,
    /// Weight of `M₉ = (1/3)1 ⊗ (1/3)1`, itself a product state.
    pub maximally_mixed_weight: f64,
}

impl Decomposition {
    pub fn mixture(&self) -> ComplexMatrix {
        let ens = self.members.iter().fold(ComplexMatrix::zeros(9), |acc, m| {
            &acc + &ComplexMatrix::outer(&m.ket()).scale(m.weight)
        });
        &ens + &maximally_mixed_9().scale(self.maximally_mixed_weight)
    }

    pub fn terms(&self) -> Vec<DecompositionTerm> {
        let mut out: Vec<DecompositionTerm> = self
            .members
            .iter()
            .map(|m| DecompositionTerm {
                member: m.label(),
                weight: m.weight,
            })
            .collect();
        if self.maximally_mixed_weight > 0.0 {
            out.push(DecompositionTerm {
                member: "M9".into(),
                weight: self.maximally_mixed_weight,
            });
        }
        out
    }
}

/// `None` when `ε > 1/4 + BOUNDARY_TOL`.
pub fn separable_decomposition(s: &IsotropicState) -> Option<Decomposition> {
    if s.epsilon > ISOTROPIC_THRESHOLD + BOUNDARY_TOL {
        return None;
    }
    let mass = (4.0 * s.epsilon).min(1.0);
    let members = if mass > 0.0 {
        ensemble_members(mass / 12.0)
    } else {
        Vec::new()
    };
    Some(Decomposition {
        members,
        maximally_mixed_weight: 1.0 - mass,
    })
}

pub fn separability_verdict(s: &IsotropicState) -> Result<SeparabilityReport> {
    let rho = isotropic_density(s);
    let ppt = ppt_min_eig(&rho)?;
    let nec = necessity_bound(&expansion_coeffs(&rho)?);
    let eps = s.epsilon;
    let verdict = if (eps - ISOTROPIC_THRESHOLD).abs() <= BOUNDARY_TOL {
        Verdict::Boundary
    } else if eps < ISOTROPIC_THRESHOLD {
        Verdict::Separable
    } else {
        Verdict::Nonseparable
    };
    Ok(SeparabilityReport {
        family: "isotropic_two_qutrit".into(),
        epsilon: eps,
        threshold: ISOTROPIC_THRESHOLD,
        threshold_exact: "1/4".into(),
        verdict,
        witnesses: vec![
            Witness {
                name: "ppt_min_eig".into(),
                value: ppt,
            },
            Witness {
                name: "necessity_bound".into(),
                value: nec,
            },
        ],
        decomposition: separable_decomposition(s).map(|d| d.terms()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso(e: f64) -> ComplexMatrix {
        isotropic_density(&IsotropicState::new(e).unwrap())
    }

    #[test]
    fn max_entangled_properties() {
        let p = max_entangled();
        assert!((p.trace().re - 1.0).abs() < 1e-15);
        let shape = two_qutrit_shape();
        for keep in 0..2 {
            let m = linalg::partial_trace(&p, &shape, keep).unwrap();
            for e in linalg::hermitian_eigenvalues(&m).unwrap() {
                assert!((e - 1.0 / 3.0).abs() < 1e-15);
            }
        }
        let co = expansion_coeffs(&p).unwrap();
        assert!((co.c[1][1] - 1.5).abs() < 1e-14);
        assert!((co.c[2][2] + 1.5).abs() < 1e-14);
        assert!((co.c[5][5] + 1.5).abs() < 1e-14);
        assert!((co.c[8][8] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn isotropic_endpoints() {
        assert!(iso(0.0).max_abs_diff(&maximally_mixed_9()) < 1e-16);
        assert!(iso(1.0).max_abs_diff(&max_entangled()) < 1e-16);
        assert!(iso(0.25).max_abs_diff(&ensemble_mixture()) < 1e-13);
        assert_eq!(IsotropicState::new(1.5).unwrap_err().code(), "range");
        assert_eq!(IsotropicState::new(-0.1).unwrap_err().code(), "range");
    }

    #[test]
    fn coefficient_pattern() {
        let co = expansion_coeffs(&maximally_mixed_9()).unwrap();
        assert!((co.c[0][0] - 1.5).abs() < 1e-14);
        for a in 0..9 {
            for b in 0..9 {
                if (a, b) != (0, 0) {
                    assert!(co.c[a][b].abs() < 1e-14);
                }
            }
        }
        let e = 0.37;
        let co = expansion_coeffs(&iso(e)).unwrap();
        for j in 1..9 {
            assert!((co.c[j][j] - CORRELATION_SIGNS[j - 1] * 1.5 * e).abs() < 1e-13);
            assert!(co.c[0][j].abs() < 1e-14 && co.c[j][0].abs() < 1e-14);
        }
        assert!(co.reconstruct().max_abs_diff(&iso(e)) < 1e-13);
    }

    #[test]
    fn coefficient_shape_error() {
        assert_eq!(expansion_coeffs(&ComplexMatrix::identity(3)).unwrap_err().code(), "shape");
    }

    #[test]
    fn necessity_examples() {
        for (e, want) in [(0.25, 1.0), (0.0, 0.0), (0.5, 2.0)] {
            let v = necessity_bound(&expansion_coeffs(&iso(e)).unwrap());
            assert!((v - want).abs() < 1e-12, "eps={e}: {v}");
        }
    }

    #[test]
    fn member_kets() {
        let k = ensemble_member_ket(1, 2, Phase::PlusOne).unwrap();
        let mut want = vec![c(0.0, 0.0); 9];
        for idx in [0, 1, 3, 4] {
            want[idx] = c(0.5, 0.0);
        }
        for (x, y) in k.iter().zip(&want) {
            assert!((x - y).norm() < 1e-15);
        }
        let zs: Complex64 = Phase::ALL.iter().map(|p| p.value()).sum();
        let z2: Complex64 = Phase::ALL.iter().map(|p| p.value() * p.value()).sum();
        assert_eq!(zs, c(0.0, 0.0));
        assert_eq!(z2, c(0.0, 0.0));
        for m in ensemble_members(1.0 / 12.0) {
            assert!((linalg::norm_sqr(&m.ket()) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_members() {
        assert_eq!(ensemble_member_ket(2, 1, Phase::PlusI).unwrap_err().code(), "member");
        assert_eq!(ensemble_member_ket(1, 4, Phase::PlusI).unwrap_err().code(), "member");
        assert_eq!(ensemble_member_ket(2, 2, Phase::PlusI).unwrap_err().code(), "member");
        assert_eq!(Phase::from_complex(c(0.5, 0.0)).unwrap_err().code(), "member");
        assert_eq!(Phase::from_complex(c(0.0, -1.0)).unwrap(), Phase::MinusI);
    }

    #[test]
    fn ensemble_is_boundary_state() {
        let m = ensemble_mixture();
        assert!((m.trace().re - 1.0).abs() < 1e-14);
        let shape = two_qutrit_shape();
        for keep in 0..2 {
            let red = linalg::partial_trace(&m, &shape, keep).unwrap();
            assert!(red.max_abs_diff(&ComplexMatrix::identity(3).scale(1.0 / 3.0)) < 1e-13);
        }
        assert!(ppt_min_eig(&m).unwrap().abs() < 1e-13);
    }

    #[test]
    fn ppt_examples() {
        assert!((ppt_min_eig(&iso(0.0)).unwrap() - 1.0 / 9.0).abs() < 1e-14);
        assert!(ppt_min_eig(&iso(0.25)).unwrap().abs() < 1e-12);
        assert!((ppt_min_eig(&iso(0.3)).unwrap() + 1.0 / 45.0).abs() < 1e-13);
    }

    #[test]
    fn vidal_tarrach_examples() {
        let t = vidal_tarrach_threshold(&max_entangled_ket(), 3, 3).unwrap();
        assert!((t - 0.25).abs() < 1e-12);
        let h = 1.0 / 2f64.sqrt();
        let bell = [c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)];
        assert!((vidal_tarrach_threshold(&bell, 2, 2).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let mut prod = vec![c(0.0, 0.0); 9];
        prod[0] = c(1.0, 0.0);
        // A single Schmidt coefficient: mixing with M is separable for every ε.
        assert!((vidal_tarrach_threshold(&prod, 3, 3).unwrap() - 1.0).abs() < 1e-12);
        prod[1] = c(1.0, 0.0);
        assert_eq!(vidal_tarrach_threshold(&prod, 3, 3).unwrap_err().code(), "norm");
        assert_eq!(vidal_tarrach_threshold(&bell, 3, 3).unwrap_err().code(), "shape");
    }

    #[test]
    fn verdicts() {
        let r = separability_verdict(&IsotropicState::new(0.25).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Boundary);
        assert!(r.verdict.is_separable());
        assert_eq!(r.decomposition.as_ref().unwrap().len(), 12);

        let r = separability_verdict(&IsotropicState::new(0.251).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Nonseparable);
        assert!(r.witness("ppt_min_eig").unwrap() < 0.0);
        assert!(r.witness("necessity_bound").unwrap() > 1.0);
        assert!(r.decomposition.is_none());

        let r = separability_verdict(&IsotropicState::new(0.0).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Separable);
        let d = r.decomposition.unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].member, "M9");
    }

    #[test]
    fn decomposition_reconstructs_state() {
        for k in 0..=25 {
            let e = k as f64 / 100.0;
            let s = IsotropicState::new(e).unwrap();
            let d = separable_decomposition(&s).unwrap();
            let w: f64 = d.members.iter().map(|m| m.weight).sum::<f64>() + d.maximally_mixed_weight;
            assert!((w - 1.0).abs() < 1e-14);
            assert!(d.mixture().max_abs_diff(&isotropic_density(&s)) < 1e-12, "eps={e}");
        }
    }
}
