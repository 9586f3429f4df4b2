//! N-qutrit states near the maximally mixed state.
//!
//! Every state has the (non-unique) expansion over product pure projectors
//!
//! ```text
//! w_ρ(n_1..n_N) = (2/9π²)^N tr(ρ ⊗_i (1 + 4√3 n_i·λ))
//! ```
//!
//! Each factor has spectrum {9, −3, −3}, so `w ≥ −(2/9π²)^N 3^{2N−1}` and
//! `(1−ε)M + ερ₁` has a nonnegative expansion whenever `ε ≤ 1/(1+3^{2N−1})`.
//! In the other direction, projecting the two-particle state
//! `(1−ε)M_{d²} + ε|φ⟩⟨φ|` (d = 3^{N/2}) onto one qutrit per particle yields an
//! isotropic two-qutrit state with parameter ε′, entangled once `ε > 1/(1+d)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{self, SamplerConfig};
use crate::linalg::{self, tensor_all, ComplexMatrix};
use crate::qutrit::{self, BlochVector, PureStateParams, PURITY_TOL};
use crate::report::{SeparabilityReport, Verdict, Witness};
use crate::su3;
use crate::two_qutrit;

/// Largest register held as a dense matrix (3⁵ = 243).
pub const MAX_QUTRITS: usize = 5;
/// Largest register for which the 9^N coefficient tensor is materialized.
pub const MAX_COEFF_QUTRITS: usize = 3;

fn check_n(n: usize) -> Result<()> {
    if !(1..=MAX_QUTRITS).contains(&n) {
        return Err(Error::Size(format!("n_qutrits must be in 1..={MAX_QUTRITS}, got {n}")));
    }
    Ok(())
}

/// A validated density operator on `n_qutrits` qutrits.
#[derive(Debug, Clone, PartialEq)]
pub struct NQutritState {
    n_qutrits: usize,
    rho: ComplexMatrix,
}

impl NQutritState {
    pub fn new(n_qutrits: usize, rho: ComplexMatrix) -> Result<Self> {
        check_n(n_qutrits)?;
        let dim = 3usize.pow(n_qutrits as u32);
        if rho.dim() != dim {
            return Err(Error::Shape(format!(
                "{n_qutrits} qutrits need a {dim}x{dim} matrix, got {}",
                rho.dim()
            )));
        }
        if (rho.trace() - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::NotAState { min_eig: f64::NAN });
        }
        let min_eig = linalg::min_eigenvalue(&rho)?;
        if min_eig < -linalg::default_psd_tol(&rho) {
            return Err(Error::NotAState { min_eig });
        }
        Ok(Self { n_qutrits, rho })
    }

    pub fn n_qutrits(&self) -> usize {
        self.n_qutrits
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    /// `(1 − ε) M + ε ρ₁`, with `self` as ρ₁.
    pub fn mixed_with_identity(&self, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::Range(format!("epsilon must lie in [0, 1], got {epsilon}")));
        }
        let m = ComplexMatrix::identity(self.dim()).scale((1.0 - epsilon) / self.dim() as f64);
        Ok(Self {
            n_qutrits: self.n_qutrits,
            rho: &m + &self.rho.scale(epsilon),
        })
    }
}

pub fn maximally_mixed(n: usize) -> Result<NQutritState> {
    check_n(n)?;
    let dim = 3usize.pow(n as u32);
    Ok(NQutritState {
        n_qutrits: n,
        rho: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
    })
}

/// `(2/9π²)^N`, the expansion function of the maximally mixed state.
pub fn uniform_weight(n: usize) -> f64 {
    (2.0 / (9.0 * PI * PI)).powi(n as i32)
}

/// `1 + 4√3 n·λ` for a single qutrit.
pub fn factor_operator(n: &BlochVector) -> ComplexMatrix {
    let lam = su3::basis().dot_lambda(&n.0).scale(4.0 * 3f64.sqrt());
    &ComplexMatrix::identity(3) + &lam
}

/// `⊗_i (1 + 4√3 n_i·λ)`.
pub fn product_operator(points: &[BlochVector]) -> Result<ComplexMatrix> {
    let factors: Vec<ComplexMatrix> = points.iter().map(factor_operator).collect();
    tensor_all(&factors)
}

/// The spectrum of the product operator for N pure points: all N-fold
/// products of {9, −3, −3}, ascending.
pub fn product_operator_spectrum(n: usize) -> Vec<f64> {
    let mut vals = vec![1.0f64];
    for _ in 0..n {
        vals = vals
            .iter()
            .flat_map(|v| [9.0 * v, -3.0 * v, -3.0 * v])
            .collect();
    }
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

/// `w_ρ(n_1..n_N)`; every point must be a pure Bloch vector.
pub fn expansion_function_w(state: &NQutritState, points: &[BlochVector]) -> Result<f64> {
    if points.len() != state.n_qutrits {
        return Err(Error::Shape(format!(
            "{} points for a {}-qutrit state",
            points.len(),
            state.n_qutrits
        )));
    }
    if points.iter().any(|p| !qutrit::is_pure(p, PURITY_TOL)) {
        return Err(Error::NotPure);
    }
    let op = product_operator(points)?;
    Ok(uniform_weight(state.n_qutrits) * state.rho.trace_product(&op)?.re)
}

/// `−(2/9π²)^N 3^{2N−1}`.
pub fn w_lower_bound(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Size("n_qutrits must be at least 1".into()));
    }
    Ok(-uniform_weight(n) * 3f64.powi(2 * n as i32 - 1))
}

/// `1 / (1 + 3^{2N−1})`.
pub fn separable_lower_threshold(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Size("n_qutrits must be at least 1".into()));
    }
    Ok(1.0 / (1.0 + 3f64.powi(2 * n as i32 - 1)))
}

/// Exact form of [`separable_lower_threshold`], e.g. "1/28".
pub fn lower_threshold_fraction(n: usize) -> Result<String> {
    if n == 0 {
        return Err(Error::Size("n_qutrits must be at least 1".into()));
    }
    let k = 2 * n as u32 - 1;
    Ok(match 3u128.checked_pow(k) {
        Some(p) => format!("1/{}", p + 1),
        None => format!("1/(1+3^{k})"),
    })
}

/// `1 / (1 + 3^{N/2})` for even N.
pub fn nonseparable_upper_threshold(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Size("n_qutrits must be at least 1".into()));
    }
    if n % 2 == 1 {
        return Err(Error::Parity(n));
    }
    Ok(1.0 / (1.0 + 3f64.powi(n as i32 / 2)))
}

pub fn upper_threshold_fraction(n: usize) -> Result<String> {
    nonseparable_upper_threshold(n)?;
    let k = n as u32 / 2;
    Ok(match 3u128.checked_pow(k) {
        Some(p) => format!("1/{}", p + 1),
        None => format!("1/(1+3^{k})"),
    })
}

/// Coefficients `c_{α1..αN} = (3/2)^N tr(ρ λα1 ⊗ … ⊗ λαN)`, with α1 the most
/// significant digit of the flat index.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoeffsN {
    pub n_qutrits: usize,
    pub c: Vec<f64>,
}

fn digits(mut idx: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = idx % 9;
        idx /= 9;
    }
    out
}

fn basis_product(alphas: &[usize]) -> ComplexMatrix {
    let b = su3::basis();
    tensor_all(alphas.iter().map(|&a| b.lambda(a))).expect("nonempty")
}

pub fn expansion_coeffs_n(state: &NQutritState) -> Result<ExpansionCoeffsN> {
    let n = state.n_qutrits;
    if n > MAX_COEFF_QUTRITS {
        return Err(Error::Size(format!(
            "coefficient tensor is only built for up to {MAX_COEFF_QUTRITS} qutrits"
        )));
    }
    let scale = 1.5f64.powi(n as i32);
    let c = (0..9usize.pow(n as u32))
        .into_par_iter()
        .map(|idx| {
            let op = basis_product(&digits(idx, n));
            scale * state.rho.trace_product(&op).expect("same dim").re
        })
        .collect();
    Ok(ExpansionCoeffsN { n_qutrits: n, c })
}

impl ExpansionCoeffsN {
    /// `ρ = 3^{−N} Σ c_{α} λα1 ⊗ … ⊗ λαN`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.n_qutrits;
        let norm = 3f64.powi(-(n as i32));
        let dim = 3usize.pow(n as u32);
        self.c
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .fold(ComplexMatrix::zeros(dim), |acc, (idx, &c)| {
                &acc + &basis_product(&digits(idx, n)).scale(c * norm)
            })
    }

    /// `(16/(9√3π²))^N Σ c_{α} Π_i (n̄_i)_{αi}` with `n̄_0 = 1/(4√2)`,
    /// `n̄_j = n_j`. Agrees with [`expansion_function_w`].
    pub fn w(&self, points: &[BlochVector]) -> Result<f64> {
        let n = self.n_qutrits;
        if points.len() != n {
            return Err(Error::Shape(format!("{} points for {n} qutrits", points.len())));
        }
        let bars: Vec<[f64; 9]> = points
            .iter()
            .map(|p| {
                let mut b = [0.0; 9];
                b[0] = 1.0 / (4.0 * 2f64.sqrt());
                b[1..].copy_from_slice(&p.0);
                b
            })
            .collect();
        let sum: f64 = self
            .c
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                digits(idx, n)
                    .iter()
                    .zip(&bars)
                    .fold(c, |acc, (&a, bar)| acc * bar[a])
            })
            .sum();
        Ok((16.0 / (9.0 * 3f64.sqrt() * PI * PI)).powi(n as i32) * sum)
    }
}

fn random_points<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<BlochVector> {
    (0..n)
        .map(|_| qutrit::params_to_bloch(&geometry::draw_pure(rng)).expect("in range"))
        .collect()
}

/// Minimum of `w_ρ` over `tuples` invariant random point tuples.
pub fn min_w_sampled(state: &NQutritState, cfg: &SamplerConfig, tuples: usize) -> Result<f64> {
    let chunk = cfg.chunk_size.max(1);
    let n_chunks = tuples.div_ceil(chunk);
    let mins: Vec<Result<f64>> = (0..n_chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = cfg.chunk_rng(i as u64);
            let len = chunk.min(tuples - i * chunk);
            let mut best = f64::INFINITY;
            for _ in 0..len {
                let pts = random_points(&mut rng, state.n_qutrits);
                best = best.min(expansion_function_w(state, &pts)?);
            }
            Ok(best)
        })
        .collect();
    mins.into_iter().try_fold(f64::INFINITY, |a, m| Ok(a.min(m?)))
}

fn perturb<R: Rng + ?Sized>(p: &PureStateParams, step: f64, rng: &mut R) -> PureStateParams {
    let mut d = || step * (2.0 * rng.gen::<f64>() - 1.0);
    let wrap = |x: f64| x.rem_euclid(2.0 * PI);
    PureStateParams {
        theta: (p.theta + d()).clamp(0.0, FRAC_PI_2),
        phi: (p.phi + d()).clamp(0.0, FRAC_PI_2),
        chi1: wrap(p.chi1 + d()),
        chi2: wrap(p.chi2 + d()),
    }
}

/// Numerical minimum of `w_ρ`: `restarts` random tuples, then stochastic
/// hill-climbing from the best few. Returns the minimum and its points.
pub fn minimize_w(
    state: &NQutritState,
    cfg: &SamplerConfig,
    restarts: usize,
) -> Result<(f64, Vec<BlochVector>)> {
    const KEEP: usize = 8;
    const ITERS: usize = 3000;
    let n = state.n_qutrits;
    let eval = |ps: &[PureStateParams]| -> Result<f64> {
        let pts: Vec<BlochVector> = ps
            .iter()
            .map(|p| qutrit::params_to_bloch(p).expect("in range"))
            .collect();
        expansion_function_w(state, &pts)
    };

    let mut rng = cfg.chunk_rng(0);
    let mut starts: Vec<(f64, Vec<PureStateParams>)> = Vec::with_capacity(restarts);
    for _ in 0..restarts {
        let ps: Vec<PureStateParams> = (0..n).map(|_| geometry::draw_pure(&mut rng)).collect();
        starts.push((eval(&ps)?, ps));
    }
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    starts.truncate(KEEP);

    let refined: Vec<Result<(f64, Vec<PureStateParams>)>> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, (mut best, mut ps))| {
            let mut rng = cfg.chunk_rng(1 + i as u64);
            let mut step = 0.3;
            for _ in 0..ITERS {
                let cand: Vec<PureStateParams> =
                    ps.iter().map(|p| perturb(p, step, &mut rng)).collect();
                let v = eval(&cand)?;
                if v < best {
                    best = v;
                    ps = cand;
                } else {
                    step = (step * 0.995).max(1e-6);
                }
            }
            Ok((best, ps))
        })
        .collect();
    let mut best: Option<(f64, Vec<PureStateParams>)> = None;
    for r in refined {
        let r = r?;
        if best.as_ref().map_or(true, |b| r.0 < b.0) {
            best = Some(r);
        }
    }
    let (v, ps) = best.ok_or_else(|| Error::Range("restarts must be at least 1".into()))?;
    let pts = ps
        .iter()
        .map(|p| qutrit::params_to_bloch(p).expect("in range"))
        .collect();
    Ok((v, pts))
}

/// Monte-Carlo estimate of `∫ dΩ w_ρ(n) P_n` for a single qutrit, which
/// reproduces ρ. Outputs are the real and imaginary parts of the nine entries,
/// interleaved row-major: `[re(0,0), im(0,0), re(0,1), …]`.
pub fn reconstruct_single_qutrit_mc(
    state: &NQutritState,
    cfg: &SamplerConfig,
    samples: usize,
) -> Result<geometry::MonteCarloEstimate> {
    if state.n_qutrits != 1 {
        return Err(Error::Size(format!(
            "reconstruction is single-qutrit only, got {} qutrits",
            state.n_qutrits
        )));
    }
    Ok(geometry::integrate_pure(cfg, samples, 18, |p, out| {
        let n = qutrit::params_to_bloch(p).expect("sampler stays in range");
        let w = expansion_function_w(state, &[n]).expect("sampled points are pure");
        let scaled = n.projector().scale(w * geometry::TOTAL_VOLUME);
        for (k, z) in scaled.as_slice().iter().enumerate() {
            out[2 * k] = z.re;
            out[2 * k + 1] = z.im;
        }
    }))
}

fn check_particle_dim(d: usize) -> Result<()> {
    if d != 3 && d != 9 {
        return Err(Error::Size(format!("particle dimension must be 3 or 9, got {d}")));
    }
    Ok(())
}

/// `(|11⟩ + … + |dd⟩)/√d`.
pub fn bipartite_maxent(d: usize) -> Result<Vec<Complex64>> {
    check_particle_dim(d)?;
    let s = 1.0 / (d as f64).sqrt();
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
    for a in 0..d {
        psi[a * d + a] = Complex64::new(s, 0.0);
    }
    Ok(psi)
}

/// `(1 − ε) M_{d²} + ε |φ⟩⟨φ|`.
pub fn rho_phi(epsilon: f64, d: usize) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Range(format!("epsilon must lie in [0, 1], got {epsilon}")));
    }
    let phi = bipartite_maxent(d)?;
    let dd = d * d;
    Ok(&ComplexMatrix::identity(dd).scale((1.0 - epsilon) / dd as f64)
        + &ComplexMatrix::outer(&phi).scale(epsilon))
}

/// Result of projecting each particle onto span{|1⟩, |2⟩, |3⟩}.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedState {
    /// Normalized two-qutrit state `ΠρΠ / tr(ρΠ)`, 9×9.
    pub rho: ComplexMatrix,
    /// `A = tr(ρΠ)`.
    pub normalization: f64,
}

/// Projects a two-particle state on `d²` dimensions down to two qutrits.
pub fn project_two_particles(rho: &ComplexMatrix, d: usize) -> Result<ProjectedState> {
    check_particle_dim(d)?;
    if rho.dim() != d * d {
        return Err(Error::Shape(format!(
            "expected a {}x{} two-particle operator, got {}",
            d * d,
            d * d,
            rho.dim()
        )));
    }
    let keep: Vec<usize> = (0..3).flat_map(|a| (0..3).map(move |b| a * d + b)).collect();
    let block = rho.restrict(&keep)?;
    let a = block.trace().re;
    if a <= 0.0 {
        return Err(Error::NotAState { min_eig: a });
    }
    Ok(ProjectedState {
        rho: block.scale(1.0 / a),
        normalization: a,
    })
}

/// `A = (9/d²)(1 + ε(d/3 − 1))`.
pub fn projection_normalization(epsilon: f64, d: usize) -> f64 {
    let d = d as f64;
    9.0 / (d * d) * (1.0 + epsilon * (d / 3.0 - 1.0))
}

/// `ε′ = (εd/3) / (1 + ε(d/3 − 1))`.
pub fn epsilon_prime(epsilon: f64, d: usize) -> f64 {
    let r = d as f64 / 3.0;
    epsilon * r / (1.0 + epsilon * (r - 1.0))
}

/// Verdict on `(1 − ε) M_{3^N} + ε |φ⟩⟨φ|` from the two bounds: separable at or
/// below the lower threshold, nonseparable when the projected two-qutrit state
/// has a negative partial transpose, undetermined in between.
pub fn rho_phi_report(n: usize, epsilon: f64) -> Result<SeparabilityReport> {
    let upper = nonseparable_upper_threshold(n)?;
    if n > 4 {
        return Err(Error::Size(format!("projection construction needs N in {{2, 4}}, got {n}")));
    }
    let lower = separable_lower_threshold(n)?;
    let d = 3usize.pow(n as u32 / 2);
    let rho = rho_phi(epsilon, d)?;
    let projected = project_two_particles(&rho, d)?;
    let ppt = two_qutrit::ppt_min_eig(&projected.rho)?;
    let w_bound = uniform_weight(n) * (1.0 - epsilon * (1.0 + 3f64.powi(2 * n as i32 - 1)));
    let verdict = if epsilon <= lower {
        Verdict::Separable
    } else if ppt < -linalg::default_psd_tol(&projected.rho) {
        Verdict::Nonseparable
    } else {
        Verdict::Undetermined
    };
    let w = |name: &str, value: f64| Witness {
        name: name.into(),
        value,
    };
    Ok(SeparabilityReport {
        family: format!("rho_phi_n{n}"),
        epsilon,
        threshold: upper,
        threshold_exact: upper_threshold_fraction(n)?,
        verdict,
        witnesses: vec![
            w("projected_ppt_min_eig", ppt),
            w("epsilon_prime", epsilon_prime(epsilon, d)),
            w("projection_normalization", projected.normalization),
            w("lower_threshold", lower),
            w("w_lower_bound", w_bound),
        ],
        decomposition: None,
    })
}
