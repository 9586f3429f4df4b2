//! Rescaled Fubini-Study geometry of the pure-state manifold.
//!
//! With `ds² = 3 ds²_FS = dn·dn` the invariant volume element in the
//! coordinates `(θ, φ, χ1, χ2)` is `dΩ = 9 sin³θ cosθ sinφ cosφ dθ dφ dχ1 dχ2`,
//! with total volume `V = 9π²/2`.
//!
//! Sampling is counter-based: chunk `i` of a run draws from a ChaCha20 stream
//! keyed by `(seed, i)`, so results do not depend on how chunks are scheduled
//! across threads.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qutrit::{self, BlochVector, PureStateParams};

/// `V = ∫ dΩ = 9π²/2`.
pub const TOTAL_VOLUME: f64 = 4.5 * PI * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub chunk_size: usize,
}

impl SamplerConfig {
    pub const DEFAULT_CHUNK: usize = 8192;

    pub fn new(seed: u64, chunk_size: usize) -> Result<Self> {
        if chunk_size == 0 {
            return Err(Error::Range("chunk_size must be at least 1".into()));
        }
        Ok(Self { seed, chunk_size })
    }

    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            chunk_size: Self::DEFAULT_CHUNK,
        }
    }

    /// Independent generator for chunk `index`.
    pub fn chunk_rng(&self, index: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    fn chunks(&self, count: usize) -> Vec<(u64, usize)> {
        let chunk = self.chunk_size.max(1);
        (0..count.div_ceil(chunk))
            .map(|i| (i as u64, chunk.min(count - i * chunk)))
            .collect()
    }
}

/// One draw from the invariant measure by inverse CDF:
/// `sin⁴θ = u`, `sin²φ = v`, `χ1, χ2` uniform.
pub fn draw_pure<R: Rng + ?Sized>(rng: &mut R) -> PureStateParams {
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    let w1: f64 = rng.gen();
    let w2: f64 = rng.gen();
    PureStateParams {
        theta: u.sqrt().sqrt().asin(),
        phi: v.sqrt().asin(),
        chi1: 2.0 * PI * w1,
        chi2: 2.0 * PI * w2,
    }
}

/// `count` i.i.d. invariant draws, in chunk order.
pub fn sample_pure(cfg: &SamplerConfig, count: usize) -> Vec<PureStateParams> {
    cfg.chunks(count)
        .into_par_iter()
        .map(|(idx, len)| {
            let mut rng = cfg.chunk_rng(idx);
            (0..len).map(|_| draw_pure(&mut rng)).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Sample means of a vector-valued integrand with their standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEstimate {
    pub count: usize,
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
}

impl MonteCarloEstimate {
    /// Largest `|mean_i - target_i| / std_err_i`. Components with zero
    /// standard error count as exact matches only when they agree to 1e-15.
    pub fn max_sigma(&self, target: &[f64]) -> f64 {
        self.mean
            .iter()
            .zip(&self.std_err)
            .zip(target)
            .map(|((m, s), t)| {
                let dev = (m - t).abs();
                if *s > 0.0 {
                    dev / s
                } else if dev <= 1e-15 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone)]
struct Sums {
    s1: Vec<f64>,
    s2: Vec<f64>,
}

impl Sums {
    fn zeros(n: usize) -> Self {
        Self {
            s1: vec![0.0; n],
            s2: vec![0.0; n],
        }
    }

    fn merge(mut self, other: &Sums) -> Sums {
        for (a, b) in self.s1.iter_mut().zip(&other.s1) {
            *a += b;
        }
        for (a, b) in self.s2.iter_mut().zip(&other.s2) {
            *a += b;
        }
        self
    }
}

fn pairwise_merge(parts: &[Sums], width: usize) -> Sums {
    match parts.len() {
        0 => Sums::zeros(width),
        1 => parts[0].clone(),
        n => {
            let (l, r) = parts.split_at(n / 2);
            pairwise_merge(l, width).merge(&pairwise_merge(r, width))
        }
    }
}

/// Estimates `E[f]` over the invariant measure on pure states. `f` writes
/// `outputs` values for each draw.
pub fn integrate_pure<F>(cfg: &SamplerConfig, count: usize, outputs: usize, f: F) -> MonteCarloEstimate
where
    F: Fn(&PureStateParams, &mut [f64]) + Sync,
{
    let parts: Vec<Sums> = cfg
        .chunks(count)
        .into_par_iter()
        .map(|(idx, len)| {
            let mut rng = cfg.chunk_rng(idx);
            let mut sums = Sums::zeros(outputs);
            let mut buf = vec![0.0; outputs];
            for _ in 0..len {
                let p = draw_pure(&mut rng);
                f(&p, &mut buf);
                for (k, &x) in buf.iter().enumerate() {
                    sums.s1[k] += x;
                    sums.s2[k] += x * x;
                }
            }
            sums
        })
        .collect();
    let total = pairwise_merge(&parts, outputs);
    let n = count as f64;
    let mean: Vec<f64> = total.s1.iter().map(|s| s / n).collect();
    let std_err = if count > 1 {
        total
            .s2
            .iter()
            .zip(&mean)
            .map(|(s2, m)| {
                let var = ((s2 - n * m * m) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            })
            .collect()
    } else {
        vec![f64::INFINITY; outputs]
    };
    MonteCarloEstimate {
        count,
        mean,
        std_err,
    }
}

/// First and second moments of the Bloch components under the invariant measure.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochMoments {
    pub first: MonteCarloEstimate,
    /// Row-major 8×8 estimates of `E[n_j n_k]`.
    pub second: MonteCarloEstimate,
}

pub fn bloch_moments(cfg: &SamplerConfig, count: usize) -> BlochMoments {
    let est = integrate_pure(cfg, count, 8 + 64, |p, out| {
        let n = qutrit::params_to_bloch(p).expect("sampler stays in range").0;
        out[..8].copy_from_slice(&n);
        for j in 0..8 {
            for k in 0..8 {
                out[8 + 8 * j + k] = n[j] * n[k];
            }
        }
    });
    let split = |lo: usize, hi: usize| MonteCarloEstimate {
        count: est.count,
        mean: est.mean[lo..hi].to_vec(),
        std_err: est.std_err[lo..hi].to_vec(),
    };
    BlochMoments {
        first: split(0, 8),
        second: split(8, 72),
    }
}

/// `arccos |⟨ψ|ψ′⟩|`, in [0, π/2].
pub fn fs_angle(n: &BlochVector, m: &BlochVector) -> f64 {
    qutrit::overlap(n, m).clamp(0.0, 1.0).sqrt().acos()
}

/// Invariant volume density `9 sin³θ cosθ sinφ cosφ`.
pub fn volume_density(theta: f64, phi: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    9.0 * st * st * st * ct * sp * cp
}

/// Nodes and weights on `[0, len]` with `intervals` subintervals: composite
/// Simpson, with a closing 3/8 panel when the count is odd.
fn simpson_rule(len: f64, intervals: usize) -> Vec<(f64, f64)> {
    let n = intervals;
    let h = len / n as f64;
    let mut w = vec![0.0; n + 1];
    let simpson_panels = if n % 2 == 0 { n } else { n - 3 };
    for i in (0..simpson_panels).step_by(2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if n % 2 == 1 {
        let s = simpson_panels;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    w.into_iter().enumerate().map(|(i, wi)| (i as f64 * h, wi)).collect()
}

/// Periodic trapezoid on `[0, 2π)` with `points` nodes.
fn periodic_rule(points: usize) -> Vec<(f64, f64)> {
    let h = 2.0 * PI / points as f64;
    (0..points).map(|i| (i as f64 * h, h)).collect()
}

/// Tensor-product quadrature of `∫ f(θ, φ, χ1, χ2) dθ dφ dχ1 dχ2` over the
/// coordinate box. `grid[0..2]` are subinterval counts on the θ and φ axes
/// (Simpson), `grid[2..4]` node counts on the χ axes (periodic trapezoid).
pub fn product_quadrature<F>(grid: [usize; 4], f: F) -> Result<f64>
where
    F: Fn(f64, f64, f64, f64) -> f64 + Sync,
{
    if grid.iter().any(|&g| g < 2) {
        return Err(Error::Range(format!("grid sizes must be >= 2, got {grid:?}")));
    }
    let th = simpson_rule(FRAC_PI_2, grid[0]);
    let ph = simpson_rule(FRAC_PI_2, grid[1]);
    let c1 = periodic_rule(grid[2]);
    let c2 = periodic_rule(grid[3]);
    let partial: Vec<f64> = th
        .par_iter()
        .map(|&(t, wt)| {
            let mut acc = 0.0;
            for &(p, wp) in &ph {
                for &(a, wa) in &c1 {
                    let mut inner = 0.0;
                    for &(b, wb) in &c2 {
                        inner += wb * f(t, p, a, b);
                    }
                    acc += wp * wa * inner;
                }
            }
            wt * acc
        })
        .collect();
    Ok(partial.iter().sum())
}

/// Deterministic quadrature of the total volume `∫ dΩ`.
pub fn total_volume_quadrature(grid: [usize; 4]) -> Result<f64> {
    product_quadrature(grid, |t, p, _, _| volume_density(t, p))
}

/// `ds²` at `p` for coordinate increments `dp = (dθ, dφ, dχ1, dχ2)`.
pub fn line_element(p: &PureStateParams, dp: &[f64; 4]) -> f64 {
    let [dt, dph, d1, d2] = *dp;
    let st2 = p.theta.sin().powi(2);
    let (sp, cp) = p.phi.sin_cos();
    let (sp2, cp2) = (sp * sp, cp * cp);
    3.0 * (dt * dt
        + st2 * dph * dph
        + st2 * cp2 * (1.0 - st2 * cp2) * d1 * d1
        + st2 * sp2 * (1.0 - st2 * sp2) * d2 * d2
        - 2.0 * st2 * st2 * sp2 * cp2 * d1 * d2)
}
