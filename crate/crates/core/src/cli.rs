//! Command-line surface. Each command returns a JSON report and an exit code:
//! 0 when every check passes, 1 on a verification failure, 2 on bad usage.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::geometry::{self, SamplerConfig, TOTAL_VOLUME};
use crate::linalg::{matmul, ComplexMatrix};
use crate::multi_qutrit;
use crate::qutrit::BlochVector;
use crate::su3::{GellMannBasis, StructureConstants};
use crate::two_qutrit::{self, IsotropicState};

pub const SCHEMA: &str = "qutritlab/1";
/// Residual ceiling for the algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Residual ceiling for the twelve-member ensemble identity.
pub const ENSEMBLE_TOL: f64 = 1e-12;
/// Moment estimates must lie within this many standard errors.
pub const SIGMA_LIMIT: f64 = 3.0;
/// Grid (per axis) for the volume quadrature reported by `montecarlo`.
pub const VOLUME_GRID: usize = 64;
pub const VOLUME_REL_TOL: f64 = 1e-3;
pub const MIN_MC_SAMPLES: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "qutritlab", version, about = "Qutrit Bloch-vector algebra and separability checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Mixing parameter of the isotropic / two-particle family.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// Number of qutrits for `bounds`.
    #[arg(long = "n-qutrits", global = true)]
    pub n_qutrits: Option<usize>,
    #[arg(long, global = true, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1e-10, allow_hyphen_values = true)]
    pub tol: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the Gell-Mann basis identities.
    VerifyAlgebra,
    /// Separability verdict for the isotropic two-qutrit state.
    Isotropic,
    /// Lower and upper thresholds for N qutrits.
    Bounds,
    /// Monte-Carlo moments and volume quadrature on the pure-state manifold.
    Montecarlo,
    /// Rebuild the boundary state from the twelve product states.
    EnsembleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyAlgebra => "verify-algebra",
            Command::Isotropic => "isotropic",
            Command::Bounds => "bounds",
            Command::Montecarlo => "montecarlo",
            Command::EnsembleCheck => "ensemble-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 100_000,
            tolerance: 1e-10,
            out: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    Fail = 1,
    Usage = 2,
}

#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub report: Value,
    pub status: ExitStatus,
}

impl CommandOutput {
    pub fn code(&self) -> i32 {
        self.status as i32
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
        s.push('\n');
        s
    }
}

fn envelope(command: Command, cfg: &RunConfig, results: Value, residuals: Value, pass: bool) -> CommandOutput {
    CommandOutput {
        report: json!({
            "schema": SCHEMA,
            "command": command.name(),
            "config": cfg,
            "results": results,
            "residuals": residuals,
            "pass": pass,
        }),
        status: if pass { ExitStatus::Pass } else { ExitStatus::Fail },
    }
}

fn usage_error(command: Command, cfg: &RunConfig, message: String) -> CommandOutput {
    CommandOutput {
        report: json!({
            "schema": SCHEMA,
            "command": command.name(),
            "config": cfg,
            "error": message,
            "pass": false,
        }),
        status: ExitStatus::Usage,
    }
}

pub fn run(cli: &Cli) -> CommandOutput {
    let cfg = RunConfig {
        seed: cli.seed,
        samples: cli.samples,
        tolerance: cli.tol,
        out: cli.out.as_ref().map(|p| p.display().to_string()),
    };
    if !(cfg.tolerance > 0.0) {
        return usage_error(cli.command, &cfg, format!("--tol must be positive, got {}", cfg.tolerance));
    }
    match cli.command {
        Command::VerifyAlgebra => cmd_verify_algebra(&cfg),
        Command::Isotropic => match cli.epsilon {
            Some(e) => cmd_isotropic(e, &cfg),
            None => usage_error(cli.command, &cfg, "--epsilon is required".into()),
        },
        Command::Bounds => match cli.n_qutrits {
            Some(n) => cmd_bounds(n, cli.epsilon, &cfg),
            None => usage_error(cli.command, &cfg, "--n-qutrits is required".into()),
        },
        Command::Montecarlo => cmd_montecarlo(&cfg),
        Command::EnsembleCheck => cmd_ensemble_check(&cfg),
    }
}

struct Check {
    name: &'static str,
    max_residual: f64,
}

pub fn cmd_verify_algebra(cfg: &RunConfig) -> CommandOutput {
    verify_algebra(crate::su3::basis(), cfg)
}

/// Runs the basis identities against an arbitrary (possibly corrupted) basis.
pub fn verify_algebra(basis: &GellMannBasis, cfg: &RunConfig) -> CommandOutput {
    let sc = StructureConstants::compute(basis);
    let mut checks = Vec::new();

    let mut pairs = Vec::with_capacity(81);
    let mut worst = 0.0f64;
    for a in 0..9 {
        for b in 0..9 {
            let t = basis.lambda(a).trace_product(basis.lambda(b)).expect("3x3");
            let want = if a == b { 2.0 } else { 0.0 };
            let r = (t - num_complex::Complex64::new(want, 0.0)).norm();
            worst = worst.max(r);
            pairs.push(json!({"alpha": a, "beta": b, "trace": t.re, "residual": r}));
        }
    }
    checks.push(Check {
        name: "orthogonality",
        max_residual: worst,
    });

    let traceless = (1..9)
        .map(|j| basis.lambda(j).trace().norm())
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "tracelessness",
        max_residual: traceless,
    });

    let mut worst = 0.0f64;
    for j in 1..=8 {
        for k in 1..=8 {
            let lhs = matmul(basis.lambda(j), basis.lambda(k)).expect("3x3");
            let mut rhs = if j == k {
                ComplexMatrix::identity(3).scale(2.0 / 3.0)
            } else {
                ComplexMatrix::zeros(3)
            };
            for l in 1..=8 {
                let coef = num_complex::Complex64::new(sc.d(j, k, l), sc.f(j, k, l));
                rhs = &rhs + &basis.lambda(l).scale_complex(coef);
            }
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
    }
    checks.push(Check {
        name: "product_decomposition",
        max_residual: worst,
    });

    let (mut fa, mut ds) = (0.0f64, 0.0f64);
    for j in 1..=8 {
        for k in 1..=8 {
            for l in 1..=8 {
                fa = fa
                    .max((sc.f(j, k, l) + sc.f(k, j, l)).abs())
                    .max((sc.f(j, k, l) + sc.f(j, l, k)).abs());
                ds = ds
                    .max((sc.d(j, k, l) - sc.d(k, j, l)).abs())
                    .max((sc.d(j, k, l) - sc.d(j, l, k)).abs());
            }
        }
    }
    checks.push(Check {
        name: "f_antisymmetry",
        max_residual: fa,
    });
    checks.push(Check {
        name: "d_symmetry",
        max_residual: ds,
    });

    let i = num_complex::Complex64::new(0.0, 1.0);
    let ket_bra = |r: usize, c: usize| {
        let mut m = ComplexMatrix::zeros(3);
        m[(r, c)] = num_complex::Complex64::new(1.0, 0.0);
        m
    };
    let mut worst = 0.0f64;
    for (r, c, lr, li) in [(0, 1, 1, 2), (0, 2, 4, 5), (1, 2, 6, 7)] {
        let up = (basis.lambda(lr) + &basis.lambda(li).scale_complex(i)).scale(0.5);
        let down = (basis.lambda(lr) - &basis.lambda(li).scale_complex(i)).scale(0.5);
        worst = worst
            .max(up.max_abs_diff(&ket_bra(r, c)))
            .max(down.max_abs_diff(&ket_bra(c, r)));
    }
    for a in 1..=3 {
        let c = BlochVector::basis_state(a).scaled(3f64.sqrt());
        let p = (&ComplexMatrix::identity(3) + &basis.dot_lambda(&c.0)).scale(1.0 / 3.0);
        worst = worst.max(p.max_abs_diff(&ket_bra(a - 1, a - 1)));
    }
    checks.push(Check {
        name: "transition_operators",
        max_residual: worst,
    });

    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !(c.max_residual < ALGEBRA_TOL))
        .map(|c| c.name)
        .collect();
    let residuals: serde_json::Map<String, Value> = checks
        .iter()
        .map(|c| (c.name.to_string(), json!(c.max_residual)))
        .collect();
    let results = json!({
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "max_residual": c.max_residual,
            "pass": c.max_residual < ALGEBRA_TOL,
        })).collect::<Vec<_>>(),
        "failed": failed,
        "orthogonality_pairs": pairs,
        "tolerance": ALGEBRA_TOL,
    });
    envelope(Command::VerifyAlgebra, cfg, results, Value::Object(residuals), failed.is_empty())
}

pub fn cmd_isotropic(epsilon: f64, cfg: &RunConfig) -> CommandOutput {
    let state = match IsotropicState::new(epsilon) {
        Ok(s) => s,
        Err(e) => return usage_error(Command::Isotropic, cfg, e.to_string()),
    };
    let report = match two_qutrit::separability_verdict(&state) {
        Ok(r) => r,
        Err(e) => {
            return envelope(Command::Isotropic, cfg, json!({"error": e.to_string(), "code": e.code()}), json!({}), false)
        }
    };
    let ppt = report.witness("ppt_min_eig").unwrap_or(f64::NAN);
    let nec = report.witness("necessity_bound").unwrap_or(f64::NAN);
    let analytic_ppt = (1.0 - epsilon) / 9.0 - epsilon / 3.0;
    let sep = report.verdict.is_separable();
    // The verdict must agree with both witnesses on this family.
    let consistent = sep == (ppt >= -cfg.tolerance) && sep == (nec <= 1.0 + cfg.tolerance);
    let residuals = json!({
        "ppt_vs_analytic": (ppt - analytic_ppt).abs(),
        "necessity_vs_4eps": (nec - 4.0 * epsilon).abs(),
    });
    envelope(
        Command::Isotropic,
        cfg,
        serde_json::to_value(&report).expect("report serializes"),
        residuals,
        consistent,
    )
}

pub fn cmd_bounds(n: usize, epsilon: Option<f64>, cfg: &RunConfig) -> CommandOutput {
    if !(1..=multi_qutrit::MAX_QUTRITS).contains(&n) {
        return usage_error(
            Command::Bounds,
            cfg,
            format!("--n-qutrits must be in 1..={}, got {n}", multi_qutrit::MAX_QUTRITS),
        );
    }
    let lower = multi_qutrit::separable_lower_threshold(n).expect("n >= 1");
    let lower_exact = multi_qutrit::lower_threshold_fraction(n).expect("n >= 1");
    let w_bound = multi_qutrit::w_lower_bound(n).expect("n >= 1");
    let (upper, gap, ok) = match multi_qutrit::nonseparable_upper_threshold(n) {
        Ok(u) => (
            json!({"exact": multi_qutrit::upper_threshold_fraction(n).expect("even n"), "value": u}),
            json!(u - lower),
            u > lower,
        ),
        Err(_) => (json!("n/a (odd N)"), Value::Null, true),
    };
    let mut results = json!({
        "n_qutrits": n,
        "lower_threshold": {"exact": lower_exact, "value": lower},
        "upper_threshold": upper,
        "gap": gap,
        "w_lower_bound": w_bound,
        "uniform_weight": multi_qutrit::uniform_weight(n),
    });
    if let Some(e) = epsilon {
        if !(0.0..=1.0).contains(&e) {
            return usage_error(Command::Bounds, cfg, format!("--epsilon must lie in [0, 1], got {e}"));
        }
        if n == 2 || n == 4 {
            match multi_qutrit::rho_phi_report(n, e) {
                Ok(r) => results["rho_phi"] = serde_json::to_value(r).expect("report serializes"),
                Err(err) => results["rho_phi"] = json!({"error": err.to_string()}),
            }
        }
    }
    envelope(Command::Bounds, cfg, results, json!({}), ok)
}

pub fn cmd_montecarlo(cfg: &RunConfig) -> CommandOutput {
    if cfg.samples < MIN_MC_SAMPLES {
        return usage_error(
            Command::Montecarlo,
            cfg,
            format!("--samples must be at least {MIN_MC_SAMPLES}, got {}", cfg.samples),
        );
    }
    let sampler = SamplerConfig::with_seed(cfg.seed);
    let m = geometry::bloch_moments(&sampler, cfg.samples);
    let second_target: Vec<f64> = (0..64)
        .map(|i| if i / 8 == i % 8 { 0.125 } else { 0.0 })
        .collect();
    let first_sigma = m.first.max_sigma(&[0.0; 8]);
    let second_sigma = m.second.max_sigma(&second_target);
    let grid = [VOLUME_GRID; 4];
    let volume = geometry::total_volume_quadrature(grid).expect("grid >= 2");
    let vol_rel = (volume - TOTAL_VOLUME).abs() / TOTAL_VOLUME;
    let pass = first_sigma <= SIGMA_LIMIT && second_sigma <= SIGMA_LIMIT && vol_rel < VOLUME_REL_TOL;
    let rows = |v: &[f64]| v.chunks(8).map(|r| r.to_vec()).collect::<Vec<_>>();
    let results = json!({
        "samples": cfg.samples,
        "first_moments": {"mean": m.first.mean, "std_err": m.first.std_err, "target": vec![0.0; 8]},
        "second_moments": {
            "mean": rows(&m.second.mean),
            "std_err": rows(&m.second.std_err),
            "target": rows(&second_target),
        },
        "sigma_limit": SIGMA_LIMIT,
        "volume": {
            "grid": grid,
            "quadrature": volume,
            "analytic": TOTAL_VOLUME,
            "analytic_exact": "9*pi^2/2",
            "fubini_study": volume / 9.0,
        },
    });
    let residuals = json!({
        "first_moments_max_sigma": first_sigma,
        "second_moments_max_sigma": second_sigma,
        "volume_relative": vol_rel,
    });
    envelope(Command::Montecarlo, cfg, results, residuals, pass)
}

pub fn cmd_ensemble_check(cfg: &RunConfig) -> CommandOutput {
    let members = two_qutrit::ensemble_members(1.0 / 12.0);
    let listing: Vec<Value> = members
        .iter()
        .map(|m| {
            json!({
                "a": m.a,
                "b": m.b,
                "z": m.z.label(),
                "weight": m.weight,
                "norm": crate::linalg::norm_sqr(&m.ket()).sqrt(),
            })
        })
        .collect();
    let mixture = two_qutrit::ensemble_mixture();
    let target = two_qutrit::isotropic_density(&IsotropicState::new(0.25).expect("in range"));
    let residual = mixture.max_abs_diff(&target);
    let norm_residual = members
        .iter()
        .map(|m| (crate::linalg::norm_sqr(&m.ket()) - 1.0).abs())
        .fold(0.0, f64::max);
    let results = json!({
        "members": listing,
        "member_count": members.len(),
        "target": "3/4 M9 + 1/4 |Psi><Psi|",
        "tolerance": ENSEMBLE_TOL,
    });
    let residuals = json!({"mixture_max_abs": residual, "member_norms": norm_residual});
    envelope(
        Command::EnsembleCheck,
        cfg,
        results,
        residuals,
        residual < ENSEMBLE_TOL && norm_residual < ENSEMBLE_TOL,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_passes_on_fresh_basis() {
        let out = cmd_verify_algebra(&RunConfig::default());
        assert_eq!(out.code(), 0);
        assert_eq!(out.report["results"]["orthogonality_pairs"].as_array().unwrap().len(), 81);
        assert_eq!(out.report["schema"], SCHEMA);
    }

    #[test]
    fn algebra_fails_on_corrupted_lambda8() {
        let b = crate::su3::basis();
        let mut lam = b.all().clone();
        lam[8] = ComplexMatrix::from_real_diag(&[1.0, 1.0, -2.0]);
        let out = verify_algebra(&GellMannBasis::from_matrices(lam), &RunConfig::default());
        assert_eq!(out.code(), 1);
        let failed = out.report["results"]["failed"].as_array().unwrap();
        assert!(failed.iter().any(|f| f == "orthogonality"));
    }

    #[test]
    fn isotropic_range_error() {
        assert_eq!(cmd_isotropic(1.5, &RunConfig::default()).code(), 2);
    }

    #[test]
    fn bounds_range_error() {
        assert_eq!(cmd_bounds(0, None, &RunConfig::default()).code(), 2);
        assert_eq!(cmd_bounds(6, None, &RunConfig::default()).code(), 2);
    }

    #[test]
    fn montecarlo_needs_samples() {
        let cfg = RunConfig {
            samples: 10,
            ..RunConfig::default()
        };
        assert_eq!(cmd_montecarlo(&cfg).code(), 2);
    }

    #[test]
    fn parse_flags() {
        let cli = Cli::try_parse_from(["qutritlab", "isotropic", "--epsilon", "0.3", "--seed", "5"]).unwrap();
        assert_eq!(cli.command, Command::Isotropic);
        assert_eq!(cli.epsilon, Some(0.3));
        assert_eq!(cli.seed, 5);
        assert_eq!(cli.samples, 100_000);
        assert!(Cli::try_parse_from(["qutritlab", "nope"]).is_err());
    }

    #[test]
    fn nonpositive_tolerance_is_usage_error() {
        let cli = Cli::try_parse_from(["qutritlab", "verify-algebra", "--tol", "-1"]).unwrap();
        assert_eq!(run(&cli).code(), 2);
    }
}
