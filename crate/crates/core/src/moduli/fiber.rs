use serde::Serialize;

use super::jacobian::{labeled_jacobian, moduli_jacobian};
use super::regular::{from_regular, projective_distance, rep_orbit, RegularRep};
use super::{min_cost_assignment, ModuliVector};
use crate::error::{Error, Result};
use crate::foliation::{singular_points, DEFAULT_TOL};
use crate::numkernel::{pinv_solve, C64};
use crate::sampling::{complex_normal, rng};

const JACOBIAN_STEP: f64 = 1e-6;
const PINV_CUTOFF: f64 = 1e-6;
/// Solutions closer than this (projectively, up to relabeling of anchors) are the same.
const DEDUP_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberSearchConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Stop when the matched moduli distance drops below this.
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    /// Restart around this representative instead of at random.
    pub start: Option<RegularRep>,
    /// Size of the complex Gaussian perturbation applied to `start`.
    pub perturbation: f64,
}

impl Default for FiberSearchConfig {
    fn default() -> Self {
        FiberSearchConfig {
            restarts: 20,
            seed: 0,
            tol: 1e-9,
            max_iter: 100,
            max_halvings: 8,
            start: None,
            perturbation: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberSolution {
    pub rep: RegularRep,
    /// Split-block distance between the solution's moduli and the target.
    pub distance: f64,
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberReport {
    /// Distinct solutions up to affine equivalence and scaling.
    pub solutions: Vec<FiberSolution>,
    pub converged: usize,
    pub failed: usize,
    /// Error codes of failed restarts.
    pub failures: Vec<String>,
    /// True when a solution has a rank-deficient Jacobian, so the fiber is positive-dimensional.
    pub blow_down: bool,
}

fn to_rep(c: &[C64]) -> RegularRep {
    RegularRep::from_coeffs(&[c[0], c[1], c[2], c[3], c[4], c[5]])
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Residual `ν_i - target` in label order, each block matched to the target's block.
fn residual(c: &[C64], target: &ModuliVector) -> Result<Vec<C64>> {
    let set = singular_points(&from_regular(&to_rep(c))?, DEFAULT_TOL)?;
    let m = ModuliVector::from_set(&set)?;
    let values = m.values();
    let ni = set.infinite.len();
    let (inf, fin) = values.split_at(ni);
    let mut out = Vec::with_capacity(values.len());
    for (block, goal) in [(inf, &target.infinite), (fin, &target.finite)] {
        if block.len() != goal.len() {
            return Err(Error::DimensionMismatch("target block sizes differ".into()));
        }
        let perm = min_cost_assignment(block, goal);
        out.extend(block.iter().zip(perm).map(|(v, j)| v - goal[j]));
    }
    Ok(out)
}

fn pin_of(c: &[C64]) -> usize {
    (0..c.len()).max_by(|&a, &b| c[a].norm().total_cmp(&c[b].norm())).unwrap_or(0)
}

/// Damped Gauss–Newton from `start`; returns the coefficients and iteration count.
fn gauss_newton(start: Vec<C64>, target: &ModuliVector, cfg: &FiberSearchConfig) -> Result<(Vec<C64>, usize)> {
    let pin = pin_of(&start);
    let mut c: Vec<C64> = start.iter().map(|z| z / start[pin]).collect();
    let mut r = residual(&c, target)?;
    for iter in 0..cfg.max_iter {
        let size = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if size < cfg.tol {
            return Ok((c, iter));
        }
        let (jac, _) = labeled_jacobian(|p| from_regular(&to_rep(p)), &c, JACOBIAN_STEP)?;
        let rhs: Vec<C64> = r.iter().map(|z| -z).collect();
        let step = pinv_solve(&jac, &rhs, PINV_CUTOFF);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=cfg.max_halvings {
            let trial: Vec<C64> = c.iter().zip(&step).map(|(a, d)| a + t * d).collect();
            if trial[pin].norm() > 0.0 {
                let trial: Vec<C64> = trial.iter().map(|z| z / trial[pin]).collect();
                if let Ok(rt) = residual(&trial, target) {
                    if norm(&rt) < norm(&r) {
                        c = trial;
                        r = rt;
                        accepted = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence(format!("line search stalled at residual {size:.3e}")));
        }
    }
    let size = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if size < cfg.tol {
        Ok((c, cfg.max_iter))
    } else {
        Err(Error::NoConvergence(format!("residual {size:.3e} after {} iterations", cfg.max_iter)))
    }
}

fn is_duplicate(orbits: &[Vec<[C64; 6]>], c: &[C64; 6]) -> bool {
    orbits
        .iter()
        .any(|orbit| orbit.iter().any(|o| projective_distance(o, c) < DEDUP_TOL))
}

/// Regular representatives whose moduli vector matches `target`, from Gauss–Newton restarts.
///
/// Restart `i` draws its start from the stream seeded by `cfg.seed`, so the result is a
/// deterministic function of the configuration.
pub fn fiber_search(target: &ModuliVector, cfg: &FiberSearchConfig) -> Result<FiberReport> {
    if target.infinite.len() != 3 || target.finite.len() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "quadratic moduli need 3 + 4 values, got {} + {}",
            target.infinite.len(),
            target.finite.len()
        )));
    }
    let mut gen = rng(cfg.seed);
    let mut solutions = Vec::new();
    let mut orbits: Vec<Vec<[C64; 6]>> = Vec::new();
    let mut failures = Vec::new();
    let mut converged = 0;
    for _ in 0..cfg.restarts {
        let start: Vec<C64> = match &cfg.start {
            Some(rep) => rep
                .coeffs()
                .iter()
                .map(|z| z + cfg.perturbation * complex_normal(&mut gen))
                .collect(),
            None => (0..6).map(|_| complex_normal(&mut gen)).collect(),
        };
        let outcome = gauss_newton(start, target, cfg).and_then(|(c, iterations)| {
            let rep = to_rep(&c).normalized()?;
            let report = moduli_jacobian(&rep, JACOBIAN_STEP)?;
            let moduli = ModuliVector::from_set(&singular_points(&from_regular(&rep)?, DEFAULT_TOL)?)?;
            Ok((rep, report, moduli, iterations))
        });
        match outcome {
            Ok((rep, report, moduli, iterations)) => {
                converged += 1;
                let coeffs = rep.coeffs();
                let unit = coeffs.map(|z| z / norm(&coeffs));
                if is_duplicate(&orbits, &unit) {
                    continue;
                }
                orbits.push(rep_orbit(&rep)?);
                solutions.push(FiberSolution {
                    rep,
                    distance: moduli.split_distance(target),
                    rank: report.rank,
                    singular_values: report.singular_values,
                    iterations,
                });
            }
            Err(e) => failures.push(e.code().to_string()),
        }
    }
    Ok(FiberReport {
        blow_down: solutions.iter().any(|s| s.rank < 5),
        failed: failures.len(),
        failures,
        converged,
        solutions,
    })
}
