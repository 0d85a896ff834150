use serde::Serialize;

use super::regular::{from_regular, RegularRep};
use crate::error::{Error, Result};
use crate::foliation::{singular_points, SingPoint, SingSet, VectorField, DEFAULT_TOL};
use crate::numkernel::{singular_values, CMatrix, C64};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_REL_TOL: f64 = 1e-6;
/// Difference-quotient noise level; a Jacobian with `σ_1` below it is reported as rank 0.
pub const JACOBIAN_NOISE_FLOOR: f64 = 1e-6;

/// Number of singular values at or above `rel_tol * σ_max`.
pub fn numerical_rank(sigma: &[f64], rel_tol: f64) -> usize {
    let top = sigma.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s >= rel_tol * top).count()
}

fn block_separation(points: &[SingPoint]) -> f64 {
    let mut sep = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            sep = sep.min(points[i].location.distance(&points[j].location));
        }
    }
    sep
}

/// Trust radius for label tracking: a quarter of the smallest same-kind separation.
pub fn trust_radius(base: &SingSet) -> f64 {
    0.25 * block_separation(&base.finite).min(block_separation(&base.infinite))
}

/// `ν` of the points of `other` matched to the points of `base`, in `base` label order.
///
/// Each base point takes the nearest point of the same kind; the matches must be distinct,
/// nondegenerate and within `radius`.
pub fn track_nu(base: &SingSet, other: &SingSet, radius: f64) -> Result<Vec<C64>> {
    other.require_generic_count()?;
    let mut out = Vec::with_capacity(base.len());
    for (from, to) in [(&base.infinite, &other.infinite), (&base.finite, &other.finite)] {
        let mut used = vec![false; to.len()];
        for p in from {
            let (k, d) = to
                .iter()
                .enumerate()
                .map(|(k, q)| (k, p.location.distance(&q.location)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .ok_or(Error::LabelTrackingFailure { moved: f64::INFINITY, radius })?;
            if d > radius || used[k] {
                return Err(Error::LabelTrackingFailure { moved: d, radius });
            }
            used[k] = true;
            let nu = to[k]
                .nu
                .ok_or_else(|| Error::DegenerateSingularity(format!("{:?}", to[k].location)))?;
            out.push(nu);
        }
    }
    Ok(out)
}

/// Central-difference Jacobian of the labeled moduli vector with respect to `params`.
///
/// `field` maps parameters to a field; rows follow the label order of the base field's
/// singular set, which is returned alongside.
pub fn labeled_jacobian<F>(field: F, params: &[C64], h: f64) -> Result<(CMatrix, SingSet)>
where
    F: Fn(&[C64]) -> Result<VectorField>,
{
    let base = singular_points(&field(params)?, DEFAULT_TOL)?;
    base.require_generic_count()?;
    base.require_nondegenerate()?;
    let radius = trust_radius(&base);
    let mut jac = CMatrix::zeros(base.len(), params.len());
    for k in 0..params.len() {
        let shifted = |sign: f64| -> Result<Vec<C64>> {
            let mut c = params.to_vec();
            c[k] += sign * h;
            let set = singular_points(&field(&c)?, DEFAULT_TOL)?;
            track_nu(&base, &set, radius)
        };
        let plus = shifted(1.0)?;
        let minus = shifted(-1.0)?;
        let col: Vec<C64> = plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect();
        jac.set_column(k, &col);
    }
    Ok((jac, base))
}

/// Derivative of the moduli map at a regular representative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobianReport {
    pub matrix: CMatrix,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// `σ_5 / σ_1`, the relative size of the smallest retained direction.
    pub sigma_ratio: f64,
    /// `|J c| / (σ_1 |c|)` for the base coefficients `c`; the scaling direction is in the kernel.
    pub radial_residual: f64,
    /// Trust radius used for label tracking.
    pub trust_radius: f64,
}

/// 7 x 6 Jacobian of the labeled Baum–Bott vector in the six regular-representative coordinates.
pub fn moduli_jacobian(rep: &RegularRep, h: f64) -> Result<JacobianReport> {
    if !(1e-7..=1e-4).contains(&h) {
        return Err(Error::InvalidInput(format!("step {h} outside [1e-7, 1e-4]")));
    }
    let c = rep.coeffs();
    let (matrix, base) = labeled_jacobian(
        |p| from_regular(&RegularRep::from_coeffs(&[p[0], p[1], p[2], p[3], p[4], p[5]])),
        &c,
        h,
    )?;
    let sigma = singular_values(&matrix);
    let top = sigma.first().copied().unwrap_or(0.0);
    let jc = matrix.matvec(&c);
    let nc = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let njc = jc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(JacobianReport {
        rank: if top < JACOBIAN_NOISE_FLOOR { 0 } else { numerical_rank(&sigma, RANK_REL_TOL) },
        sigma_ratio: if top > 0.0 { sigma.get(4).copied().unwrap_or(0.0) / top } else { 0.0 },
        radial_residual: if top > 0.0 { njc / (top * nc) } else { 0.0 },
        trust_radius: trust_radius(&base),
        singular_values: sigma,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::to_regular_representative;
    use crate::sampling::random_field;

    #[test]
    fn rank_counts() {
        assert_eq!(numerical_rank(&[3.0, 1.0, 1e-7], 1e-6), 2);
        assert_eq!(numerical_rank(&[0.0, 0.0], 1e-6), 0);
    }

    #[test]
    fn generic_rank_is_five() {
        for seed in 0..3 {
            let (rep, _) = to_regular_representative(&random_field(seed, 2)).unwrap();
            let r = moduli_jacobian(&rep, 1e-6).unwrap();
            assert_eq!(r.rank, 5, "seed {seed}: {:?}", r.singular_values);
            assert!(r.radial_residual < 1e-6);
            // rows of the Jacobian sum to zero: Σν is constant
            for k in 0..6 {
                let s: C64 = r.matrix.column(k).iter().sum();
                assert!(s.norm() < 1e-6 * r.singular_values[0]);
            }
        }
    }

    #[test]
    fn separable_jacobian_vanishes() {
        // every characteristic ratio is ±1, where ν = r + 1/r is stationary
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let rep = RegularRep::from_coeffs(&[one, zero, -one, zero, one, -one]);
        let r = moduli_jacobian(&rep, 1e-6).unwrap();
        assert!(r.singular_values[0] < 1e-6);
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn step_halving_agrees() {
        let (rep, _) = to_regular_representative(&random_field(21, 2)).unwrap();
        let a = moduli_jacobian(&rep, 1e-5).unwrap();
        let b = moduli_jacobian(&rep, 5e-6).unwrap();
        let scale = a.matrix.frobenius_norm();
        for i in 0..7 {
            for k in 0..6 {
                assert!((a.matrix[(i, k)] - b.matrix[(i, k)]).norm() < 1e-4 * scale);
            }
        }
    }

    #[test]
    fn step_out_of_range() {
        let (rep, _) = to_regular_representative(&random_field(0, 2)).unwrap();
        assert!(matches!(moduli_jacobian(&rep, 1e-3), Err(Error::InvalidInput(_))));
    }
}
