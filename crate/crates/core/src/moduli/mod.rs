//! The moduli (Baum–Bott) map of quadratic fields and its derivative.
//!
//! A quadratic field is reduced to its regular representative, a six-coefficient chart on the
//! quotient by affine maps and scaling with three finite singular points pinned at
//! `(0,0)`, `(2,0)` and `(0,2)`. The moduli vector collects the Baum–Bott indices of the seven
//! singular points.

mod fiber;
mod jacobian;
mod regular;
mod scan;

pub use fiber::{fiber_search, FiberReport, FiberSearchConfig, FiberSolution};
pub use jacobian::{
    labeled_jacobian, moduli_jacobian, numerical_rank, track_nu, trust_radius, JacobianReport,
    JACOBIAN_NOISE_FLOOR, RANK_REL_TOL,
};
pub use regular::{
    from_regular, projective_distance, regular_from_anchors, rep_orbit, to_regular_representative,
    AffineMap, RegularRep,
};
pub use scan::{darboux_family_member, darboux_family_scan, ScanMember, ScanReport};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::foliation::{singular_points, Location, SingSet, VectorField, DEFAULT_TOL};
use crate::numkernel::C64;

/// Identity of a singular point within a [`SingSet`]: position in its block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointLabel {
    Infinite(usize),
    Finite(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabeledNu {
    pub label: PointLabel,
    pub location: Location,
    pub nu: C64,
}

/// Baum–Bott indices of all singular points, labeled and in canonical sorted form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModuliVector {
    /// Infinite points first, then finite, in [`SingSet`] order.
    pub labeled: Vec<LabeledNu>,
    /// Infinite block sorted by (Re, Im).
    pub infinite: Vec<C64>,
    /// Finite block sorted by (Re, Im).
    pub finite: Vec<C64>,
    /// Characteristic ratios `λ/μ` at infinity, in label order; they sum to 1.
    pub infinite_ratios: Vec<C64>,
}

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

impl ModuliVector {
    pub fn from_set(set: &SingSet) -> Result<ModuliVector> {
        set.require_generic_count()?;
        set.require_nondegenerate()?;
        let mut labeled = Vec::with_capacity(set.len());
        for (i, p) in set.infinite.iter().enumerate() {
            labeled.push(LabeledNu {
                label: PointLabel::Infinite(i),
                location: p.location,
                nu: p.nu.unwrap(),
            });
        }
        for (i, p) in set.finite.iter().enumerate() {
            labeled.push(LabeledNu {
                label: PointLabel::Finite(i),
                location: p.location,
                nu: p.nu.unwrap(),
            });
        }
        Ok(ModuliVector {
            labeled,
            infinite: sorted(set.infinite.iter().map(|p| p.nu.unwrap()).collect()),
            finite: sorted(set.finite.iter().map(|p| p.nu.unwrap()).collect()),
            infinite_ratios: set.infinite.iter().map(|p| p.char_ratio.unwrap()).collect(),
        })
    }

    /// Labeled values in label order.
    pub fn values(&self) -> Vec<C64> {
        self.labeled.iter().map(|l| l.nu).collect()
    }

    /// Canonical form: sorted infinite block followed by sorted finite block.
    pub fn canonical(&self) -> Vec<C64> {
        self.infinite.iter().chain(&self.finite).copied().collect()
    }

    pub fn sum(&self) -> C64 {
        self.values().iter().sum()
    }

    /// Bottleneck distance with blocks matched separately (infinite to infinite, finite to finite).
    pub fn split_distance(&self, other: &ModuliVector) -> f64 {
        bottleneck_distance(&self.infinite, &other.infinite)
            .max(bottleneck_distance(&self.finite, &other.finite))
    }

    /// Bottleneck distance between the two vectors as single multisets.
    pub fn joint_distance(&self, other: &ModuliVector) -> f64 {
        bottleneck_distance(&self.canonical(), &other.canonical())
    }

    /// Copy with `delta` added to the canonical entries, for building off-image targets.
    pub fn shifted(&self, delta: &[C64]) -> ModuliVector {
        let mut out = self.clone();
        let ni = out.infinite.len();
        for (k, d) in delta.iter().enumerate() {
            if k < ni {
                out.infinite[k] += d;
            } else if k - ni < out.finite.len() {
                out.finite[k - ni] += d;
            }
        }
        out
    }
}

/// Moduli vector of a field with the generic number of nondegenerate singular points.
pub fn moduli_vector(v: &VectorField) -> Result<ModuliVector> {
    ModuliVector::from_set(&singular_points(v, DEFAULT_TOL)?)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Permutation `π` minimizing `Σ |a_i - b_π(i)|^2`; brute force, for blocks of at most 8.
pub fn min_cost_assignment(a: &[C64], b: &[C64]) -> Vec<usize> {
    assert_eq!(a.len(), b.len());
    permutations(a.len())
        .into_iter()
        .min_by(|p, q| {
            let cost = |perm: &Vec<usize>| -> f64 {
                perm.iter().enumerate().map(|(i, &j)| (a[i] - b[j]).norm_sqr()).sum()
            };
            cost(p).total_cmp(&cost(q))
        })
        .unwrap_or_default()
}

/// `min_π max_i |a_i - b_π(i)|`; infinite when the lengths differ.
pub fn bottleneck_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    permutations(a.len())
        .into_iter()
        .map(|perm| {
            perm.iter()
                .enumerate()
                .map(|(i, &j)| (a[i] - b[j]).norm())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Dimension bookkeeping for degree `n`: the quotient space, the bound on the image, and the gap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionReport {
    pub source: i64,
    pub target_bound: i64,
    pub gap: i64,
}

pub fn dimension_report(n: usize) -> Result<DimensionReport> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("degree must be at least 2, got {n}")));
    }
    let n = n as i64;
    Ok(DimensionReport {
        source: (n + 1) * (n + 2) - 7,
        target_bound: n * n + n - 1,
        gap: 2 * n - 4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::BiPoly;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn separable() -> VectorField {
        VectorField::new(
            BiPoly::from_real_terms(&[(1.0, 2, 0), (-2.0, 1, 0)]),
            BiPoly::from_real_terms(&[(1.0, 0, 2), (-2.0, 0, 1)]),
        )
        .unwrap()
    }

    #[test]
    fn separable_moduli_vector() {
        let m = moduli_vector(&separable()).unwrap();
        for (got, want) in m.infinite.iter().zip([-2.0, 2.0, 2.0]) {
            assert!((got - c(want)).norm() < 1e-12);
        }
        for (got, want) in m.finite.iter().zip([-2.0, -2.0, 2.0, 2.0]) {
            assert!((got - c(want)).norm() < 1e-12);
        }
    }

    #[test]
    fn scaling_leaves_moduli_unchanged() {
        let v = crate::sampling::random_field(5, 2);
        let a = moduli_vector(&v).unwrap();
        let b = moduli_vector(&v.scaled(C64::new(-0.3, 2.0))).unwrap();
        assert!(a.split_distance(&b) < 1e-10);
        let ratio_sum: C64 = a.infinite_ratios.iter().sum();
        assert!((ratio_sum - 1.0).norm() < 1e-8);
    }

    #[test]
    fn dimension_examples() {
        let d = |n| dimension_report(n).unwrap();
        assert_eq!(d(2), DimensionReport { source: 5, target_bound: 5, gap: 0 });
        assert_eq!(d(3), DimensionReport { source: 13, target_bound: 11, gap: 2 });
        assert_eq!(d(4), DimensionReport { source: 23, target_bound: 19, gap: 4 });
        assert!(dimension_report(1).is_err());
    }

    #[test]
    fn bottleneck_matches_permuted_copies() {
        let a = [c(1.0), C64::new(0.0, 2.0), c(-3.0)];
        let b = [c(-3.0), c(1.0), C64::new(0.0, 2.0)];
        assert_eq!(bottleneck_distance(&a, &b), 0.0);
        assert_eq!(min_cost_assignment(&a, &b), vec![1, 2, 0]);
        assert_eq!(bottleneck_distance(&a, &b[..2]), f64::INFINITY);
    }
}
