use serde::Serialize;

use super::jacobian::{moduli_jacobian, track_nu, trust_radius};
use super::regular::{regular_from_anchors, to_regular_representative, RegularRep};
use super::ModuliVector;
use crate::error::{Error, Result};
use crate::foliation::{
    darboux_two_factor, finite_singular_points, singular_points, Location, VectorField, DEFAULT_TOL,
};
use crate::numkernel::{BiPoly, C64};

/// Step in `k` for the derivative along the family.
const K_STEP: f64 = 1e-5;
const JACOBIAN_STEP: f64 = 1e-6;

/// Member `k` of the family with first integral `(xy + x + y)(x - k y)^α`.
pub fn darboux_family_member(k: C64, alpha: C64) -> Result<VectorField> {
    let one = C64::new(1.0, 0.0);
    let f = BiPoly::from_terms(&[(one, 1, 1), (one, 1, 0), (one, 0, 1)]);
    let g = BiPoly::from_terms(&[(one, 1, 0), (-k, 0, 1)]);
    darboux_two_factor(&f, &g, alpha)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanMember {
    pub k: C64,
    pub rep: Option<RegularRep>,
    pub moduli: Option<ModuliVector>,
    pub rank: Option<usize>,
    pub singular_values: Option<Vec<f64>>,
    /// `|J dc/dk| / (σ_1 |dc/dk|)` with `c(k)` the tracked regular representative.
    pub k_direction_residual: Option<f64>,
    /// `|dν/dk|` with labels tracked along the family.
    pub nu_k_derivative: Option<f64>,
    /// Error code when the member was skipped.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub alpha: C64,
    pub members: Vec<ScanMember>,
    /// Largest split-block distance between the moduli of any two successful members.
    pub max_split_distance: f64,
    /// Same with the seven values matched as one multiset.
    pub max_joint_distance: f64,
    pub skipped: usize,
}

fn anchor_points(v: &VectorField) -> Result<Vec<[C64; 2]>> {
    Ok(finite_singular_points(v, DEFAULT_TOL)?
        .iter()
        .filter(|p| !p.is_degenerate())
        .filter_map(|p| match p.location {
            Location::Finite { x, y } => Some([x, y]),
            Location::Infinite { .. } => None,
        })
        .collect())
}

fn nearest(points: &[[C64; 2]], z: [C64; 2]) -> Option<[C64; 2]> {
    points
        .iter()
        .min_by(|a, b| {
            let da = (a[0] - z[0]).norm_sqr() + (a[1] - z[1]).norm_sqr();
            let db = (b[0] - z[0]).norm_sqr() + (b[1] - z[1]).norm_sqr();
            da.total_cmp(&db)
        })
        .copied()
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn scan_member(k: C64, alpha: C64) -> Result<ScanMember> {
    let v = darboux_family_member(k, alpha)?;
    let set = singular_points(&v, DEFAULT_TOL)?;
    let moduli = ModuliVector::from_set(&set)?;
    let (rep, map) = to_regular_representative(&v)?;
    let pin = rep.pinned.expect("normalized");
    let inv = map.inverse()?;
    let two = C64::new(2.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let anchors = [[zero, zero], [two, zero], [zero, two]].map(|z| inv.apply(z));

    let report = moduli_jacobian(&rep, JACOBIAN_STEP)?;

    // representative and labeled moduli along the family, anchors followed by proximity
    let radius = trust_radius(&set);
    let shifted = |sign: f64| -> Result<([C64; 6], Vec<C64>)> {
        let w = darboux_family_member(k + sign * K_STEP, alpha)?;
        let pts = anchor_points(&w)?;
        let mut moved = [[zero; 2]; 3];
        for (slot, a) in moved.iter_mut().zip(anchors) {
            *slot = nearest(&pts, a).ok_or(Error::TooFewFiniteSingularities(0))?;
        }
        let (r, _) = regular_from_anchors(&w, moved)?;
        let nu = track_nu(&set, &singular_points(&w, DEFAULT_TOL)?, radius)?;
        Ok((r.normalized_with(pin)?.coeffs(), nu))
    };
    let (cp, nup) = shifted(1.0)?;
    let (cm, num) = shifted(-1.0)?;
    let dc: Vec<C64> = cp.iter().zip(&cm).map(|(p, m)| (p - m) / (2.0 * K_STEP)).collect();
    let dnu: Vec<C64> = nup.iter().zip(&num).map(|(p, m)| (p - m) / (2.0 * K_STEP)).collect();
    let image = report.matrix.matvec(&dc);
    let top = report.singular_values[0];
    let k_direction_residual = if norm(&dc) > 0.0 { norm(&image) / (top * norm(&dc)) } else { 0.0 };

    Ok(ScanMember {
        k,
        rep: Some(rep),
        moduli: Some(moduli),
        rank: Some(report.rank),
        singular_values: Some(report.singular_values),
        k_direction_residual: Some(k_direction_residual),
        nu_k_derivative: Some(norm(&dnu)),
        error: None,
    })
}

/// Moduli, Jacobian rank and derivative along the family for each `k`, with per-member errors
/// logged rather than propagated.
pub fn darboux_family_scan(alpha: C64, ks: &[C64]) -> Result<ScanReport> {
    if alpha.norm() == 0.0 {
        return Err(Error::InvalidInput("exponent must be nonzero".into()));
    }
    let members: Vec<ScanMember> = ks
        .iter()
        .map(|&k| {
            scan_member(k, alpha).unwrap_or_else(|e| ScanMember {
                k,
                rep: None,
                moduli: None,
                rank: None,
                singular_values: None,
                k_direction_residual: None,
                nu_k_derivative: None,
                error: Some(e.code().to_string()),
            })
        })
        .collect();
    let ok: Vec<&ModuliVector> = members.iter().filter_map(|m| m.moduli.as_ref()).collect();
    let mut max_split: f64 = 0.0;
    let mut max_joint: f64 = 0.0;
    for i in 0..ok.len() {
        for j in i + 1..ok.len() {
            max_split = max_split.max(ok[i].split_distance(ok[j]));
            max_joint = max_joint.max(ok[i].joint_distance(ok[j]));
        }
    }
    Ok(ScanReport {
        alpha,
        skipped: members.iter().filter(|m| m.error.is_some()).count(),
        members,
        max_split_distance: max_split,
        max_joint_distance: max_joint,
    })
}
