use serde::Serialize;

use crate::error::{Error, Result};
use crate::foliation::{finite_singular_points, Location, SingPoint, VectorField, DEFAULT_TOL};
use crate::numkernel::{BiPoly, C64};

const COLLINEAR_TOL: f64 = 1e-10;
/// Relative tolerance for treating two anchor-triple determinants as tied.
const TIE_TOL: f64 = 1e-9;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Affine map `z -> m z + t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AffineMap {
    pub m: [[C64; 2]; 2],
    pub t: [C64; 2],
}

impl AffineMap {
    pub fn identity() -> AffineMap {
        let one = C64::new(1.0, 0.0);
        AffineMap {
            m: [[one, zero()], [zero(), one]],
            t: [zero(), zero()],
        }
    }

    pub fn apply(&self, z: [C64; 2]) -> [C64; 2] {
        [
            self.m[0][0] * z[0] + self.m[0][1] * z[1] + self.t[0],
            self.m[1][0] * z[0] + self.m[1][1] * z[1] + self.t[1],
        ]
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let det = self.det();
        if det.norm() == 0.0 {
            return Err(Error::InvalidInput("affine map is not invertible".into()));
        }
        let m = [
            [self.m[1][1] / det, -self.m[0][1] / det],
            [-self.m[1][0] / det, self.m[0][0] / det],
        ];
        let t = [
            -(m[0][0] * self.t[0] + m[0][1] * self.t[1]),
            -(m[1][0] * self.t[0] + m[1][1] * self.t[1]),
        ];
        Ok(AffineMap { m, t })
    }

    /// Largest entrywise deviation from the identity map.
    pub fn identity_deviation(&self) -> f64 {
        let id = AffineMap::identity();
        self.m
            .iter()
            .flatten()
            .zip(id.m.iter().flatten())
            .chain(self.t.iter().zip(id.t.iter()))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Quadratic field `P = Σ p_i e_i`, `Q = Σ q_i e_i` in the basis
/// `e1 = x(x+y-2)`, `e2 = y(x+y-2)`, `e3 = xy`, which vanish together at
/// `(0,0)`, `(2,0)` and `(0,2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegularRep {
    pub p: [C64; 3],
    pub q: [C64; 3],
    /// Index into [`RegularRep::coeffs`] of the coefficient scaled to 1, if normalized.
    pub pinned: Option<usize>,
}

impl RegularRep {
    pub fn from_coeffs(c: &[C64; 6]) -> RegularRep {
        RegularRep {
            p: [c[0], c[1], c[2]],
            q: [c[3], c[4], c[5]],
            pinned: None,
        }
    }

    /// `(p1, p2, p3, q1, q2, q3)`.
    pub fn coeffs(&self) -> [C64; 6] {
        [self.p[0], self.p[1], self.p[2], self.q[0], self.q[1], self.q[2]]
    }

    /// Scale so coefficient `pin` equals 1.
    pub fn normalized_with(&self, pin: usize) -> Result<RegularRep> {
        let c = self.coeffs();
        if c[pin].norm() == 0.0 {
            return Err(Error::InvalidInput(format!("coefficient {pin} is zero")));
        }
        let s = c[pin];
        let mut rep = RegularRep::from_coeffs(&c.map(|x| x / s));
        rep.pinned = Some(pin);
        Ok(rep)
    }

    /// Scale so the largest-magnitude coefficient (first on ties) equals 1.
    pub fn normalized(&self) -> Result<RegularRep> {
        let c = self.coeffs();
        let mut pin = 0;
        for k in 1..6 {
            if c[k].norm() > c[pin].norm() {
                pin = k;
            }
        }
        self.normalized_with(pin)
    }
}

/// Field of a regular representative.
pub fn from_regular(rep: &RegularRep) -> Result<VectorField> {
    let expand = |c: &[C64; 3]| {
        let two = C64::new(2.0, 0.0);
        // x^2, xy, y^2 and the linear terms -2x, -2y
        BiPoly::from_terms(&[
            (-two * c[0], 1, 0),
            (-two * c[1], 0, 1),
            (c[0], 2, 0),
            (c[0] + c[1] + c[2], 1, 1),
            (c[1], 0, 2),
        ])
        .with_degree(2)
        .expect("quadratic")
    };
    VectorField::new(expand(&rep.p), expand(&rep.q))
}

/// Coordinates of a quadratic polynomial vanishing at the three anchors, plus the size of the
/// part outside the span (constant and linear mismatch).
fn decompose(f: &BiPoly) -> ([C64; 3], f64) {
    let p1 = f.coeff(2, 0);
    let p2 = f.coeff(0, 2);
    let p3 = f.coeff(1, 1) - p1 - p2;
    let two = C64::new(2.0, 0.0);
    let off = f
        .coeff(0, 0)
        .norm()
        .max((f.coeff(1, 0) + two * p1).norm())
        .max((f.coeff(0, 1) + two * p2).norm());
    ([p1, p2, p3], off)
}

fn finite_xy(p: &SingPoint) -> [C64; 2] {
    match p.location {
        Location::Finite { x, y } => [x, y],
        Location::Infinite { .. } => unreachable!("finite point expected"),
    }
}

/// Regular representative of `v` with the ordered anchors sent to `(0,0)`, `(2,0)`, `(0,2)`.
///
/// Returns the normalized representative and the affine map used.
pub fn regular_from_anchors(v: &VectorField, anchors: [[C64; 2]; 3]) -> Result<(RegularRep, AffineMap)> {
    let [a0, a1, a2] = anchors;
    let e1 = [a1[0] - a0[0], a1[1] - a0[1]];
    let e2 = [a2[0] - a0[0], a2[1] - a0[1]];
    let det = e1[0] * e2[1] - e2[0] * e1[1];
    let size = [e1, e2].iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    if det.norm() <= COLLINEAR_TOL * size * size {
        return Err(Error::CollinearSingularities);
    }
    // M = 2 [e1 | e2]^{-1}
    let two = C64::new(2.0, 0.0);
    let m = [
        [two * e2[1] / det, -two * e2[0] / det],
        [-two * e1[1] / det, two * e1[0] / det],
    ];
    let t = [
        -(m[0][0] * a0[0] + m[0][1] * a0[1]),
        -(m[1][0] * a0[0] + m[1][1] * a0[1]),
    ];
    let map = AffineMap { m, t };
    if v.degree() != 2 {
        return Err(Error::DegreeOverflow(format!("quadratic field expected, got degree {}", v.degree())));
    }
    let w = v.affine_pushforward(m, t)?;
    let (p, off_p) = decompose(w.p());
    let (q, off_q) = decompose(w.q());
    let scale = w.p().max_abs().max(w.q().max_abs());
    if off_p.max(off_q) > 1e-6 * scale {
        return Err(Error::NoConvergence(format!(
            "anchors are not singular points (mismatch {:.3e})",
            off_p.max(off_q) / scale
        )));
    }
    let rep = RegularRep { p, q, pinned: None }.normalized()?;
    Ok((rep, map))
}

fn nondegenerate_finite(v: &VectorField) -> Result<Vec<[C64; 2]>> {
    let pts = finite_singular_points(v, DEFAULT_TOL)?;
    Ok(pts.iter().filter(|p| !p.is_degenerate()).map(finite_xy).collect())
}

fn lex_key(z: &[C64; 2]) -> [f64; 4] {
    [z[0].re, z[0].im, z[1].re, z[1].im]
}

fn lex_cmp(a: &[C64; 2], b: &[C64; 2]) -> std::cmp::Ordering {
    let (ka, kb) = (lex_key(a), lex_key(b));
    ka.iter()
        .zip(kb.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn triangle_det(a: &[C64; 2], b: &[C64; 2], c: &[C64; 2]) -> C64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
}

/// Canonical regular representative of a quadratic field.
///
/// The anchor triple is the set of three nondegenerate finite singular points with the largest
/// triangle area (ties within a relative `1e-9` go to the lexicographically first triple). Within
/// the triple the lexicographically smallest point goes to `(0,0)`, the largest to `(2,0)` and
/// the middle one to `(0,2)`.
pub fn to_regular_representative(v: &VectorField) -> Result<(RegularRep, AffineMap)> {
    let mut pts = nondegenerate_finite(v)?;
    if pts.len() < 3 {
        return Err(Error::TooFewFiniteSingularities(pts.len()));
    }
    pts.sort_by(lex_cmp);
    let mut best: Option<((usize, usize, usize), f64)> = None;
    let mut diameter: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = ((pts[i][0] - pts[j][0]).norm_sqr() + (pts[i][1] - pts[j][1]).norm_sqr()).sqrt();
            diameter = diameter.max(d);
            for k in j + 1..pts.len() {
                let area = triangle_det(&pts[i], &pts[j], &pts[k]).norm();
                match best {
                    Some((_, a)) if area <= a * (1.0 + TIE_TOL) => {}
                    _ => best = Some(((i, j, k), area)),
                }
            }
        }
    }
    let ((i, j, k), area) = best.expect("at least one triple");
    if area <= COLLINEAR_TOL * diameter * diameter {
        return Err(Error::CollinearSingularities);
    }
    regular_from_anchors(v, [pts[i], pts[k], pts[j]])
}

/// Projective distance `sqrt(1 - |<a,b>|^2 / (|a|^2 |b|^2))` between coefficient vectors.
pub fn projective_distance(a: &[C64], b: &[C64]) -> f64 {
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    (1.0 - ip.norm_sqr() / (na * nb)).max(0.0).sqrt()
}

/// Regular representatives of the same field for every ordered triple of nondegenerate finite
/// singular points, as unit-norm coefficient vectors.
pub fn rep_orbit(rep: &RegularRep) -> Result<Vec<[C64; 6]>> {
    let v = from_regular(rep)?;
    let pts = nondegenerate_finite(&v)?;
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            for k in 0..pts.len() {
                if i == j || j == k || i == k {
                    continue;
                }
                match regular_from_anchors(&v, [pts[i], pts[j], pts[k]]) {
                    Ok((r, _)) => {
                        let c = r.coeffs();
                        let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                        out.push(c.map(|z| z / n));
                    }
                    Err(Error::CollinearSingularities) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::moduli_vector;
    use crate::sampling::random_field;

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
    fn basis_vanishes_at_anchors() {
        let rep = RegularRep::from_coeffs(&[c(0.3), C64::new(1.0, -2.0), c(0.7), c(-1.1), c(0.2), C64::new(0.0, 0.4)]);
        let v = from_regular(&rep).unwrap();
        for (x, y) in [(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)] {
            let (p, q) = v.eval(c(x), c(y));
            assert!(p.norm() < 1e-14 && q.norm() < 1e-14);
        }
    }

    #[test]
    fn separable_is_its_own_representative() {
        let (rep, map) = to_regular_representative(&separable()).unwrap();
        assert!(map.identity_deviation() < 1e-14);
        // x^2 - 2x = e1 - e3, y^2 - 2y = e2 - e3
        let want = [c(1.0), c(0.0), c(-1.0), c(0.0), c(1.0), c(-1.0)];
        for (g, w) in rep.coeffs().iter().zip(want) {
            assert!((g - w).norm() < 1e-12);
        }
        assert_eq!(rep.pinned, Some(0));
    }

    #[test]
    fn representative_preserves_moduli() {
        for seed in 0..5 {
            let v = random_field(100 + seed, 2);
            let (rep, _) = to_regular_representative(&v).unwrap();
            let a = moduli_vector(&v).unwrap();
            let b = moduli_vector(&from_regular(&rep).unwrap()).unwrap();
            assert!(a.split_distance(&b) < 1e-8, "seed {seed}");
        }
    }

    #[test]
    fn representative_is_affine_invariant() {
        let v = random_field(7, 2);
        let m = [[C64::new(1.2, 0.3), c(-0.5)], [c(0.4), C64::new(0.0, 1.1)]];
        let w = v.affine_pushforward(m, [c(0.3), C64::new(-1.0, 0.2)]).unwrap().scaled(C64::new(2.0, -1.0));
        let (r1, _) = to_regular_representative(&v).unwrap();
        let (r2, _) = to_regular_representative(&w).unwrap();
        let orbit = rep_orbit(&r1).unwrap();
        assert_eq!(orbit.len(), 24);
        let d = orbit
            .iter()
            .map(|o| projective_distance(o, &r2.coeffs()))
            .fold(f64::INFINITY, f64::min);
        assert!(d < 1e-8, "{d}");
    }

    #[test]
    fn collinear_singularities_rejected() {
        // P = y, Q = x(x-1)(x-2): three finite points on y = 0
        let v = VectorField::new(
            BiPoly::from_real_terms(&[(1.0, 0, 1)]),
            BiPoly::from_real_terms(&[(1.0, 3, 0), (-3.0, 2, 0), (2.0, 1, 0)]),
        )
        .unwrap();
        assert_eq!(to_regular_representative(&v).unwrap_err(), Error::CollinearSingularities);
    }

    #[test]
    fn too_few_finite_points() {
        // P = x, Q = y + x^2: a single finite singular point
        let v = VectorField::new(
            BiPoly::from_real_terms(&[(1.0, 1, 0)]).with_degree(2).unwrap(),
            BiPoly::from_real_terms(&[(1.0, 0, 1), (1.0, 2, 0)]),
        )
        .unwrap();
        assert!(matches!(
            to_regular_representative(&v),
            Err(Error::TooFewFiniteSingularities(n)) if n < 3
        ));
    }

    #[test]
    fn affine_inverse_round_trip() {
        let a = AffineMap {
            m: [[c(2.0), c(1.0)], [C64::new(0.0, 1.0), c(3.0)]],
            t: [c(1.0), c(-2.0)],
        };
        let z = [C64::new(0.3, 0.1), c(-0.7)];
        let back = a.inverse().unwrap().apply(a.apply(z));
        assert!((back[0] - z[0]).norm() < 1e-14 && (back[1] - z[1]).norm() < 1e-14);
    }
}
