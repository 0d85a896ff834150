use serde::Serialize;

use super::{VectorField, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::numkernel::{
    eig2, newton_polish, resultant_eliminate, roots_univariate, BiPoly, CMatrix, UniPoly, Var, C64,
    DROP_TOL,
};

/// Affine chart covering a neighbourhood of the line at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InfinityChart {
    /// `(u, v) = (1/x, y/x)`; misses the direction `[0:1]`.
    X,
    /// `(s, w) = (1/y, x/y)`; used only for the direction `[0:1]`.
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Location {
    Finite { x: C64, y: C64 },
    /// Point `(0, coord)` of the given infinity chart.
    Infinite { chart: InfinityChart, coord: C64 },
}

impl Location {
    /// Unit-norm homogeneous direction `[x : y]` of a point at infinity.
    pub fn direction(&self) -> Option<[C64; 2]> {
        let one = C64::new(1.0, 0.0);
        let d = match *self {
            Location::Finite { .. } => return None,
            Location::Infinite { chart: InfinityChart::X, coord } => [one, coord],
            Location::Infinite { chart: InfinityChart::Y, coord } => [coord, one],
        };
        let n = (d[0].norm_sqr() + d[1].norm_sqr()).sqrt();
        Some([d[0] / n, d[1] / n])
    }

    /// Distance between two locations of the same kind: Euclidean for finite points,
    /// chordal `|x1 y2 - x2 y1|` between unit directions at infinity. Mixed kinds are infinitely far.
    pub fn distance(&self, other: &Location) -> f64 {
        match (self, other) {
            (Location::Finite { x: a, y: b }, Location::Finite { x: c, y: d }) => {
                ((a - c).norm_sqr() + (b - d).norm_sqr()).sqrt()
            }
            (Location::Infinite { .. }, Location::Infinite { .. }) => {
                let (p, q) = (self.direction().unwrap(), other.direction().unwrap());
                (p[0] * q[1] - p[1] * q[0]).norm()
            }
            _ => f64::INFINITY,
        }
    }
}

/// One singular point of the extended foliation.
///
/// `jacobian` is the linearization in the chart where the point is finite. For points at infinity
/// it is triangular in the `(u, v)` chart, `lambda = dU/du` is transverse and `mu = dV/dv` is the
/// eigenvalue tangent to the line at infinity. For finite points `(lambda, mu)` are sorted by
/// (Re, Im). `nu` and `char_ratio` are `None` on degenerate points.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingPoint {
    pub location: Location,
    pub jacobian: CMatrix,
    pub lambda: C64,
    pub mu: C64,
    pub char_ratio: Option<C64>,
    pub nu: Option<C64>,
    pub residual: f64,
}

impl Serialize for CMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[C64]> = (0..self.rows()).map(|i| self.row(i)).collect();
        rows.serialize(s)
    }
}

impl SingPoint {
    fn new(location: Location, jacobian: CMatrix, lambda: C64, mu: C64, residual: f64) -> Self {
        let nu = nu_index(&jacobian, DEGENERACY_TOL).ok();
        let char_ratio = nu.map(|_| lambda / mu);
        SingPoint {
            location,
            jacobian,
            lambda,
            mu,
            char_ratio,
            nu,
            residual,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.nu.is_none()
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.location, Location::Infinite { .. })
    }
}

/// All singular points of a field: infinite points first (by `v = y/x`, `[0:1]` last), then finite
/// points in lexicographic order of `(Re x, Im x, Re y, Im y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingSet {
    pub finite: Vec<SingPoint>,
    pub infinite: Vec<SingPoint>,
    /// Expected count `n^2 + n + 1` for the field's degree.
    pub expected: usize,
    pub degree: usize,
}

impl SingSet {
    pub fn iter(&self) -> impl Iterator<Item = &SingPoint> {
        self.infinite.iter().chain(self.finite.iter())
    }

    pub fn len(&self) -> usize {
        self.finite.len() + self.infinite.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fails unless there are exactly `n^2` finite and `n + 1` infinite points.
    pub fn require_generic_count(&self) -> Result<()> {
        let n = self.degree;
        if self.finite.len() != n * n || self.infinite.len() != n + 1 {
            return Err(Error::SingularCountMismatch {
                expected: self.expected,
                found: self.len(),
            });
        }
        Ok(())
    }

    pub fn require_nondegenerate(&self) -> Result<()> {
        match self.iter().find(|p| p.is_degenerate()) {
            Some(p) => Err(Error::DegenerateSingularity(format!("{:?}", p.location))),
            None => Ok(()),
        }
    }
}

/// Baum–Bott index `tr(J)^2 / det(J) - 2 = λ/μ + μ/λ`.
pub fn nu_index(j: &CMatrix, tol: f64) -> Result<C64> {
    assert!(j.rows() == 2 && j.cols() == 2, "nu_index needs a 2x2 matrix");
    let det = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)];
    let fro = j.frobenius_norm();
    if det.norm() < tol * fro * fro || det.norm() == 0.0 {
        return Err(Error::DegenerateSingularity(format!(
            "|det J| = {:.3e} against |J|^2 = {:.3e}",
            det.norm(),
            fro * fro
        )));
    }
    let tr = j.trace();
    Ok(tr * tr / det - 2.0)
}

fn lex4(a: &(C64, C64), b: &(C64, C64)) -> std::cmp::Ordering {
    a.0.re
        .total_cmp(&b.0.re)
        .then(a.0.im.total_cmp(&b.0.im))
        .then(a.1.re.total_cmp(&b.1.re))
        .then(a.1.im.total_cmp(&b.1.im))
}

/// Isolated common zeros of `P` and `Q` in the affine chart.
///
/// The x- and y-coordinates come from the two resultants; every pairing is Newton-polished and
/// the converged, distinct solutions are kept. `tol` bounds the residual `|(P, Q)|` relative to
/// `max|coeff| * max(1, |x|, |y|)^n`.
pub fn finite_singular_points(v: &VectorField, tol: f64) -> Result<Vec<SingPoint>> {
    let (p, q) = (v.p(), v.q());
    if p.is_zero() || q.is_zero() {
        return Err(Error::NonIsolatedSingularities);
    }
    let elim = |var| match resultant_eliminate(p, q, var) {
        Err(Error::IdenticallyZeroResultant) | Err(Error::ZeroPolynomial) => {
            Err(Error::NonIsolatedSingularities)
        }
        other => other,
    };
    let rx = elim(Var::Y)?;
    let ry = elim(Var::X)?;
    let xs = roots_univariate(&rx, 1e-10)?;
    let ys = roots_univariate(&ry, 1e-10)?;

    let coeff_scale = p.max_abs().max(q.max_abs());
    let n = v.degree() as i32;
    let scale_at = |x: C64, y: C64| coeff_scale * x.norm().max(y.norm()).max(1.0).powi(n);
    let residual = |x: C64, y: C64| (p.eval(x, y).norm_sqr() + q.eval(x, y).norm_sqr()).sqrt();

    let mut candidates: Vec<(f64, C64, C64)> = xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .map(|(x, y)| (residual(x, y) / scale_at(x, y), x, y))
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut found: Vec<(C64, C64, f64)> = Vec::new();
    let max_points = rx.degree().unwrap_or(0).max(ry.degree().unwrap_or(0));
    for &(r0, x0, y0) in &candidates {
        if found.len() >= max_points {
            break;
        }
        let polished = match newton_polish((p, q), (x0, y0), tol * scale_at(x0, y0)) {
            Ok(s) => Some((s.x, s.y, s.residual)),
            // degenerate roots stall Newton; keep the resultant pairing if it already solves
            Err(_) if r0 <= tol => Some((x0, y0, residual(x0, y0))),
            Err(_) => None,
        };
        let Some((x, y, r)) = polished else { continue };
        if r > tol * scale_at(x, y) {
            continue;
        }
        let dup = found.iter().any(|&(fx, fy, _)| {
            let d = ((fx - x).norm_sqr() + (fy - y).norm_sqr()).sqrt();
            d <= 1e-6 * (1.0 + x.norm().max(y.norm()))
        });
        if !dup {
            found.push((x, y, r));
        }
    }

    let mut pts: Vec<(C64, C64, f64)> = found;
    pts.sort_by(|a, b| lex4(&(a.0, a.1), &(b.0, b.1)));
    Ok(pts
        .into_iter()
        .map(|(x, y, r)| {
            let j = v.jacobian(x, y);
            let (lambda, mu) = eig2(&j);
            SingPoint::new(Location::Finite { x, y }, j, lambda, mu, r)
        })
        .collect())
}

/// The field in the chart `(u, v) = (1/x, y/x)`, multiplied by `u^(n-1)`:
/// `U = -u P*`, `V = Q* - v P*` with `P*(u, v) = u^n P(1/u, v/u)`.
pub fn infinity_chart_field(v: &VectorField) -> Result<(BiPoly, BiPoly)> {
    let h = UniPoly::new(v.top_binary_form());
    let top_scale = v
        .p()
        .homogeneous_part(v.degree())
        .iter()
        .chain(v.q().homogeneous_part(v.degree()).iter())
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if h.max_abs() <= DROP_TOL * top_scale {
        return Err(Error::DicriticalAtInfinity);
    }
    let n = v.degree();
    let star = |b: &BiPoly| {
        let mut terms = Vec::new();
        for i in 0..=n {
            for j in 0..=n - i {
                let c = b.coeff(i, j);
                if c != C64::new(0.0, 0.0) {
                    terms.push((c, n - i - j, j));
                }
            }
        }
        BiPoly::from_terms(&terms)
    };
    let ps = star(v.p());
    let qs = star(v.q());
    let big_u = BiPoly::x().mul(&ps).neg();
    let big_v = qs.sub(&BiPoly::y().mul(&ps));
    Ok((
        big_u.with_degree(n + 1).expect("degree n+1"),
        big_v.with_degree(n + 1).expect("degree n+1"),
    ))
}

fn chart_jacobian(u: &BiPoly, v: &BiPoly, a: C64, b: C64) -> CMatrix {
    CMatrix::from_2x2(u.dx().eval(a, b), u.dy().eval(a, b), v.dx().eval(a, b), v.dy().eval(a, b))
}

/// Singular points on the line at infinity.
///
/// Roots of `h(1, v)` give the points `(0, v_j)` of the `(u, v)` chart; a degree drop of `h(1, ·)`
/// puts a point at `[0:1]`, which is handled in the chart `(1/y, x/y)`.
pub fn infinite_singular_points(v: &VectorField, tol: f64) -> Result<Vec<SingPoint>> {
    let (cu, cv) = infinity_chart_field(v)?;
    let h = UniPoly::new(v.top_binary_form());
    let n = v.degree();
    let dh = h.derivative();
    let mut roots = roots_univariate(&h, tol.max(1e-12))?;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out: Vec<SingPoint> = roots
        .into_iter()
        .map(|vj| {
            let j = chart_jacobian(&cu, &cv, C64::new(0.0, 0.0), vj);
            let lambda = j[(0, 0)];
            let mu = dh.eval(vj);
            SingPoint::new(
                Location::Infinite { chart: InfinityChart::X, coord: vj },
                j,
                lambda,
                mu,
                h.eval(vj).norm(),
            )
        })
        .collect();
    if h.degree().unwrap_or(0) < n + 1 {
        let (su, sv) = infinity_chart_field(&v.swapped())?;
        let zero = C64::new(0.0, 0.0);
        let j = chart_jacobian(&su, &sv, zero, zero);
        let residual = sv.eval(zero, zero).norm();
        let (lambda, mu) = (j[(0, 0)], j[(1, 1)]);
        out.push(SingPoint::new(
            Location::Infinite { chart: InfinityChart::Y, coord: zero },
            j,
            lambda,
            mu,
            residual,
        ));
    }
    Ok(out)
}

/// Finite and infinite singular points together.
pub fn singular_points(v: &VectorField, tol: f64) -> Result<SingSet> {
    let infinite = infinite_singular_points(v, tol)?;
    let finite = finite_singular_points(v, tol)?;
    Ok(SingSet {
        finite,
        infinite,
        expected: v.generic_point_count(),
        degree: v.degree(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{three_line_field, DEFAULT_TOL};

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

    fn coords(p: &SingPoint) -> (C64, C64) {
        match p.location {
            Location::Finite { x, y } => (x, y),
            _ => panic!("not finite"),
        }
    }

    #[test]
    fn separable_finite_points() {
        let pts = finite_singular_points(&separable(), DEFAULT_TOL).unwrap();
        let want = [(0.0, 0.0), (0.0, 2.0), (2.0, 0.0), (2.0, 2.0)];
        assert_eq!(pts.len(), 4);
        for (p, w) in pts.iter().zip(want) {
            let (x, y) = coords(p);
            assert!((x - c(w.0)).norm() < 1e-12 && (y - c(w.1)).norm() < 1e-12);
        }
        let nus: Vec<f64> = pts.iter().map(|p| p.nu.unwrap().re).collect();
        assert_eq!(nus, vec![2.0, -2.0, -2.0, 2.0]);
    }

    #[test]
    fn three_line_finite_points() {
        let v = three_line_field(c(1.0), c(1.0), c(1.0));
        let pts = finite_singular_points(&v, DEFAULT_TOL).unwrap();
        let want = [(0.0, 0.0), (0.0, 1.0), (1.0 / 3.0, 1.0 / 3.0), (1.0, 0.0)];
        assert_eq!(pts.len(), 4);
        for (p, w) in pts.iter().zip(want) {
            let (x, y) = coords(p);
            assert!((x - c(w.0)).norm() < 1e-12 && (y - c(w.1)).norm() < 1e-12, "{pts:?}");
        }
        let at_10 = &pts[3];
        assert!((at_10.jacobian[(0, 0)] - c(1.0)).norm() < 1e-12);
        assert!((at_10.jacobian[(0, 1)] - c(2.0)).norm() < 1e-12);
        assert!(at_10.jacobian[(1, 0)].norm() < 1e-12);
        assert!((at_10.jacobian[(1, 1)] - c(-1.0)).norm() < 1e-12);
        assert!((at_10.lambda - c(-1.0)).norm() < 1e-12 && (at_10.mu - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn common_factor_is_non_isolated() {
        // (x(x+y), y(x+y))
        let v = VectorField::new(
            BiPoly::from_real_terms(&[(1.0, 2, 0), (1.0, 1, 1)]),
            BiPoly::from_real_terms(&[(1.0, 1, 1), (1.0, 0, 2)]),
        )
        .unwrap();
        assert_eq!(finite_singular_points(&v, DEFAULT_TOL), Err(Error::NonIsolatedSingularities));
        assert_eq!(infinity_chart_field(&v), Err(Error::DicriticalAtInfinity));
        assert_eq!(infinite_singular_points(&v, DEFAULT_TOL), Err(Error::DicriticalAtInfinity));
    }

    #[test]
    fn separable_chart_field() {
        let (u, v) = infinity_chart_field(&separable()).unwrap();
        // U = -u + 2u^2, V = v^2 - v
        let want_u = BiPoly::from_real_terms(&[(-1.0, 1, 0), (2.0, 2, 0)]).with_degree(3).unwrap();
        let want_v = BiPoly::from_real_terms(&[(1.0, 0, 2), (-1.0, 0, 1)]).with_degree(3).unwrap();
        assert_eq!(u, want_u);
        assert_eq!(v, want_v);
    }

    #[test]
    fn separable_infinite_points() {
        let pts = infinite_singular_points(&separable(), DEFAULT_TOL).unwrap();
        assert_eq!(pts.len(), 3);
        let ratios: Vec<f64> = pts.iter().map(|p| p.char_ratio.unwrap().re).collect();
        let nus: Vec<f64> = pts.iter().map(|p| p.nu.unwrap().re).collect();
        for (r, w) in ratios.iter().zip([1.0, -1.0, 1.0]) {
            assert!((r - w).abs() < 1e-12, "{ratios:?}");
        }
        for (r, w) in nus.iter().zip([2.0, -2.0, 2.0]) {
            assert!((r - w).abs() < 1e-12, "{nus:?}");
        }
        let dirs: Vec<Location> = pts.iter().map(|p| p.location).collect();
        assert_eq!(dirs[0], Location::Infinite { chart: InfinityChart::X, coord: c(0.0) });
        assert_eq!(dirs[2], Location::Infinite { chart: InfinityChart::Y, coord: c(0.0) });
    }

    #[test]
    fn three_line_ratio_at_horizontal_direction() {
        let (a, b, cc) = (c(0.7), C64::new(1.3, 0.4), c(-0.2));
        let v = three_line_field(a, b, cc);
        let pts = infinite_singular_points(&v, DEFAULT_TOL).unwrap();
        assert_eq!(pts.len(), 3);
        // directions [1:-1], [1:0], [0:1]
        let at_10 = pts
            .iter()
            .find(|p| p.location.distance(&Location::Infinite { chart: InfinityChart::X, coord: c(0.0) }) < 1e-9)
            .unwrap();
        assert!((at_10.char_ratio.unwrap() - b / (a + b + cc)).norm() < 1e-12);
        assert!(pts.iter().any(|p| matches!(p.location, Location::Infinite { chart: InfinityChart::Y, .. })));
    }

    #[test]
    fn nu_index_examples() {
        let d = |a: f64, b: f64| CMatrix::diag(&[c(a), c(b)]);
        assert!((nu_index(&d(-2.0, -2.0), DEGENERACY_TOL).unwrap() - c(2.0)).norm() < 1e-15);
        assert!((nu_index(&d(2.0, -2.0), DEGENERACY_TOL).unwrap() - c(-2.0)).norm() < 1e-15);
        assert!((nu_index(&d(1.0, 2.0), DEGENERACY_TOL).unwrap() - c(2.5)).norm() < 1e-15);
        assert!(matches!(
            nu_index(&d(1.0, 0.0), DEGENERACY_TOL),
            Err(Error::DegenerateSingularity(_))
        ));
    }
}
