use super::VectorField;
use crate::error::{Error, Result};
use crate::numkernel::{BiPoly, C64};

/// Coefficients `(A, B)` of `ω = g df + α f dg = A dx + B dy`.
fn darboux_form(f: &BiPoly, g: &BiPoly, alpha: C64) -> (BiPoly, BiPoly) {
    let a = g.mul(&f.dx()).add(&f.mul(&g.dx()).scale(alpha));
    let b = g.mul(&f.dy()).add(&f.mul(&g.dy()).scale(alpha));
    (a, b)
}

/// Quadratic field `v = (B, -A)` whose foliation has the multivalued first integral `f g^α`.
pub fn darboux_two_factor(f: &BiPoly, g: &BiPoly, alpha: C64) -> Result<VectorField> {
    match (f.total_degree(), g.total_degree()) {
        (Some(df), Some(dg)) if df <= 2 && dg <= 1 => {}
        (df, dg) => {
            return Err(Error::DegreeOverflow(format!(
                "need deg f <= 2 and deg g <= 1, got {df:?} and {dg:?}"
            )))
        }
    }
    if alpha.norm() == 0.0 {
        return Err(Error::InvalidInput("exponent must be nonzero".into()));
    }
    let (a, b) = darboux_form(f, g, alpha);
    VectorField::new(b, a.neg())
}

/// `P A + Q B` for `ω = A dx + B dy` built from `(f, g, α)`.
///
/// For the output of [`darboux_two_factor`] this is `B A - A B`, which the commutative product
/// makes exactly zero in floating point.
pub fn annihilation_polynomial(f: &BiPoly, g: &BiPoly, alpha: C64, v: &VectorField) -> BiPoly {
    let (a, b) = darboux_form(f, g, alpha);
    v.p().mul(&a).add(&v.q().mul(&b))
}

/// Field with invariant lines `x = 0`, `y = 0`, `x + y = 1` and first integral
/// `x^a y^b (x + y - 1)^c`:
/// `v = (x (b (x+y-1) + c y), -y (a (x+y-1) + c x))`.
pub fn three_line_field(a: C64, b: C64, c: C64) -> VectorField {
    let one = C64::new(1.0, 0.0);
    let x = BiPoly::x();
    let y = BiPoly::y();
    let l = BiPoly::linear(one, one, -one);
    let p = x.mul(&l.scale(b).add(&y.scale(c)));
    let q = y.mul(&l.scale(a).add(&x.scale(c))).neg();
    let p = p.with_degree(2).expect("quadratic");
    let q = q.with_degree(2).expect("quadratic");
    VectorField::new(p, q).unwrap_or_else(|_| {
        // a = b = c = 0 leaves the zero field; keep the nominal shape
        VectorField::from_coeffs(2, vec![C64::new(0.0, 0.0); 6], vec![C64::new(0.0, 0.0); 6])
            .expect("unreachable for nonzero exponents")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{finite_singular_points, is_line_invariant, Line, Location, DEFAULT_TOL};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn f0() -> BiPoly {
        BiPoly::from_real_terms(&[(1.0, 1, 1), (1.0, 1, 0), (1.0, 0, 1)])
    }

    #[test]
    fn three_line_expansion() {
        let v = three_line_field(c(1.0), c(1.0), c(1.0));
        // (x(x + 2y - 1), -y(2x + y - 1))
        let p = BiPoly::from_real_terms(&[(1.0, 2, 0), (2.0, 1, 1), (-1.0, 1, 0)]);
        let q = BiPoly::from_real_terms(&[(-2.0, 1, 1), (-1.0, 0, 2), (1.0, 0, 1)]);
        assert_eq!(v.p(), &p);
        assert_eq!(v.q(), &q);
    }

    #[test]
    fn three_lines_are_invariant() {
        let v = three_line_field(C64::new(0.3, 1.0), c(-2.0), C64::new(0.0, 0.5));
        for (a, b, cc) in [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (1.0, 1.0, -1.0)] {
            assert!(is_line_invariant(&v, &Line::from_real(a, b, cc).unwrap(), 1e-12));
        }
    }

    #[test]
    fn darboux_annihilation_is_exact() {
        for k in [0.0, 0.3, 1.0, -2.5] {
            let g = BiPoly::from_real_terms(&[(1.0, 1, 0), (-k, 0, 1)]);
            let alpha = C64::new(2.0, 0.7);
            let v = darboux_two_factor(&f0(), &g, alpha).unwrap();
            assert!(annihilation_polynomial(&f0(), &g, alpha, &v).is_zero());
        }
    }

    #[test]
    fn darboux_with_g_equal_x() {
        // g = x, α = 1: A = x(y+1) + (xy+x+y), B = x(x+1); v = (B, -A)
        let g = BiPoly::x();
        let v = darboux_two_factor(&f0(), &g, c(1.0)).unwrap();
        let want_p = BiPoly::from_real_terms(&[(1.0, 2, 0), (1.0, 1, 0)]);
        let want_q = BiPoly::from_real_terms(&[(-2.0, 1, 1), (-2.0, 1, 0), (-1.0, 0, 1)]);
        assert_eq!(v.p(), &want_p);
        assert_eq!(v.q(), &want_q);
        assert!(is_line_invariant(&v, &Line::from_real(1.0, 0.0, 0.0).unwrap(), 1e-12));
        // f = 0 is invariant: v(f) = -α f g_x... vanishes on f = 0
        let vf = v.p().mul(&f0().dx()).add(&v.q().mul(&f0().dy()));
        for t in [0.3, -1.7, 2.2] {
            // points of f = 0: y = -x / (x + 1)
            let x = c(t);
            let y = -x / (x + 1.0);
            assert!(vf.eval(x, y).norm() < 1e-12);
        }
    }

    #[test]
    fn darboux_members_share_the_origin() {
        // f = 0 and g = 0 meet at the origin for every k, which stays singular
        for k in [0.0, 1.0] {
            let g = BiPoly::from_real_terms(&[(1.0, 1, 0), (-k, 0, 1)]);
            let v = darboux_two_factor(&f0(), &g, c(2.0)).unwrap();
            let pts = finite_singular_points(&v, DEFAULT_TOL).unwrap();
            assert!(pts.iter().any(|p| p.location.distance(&Location::Finite { x: c(0.0), y: c(0.0) }) < 1e-10));
        }
    }

    #[test]
    fn degree_overflow() {
        let cubic = BiPoly::from_real_terms(&[(1.0, 3, 0)]);
        assert!(matches!(
            darboux_two_factor(&cubic, &BiPoly::x(), c(1.0)),
            Err(Error::DegreeOverflow(_))
        ));
    }
}
