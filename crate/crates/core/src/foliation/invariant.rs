use serde::Serialize;

use super::singular::{singular_points, InfinityChart, Location, SingPoint};
use super::{VectorField, DEGENERACY_TOL};
use crate::error::{Error, Result};
use crate::numkernel::{CMatrix, C64};

/// Affine line `a x + b y + c = 0`, scaled so its largest-magnitude coefficient is 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Line {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl Line {
    pub fn new(a: C64, b: C64, c: C64) -> Result<Line> {
        if a.norm() == 0.0 && b.norm() == 0.0 {
            return Err(Error::InvalidInput("line needs (a, b) != (0, 0)".into()));
        }
        let pivot = [a, b, c]
            .into_iter()
            .max_by(|p, q| p.norm().total_cmp(&q.norm()))
            .unwrap();
        Ok(Line {
            a: a / pivot,
            b: b / pivot,
            c: c / pivot,
        })
    }

    pub fn from_real(a: f64, b: f64, c: f64) -> Result<Line> {
        Line::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0))
    }

    pub fn eval(&self, x: C64, y: C64) -> C64 {
        self.a * x + self.b * y + self.c
    }

    /// A point on the line and a tangent vector `(b, -a)`.
    fn parametrization(&self) -> ([C64; 2], [C64; 2]) {
        let zero = C64::new(0.0, 0.0);
        let base = if self.b.norm() >= self.a.norm() {
            [zero, -self.c / self.b]
        } else {
            [-self.c / self.a, zero]
        };
        (base, [self.b, -self.a])
    }
}

/// An affine invariant line or the line at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum LineSpec {
    Affine(Line),
    Infinity,
}

/// Whether `l` divides `P l_x + Q l_y`, tested by restricting that polynomial to the line
/// and comparing its coefficients with `tol` times the coefficient scale.
pub fn is_line_invariant(v: &VectorField, l: &Line, tol: f64) -> bool {
    let r = v.p().scale(l.a).add(&v.q().scale(l.b));
    let (base, dir) = l.parametrization();
    let zero = C64::new(0.0, 0.0);
    let restricted = r.compose_affine([[dir[0], zero], [dir[1], zero]], base);
    let reach = 1.0 + base[0].norm().max(base[1].norm()) + dir[0].norm().max(dir[1].norm());
    let scale = v.p().max_abs().max(v.q().max_abs()) * reach.powi(v.degree() as i32);
    restricted.max_abs() <= tol * scale
}

/// `T(n) = (n+2)^2 - 2(n^2+n+1)`, the sum of Baum–Bott indices over all singular points
/// of a generic degree-`n` field.
pub fn baum_bott_target(n: usize) -> f64 {
    let n = n as f64;
    (n + 2.0).powi(2) - 2.0 * (n * n + n + 1.0)
}

/// Sum of `ν` over all singular points; fails on degenerate points or a nongeneric count.
pub fn baum_bott_sum(v: &VectorField, tol: f64) -> Result<C64> {
    let set = singular_points(v, tol)?;
    set.require_generic_count()?;
    set.require_nondegenerate()?;
    Ok(set.iter().map(|p| p.nu.unwrap()).sum())
}

/// `|Σ ν(O_j) - T(n)|`.
pub fn verify_baum_bott(v: &VectorField, tol: f64) -> Result<f64> {
    let s = baum_bott_sum(v, tol)?;
    Ok((s - baum_bott_target(v.degree())).norm())
}

/// Characteristic ratio along a tangent vector `d` that is an eigenvector of `j`.
fn ratio_along(j: &CMatrix, d: [C64; 2]) -> Result<C64> {
    let jd = j.matvec(&d);
    let nd = d[0].norm_sqr() + d[1].norm_sqr();
    let mu = (d[0].conj() * jd[0] + d[1].conj() * jd[1]) / nd;
    let lambda = j.trace() - mu;
    let fro = j.frobenius_norm();
    if (lambda * mu).norm() < DEGENERACY_TOL * fro * fro {
        return Err(Error::DegenerateSingularity("vanishing eigenvalue on the line".into()));
    }
    Ok(lambda / mu)
}

/// Tangent vector of the affine line `l` at a point of the line at infinity, in the point's chart.
fn tangent_at_infinity(l: &Line, chart: InfinityChart) -> [C64; 2] {
    match chart {
        // a + b v + c u = 0 in (u, v)
        InfinityChart::X => [l.b, -l.c],
        // a w + b + c s = 0 in (s, w)
        InfinityChart::Y => [l.a, -l.c],
    }
}

/// Characteristic ratios `λ/μ` of the singular points lying on `line`, `μ` tangent to the line.
pub fn line_ratios(v: &VectorField, line: &LineSpec, tol: f64) -> Result<Vec<(Location, C64)>> {
    let set = singular_points(v, tol)?;
    let need = |p: &SingPoint| {
        if p.is_degenerate() {
            Err(Error::DegenerateSingularity(format!("{:?}", p.location)))
        } else {
            Ok(())
        }
    };
    let mut out = Vec::new();
    match line {
        LineSpec::Infinity => {
            for p in &set.infinite {
                need(p)?;
                out.push((p.location, p.char_ratio.unwrap()));
            }
        }
        LineSpec::Affine(l) => {
            if !is_line_invariant(v, l, 1e-9) {
                return Err(Error::LineNotInvariant);
            }
            for p in &set.finite {
                let Location::Finite { x, y } = p.location else { unreachable!() };
                if l.eval(x, y).norm() <= 1e-7 * (1.0 + x.norm().max(y.norm())) {
                    need(p)?;
                    out.push((p.location, ratio_along(&p.jacobian, [l.b, -l.a])?));
                }
            }
            let line_dir = [l.b, -l.a];
            let nd = (line_dir[0].norm_sqr() + line_dir[1].norm_sqr()).sqrt();
            for p in &set.infinite {
                let Location::Infinite { chart, .. } = p.location else { unreachable!() };
                let d = p.location.direction().unwrap();
                if (d[0] * line_dir[1] - d[1] * line_dir[0]).norm() <= 1e-7 * nd {
                    need(p)?;
                    out.push((p.location, ratio_along(&p.jacobian, tangent_at_infinity(l, chart))?));
                }
            }
        }
    }
    Ok(out)
}

/// `|Σ λ_j/μ_j - 1|` over the singular points on an invariant line.
pub fn verify_camacho_sad_line(v: &VectorField, line: &LineSpec, tol: f64) -> Result<f64> {
    let ratios = line_ratios(v, line, tol)?;
    let s: C64 = ratios.iter().map(|(_, r)| r).sum();
    Ok((s - 1.0).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliation::{three_line_field, DEFAULT_TOL};
    use crate::numkernel::BiPoly;

    fn separable() -> VectorField {
        VectorField::new(
            BiPoly::from_real_terms(&[(1.0, 2, 0), (-2.0, 1, 0)]),
            BiPoly::from_real_terms(&[(1.0, 0, 2), (-2.0, 0, 1)]),
        )
        .unwrap()
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn invariance_examples() {
        let tl = three_line_field(c(1.0), c(1.0), c(1.0));
        assert!(is_line_invariant(&tl, &Line::from_real(0.0, 1.0, 0.0).unwrap(), 1e-12));
        let v0 = separable();
        assert!(is_line_invariant(&v0, &Line::from_real(1.0, 0.0, 0.0).unwrap(), 1e-12));
        assert!(!is_line_invariant(&v0, &Line::from_real(1.0, 1.0, -2.0).unwrap(), 1e-9));
    }

    #[test]
    fn targets() {
        assert_eq!(baum_bott_target(2), 2.0);
        assert_eq!(baum_bott_target(3), -1.0);
    }

    #[test]
    fn separable_identities_are_exact() {
        let v0 = separable();
        assert!(verify_baum_bott(&v0, DEFAULT_TOL).unwrap() < 1e-12);
        assert!(verify_camacho_sad_line(&v0, &LineSpec::Infinity, DEFAULT_TOL).unwrap() < 1e-12);
    }

    #[test]
    fn three_line_per_line_sums() {
        let (a, b, cc) = (c(0.7), C64::new(1.3, 0.4), C64::new(-0.2, 0.9));
        let v = three_line_field(a, b, cc);
        for l in [(0.0, 1.0, 0.0), (1.0, 0.0, 0.0), (1.0, 1.0, -1.0)] {
            let line = LineSpec::Affine(Line::from_real(l.0, l.1, l.2).unwrap());
            let ratios = line_ratios(&v, &line, DEFAULT_TOL).unwrap();
            assert_eq!(ratios.len(), 3, "{l:?}");
            assert!(verify_camacho_sad_line(&v, &line, DEFAULT_TOL).unwrap() < 1e-10);
        }
        // closed forms along y = 0: -a/b at the origin, -c/b at (1,0), (a+b+c)/b at [1:0]
        let ratios = line_ratios(&v, &LineSpec::Affine(Line::from_real(0.0, 1.0, 0.0).unwrap()), DEFAULT_TOL).unwrap();
        let mut got: Vec<C64> = ratios.iter().map(|r| r.1).collect();
        let want = [-a / b, -cc / b, (a + b + cc) / b];
        for w in want {
            let k = got.iter().position(|g| (g - w).norm() < 1e-10).expect("closed form present");
            got.remove(k);
        }
    }

    #[test]
    fn non_invariant_line_is_rejected() {
        let line = LineSpec::Affine(Line::from_real(1.0, 1.0, -2.0).unwrap());
        assert_eq!(
            verify_camacho_sad_line(&separable(), &line, DEFAULT_TOL),
            Err(Error::LineNotInvariant)
        );
    }
}
