use num_complex::Complex64 as C64;

use super::linalg::{hessenberg_eigenvalues, CMatrix};
use super::poly::{BiPoly, UniPoly, Var};
use crate::error::{Error, Result};

/// Iteration cap shared by the simultaneous root iteration and Newton polishing.
pub const MAX_ROOT_ITER: usize = 200;

fn residual_ok(p: &UniPoly, z: C64, deg: usize, tol: f64) -> bool {
    let bound = tol * p.max_abs() * z.norm().max(1.0).powi(deg as i32);
    p.eval(z).norm() <= bound
}

/// All `deg(p)` roots of `p`, with multiplicity.
///
/// Aberth-Ehrlich simultaneous iteration followed by Newton polishing; falls back to the
/// eigenvalues of the companion matrix when the iteration stalls. Each returned root `z`
/// satisfies `|p(z)| <= tol * max|coeff| * max(1,|z|)^deg`. Constant polynomials have no roots.
pub fn roots_univariate(p: &UniPoly, tol: f64) -> Result<Vec<C64>> {
    let deg = p.degree().ok_or(Error::ZeroPolynomial)?;
    let p = UniPoly::new(p.coeffs()[..=deg].to_vec());
    // exact zero roots
    let zeros = p.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let mut roots = vec![C64::new(0.0, 0.0); zeros];
    if zeros == deg {
        return Ok(roots);
    }
    let lead = p.coeffs()[deg];
    let q = UniPoly::new(p.coeffs()[zeros..].iter().map(|c| c / lead).collect());
    let qdeg = deg - zeros;
    let found = match aberth(&q, qdeg) {
        Some(r) if r.iter().all(|&z| residual_ok(&p, z, deg, tol)) => r,
        _ => {
            let r = companion_roots(&q, qdeg)?;
            let r: Vec<C64> = r.into_iter().map(|z| newton_refine(&q, z)).collect();
            if !r.iter().all(|&z| residual_ok(&p, z, deg, tol)) {
                return Err(Error::NoConvergence(format!(
                    "polynomial roots of degree {deg} miss the residual bound"
                )));
            }
            r
        }
    };
    roots.extend(found);
    Ok(roots)
}

fn aberth(q: &UniPoly, deg: usize) -> Option<Vec<C64>> {
    let c = q.coeffs();
    if deg == 1 {
        return Some(vec![-c[0]]);
    }
    let dq = q.derivative();
    // Cauchy-type radius from the monic coefficients
    let radius = (0..deg)
        .map(|k| c[k].norm().powf(1.0 / (deg - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let center = -c[deg - 1] / deg as f64;
    let mut z: Vec<C64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            center + C64::from_polar(radius, theta)
        })
        .collect();
    for _ in 0..MAX_ROOT_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let pz = q.eval(z[i]);
            if pz.norm() == 0.0 {
                continue;
            }
            let ratio = pz / dq.eval(z[i]);
            let repulsion: C64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| C64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let w = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if !(w.re.is_finite() && w.im.is_finite()) {
                return None;
            }
            z[i] -= w;
            max_step = max_step.max(w.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    Some(z.into_iter().map(|r| newton_refine(q, r)).collect())
}

/// A few Newton steps that are kept only while they reduce the residual.
fn newton_refine(q: &UniPoly, mut z: C64) -> C64 {
    let dq = q.derivative();
    let mut best = q.eval(z).norm();
    for _ in 0..5 {
        let d = dq.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - q.eval(z) / d;
        let r = q.eval(cand).norm();
        if r < best {
            z = cand;
            best = r;
        } else {
            break;
        }
    }
    z
}

fn companion_roots(q: &UniPoly, deg: usize) -> Result<Vec<C64>> {
    let c = q.coeffs();
    let mut h = CMatrix::zeros(deg, deg);
    for i in 1..deg {
        h[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..deg {
        h[(i, deg - 1)] = -c[i];
    }
    hessenberg_eigenvalues(&h, 100 * deg.max(1))
}

/// Resultant of `p` and `q` with respect to `eliminated`, as a polynomial in the other variable.
///
/// Sylvester determinants (fraction-free elimination) are evaluated at roots of unity and
/// interpolated by an inverse discrete Fourier transform.
pub fn resultant_eliminate(p: &BiPoly, q: &BiPoly, eliminated: Var) -> Result<UniPoly> {
    let m = p.degree_in(eliminated).ok_or(Error::ZeroPolynomial)?;
    let n = q.degree_in(eliminated).ok_or(Error::ZeroPolynomial)?;
    let pc = p.as_poly_in(eliminated);
    let qc = q.as_poly_in(eliminated);
    let bound = (p.degree() * q.degree()).max(1);
    let samples = bound + 1;
    let size = m + n;
    let mut values = Vec::with_capacity(samples);
    for t in 0..samples {
        let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / samples as f64);
        if size == 0 {
            values.push(C64::new(1.0, 0.0));
            continue;
        }
        let mut s = CMatrix::zeros(size, size);
        for r in 0..n {
            for k in 0..=m {
                s[(r, r + m - k)] = pc[k].eval(z);
            }
        }
        for r in 0..m {
            for k in 0..=n {
                s[(n + r, r + n - k)] = qc[k].eval(z);
            }
        }
        values.push(s.det());
    }
    let coeffs: Vec<C64> = (0..samples)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(t, &v)| {
                    v * C64::from_polar(
                        1.0,
                        -2.0 * std::f64::consts::PI * (t * k) as f64 / samples as f64,
                    )
                })
                .sum::<C64>()
                / samples as f64
        })
        .collect();
    let res = UniPoly::new(coeffs);
    let scale = p.max_abs().powi(n as i32) * q.max_abs().powi(m as i32);
    if res.max_abs() <= 1e-11 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::IdenticallyZeroResultant);
    }
    Ok(res)
}

/// Result of [`newton_polish`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Polished {
    pub x: C64,
    pub y: C64,
    pub residual: f64,
}

/// Newton iteration on the square system `(p, q) = 0` from `start`.
///
/// Stops once the residual `|(p, q)|` is at most `tol` and further steps no longer reduce it.
pub fn newton_polish(system: (&BiPoly, &BiPoly), start: (C64, C64), tol: f64) -> Result<Polished> {
    let (p, q) = system;
    let (px, py, qx, qy) = (p.dx(), p.dy(), q.dx(), q.dy());
    let (mut x, mut y) = start;
    let res = |x: C64, y: C64| (p.eval(x, y).norm_sqr() + q.eval(x, y).norm_sqr()).sqrt();
    let mut r = res(x, y);
    for _ in 0..MAX_ROOT_ITER {
        let (a, b, c, d) = (px.eval(x, y), py.eval(x, y), qx.eval(x, y), qy.eval(x, y));
        let det = a * d - b * c;
        let jn = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
        if det.norm() <= 1e-14 * jn || jn == 0.0 {
            if r <= tol {
                break;
            }
            return Err(Error::SingularJacobian);
        }
        let (f, g) = (p.eval(x, y), q.eval(x, y));
        let dx = (d * f - b * g) / det;
        let dy = (a * g - c * f) / det;
        let (nx, ny) = (x - dx, y - dy);
        let nr = res(nx, ny);
        if !nr.is_finite() {
            return Err(Error::NoConvergence("newton iterate diverged".into()));
        }
        if r <= tol && nr >= r {
            break;
        }
        x = nx;
        y = ny;
        r = nr;
    }
    if r <= tol {
        Ok(Polished { x, y, residual: r })
    } else {
        Err(Error::NoConvergence(format!("newton residual {r:.3e} above {tol:.3e}")))
    }
}
