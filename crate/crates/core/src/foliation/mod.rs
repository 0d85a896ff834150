//! Polynomial vector fields, their extension to the line at infinity, singular points and
//! index identities.

mod families;
mod invariant;
mod singular;

pub use families::{annihilation_polynomial, darboux_two_factor, three_line_field};
pub use invariant::{
    baum_bott_sum, baum_bott_target, is_line_invariant, verify_baum_bott, verify_camacho_sad_line,
    Line, LineSpec,
};
pub use singular::{
    finite_singular_points, infinite_singular_points, infinity_chart_field, nu_index,
    singular_points, InfinityChart, Location, SingPoint, SingSet,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkernel::{BiPoly, CMatrix, C64, DROP_TOL};

/// Default residual tolerance (relative to the coefficient scale) for singular-point solves.
pub const DEFAULT_TOL: f64 = 1e-9;

/// `|det J| < DEGENERACY_TOL * |J|_F^2` marks a singular point as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Planar polynomial vector field `(P, Q)` of degree `n >= 1` in the affine chart of `CP^2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VectorField {
    p: BiPoly,
    q: BiPoly,
    degree: usize,
}

fn truncate(p: &BiPoly, n: usize) -> BiPoly {
    let mut coeffs = p.coeffs().to_vec();
    coeffs.resize(crate::numkernel::monomial_count(n), C64::new(0.0, 0.0));
    BiPoly::from_coeffs(n, coeffs).expect("length matches degree")
}

impl VectorField {
    /// Builds a field; the degree is the largest total degree with a coefficient above the
    /// drop tolerance relative to the largest coefficient of either component.
    pub fn new(p: BiPoly, q: BiPoly) -> Result<Self> {
        let scale = p.max_abs().max(q.max_abs());
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::InvalidInput("vector field must be nonzero and finite".into()));
        }
        let top = |b: &BiPoly| {
            b.coeffs()
                .iter()
                .rposition(|c| c.norm() > DROP_TOL * scale)
                .map(|idx| {
                    let (i, j) = crate::numkernel::monomial_exponents(idx);
                    i + j
                })
                .unwrap_or(0)
        };
        let degree = top(&p).max(top(&q));
        if degree == 0 {
            return Err(Error::InvalidInput("vector field must have degree >= 1".into()));
        }
        Ok(VectorField {
            p: truncate(&p, degree),
            q: truncate(&q, degree),
            degree,
        })
    }

    /// Field with nominal degree `degree` and coefficient lists in graded order.
    pub fn from_coeffs(degree: usize, p: Vec<C64>, q: Vec<C64>) -> Result<Self> {
        VectorField::new(BiPoly::from_coeffs(degree, p)?, BiPoly::from_coeffs(degree, q)?)
    }

    pub fn p(&self) -> &BiPoly {
        &self.p
    }

    pub fn q(&self) -> &BiPoly {
        &self.q
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of singular points of a generic field of this degree, `n^2 + n + 1`.
    pub fn generic_point_count(&self) -> usize {
        let n = self.degree;
        n * n + n + 1
    }

    pub fn eval(&self, x: C64, y: C64) -> (C64, C64) {
        (self.p.eval(x, y), self.q.eval(x, y))
    }

    pub fn jacobian(&self, x: C64, y: C64) -> CMatrix {
        CMatrix::from_2x2(
            self.p.dx().eval(x, y),
            self.p.dy().eval(x, y),
            self.q.dx().eval(x, y),
            self.q.dy().eval(x, y),
        )
    }

    pub fn scaled(&self, c: C64) -> VectorField {
        VectorField {
            p: self.p.scale(c),
            q: self.q.scale(c),
            degree: self.degree,
        }
    }

    /// The same field after exchanging the coordinates `x <-> y`.
    pub fn swapped(&self) -> VectorField {
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let swap = [[zero, one], [one, zero]];
        let origin = [zero, zero];
        VectorField {
            p: self.q.compose_affine(swap, origin),
            q: self.p.compose_affine(swap, origin),
            degree: self.degree,
        }
    }

    /// Push-forward under `z -> m z + t`: the field `m v(m^{-1}(w - t))`.
    pub fn affine_pushforward(&self, m: [[C64; 2]; 2], t: [C64; 2]) -> Result<VectorField> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let scale = m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        if det.norm() <= 1e-12 * scale * scale || scale == 0.0 {
            return Err(Error::InvalidInput("affine map is not invertible".into()));
        }
        let inv = [
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ];
        let shift = [
            -(inv[0][0] * t[0] + inv[0][1] * t[1]),
            -(inv[1][0] * t[0] + inv[1][1] * t[1]),
        ];
        let pc = self.p.compose_affine(inv, shift);
        let qc = self.q.compose_affine(inv, shift);
        VectorField::new(
            pc.scale(m[0][0]).add(&qc.scale(m[0][1])),
            pc.scale(m[1][0]).add(&qc.scale(m[1][1])),
        )
    }

    /// Coefficients of `h(x, y) = x Q_n - y P_n`, the monomial `x^(n+1-j) y^j` at position `j`.
    ///
    /// `h(1, v)` has exactly these coefficients in ascending powers of `v`.
    pub fn top_binary_form(&self) -> Vec<C64> {
        let n = self.degree;
        let pn = self.p.homogeneous_part(n);
        let qn = self.q.homogeneous_part(n);
        let mut h = vec![C64::new(0.0, 0.0); n + 2];
        for j in 0..=n {
            h[j] += qn[j];
            h[j + 1] -= pn[j];
        }
        h
    }
}
