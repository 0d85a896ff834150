use num_complex::Complex64 as C64;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative magnitude below which a coefficient is treated as zero for degree detection.
pub const DROP_TOL: f64 = 1e-12;

fn c0() -> C64 {
    C64::new(0.0, 0.0)
}

/// Univariate complex polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<C64>,
}

impl UniPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        UniPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// The polynomial `prod (z - r)` for the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut p = UniPoly::new(vec![C64::new(1.0, 0.0)]);
        for &r in roots {
            p = p.mul(&UniPoly::new(vec![-r, C64::new(1.0, 0.0)]));
        }
        p
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Index of the last coefficient above `DROP_TOL` relative to the largest one;
    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let m = self.max_abs();
        if m == 0.0 || !m.is_finite() {
            return None;
        }
        self.coeffs.iter().rposition(|c| c.norm() > DROP_TOL * m)
    }

    /// Copy with coefficients past [`UniPoly::degree`] removed.
    pub fn trimmed(&self) -> UniPoly {
        match self.degree() {
            Some(d) => UniPoly::new(self.coeffs[..=d].to_vec()),
            None => UniPoly::new(Vec::new()),
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(c0(), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return UniPoly::new(Vec::new());
        }
        let mut out = vec![c0(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

/// Which variable a resultant eliminates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// Bivariate complex polynomial of nominal degree `degree`.
///
/// Coefficients are stored in graded order `[1, x, y, x^2, xy, y^2, x^3, ...]`:
/// within total degree `d` the monomial `x^(d-j) y^j` sits at offset `d(d+1)/2 + j`.
/// The storage length is always `(degree+1)(degree+2)/2`; trailing coefficients may be zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly {
    degree: usize,
    coeffs: Vec<C64>,
}

/// Number of monomials of total degree at most `degree`.
pub fn monomial_count(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Storage index of `x^i y^j`.
pub fn monomial_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// Exponents `(i, j)` of the monomial stored at `idx`.
pub fn monomial_exponents(idx: usize) -> (usize, usize) {
    let mut d = 0;
    while monomial_count(d) <= idx {
        d += 1;
    }
    let j = idx - d * (d + 1) / 2;
    (d - j, j)
}

impl BiPoly {
    pub fn zero(degree: usize) -> Self {
        BiPoly {
            degree,
            coeffs: vec![c0(); monomial_count(degree)],
        }
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != monomial_count(degree) {
            return Err(Error::DimensionMismatch(format!(
                "degree {degree} needs {} coefficients, got {}",
                monomial_count(degree),
                coeffs.len()
            )));
        }
        Ok(BiPoly { degree, coeffs })
    }

    /// Builds a polynomial from `(coefficient, i, j)` terms meaning `c * x^i * y^j`.
    pub fn from_terms(terms: &[(C64, usize, usize)]) -> Self {
        let degree = terms.iter().map(|&(_, i, j)| i + j).max().unwrap_or(0);
        let mut p = BiPoly::zero(degree);
        for &(c, i, j) in terms {
            p.coeffs[monomial_index(i, j)] += c;
        }
        p
    }

    pub fn from_real_terms(terms: &[(f64, usize, usize)]) -> Self {
        let t: Vec<_> = terms
            .iter()
            .map(|&(c, i, j)| (C64::new(c, 0.0), i, j))
            .collect();
        BiPoly::from_terms(&t)
    }

    pub fn constant(c: C64) -> Self {
        BiPoly::from_terms(&[(c, 0, 0)])
    }

    /// `a x + b y + c`.
    pub fn linear(a: C64, b: C64, c: C64) -> Self {
        BiPoly::from_terms(&[(c, 0, 0), (a, 1, 0), (b, 0, 1)])
    }

    pub fn x() -> Self {
        BiPoly::from_real_terms(&[(1.0, 1, 0)])
    }

    pub fn y() -> Self {
        BiPoly::from_real_terms(&[(1.0, 0, 1)])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        self.coeffs
            .get(monomial_index(i, j))
            .copied()
            .unwrap_or_else(c0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest total degree carrying a coefficient above the drop tolerance.
    pub fn total_degree(&self) -> Option<usize> {
        let m = self.max_abs();
        if m == 0.0 {
            return None;
        }
        self.coeffs
            .iter()
            .rposition(|c| c.norm() > DROP_TOL * m)
            .map(|idx| monomial_exponents(idx).0 + monomial_exponents(idx).1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == c0())
    }

    /// Same polynomial stored with nominal degree `degree`.
    ///
    /// Fails if nonzero coefficients would be cut off.
    pub fn with_degree(&self, degree: usize) -> Result<BiPoly> {
        let n = monomial_count(degree);
        if n < self.coeffs.len() && self.coeffs[n..].iter().any(|c| *c != c0()) {
            return Err(Error::DegreeOverflow(format!(
                "polynomial has terms above degree {degree}"
            )));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n, c0());
        Ok(BiPoly { degree, coeffs })
    }

    fn terms(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.coeffs.iter().enumerate().map(|(idx, &c)| {
            let (i, j) = monomial_exponents(idx);
            (i, j, c)
        })
    }

    pub fn eval(&self, x: C64, y: C64) -> C64 {
        let mut xp = vec![C64::new(1.0, 0.0); self.degree + 1];
        let mut yp = vec![C64::new(1.0, 0.0); self.degree + 1];
        for k in 1..=self.degree {
            xp[k] = xp[k - 1] * x;
            yp[k] = yp[k - 1] * y;
        }
        self.terms()
            .fold(c0(), |acc, (i, j, c)| acc + c * xp[i] * yp[j])
    }

    pub fn dx(&self) -> BiPoly {
        let deg = self.degree.saturating_sub(1);
        let mut out = BiPoly::zero(deg);
        for (i, j, c) in self.terms() {
            if i > 0 {
                out.coeffs[monomial_index(i - 1, j)] += c * i as f64;
            }
        }
        out
    }

    pub fn dy(&self) -> BiPoly {
        let deg = self.degree.saturating_sub(1);
        let mut out = BiPoly::zero(deg);
        for (i, j, c) in self.terms() {
            if j > 0 {
                out.coeffs[monomial_index(i, j - 1)] += c * j as f64;
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> BiPoly {
        BiPoly {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let degree = self.degree.max(other.degree);
        let mut out = BiPoly::zero(degree);
        for (k, c) in self.coeffs.iter().enumerate() {
            out.coeffs[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out.coeffs[k] += c;
        }
        out
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.neg())
    }

    /// Product with bit-exact commutativity: `a.mul(&b) == b.mul(&a)` in floating point.
    ///
    /// Contributions to each output monomial are accumulated over unordered index pairs
    /// `{k, l}`, with the two cross terms summed before entering the accumulator.
    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let degree = self.degree + other.degree;
        let mut out = BiPoly::zero(degree);
        let na = self.coeffs.len();
        let nb = other.coeffs.len();
        let n = na.max(nb);
        let get = |v: &Vec<C64>, k: usize| v.get(k).copied().unwrap_or_else(c0);
        for k in 0..n {
            let (ik, jk) = monomial_exponents(k);
            for l in k..n {
                let (il, jl) = monomial_exponents(l);
                let mut s = get(&self.coeffs, k) * get(&other.coeffs, l);
                if l != k {
                    s += get(&self.coeffs, l) * get(&other.coeffs, k);
                }
                if s != c0() {
                    out.coeffs[monomial_index(ik + il, jk + jl)] += s;
                }
            }
        }
        out
    }

    pub fn pow(&self, e: usize) -> BiPoly {
        let mut out = BiPoly::constant(C64::new(1.0, 0.0));
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Coefficients of the degree-`d` homogeneous part, `x^(d-j) y^j` at position `j`.
    pub fn homogeneous_part(&self, d: usize) -> Vec<C64> {
        (0..=d).map(|j| self.coeff(d - j, j)).collect()
    }

    /// `P(m00 x + m01 y + t0, m10 x + m11 y + t1)`.
    pub fn compose_affine(&self, m: [[C64; 2]; 2], t: [C64; 2]) -> BiPoly {
        let l1 = BiPoly::linear(m[0][0], m[0][1], t[0]);
        let l2 = BiPoly::linear(m[1][0], m[1][1], t[1]);
        let mut p1 = vec![BiPoly::constant(C64::new(1.0, 0.0))];
        let mut p2 = vec![BiPoly::constant(C64::new(1.0, 0.0))];
        for k in 1..=self.degree {
            p1.push(p1[k - 1].mul(&l1));
            p2.push(p2[k - 1].mul(&l2));
        }
        let mut out = BiPoly::zero(self.degree);
        for (i, j, c) in self.terms() {
            if c == c0() {
                continue;
            }
            let term = p1[i].mul(&p2[j]).scale(c);
            out = out.add(&term);
        }
        out.with_degree(self.degree)
            .expect("affine substitution preserves degree")
    }

    /// Coefficients as a polynomial in the eliminated variable, each a `UniPoly` in the other:
    /// `P = sum_k c_k(other) * var^k`.
    pub fn as_poly_in(&self, var: Var) -> Vec<UniPoly> {
        let mut out: Vec<Vec<C64>> = vec![vec![c0(); self.degree + 1]; self.degree + 1];
        for (i, j, c) in self.terms() {
            let (k, other) = match var {
                Var::Y => (j, i),
                Var::X => (i, j),
            };
            out[k][other] += c;
        }
        out.into_iter().map(UniPoly::new).collect()
    }

    /// Largest power of `var` with a coefficient above the drop tolerance.
    pub fn degree_in(&self, var: Var) -> Option<usize> {
        let m = self.max_abs();
        if m == 0.0 {
            return None;
        }
        self.terms()
            .filter(|&(_, _, c)| c.norm() > DROP_TOL * m)
            .map(|(i, j, _)| if var == Var::X { i } else { j })
            .max()
    }
}

impl Serialize for BiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coeffs = Vec::<C64>::deserialize(d)?;
        let mut degree = 0;
        while monomial_count(degree) < coeffs.len() {
            degree += 1;
        }
        BiPoly::from_coeffs(degree, coeffs).map_err(serde::de::Error::custom)
    }
}
