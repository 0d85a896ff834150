use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch(
                "matrix rows must be nonempty and of equal length".into(),
            ));
        }
        Ok(CMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn from_2x2(a: C64, b: C64, c: C64, d: C64) -> Self {
        CMatrix {
            rows: 2,
            cols: 2,
            data: vec![a, b, c, d],
        }
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = CMatrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C64]) {
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Determinant by fraction-free (Bareiss) elimination with partial pivoting.
    pub fn det(&self) -> C64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return C64::new(1.0, 0.0);
        }
        let mut a = self.clone();
        let mut sign = 1.0;
        let mut prev = C64::new(1.0, 0.0);
        for k in 0..n - 1 {
            let pivot = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .unwrap();
            if a[(pivot, k)].norm() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            if pivot != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(pivot, j)];
                    a[(pivot, j)] = tmp;
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[(i, j)] = (a[(i, j)] * a[(k, k)] - a[(i, k)] * a[(k, j)]) / prev;
                }
                a[(i, k)] = C64::new(0.0, 0.0);
            }
            prev = a[(k, k)];
        }
        a[(n - 1, n - 1)] * sign
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

fn lex_cmp(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Eigenvalues of a 2x2 matrix via trace and determinant, sorted by (Re, Im).
pub fn eig2(m: &CMatrix) -> (C64, C64) {
    assert!(m.rows() == 2 && m.cols() == 2, "eig2 needs a 2x2 matrix");
    let half_tr = m.trace() / 2.0;
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (half_tr * half_tr - det).sqrt();
    let (mut a, mut b) = (half_tr + disc, half_tr - disc);
    // cancellation-free smaller root
    if a.norm() < b.norm() {
        std::mem::swap(&mut a, &mut b);
    }
    if a.norm() > 0.0 {
        b = det / a;
    }
    if lex_cmp(&a, &b) == std::cmp::Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    }
}

/// Thin singular value decomposition `A = U diag(s) V*`, singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided (Hestenes) Jacobi SVD. Accurate to high relative precision on small matrices.
pub fn svd(m: &CMatrix) -> Svd {
    if m.rows() < m.cols() {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let (rows, n) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for i in 0..rows {
                    alpha += a[(i, p)].norm_sqr();
                    beta += a[(i, q)].norm_sqr();
                    gamma += a[(i, p)].conj() * a[(i, q)];
                }
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)] / phase;
                    a[(i, p)] = ap * c - aq * s;
                    a[(i, q)] = ap * s + aq * c;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)] / phase;
                    v[(i, p)] = vp * c - vq * s;
                    v[(i, q)] = vp * s + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut norms: Vec<(usize, f64)> = (0..n)
        .map(|j| (j, a.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()))
        .collect();
    norms.sort_by(|x, y| y.1.total_cmp(&x.1));
    let mut u = CMatrix::zeros(rows, n);
    let mut vs = CMatrix::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (k, &(j, s)) in norms.iter().enumerate() {
        singular_values.push(s);
        let col: Vec<C64> = if s > 0.0 {
            a.column(j).iter().map(|z| z / s).collect()
        } else {
            vec![C64::new(0.0, 0.0); rows]
        };
        u.set_column(k, &col);
        vs.set_column(k, &v.column(j));
    }
    Svd {
        u,
        singular_values,
        v: vs,
    }
}

/// Singular values, descending; `min(rows, cols)` of them.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    svd(m).singular_values
}

/// Minimum-norm least-squares solution of `A x = b`, discarding singular values
/// below `rel_cutoff * s_max`.
pub fn pinv_solve(a: &CMatrix, b: &[C64], rel_cutoff: f64) -> Vec<C64> {
    let d = svd(a);
    let smax = d.singular_values.first().copied().unwrap_or(0.0);
    let mut x = vec![C64::new(0.0, 0.0); a.cols()];
    for (k, &s) in d.singular_values.iter().enumerate() {
        if s <= rel_cutoff * smax || s == 0.0 {
            continue;
        }
        let coef: C64 = (0..a.rows()).map(|i| d.u[(i, k)].conj() * b[i]).sum::<C64>() / s;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += d.v[(j, k)] * coef;
        }
    }
    x
}

/// Eigenvalues of a complex upper Hessenberg matrix by shifted QR with deflation.
pub fn hessenberg_eigenvalues(h: &CMatrix, max_iter: usize) -> Result<Vec<C64>> {
    let mut a = h.clone();
    let mut n = a.rows();
    let mut out = Vec::with_capacity(n);
    let mut iter = 0;
    while n > 0 {
        if n == 1 {
            out.push(a[(0, 0)]);
            break;
        }
        // deflate on a negligible subdiagonal entry
        let mut l = n - 1;
        while l > 0 {
            let s = a[(l - 1, l - 1)].norm() + a[(l, l)].norm();
            if a[(l, l - 1)].norm() <= f64::EPSILON * s.max(f64::MIN_POSITIVE) {
                a[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == n - 1 {
            out.push(a[(n - 1, n - 1)]);
            n -= 1;
            continue;
        }
        iter += 1;
        if iter > max_iter {
            return Err(Error::NoConvergence("hessenberg QR".into()));
        }
        // Wilkinson shift from the trailing 2x2 block
        let tl = CMatrix::from_2x2(
            a[(n - 2, n - 2)],
            a[(n - 2, n - 1)],
            a[(n - 1, n - 2)],
            a[(n - 1, n - 1)],
        );
        let (e1, e2) = eig2(&tl);
        let last = a[(n - 1, n - 1)];
        let mut shift = if (e1 - last).norm() < (e2 - last).norm() { e1 } else { e2 };
        if iter % 11 == 0 {
            shift += a[(n - 1, n - 2)].norm();
        }
        for i in l..n {
            a[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(n - l);
        for k in l..n - 1 {
            let (x, y) = (a[(k, k)], a[(k + 1, k)]);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
            } else {
                (x / r, y / r)
            };
            for j in k..n {
                let (p, q) = (a[(k, j)], a[(k + 1, j)]);
                a[(k, j)] = c.conj() * p + s.conj() * q;
                a[(k + 1, j)] = -s * p + c * q;
            }
            rots.push((k, c, s));
        }
        for (k, c, s) in rots {
            for i in l..=(k + 2).min(n - 1) {
                let (p, q) = (a[(i, k)], a[(i, k + 1)]);
                a[(i, k)] = p * c + q * s;
                a[(i, k + 1)] = -p * s.conj() + q * c.conj();
            }
        }
        for i in l..n {
            a[(i, i)] += shift;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eig2_examples() {
        assert_eq!(eig2(&CMatrix::identity(2)), (c(1.0, 0.0), c(1.0, 0.0)));
        assert_eq!(eig2(&CMatrix::diag(&[c(2.0, 0.0), c(-2.0, 0.0)])), (c(-2.0, 0.0), c(2.0, 0.0)));
        let rot = CMatrix::from_2x2(c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0));
        let (a, b) = eig2(&rot);
        assert!((a - c(0.0, -1.0)).norm() < 1e-15);
        assert!((b - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = CMatrix::from_rows(&[
            vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0)],
            vec![c(0.5, 0.0), c(-1.0, 2.0), c(3.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, -1.0), c(2.0, 0.5)],
        ])
        .unwrap();
        let e = |i: usize, j: usize| m[(i, j)];
        let cof = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
            - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
        assert!((m.det() - cof).norm() < 1e-13);
    }

    #[test]
    fn svd_of_identity_and_rank_one() {
        assert_eq!(singular_values(&CMatrix::identity(3)), vec![1.0, 1.0, 1.0]);
        let u = [c(1.0, 1.0), c(0.0, 2.0), c(-1.0, 0.0)];
        let w = [c(2.0, 0.0), c(0.0, -1.0)];
        let mut m = CMatrix::zeros(3, 2);
        for i in 0..3 {
            for j in 0..2 {
                m[(i, j)] = u[i] * w[j].conj();
            }
        }
        let s = singular_values(&m);
        let nu: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nw: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((s[0] - nu * nw).abs() < 1e-13);
        assert!(s[1] < 1e-14);
    }

    #[test]
    fn svd_reconstructs_wide_matrix() {
        let m = CMatrix::from_rows(&[
            vec![c(1.0, 0.5), c(2.0, 0.0), c(0.0, -1.0), c(0.3, 0.3)],
            vec![c(0.5, 0.0), c(-1.0, 2.0), c(3.0, 0.0), c(0.0, 0.1)],
        ])
        .unwrap();
        let d = svd(&m);
        let mut rebuilt = CMatrix::zeros(2, 4);
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..4 {
                    rebuilt[(i, j)] += d.u[(i, k)] * d.singular_values[k] * d.v[(j, k)].conj();
                }
            }
        }
        for i in 0..2 {
            for j in 0..4 {
                assert!((rebuilt[(i, j)] - m[(i, j)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn hessenberg_qr_on_companion() {
        // z^3 - 6z^2 + 11z - 6 = (z-1)(z-2)(z-3)
        let mut h = CMatrix::zeros(3, 3);
        h[(1, 0)] = c(1.0, 0.0);
        h[(2, 1)] = c(1.0, 0.0);
        h[(0, 2)] = c(6.0, 0.0);
        h[(1, 2)] = c(-11.0, 0.0);
        h[(2, 2)] = c(6.0, 0.0);
        let mut ev = hessenberg_eigenvalues(&h, 500).unwrap();
        ev.sort_by(lex_cmp);
        for (e, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((e - c(want, 0.0)).norm() < 1e-10, "{ev:?}");
        }
    }
}
