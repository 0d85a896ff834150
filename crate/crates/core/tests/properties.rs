use proptest::prelude::*;

use foliate::foliation::{singular_points, VectorField, DEFAULT_TOL};
use foliate::io::{parse_field_str, FieldFile};
use foliate::moduli::{bottleneck_distance, min_cost_assignment, moduli_vector};
use foliate::numkernel::{eig2, roots_univariate, svd, CMatrix, UniPoly};
use foliate::C64;

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(2.0), rows * cols).prop_map(move |v| {
        let rows: Vec<Vec<C64>> = v.chunks(cols).map(|c| c.to_vec()).collect();
        CMatrix::from_rows(&rows).unwrap()
    })
}

fn quadratic() -> impl Strategy<Value = VectorField> {
    (prop::collection::vec(complex(1.0), 6), prop::collection::vec(complex(1.0), 6))
        .prop_filter_map("degenerate top form", |(p, q)| VectorField::from_coeffs(2, p, q).ok())
}

/// Accepts only fields with seven simple, nondegenerate singular points.
fn generic(v: &VectorField) -> bool {
    singular_points(v, DEFAULT_TOL)
        .and_then(|s| s.require_generic_count().and(s.require_nondegenerate()))
        .is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eig2_matches_trace_and_det(m in matrix(2, 2)) {
        let (a, b) = eig2(&m);
        let scale = 1.0 + m.frobenius_norm().powi(2);
        prop_assert!((a + b - m.trace()).norm() < 1e-12 * scale);
        prop_assert!((a * b - m.det()).norm() < 1e-12 * scale);
    }

    #[test]
    fn svd_reconstructs(m in matrix(7, 6)) {
        let d = svd(&m);
        let s: Vec<C64> = d.singular_values.iter().map(|&x| C64::new(x, 0.0)).collect();
        let back = d.u.matmul(&CMatrix::diag(&s)).matmul(&d.v.adjoint());
        let mut err: f64 = 0.0;
        for i in 0..7 {
            for j in 0..6 {
                err = err.max((back.row(i)[j] - m.row(i)[j]).norm());
            }
        }
        prop_assert!(err < 1e-12 * (1.0 + m.frobenius_norm()));
        prop_assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn singular_values_ignore_phases(m in matrix(3, 3), t in 0.0..6.3f64) {
        let phase = CMatrix::diag(&[C64::from_polar(1.0, t), C64::new(1.0, 0.0), C64::from_polar(1.0, -2.0 * t)]);
        let a = svd(&m).singular_values;
        let b = svd(&phase.matmul(&m)).singular_values;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12 * (1.0 + a[0]));
        }
    }

    #[test]
    fn roots_of_products_are_recovered(roots in prop::collection::vec(complex(2.0), 1..7)) {
        let sep = roots.iter().enumerate()
            .flat_map(|(i, a)| roots[i + 1..].iter().map(move |b| (a - b).norm()))
            .fold(f64::INFINITY, f64::min);
        prop_assume!(sep > 1e-2);
        let found = roots_univariate(&UniPoly::from_roots(&roots), 1e-12).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        prop_assert!(bottleneck_distance(&found, &roots) < 1e-8);
    }

    #[test]
    fn assignment_is_no_worse_than_identity(a in prop::collection::vec(complex(3.0), 4), b in prop::collection::vec(complex(3.0), 4)) {
        let perm = min_cost_assignment(&a, &b);
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, vec![0, 1, 2, 3]);
        let cost = |p: &[usize]| a.iter().zip(p).map(|(x, &j)| (x - b[j]).norm_sqr()).sum::<f64>();
        prop_assert!(cost(&perm) <= cost(&[0, 1, 2, 3]) + 1e-12);
    }

    #[test]
    fn index_identities_hold(v in quadratic()) {
        prop_assume!(generic(&v));
        let set = singular_points(&v, DEFAULT_TOL).unwrap();
        let nu: C64 = set.iter().map(|p| p.nu.unwrap()).sum();
        let ratio: C64 = set.infinite.iter().map(|p| p.char_ratio.unwrap()).sum();
        // conditioning degrades near coalescing points, hence the looser bound
        prop_assert!((nu - 2.0).norm() < 1e-6, "sum nu = {}", nu);
        prop_assert!((ratio - 1.0).norm() < 1e-6, "sum ratio = {}", ratio);
    }

    #[test]
    fn moduli_ignore_scaling(v in quadratic(), c in complex(3.0)) {
        prop_assume!(c.norm() > 0.1 && generic(&v));
        let a = moduli_vector(&v).unwrap();
        let b = moduli_vector(&v.scaled(c)).unwrap();
        prop_assert!(a.split_distance(&b) < 1e-7 * (1.0 + a.values().iter().map(|z| z.norm()).fold(0.0, f64::max)));
    }

    #[test]
    fn moduli_ignore_affine_maps(v in quadratic(), m in prop::collection::vec(complex(1.5), 4), t in prop::collection::vec(complex(1.0), 2)) {
        let mm = [[m[0], m[1]], [m[2], m[3]]];
        prop_assume!((m[0] * m[3] - m[1] * m[2]).norm() > 0.2 && generic(&v));
        let w = match v.affine_pushforward(mm, [t[0], t[1]]) {
            Ok(w) => w,
            Err(_) => return Ok(()),
        };
        prop_assume!(generic(&w));
        let a = moduli_vector(&v).unwrap();
        let b = moduli_vector(&w).unwrap();
        let scale = 1.0 + a.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(a.split_distance(&b) < 1e-6 * scale, "distance {}", a.split_distance(&b));
    }

    #[test]
    fn field_files_round_trip(p in prop::collection::vec(any::<(f64, f64)>(), 6), q in prop::collection::vec(any::<(f64, f64)>(), 6)) {
        let to_c = |v: Vec<(f64, f64)>| v.into_iter().map(|(a, b)| C64::new(a, b)).collect::<Vec<_>>();
        let (p, q) = (to_c(p), to_c(q));
        prop_assume!(p.iter().chain(&q).all(|z| z.is_finite()));
        let file = FieldFile { degree: 2, p, q, label: None, seed: None };
        let back = parse_field_str(&file.to_json()).unwrap();
        prop_assert_eq!(back, file);
    }
}
