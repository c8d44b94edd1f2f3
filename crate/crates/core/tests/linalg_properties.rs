use blform_core::exactla::{range_of_adjoint, ratio, Rational, RationalMatrix, Subspace};
use blform_core::random::{random_invertible, random_matrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec((-4i64..=4, 1i64..=3), rows * cols).prop_map(move |xs| {
        let entries: Vec<Vec<Rational>> = xs
            .chunks(cols)
            .map(|r| r.iter().map(|&(p, q)| ratio(p, q)).collect())
            .collect();
        RationalMatrix::from_rows(entries).unwrap()
    })
}

fn sparse_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec(prop_oneof![Just(0i64), -2i64..=2], rows * cols).prop_map(move |xs| {
        let entries: Vec<Vec<Rational>> = xs
            .chunks(cols)
            .map(|r| r.iter().map(|&p| ratio(p, 1)).collect())
            .collect();
        RationalMatrix::from_rows(entries).unwrap()
    })
}

proptest! {
    #[test]
    fn rref_is_idempotent(m in matrix(3, 4)) {
        let (r, pivots) = m.rref();
        let (rr, pivots2) = r.rref();
        prop_assert_eq!(&r, &rr);
        prop_assert_eq!(pivots, pivots2);
    }

    #[test]
    fn rank_of_transpose(m in sparse_matrix(3, 4)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn inverse_iff_full_rank(m in sparse_matrix(3, 3)) {
        match m.inverse() {
            Ok(inv) => {
                prop_assert_eq!(m.rank(), 3);
                prop_assert_eq!(&inv * &m, RationalMatrix::identity(3));
            }
            Err(_) => prop_assert!(m.rank() < 3),
        }
    }

    #[test]
    fn modular_law(a in sparse_matrix(3, 2), b in sparse_matrix(3, 2)) {
        let (s, t) = (Subspace::column_span(&a), Subspace::column_span(&b));
        prop_assert_eq!(s.intersect(&t).dim() + s.sum(&t).dim(), s.dim() + t.dim());
        prop_assert!(s.contains(&s.intersect(&t)) && t.contains(&s.intersect(&t)));
    }

    #[test]
    fn equality_is_representation_equality(a in sparse_matrix(3, 2), b in sparse_matrix(3, 2)) {
        let (s, t) = (Subspace::column_span(&a), Subspace::column_span(&b));
        let same_space = s.contains(&t) && t.contains(&s);
        prop_assert_eq!(same_space, s.basis() == t.basis());
        prop_assert_eq!(same_space, s == t);
    }

    #[test]
    fn solve_returns_a_solution(a in sparse_matrix(3, 3), x in sparse_matrix(3, 1)) {
        let b = &a * &x;
        let y = a.solve(&b).expect("consistent by construction");
        prop_assert_eq!(&a * &y, b);
    }

    #[test]
    fn adjoint_range_dimension_is_rank(p in sparse_matrix(2, 3)) {
        prop_assert_eq!(range_of_adjoint(&p).dim(), p.rank());
    }
}

#[test]
fn seeded_random_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = random_invertible(&mut rng, 3);
    assert_eq!(&a * &a.inverse().unwrap(), RationalMatrix::identity(3));
    let m = random_matrix(&mut rng, 3, 3);
    if let Ok(inv) = m.inverse() {
        assert_eq!(&inv * &m, RationalMatrix::identity(3));
    }
}

#[test]
fn displayed_b_matrix_inverse() {
    let b = RationalMatrix::from_i64(&[&[-1, -2, 1], &[1, 1, 0], &[0, 1, 0]]);
    let inv = b.inverse().unwrap();
    assert_eq!(&b * &inv, RationalMatrix::identity(3));
    assert_eq!(inv, RationalMatrix::from_i64(&[&[0, 1, -1], &[0, 0, 1], &[1, 1, 1]]));
}
