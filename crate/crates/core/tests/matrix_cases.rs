use blform_core::exactla::*;

fn m(rows: &[&[i64]]) -> RationalMatrix {
    RationalMatrix::from_i64(rows)
}

#[test]
fn rref_identity() {
    let (r, p) = RationalMatrix::identity(3).rref();
    assert_eq!(r, RationalMatrix::identity(3));
    assert_eq!(p, vec![0, 1, 2]);
}

#[test]
fn rref_rank_one() {
    let (r, p) = m(&[&[1, 2], &[2, 4]]).rref();
    assert_eq!(r, m(&[&[1, 2], &[0, 0]]));
    assert_eq!(p, vec![0]);
}

#[test]
fn rref_already_reduced() {
    let a = m(&[&[0, 1, 0], &[0, 0, 1]]);
    let (r, p) = a.rref();
    assert_eq!(r, a);
    assert_eq!(p, vec![1, 2]);
}

#[test]
fn rank_examples() {
    assert_eq!(RationalMatrix::zeros(2, 3).rank(), 0);
    assert_eq!(m(&[&[1, 5, 0]]).rank(), 1);
    assert_eq!(m(&[&[0, 1, 0], &[0, 0, 1]]).rank(), 2);
}

#[test]
fn solve_examples() {
    let b = RationalMatrix::column(vec![rat(1), rat(2), rat(3)]);
    assert_eq!(RationalMatrix::identity(3).solve(&b), Some(b.clone()));

    let a = m(&[&[1, 1], &[0, 0]]);
    let b = RationalMatrix::column(vec![rat(1), rat(0)]);
    assert_eq!(a.solve(&b), Some(RationalMatrix::column(vec![rat(1), rat(0)])));

    let a = m(&[&[1, 0], &[0, 0]]);
    let b = RationalMatrix::column(vec![rat(0), rat(1)]);
    assert_eq!(a.solve(&b), None);
}

#[test]
fn inverse_of_example_basis_change() {
    // B from the explicit equivalence of the special triangular form, alpha = 2.
    let b = m(&[&[-1, -2, 1], &[1, 1, 0], &[0, 1, 0]]);
    let inv = b.inverse().unwrap();
    assert_eq!(&b * &inv, RationalMatrix::identity(3));
    assert_eq!(&inv * &b, RationalMatrix::identity(3));
}

#[test]
fn singular_inverse() {
    assert_eq!(
        m(&[&[1, 2], &[2, 4]]).inverse(),
        Err(LinalgError::SingularMatrix)
    );
}

#[test]
fn determinant_matches_cofactor_expansion() {
    let a = m(&[&[2, -1, 3], &[0, 4, 1], &[5, 2, -2]]);
    // 2(4·-2 - 1·2) - (-1)(0·-2 - 1·5) + 3(0·2 - 4·5) = -20 - 5 - 60
    assert_eq!(a.determinant().unwrap(), rat(-85));
    let h = RationalMatrix::from_rows(vec![
        vec![ratio(1, 2), ratio(1, 3)],
        vec![ratio(1, 3), ratio(1, 4)],
    ])
    .unwrap();
    assert_eq!(h.determinant().unwrap(), ratio(1, 72));
}

#[test]
fn nullspace_is_annihilated() {
    let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
    let n = a.nullspace();
    assert_eq!(n.cols(), 2);
    assert!((&a * &n).is_zero());
}

#[test]
fn ragged_rows_rejected() {
    let err = RationalMatrix::from_rows(vec![vec![rat(1)], vec![rat(1), rat(2)]]);
    assert!(matches!(err, Err(LinalgError::Ragged { row: 1, .. })));
}
