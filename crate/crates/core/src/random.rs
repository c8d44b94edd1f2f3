//! Seeded random rational matrices, witnesses and data for property tests
//! and the CLI self-test.

use num_traits::Zero;
use rand::Rng;

use crate::datum::{subspace_profile, BlDatum, EquivalenceWitness};
use crate::exactla::{ratio, Rational, RationalMatrix};

/// `p/q` with `p ∈ [−5, 5]`, `q ∈ {1, 2, 3}`.
pub fn small_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    ratio(rng.gen_range(-5..=5), rng.gen_range(1..=3))
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = small_rational(rng);
        }
    }
    m
}

pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RationalMatrix {
    loop {
        let m = random_matrix(rng, n, n);
        if !m.determinant().expect("square").is_zero() {
            return m;
        }
    }
}

pub fn random_witness<R: Rng + ?Sized>(rng: &mut R) -> EquivalenceWitness {
    EquivalenceWitness::new(
        random_invertible(rng, 1),
        random_invertible(rng, 2),
        random_invertible(rng, 2),
        random_invertible(rng, 1),
        random_invertible(rng, 3),
    )
    .expect("shapes fixed")
}

/// A valid datum with `V₄ ∩ V_j = {0}` for `j = 1, 2, 3`.
///
/// Entries are drawn from a small alphabet that includes many zeros so that
/// the special coincidences (`V₁ ⊆ V₂`, `V₂ = V₃`, ...) occur with positive
/// frequency.
pub fn random_datum<R: Rng + ?Sized>(rng: &mut R) -> BlDatum {
    let entry = |rng: &mut R| {
        if rng.gen_bool(0.45) {
            Rational::zero()
        } else {
            ratio(rng.gen_range(-2..=2), rng.gen_range(1..=2))
        }
    };
    loop {
        let draw = |rows: usize, rng: &mut R| {
            let mut m = RationalMatrix::zeros(rows, 3);
            for i in 0..rows {
                for j in 0..3 {
                    m[(i, j)] = entry(rng);
                }
            }
            m
        };
        let pi1 = draw(1, rng);
        let pi2 = draw(2, rng);
        let pi3 = if rng.gen_bool(0.15) {
            &random_invertible(rng, 2) * &pi2
        } else {
            draw(2, rng)
        };
        let pi4 = draw(1, rng);
        let d = BlDatum::new(pi1, pi2, pi3, pi4).expect("fixed shapes");
        if d.validate().is_valid() && subspace_profile(&d).hypothesis_holds() {
            return d;
        }
    }
}
