use num_traits::Zero;

use super::{Rational, RationalMatrix};

/// A linear subspace of `Q^n` stored in canonical form.
///
/// The basis columns are the nonzero rows of the RREF of the matrix whose
/// rows are any spanning set. RREF is unique, so two values compare equal
/// exactly when they describe the same space.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: RationalMatrix,
}

impl Subspace {
    /// Span of the columns of `m`.
    pub fn column_span(m: &RationalMatrix) -> Self {
        let ambient = m.rows();
        let (r, pivots) = m.transpose().rref();
        let mut basis = RationalMatrix::zeros(ambient, pivots.len());
        for k in 0..pivots.len() {
            for i in 0..ambient {
                basis[(i, k)] = r[(k, i)].clone();
            }
        }
        Subspace { ambient, basis }
    }

    pub fn span(ambient: usize, vectors: &[Vec<Rational>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let m = RationalMatrix::from_columns(vectors).expect("vectors of equal length");
        assert_eq!(m.rows(), ambient, "vector length differs from ambient dimension");
        Self::column_span(&m)
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: RationalMatrix::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::column_span(&RationalMatrix::identity(ambient))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Canonical basis, one vector per column.
    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn basis_vector(&self, k: usize) -> Vec<Rational> {
        self.basis.col(k)
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        if self.is_trivial() {
            return false;
        }
        self.basis
            .solve(&RationalMatrix::column(v.to_vec()))
            .is_some()
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> bool {
        assert_eq!(self.ambient, other.ambient);
        (0..other.dim()).all(|k| self.contains_vector(&other.basis_vector(k)))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let stacked = self
            .basis
            .hstack(&other.basis)
            .expect("equal ambient dimension");
        Self::column_span(&stacked)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        if self.is_trivial() || other.is_trivial() {
            return Self::zero(self.ambient);
        }
        // (a, b) with S a = T b, i.e. the kernel of [S | -T].
        let neg = other.basis.scale(&-Rational::from_integer(1.into()));
        let stacked = self.basis.hstack(&neg).expect("equal ambient dimension");
        let kernel = stacked.nullspace();
        if kernel.cols() == 0 {
            return Self::zero(self.ambient);
        }
        let mut a = RationalMatrix::zeros(self.dim(), kernel.cols());
        for i in 0..self.dim() {
            for j in 0..kernel.cols() {
                a[(i, j)] = kernel[(i, j)].clone();
            }
        }
        Self::column_span(&(&self.basis * &a))
    }
}

/// `V = range(Pᵀ)`, the row space of `P` seen as a subspace of `Q^cols`.
pub fn range_of_adjoint(p: &RationalMatrix) -> Subspace {
    Subspace::column_span(&p.transpose())
}
