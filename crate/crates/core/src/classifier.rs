//! Reduction of a datum to its normal form.
//!
//! Every case builds a basis `v₁, v₂, v₃` of `Q³` whose images under the
//! targets land in the right spaces: column `k` of `M·T_j` lies in `V_j`,
//! where `M = [v₁ v₂ v₃]`. Then `Bᵀ = M⁻¹` and `A_jᵀ` is the unique
//! solution of `Π_jᵀ A_jᵀ = M T_j`.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::datum::{
    normal_form_targets, subspace_profile, verify_against, BlDatum, EquivalenceWitness,
    NormalForm, SubspaceProfile, ValidationReport,
};
use crate::exactla::{format_rational, rat, Rational, RationalMatrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("invalid datum: {0}")]
    InvalidDatum(ValidationReport),
    #[error("hypothesis violated: V4 ∩ V{j} is nontrivial")]
    HypothesisViolated { j: usize },
    #[error("internal degeneracy: {0}")]
    InternalDegeneracy(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationResult {
    pub normal_form: NormalForm,
    pub witness: EquivalenceWitness,
    pub profile: SubspaceProfile,
}

type Vector = Vec<Rational>;

fn degenerate(what: &str) -> ClassifyError {
    ClassifyError::InternalDegeneracy(what.to_string())
}

fn add(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn scaled(c: &Rational, v: &[Rational]) -> Vector {
    v.iter().map(|x| c * x).collect()
}

fn is_zero(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn independent(vs: &[&Vector]) -> bool {
    let cols: Vec<Vector> = vs.iter().map(|v| (*v).clone()).collect();
    RationalMatrix::from_columns(&cols)
        .map(|m| m.rank() == vs.len())
        .unwrap_or(false)
}

/// Coefficients `c` with `Σ c_k cols_k = v`; `None` if `v` is outside the span.
fn coordinates(cols: &[&Vector], v: &[Rational]) -> Option<Vector> {
    let owned: Vec<Vector> = cols.iter().map(|c| (*c).clone()).collect();
    let m = RationalMatrix::from_columns(&owned).ok()?;
    m.solve(&RationalMatrix::column(v.to_vec())).map(|x| x.col(0))
}

/// First canonical basis vector of `space` independent of `given`.
fn complete(space: &Subspace, given: &Vector) -> Result<Vector, ClassifyError> {
    (0..space.dim())
        .map(|k| space.basis_vector(k))
        .find(|b| independent(&[given, b]))
        .ok_or_else(|| degenerate("no completing vector"))
}

fn spanning(space: &Subspace) -> Result<Vector, ClassifyError> {
    if space.dim() == 0 {
        return Err(degenerate("expected a nonzero subspace"));
    }
    Ok(space.basis_vector(0))
}

/// Splits `v = w + u` with `w ∈ plane`, `u ∈ line`, for complementary spaces.
fn split(plane: &Subspace, line: &Subspace, v: &[Rational]) -> Result<(Vector, Vector), ClassifyError> {
    let (p0, p1, l0) = (plane.basis_vector(0), plane.basis_vector(1), line.basis_vector(0));
    let c = coordinates(&[&p0, &p1, &l0], v).ok_or_else(|| degenerate("spaces not complementary"))?;
    let w = add(&scaled(&c[0], &p0), &scaled(&c[1], &p1));
    Ok((w, scaled(&c[2], &l0)))
}

fn check_input(d: &BlDatum) -> Result<SubspaceProfile, ClassifyError> {
    let report = d.validate();
    if !report.is_valid() {
        return Err(ClassifyError::InvalidDatum(report));
    }
    let profile = subspace_profile(d);
    if let Some(k) = profile.v4_meets_trivially.iter().position(|&ok| !ok) {
        return Err(ClassifyError::HypothesisViolated { j: k + 1 });
    }
    Ok(profile)
}

/// Decision tree only: the normal form without a witness.
fn decide(p: &SubspaceProfile) -> Result<NormalForm, ClassifyError> {
    Ok(match (p.v2_eq_v3, p.v1_in_v2, p.v1_in_v3) {
        (true, true, _) => NormalForm::Zero,
        (true, false, _) => NormalForm::L4(Rational::zero()),
        (false, true, true) => NormalForm::L1,
        (false, true, false) => NormalForm::L2,
        (false, false, true) => NormalForm::L4(Rational::one()),
        (false, false, false) if p.v1_in_w_plus_v4 => NormalForm::L3,
        (false, false, false) => return case6_basis(p).map(|(_, beta)| NormalForm::L4(beta)),
    })
}

/// Basis `(v₁, v₂, v₃)` and `β = α₃/α₁` for the generic case.
fn case6_basis(p: &SubspaceProfile) -> Result<([Vector; 3], Rational), ClassifyError> {
    let [v1s, v2s, v3s, v4s] = &p.v;
    let w = p.v2_cap_v3();
    let v2 = spanning(&w)?;
    let (v1, v3) = split(v2s, v4s, &spanning(v1s)?)?;
    let v = complete(v3s, &v2)?;
    let alpha = coordinates(&[&v1, &v2, &v3], &v).ok_or_else(|| degenerate("case 6 basis"))?;
    if alpha[0].is_zero() {
        return Err(degenerate("case 6: α₁ = 0"));
    }
    let beta = &alpha[2] / &alpha[0];
    Ok(([v1, v2, v3], beta))
}

fn basis_for(p: &SubspaceProfile, nf: &NormalForm) -> Result<[Vector; 3], ClassifyError> {
    let [v1s, v2s, v3s, v4s] = &p.v;
    let w = p.v2_cap_v3();
    let basis = match nf {
        NormalForm::Zero => {
            let v1 = spanning(v1s)?;
            let v2 = complete(v2s, &v1)?;
            [v1, v2, spanning(v4s)?]
        }
        NormalForm::L4(b) if b.is_zero() && p.v2_eq_v3 => {
            let (v1, v3) = split(v2s, v4s, &spanning(v1s)?)?;
            let v2 = complete(v2s, &v1)?;
            [v1, v2, v3]
        }
        NormalForm::L1 => {
            let v1 = spanning(v1s)?;
            let (v2, v3) = split(v2s, v4s, &complete(v3s, &v1)?)?;
            [v1, v2, v3]
        }
        NormalForm::L2 => {
            let u = spanning(v1s)?;
            let v2 = spanning(&w)?;
            let (w2, v3) = split(v2s, v4s, &complete(v3s, &v2)?)?;
            let c = coordinates(&[&u, &v2], &w2).ok_or_else(|| degenerate("case 3 split"))?;
            if c[0].is_zero() {
                return Err(degenerate("case 3: a = 0"));
            }
            [scaled(&c[0], &u), v2, v3]
        }
        NormalForm::L4(b) if b.is_one() => {
            let v2 = spanning(&w)?;
            let (v1, v3) = split(v2s, v4s, &spanning(v1s)?)?;
            [v1, v2, v3]
        }
        NormalForm::L3 => {
            let (v1, v3) = split_line_line(&w, v4s, &spanning(v1s)?)?;
            let v = complete(v3s, &v1)?;
            let (w2, rest) = split(v2s, v4s, &v)?;
            let gamma = coordinates(&[&v3], &rest)
                .map(|c| c[0].clone())
                .ok_or_else(|| degenerate("case 5 split"))?;
            if gamma.is_zero() {
                return Err(degenerate("case 5: γ = 0"));
            }
            let v2 = scaled(&(Rational::one() / gamma), &w2);
            [v1, v2, v3]
        }
        NormalForm::L4(_) => case6_basis(p)?.0,
    };
    if basis.iter().any(|v| is_zero(v)) || !independent(&[&basis[0], &basis[1], &basis[2]]) {
        return Err(degenerate("constructed vectors are dependent"));
    }
    Ok(basis)
}

/// Splits `v = a + b` with `a ∈ l1`, `b ∈ l2` for two lines whose sum contains `v`.
fn split_line_line(l1: &Subspace, l2: &Subspace, v: &[Rational]) -> Result<(Vector, Vector), ClassifyError> {
    let (a, b) = (spanning(l1)?, spanning(l2)?);
    let c = coordinates(&[&a, &b], v).ok_or_else(|| degenerate("vector outside W + V4"))?;
    Ok((scaled(&c[0], &a), scaled(&c[1], &b)))
}

fn witness_from_basis(
    d: &BlDatum,
    basis: &[Vector; 3],
    nf: &NormalForm,
) -> Result<EquivalenceWitness, ClassifyError> {
    let m = RationalMatrix::from_columns(basis).expect("three vectors of length 3");
    let m_inv = m.inverse().map_err(|_| degenerate("basis matrix singular"))?;
    let targets = normal_form_targets(nf);
    let mut a = Vec::with_capacity(4);
    for j in 1..=4 {
        let rhs = &m * &targets[j - 1];
        let at = d
            .pi(j)
            .transpose()
            .solve_matrix(&rhs)
            .ok_or_else(|| degenerate(&format!("M·T{j} not in V{j}")))?;
        a.push(at.transpose());
    }
    let [a1, a2, a3, a4]: [RationalMatrix; 4] = a.try_into().expect("four maps");
    let w = EquivalenceWitness::new(a1, a2, a3, a4, m_inv.transpose())
        .map_err(|e| degenerate(&e.to_string()))?;
    if !verify_against(d, &w, &targets) {
        return Err(degenerate("synthesised witness failed verification"));
    }
    Ok(w)
}

/// Normal form of `d` together with a verified witness.
pub fn classify(d: &BlDatum) -> Result<ClassificationResult, ClassifyError> {
    let profile = check_input(d)?;
    let normal_form = decide(&profile)?;
    let basis = basis_for(&profile, &normal_form)?;
    let witness = witness_from_basis(d, &basis, &normal_form)?;
    Ok(ClassificationResult {
        normal_form,
        witness,
        profile,
    })
}

/// Same normal form, including the exact value of `β`.
pub fn equivalent(d1: &BlDatum, d2: &BlDatum) -> Result<bool, ClassifyError> {
    Ok(classify(d1)?.normal_form == classify(d2)?.normal_form)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrossRatio {
    Finite(Rational),
    /// Vanishing denominator: the first plane coincides with the second,
    /// or the third with the fourth.
    Infinite,
}

impl fmt::Display for CrossRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossRatio::Finite(r) => f.write_str(&format_rational(r)),
            CrossRatio::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrossRatioError {
    #[error("cross ratio undefined: V2 = V3")]
    Undefined,
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("line is not admissible: {0}")]
    InadmissibleLine(String),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// Affine line `point + s·direction` in `Q³`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub point: Vector,
    pub direction: Vector,
}

impl Line {
    pub fn new(point: Vector, direction: Vector) -> Self {
        assert!(point.len() == 3 && direction.len() == 3, "lines live in Q^3");
        Line { point, direction }
    }

    pub fn from_i64(point: [i64; 3], direction: [i64; 3]) -> Self {
        Line::new(point.map(rat).to_vec(), direction.map(rat).to_vec())
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The four planes `span(V₁,W), V₂, V₃, span(V₄,W)` as normal vectors.
fn pencil(d: &BlDatum) -> Result<(Subspace, [Vector; 4]), CrossRatioError> {
    let report = d.validate();
    if !report.is_valid() {
        return Err(ClassifyError::InvalidDatum(report).into());
    }
    let p = subspace_profile(d);
    if p.v2_eq_v3 {
        return Err(CrossRatioError::Undefined);
    }
    let w = p.v2_cap_v3();
    let planes = [w.sum(&p.v[0]), p.v[1].clone(), p.v[2].clone(), w.sum(&p.v[3])];
    let mut normals = Vec::with_capacity(4);
    for (k, plane) in planes.iter().enumerate() {
        if plane.dim() != 2 {
            return Err(CrossRatioError::DegenerateConfiguration(format!(
                "plane {} has dimension {}",
                k + 1,
                plane.dim()
            )));
        }
        normals.push(plane.basis().transpose().nullspace().col(0));
    }
    Ok((w, normals.try_into().expect("four normals")))
}

fn ratio_on(w: &Subspace, normals: &[Vector; 4], line: &Line) -> Result<CrossRatio, CrossRatioError> {
    let (p, dir) = (&line.point, &line.direction);
    if is_zero(dir) {
        return Err(CrossRatioError::InadmissibleLine("zero direction".into()));
    }
    let through = Subspace::span(3, &[dir.clone(), w.basis_vector(0)]);
    if through.contains_vector(p) {
        return Err(CrossRatioError::InadmissibleLine("line meets V2 ∩ V3".into()));
    }
    let mut s = Vec::with_capacity(4);
    for n in normals {
        let nd = dot(n, dir);
        if nd.is_zero() {
            return Err(CrossRatioError::InadmissibleLine("line parallel to a plane".into()));
        }
        s.push(-dot(n, p) / nd);
    }
    let num = (&s[0] - &s[3]) * (&s[2] - &s[1]);
    let den = (&s[0] - &s[1]) * (&s[2] - &s[3]);
    Ok(if den.is_zero() {
        CrossRatio::Infinite
    } else {
        CrossRatio::Finite(num / den)
    })
}

/// Cross ratio of the four planes read along a caller-supplied line.
pub fn cross_ratio_along(d: &BlDatum, line: &Line) -> Result<CrossRatio, CrossRatioError> {
    let (w, normals) = pencil(d)?;
    ratio_on(&w, &normals, line)
}

/// Lines through pairs of lattice points of `{−2,…,2}³`, in lexicographic order.
pub fn candidate_lines() -> impl Iterator<Item = Line> {
    let points: Vec<[i64; 3]> = (-2..=2)
        .flat_map(|x| (-2..=2).flat_map(move |y| (-2..=2).map(move |z| [x, y, z])))
        .collect();
    let n = points.len();
    (0..n).flat_map(move |i| {
        let points = points.clone();
        (i + 1..n).map(move |j| {
            let (a, b) = (points[i], points[j]);
            Line::from_i64(a, [b[0] - a[0], b[1] - a[1], b[2] - a[2]])
        })
    })
}

/// Cross ratio of the pencil through `V₂ ∩ V₃`, read along the first
/// admissible candidate line.
pub fn cross_ratio(d: &BlDatum) -> Result<CrossRatio, CrossRatioError> {
    let (w, normals) = pencil(d)?;
    candidate_lines()
        .find_map(|line| ratio_on(&w, &normals, &line).ok())
        .ok_or_else(|| CrossRatioError::DegenerateConfiguration("no admissible lattice line".into()))
}
