//! Projection data `Π = (Π₁, Π₂, Π₃, Π₄)` with target dimensions
//! `(1, 2, 2; 1)`, their normal forms and equivalence witnesses.
//!
//! Conventions: a witness `(A₁, A₂, A₃, A₄, B)` maps `Π` to `Π'` with
//! `Π'_j = A_j Π_j B`. Witnesses are checked in transposed form,
//! `Bᵀ Π_jᵀ A_jᵀ = T_j`, against the target columns returned by
//! [`normal_form_targets`].

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactla::{
    format_rational, parse_rational, rat, range_of_adjoint, to_f64, LinalgError, Rational,
    RationalMatrix, Subspace,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatumError {
    #[error("{name} must be {expected_rows}x3, found {rows}x{cols}")]
    Shape {
        name: &'static str,
        expected_rows: usize,
        rows: usize,
        cols: usize,
    },
    #[error("witness matrix {0} is singular")]
    SingularWitness(&'static str),
    #[error("witness matrix {name} has shape {rows}x{cols}, expected {expected}")]
    WitnessShape {
        name: &'static str,
        rows: usize,
        cols: usize,
        expected: &'static str,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A `(1,2,2;1)` projection datum.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "json::RawDatum", into = "json::RawDatum")]
pub struct BlDatum {
    pi1: RationalMatrix,
    pi2: RationalMatrix,
    pi3: RationalMatrix,
    pi4: RationalMatrix,
}

const ROWS: [usize; 4] = [1, 2, 2, 1];
const NAMES: [&str; 4] = ["pi1", "pi2", "pi3", "pi4"];

impl BlDatum {
    /// Checks shapes only; rank conditions are reported by [`BlDatum::validate`].
    pub fn new(
        pi1: RationalMatrix,
        pi2: RationalMatrix,
        pi3: RationalMatrix,
        pi4: RationalMatrix,
    ) -> Result<Self, DatumError> {
        for (k, m) in [&pi1, &pi2, &pi3, &pi4].into_iter().enumerate() {
            if m.rows() != ROWS[k] || m.cols() != 3 {
                return Err(DatumError::Shape {
                    name: NAMES[k],
                    expected_rows: ROWS[k],
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
        }
        Ok(BlDatum { pi1, pi2, pi3, pi4 })
    }

    /// Datum of `f(x+αy) G(y,z) H(z,x) / (x+y+z)`.
    pub fn special_triangular(alpha: &Rational) -> Self {
        let mut pi1 = RationalMatrix::from_i64(&[&[1, 0, 0]]);
        pi1[(0, 1)] = alpha.clone();
        BlDatum::new(
            pi1,
            RationalMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 1]]),
            RationalMatrix::from_i64(&[&[0, 0, 1], &[1, 0, 0]]),
            RationalMatrix::from_i64(&[&[1, 1, 1]]),
        )
        .expect("fixed shapes")
    }

    /// The canonical datum of a normal form: the transposed targets.
    pub fn of_normal_form(nf: &NormalForm) -> Self {
        let [t1, t2, t3, t4] = normal_form_targets(nf);
        BlDatum::new(t1.transpose(), t2.transpose(), t3.transpose(), t4.transpose())
            .expect("targets have datum shapes")
    }

    pub fn pi(&self, j: usize) -> &RationalMatrix {
        match j {
            1 => &self.pi1,
            2 => &self.pi2,
            3 => &self.pi3,
            4 => &self.pi4,
            _ => panic!("projection index {j} out of range 1..=4"),
        }
    }

    pub fn maps(&self) -> [&RationalMatrix; 4] {
        [&self.pi1, &self.pi2, &self.pi3, &self.pi4]
    }

    /// Reports every violated surjectivity (rank) condition.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (k, m) in self.maps().into_iter().enumerate() {
            let r = m.rank();
            if r != ROWS[k] {
                violations.push(format!("rank({})={} ≠ {}", NAMES[k], r, ROWS[k]));
            }
        }
        ValidationReport { violations }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            write!(f, "valid")
        } else {
            write!(f, "{}", self.violations.join("; "))
        }
    }
}

/// Standard forms `Λ_(1)`, `Λ_(2)`, `Λ_(3)`, `Λ_(4,β)` and the zero form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum NormalForm {
    Zero,
    L1,
    L2,
    L3,
    L4(Rational),
}

impl NormalForm {
    pub fn tag(&self) -> &'static str {
        match self {
            NormalForm::Zero => "Zero",
            NormalForm::L1 => "L1",
            NormalForm::L2 => "L2",
            NormalForm::L3 => "L3",
            NormalForm::L4(_) => "L4",
        }
    }

    pub fn beta(&self) -> Option<&Rational> {
        match self {
            NormalForm::L4(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalForm::L4(b) => write!(f, "L4:{}", format_rational(b)),
            other => f.write_str(other.tag()),
        }
    }
}

impl std::str::FromStr for NormalForm {
    type Err = LinalgError;

    /// Accepts `Zero`, `L1`, `L2`, `L3` and `L4:<rational>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "Zero" | "zero" | "0" => Ok(NormalForm::Zero),
            "L1" => Ok(NormalForm::L1),
            "L2" => Ok(NormalForm::L2),
            "L3" => Ok(NormalForm::L3),
            other => match other.strip_prefix("L4:") {
                Some(beta) => Ok(NormalForm::L4(parse_rational(beta)?)),
                None => Err(LinalgError::Parse(s.to_string())),
            },
        }
    }
}

/// Target matrices `T_j = Bᵀ Π_jᵀ A_jᵀ` (shapes 3×1, 3×2, 3×2, 3×1).
pub fn normal_form_targets(nf: &NormalForm) -> [RationalMatrix; 4] {
    let e1 = RationalMatrix::from_i64(&[&[1], &[0], &[0]]);
    let e1_plus_e3 = RationalMatrix::from_i64(&[&[1], &[0], &[1]]);
    let e3 = RationalMatrix::from_i64(&[&[0], &[0], &[1]]);
    let plane = RationalMatrix::from_i64(&[&[1, 0], &[0, 1], &[0, 0]]);
    let mut t3 = plane.clone();
    let t1 = match nf {
        NormalForm::Zero => e1,
        NormalForm::L1 => {
            t3[(2, 1)] = Rational::one();
            e1
        }
        NormalForm::L2 => {
            t3[(2, 0)] = Rational::one();
            e1
        }
        NormalForm::L3 => {
            t3[(2, 1)] = Rational::one();
            e1_plus_e3
        }
        NormalForm::L4(beta) => {
            t3[(2, 0)] = beta.clone();
            e1_plus_e3
        }
    };
    [t1, plane, t3, e3]
}

/// Invertible `(A₁, A₂, A₃, A₄, B)` acting by `Π'_j = A_j Π_j B`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "json::RawWitness", into = "json::RawWitness")]
pub struct EquivalenceWitness {
    pub a1: RationalMatrix,
    pub a2: RationalMatrix,
    pub a3: RationalMatrix,
    pub a4: RationalMatrix,
    pub b: RationalMatrix,
}

impl EquivalenceWitness {
    pub fn new(
        a1: RationalMatrix,
        a2: RationalMatrix,
        a3: RationalMatrix,
        a4: RationalMatrix,
        b: RationalMatrix,
    ) -> Result<Self, DatumError> {
        let checks: [(&RationalMatrix, &'static str, usize, &'static str); 5] = [
            (&a1, "a1", 1, "1x1"),
            (&a2, "a2", 2, "2x2"),
            (&a3, "a3", 2, "2x2"),
            (&a4, "a4", 1, "1x1"),
            (&b, "b", 3, "3x3"),
        ];
        for (m, name, n, expected) in checks {
            if m.rows() != n || m.cols() != n {
                return Err(DatumError::WitnessShape {
                    name,
                    rows: m.rows(),
                    cols: m.cols(),
                    expected,
                });
            }
        }
        Ok(EquivalenceWitness { a1, a2, a3, a4, b })
    }

    pub fn identity() -> Self {
        EquivalenceWitness {
            a1: RationalMatrix::identity(1),
            a2: RationalMatrix::identity(2),
            a3: RationalMatrix::identity(2),
            a4: RationalMatrix::identity(1),
            b: RationalMatrix::identity(3),
        }
    }

    pub fn a(&self, j: usize) -> &RationalMatrix {
        match j {
            1 => &self.a1,
            2 => &self.a2,
            3 => &self.a3,
            4 => &self.a4,
            _ => panic!("witness index {j} out of range 1..=4"),
        }
    }

    fn named(&self) -> [(&'static str, &RationalMatrix); 5] {
        [
            ("a1", &self.a1),
            ("a2", &self.a2),
            ("a3", &self.a3),
            ("a4", &self.a4),
            ("b", &self.b),
        ]
    }

    /// Determinants in the order `a1, a2, a3, a4, b`.
    pub fn determinants(&self) -> [Rational; 5] {
        self.named()
            .map(|(_, m)| m.determinant().expect("witness matrices are square"))
    }

    pub fn check_invertible(&self) -> Result<(), DatumError> {
        for (name, m) in self.named() {
            if m.determinant()?.is_zero() {
                return Err(DatumError::SingularWitness(name));
            }
        }
        Ok(())
    }

    /// The witness undoing `self`: `(A_j⁻¹, B⁻¹)`.
    pub fn inverse(&self) -> Result<Self, DatumError> {
        let inv = |name: &'static str, m: &RationalMatrix| {
            m.inverse().map_err(|_| DatumError::SingularWitness(name))
        };
        Ok(EquivalenceWitness {
            a1: inv("a1", &self.a1)?,
            a2: inv("a2", &self.a2)?,
            a3: inv("a3", &self.a3)?,
            a4: inv("a4", &self.a4)?,
            b: inv("b", &self.b)?,
        })
    }

    /// Witness of applying `self` first, then `then`.
    pub fn then(&self, then: &EquivalenceWitness) -> Self {
        EquivalenceWitness {
            a1: &then.a1 * &self.a1,
            a2: &then.a2 * &self.a2,
            a3: &then.a3 * &self.a3,
            a4: &then.a4 * &self.a4,
            b: &self.b * &then.b,
        }
    }
}

/// `Π'_j = A_j Π_j B`.
pub fn apply_witness(d: &BlDatum, w: &EquivalenceWitness) -> Result<BlDatum, DatumError> {
    w.check_invertible()?;
    let map = |j: usize| &(w.a(j) * d.pi(j)) * &w.b;
    BlDatum::new(map(1), map(2), map(3), map(4))
}

/// Exact check of `Bᵀ Π_jᵀ A_jᵀ = T_j` for all four maps.
pub fn verify_witness(d: &BlDatum, w: &EquivalenceWitness, nf: &NormalForm) -> bool {
    verify_against(d, w, &normal_form_targets(nf))
}

pub(crate) fn verify_against(
    d: &BlDatum,
    w: &EquivalenceWitness,
    targets: &[RationalMatrix; 4],
) -> bool {
    if w.check_invertible().is_err() {
        return false;
    }
    (1..=4).all(|j| {
        let image = &(&w.b.transpose() * &d.pi(j).transpose()) * &w.a(j).transpose();
        image == targets[j - 1]
    })
}

/// The spaces `V_j = range(Π_jᵀ)` and the relations driving classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceProfile {
    pub v: [Subspace; 4],
    pub v2_eq_v3: bool,
    pub v1_in_v2: bool,
    pub v1_in_v3: bool,
    /// `V₁ ⊆ span(V₂∩V₃, V₄)`.
    pub v1_in_w_plus_v4: bool,
    /// `V₄ ∩ V_j = {0}` for `j = 1, 2, 3`.
    pub v4_meets_trivially: [bool; 3],
}

impl SubspaceProfile {
    pub fn hypothesis_holds(&self) -> bool {
        self.v4_meets_trivially.iter().all(|&b| b)
    }

    pub fn v2_cap_v3(&self) -> Subspace {
        self.v[1].intersect(&self.v[2])
    }
}

pub fn subspace_profile(d: &BlDatum) -> SubspaceProfile {
    let v = d.maps().map(range_of_adjoint);
    let w = v[1].intersect(&v[2]);
    SubspaceProfile {
        v2_eq_v3: v[1] == v[2],
        v1_in_v2: v[1].contains(&v[0]),
        v1_in_v3: v[2].contains(&v[0]),
        v1_in_w_plus_v4: w.sum(&v[3]).contains(&v[0]),
        v4_meets_trivially: [0, 1, 2].map(|j| v[3].intersect(&v[j]).is_trivial()),
        v,
    }
}

/// Exponents `(p₁, p₂, p₃)` in `[1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentTriple {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl ExponentTriple {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Option<Self> {
        let ok = |p: f64| p >= 1.0 && !p.is_nan();
        (ok(p1) && ok(p2) && ok(p3)).then_some(ExponentTriple { p1, p2, p3 })
    }

    pub fn reciprocals(&self) -> [f64; 3] {
        [self.p1, self.p2, self.p3].map(|p| if p.is_infinite() { 0.0 } else { 1.0 / p })
    }

    /// `p₁ = ∞`, `1/p₂ + 1/p₃ = 1`, `1 < p₂, p₃ < ∞`.
    pub fn in_endpoint_range(&self) -> bool {
        let [_, r2, r3] = self.reciprocals();
        self.p1.is_infinite()
            && (r2 + r3 - 1.0).abs() < 1e-12
            && self.p2 > 1.0
            && self.p3 > 1.0
            && self.p2.is_finite()
            && self.p3.is_finite()
    }
}

impl std::str::FromStr for ExponentTriple {
    type Err = String;

    /// `"inf,2,2"` or `"∞,3,3/2"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected three comma-separated exponents, got {s:?}"));
        }
        let parse = |t: &str| -> Result<f64, String> {
            match t {
                "inf" | "∞" | "infinity" | "Inf" => Ok(f64::INFINITY),
                _ => parse_rational(t)
                    .map(|r| to_f64(&r))
                    .map_err(|e| e.to_string()),
            }
        };
        let (p1, p2, p3) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        ExponentTriple::new(p1, p2, p3).ok_or_else(|| format!("exponents must lie in [1, ∞]: {s:?}"))
    }
}

/// Change of constant under an equivalence:
/// `|a₄|^(1/p₁+2/p₂+2/p₃−3) / (|det B| ∏_{j≤3} |det A_j|^(1/p_j))`.
pub fn constant_factor(w: &EquivalenceWitness, p: &ExponentTriple) -> Result<f64, DatumError> {
    w.check_invertible()?;
    let [r1, r2, r3] = p.reciprocals();
    let dets = w.determinants().map(|d| to_f64(&d.abs()));
    let exponent = r1 + 2.0 * r2 + 2.0 * r3 - 3.0;
    let numerator = dets[3].powf(exponent);
    let denominator = dets[4] * dets[0].powf(r1) * dets[1].powf(r2) * dets[2].powf(r3);
    Ok(numerator / denominator)
}

/// Explicit witness taking the special triangular datum to `L4(1−α)`, `α ≠ 1`.
pub fn triangular_witness(alpha: &Rational) -> Option<EquivalenceWitness> {
    if alpha.is_one() {
        return None;
    }
    let one = Rational::one();
    let inv = &one / (alpha - &one);
    let a2 = RationalMatrix::from_rows(vec![
        vec![alpha - &one, -one.clone()],
        vec![Rational::zero(), one.clone()],
    ])
    .expect("2x2");
    let a3 = RationalMatrix::from_rows(vec![
        vec![-alpha.clone(), &one - alpha],
        vec![one.clone(), Rational::zero()],
    ])
    .expect("2x2");
    let b = RationalMatrix::from_rows(vec![
        vec![-inv.clone(), -(alpha * &inv), one.clone()],
        vec![inv.clone(), inv.clone(), Rational::zero()],
        vec![Rational::zero(), one.clone(), Rational::zero()],
    ])
    .expect("3x3");
    let unit = RationalMatrix::identity(1);
    EquivalenceWitness::new(unit.clone(), a2, a3, unit, b).ok()
}

/// The `α = 1` matrices as usually displayed. They do not map the datum onto
/// the `L3` targets; kept so the discrepancy stays checkable.
pub fn triangular_unit_witness_as_displayed() -> EquivalenceWitness {
    let unit = RationalMatrix::identity(1);
    EquivalenceWitness::new(
        unit.clone(),
        RationalMatrix::from_i64(&[&[0, 1], &[1, 0]]),
        RationalMatrix::from_i64(&[&[1, 0], &[-1, -1]]),
        unit,
        RationalMatrix::from_i64(&[&[-1, -1, 1], &[0, 1, 0], &[1, 0, 0]]),
    )
    .expect("fixed shapes")
}

/// A witness taking the special triangular datum with `α = 1` to `L3`.
pub fn triangular_unit_witness() -> EquivalenceWitness {
    let unit = RationalMatrix::identity(1);
    EquivalenceWitness::new(
        unit.clone(),
        RationalMatrix::from_i64(&[&[0, -1], &[-1, 0]]),
        RationalMatrix::from_i64(&[&[-1, 0], &[1, 1]]),
        unit,
        RationalMatrix::from_i64(&[&[1, 1, 1], &[0, -1, 0], &[-1, 0, 0]]),
    )
    .expect("fixed shapes")
}

/// JSON wire format: rationals are written as strings (`"p"` or `"p/q"`)
/// and read from integers or strings.
pub mod json {
    use super::*;

    #[derive(Serialize, Deserialize, Clone, Debug)]
    #[serde(untagged)]
    pub enum RawRational {
        Int(i64),
        Text(String),
    }

    impl RawRational {
        pub fn parse(&self) -> Result<Rational, LinalgError> {
            match self {
                RawRational::Int(n) => Ok(rat(*n)),
                RawRational::Text(s) => parse_rational(s),
            }
        }
    }

    pub type RawMatrix = Vec<Vec<RawRational>>;

    pub fn matrix_from_raw(raw: &RawMatrix) -> Result<RationalMatrix, LinalgError> {
        let rows = raw
            .iter()
            .map(|r| r.iter().map(RawRational::parse).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        RationalMatrix::from_rows(rows)
    }

    pub fn matrix_to_raw(m: &RationalMatrix) -> RawMatrix {
        m.to_rows()
            .iter()
            .map(|r| r.iter().map(|v| RawRational::Text(format_rational(v))).collect())
            .collect()
    }

    #[derive(Serialize, Deserialize)]
    pub struct RawDatum {
        pub pi1: RawMatrix,
        pub pi2: RawMatrix,
        pub pi3: RawMatrix,
        pub pi4: RawMatrix,
    }

    impl TryFrom<RawDatum> for BlDatum {
        type Error = DatumError;

        fn try_from(raw: RawDatum) -> Result<Self, DatumError> {
            BlDatum::new(
                matrix_from_raw(&raw.pi1)?,
                matrix_from_raw(&raw.pi2)?,
                matrix_from_raw(&raw.pi3)?,
                matrix_from_raw(&raw.pi4)?,
            )
        }
    }

    impl From<BlDatum> for RawDatum {
        fn from(d: BlDatum) -> Self {
            RawDatum {
                pi1: matrix_to_raw(&d.pi1),
                pi2: matrix_to_raw(&d.pi2),
                pi3: matrix_to_raw(&d.pi3),
                pi4: matrix_to_raw(&d.pi4),
            }
        }
    }

    #[derive(Serialize, Deserialize)]
    pub struct RawWitness {
        pub a1: RawMatrix,
        pub a2: RawMatrix,
        pub a3: RawMatrix,
        pub a4: RawMatrix,
        pub b: RawMatrix,
    }

    impl TryFrom<RawWitness> for EquivalenceWitness {
        type Error = DatumError;

        fn try_from(raw: RawWitness) -> Result<Self, DatumError> {
            EquivalenceWitness::new(
                matrix_from_raw(&raw.a1)?,
                matrix_from_raw(&raw.a2)?,
                matrix_from_raw(&raw.a3)?,
                matrix_from_raw(&raw.a4)?,
                matrix_from_raw(&raw.b)?,
            )
        }
    }

    impl From<EquivalenceWitness> for RawWitness {
        fn from(w: EquivalenceWitness) -> Self {
            RawWitness {
                a1: matrix_to_raw(&w.a1),
                a2: matrix_to_raw(&w.a2),
                a3: matrix_to_raw(&w.a3),
                a4: matrix_to_raw(&w.a4),
                b: matrix_to_raw(&w.b),
            }
        }
    }
}
