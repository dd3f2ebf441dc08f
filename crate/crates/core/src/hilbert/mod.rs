//! States, operators, measurement and weak values on `C^2`, `C^4`, `C^8`,
//! plus the map from graded formulas to operators and states.

mod gates;
mod interpret;

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::evaluation::{tolerance, EvalError};

pub use gates::{
    and_gate, gate_apply, gate_matrix, kron, not_gate, or_gate, petri_toffoli, sqrt_not_gate, ExactComplex, Gate,
    GateScalar,
};
pub use interpret::{cut_probability, interpret_operator, interpret_state, weak_expectation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HilbertError {
    #[error("dimension error: {0}")]
    Dim(String),
    #[error("state has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("operator is not a {0}")]
    Kind(&'static str),
    #[error("not a density operator: {0}")]
    NotDensity(String),
    #[error("outcome {0} has zero probability")]
    ZeroProbability(usize),
    #[error("pre- and post-selected states are orthogonal")]
    Orthogonal,
    #[error("formula `{0}` is outside the interpreted fragment")]
    Uninterpreted(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_dim(d: usize) -> Result<(), HilbertError> {
    if d >= 2 && d.is_power_of_two() {
        Ok(())
    } else {
        Err(HilbertError::Dim(format!("{d} is not 2^n with n >= 1")))
    }
}

/// A unit vector of `⊗^n C^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self, HilbertError> {
        check_dim(amps.len())?;
        let v = DVector::from_vec(amps);
        let n = v.norm();
        if (n - 1.0).abs() > tolerance() {
            return Err(HilbertError::NotUnit(n));
        }
        Ok(StateVector { amps: v })
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self, HilbertError> {
        check_dim(amps.len())?;
        let v = DVector::from_vec(amps);
        let n = v.norm();
        if n <= tolerance() {
            return Err(HilbertError::NotUnit(n));
        }
        Ok(StateVector { amps: v / c(n, 0.0) })
    }

    pub fn basis(dim: usize, i: usize) -> Result<Self, HilbertError> {
        check_dim(dim)?;
        if i >= dim {
            return Err(HilbertError::Dim(format!("basis index {i} out of range for dimension {dim}")));
        }
        let mut v = vec![c(0.0, 0.0); dim];
        v[i] = c(1.0, 0.0);
        Self::new(v)
    }

    pub fn qubit(a0: Complex64, a1: Complex64) -> Result<Self, HilbertError> {
        Self::new(vec![a0, a1])
    }

    /// `(|0⟩ + |1⟩)/√2`
    pub fn cat() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector { amps: DVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]) }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.dim() == other.dim() && (&self.amps - &other.amps).norm() <= tol
    }

    pub fn eq_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        self.dim() == other.dim() && (self.inner(other).norm() - 1.0).abs() <= tol
    }

    /// Multiplies by the phase that makes the first non-zero amplitude real
    /// and positive.
    pub fn phase_normalized(&self) -> StateVector {
        let tol = tolerance();
        match self.amps.iter().find(|a| a.norm() > tol) {
            Some(a) => StateVector { amps: &self.amps * (a.conj() / c(a.norm(), 0.0)) },
            None => self.clone(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(pairs(self.amplitudes())).expect("pairs serialize")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, HilbertError> {
        let p: Vec<[f64; 2]> =
            serde_json::from_value(v.clone()).map_err(|e| HilbertError::Dim(format!("bad state JSON: {e}")))?;
        Self::new(p.into_iter().map(|[re, im]| c(re, im)).collect())
    }
}

fn pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Projector,
    Weak,
    Hermitian,
    Unitary,
    General,
}

/// A square matrix on `⊗^n C^2` tagged with the property it was checked for.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<Complex64>,
    kind: OperatorKind,
}

fn is_hermitian(m: &DMatrix<Complex64>) -> bool {
    (m - m.adjoint()).norm() <= tolerance()
}

fn is_projector(m: &DMatrix<Complex64>) -> bool {
    is_hermitian(m) && (m * m - m).norm() <= tolerance()
}

impl Operator {
    pub fn new(matrix: DMatrix<Complex64>, kind: OperatorKind) -> Result<Self, HilbertError> {
        if !matrix.is_square() {
            return Err(HilbertError::Dim("operator matrix is not square".into()));
        }
        check_dim(matrix.nrows())?;
        let ok = match kind {
            OperatorKind::Projector => is_projector(&matrix),
            OperatorKind::Hermitian => is_hermitian(&matrix),
            OperatorKind::Unitary => {
                (&matrix * matrix.adjoint() - DMatrix::identity(matrix.nrows(), matrix.nrows())).norm() <= tolerance()
            }
            OperatorKind::Weak => weak_scalar(&matrix).is_some(),
            OperatorKind::General => true,
        };
        if !ok {
            return Err(HilbertError::Kind(kind_name(kind)));
        }
        Ok(Operator { matrix, kind })
    }

    /// `P_i = |i⟩⟨i|` on `C^dim`.
    pub fn projector(dim: usize, i: usize) -> Result<Self, HilbertError> {
        let e = StateVector::basis(dim, i)?;
        Ok(Operator { matrix: &e.amps * e.amps.adjoint(), kind: OperatorKind::Projector })
    }

    /// `O = λ P` for a projector `P`.
    pub fn weak(lambda: Complex64, p: &Operator) -> Result<Self, HilbertError> {
        if p.kind != OperatorKind::Projector {
            return Err(HilbertError::Kind("projector"));
        }
        let m = &p.matrix * lambda;
        let kind = if (lambda - c(1.0, 0.0)).norm() == 0.0 { OperatorKind::Projector } else { OperatorKind::Weak };
        Ok(Operator { matrix: m, kind })
    }

    pub fn identity(dim: usize) -> Result<Self, HilbertError> {
        check_dim(dim)?;
        Ok(Operator { matrix: DMatrix::identity(dim, dim), kind: OperatorKind::Projector })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, s: &StateVector) -> Result<DVector<Complex64>, HilbertError> {
        if s.dim() != self.dim() {
            return Err(HilbertError::Dim(format!("operator on C^{} applied to C^{}", self.dim(), s.dim())));
        }
        Ok(&self.matrix * &s.amps)
    }

    /// The scalar `λ` when the matrix is `λ P` for a nonzero projector `P`.
    pub fn weak_lambda(&self) -> Option<Complex64> {
        weak_scalar(&self.matrix)
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.dim() == other.dim() && (&self.matrix - &other.matrix).norm() <= tol
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<[f64; 2]>> =
            (0..self.dim()).map(|r| self.matrix.row(r).iter().map(|z| [z.re, z.im]).collect()).collect();
        serde_json::json!({ "kind": self.kind, "matrix": rows })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, HilbertError> {
        let bad = |e: String| HilbertError::Dim(format!("bad operator JSON: {e}"));
        let kind: OperatorKind = serde_json::from_value(v["kind"].clone()).map_err(|e| bad(e.to_string()))?;
        let rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(v["matrix"].clone()).map_err(|e| bad(e.to_string()))?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(bad("ragged matrix".into()));
        }
        let m = DMatrix::from_fn(n, n, |r, col| c(rows[r][col][0], rows[r][col][1]));
        Operator::new(m, kind)
    }
}

fn kind_name(k: OperatorKind) -> &'static str {
    match k {
        OperatorKind::Projector => "projector",
        OperatorKind::Weak => "scalar multiple of a projector",
        OperatorKind::Hermitian => "hermitian operator",
        OperatorKind::Unitary => "unitary operator",
        OperatorKind::General => "square matrix",
    }
}

/// The `λ` with `M = λ P`, `P` a non-zero projector.
fn weak_scalar(m: &DMatrix<Complex64>) -> Option<Complex64> {
    let tr = m.trace();
    if tr.norm() <= tolerance() {
        return None;
    }
    let lambda = (m * m).trace() / tr;
    if lambda.norm() <= tolerance() {
        return None;
    }
    is_projector(&(m / lambda)).then_some(lambda)
}

/// Kronecker product of states or operators.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        StateVector { amps: self.amps.kronecker(&other.amps) }
    }
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Self {
        let kind = if self.kind == other.kind { self.kind } else { OperatorKind::General };
        Operator { matrix: self.matrix.kronecker(&other.matrix), kind }
    }
}

pub fn tensor<T: Tensor>(x: &T, y: &T) -> T {
    x.tensor(y)
}

/// Projective measurement in the computational basis.
pub fn measure(s: &StateVector, i: usize) -> Result<(f64, StateVector), HilbertError> {
    if i >= s.dim() {
        return Err(HilbertError::Dim(format!("basis index {i} out of range for dimension {}", s.dim())));
    }
    let p = s.amps[i].norm_sqr();
    if p <= tolerance() {
        return Err(HilbertError::ZeroProbability(i));
    }
    let mut v = vec![c(0.0, 0.0); s.dim()];
    v[i] = s.amps[i] / c(p.sqrt(), 0.0);
    Ok((p, StateVector { amps: DVector::from_vec(v) }.phase_normalized()))
}

/// `⟨f|A|i⟩ / ⟨f|i⟩`
pub fn weak_value(a: &Operator, i: &StateVector, f: &StateVector) -> Result<Complex64, HilbertError> {
    let den = f.inner(i);
    if den.norm() <= tolerance() {
        return Err(HilbertError::Orthogonal);
    }
    let ai = a.apply(i)?;
    Ok(f.amps.dotc(&ai) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub theta: f64,
    pub phi: f64,
}

pub fn to_bloch(s: &StateVector) -> Result<BlochPoint, HilbertError> {
    if s.dim() != 2 {
        return Err(HilbertError::Dim("Bloch coordinates need a single qubit".into()));
    }
    let (a, b) = (s.amps[0], s.amps[1]);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if (n - 1.0).abs() > tolerance() {
        return Err(HilbertError::NotUnit(n));
    }
    let theta = 2.0 * b.norm().atan2(a.norm());
    let tol = tolerance();
    let phi = if a.norm() <= tol || b.norm() <= tol {
        0.0
    } else {
        let p = (b.arg() - a.arg()).rem_euclid(TAU);
        if TAU - p <= tol {
            0.0
        } else {
            p
        }
    };
    Ok(BlochPoint { theta: theta.clamp(0.0, PI), phi })
}

pub fn from_bloch(b: BlochPoint) -> StateVector {
    let (h0, h1) = ((b.theta / 2.0).cos(), (b.theta / 2.0).sin());
    StateVector { amps: DVector::from_vec(vec![c(h0, 0.0), Complex64::from_polar(h1, b.phi)]) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    Phi,
    Psi,
}

/// `Φ± = (|00⟩ ± |11⟩)/√2`, `Ψ± = (|01⟩ ± |10⟩)/√2`.
pub fn bell(kind: BellKind, plus: bool) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = if plus { h } else { -h };
    let v = match kind {
        BellKind::Phi => vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
        BellKind::Psi => vec![c(0.0, 0.0), c(h, 0.0), c(s, 0.0), c(0.0, 0.0)],
    };
    StateVector { amps: DVector::from_vec(v) }
}

/// A pure two-qubit state is a product iff its 2×2 amplitude matrix is
/// singular.
pub fn is_separable(s: &StateVector) -> Result<bool, HilbertError> {
    if s.dim() != 4 {
        return Err(HilbertError::Dim("separability test needs a two-qubit state".into()));
    }
    let a = s.amplitudes();
    Ok((a[0] * a[3] - a[1] * a[2]).norm() <= tolerance())
}

/// A density operator on `⊗^n C^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self, HilbertError> {
        if !matrix.is_square() {
            return Err(HilbertError::NotDensity("not square".into()));
        }
        check_dim(matrix.nrows())?;
        let tol = tolerance();
        if !is_hermitian(&matrix) {
            return Err(HilbertError::NotDensity("not self-adjoint".into()));
        }
        let tr = matrix.trace();
        if (tr - c(1.0, 0.0)).norm() > tol {
            return Err(HilbertError::NotDensity(format!("trace {tr}")));
        }
        let min = matrix.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -tol {
            return Err(HilbertError::NotDensity(format!("negative eigenvalue {min}")));
        }
        Ok(DensityOperator { matrix })
    }

    pub fn pure(s: &StateVector) -> Self {
        DensityOperator { matrix: &s.amps * s.amps.adjoint() }
    }

    /// `(I + r·σ)/2`
    pub fn from_bloch_vector(r: [f64; 3]) -> Result<Self, HilbertError> {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0 + r[2], 0.0), c(r[0], -r[1]), c(r[0], r[1]), c(1.0 - r[2], 0.0)])
            * c(0.5, 0.0);
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self, HilbertError> {
        check_dim(dim)?;
        Self::new(DMatrix::identity(dim, dim) * c(1.0 / dim as f64, 0.0))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn qubits(&self) -> u32 {
        self.matrix.nrows().trailing_zeros()
    }

    /// `U ρ U†`
    pub fn conjugate_by(&self, u: &DMatrix<Complex64>) -> Result<Self, HilbertError> {
        if u.nrows() != self.matrix.nrows() {
            return Err(HilbertError::Dim("unitary and density dimensions differ".into()));
        }
        Ok(DensityOperator { matrix: u * &self.matrix * u.adjoint() })
    }
}

/// `tr[P1 ρ]` where `P1` projects onto last-qubit value 1.
pub fn qumix_prob(r: &DensityOperator) -> f64 {
    (0..r.matrix.nrows()).filter(|i| i % 2 == 1).map(|i| r.matrix[(i, i)].re).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreOrder {
    Weak,
    Strong,
}

pub fn pre_order(kind: PreOrder, r: &DensityOperator, s: &DensityOperator) -> Result<bool, HilbertError> {
    if r.matrix.nrows() != s.matrix.nrows() {
        return Err(HilbertError::Dim("qumixes live in different spaces".into()));
    }
    let tol = tolerance();
    let weak = qumix_prob(r) <= qumix_prob(s) + tol;
    if kind == PreOrder::Weak || !weak {
        return Ok(weak);
    }
    let u = gate_matrix(Gate::SqrtNot, r.qubits())?;
    Ok(qumix_prob(&s.conjugate_by(&u)?) <= qumix_prob(&r.conjugate_by(&u)?) + tol)
}
