//! Reversible gates on computational-basis amplitudes.
//!
//! The gate bodies are generic over the scalar so that the same code runs in
//! floating point and in exact Gaussian-rational arithmetic.

use num_complex::{Complex, Complex64};
use num_rational::Ratio;
use num_traits::Num;

use super::{HilbertError, StateVector};

pub type ExactComplex = Complex<Ratio<i64>>;

/// Scalars the gates can be evaluated over.
pub trait GateScalar: Clone + Num {
    /// `(1+i)/2`
    fn half_one_plus_i() -> Self;
    /// `(1-i)/2`
    fn half_one_minus_i() -> Self;
}

impl GateScalar for Complex64 {
    fn half_one_plus_i() -> Self {
        Complex64::new(0.5, 0.5)
    }
    fn half_one_minus_i() -> Self {
        Complex64::new(0.5, -0.5)
    }
}

impl GateScalar for ExactComplex {
    fn half_one_plus_i() -> Self {
        Complex::new(Ratio::new(1, 2), Ratio::new(1, 2))
    }
    fn half_one_minus_i() -> Self {
        Complex::new(Ratio::new(1, 2), Ratio::new(-1, 2))
    }
}

fn qubits(len: usize) -> Result<u32, HilbertError> {
    if len >= 2 && len.is_power_of_two() {
        Ok(len.trailing_zeros())
    } else {
        Err(HilbertError::Dim(format!("length {len} is not 2^n with n >= 1")))
    }
}

fn expect_qubits(len: usize, n: u32) -> Result<(), HilbertError> {
    if qubits(len)? == n {
        Ok(())
    } else {
        Err(HilbertError::Dim(format!("gate expects {n} qubit(s), got a vector of length {len}")))
    }
}

pub fn kron<T: GateScalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().flat_map(|x| b.iter().map(move |y| x.clone() * y.clone())).collect()
}

/// `NOT(n)` flips the last qubit.
pub fn not_gate<T: GateScalar>(psi: &[T]) -> Result<Vec<T>, HilbertError> {
    qubits(psi.len())?;
    Ok((0..psi.len()).map(|x| psi[x ^ 1].clone()).collect())
}

/// `√NOT(n)` acts on the last qubit as `|x⟩ ↦ (1+i)/2 |x⟩ + (1-i)/2 |1-x⟩`.
pub fn sqrt_not_gate<T: GateScalar>(psi: &[T]) -> Result<Vec<T>, HilbertError> {
    qubits(psi.len())?;
    let (p, m) = (T::half_one_plus_i(), T::half_one_minus_i());
    Ok((0..psi.len()).map(|x| p.clone() * psi[x].clone() + m.clone() * psi[x ^ 1].clone()).collect())
}

/// `T(n,m,1)`: the target (last qubit) is flipped when the last qubit of
/// each control register is 1.
pub fn petri_toffoli<T: GateScalar>(n: u32, m: u32, psi: &[T]) -> Result<Vec<T>, HilbertError> {
    if n == 0 || m == 0 {
        return Err(HilbertError::Dim("control registers need at least one qubit".into()));
    }
    expect_qubits(psi.len(), n + m + 1)?;
    let xn = 1usize << (m + 1);
    let ym = 1usize << 1;
    let map = |x: usize| if x & xn != 0 && x & ym != 0 { x ^ 1 } else { x };
    Ok((0..psi.len()).map(|x| psi[map(x)].clone()).collect())
}

/// `AND(φ, ψ) = T(φ ⊗ ψ ⊗ |0⟩)`.
pub fn and_gate<T: GateScalar>(phi: &[T], psi: &[T]) -> Result<Vec<T>, HilbertError> {
    let (n, m) = (qubits(phi.len())?, qubits(psi.len())?);
    let zero = [T::one(), T::zero()];
    petri_toffoli(n, m, &kron(&kron(phi, psi), &zero))
}

/// `OR(φ, ψ) = NOT(AND(NOT φ, NOT ψ))`.
pub fn or_gate<T: GateScalar>(phi: &[T], psi: &[T]) -> Result<Vec<T>, HilbertError> {
    not_gate(&and_gate(&not_gate(phi)?, &not_gate(psi)?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Not,
    SqrtNot,
    PetriToffoli { n: u32, m: u32 },
    And,
    Or,
}

/// Applies a gate to unit states, checking the signature.
pub fn gate_apply(g: Gate, args: &[StateVector]) -> Result<StateVector, HilbertError> {
    let amps: Vec<Vec<Complex64>> = args.iter().map(|s| s.amplitudes().to_vec()).collect();
    let out = match (g, amps.as_slice()) {
        (Gate::Not, [a]) => not_gate(a)?,
        (Gate::SqrtNot, [a]) => sqrt_not_gate(a)?,
        (Gate::PetriToffoli { n, m }, [a]) => petri_toffoli(n, m, a)?,
        (Gate::And, [a, b]) => and_gate(a, b)?,
        (Gate::Or, [a, b]) => or_gate(a, b)?,
        _ => return Err(HilbertError::Dim(format!("{g:?} given {} argument(s)", args.len()))),
    };
    StateVector::new(out)
}

/// Matrix of a one-register gate on `n` qubits, built column by column.
pub fn gate_matrix(g: Gate, n: u32) -> Result<nalgebra::DMatrix<Complex64>, HilbertError> {
    let dim = 1usize << n;
    let mut m = nalgebra::DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[col] = Complex64::new(1.0, 0.0);
        let out = match g {
            Gate::Not => not_gate(&e)?,
            Gate::SqrtNot => sqrt_not_gate(&e)?,
            Gate::PetriToffoli { n: a, m: b } => petri_toffoli(a, b, &e)?,
            Gate::And | Gate::Or => return Err(HilbertError::Dim("AND and OR change the dimension".into())),
        };
        for (row, v) in out.into_iter().enumerate() {
            m[(row, col)] = v;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_basis(n: u32, i: usize) -> Vec<ExactComplex> {
        let mut v = vec![ExactComplex::new(Ratio::from_integer(0), Ratio::from_integer(0)); 1 << n];
        v[i] = ExactComplex::new(Ratio::from_integer(1), Ratio::from_integer(0));
        v
    }

    #[test]
    fn sqrt_not_on_zero() {
        let out = sqrt_not_gate(&exact_basis(1, 0)).unwrap();
        assert_eq!(out, vec![ExactComplex::half_one_plus_i(), ExactComplex::half_one_minus_i()]);
    }

    #[test]
    fn not_flips_the_last_qubit() {
        assert_eq!(not_gate(&exact_basis(1, 1)).unwrap(), exact_basis(1, 0));
        assert_eq!(not_gate(&exact_basis(3, 0b110)).unwrap(), exact_basis(3, 0b111));
    }

    #[test]
    fn toffoli_truth_table() {
        for x in 0..2usize {
            for y in 0..2usize {
                let out = and_gate(&exact_basis(1, x), &exact_basis(1, y)).unwrap();
                let idx = (x << 2) | (y << 1) | (x & y);
                assert_eq!(out, exact_basis(3, idx));
                let out = or_gate(&exact_basis(1, x), &exact_basis(1, y)).unwrap();
                let idx = ((1 - x) << 2) | ((1 - y) << 1) | (x | y);
                assert_eq!(out, exact_basis(3, idx), "{x} {y}");
            }
        }
    }

    #[test]
    fn signatures_are_checked() {
        assert!(petri_toffoli(1, 1, &exact_basis(2, 0)).is_err());
        assert!(not_gate(&[ExactComplex::new(Ratio::from_integer(1), Ratio::from_integer(0))]).is_err());
    }
}
