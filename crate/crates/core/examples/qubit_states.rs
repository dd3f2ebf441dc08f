//! States, measurement, weak values, Bell pairs and density operators.
//!
//! `cargo run --example qubit_states`

use lq::hilbert::{
    bell, from_bloch, is_separable, measure, pre_order, qumix_prob, tensor, to_bloch, weak_value, BellKind,
    DensityOperator, Operator, OperatorKind, PreOrder, StateVector,
};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let psi = StateVector::normalized(vec![c(0.6, 0.0), c(0.0, 0.8)])?;
    let b = to_bloch(&psi)?;
    println!("psi = {:?}", psi.amplitudes());
    println!("bloch theta = {:.6}, phi = {:.6}", b.theta, b.phi);
    println!("roundtrip equal up to phase: {}", from_bloch(b).eq_up_to_phase(&psi, 1e-12));

    for i in 0..2 {
        let (p, post) = measure(&psi, i)?;
        println!("P({i}) = {p:.6}, collapsed to {:?}", post.amplitudes());
    }

    let sz = Operator::new(
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)])),
        OperatorKind::Hermitian,
    )?;
    let pre = StateVector::cat();
    let post = StateVector::normalized(vec![c(1.0, 0.0), c(-0.8, 0.0)])?;
    println!("weak value of Z: {}", weak_value(&sz, &pre, &post)?);

    let product = tensor(&StateVector::basis(2, 0)?, &StateVector::cat());
    for (name, s) in [("|0>|+>", product), ("Phi+", bell(BellKind::Phi, true)), ("Psi-", bell(BellKind::Psi, false))] {
        println!("{name:<7} separable: {}", is_separable(&s)?);
    }

    let mixed = DensityOperator::from_bloch_vector([0.0, 0.0, 0.2])?;
    let pure_one = DensityOperator::pure(&StateVector::basis(2, 1)?);
    println!("qumix P(1) of r=(0,0,0.2): {:.3}", qumix_prob(&mixed));
    println!("mixed <= |1><1| (weak): {}", pre_order(PreOrder::Weak, &mixed, &pure_one)?);
    println!("r = (0,0,1.2) is a density operator: {}", DensityOperator::from_bloch_vector([0.0, 0.0, 1.2]).is_ok());
    Ok(())
}
