//! The XOR-parity extraction channel and the sampling projector used to
//! certify that a deleted register carries no information about the parity.

use nalgebra::DMatrix;

use crate::bits::{BasisString, BitString};
use crate::error::{input_err, Result};
use crate::quantum::density::DensityMatrix;
use crate::quantum::measure::measure_and_discard_all_branches;
use crate::quantum::state::{complement, StateVector};
use crate::quantum::C64;

/// Hadamard-measures `x_register` of `gamma`, writes the parity of the outcome
/// into a fresh qubit `P` and discards `X`.
///
/// The output lives on the remaining qubits (the `A` register, original order)
/// followed by `P` as the last qubit. Outcomes are enumerated, not sampled.
pub fn xor_parity_channel(gamma: &StateVector, x_register: &[usize]) -> Result<DensityMatrix> {
    if x_register.is_empty() {
        return input_err("the X register must hold at least one qubit");
    }
    let a_dim = 1usize << (gamma.n_qubits() - x_register.len());
    let branches =
        measure_and_discard_all_branches(gamma, x_register, &BasisString::hadamard(x_register.len()))?;
    let mut out = DMatrix::<C64>::zeros(2 * a_dim, 2 * a_dim);
    for b in branches {
        let p = b.outcome.parity() as usize;
        let amps = b.residual.amplitudes();
        for i in 0..a_dim {
            for j in 0..a_dim {
                out[(2 * i + p, 2 * j + p)] += amps[i] * amps[j].conj() * b.probability;
            }
        }
    }
    Ok(DensityMatrix::from_raw(out))
}

/// `Tr_X(|γ⟩⟨γ|) ⊗ I/2`, the output the extractor promises for admissible inputs.
pub fn uniform_parity_reference(gamma: &StateVector, x_register: &[usize]) -> Result<DensityMatrix> {
    let a = complement(x_register, gamma.n_qubits());
    Ok(gamma.reduced_density(&a)?.tensor(&DensityMatrix::maximally_mixed(2)))
}

/// Whether Hadamard outcome `y` lies in the support of `Π_{x′,θ}`: exact match
/// with `x′` on Hadamard positions, and relative distance at least ½ from `x′`
/// on computational positions. The second clause holds vacuously when θ has
/// no computational positions.
pub fn pi_accepts(y: &BitString, x_prime: &BitString, theta: &BasisString) -> bool {
    let matches = theta.hadamard_positions().into_iter().all(|i| y.get(i) == x_prime.get(i));
    if !matches {
        return false;
    }
    let comp = theta.computational_positions();
    if comp.is_empty() {
        return true;
    }
    let diff = comp.iter().filter(|&&i| y.get(i) != x_prime.get(i)).count();
    2 * diff >= comp.len()
}

/// Outcome distribution of a Hadamard-basis measurement of every qubit.
pub fn hadamard_distribution(state: &DensityMatrix) -> Result<Vec<f64>> {
    let Some(n) = state.n_qubits() else {
        return input_err("state must be over qubits");
    };
    let d = 1usize << n;
    let scale = (d as f64).sqrt().recip();
    let h = DMatrix::<C64>::from_fn(d, d, |i, j| {
        let sign = if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        C64::new(sign * scale, 0.0)
    });
    let rotated = &h * state.entries() * &h;
    Ok((0..d).map(|y| rotated[(y, y)].re).collect())
}

/// `Tr(Π_{x′,θ} ρ)` for a state on λ qubits.
pub fn pi_projector_probability(
    state: &DensityMatrix,
    x_prime: &BitString,
    theta: &BasisString,
) -> Result<f64> {
    if x_prime.len() != theta.len() {
        return input_err(format!("|x′| = {} but |θ| = {}", x_prime.len(), theta.len()));
    }
    if state.n_qubits() != Some(theta.len()) {
        return input_err("state must have exactly |θ| qubits");
    }
    let dist = hadamard_distribution(state)?;
    Ok(pi_probability_from_distribution(&dist, x_prime, theta))
}

pub(crate) fn pi_probability_from_distribution(
    dist: &[f64],
    x_prime: &BitString,
    theta: &BasisString,
) -> f64 {
    dist.iter()
        .enumerate()
        .filter(|(y, _)| pi_accepts(&BitString::from_index(*y, theta.len()), x_prime, theta))
        .map(|(_, p)| p)
        .sum()
}
