use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Complex;

use crate::bits::{BasisString, BitString};
use crate::error::{input_err, Result};
use crate::quantum::{bit_of, C64, STATE_TOL};

/// A pure state on `n_qubits` qubits.
///
/// Amplitudes are indexed big-endian: qubit 0 is the most significant bit of
/// the basis label. All protocol code relies on this ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Validates length and normalization.
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != 1usize << n_qubits {
            return input_err(format!(
                "{} amplitudes for {} qubits",
                amplitudes.len(),
                n_qubits
            ));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return input_err(format!("state has squared norm {norm}"));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Normalizes the given amplitudes. Fails on the zero vector.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return input_err("cannot normalize the zero vector");
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(n_qubits, amplitudes)
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1usize << n_qubits);
        Self { n_qubits, amplitudes }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1usize << n_qubits];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { n_qubits, amplitudes }
    }

    /// The zero-qubit state: a single amplitude 1.
    pub fn empty() -> Self {
        Self::basis(0, 0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Largest entrywise deviation; `None` when the qubit counts differ.
    pub fn max_deviation(&self, other: &StateVector) -> Option<f64> {
        if self.n_qubits != other.n_qubits {
            return None;
        }
        Some(
            self.amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }

    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.max_deviation(other).is_some_and(|d| d <= tol)
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self::from_raw(self.n_qubits + other.n_qubits, amplitudes)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return input_err(format!("qubit {q} out of range for {} qubits", self.n_qubits));
        }
        Ok(())
    }

    pub fn apply_hadamard(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let mask = 1usize << (self.n_qubits - 1 - q);
        for i in 0..self.dim() {
            if i & mask == 0 {
                let (a, b) = (self.amplitudes[i], self.amplitudes[i | mask]);
                self.amplitudes[i] = (a + b) * FRAC_1_SQRT_2;
                self.amplitudes[i | mask] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        Ok(())
    }

    pub fn apply_x(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let mask = 1usize << (self.n_qubits - 1 - q);
        for i in 0..self.dim() {
            if i & mask == 0 {
                self.amplitudes.swap(i, i | mask);
            }
        }
        Ok(())
    }

    /// Rotates each listed qubit whose basis is Hadamard, so that a
    /// computational measurement afterwards is a measurement in `bases`.
    pub(crate) fn rotate_into(&mut self, targets: &[usize], bases: &BasisString) -> Result<()> {
        for (k, &q) in targets.iter().enumerate() {
            if bases.is_hadamard(k) {
                self.apply_hadamard(q)?;
            }
        }
        Ok(())
    }

    /// Reorders qubits: new qubit `k` is old qubit `order[k]`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<StateVector> {
        validate_subset(order, self.n_qubits)?;
        if order.len() != self.n_qubits {
            return input_err("permutation must list every qubit");
        }
        let n = self.n_qubits;
        let mut amplitudes = vec![C64::new(0.0, 0.0); self.dim()];
        for (old, amp) in self.amplitudes.iter().enumerate() {
            let mut new = 0usize;
            for (k, &q) in order.iter().enumerate() {
                if bit_of(old, q, n) {
                    new |= 1 << (n - 1 - k);
                }
            }
            amplitudes[new] = *amp;
        }
        Ok(Self::from_raw(n, amplitudes))
    }

    /// `(⟨outcome|_bases ⊗ I) |ψ⟩` on the remaining qubits (in their original
    /// order), together with its squared norm. The residual is normalized
    /// unless the probability vanishes, in which case `None` is returned.
    pub fn project_out(
        &self,
        targets: &[usize],
        bases: &BasisString,
        outcome: &BitString,
    ) -> Result<(f64, Option<StateVector>)> {
        validate_subset(targets, self.n_qubits)?;
        if bases.len() != targets.len() || outcome.len() != targets.len() {
            return input_err("targets, bases and outcome must have equal length");
        }
        let mut rotated = self.clone();
        rotated.rotate_into(targets, bases)?;
        let rest = complement(targets, self.n_qubits);
        let mut residual = vec![C64::new(0.0, 0.0); 1usize << rest.len()];
        for (idx, amp) in rotated.amplitudes.iter().enumerate() {
            if targets.iter().enumerate().all(|(k, &q)| bit_of(idx, q, self.n_qubits) == outcome.get(k)) {
                residual[gather(idx, &rest, self.n_qubits)] = *amp;
            }
        }
        let p: f64 = residual.iter().map(|a| a.norm_sqr()).sum();
        if p <= 1e-300 {
            return Ok((0.0, None));
        }
        let norm = p.sqrt();
        residual.iter_mut().for_each(|a| *a /= norm);
        Ok((p, Some(Self::from_raw(rest.len(), residual))))
    }
}

/// `|x⟩_θ`: qubit `i` is `|x_i⟩` when `θ_i = 0` and `H|x_i⟩` when `θ_i = 1`.
pub fn bb84_prepare(x: &BitString, theta: &BasisString) -> Result<StateVector> {
    if x.len() != theta.len() {
        return input_err(format!("|x| = {} but |θ| = {}", x.len(), theta.len()));
    }
    let mut state = StateVector::basis(x.len(), x.to_index());
    for i in theta.hadamard_positions() {
        state.apply_hadamard(i)?;
    }
    Ok(state)
}

/// `n` EPR pairs `(|00⟩+|11⟩)/√2` laid out as `C₁A₁C₂A₂…`: qubit `2i` is
/// `C_{i+1}` and qubit `2i+1` is `A_{i+1}`.
pub fn epr_pairs(n: usize) -> Result<StateVector> {
    if n == 0 {
        return input_err("at least one EPR pair is required");
    }
    let pair = StateVector::from_raw(
        2,
        vec![
            Complex::new(FRAC_1_SQRT_2, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(FRAC_1_SQRT_2, 0.0),
        ],
    );
    Ok((1..n).fold(pair.clone(), |acc, _| acc.tensor(&pair)))
}

/// The `C` qubit indices of an [`epr_pairs`] layout.
pub fn epr_c_qubits(n: usize) -> Vec<usize> {
    (0..n).map(|i| 2 * i).collect()
}

/// The `A` qubit indices of an [`epr_pairs`] layout.
pub fn epr_a_qubits(n: usize) -> Vec<usize> {
    (0..n).map(|i| 2 * i + 1).collect()
}

pub(crate) fn validate_subset(qubits: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &q in qubits {
        if q >= n {
            return input_err(format!("qubit {q} out of range for {n} qubits"));
        }
        if seen[q] {
            return input_err(format!("qubit {q} listed twice"));
        }
        seen[q] = true;
    }
    Ok(())
}

pub(crate) fn complement(qubits: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|q| !qubits.contains(q)).collect()
}

/// Packs the bits of `idx` at `qubits` into a label over `qubits.len()` qubits.
pub(crate) fn gather(idx: usize, qubits: &[usize], n: usize) -> usize {
    qubits
        .iter()
        .fold(0usize, |acc, &q| (acc << 1) | bit_of(idx, q, n) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn bb84_single_qubit_cases() {
        let zero = bb84_prepare(&"0".parse().unwrap(), &"0".parse().unwrap()).unwrap();
        assert_eq!(zero.amplitudes(), &[c(1.0), c(0.0)]);
        let minus = bb84_prepare(&"1".parse().unwrap(), &"1".parse().unwrap()).unwrap();
        assert!((minus.amplitude(0) - c(FRAC_1_SQRT_2)).norm() < 1e-12);
        assert!((minus.amplitude(1) - c(-FRAC_1_SQRT_2)).norm() < 1e-12);
    }

    #[test]
    fn bb84_two_qubits_matches_tensor_oracle() {
        // x=01, θ=10: qubit 0 is H|0⟩ = |+⟩, qubit 1 is |1⟩.
        let s = bb84_prepare(&"01".parse().unwrap(), &"10".parse().unwrap()).unwrap();
        let plus = StateVector::from_raw(1, vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]);
        let one = StateVector::basis(1, 1);
        let oracle = plus.tensor(&one);
        assert!(s.approx_eq(&oracle, 1e-12));
        assert!((s.amplitude(0b01).re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((s.amplitude(0b11).re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(s.amplitude(0b00), c(0.0));
    }

    #[test]
    fn bb84_length_mismatch() {
        assert!(bb84_prepare(&"01".parse().unwrap(), &"1".parse().unwrap()).is_err());
    }

    #[test]
    fn epr_layout() {
        let one = epr_pairs(1).unwrap();
        assert!((one.amplitude(0).re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((one.amplitude(3).re - FRAC_1_SQRT_2).abs() < 1e-12);
        // C₁A₁C₂A₂: each pair is internally equal
        let two = epr_pairs(2).unwrap();
        for (idx, amp) in two.amplitudes().iter().enumerate() {
            let expect = if [0b0000, 0b0011, 0b1100, 0b1111].contains(&idx) { 0.5 } else { 0.0 };
            assert!((amp.re - expect).abs() < 1e-12, "label {idx:04b}");
        }
        // regrouped as C₁C₂A₁A₂ the support is 0000, 0101, 1010, 1111
        let regrouped = two.permute_qubits(&[0, 2, 1, 3]).unwrap();
        for idx in [0b0000, 0b0101, 0b1010, 0b1111] {
            assert!((regrouped.amplitude(idx).re - 0.5).abs() < 1e-12);
        }
        assert!(epr_pairs(0).is_err());
    }

    #[test]
    fn zero_qubit_state_is_scalar_one() {
        let e = StateVector::empty();
        assert_eq!(e.dim(), 1);
        let s = StateVector::basis(2, 3);
        assert_eq!(e.tensor(&s), s);
    }

    #[test]
    fn permute_then_inverse_is_identity() {
        let s = bb84_prepare(&"0110".parse().unwrap(), &"0101".parse().unwrap()).unwrap();
        let p = s.permute_qubits(&[2, 0, 3, 1]).unwrap();
        let back = p.permute_qubits(&[1, 3, 0, 2]).unwrap();
        assert!(back.approx_eq(&s, 1e-12));
        assert!(s.permute_qubits(&[0, 0, 1, 2]).is_err());
    }

    #[test]
    fn new_rejects_unnormalized() {
        assert!(StateVector::new(1, vec![c(1.0), c(1.0)]).is_err());
        assert!(StateVector::new(1, vec![c(1.0)]).is_err());
    }
}
