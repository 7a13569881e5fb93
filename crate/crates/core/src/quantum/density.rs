use nalgebra::DMatrix;

use crate::error::{input_err, Result};
use crate::quantum::state::{complement, validate_subset, StateVector};
use crate::quantum::{bit_of, C64, STATE_TOL};

/// A (possibly subnormalized) density operator.
///
/// `weight` is the trace the matrix is expected to carry: 1 for states, less
/// for the accepted branch of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
    weight: f64,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and unit trace.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        Self::subnormalized(entries, 1.0)
    }

    /// Validates Hermiticity, positivity and `trace = weight`.
    pub fn subnormalized(entries: DMatrix<C64>, weight: f64) -> Result<Self> {
        if !entries.is_square() {
            return input_err("density matrix must be square");
        }
        let rho = Self { entries, weight };
        if rho.hermiticity_error() > STATE_TOL {
            return input_err("density matrix is not Hermitian");
        }
        if (rho.trace() - weight).abs() > STATE_TOL {
            return input_err(format!("trace {} differs from weight {weight}", rho.trace()));
        }
        if rho.min_eigenvalue() < -STATE_TOL {
            return input_err("density matrix has a negative eigenvalue");
        }
        Ok(rho)
    }

    pub(crate) fn from_raw(entries: DMatrix<C64>) -> Self {
        let weight = entries.trace().re;
        Self { entries, weight }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &StateVector) -> Self {
        let mut rho = Self::zeros(psi.dim());
        rho.add_pure(1.0, psi);
        rho
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0 / dim as f64, 0.0);
        }
        Self { entries: m, weight: 1.0 }
    }

    /// The zero operator, used as an accumulator.
    pub fn zeros(dim: usize) -> Self {
        Self { entries: DMatrix::zeros(dim, dim), weight: 0.0 }
    }

    /// `self += p |ψ⟩⟨ψ|`.
    pub fn add_pure(&mut self, p: f64, psi: &StateVector) {
        let amps = psi.amplitudes();
        let dim = amps.len();
        assert_eq!(dim, self.dim(), "dimension mismatch in add_pure");
        for j in 0..dim {
            let bj = amps[j].conj() * p;
            if bj.norm_sqr() == 0.0 {
                continue;
            }
            for (i, a) in amps.iter().enumerate() {
                self.entries[(i, j)] += a * bj;
            }
        }
        self.weight += p * psi.norm_sqr();
    }

    /// `self += other`.
    pub fn add_assign(&mut self, other: &DensityMatrix) {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch in add_assign");
        self.entries += &other.entries;
        self.weight += other.weight;
    }

    pub fn scale(&mut self, p: f64) {
        self.entries *= C64::new(p, 0.0);
        self.weight *= p;
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        let d = self.dim();
        d.is_power_of_two().then(|| d.trailing_zeros() as usize)
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..=i {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `ρ ⊗ τ`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self { entries: self.entries.kronecker(&other.entries), weight: self.weight * other.weight }
    }

    /// Largest entrywise deviation.
    pub fn max_deviation(&self, other: &DensityMatrix) -> f64 {
        (&self.entries - &other.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Reduced state on `keep` (in the listed order). The matrix must be over
    /// a whole number of qubits.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let Some(n) = self.n_qubits() else {
            return input_err("partial trace needs a qubit register");
        };
        validate_subset(keep, n)?;
        let traced = complement(keep, n);
        let kd = 1usize << keep.len();
        let td = 1usize << traced.len();
        let embed = |k: usize, t: usize| -> usize {
            let mut idx = 0usize;
            for (pos, &q) in keep.iter().enumerate() {
                if bit_of(k, pos, keep.len()) {
                    idx |= 1 << (n - 1 - q);
                }
            }
            for (pos, &q) in traced.iter().enumerate() {
                if bit_of(t, pos, traced.len()) {
                    idx |= 1 << (n - 1 - q);
                }
            }
            idx
        };
        let mut out = DMatrix::zeros(kd, kd);
        for r in 0..kd {
            for c in 0..kd {
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..td {
                    acc += self.entries[(embed(r, t), embed(c, t))];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(Self { entries: out, weight: self.weight })
    }
}

impl StateVector {
    /// Reduced density of a pure state on `keep`, without forming the full
    /// density matrix.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.n_qubits();
        validate_subset(keep, n)?;
        let traced = complement(keep, n);
        let kd = 1usize << keep.len();
        let td = 1usize << traced.len();
        // Reshape ψ into a kd × td matrix M, then ρ = M M†.
        let mut m = DMatrix::<C64>::zeros(kd, td);
        for (idx, amp) in self.amplitudes().iter().enumerate() {
            let r = keep.iter().fold(0usize, |acc, &q| (acc << 1) | bit_of(idx, q, n) as usize);
            let c = traced.iter().fold(0usize, |acc, &q| (acc << 1) | bit_of(idx, q, n) as usize);
            m[(r, c)] = *amp;
        }
        let rho = &m * m.adjoint();
        Ok(DensityMatrix::from_raw(rho))
    }
}

/// Eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    if m.nrows() == 1 {
        return vec![m[(0, 0)].re];
    }
    // Symmetrize first so rounding noise cannot make the input non-Hermitian.
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().collect()
}

/// Trace norm `‖M‖₁` of a Hermitian matrix: the sum of absolute eigenvalues.
pub fn hermitian_trace_norm(m: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(m).into_iter().map(f64::abs).sum()
}

/// `TD(ρ, τ) = ½ ‖ρ − τ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    if rho.dim() != tau.dim() {
        return input_err(format!("dimensions {} and {} differ", rho.dim(), tau.dim()));
    }
    Ok(0.5 * hermitian_trace_norm(&(&rho.entries - &tau.entries)))
}
