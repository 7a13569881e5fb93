use std::collections::BTreeMap;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::quantum::state::StateVector;
use crate::quantum::{C64, STATE_TOL};

/// One computational-basis branch of a [`TaggedState`].
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedBranch {
    pub amplitude: C64,
    /// Classical records written coherently on this branch, oldest first.
    pub layers: Vec<Vec<u8>>,
}

impl TaggedBranch {
    /// All layers concatenated.
    pub fn tag(&self) -> Vec<u8> {
        self.layers.concat()
    }
}

/// `Σ_x α_x |x⟩|t(x)⟩`: a superposition whose branches carry classical
/// records. Records are pushed by deterministic functions of the branch
/// label and earlier records, which makes every push undoable.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedState {
    n_qubits: usize,
    branches: BTreeMap<usize, TaggedBranch>,
}

impl TaggedState {
    /// Untagged copy of `state`, keeping only non-vanishing branches.
    pub fn from_state(state: &StateVector) -> Self {
        let branches = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > STATE_TOL * STATE_TOL * 1e-4)
            .map(|(i, a)| (i, TaggedBranch { amplitude: *a, layers: Vec::new() }))
            .collect();
        Self { n_qubits: state.n_qubits(), branches }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn branches(&self) -> &BTreeMap<usize, TaggedBranch> {
        &self.branches
    }

    pub fn depth(&self) -> usize {
        self.branches.values().next().map_or(0, |b| b.layers.len())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches.values().map(|b| b.amplitude.norm_sqr()).sum()
    }

    /// Writes `f(label, earlier layers)` as a new record on every branch.
    pub fn push_layer<F>(&mut self, f: F) -> Result<()>
    where
        F: Fn(&BitString, &[Vec<u8>]) -> Result<Vec<u8>>,
    {
        for (&label, branch) in self.branches.iter_mut() {
            let rec = f(&BitString::from_index(label, self.n_qubits), &branch.layers)?;
            branch.layers.push(rec);
        }
        Ok(())
    }

    /// Uncomputes the newest record by re-evaluating `f` and checking that it
    /// reproduces what was written.
    pub fn pop_layer<F>(&mut self, f: F) -> Result<()>
    where
        F: Fn(&BitString, &[Vec<u8>]) -> Result<Vec<u8>>,
    {
        for (&label, branch) in self.branches.iter_mut() {
            let Some(top) = branch.layers.pop() else {
                return Err(Error::State("no record left to uncompute".into()));
            };
            let again = f(&BitString::from_index(label, self.n_qubits), &branch.layers)?;
            if again != top {
                return Err(Error::State(format!(
                    "uncompute mismatch on branch {}",
                    BitString::from_index(label, self.n_qubits)
                )));
            }
        }
        Ok(())
    }

    /// Probability of each value of the newest record.
    pub fn top_distribution(&self) -> BTreeMap<Vec<u8>, f64> {
        let mut out = BTreeMap::new();
        for b in self.branches.values() {
            let key = b.layers.last().cloned().unwrap_or_default();
            *out.entry(key).or_insert(0.0) += b.amplitude.norm_sqr();
        }
        out
    }

    /// Projects onto branches whose newest record equals `value` and
    /// renormalizes. Returns the probability of that outcome.
    pub fn condition_on_top(&mut self, value: &[u8]) -> Result<f64> {
        let p: f64 = self
            .branches
            .values()
            .filter(|b| b.layers.last().map(Vec::as_slice) == Some(value))
            .map(|b| b.amplitude.norm_sqr())
            .sum();
        if p <= 0.0 {
            return Err(Error::State("conditioning on an impossible record".into()));
        }
        let norm = p.sqrt();
        self.branches.retain(|_, b| b.layers.last().map(Vec::as_slice) == Some(value));
        self.branches.values_mut().for_each(|b| b.amplitude /= norm);
        Ok(p)
    }

    /// Drops the (record-free) branches back into a plain state vector.
    pub fn into_state(self) -> Result<StateVector> {
        if self.branches.values().any(|b| !b.layers.is_empty()) {
            return Err(Error::State("records are still entangled with the register".into()));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << self.n_qubits];
        for (label, b) in self.branches {
            amps[label] = b.amplitude;
        }
        StateVector::new(self.n_qubits, amps)
    }
}
