//! Exact evaluation of the certified-deletion experiments against
//! enumerable adversaries.
//!
//! Every quantity here is computed by enumerating all `(x, θ)` pairs and all
//! adversary branches; nothing is sampled except in [`sampling`], which
//! exists to cross-check the exact numbers.

pub mod experiment;
pub mod hybrids;
pub mod pi;
pub mod report;
pub mod sampling;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{input_err, Error, Result};
use crate::quantum::{hermitian_trace_norm, DensityMatrix};

pub use experiment::{run_c_exp, run_ev_exp, ev_exp_trace_distance};
pub use hybrids::{hybrid_chain, run_hybrid, Hybrid, HybridReport};
pub use pi::{hoeffding_bound, pi_probability, PiResult};
pub use report::{merge_reports, non_increasing, BoundCheck, ExperimentReport};
pub use sampling::sample_acceptance;

/// Largest λ the enumerator accepts.
pub const MAX_LAMBDA: usize = 8;

/// Largest λ for the EPR-based hybrids and the Π accounting (2λ qubits).
pub const MAX_HYBRID_LAMBDA: usize = 6;

/// Tolerance for exact identities between enumerated quantities.
pub const EXACT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    SecretSharing,
    Otp,
    CompiledPke,
    CdFhe,
    CdCommitment,
}

impl Scheme {
    pub const ALL: [Scheme; 5] =
        [Scheme::SecretSharing, Scheme::Otp, Scheme::CompiledPke, Scheme::CdFhe, Scheme::CdCommitment];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::SecretSharing => "secret-sharing",
            Scheme::Otp => "otp",
            Scheme::CompiledPke => "compiled-pke",
            Scheme::CdFhe => "cd-fhe",
            Scheme::CdCommitment => "cd-commitment",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Input(format!("unknown scheme '{s}'")))
    }
}

/// How the computationally protected part of the adversary's view is
/// produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// The actual toy backends, run deterministically. An unbounded
    /// adversary reads everything they encrypt, so this mode yields no
    /// security numbers.
    RealBackend,
    /// The θ inside the protected part is replaced by 0^λ; the masked bit
    /// stays.
    #[default]
    IdealizedHiding,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::RealBackend => "real-backend",
            Mode::IdealizedHiding => "idealized-hiding",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real-backend" => Ok(Mode::RealBackend),
            "idealized-hiding" => Ok(Mode::IdealizedHiding),
            _ => Err(Error::Input(format!("unknown mode '{s}'"))),
        }
    }
}

pub(crate) fn check_lambda(lambda: usize, max: usize) -> Result<()> {
    if lambda == 0 {
        return input_err("λ must be at least 1");
    }
    if lambda > max {
        return Err(Error::Resource(format!("λ = {lambda} exceeds the enumeration budget of {max}")));
    }
    Ok(())
}

/// Output of an experiment: a block-diagonal subnormalized state, one block
/// per classical leftover record, plus the mass on ⊥.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentOutput {
    pub accepted: BTreeMap<Vec<u8>, DensityMatrix>,
    pub reject_mass: f64,
}

impl ExperimentOutput {
    pub fn add(&mut self, record: Vec<u8>, weight: f64, residual: &crate::quantum::StateVector) {
        self.accepted
            .entry(record)
            .or_insert_with(|| DensityMatrix::zeros(residual.dim()))
            .add_pure(weight, residual);
    }

    pub fn merge(mut self, other: ExperimentOutput) -> Self {
        for (k, v) in other.accepted {
            match self.accepted.get_mut(&k) {
                Some(m) => m.add_assign(&v),
                None => {
                    self.accepted.insert(k, v);
                }
            }
        }
        self.reject_mass += other.reject_mass;
        self
    }

    pub fn accept_mass(&self) -> f64 {
        self.accepted.values().map(DensityMatrix::trace).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.accept_mass() + self.reject_mass
    }

    /// `½ Σ_r ‖ρ_r − τ_r‖₁ + ½ |⊥_ρ − ⊥_τ|`.
    pub fn trace_distance(&self, other: &ExperimentOutput) -> Result<f64> {
        let mut norm = (self.reject_mass - other.reject_mass).abs();
        for (k, a) in &self.accepted {
            norm += match other.accepted.get(k) {
                Some(b) => {
                    if a.dim() != b.dim() {
                        return input_err("blocks with the same record have different dimensions");
                    }
                    hermitian_trace_norm(&(a.entries() - b.entries()))
                }
                None => hermitian_trace_norm(a.entries()),
            };
        }
        for (k, b) in &other.accepted {
            if !self.accepted.contains_key(k) {
                norm += hermitian_trace_norm(b.entries());
            }
        }
        Ok((0.5 * norm).clamp(0.0, 1.0))
    }
}

/// `len (u32 BE) ‖ bytes`.
pub(crate) fn framed(bytes: &[u8]) -> Vec<u8> {
    let mut out = (bytes.len() as u32).to_be_bytes().to_vec();
    out.extend(bytes);
    out
}
