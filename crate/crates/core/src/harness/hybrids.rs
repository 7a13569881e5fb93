//! The hybrid chain for the compiled scheme in idealized-hiding mode.
//!
//! * `Hyb₀`: EV-EXP itself.
//! * `Hyb₁`: the BB84 register is produced by measuring the `C` halves of λ
//!   EPR pairs in basis θ; `b′` is sampled independently and the run outputs
//!   ⊥ unless `b′ = b ⊕ ⊕_{θ_i=0} x_i`.
//! * `Hyb₂`: as `Hyb₁`, but `C` is measured only after the adversary has
//!   produced its certificate.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::adversary::{adversary_branches, Adversary, QubitAction};
use crate::bits::{BasisString, BitString};
use crate::compiler::{verify, VerificationKey};
use crate::error::Result;
use crate::exec::Exec;
use crate::harness::experiment::exposures;
use crate::harness::{
    check_lambda, framed, run_ev_exp, ExperimentOutput, Mode, Scheme, MAX_HYBRID_LAMBDA,
};
use crate::quantum::{epr_a_qubits, epr_c_qubits, epr_pairs, measure_and_discard_all_branches, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Hybrid {
    Hyb0,
    Hyb1,
    Hyb2,
}

impl Hybrid {
    pub const ALL: [Hybrid; 3] = [Hybrid::Hyb0, Hybrid::Hyb1, Hybrid::Hyb2];
}

impl fmt::Display for Hybrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hybrid::Hyb0 => f.write_str("Hyb0"),
            Hybrid::Hyb1 => f.write_str("Hyb1"),
            Hybrid::Hyb2 => f.write_str("Hyb2"),
        }
    }
}

/// Advantages `TD(Hyb_i(0), Hyb_i(1))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridReport {
    pub advt0: f64,
    pub advt1: f64,
    pub advt2: f64,
}

impl HybridReport {
    /// `|Advt₁ − Advt₀/2|`.
    pub fn halving_gap(&self) -> f64 {
        (self.advt1 - self.advt0 / 2.0).abs()
    }

    /// `|Advt₂ − Advt₁|`.
    pub fn deferral_gap(&self) -> f64 {
        (self.advt2 - self.advt1).abs()
    }
}

fn view(theta: &BasisString, bprime: bool) -> Result<Vec<u8>> {
    let mut e = exposures(Scheme::CompiledPke, Mode::IdealizedHiding, theta, bprime)?;
    Ok(e.swap_remove(0).view)
}

fn settle(
    out: &mut ExperimentOutput,
    weight: f64,
    vk: &VerificationKey,
    cert: &crate::compiler::DeletionCertificate,
    record: &[u8],
    residual: &StateVector,
) -> Result<()> {
    if verify(vk, cert)?.is_accept() {
        out.add(framed(record), weight, residual);
    } else {
        out.reject_mass += weight;
    }
    Ok(())
}

fn hyb1_chunk(adv: &dyn Adversary, b: bool, theta: &BasisString, epr: &StateVector) -> Result<ExperimentOutput> {
    let lambda = theta.len();
    let w_theta = 0.5 / (1u64 << lambda) as f64;
    let qubits: Vec<usize> = (0..lambda).collect();
    let mut out = ExperimentOutput::default();
    for bprime in [false, true] {
        let v = view(theta, bprime)?;
        for c in measure_and_discard_all_branches(epr, &epr_c_qubits(lambda), theta)? {
            let w = w_theta * c.probability;
            let x = c.outcome;
            if bprime != b ^ theta.masked_parity(&x) {
                out.reject_mass += w;
                continue;
            }
            let vk = VerificationKey::new(x, theta.clone())?;
            for br in adversary_branches(adv, &v, &c.residual, &qubits)? {
                settle(&mut out, w * br.probability, &vk, &br.certificate, &br.record, &br.residual)?;
            }
        }
    }
    Ok(out)
}

fn hyb2_chunk(adv: &dyn Adversary, b: bool, theta: &BasisString, epr: &StateVector) -> Result<ExperimentOutput> {
    let lambda = theta.len();
    let w_theta = 0.5 / (1u64 << lambda) as f64;
    let a_qubits = epr_a_qubits(lambda);
    let mut out = ExperimentOutput::default();
    for bprime in [false, true] {
        let v = view(theta, bprime)?;
        // The residual holds every C qubit plus the kept A qubits, in layout
        // order; locate the C qubits inside it.
        let actions = adv.actions(lambda, &v);
        let survivors: Vec<usize> =
            (0..2 * lambda).filter(|q| q % 2 == 0 || actions.get(q / 2) == Some(&QubitAction::Keep)).collect();
        let c_pos: Vec<usize> = (0..survivors.len()).filter(|&i| survivors[i].is_multiple_of(2)).collect();
        for br in adversary_branches(adv, &v, epr, &a_qubits)? {
            for c in measure_and_discard_all_branches(&br.residual, &c_pos, theta)? {
                let w = w_theta * br.probability * c.probability;
                let x = c.outcome;
                if bprime != b ^ theta.masked_parity(&x) {
                    out.reject_mass += w;
                    continue;
                }
                let vk = VerificationKey::new(x, theta.clone())?;
                settle(&mut out, w, &vk, &br.certificate, &br.record, &c.residual)?;
            }
        }
    }
    Ok(out)
}

/// Evaluates `Hyb_h(b)` exactly.
pub fn run_hybrid(h: Hybrid, adv: &dyn Adversary, b: bool, lambda: usize, exec: Exec) -> Result<ExperimentOutput> {
    check_lambda(lambda, MAX_HYBRID_LAMBDA)?;
    if h == Hybrid::Hyb0 {
        return run_ev_exp(Scheme::CompiledPke, adv, b, lambda, Mode::IdealizedHiding, exec);
    }
    let epr = epr_pairs(lambda)?;
    let parts = exec.map(1usize << lambda, |t| {
        let theta = BasisString::new(BitString::from_index(t, lambda));
        match h {
            Hybrid::Hyb1 => hyb1_chunk(adv, b, &theta, &epr),
            _ => hyb2_chunk(adv, b, &theta, &epr),
        }
    });
    parts.into_iter().try_fold(ExperimentOutput::default(), |acc, p| Ok(acc.merge(p?)))
}

/// `(Advt(Hyb₀), Advt(Hyb₁), Advt(Hyb₂))`.
pub fn hybrid_chain(adv: &dyn Adversary, lambda: usize, exec: Exec) -> Result<HybridReport> {
    let mut advt = [0.0; 3];
    for (i, h) in Hybrid::ALL.into_iter().enumerate() {
        let o0 = run_hybrid(h, adv, false, lambda, exec)?;
        let o1 = run_hybrid(h, adv, true, lambda, exec)?;
        advt[i] = o0.trace_distance(&o1)?;
    }
    Ok(HybridReport { advt0: advt[0], advt1: advt[1], advt2: advt[2] })
}
