//! Deletion-phase adversaries with enumerable channels.
//!
//! An adversary sees a classical view and a λ-qubit register. It picks, per
//! qubit, whether to measure it (in either basis) or keep it; kept qubits
//! form its residual quantum state. Given the measurement outcomes it then
//! writes a certificate and a classical leftover record.

use std::fmt;
use std::str::FromStr;

use crate::bits::{BasisString, BitString};
use crate::compiler::DeletionCertificate;
use crate::error::{input_err, Error, Result};
use crate::quantum::{measure_and_discard_all_branches, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitAction {
    Hadamard,
    Computational,
    Keep,
}

pub trait Adversary: Send + Sync {
    fn name(&self) -> String;

    /// One action per qubit of the λ-qubit register.
    fn actions(&self, lambda: usize, view: &[u8]) -> Vec<QubitAction>;

    /// Certificate and leftover record. `outcomes[i]` is `None` for kept
    /// qubits.
    fn respond(&self, lambda: usize, view: &[u8], outcomes: &[Option<bool>]) -> (DeletionCertificate, Vec<u8>);
}

/// One branch of an adversary's channel.
#[derive(Clone, Debug)]
pub struct AdversaryBranch {
    pub probability: f64,
    pub certificate: DeletionCertificate,
    pub record: Vec<u8>,
    /// State of the kept qubits, in register order; zero qubits if none.
    pub residual: StateVector,
}

/// Enumerates the adversary's channel on `register`.
pub fn adversary_branches(
    adv: &dyn Adversary,
    view: &[u8],
    register: &StateVector,
    qubits: &[usize],
) -> Result<Vec<AdversaryBranch>> {
    let lambda = qubits.len();
    let actions = adv.actions(lambda, view);
    if actions.len() != lambda {
        return input_err(format!("{} returned {} actions for {lambda} qubits", adv.name(), actions.len()));
    }
    let measured: Vec<usize> = (0..lambda).filter(|&i| actions[i] != QubitAction::Keep).collect();
    let targets: Vec<usize> = measured.iter().map(|&i| qubits[i]).collect();
    let bases: BasisString = measured
        .iter()
        .map(|&i| actions[i] == QubitAction::Hadamard)
        .collect::<BitString>()
        .into();
    let mut out = Vec::new();
    for br in measure_and_discard_all_branches(register, &targets, &bases)? {
        let mut outcomes = vec![None; lambda];
        for (k, &i) in measured.iter().enumerate() {
            outcomes[i] = Some(br.outcome.get(k));
        }
        let (certificate, record) = adv.respond(lambda, view, &outcomes);
        if certificate.lambda() != lambda {
            return Err(Error::Input(format!("{} produced a malformed certificate", adv.name())));
        }
        out.push(AdversaryBranch { probability: br.probability, certificate, record, residual: br.residual });
    }
    Ok(out)
}

fn outcome_bits(outcomes: &[Option<bool>]) -> BitString {
    outcomes.iter().map(|o| o.unwrap_or(false)).collect()
}

fn record_with_outcomes(view: &[u8], outcomes: &[Option<bool>]) -> Vec<u8> {
    let mut rec = view.to_vec();
    rec.extend(outcomes.iter().map(|o| match o {
        None => 2u8,
        Some(b) => *b as u8,
    }));
    rec
}

/// Measures everything in the Hadamard basis; keeps only its view.
#[derive(Clone, Copy, Debug, Default)]
pub struct HonestDeleter;

impl Adversary for HonestDeleter {
    fn name(&self) -> String {
        "honest".into()
    }

    fn actions(&self, lambda: usize, _view: &[u8]) -> Vec<QubitAction> {
        vec![QubitAction::Hadamard; lambda]
    }

    fn respond(&self, _lambda: usize, view: &[u8], outcomes: &[Option<bool>]) -> (DeletionCertificate, Vec<u8>) {
        (DeletionCertificate::new(outcome_bits(outcomes)), view.to_vec())
    }
}

/// Measures everything in the computational basis and remembers it.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComputationalCheater;

impl Adversary for ComputationalCheater {
    fn name(&self) -> String {
        "comp-cheater".into()
    }

    fn actions(&self, lambda: usize, _view: &[u8]) -> Vec<QubitAction> {
        vec![QubitAction::Computational; lambda]
    }

    fn respond(&self, _lambda: usize, view: &[u8], outcomes: &[Option<bool>]) -> (DeletionCertificate, Vec<u8>) {
        (DeletionCertificate::new(outcome_bits(outcomes)), record_with_outcomes(view, outcomes))
    }
}

/// Hadamard on a chosen subset `S`, computational elsewhere, and remembers
/// all outcomes.
#[derive(Clone, Debug, Default)]
pub enum PartialDeleter {
    /// `S` = even positions (0, 2, …).
    #[default]
    Even,
    Positions(Vec<usize>),
}

impl PartialDeleter {
    pub fn subset(&self, lambda: usize) -> Vec<usize> {
        match self {
            PartialDeleter::Even => (0..lambda).step_by(2).collect(),
            PartialDeleter::Positions(p) => p.iter().copied().filter(|&i| i < lambda).collect(),
        }
    }
}

impl Adversary for PartialDeleter {
    fn name(&self) -> String {
        match self {
            PartialDeleter::Even => "partial".into(),
            PartialDeleter::Positions(p) => format!("partial{p:?}"),
        }
    }

    fn actions(&self, lambda: usize, _view: &[u8]) -> Vec<QubitAction> {
        let s = self.subset(lambda);
        (0..lambda)
            .map(|i| if s.contains(&i) { QubitAction::Hadamard } else { QubitAction::Computational })
            .collect()
    }

    fn respond(&self, _lambda: usize, view: &[u8], outcomes: &[Option<bool>]) -> (DeletionCertificate, Vec<u8>) {
        (DeletionCertificate::new(outcome_bits(outcomes)), record_with_outcomes(view, outcomes))
    }
}

/// Leaves the register untouched and sends a fixed certificate (all zeros
/// unless given).
#[derive(Clone, Debug, Default)]
pub struct NoMeasureGuesser {
    pub guess: Option<BitString>,
}

impl Adversary for NoMeasureGuesser {
    fn name(&self) -> String {
        "no-measure".into()
    }

    fn actions(&self, lambda: usize, _view: &[u8]) -> Vec<QubitAction> {
        vec![QubitAction::Keep; lambda]
    }

    fn respond(&self, lambda: usize, view: &[u8], _outcomes: &[Option<bool>]) -> (DeletionCertificate, Vec<u8>) {
        let cert = match &self.guess {
            Some(g) if g.len() == lambda => g.clone(),
            _ => BitString::zeros(lambda),
        };
        (DeletionCertificate::new(cert), view.to_vec())
    }
}

/// Names accepted on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BuiltinAdversary {
    Honest,
    CompCheater,
    Partial,
    NoMeasure,
}

impl BuiltinAdversary {
    pub const ALL: [BuiltinAdversary; 4] = [
        BuiltinAdversary::Honest,
        BuiltinAdversary::CompCheater,
        BuiltinAdversary::Partial,
        BuiltinAdversary::NoMeasure,
    ];

    pub fn build(self) -> Box<dyn Adversary> {
        match self {
            BuiltinAdversary::Honest => Box::new(HonestDeleter),
            BuiltinAdversary::CompCheater => Box::new(ComputationalCheater),
            BuiltinAdversary::Partial => Box::new(PartialDeleter::Even),
            BuiltinAdversary::NoMeasure => Box::new(NoMeasureGuesser::default()),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BuiltinAdversary::Honest => "honest",
            BuiltinAdversary::CompCheater => "comp-cheater",
            BuiltinAdversary::Partial => "partial",
            BuiltinAdversary::NoMeasure => "no-measure",
        }
    }
}

impl fmt::Display for BuiltinAdversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BuiltinAdversary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Input(format!("unknown adversary '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::bb84_prepare;

    fn branches(adv: &dyn Adversary, x: &str, theta: &str) -> Vec<AdversaryBranch> {
        let x: BitString = x.parse().unwrap();
        let state = bb84_prepare(&x, &theta.parse().unwrap()).unwrap();
        adversary_branches(adv, b"v", &state, &(0..x.len()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn probabilities_sum_to_one() {
        for a in BuiltinAdversary::ALL {
            let adv = a.build();
            for x in ["000", "101"] {
                for t in ["000", "011", "111"] {
                    let total: f64 = branches(adv.as_ref(), x, t).iter().map(|b| b.probability).sum();
                    assert!((total - 1.0).abs() < 1e-10, "{a} {x} {t}");
                }
            }
        }
    }

    #[test]
    fn honest_matches_on_hadamard_positions() {
        for b in branches(&HonestDeleter, "10", "11") {
            assert_eq!(b.certificate.x_prime.to_string(), "10");
            assert_eq!(b.record, b"v");
            assert_eq!(b.residual.n_qubits(), 0);
        }
    }

    #[test]
    fn guesser_keeps_register() {
        let br = branches(&NoMeasureGuesser::default(), "10", "01");
        assert_eq!(br.len(), 1);
        assert_eq!(br[0].residual.n_qubits(), 2);
        assert_eq!(br[0].certificate.x_prime.to_string(), "00");
    }

    #[test]
    fn partial_subset() {
        assert_eq!(PartialDeleter::Even.subset(5), vec![0, 2, 4]);
        let acts = PartialDeleter::Even.actions(3, &[]);
        assert_eq!(acts, vec![QubitAction::Hadamard, QubitAction::Computational, QubitAction::Hadamard]);
    }

    #[test]
    fn names_round_trip() {
        for a in BuiltinAdversary::ALL {
            assert_eq!(a.as_str().parse::<BuiltinAdversary>().unwrap(), a);
            assert_eq!(a.build().name(), a.as_str());
        }
        assert!("nobody".parse::<BuiltinAdversary>().is_err());
    }
}
