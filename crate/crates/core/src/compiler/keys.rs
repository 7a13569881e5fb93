//! Verification keys, deletion certificates, the consumable register handle,
//! and their byte formats.
//!
//! Byte formats (all multi-byte integers big-endian):
//!
//! ```text
//! VerificationKey     0x01 ‖ λ (u16) ‖ x bits ‖ θ bits
//! DeletionCertificate 0x01 ‖ λ (u16) ‖ x′ bits
//! ```
//!
//! Bit strings are packed most-significant-first with zero padding to a
//! whole byte.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::{BasisString, BitString};
use crate::error::{input_err, Error, Result};
use crate::quantum::StateVector;

pub const FORMAT_TAG: u8 = 0x01;

/// `vk = (x, θ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationKey {
    pub x: BitString,
    pub theta: BasisString,
}

impl VerificationKey {
    pub fn new(x: BitString, theta: BasisString) -> Result<Self> {
        if x.len() != theta.len() {
            return input_err(format!("|x| = {} but |θ| = {}", x.len(), theta.len()));
        }
        Ok(Self { x, theta })
    }

    pub fn lambda(&self) -> usize {
        self.x.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = header(self.lambda());
        out.extend(self.x.to_packed_bytes());
        out.extend(self.theta.bits().to_packed_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (lambda, body) = parse_header(bytes)?;
        let w = lambda.div_ceil(8);
        if body.len() != 2 * w {
            return Err(Error::Format("verification key body has the wrong length".into()));
        }
        let x = BitString::from_packed_bytes(&body[..w], lambda)?;
        let theta = BasisString::new(BitString::from_packed_bytes(&body[w..], lambda)?);
        Self::new(x, theta)
    }
}

/// `cert = x′`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeletionCertificate {
    pub x_prime: BitString,
}

impl DeletionCertificate {
    pub fn new(x_prime: BitString) -> Self {
        Self { x_prime }
    }

    pub fn lambda(&self) -> usize {
        self.x_prime.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = header(self.lambda());
        out.extend(self.x_prime.to_packed_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (lambda, body) = parse_header(bytes)?;
        Ok(Self::new(BitString::from_packed_bytes(body, lambda)?))
    }
}

fn header(lambda: usize) -> Vec<u8> {
    let mut out = vec![FORMAT_TAG];
    out.extend((lambda as u16).to_be_bytes());
    out
}

fn parse_header(bytes: &[u8]) -> Result<(usize, &[u8])> {
    match bytes {
        [FORMAT_TAG, hi, lo, body @ ..] => Ok((u16::from_be_bytes([*hi, *lo]) as usize, body)),
        [tag, ..] => Err(Error::Format(format!("unknown format tag {tag:#04x}"))),
        [] => Err(Error::Format("empty input".into())),
    }
}

/// Verdict of a deletion check or a binding-commitment opening.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        })
    }
}

/// Single-owner handle to a simulated quantum register. Measuring it for
/// decryption or deletion consumes it; any later use is a state error.
#[derive(Clone, Debug)]
pub struct QuantumRegister {
    state: Option<StateVector>,
}

impl QuantumRegister {
    pub fn new(state: StateVector) -> Self {
        Self { state: Some(state) }
    }

    pub fn n_qubits(&self) -> Option<usize> {
        self.state.as_ref().map(StateVector::n_qubits)
    }

    pub fn is_consumed(&self) -> bool {
        self.state.is_none()
    }

    /// Read access without consuming, for exact branch enumeration.
    pub fn peek(&self) -> Result<&StateVector> {
        self.state.as_ref().ok_or_else(consumed)
    }

    pub fn take(&mut self) -> Result<StateVector> {
        self.state.take().ok_or_else(consumed)
    }

    /// Swaps in a different state; used by adversarial holders.
    pub fn replace(&mut self, state: StateVector) {
        self.state = Some(state);
    }
}

fn consumed() -> Error {
    Error::State("quantum register already consumed".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vk_layout() {
        let vk = VerificationKey::new("1011".parse().unwrap(), "0101".parse().unwrap()).unwrap();
        assert_eq!(vk.to_bytes(), vec![0x01, 0x00, 0x04, 0b1011_0000, 0b0101_0000]);
        let cert = DeletionCertificate::new("101".parse().unwrap());
        assert_eq!(cert.to_bytes(), vec![0x01, 0x00, 0x03, 0b1010_0000]);
    }

    #[test]
    fn bad_formats() {
        assert!(VerificationKey::from_bytes(&[0x02, 0, 1, 0, 0]).is_err());
        assert!(VerificationKey::from_bytes(&[0x01, 0, 1, 0]).is_err());
        assert!(DeletionCertificate::from_bytes(&[]).is_err());
        assert!(VerificationKey::new("1".parse().unwrap(), "11".parse().unwrap()).is_err());
    }

    #[test]
    fn register_is_consumed_once() {
        let mut reg = QuantumRegister::new(StateVector::basis(1, 0));
        assert!(reg.take().is_ok());
        assert!(matches!(reg.take(), Err(Error::State(_))));
        assert!(reg.peek().is_err());
    }

    proptest! {
        #[test]
        fn key_and_cert_bytes_round_trip(x in proptest::collection::vec(any::<bool>(), 1..20), seed in any::<u64>()) {
            let theta: BitString = x.iter().enumerate().map(|(i, _)| (seed >> (i % 64)) & 1 == 1).collect();
            let vk = VerificationKey::new(BitString::new(x.clone()), BasisString::new(theta)).unwrap();
            prop_assert_eq!(VerificationKey::from_bytes(&vk.to_bytes()).unwrap(), vk);
            let cert = DeletionCertificate::new(BitString::new(x));
            prop_assert_eq!(DeletionCertificate::from_bytes(&cert.to_bytes()).unwrap(), cert);
        }
    }
}
