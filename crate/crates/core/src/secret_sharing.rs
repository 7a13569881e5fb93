//! 2-of-2 secret sharing of a bit with certified deletion, and the
//! one-time-pad variant whose key is `(k, θ)`.
//!
//! `ClassicalShare` bytes: `0x02 ‖ λ (u16 BE) ‖ θ bits ‖ masked bit`, bits
//! packed most-significant-first with zero padding.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BasisString, BitString};
use crate::compiler::{
    delete, masked_bit, recover_bit, recover_bit_distribution, DeletionCertificate, QuantumRegister,
    VerificationKey, Verdict,
};
use crate::error::{input_err, Error, Result};
use crate::quantum::bb84_prepare;

pub const SHARE_FORMAT_TAG: u8 = 0x02;

/// `s₁ = |x⟩_θ`.
pub type QuantumShare = QuantumRegister;

/// `s₂ = (θ, b ⊕ ⊕_{i:θ_i=0} x_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassicalShare {
    pub theta: BasisString,
    pub masked_bit: bool,
}

impl ClassicalShare {
    pub fn lambda(&self) -> usize {
        self.theta.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![SHARE_FORMAT_TAG];
        out.extend((self.lambda() as u16).to_be_bytes());
        let mut bits = self.theta.bits().clone();
        bits.push(self.masked_bit);
        out.extend(bits.to_packed_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let [SHARE_FORMAT_TAG, hi, lo, body @ ..] = bytes else {
            return Err(Error::Format("not a classical share".into()));
        };
        let lambda = u16::from_be_bytes([*hi, *lo]) as usize;
        let bits = BitString::from_packed_bytes(body, lambda + 1)?;
        Ok(Self {
            theta: BasisString::new(bits.select(&(0..lambda).collect::<Vec<_>>())),
            masked_bit: bits.get(lambda),
        })
    }
}

/// Holds `s₂` back until a deletion certificate has been accepted.
#[derive(Clone, Debug)]
pub struct ReleaseLatch<T> {
    value: T,
    released: bool,
}

impl<T> ReleaseLatch<T> {
    pub fn new(value: T) -> Self {
        Self { value, released: false }
    }

    /// Opens the latch iff `verdict` is accept. Once open it stays open.
    pub fn release_on(&mut self, verdict: Verdict) -> Option<&T> {
        self.released |= verdict.is_accept();
        self.get()
    }

    pub fn get(&self) -> Option<&T> {
        self.released.then_some(&self.value)
    }

    pub fn is_released(&self) -> bool {
        self.released
    }
}

fn check_lambda(lambda: usize) -> Result<()> {
    if lambda == 0 {
        return input_err("λ must be at least 1");
    }
    Ok(())
}

/// `Share(b)` with random `(x, θ)`.
pub fn ss_share<R: Rng + ?Sized>(
    b: bool,
    lambda: usize,
    rng: &mut R,
) -> Result<(QuantumShare, ClassicalShare, VerificationKey)> {
    check_lambda(lambda)?;
    let x = BitString::random(lambda, rng);
    let theta = BasisString::random(lambda, rng);
    ss_share_with(b, &x, &theta)
}

/// `Share(b)` with fixed `(x, θ)`.
pub fn ss_share_with(
    b: bool,
    x: &BitString,
    theta: &BasisString,
) -> Result<(QuantumShare, ClassicalShare, VerificationKey)> {
    let vk = VerificationKey::new(x.clone(), theta.clone())?;
    check_lambda(vk.lambda())?;
    let s1 = QuantumRegister::new(bb84_prepare(x, theta)?);
    let s2 = ClassicalShare { theta: theta.clone(), masked_bit: masked_bit(b, x, theta) };
    Ok((s1, s2, vk))
}

/// `Rec(s₁, s₂)`. Consumes `s₁`.
pub fn ss_rec<R: Rng + ?Sized>(s1: &mut QuantumShare, s2: &ClassicalShare, rng: &mut R) -> Result<bool> {
    recover_bit(s1, &s2.theta, s2.masked_bit, rng)
}

/// Exact `[Pr[0], Pr[1]]` of `Rec`.
pub fn ss_rec_distribution(s1: &QuantumShare, s2: &ClassicalShare) -> Result<[f64; 2]> {
    recover_bit_distribution(s1, &s2.theta, s2.masked_bit)
}

pub fn ss_del<R: Rng + ?Sized>(s1: &mut QuantumShare, rng: &mut R) -> Result<DeletionCertificate> {
    delete(s1, rng)
}

pub use crate::compiler::verify as ss_ver;

/// `(|x⟩_θ, k ⊕ b ⊕ ⊕_{i:θ_i=0} x_i)`.
#[derive(Clone, Debug)]
pub struct OtpCiphertext {
    pub quantum: QuantumRegister,
    pub masked: bool,
}

/// Decryption key `(k, θ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OtpSecret {
    pub k: bool,
    pub theta: BasisString,
}

pub fn otp_encrypt<R: Rng + ?Sized>(
    k: bool,
    b: bool,
    lambda: usize,
    rng: &mut R,
) -> Result<(OtpCiphertext, OtpSecret, VerificationKey)> {
    check_lambda(lambda)?;
    let x = BitString::random(lambda, rng);
    let theta = BasisString::random(lambda, rng);
    otp_encrypt_with(k, b, &x, &theta)
}

pub fn otp_encrypt_with(
    k: bool,
    b: bool,
    x: &BitString,
    theta: &BasisString,
) -> Result<(OtpCiphertext, OtpSecret, VerificationKey)> {
    let (s1, s2, vk) = ss_share_with(b ^ k, x, theta)?;
    let ct = OtpCiphertext { quantum: s1, masked: s2.masked_bit };
    Ok((ct, OtpSecret { k, theta: s2.theta }, vk))
}

/// Consumes the ciphertext register.
pub fn otp_decrypt<R: Rng + ?Sized>(secret: &OtpSecret, ct: &mut OtpCiphertext, rng: &mut R) -> Result<bool> {
    Ok(secret.k ^ recover_bit(&mut ct.quantum, &secret.theta, ct.masked, rng)?)
}

pub fn otp_decrypt_distribution(secret: &OtpSecret, ct: &OtpCiphertext) -> Result<[f64; 2]> {
    let d = recover_bit_distribution(&ct.quantum, &secret.theta, ct.masked)?;
    Ok(if secret.k { [d[1], d[0]] } else { d })
}
