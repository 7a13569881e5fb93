//! Certified-deletion compiler: turns a bit-encryption scheme into one whose
//! ciphertexts carry a BB84 register that can be provably deleted.
//!
//! `Enc′(pk, b) = (|x⟩_θ, Enc(pk, θ ‖ b ⊕ ⊕_{i:θ_i=0} x_i))` with `vk = (x, θ)`.

pub mod backend;
pub mod keys;

use rand::Rng;

pub use backend::{SemanticScheme, ToyCipher};
pub use keys::{DeletionCertificate, QuantumRegister, VerificationKey, Verdict};

use crate::bits::{BasisString, BitString};
use crate::error::{input_err, Error, Result};
use crate::quantum::{bb84_prepare, measure_and_discard, measure_and_discard_all_branches};

/// `b ⊕ ⊕_{i:θ_i=0} x_i`.
pub fn masked_bit(b: bool, x: &BitString, theta: &BasisString) -> bool {
    b ^ theta.masked_parity(x)
}

/// Inner plaintext `θ ‖ b′`.
pub fn inner_plaintext(theta: &BasisString, masked: bool) -> BitString {
    let mut m = theta.bits().clone();
    m.push(masked);
    m
}

/// Inverse of [`inner_plaintext`] for a known λ.
pub fn split_inner_plaintext(m: &BitString, lambda: usize) -> Result<(BasisString, bool)> {
    if m.len() != lambda + 1 {
        return Err(Error::Decryption(format!(
            "inner plaintext has {} bits, expected {}",
            m.len(),
            lambda + 1
        )));
    }
    let theta = BasisString::new(m.select(&(0..lambda).collect::<Vec<_>>()));
    Ok((theta, m.get(lambda)))
}

fn all_qubits(reg: &QuantumRegister) -> Result<Vec<usize>> {
    Ok((0..reg.peek()?.n_qubits()).collect())
}

/// Measures the register in bases θ and unmasks: `b′ ⊕ ⊕_{i:θ_i=0} x_i`.
/// Consumes the register.
pub fn recover_bit<R: Rng + ?Sized>(
    reg: &mut QuantumRegister,
    theta: &BasisString,
    masked: bool,
    rng: &mut R,
) -> Result<bool> {
    let targets = all_qubits(reg)?;
    if targets.len() != theta.len() {
        return input_err(format!("register has {} qubits, θ has {}", targets.len(), theta.len()));
    }
    let state = reg.take()?;
    let x = measure_and_discard(&state, &targets, theta, rng)?.outcome;
    Ok(masked ^ theta.masked_parity(&x))
}

/// Exact output distribution `[Pr[0], Pr[1]]` of [`recover_bit`], without
/// consuming the register.
pub fn recover_bit_distribution(
    reg: &QuantumRegister,
    theta: &BasisString,
    masked: bool,
) -> Result<[f64; 2]> {
    let targets = all_qubits(reg)?;
    if targets.len() != theta.len() {
        return input_err(format!("register has {} qubits, θ has {}", targets.len(), theta.len()));
    }
    let mut out = [0.0; 2];
    for br in measure_and_discard_all_branches(reg.peek()?, &targets, theta)? {
        out[(masked ^ theta.masked_parity(&br.outcome)) as usize] += br.probability;
    }
    Ok(out)
}

/// `Del`: measure every qubit in the Hadamard basis. Consumes the register.
pub fn delete<R: Rng + ?Sized>(reg: &mut QuantumRegister, rng: &mut R) -> Result<DeletionCertificate> {
    let targets = all_qubits(reg)?;
    let state = reg.take()?;
    let br = measure_and_discard(&state, &targets, &BasisString::hadamard(targets.len()), rng)?;
    Ok(DeletionCertificate::new(br.outcome))
}

/// Every certificate [`delete`] can output, with its probability.
pub fn delete_branches(reg: &QuantumRegister) -> Result<Vec<(f64, DeletionCertificate)>> {
    let targets = all_qubits(reg)?;
    Ok(measure_and_discard_all_branches(reg.peek()?, &targets, &BasisString::hadamard(targets.len()))?
        .into_iter()
        .map(|b| (b.probability, DeletionCertificate::new(b.outcome)))
        .collect())
}

/// `Ver`: accept iff `x_i = x′_i` on every Hadamard position.
pub fn verify(vk: &VerificationKey, cert: &DeletionCertificate) -> Result<Verdict> {
    if cert.lambda() != vk.lambda() {
        return input_err(format!("certificate has {} bits, key has {}", cert.lambda(), vk.lambda()));
    }
    let ok = vk
        .theta
        .hadamard_positions()
        .into_iter()
        .all(|i| vk.x.get(i) == cert.x_prime.get(i));
    Ok(Verdict::from_bool(ok))
}

/// Conjunction of per-bit verdicts.
pub fn verify_all(vks: &[VerificationKey], certs: &[DeletionCertificate]) -> Result<Verdict> {
    if vks.len() != certs.len() {
        return input_err(format!("{} keys but {} certificates", vks.len(), certs.len()));
    }
    let mut ok = true;
    for (vk, cert) in vks.iter().zip(certs) {
        ok &= verify(vk, cert)?.is_accept();
    }
    Ok(Verdict::from_bool(ok))
}

/// `(|x⟩_θ, Enc(pk, θ ‖ b′))`.
#[derive(Clone, Debug)]
pub struct CdCiphertext {
    pub quantum: QuantumRegister,
    pub inner: Vec<u8>,
}

/// The compiled scheme over a backend `S` at security parameter λ.
#[derive(Clone, Debug)]
pub struct CdPke<S> {
    scheme: S,
    lambda: usize,
}

impl<S: SemanticScheme> CdPke<S> {
    pub fn new(scheme: S, lambda: usize) -> Result<Self> {
        if lambda == 0 {
            return input_err("λ must be at least 1");
        }
        Ok(Self { scheme, lambda })
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn scheme(&self) -> &S {
        &self.scheme
    }

    pub fn keygen<R: Rng>(&self, rng: &mut R) -> (Vec<u8>, Vec<u8>) {
        self.scheme.gen(self.lambda, rng)
    }

    pub fn encrypt<R: Rng>(&self, pk: &[u8], b: bool, rng: &mut R) -> Result<(CdCiphertext, VerificationKey)> {
        let x = BitString::random(self.lambda, rng);
        let theta = BasisString::random(self.lambda, rng);
        self.encrypt_with(pk, b, &x, &theta, rng)
    }

    /// Encryption with caller-chosen `(x, θ)`, for enumeration.
    pub fn encrypt_with<R: Rng>(
        &self,
        pk: &[u8],
        b: bool,
        x: &BitString,
        theta: &BasisString,
        rng: &mut R,
    ) -> Result<(CdCiphertext, VerificationKey)> {
        if x.len() != self.lambda || theta.len() != self.lambda {
            return input_err(format!("x and θ must have length λ = {}", self.lambda));
        }
        let inner = self.scheme.enc(pk, &inner_plaintext(theta, masked_bit(b, x, theta)), rng)?;
        let ct = CdCiphertext { quantum: QuantumRegister::new(bb84_prepare(x, theta)?), inner };
        Ok((ct, VerificationKey::new(x.clone(), theta.clone())?))
    }

    fn open_inner(&self, sk: &[u8], ct: &CdCiphertext) -> Result<(BasisString, bool)> {
        if ct.quantum.n_qubits().is_some_and(|n| n != self.lambda) {
            return input_err(format!("register must have λ = {} qubits", self.lambda));
        }
        split_inner_plaintext(&self.scheme.dec(sk, &ct.inner)?, self.lambda)
    }

    /// `Dec′`. Consumes the quantum register.
    pub fn decrypt<R: Rng>(&self, sk: &[u8], ct: &mut CdCiphertext, rng: &mut R) -> Result<bool> {
        let (theta, masked) = self.open_inner(sk, ct)?;
        recover_bit(&mut ct.quantum, &theta, masked, rng)
    }

    /// Exact `[Pr[0], Pr[1]]` of `Dec′` on `ct`.
    pub fn decrypt_distribution(&self, sk: &[u8], ct: &CdCiphertext) -> Result<[f64; 2]> {
        let (theta, masked) = self.open_inner(sk, ct)?;
        recover_bit_distribution(&ct.quantum, &theta, masked)
    }

    pub fn encrypt_string<R: Rng>(
        &self,
        pk: &[u8],
        m: &BitString,
        rng: &mut R,
    ) -> Result<(Vec<CdCiphertext>, Vec<VerificationKey>)> {
        if m.is_empty() {
            return input_err("message must have at least one bit");
        }
        let mut cts = Vec::with_capacity(m.len());
        let mut vks = Vec::with_capacity(m.len());
        for b in m.iter() {
            let (ct, vk) = self.encrypt(pk, b, rng)?;
            cts.push(ct);
            vks.push(vk);
        }
        Ok((cts, vks))
    }

    pub fn decrypt_string<R: Rng>(&self, sk: &[u8], cts: &mut [CdCiphertext], rng: &mut R) -> Result<BitString> {
        cts.iter_mut().map(|ct| self.decrypt(sk, ct, rng)).collect()
    }
}

pub fn delete_string<R: Rng + ?Sized>(cts: &mut [CdCiphertext], rng: &mut R) -> Result<Vec<DeletionCertificate>> {
    cts.iter_mut().map(|ct| delete(&mut ct.quantum, rng)).collect()
}
