//! Three-phase commitment (Commit, then Delete or Reveal) with certified
//! everlasting hiding, over a pluggable statistically binding commitment.
//!
//! Frames on the wire: `phase tag (1 byte) ‖ length (u16 BE) ‖ payload`,
//! with tags 0x01 commit, 0x02 delete, 0x03 reveal.

use std::fmt;
use std::sync::Mutex;

use rand::{Rng, RngCore};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::adversary::{adversary_branches, Adversary, HonestDeleter};
use crate::bits::{BasisString, BitString};
use crate::compiler::{
    inner_plaintext, masked_bit, recover_bit, recover_bit_distribution, split_inner_plaintext, verify, ToyCipher,
    QuantumRegister, SemanticScheme, VerificationKey, Verdict,
};
use crate::error::{input_err, Error, Result};
use crate::quantum::{bb84_prepare, measure::sample_branch};

/// Classical two-phase commitment with an unbounded extractor.
pub trait BindingCommitment: Send + Sync {
    fn name(&self) -> &'static str;
    /// Returns `(commitment message, opening)`.
    fn commit(&self, input: &BitString, rng: &mut dyn RngCore) -> Result<(Vec<u8>, Vec<u8>)>;
    fn reveal_check(&self, message: &[u8], opening: &[u8], claimed: &BitString) -> Verdict;
    /// The unique string any accepting opening can reveal.
    fn extract(&self, message: &[u8]) -> Result<BitString>;
}

/// Trusted record: the message is a handle that says nothing about the
/// input, and the record answers reveal checks and extraction.
#[derive(Debug, Default)]
pub struct IdealCommitment {
    records: Mutex<Vec<BitString>>,
}

impl IdealCommitment {
    fn lookup(&self, message: &[u8]) -> Option<BitString> {
        let idx = u32::from_be_bytes(message.try_into().ok()?) as usize;
        self.records.lock().expect("record lock").get(idx).cloned()
    }
}

impl BindingCommitment for IdealCommitment {
    fn name(&self) -> &'static str {
        "ideal"
    }

    fn commit(&self, input: &BitString, _rng: &mut dyn RngCore) -> Result<(Vec<u8>, Vec<u8>)> {
        let mut records = self.records.lock().expect("record lock");
        let handle = u32::try_from(records.len()).map_err(|_| Error::Resource("record full".into()))?;
        records.push(input.clone());
        Ok((handle.to_be_bytes().to_vec(), Vec::new()))
    }

    fn reveal_check(&self, message: &[u8], _opening: &[u8], claimed: &BitString) -> Verdict {
        Verdict::from_bool(self.lookup(message).as_ref() == Some(claimed))
    }

    fn extract(&self, message: &[u8]) -> Result<BitString> {
        self.lookup(message).ok_or_else(|| Error::Extraction("unknown commitment handle".into()))
    }
}

/// Keyed-digest commitment: `Enc_k(m) ‖ H(m ‖ r)` with opening `r`, where
/// `k` is an extraction trapdoor held by this object. Computationally
/// hiding at best and only under the toy cipher; for realistic transcripts.
#[derive(Clone, Debug)]
pub struct KeyedDigestCommitment {
    trapdoor: Vec<u8>,
}

const DIGEST_LEN: usize = 32;
const OPENING_LEN: usize = 16;

impl KeyedDigestCommitment {
    pub fn new<R: Rng>(rng: &mut R) -> Self {
        Self { trapdoor: ToyCipher.gen(0, rng).1 }
    }

    fn digest(input: &BitString, opening: &[u8]) -> [u8; DIGEST_LEN] {
        let mut h = Sha256::new();
        h.update(b"commit");
        h.update((input.len() as u64).to_be_bytes());
        h.update(input.to_packed_bytes());
        h.update(opening);
        h.finalize().into()
    }
}

impl BindingCommitment for KeyedDigestCommitment {
    fn name(&self) -> &'static str {
        "keyed-digest"
    }

    fn commit(&self, input: &BitString, rng: &mut dyn RngCore) -> Result<(Vec<u8>, Vec<u8>)> {
        let mut opening = vec![0u8; OPENING_LEN];
        rng.fill_bytes(&mut opening);
        let mut message = ToyCipher.enc(&self.trapdoor, input, rng)?;
        message.extend(Self::digest(input, &opening));
        Ok((message, opening))
    }

    fn reveal_check(&self, message: &[u8], opening: &[u8], claimed: &BitString) -> Verdict {
        let ok = message.len() > DIGEST_LEN
            && opening.len() == OPENING_LEN
            && message[message.len() - DIGEST_LEN..] == Self::digest(claimed, opening);
        Verdict::from_bool(ok)
    }

    fn extract(&self, message: &[u8]) -> Result<BitString> {
        if message.len() <= DIGEST_LEN {
            return Err(Error::Extraction("commitment message too short".into()));
        }
        ToyCipher
            .dec(&self.trapdoor, &message[..message.len() - DIGEST_LEN])
            .map_err(|e| Error::Extraction(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommitPhase {
    Init,
    Committed,
    Deleted,
    Revealed,
    Aborted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Committer,
    Receiver,
}

pub const TAG_COMMIT: u8 = 0x01;
pub const TAG_DELETE: u8 = 0x02;
pub const TAG_REVEAL: u8 = 0x03;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Frame {
    pub from: Role,
    pub tag: u8,
    #[serde(serialize_with = "as_hex")]
    pub payload: Vec<u8>,
}

fn as_hex<S: serde::Serializer>(bytes: &[u8], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&hex::encode(bytes))
}

impl Frame {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let len = u16::try_from(self.payload.len()).map_err(|_| Error::Format("frame payload too long".into()))?;
        let mut out = vec![self.tag];
        out.extend(len.to_be_bytes());
        out.extend(&self.payload);
        Ok(out)
    }

    /// Splits a byte stream into `(tag, payload)` pairs.
    pub fn parse_stream(mut bytes: &[u8]) -> Result<Vec<(u8, Vec<u8>)>> {
        let mut out = Vec::new();
        while !bytes.is_empty() {
            let [tag, hi, lo, rest @ ..] = bytes else {
                return Err(Error::Format("truncated frame header".into()));
            };
            if !matches!(*tag, TAG_COMMIT | TAG_DELETE | TAG_REVEAL) {
                return Err(Error::Format(format!("unknown phase tag {tag:#04x}")));
            }
            let len = u16::from_be_bytes([*hi, *lo]) as usize;
            if rest.len() < len {
                return Err(Error::Format("truncated frame payload".into()));
            }
            out.push((*tag, rest[..len].to_vec()));
            bytes = &rest[len..];
        }
        Ok(out)
    }
}

/// Receiver output of the Reveal phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RevealOutput {
    Bit(bool),
    Bottom,
}

impl fmt::Display for RevealOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RevealOutput::Bit(b) => write!(f, "{}", *b as u8),
            RevealOutput::Bottom => f.write_str("⊥"),
        }
    }
}

#[derive(Clone, Debug)]
struct CommitterSecrets {
    b: bool,
    vk: VerificationKey,
    opening: Vec<u8>,
}

/// Both parties of one commitment, driven in protocol order.
pub struct CdCommitSession<'a> {
    backend: &'a dyn BindingCommitment,
    lambda: usize,
    phase: CommitPhase,
    committer: Option<CommitterSecrets>,
    message: Vec<u8>,
    register: Option<QuantumRegister>,
    transcript: Vec<Frame>,
}

impl<'a> CdCommitSession<'a> {
    pub fn new(backend: &'a dyn BindingCommitment, lambda: usize) -> Result<Self> {
        if lambda == 0 {
            return input_err("λ must be at least 1");
        }
        Ok(Self {
            backend,
            lambda,
            phase: CommitPhase::Init,
            committer: None,
            message: Vec::new(),
            register: None,
            transcript: Vec::new(),
        })
    }

    pub fn phase(&self) -> CommitPhase {
        self.phase
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn transcript(&self) -> &[Frame] {
        &self.transcript
    }

    /// The receiver's classical view after Commit.
    pub fn commitment_message(&self) -> &[u8] {
        &self.message
    }

    /// The receiver's quantum register.
    pub fn register(&self) -> Result<&QuantumRegister> {
        self.register.as_ref().ok_or_else(|| Error::State("no register received".into()))
    }

    pub fn verification_key(&self) -> Option<&VerificationKey> {
        self.committer.as_ref().map(|c| &c.vk)
    }

    pub fn transcript_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for f in &self.transcript {
            out.extend(f.to_bytes()?);
        }
        Ok(out)
    }

    fn require(&self, phase: CommitPhase, what: &str) -> Result<()> {
        if self.phase != phase {
            return Err(Error::State(format!("{what} not allowed in phase {:?}", self.phase)));
        }
        Ok(())
    }

    pub fn commit_phase<R: Rng>(&mut self, b: bool, rng: &mut R) -> Result<()> {
        let x = BitString::random(self.lambda, rng);
        let theta = BasisString::random(self.lambda, rng);
        self.commit_phase_with(b, &x, &theta, rng)
    }

    pub fn commit_phase_with<R: Rng>(&mut self, b: bool, x: &BitString, theta: &BasisString, rng: &mut R) -> Result<()> {
        self.require(CommitPhase::Init, "commit")?;
        let vk = VerificationKey::new(x.clone(), theta.clone())?;
        if vk.lambda() != self.lambda {
            return input_err(format!("x and θ must have length λ = {}", self.lambda));
        }
        let input = inner_plaintext(theta, masked_bit(b, x, theta));
        let (message, opening) = match self.backend.commit(&input, rng) {
            Ok(v) => v,
            Err(e) => {
                self.phase = CommitPhase::Aborted;
                return Err(e);
            }
        };
        self.register = Some(QuantumRegister::new(bb84_prepare(x, theta)?));
        self.transcript.push(Frame { from: Role::Committer, tag: TAG_COMMIT, payload: message.clone() });
        self.message = message;
        self.committer = Some(CommitterSecrets { b, vk, opening });
        self.phase = CommitPhase::Committed;
        Ok(())
    }

    fn secrets(&self) -> &CommitterSecrets {
        self.committer.as_ref().expect("committed sessions hold committer secrets")
    }

    /// Honest receiver deletion.
    pub fn delete_phase<R: Rng>(&mut self, rng: &mut R) -> Result<Verdict> {
        self.delete_phase_with(&HonestDeleter, rng)
    }

    /// Delete phase where the receiver follows `receiver` to produce `x′`.
    pub fn delete_phase_with<R: Rng>(&mut self, receiver: &dyn Adversary, rng: &mut R) -> Result<Verdict> {
        self.require(CommitPhase::Committed, "delete")?;
        let branches = self.delete_branches(receiver)?;
        let (_, cert, verdict) = sample_branch(&branches, |b| b.0, rng).clone();
        self.register.as_mut().expect("register present").take()?;
        self.transcript.push(Frame { from: Role::Receiver, tag: TAG_DELETE, payload: cert.to_bytes() });
        self.transcript.push(Frame { from: Role::Committer, tag: TAG_DELETE, payload: vec![verdict.is_accept() as u8] });
        self.phase = CommitPhase::Deleted;
        Ok(verdict)
    }

    fn delete_branches(&self, receiver: &dyn Adversary) -> Result<Vec<(f64, crate::compiler::DeletionCertificate, Verdict)>> {
        let state = self.register()?.peek()?;
        let qubits: Vec<usize> = (0..self.lambda).collect();
        adversary_branches(receiver, &self.message, state, &qubits)?
            .into_iter()
            .map(|br| Ok((br.probability, br.certificate.clone(), verify(&self.secrets().vk, &br.certificate)?)))
            .collect()
    }

    /// Exact probability that the committer accepts a Delete run by
    /// `receiver`, without running it.
    pub fn delete_accept_probability(&self, receiver: &dyn Adversary) -> Result<f64> {
        self.require(CommitPhase::Committed, "delete")?;
        Ok(self.delete_branches(receiver)?.iter().filter(|b| b.2.is_accept()).map(|b| b.0).sum())
    }

    pub fn reveal_phase<R: Rng>(&mut self, rng: &mut R) -> Result<RevealOutput> {
        self.reveal_phase_with(None, rng)
    }

    /// Reveal where the committer may claim `(θ̂, b̂′)` instead of the
    /// committed values.
    pub fn reveal_phase_with<R: Rng>(
        &mut self,
        claim: Option<(BasisString, bool)>,
        rng: &mut R,
    ) -> Result<RevealOutput> {
        self.require(CommitPhase::Committed, "reveal")?;
        let (claimed, verdict) = self.check_claim(claim)?;
        let mut payload = (self.secrets().opening.len() as u16).to_be_bytes().to_vec();
        payload.extend(&self.secrets().opening);
        payload.extend(claimed.to_packed_bytes());
        self.transcript.push(Frame { from: Role::Committer, tag: TAG_REVEAL, payload });
        let out = if verdict.is_accept() {
            let (theta, bp) = split_inner_plaintext(&claimed, self.lambda)?;
            let reg = self.register.as_mut().expect("register present");
            RevealOutput::Bit(recover_bit(reg, &theta, bp, rng)?)
        } else {
            RevealOutput::Bottom
        };
        self.phase = CommitPhase::Revealed;
        Ok(out)
    }

    fn check_claim(&self, claim: Option<(BasisString, bool)>) -> Result<(BitString, Verdict)> {
        let s = self.secrets();
        let claimed = match claim {
            Some((theta, bp)) => {
                if theta.len() != self.lambda {
                    return input_err("claimed θ has the wrong length");
                }
                inner_plaintext(&theta, bp)
            }
            None => inner_plaintext(&s.vk.theta, masked_bit(s.b, &s.vk.x, &s.vk.theta)),
        };
        let verdict = self.backend.reveal_check(&self.message, &s.opening, &claimed);
        Ok((claimed, verdict))
    }

    /// Exact `[Pr[μ=0], Pr[μ=1], Pr[μ=⊥]]` of a Reveal.
    pub fn reveal_distribution(&self, claim: Option<(BasisString, bool)>) -> Result<[f64; 3]> {
        self.require(CommitPhase::Committed, "reveal")?;
        let (claimed, verdict) = self.check_claim(claim)?;
        if !verdict.is_accept() {
            return Ok([0.0, 0.0, 1.0]);
        }
        let (theta, bp) = split_inner_plaintext(&claimed, self.lambda)?;
        let d = recover_bit_distribution(self.register()?, &theta, bp)?;
        Ok([d[0], d[1], 0.0])
    }

    /// Extractor: opens the classical part with the backend's extractor and
    /// measures the register in the extracted θ*. Consumes nothing; returns
    /// the exact `[Pr[b*=0], Pr[b*=1]]`.
    pub fn binding_extract_distribution(&self) -> Result<[f64; 2]> {
        if self.committer.is_none() {
            return Err(Error::State("nothing committed".into()));
        }
        let (theta, bp) = split_inner_plaintext(&self.backend.extract(&self.message)?, self.lambda)
            .map_err(|e| Error::Extraction(e.to_string()))?;
        recover_bit_distribution(self.register()?, &theta, bp)
    }

    /// Sampled extractor output; works on a copy of the register.
    pub fn binding_extract<R: Rng>(&self, rng: &mut R) -> Result<bool> {
        let d = self.binding_extract_distribution()?;
        Ok(rng.gen::<f64>() * (d[0] + d[1]) >= d[0])
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommitmentTranscript {
    pub backend: String,
    pub lambda: usize,
    pub phase: CommitPhase,
    pub frames: Vec<Frame>,
    #[serde(serialize_with = "as_hex")]
    pub wire: Vec<u8>,
}

impl CdCommitSession<'_> {
    pub fn transcript_record(&self) -> Result<CommitmentTranscript> {
        Ok(CommitmentTranscript {
            backend: self.backend.name().to_string(),
            lambda: self.lambda,
            phase: self.phase,
            frames: self.transcript.clone(),
            wire: self.transcript_bytes()?,
        })
    }
}
