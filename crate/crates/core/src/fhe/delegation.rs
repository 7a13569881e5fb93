//! Blind delegation: the client encrypts, the server evaluates coherently
//! and hands back the output register `O`, the client decrypts coherently,
//! measures only the decrypted output, uncomputes and returns `O`, the server
//! uncomputes its evaluation, and finally the server proves deletion.

use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::adversary::{Adversary, QubitAction};
use crate::bits::{BasisString, BitString};
use crate::compiler::{verify_all, CdCiphertext, CdPke, SemanticScheme, VerificationKey, Verdict};
use crate::error::{input_err, Error, Result};
use crate::fhe::{eval_layer, joint_register, unmasking_circuit, CdFhe, ClassicalCircuit, MockFhe};
use crate::quantum::measure::sample_branch;
use crate::quantum::{measure_and_discard_all_branches, StateVector, TaggedState, STATE_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Encryption,
    Computation(usize),
    Deletion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Client,
    Server,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Message {
    pub from: Party,
    pub label: String,
    #[serde(serialize_with = "as_hex")]
    pub payload: Vec<u8>,
}

fn as_hex<S: serde::Serializer>(bytes: &[u8], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&hex::encode(bytes))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseRecord {
    pub phase: Phase,
    pub messages: Vec<Message>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DelegationTranscript {
    pub lambda: usize,
    pub phases: Vec<PhaseRecord>,
    /// `y_r` per computation round.
    pub outputs: Vec<BitString>,
    /// Whether the decrypted output was the same on every branch before the
    /// client measured it.
    pub outputs_constant: Vec<bool>,
    /// Largest amplitude deviation between the register after each round
    /// and the freshly encrypted one.
    pub recovery_deviation: Vec<f64>,
    pub verdict: Option<Verdict>,
    /// Exact acceptance probability of the deletion phase.
    pub accept_probability: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    Fresh,
    Encrypted,
    Deleted,
}

/// One client/server session.
pub struct DelegationSession {
    scheme: CdFhe,
    pk: Vec<u8>,
    sk: Vec<u8>,
    stage: Stage,
    cts: Vec<CdCiphertext>,
    vks: Vec<VerificationKey>,
    /// The server's joint ciphertext register between rounds.
    register: Option<StateVector>,
    /// Simulator-side copy of the fresh register, for the recovery check.
    snapshot: Option<StateVector>,
    transcript: DelegationTranscript,
}

fn digest(parts: &[&[u8]]) -> Vec<u8> {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_be_bytes());
        h.update(p);
    }
    h.finalize().to_vec()
}

fn register_digest(t: &TaggedState) -> Vec<u8> {
    let mut h = Sha256::new();
    for (label, b) in t.branches() {
        h.update((*label as u64).to_be_bytes());
        h.update(b.tag());
    }
    h.finalize().to_vec()
}

impl DelegationSession {
    pub fn new<R: Rng>(lambda: usize, rng: &mut R) -> Result<Self> {
        let scheme = CdPke::new(MockFhe, lambda)?;
        let (pk, sk) = scheme.keygen(rng);
        Ok(Self {
            scheme,
            pk,
            sk,
            stage: Stage::Fresh,
            cts: Vec::new(),
            vks: Vec::new(),
            register: None,
            snapshot: None,
            transcript: DelegationTranscript { lambda, ..Default::default() },
        })
    }

    pub fn lambda(&self) -> usize {
        self.scheme.lambda()
    }

    pub fn transcript(&self) -> &DelegationTranscript {
        &self.transcript
    }

    pub fn into_transcript(self) -> DelegationTranscript {
        self.transcript
    }

    fn expect(&self, stage: Stage, what: &str) -> Result<()> {
        if self.stage != stage {
            return Err(Error::State(format!("{what} is not allowed in stage {:?}", self.stage)));
        }
        Ok(())
    }

    pub fn encrypt<R: Rng>(&mut self, input: &BitString, rng: &mut R) -> Result<()> {
        let keys: Vec<_> = (0..input.len())
            .map(|_| (BitString::random(self.lambda(), rng), BasisString::random(self.lambda(), rng)))
            .collect();
        self.encrypt_with_keys(input, &keys, rng)
    }

    /// Encryption phase with caller-chosen `(x, θ)` per input bit.
    pub fn encrypt_with_keys<R: Rng>(
        &mut self,
        input: &BitString,
        keys: &[(BitString, BasisString)],
        rng: &mut R,
    ) -> Result<()> {
        self.expect(Stage::Fresh, "encryption")?;
        if input.is_empty() || keys.len() != input.len() {
            return input_err("need one (x, θ) pair per input bit, and at least one bit");
        }
        for (b, (x, theta)) in input.iter().zip(keys) {
            let (ct, vk) = self.scheme.encrypt_with(&self.pk, b, x, theta, rng)?;
            self.cts.push(ct);
            self.vks.push(vk);
        }
        let (joint, _) = joint_register(&self.cts)?;
        let mut messages: Vec<Message> = self
            .cts
            .iter()
            .enumerate()
            .map(|(i, ct)| Message { from: Party::Client, label: format!("inner[{i}]"), payload: ct.inner.clone() })
            .collect();
        messages.push(Message {
            from: Party::Client,
            label: format!("register ({} qubits)", joint.n_qubits()),
            payload: Vec::new(),
        });
        self.snapshot = Some(joint.clone());
        self.register = Some(joint);
        self.transcript.phases.push(PhaseRecord { phase: Phase::Encryption, messages });
        self.stage = Stage::Encrypted;
        Ok(())
    }

    /// One computation round; returns the client's `y`.
    pub fn compute<R: Rng>(&mut self, circuit: &ClassicalCircuit, rng: &mut R) -> Result<BitString> {
        self.expect(Stage::Encrypted, "computation")?;
        let n = self.cts.len();
        if circuit.n_inputs() > n {
            return input_err(format!("circuit reads {} inputs, client has {n}", circuit.n_inputs()));
        }
        let round = self.transcript.outputs.len();
        let ctilde = unmasking_circuit(circuit, n, self.lambda())?;
        let inners: Vec<Vec<u8>> = self.cts.iter().map(|c| c.inner.clone()).collect();
        let register = self.register.take().ok_or_else(|| Error::State("server holds no register".into()))?;
        let mut messages = Vec::new();

        // Server: coherent Eval, hands O to the client.
        let mut o = TaggedState::from_state(&register);
        let server_eval = eval_layer(&MockFhe, &self.pk, &ctilde, &inners);
        o.push_layer(&server_eval)?;
        messages.push(Message { from: Party::Server, label: "register O".into(), payload: register_digest(&o) });

        // Client: coherent Dec, measure the output wire only, uncompute Dec.
        let sk = self.sk.clone();
        let client_dec = move |_: &BitString, layers: &[Vec<u8>]| -> Result<Vec<u8>> {
            let top = layers.last().ok_or_else(|| Error::State("no evaluation record".into()))?;
            let y = MockFhe.dec(&sk, top)?;
            let mut out = (y.len() as u16).to_be_bytes().to_vec();
            out.extend(y.to_packed_bytes());
            Ok(out)
        };
        o.push_layer(&client_dec)?;
        let dist: Vec<(Vec<u8>, f64)> = o.top_distribution().into_iter().collect();
        let constant = dist.len() == 1;
        let (y_bytes, _) = sample_branch(&dist, |d| d.1, rng).clone();
        o.condition_on_top(&y_bytes)?;
        let y_len = u16::from_be_bytes([y_bytes[0], y_bytes[1]]) as usize;
        let y = BitString::from_packed_bytes(&y_bytes[2..], y_len)?;
        o.pop_layer(&client_dec)?;
        messages.push(Message { from: Party::Client, label: "register O".into(), payload: register_digest(&o) });

        // Server: uncompute Eval.
        o.pop_layer(&server_eval)?;
        let recovered = o.into_state()?;
        let snapshot = self.snapshot.as_ref().expect("snapshot taken at encryption");
        let deviation = recovered.max_deviation(snapshot).unwrap_or(f64::INFINITY);
        messages.push(Message {
            from: Party::Server,
            label: "uncomputed".into(),
            payload: digest(&[&(recovered.n_qubits() as u64).to_be_bytes()]),
        });
        self.register = Some(recovered);
        self.transcript.outputs.push(y.clone());
        self.transcript.outputs_constant.push(constant);
        self.transcript.recovery_deviation.push(deviation);
        self.transcript.phases.push(PhaseRecord { phase: Phase::Computation(round), messages });
        Ok(y)
    }

    /// Deletion phase: `server` runs its deletion strategy on each
    /// ciphertext register, the client verifies every certificate.
    pub fn delete<R: Rng>(&mut self, server: &dyn Adversary, rng: &mut R) -> Result<Verdict> {
        self.expect(Stage::Encrypted, "deletion")?;
        let register = self.register.take().ok_or_else(|| Error::State("server holds no register".into()))?;
        let lambda = self.lambda();
        let mut actions = Vec::with_capacity(self.cts.len() * lambda);
        for ct in &self.cts {
            let a = server.actions(lambda, &ct.inner);
            if a.len() != lambda {
                return input_err(format!("{} returned {} actions for {lambda} qubits", server.name(), a.len()));
            }
            actions.extend(a);
        }
        let measured: Vec<usize> = (0..actions.len()).filter(|&q| actions[q] != QubitAction::Keep).collect();
        let bases: BasisString =
            measured.iter().map(|&q| actions[q] == QubitAction::Hadamard).collect::<BitString>().into();
        let mut branches = Vec::new();
        let mut accept_probability = 0.0;
        for br in measure_and_discard_all_branches(&register, &measured, &bases)? {
            let mut outcomes = vec![None; actions.len()];
            for (k, &q) in measured.iter().enumerate() {
                outcomes[q] = Some(br.outcome.get(k));
            }
            let certs: Vec<_> = self
                .cts
                .iter()
                .enumerate()
                .map(|(i, ct)| server.respond(lambda, &ct.inner, &outcomes[i * lambda..(i + 1) * lambda]).0)
                .collect();
            let verdict = verify_all(&self.vks, &certs)?;
            if verdict.is_accept() {
                accept_probability += br.probability;
            }
            branches.push((br.probability, certs, verdict));
        }
        let (_, certs, verdict) = sample_branch(&branches, |b| b.0, rng).clone();
        let mut messages: Vec<Message> = certs
            .iter()
            .enumerate()
            .map(|(i, c)| Message { from: Party::Server, label: format!("cert[{i}]"), payload: c.to_bytes() })
            .collect();
        messages.push(Message { from: Party::Client, label: format!("verdict {verdict}"), payload: Vec::new() });
        self.transcript.phases.push(PhaseRecord { phase: Phase::Deletion, messages });
        self.transcript.verdict = Some(verdict);
        self.transcript.accept_probability = Some(accept_probability.min(1.0));
        self.stage = Stage::Deleted;
        Ok(verdict)
    }
}

impl DelegationTranscript {
    /// Every round's register came back within `tol` of the original.
    pub fn recovered_within(&self, tol: f64) -> bool {
        self.recovery_deviation.iter().all(|&d| d <= tol)
    }

    pub fn honest_recovery(&self) -> bool {
        self.recovered_within(STATE_TOL)
    }
}

/// Runs all three phases: encryption of `input`, one computation round per
/// circuit, then deletion by `server`.
pub fn run_blind_delegation<R: Rng>(
    input: &BitString,
    circuits: &[ClassicalCircuit],
    server: &dyn Adversary,
    lambda: usize,
    rng: &mut R,
) -> Result<DelegationTranscript> {
    let mut s = DelegationSession::new(lambda, rng)?;
    s.encrypt(input, rng)?;
    for c in circuits {
        s.compute(c, rng)?;
    }
    s.delete(server, rng)?;
    Ok(s.into_transcript())
}
