//! FHE with certified deletion over a mock backend, coherent evaluation on
//! tagged states, and the blind-delegation protocol.

pub mod circuit;
pub mod delegation;

use rand::RngCore;
use sha2::{Digest, Sha256};

pub use circuit::{ClassicalCircuit, CircuitBuilder, Op};
pub use delegation::{run_blind_delegation, DelegationSession, DelegationTranscript, Party, Phase};

use crate::bits::BitString;
use crate::compiler::{CdCiphertext, CdPke, SemanticScheme, ToyCipher};
use crate::error::{input_err, Error, Result};
use crate::quantum::{StateVector, TaggedState};

/// Most qubits a coherent evaluation may span.
pub const MAX_EVAL_QUBITS: usize = 16;

/// Plaintext-carrying FHE stand-in. NOT SECURE and not hiding: it opens its
/// inputs with the key, evaluates in the clear and re-encrypts. Its eval
/// nonce is a hash of everything it read, so evaluation is a deterministic
/// function of its inputs.
#[derive(Clone, Copy, Debug, Default)]
pub struct MockFhe;

impl SemanticScheme for MockFhe {
    fn gen(&self, security: usize, rng: &mut dyn RngCore) -> (Vec<u8>, Vec<u8>) {
        ToyCipher.gen(security, rng)
    }

    fn enc(&self, public_key: &[u8], message: &BitString, rng: &mut dyn RngCore) -> Result<Vec<u8>> {
        ToyCipher.enc(public_key, message, rng)
    }

    fn dec(&self, secret_key: &[u8], ciphertext: &[u8]) -> Result<BitString> {
        ToyCipher.dec(secret_key, ciphertext)
    }
}

impl MockFhe {
    /// `Eval(pk, C, cts, clear)`: `C` reads the concatenated plaintexts of
    /// `encrypted`, then `clear`.
    pub fn eval(
        &self,
        public_key: &[u8],
        circuit: &ClassicalCircuit,
        encrypted: &[Vec<u8>],
        clear: &BitString,
    ) -> Result<Vec<u8>> {
        let mut input = BitString::zeros(0);
        let mut h = Sha256::new();
        h.update(b"mock-eval");
        h.update(public_key);
        h.update(circuit.fingerprint());
        for ct in encrypted {
            input = input.concat(&ToyCipher.dec(public_key, ct)?);
            h.update((ct.len() as u64).to_be_bytes());
            h.update(ct);
        }
        h.update((clear.len() as u64).to_be_bytes());
        h.update(clear.to_packed_bytes());
        let out = circuit.eval(&input.concat(clear))?;
        let digest = h.finalize();
        let mut nonce = [0u8; 8];
        nonce.copy_from_slice(&digest[..8]);
        ToyCipher::enc_with_nonce(public_key, &out, nonce)
    }
}

/// The compiled scheme over the mock backend.
pub type CdFhe = CdPke<MockFhe>;

/// `C̃` for `n` ciphertexts at parameter λ. Inputs: `θ₁ ‖ b′₁ ‖ … ‖ θₙ ‖ b′ₙ`
/// (the inner plaintexts) followed by the measured `x′₁ ‖ … ‖ x′ₙ`. It
/// unmasks `b_i = b′_i ⊕ ⊕_{j:θ_ij=0} x′_ij` and feeds the bits to `c`.
pub fn unmasking_circuit(c: &ClassicalCircuit, n: usize, lambda: usize) -> Result<ClassicalCircuit> {
    let c = c.padded(n)?;
    let inner = n * (lambda + 1);
    let mut b = CircuitBuilder::new(inner + n * lambda);
    let mut bits = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = b.input(i * (lambda + 1) + lambda);
        for j in 0..lambda {
            let not_theta = b.not(b.input(i * (lambda + 1) + j));
            let term = b.and(b.input(inner + i * lambda + j), not_theta);
            acc = b.xor(acc, term);
        }
        bits.push(acc);
    }
    let outs = b.inline(&c, &bits)?;
    Ok(b.finish(outs))
}

/// Joint state of several ciphertext registers, first ciphertext first.
pub fn joint_register(cts: &[CdCiphertext]) -> Result<(StateVector, usize)> {
    let Some(first) = cts.first() else {
        return input_err("no ciphertexts");
    };
    let lambda = first.quantum.peek()?.n_qubits();
    if cts.len() * lambda > MAX_EVAL_QUBITS {
        return Err(Error::Resource(format!(
            "{} qubits exceed the coherent-evaluation budget of {MAX_EVAL_QUBITS}",
            cts.len() * lambda
        )));
    }
    let mut joint = StateVector::empty();
    for ct in cts {
        let s = ct.quantum.peek()?;
        if s.n_qubits() != lambda {
            return input_err("ciphertexts use different λ");
        }
        joint = joint.tensor(s);
    }
    Ok((joint, lambda))
}

/// Evaluation record pushed on every branch by [`fhe_eval_coherent`].
pub fn eval_layer(
    fhe: &MockFhe,
    public_key: &[u8],
    ctilde: &ClassicalCircuit,
    inners: &[Vec<u8>],
) -> impl Fn(&BitString, &[Vec<u8>]) -> Result<Vec<u8>> {
    let (fhe, pk, ctilde, inners) = (*fhe, public_key.to_vec(), ctilde.clone(), inners.to_vec());
    move |label, _| fhe.eval(&pk, &ctilde, &inners, label)
}

/// Applies `C̃` homomorphically in superposition: every basis branch `x′` of
/// the joint register gets the evaluated ciphertext as a new record.
pub fn fhe_eval_coherent(
    fhe: &MockFhe,
    public_key: &[u8],
    circuit: &ClassicalCircuit,
    cts: &[CdCiphertext],
) -> Result<TaggedState> {
    if circuit.n_inputs() > cts.len() {
        return input_err(format!("circuit reads {} inputs, {} ciphertexts given", circuit.n_inputs(), cts.len()));
    }
    let (joint, lambda) = joint_register(cts)?;
    let ctilde = unmasking_circuit(circuit, cts.len(), lambda)?;
    let inners: Vec<Vec<u8>> = cts.iter().map(|c| c.inner.clone()).collect();
    let mut tagged = TaggedState::from_state(&joint);
    tagged.push_layer(eval_layer(fhe, public_key, &ctilde, &inners))?;
    Ok(tagged)
}

/// Optional standard-basis measurement of the newest record.
pub fn measure_top_record<R: rand::Rng + ?Sized>(state: &mut TaggedState, rng: &mut R) -> Result<Vec<u8>> {
    let dist: Vec<(Vec<u8>, f64)> = state.top_distribution().into_iter().collect();
    let (value, _) = crate::quantum::measure::sample_branch(&dist, |d| d.1, rng).clone();
    state.condition_on_top(&value)?;
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BasisString;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(lambda: usize) -> (CdFhe, Vec<u8>, Vec<u8>, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let fhe = CdPke::new(MockFhe, lambda).unwrap();
        let (pk, sk) = fhe.keygen(&mut rng);
        (fhe, pk, sk, rng)
    }

    fn every_branch_decrypts_to(t: &TaggedState, sk: &[u8], want: &BitString) {
        for b in t.branches().values() {
            assert_eq!(&MockFhe.dec(sk, b.layers.last().unwrap()).unwrap(), want);
        }
    }

    #[test]
    fn eval_is_deterministic_and_correct() {
        let (fhe, pk, sk, mut rng) = setup(2);
        let and = ClassicalCircuit::parse("o0 = AND i0 i1").unwrap();
        let a = MockFhe.enc(&pk, &"1".parse().unwrap(), &mut rng).unwrap();
        let b = MockFhe.enc(&pk, &"1".parse().unwrap(), &mut rng).unwrap();
        let e1 = MockFhe.eval(&pk, &and, &[a.clone(), b.clone()], &BitString::zeros(0)).unwrap();
        let e2 = MockFhe.eval(&pk, &and, &[a, b], &BitString::zeros(0)).unwrap();
        assert_eq!(e1, e2);
        assert!(fhe.scheme().dec(&sk, &e1).unwrap().get(0));
    }

    #[test]
    fn identity_on_hadamard_qubit() {
        let (fhe, pk, sk, mut rng) = setup(1);
        let id = ClassicalCircuit::parse("t = NOT i0\no0 = NOT t").unwrap();
        for b in [false, true] {
            for x in BitString::all(1) {
                let (ct, _) = fhe.encrypt_with(&pk, b, &x, &BasisString::hadamard(1), &mut rng).unwrap();
                let t = fhe_eval_coherent(&MockFhe, &pk, &id, &[ct]).unwrap();
                assert_eq!(t.branches().len(), 2);
                every_branch_decrypts_to(&t, &sk, &BitString::new(vec![b]));
            }
        }
    }

    #[test]
    fn xor_and_and_track_plaintexts() {
        let (fhe, pk, sk, mut rng) = setup(2);
        let xor = ClassicalCircuit::parse("o0 = XOR i0 i1").unwrap();
        let and = ClassicalCircuit::parse("o0 = AND i0 i1").unwrap();
        for m in BitString::all(2) {
            let (cts, _) = fhe.encrypt_string(&pk, &m, &mut rng).unwrap();
            let t = fhe_eval_coherent(&MockFhe, &pk, &xor, &cts).unwrap();
            every_branch_decrypts_to(&t, &sk, &BitString::new(vec![m.get(0) ^ m.get(1)]));
            let t = fhe_eval_coherent(&MockFhe, &pk, &and, &cts).unwrap();
            every_branch_decrypts_to(&t, &sk, &BitString::new(vec![m.get(0) & m.get(1)]));
        }
    }

    #[test]
    fn uncompute_restores_register() {
        let (fhe, pk, _, mut rng) = setup(2);
        let maj = circuit::corpus().into_iter().find(|(n, _)| *n == "maj3").unwrap().1;
        let (cts, _) = fhe.encrypt_string(&pk, &"110".parse().unwrap(), &mut rng).unwrap();
        let (joint, lambda) = joint_register(&cts).unwrap();
        let ctilde = unmasking_circuit(&maj, 3, lambda).unwrap();
        let inners: Vec<_> = cts.iter().map(|c| c.inner.clone()).collect();
        let mut t = fhe_eval_coherent(&MockFhe, &pk, &maj, &cts).unwrap();
        t.pop_layer(eval_layer(&MockFhe, &pk, &ctilde, &inners)).unwrap();
        let back = t.into_state().unwrap();
        assert!(back.max_deviation(&joint).unwrap() <= 1e-10);
    }

    #[test]
    fn eval_errors() {
        let (fhe, pk, _, mut rng) = setup(2);
        let and = ClassicalCircuit::parse("o0 = AND i0 i1").unwrap();
        let (mut cts, _) = fhe.encrypt_string(&pk, &"1".parse().unwrap(), &mut rng).unwrap();
        assert!(matches!(fhe_eval_coherent(&MockFhe, &pk, &and, &cts), Err(Error::Input(_))));
        let not = ClassicalCircuit::parse("o0 = NOT i0").unwrap();
        cts[0].quantum.take().unwrap();
        assert!(matches!(fhe_eval_coherent(&MockFhe, &pk, &not, &cts), Err(Error::State(_))));
    }

    #[test]
    fn measuring_collapses_to_one_record() {
        let (fhe, pk, _, mut rng) = setup(2);
        let not = ClassicalCircuit::parse("o0 = NOT i0").unwrap();
        let (cts, _) = fhe.encrypt_string(&pk, &"1".parse().unwrap(), &mut rng).unwrap();
        let mut t = fhe_eval_coherent(&MockFhe, &pk, &not, &cts).unwrap();
        let rec = measure_top_record(&mut t, &mut rng).unwrap();
        assert!(t.branches().values().all(|b| b.layers[0] == rec));
    }
}
