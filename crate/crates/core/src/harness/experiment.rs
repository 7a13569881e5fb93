//! EV-EXP and C-EXP for every scheme.
//!
//! Per scheme, the adversary's classical view before deletion and the data
//! released to it after an accepted certificate:
//!
//! | scheme         | view before deletion            | released on accept |
//! |----------------|---------------------------------|--------------------|
//! | secret-sharing | nothing                         | `s₂ = (θ, b′)`     |
//! | otp            | `k ⊕ b′`, `k` uniform           | key `(k, θ)`       |
//! | compiled-pke   | protected `(θ, b′)` + public key| nothing            |
//! | cd-fhe         | protected `(θ, b′)` + public key| nothing            |
//! | cd-commitment  | commitment to `(θ, b′)`         | nothing            |
//!
//! "Protected" parts follow [`Mode`]: in idealized-hiding mode they are the
//! plaintext `(0^λ, b′)` handed over in the clear (an unbounded reader of a
//! ciphertext learns no more), and for the commitment they are the ideal
//! functionality's input-independent handle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::adversary::{adversary_branches, Adversary};
use crate::bits::{BasisString, BitString};
use crate::commitment::{BindingCommitment, KeyedDigestCommitment};
use crate::compiler::{inner_plaintext, verify, ToyCipher, VerificationKey};
use crate::error::Result;
use crate::exec::Exec;
use crate::harness::{check_lambda, framed, ExperimentOutput, Mode, Scheme, MAX_LAMBDA};
use crate::quantum::bb84_prepare;
use crate::secret_sharing::ClassicalShare;

/// What the adversary is handed for one `(θ, b′)`.
#[derive(Clone, Debug)]
pub(crate) struct Exposure {
    pub weight: f64,
    pub view: Vec<u8>,
    pub release: Vec<u8>,
}

fn fixed_key(domain: &[u8]) -> Vec<u8> {
    Sha256::digest([b"harness-key:".as_slice(), domain].concat()).to_vec()
}

fn nonce_for(domain: &[u8], m: &BitString) -> [u8; 8] {
    let d = Sha256::digest([domain, &m.to_packed_bytes(), &(m.len() as u64).to_be_bytes()].concat());
    let mut n = [0u8; 8];
    n.copy_from_slice(&d[..8]);
    n
}

/// Idealized view of a protected `(θ, b′)`: the plaintext `(0^λ, b′)`.
pub(crate) fn idealized_view(tag: &[u8], lambda: usize, bprime: bool) -> Vec<u8> {
    let mut v = tag.to_vec();
    v.extend(inner_plaintext(&BasisString::computational(lambda), bprime).to_packed_bytes());
    v
}

pub(crate) fn exposures(scheme: Scheme, mode: Mode, theta: &BasisString, bprime: bool) -> Result<Vec<Exposure>> {
    let lambda = theta.len();
    let one = |view: Vec<u8>, release: Vec<u8>| Ok(vec![Exposure { weight: 1.0, view, release }]);
    match scheme {
        Scheme::SecretSharing => {
            one(Vec::new(), ClassicalShare { theta: theta.clone(), masked_bit: bprime }.to_bytes())
        }
        Scheme::Otp => Ok([false, true]
            .into_iter()
            .map(|k| {
                let mut release = vec![k as u8];
                release.extend(theta.bits().to_packed_bytes());
                Exposure { weight: 0.5, view: vec![(k ^ bprime) as u8], release }
            })
            .collect()),
        Scheme::CompiledPke | Scheme::CdFhe => {
            let tag: &[u8] = if scheme == Scheme::CompiledPke { b"pke" } else { b"fhe" };
            match mode {
                Mode::IdealizedHiding => one(idealized_view(tag, lambda, bprime), Vec::new()),
                Mode::RealBackend => {
                    let key = fixed_key(tag);
                    let m = inner_plaintext(theta, bprime);
                    let mut view = key.clone();
                    view.extend(ToyCipher::enc_with_nonce(&key, &m, nonce_for(tag, &m))?);
                    one(view, Vec::new())
                }
            }
        }
        Scheme::CdCommitment => match mode {
            Mode::IdealizedHiding => one(0u32.to_be_bytes().to_vec(), Vec::new()),
            Mode::RealBackend => {
                let backend = KeyedDigestCommitment::new(&mut ChaCha8Rng::seed_from_u64(0x00c0_ffee));
                let m = inner_plaintext(theta, bprime);
                let mut rng = ChaCha8Rng::from_seed(Sha256::digest(m.to_packed_bytes()).into());
                let (message, _) = backend.commit(&m, &mut rng)?;
                one(message, Vec::new())
            }
        },
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    Everlasting,
    Challenge,
}

fn run(
    variant: Variant,
    scheme: Scheme,
    adv: &dyn Adversary,
    b: bool,
    lambda: usize,
    mode: Mode,
    exec: Exec,
) -> Result<ExperimentOutput> {
    check_lambda(lambda, MAX_LAMBDA)?;
    let qubits: Vec<usize> = (0..lambda).collect();
    let per_pair = 1.0 / (1u64 << (2 * lambda)) as f64;
    let parts = exec.map(1usize << lambda, |t| -> Result<ExperimentOutput> {
        let theta = BasisString::new(BitString::from_index(t, lambda));
        let exps = [exposures(scheme, mode, &theta, false)?, exposures(scheme, mode, &theta, true)?];
        let mut out = ExperimentOutput::default();
        for x in BitString::all(lambda) {
            let bprime = b ^ theta.masked_parity(&x);
            let state = bb84_prepare(&x, &theta)?;
            let vk = VerificationKey::new(x, theta.clone())?;
            for e in &exps[bprime as usize] {
                for br in adversary_branches(adv, &e.view, &state, &qubits)? {
                    let w = per_pair * e.weight * br.probability;
                    let accepted = verify(&vk, &br.certificate)?.is_accept();
                    let mut record = framed(&br.record);
                    match variant {
                        Variant::Everlasting if accepted => {
                            record.extend(&e.release);
                            out.add(record, w, &br.residual);
                        }
                        Variant::Everlasting => out.reject_mass += w,
                        Variant::Challenge => {
                            record.push(accepted as u8);
                            out.add(record, w, &br.residual);
                        }
                    }
                }
            }
        }
        Ok(out)
    });
    parts.into_iter().try_fold(ExperimentOutput::default(), |acc, p| Ok(acc.merge(p?)))
}

/// EV-EXP(b): on an accepted certificate the adversary's leftover together
/// with the released data, otherwise ⊥.
pub fn run_ev_exp(
    scheme: Scheme,
    adv: &dyn Adversary,
    b: bool,
    lambda: usize,
    mode: Mode,
    exec: Exec,
) -> Result<ExperimentOutput> {
    run(Variant::Everlasting, scheme, adv, b, lambda, mode, exec)
}

/// C-EXP(b): the adversary's leftover together with the verdict; there is
/// no ⊥ and nothing is released.
pub fn run_c_exp(
    scheme: Scheme,
    adv: &dyn Adversary,
    b: bool,
    lambda: usize,
    mode: Mode,
    exec: Exec,
) -> Result<ExperimentOutput> {
    run(Variant::Challenge, scheme, adv, b, lambda, mode, exec)
}

/// `TD(EV-EXP(0), EV-EXP(1))` together with both outputs.
pub fn ev_exp_trace_distance(
    scheme: Scheme,
    adv: &dyn Adversary,
    lambda: usize,
    mode: Mode,
    exec: Exec,
) -> Result<(f64, ExperimentOutput, ExperimentOutput)> {
    let o0 = run_ev_exp(scheme, adv, false, lambda, mode, exec)?;
    let o1 = run_ev_exp(scheme, adv, true, lambda, mode, exec)?;
    Ok((o0.trace_distance(&o1)?, o0, o1))
}
