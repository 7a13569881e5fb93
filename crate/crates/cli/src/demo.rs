//! `certideld demo`: one honest run per scheme, printed step by step.

use std::path::PathBuf;

use certideld_core::adversary::HonestDeleter;
use certideld_core::commitment::{CdCommitSession, KeyedDigestCommitment};
use certideld_core::compiler::{delete, verify, CdPke, ToyCipher, Verdict};
use certideld_core::fhe::{run_blind_delegation, ClassicalCircuit, Phase};
use certideld_core::secret_sharing::{otp_decrypt, otp_encrypt, ss_del, ss_rec, ss_share};
use certideld_core::BitString;
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{CliError, CliResult, DEFAULT_SEED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoScheme {
    SecretSharing,
    Otp,
    Pke,
    Fhe,
    BlindDelegation,
    Commitment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CommitPath {
    Delete,
    Reveal,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[arg(long, value_enum)]
    scheme: DemoScheme,
    /// Number of BB84 qubits per encrypted bit.
    #[arg(long, default_value_t = 4)]
    lambda: usize,
    /// Plaintext bit (0 or 1).
    #[arg(long, default_value = "1", value_parser = parse_bit, action = clap::ArgAction::Set)]
    b: bool,
    /// Client input for delegation, as a bit string.
    #[arg(long, default_value = "10")]
    input: String,
    /// Circuit file for delegation; defaults to a single AND gate.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Which way a commitment ends.
    #[arg(long, value_enum, default_value = "delete")]
    path: CommitPath,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

fn parse_bit(s: &str) -> Result<bool, String> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(format!("expected 0 or 1, got '{s}'")),
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    if v.is_accept() {
        "accept"
    } else {
        "reject"
    }
}

pub fn run(a: DemoArgs) -> CliResult<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let b = a.b as u8;
    let ok = match a.scheme {
        DemoScheme::SecretSharing => {
            let (mut s1, s2, _) = ss_share(a.b, a.lambda, &mut rng)?;
            println!("share b={b}: θ={} masked bit={}", s2.theta, s2.masked_bit as u8);
            let rec = ss_rec(&mut s1, &s2, &mut rng)?;
            println!("reconstruct: b={}", rec as u8);
            let (mut s1, s2, vk) = ss_share(a.b, a.lambda, &mut rng)?;
            println!("share b={b}: θ={} masked bit={}", s2.theta, s2.masked_bit as u8);
            let cert = ss_del(&mut s1, &mut rng)?;
            let v = verify(&vk, &cert)?;
            println!("delete: x′={}", cert.x_prime);
            println!("verify: {}", verdict_word(v));
            rec == a.b && v.is_accept()
        }
        DemoScheme::Otp => {
            let k: bool = rng.gen();
            let (mut ct, secret, _) = otp_encrypt(k, a.b, a.lambda, &mut rng)?;
            let dec = otp_decrypt(&secret, &mut ct, &mut rng)?;
            println!("encrypt b={b}, decrypt: b={}", dec as u8);
            let (mut ct, _, vk) = otp_encrypt(k, a.b, a.lambda, &mut rng)?;
            let cert = delete(&mut ct.quantum, &mut rng)?;
            let v = verify(&vk, &cert)?;
            println!("encrypt b={b}, delete: x′={}", cert.x_prime);
            println!("verify: {}", verdict_word(v));
            dec == a.b && v.is_accept()
        }
        DemoScheme::Pke => {
            let pke = CdPke::new(ToyCipher, a.lambda)?;
            let (pk, sk) = pke.keygen(&mut rng);
            let (mut ct, _) = pke.encrypt(&pk, a.b, &mut rng)?;
            let dec = pke.decrypt(&sk, &mut ct, &mut rng)?;
            println!("encrypt b={b}, decrypt: b={}", dec as u8);
            let (mut ct, vk) = pke.encrypt(&pk, a.b, &mut rng)?;
            println!("encrypt b={b}: {} inner ciphertext bytes", ct.inner.len());
            let cert = delete(&mut ct.quantum, &mut rng)?;
            let v = verify(&vk, &cert)?;
            println!("delete: x′={}", cert.x_prime);
            println!("verify: {}", verdict_word(v));
            dec == a.b && v.is_accept()
        }
        DemoScheme::Fhe | DemoScheme::BlindDelegation => delegation(&a, &mut rng)?,
        DemoScheme::Commitment => {
            let backend = KeyedDigestCommitment::new(&mut rng);
            let mut s = CdCommitSession::new(&backend, a.lambda)?;
            s.commit_phase(a.b, &mut rng)?;
            println!("commit b={b}: {} byte commitment", s.commitment_message().len());
            match a.path {
                CommitPath::Delete => {
                    let v = s.delete_phase(&mut rng)?;
                    println!("delete: committer {}s", verdict_word(v));
                    v.is_accept()
                }
                CommitPath::Reveal => {
                    let out = s.reveal_phase(&mut rng)?;
                    println!("reveal: receiver outputs {out}");
                    out.to_string() == b.to_string()
                }
            }
        }
    };
    println!("{}", if ok { "ok" } else { "FAILED" });
    Ok(if ok { 0 } else { 1 })
}

fn delegation(a: &DemoArgs, rng: &mut ChaCha8Rng) -> CliResult<bool> {
    let input: BitString = a.input.parse().map_err(|e: certideld_core::Error| CliError::usage(e.to_string()))?;
    let circuit = match &a.circuit {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::data(format!("{}: {e}", p.display())))?;
            ClassicalCircuit::parse(&text).map_err(|e| CliError::data(format!("{}: {e}", p.display())))?
        }
        None => ClassicalCircuit::parse("o0 = AND i0 i1").expect("builtin circuit parses"),
    };
    let expected = circuit.padded(input.len())?.eval(&input)?;
    let t = run_blind_delegation(&input, std::slice::from_ref(&circuit), &HonestDeleter, a.lambda, rng)?;
    if a.scheme == DemoScheme::BlindDelegation {
        for p in &t.phases {
            let name = match p.phase {
                Phase::Encryption => "encryption".to_string(),
                Phase::Computation(r) => format!("computation {r}"),
                Phase::Deletion => "deletion".to_string(),
            };
            let labels: Vec<&str> = p.messages.iter().map(|m| m.label.as_str()).collect();
            println!("{name}: {}", labels.join(", "));
        }
    }
    let y = &t.outputs[0];
    println!("y={y}");
    let verdict = t.verdict.ok_or_else(|| CliError { code: 1, message: "no deletion verdict".into() })?;
    println!("verdict {}", verdict_word(verdict));
    Ok(*y == expected && verdict.is_accept() && t.honest_recovery())
}
