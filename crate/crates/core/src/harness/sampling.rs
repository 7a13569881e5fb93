//! Monte-Carlo estimate of the acceptance probability, used only to
//! cross-check the exact enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adversary::{Adversary, QubitAction};
use crate::bits::{BasisString, BitString};
use crate::compiler::{verify, VerificationKey};
use crate::error::Result;
use crate::exec::Exec;
use crate::harness::experiment::exposures;
use crate::harness::{check_lambda, Mode, Scheme, MAX_LAMBDA};
use crate::quantum::measure::sample_branch;
use crate::quantum::{bb84_prepare, measure_and_discard};

const CHUNK: usize = 4096;

fn one_shot<R: Rng>(
    scheme: Scheme,
    mode: Mode,
    adv: &dyn Adversary,
    b: bool,
    lambda: usize,
    rng: &mut R,
) -> Result<bool> {
    let x = BitString::random(lambda, rng);
    let theta = BasisString::random(lambda, rng);
    let bprime = b ^ theta.masked_parity(&x);
    let exps = exposures(scheme, mode, &theta, bprime)?;
    let view = &sample_branch(&exps, |e| e.weight, rng).view;
    let actions = adv.actions(lambda, view);
    let measured: Vec<usize> = (0..lambda).filter(|&i| actions[i] != QubitAction::Keep).collect();
    let bases: BasisString =
        BasisString::new(measured.iter().map(|&i| actions[i] == QubitAction::Hadamard).collect());
    let state = bb84_prepare(&x, &theta)?;
    let br = measure_and_discard(&state, &measured, &bases, rng)?;
    let mut outcomes = vec![None; lambda];
    for (k, &i) in measured.iter().enumerate() {
        outcomes[i] = Some(br.outcome.get(k));
    }
    let (cert, _) = adv.respond(lambda, view, &outcomes);
    Ok(verify(&VerificationKey::new(x, theta)?, &cert)?.is_accept())
}

/// Fraction of `shots` sampled runs whose certificate verifies. Chunk `i`
/// draws from stream `i` of a ChaCha8 generator seeded with `seed`, so the
/// estimate does not depend on `exec`.
#[allow(clippy::too_many_arguments)]
pub fn sample_acceptance(
    scheme: Scheme,
    mode: Mode,
    adv: &dyn Adversary,
    b: bool,
    lambda: usize,
    shots: usize,
    seed: u64,
    exec: Exec,
) -> Result<f64> {
    check_lambda(lambda, MAX_LAMBDA)?;
    if shots == 0 {
        return crate::error::input_err("at least one shot is required");
    }
    let chunks = shots.div_ceil(CHUNK);
    let counts = exec.map(chunks, |c| -> Result<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let n = CHUNK.min(shots - c * CHUNK);
        let mut hits = 0;
        for _ in 0..n {
            hits += one_shot(scheme, mode, adv, b, lambda, &mut rng)? as usize;
        }
        Ok(hits)
    });
    let hits = counts.into_iter().try_fold(0usize, |s, c| c.map(|c| s + c))?;
    Ok(hits as f64 / shots as f64)
}
