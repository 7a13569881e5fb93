//! Projective measurements in per-qubit computational/Hadamard bases.
//!
//! Every sampling routine has an exact sibling that enumerates all outcomes
//! with their Born probabilities; the harness only ever uses the exact ones.

use rand::Rng;

use crate::bits::{BasisString, BitString};
use crate::error::{input_err, Result};
use crate::quantum::state::{complement, gather, validate_subset, StateVector};
use crate::quantum::{bit_of, C64, STATE_TOL};

/// One outcome of a measurement together with its probability and the
/// renormalized post-measurement state on the full register.
#[derive(Clone, Debug)]
pub struct MeasurementBranch {
    pub probability: f64,
    pub outcome: BitString,
    pub post_state: StateVector,
}

/// One outcome with the measured qubits discarded: `residual` lives on the
/// unmeasured qubits, in their original order.
#[derive(Clone, Debug)]
pub struct ResidualBranch {
    pub probability: f64,
    pub outcome: BitString,
    pub residual: StateVector,
}

fn check(state: &StateVector, targets: &[usize], bases: &BasisString) -> Result<()> {
    validate_subset(targets, state.n_qubits())?;
    if bases.len() != targets.len() {
        return input_err(format!(
            "{} bases given for {} targets",
            bases.len(),
            targets.len()
        ));
    }
    Ok(())
}

/// All outcomes with non-zero probability, in increasing outcome order, with
/// the measured qubits discarded.
pub fn measure_and_discard_all_branches(
    state: &StateVector,
    targets: &[usize],
    bases: &BasisString,
) -> Result<Vec<ResidualBranch>> {
    check(state, targets, bases)?;
    let n = state.n_qubits();
    let mut rotated = state.clone();
    rotated.rotate_into(targets, bases)?;
    let rest = complement(targets, n);
    let rest_dim = 1usize << rest.len();
    let mut buckets = vec![vec![C64::new(0.0, 0.0); rest_dim]; 1usize << targets.len()];
    for (idx, amp) in rotated.amplitudes().iter().enumerate() {
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        buckets[gather(idx, targets, n)][gather(idx, &rest, n)] = *amp;
    }
    Ok(buckets
        .into_iter()
        .enumerate()
        .filter_map(|(outcome, mut amps)| {
            let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if p <= STATE_TOL * STATE_TOL {
                return None;
            }
            let norm = p.sqrt();
            amps.iter_mut().for_each(|a| *a /= norm);
            Some(ResidualBranch {
                probability: p,
                outcome: BitString::from_index(outcome, targets.len()),
                residual: StateVector::from_raw(rest.len(), amps),
            })
        })
        .collect())
}

/// All outcomes with non-zero probability; post states stay on the full
/// register with the measured qubits in the observed basis state.
pub fn measure_all_branches(
    state: &StateVector,
    targets: &[usize],
    bases: &BasisString,
) -> Result<Vec<MeasurementBranch>> {
    let n = state.n_qubits();
    let rest = complement(targets, n);
    measure_and_discard_all_branches(state, targets, bases)?
        .into_iter()
        .map(|b| {
            let mut amps = vec![C64::new(0.0, 0.0); state.dim()];
            for (r, amp) in b.residual.amplitudes().iter().enumerate() {
                let mut idx = 0usize;
                for (k, &q) in rest.iter().enumerate() {
                    if bit_of(r, k, rest.len()) {
                        idx |= 1 << (n - 1 - q);
                    }
                }
                for (k, &q) in targets.iter().enumerate() {
                    if b.outcome.get(k) {
                        idx |= 1 << (n - 1 - q);
                    }
                }
                amps[idx] = *amp;
            }
            let mut post = StateVector::from_raw(n, amps);
            // undo the basis rotation (H is self-inverse)
            post.rotate_into(targets, bases)?;
            Ok(MeasurementBranch {
                probability: b.probability,
                outcome: b.outcome,
                post_state: post,
            })
        })
        .collect()
}

/// Samples one outcome with its Born probability.
pub fn measure<R: Rng + ?Sized>(
    state: &StateVector,
    targets: &[usize],
    bases: &BasisString,
    rng: &mut R,
) -> Result<(BitString, StateVector)> {
    let branches = measure_all_branches(state, targets, bases)?;
    let b = sample_branch(&branches, |b| b.probability, rng);
    Ok((b.outcome.clone(), b.post_state.clone()))
}

/// Samples one residual branch with its Born probability.
pub fn measure_and_discard<R: Rng + ?Sized>(
    state: &StateVector,
    targets: &[usize],
    bases: &BasisString,
    rng: &mut R,
) -> Result<ResidualBranch> {
    let branches = measure_and_discard_all_branches(state, targets, bases)?;
    Ok(sample_branch(&branches, |b| b.probability, rng).clone())
}

pub(crate) fn sample_branch<'a, T, R: Rng + ?Sized>(
    items: &'a [T],
    weight: impl Fn(&T) -> f64,
    rng: &mut R,
) -> &'a T {
    let total: f64 = items.iter().map(&weight).sum();
    let mut u = rng.gen::<f64>() * total;
    for item in items {
        let w = weight(item);
        if u < w {
            return item;
        }
        u -= w;
    }
    items.last().expect("at least one branch")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::{bb84_prepare, epr_pairs};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn eigenstate_measurement_is_deterministic() {
        let x: BitString = "1011".parse().unwrap();
        let theta: BasisString = "0110".parse().unwrap();
        let s = bb84_prepare(&x, &theta).unwrap();
        let branches = measure_all_branches(&s, &[0, 1, 2, 3], &theta).unwrap();
        assert_eq!(branches.len(), 1);
        assert_eq!(branches[0].outcome, x);
        assert!((branches[0].probability - 1.0).abs() < 1e-12);
        assert!(branches[0].post_state.approx_eq(&s, 1e-12));
    }

    #[test]
    fn plus_state_splits_evenly() {
        let plus = bb84_prepare(&"0".parse().unwrap(), &"1".parse().unwrap()).unwrap();
        let branches = measure_all_branches(&plus, &[0], &BasisString::computational(1)).unwrap();
        assert_eq!(branches.len(), 2);
        for b in &branches {
            assert!((b.probability - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn epr_in_hadamard_basis_is_correlated() {
        let epr = epr_pairs(1).unwrap();
        let branches = measure_all_branches(&epr, &[0, 1], &BasisString::hadamard(2)).unwrap();
        let outcomes: Vec<String> = branches.iter().map(|b| b.outcome.to_string()).collect();
        assert_eq!(outcomes, vec!["00", "11"]);
        for b in &branches {
            assert!((b.probability - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_epr_outcomes_agree() {
        let epr = epr_pairs(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (o, post) = measure(&epr, &[0, 1], &BasisString::computational(2), &mut rng).unwrap();
            assert_eq!(o.get(0), o.get(1));
            assert!((post.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn discard_leaves_partner_in_bb84_state() {
        let epr = epr_pairs(1).unwrap();
        for b in measure_and_discard_all_branches(&epr, &[0], &BasisString::hadamard(1)).unwrap() {
            let expect = bb84_prepare(&b.outcome, &BasisString::hadamard(1)).unwrap();
            assert!(b.residual.approx_eq(&expect, 1e-12));
        }
    }

    #[test]
    fn errors_on_bad_targets() {
        let s = StateVector::basis(2, 0);
        assert!(measure_all_branches(&s, &[2], &BasisString::computational(1)).is_err());
        assert!(measure_all_branches(&s, &[0, 0], &BasisString::computational(2)).is_err());
        assert!(measure_all_branches(&s, &[0], &BasisString::computational(2)).is_err());
    }
}
