//! Probability that the sampling projector `Π_{x′,θ}` accepts register `C`
//! after the adversary has output `x′`, with θ hidden from it.

use serde::{Deserialize, Serialize};

use crate::adversary::{adversary_branches, Adversary, QubitAction};
use crate::bits::{BasisString, BitString};
use crate::error::Result;
use crate::exec::Exec;
use crate::harness::experiment::idealized_view;
use crate::harness::{check_lambda, MAX_HYBRID_LAMBDA};
use crate::quantum::extractor::pi_probability_from_distribution;
use crate::quantum::{epr_a_qubits, epr_pairs, measure_and_discard_all_branches};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiResult {
    pub value: f64,
    /// `min(1, 4e^{−λ/128})`.
    pub bound: f64,
}

impl PiResult {
    pub fn holds(&self) -> bool {
        self.value <= self.bound + 1e-12
    }
}

/// `min(1, 4·e^{−λ(½)²/32})`. Vacuous below λ ≈ 177.
pub fn hoeffding_bound(lambda: usize) -> f64 {
    (4.0 * (-(lambda as f64) / 128.0).exp()).min(1.0)
}

/// Exact `Pr[Π_{x′,θ} accepts C]`, averaged over θ and over the masked bit
/// the adversary sees.
pub fn pi_probability(adv: &dyn Adversary, lambda: usize, exec: Exec) -> Result<PiResult> {
    check_lambda(lambda, MAX_HYBRID_LAMBDA)?;
    let epr = epr_pairs(lambda)?;
    let a_qubits = epr_a_qubits(lambda);
    // The adversary never sees θ, so its branches and the Hadamard outcome
    // distribution of C are computed once per masked bit.
    let mut branches: Vec<(f64, BitString, Vec<f64>)> = Vec::new();
    for bprime in [false, true] {
        let view = idealized_view(b"pke", lambda, bprime);
        let actions = adv.actions(lambda, &view);
        let survivors: Vec<usize> =
            (0..2 * lambda).filter(|q| q % 2 == 0 || actions.get(q / 2) == Some(&QubitAction::Keep)).collect();
        let c_pos: Vec<usize> = (0..survivors.len()).filter(|&i| survivors[i].is_multiple_of(2)).collect();
        for br in adversary_branches(adv, &view, &epr, &a_qubits)? {
            let mut dist = vec![0.0; 1 << lambda];
            for y in measure_and_discard_all_branches(&br.residual, &c_pos, &BasisString::hadamard(lambda))? {
                dist[y.outcome.to_index()] += y.probability;
            }
            branches.push((0.5 * br.probability, br.certificate.x_prime, dist));
        }
    }
    let w_theta = 1.0 / (1u64 << lambda) as f64;
    let value = exec
        .map(1usize << lambda, |t| {
            let theta = BasisString::new(BitString::from_index(t, lambda));
            branches.iter().map(|(w, xp, dist)| w * pi_probability_from_distribution(dist, xp, &theta)).sum::<f64>()
        })
        .into_iter()
        .fold(0.0, |s, p| s + w_theta * p);
    Ok(PiResult { value, bound: hoeffding_bound(lambda) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{ComputationalCheater, HonestDeleter, NoMeasureGuesser};

    #[test]
    fn bound_is_vacuous_at_desk_scale() {
        assert_eq!(hoeffding_bound(6), 1.0);
        assert!(hoeffding_bound(200) < 1.0);
    }

    #[test]
    fn honest_only_passes_vacuously() {
        for lambda in 1..=4 {
            let r = pi_probability(&HonestDeleter, lambda, Exec::Sequential).unwrap();
            assert!((r.value - 0.5f64.powi(lambda as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn measuring_or_not_gives_the_same_value() {
        for lambda in [2, 4] {
            let a = pi_probability(&ComputationalCheater, lambda, Exec::Sequential).unwrap().value;
            let b = pi_probability(&NoMeasureGuesser::default(), lambda, Exec::Sequential).unwrap().value;
            let want = if lambda == 2 { 0.375 } else { 0.1953125 };
            assert!((a - want).abs() < 1e-12 && (b - want).abs() < 1e-12, "{a} {b}");
        }
    }
}
