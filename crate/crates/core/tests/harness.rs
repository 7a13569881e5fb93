use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use certideld_core::adversary::{
    adversary_branches, BuiltinAdversary, ComputationalCheater, HonestDeleter, NoMeasureGuesser, PartialDeleter,
};
use certideld_core::compiler::{verify, DeletionCertificate, VerificationKey};
use certideld_core::harness::{
    ev_exp_trace_distance, run_c_exp, run_ev_exp, sample_acceptance, Mode, Scheme, MAX_LAMBDA,
};
use certideld_core::quantum::{
    bb84_prepare, measure_and_discard_all_branches, pi_projector_probability, trace_distance,
    uniform_parity_reference, xor_parity_channel, StateVector, C64,
};
use certideld_core::{BasisString, BitString, Error, Exec};

const SEQ: Exec = Exec::Sequential;
const IDEAL: Mode = Mode::IdealizedHiding;

fn pow(base: f64, e: usize) -> f64 {
    base.powi(e as i32)
}

#[test]
fn honest_secret_sharing_accepts_everything() {
    for b in [false, true] {
        let o = run_ev_exp(Scheme::SecretSharing, &HonestDeleter, b, 3, IDEAL, SEQ).unwrap();
        assert_eq!(o.reject_mass, 0.0);
        assert!((o.accept_mass() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn no_measure_guesser_accept_mass_matches_count() {
    // Accepts iff x is 0 on every Hadamard position.
    let lambda = 2;
    let n = 1usize << lambda;
    let mut oracle = 0.0;
    for theta in 0..n {
        for x in 0..n {
            if x & theta == 0 {
                oracle += 1.0 / (n * n) as f64;
            }
        }
    }
    for s in Scheme::ALL {
        let o = run_ev_exp(s, &NoMeasureGuesser::default(), false, lambda, IDEAL, SEQ).unwrap();
        assert!((o.accept_mass() - oracle).abs() < 1e-12, "{s}");
    }
}

#[test]
fn cheater_td_is_the_accept_mass_on_information_theoretic_schemes() {
    let (td, o0, _) = ev_exp_trace_distance(Scheme::SecretSharing, &ComputationalCheater, 4, IDEAL, SEQ).unwrap();
    assert!((td - pow(0.75, 4)).abs() < 1e-10);
    assert!((o0.accept_mass() - pow(0.75, 4)).abs() < 1e-10);
}

#[test]
fn honest_td_is_the_all_hadamard_basis_weight() {
    // θ = 1^λ leaves nothing to mask b with; every other θ hides it.
    for s in [Scheme::SecretSharing, Scheme::Otp, Scheme::CompiledPke, Scheme::CdFhe] {
        for lambda in 1..=4 {
            let (td, _, _) = ev_exp_trace_distance(s, &HonestDeleter, lambda, IDEAL, SEQ).unwrap();
            assert!((td - pow(0.5, lambda)).abs() < 1e-10, "{s} λ={lambda}: {td}");
        }
    }
    let (td, _, _) = ev_exp_trace_distance(Scheme::CdCommitment, &HonestDeleter, 4, IDEAL, SEQ).unwrap();
    assert!(td < 1e-10);
}

#[test]
fn real_backend_is_fully_revealing_for_unbounded_readers() {
    // With θ in the clear an unbounded reader decodes b from the key view
    // plus the Hadamard outcomes, even for an honest deleter.
    let (td, o0, _) = ev_exp_trace_distance(Scheme::CompiledPke, &HonestDeleter, 2, Mode::RealBackend, SEQ).unwrap();
    assert!((o0.total_mass() - 1.0).abs() < 1e-12);
    assert!(td >= pow(0.5, 2) - 1e-12);
    for s in [Scheme::CdFhe, Scheme::CdCommitment] {
        let o = run_ev_exp(s, &ComputationalCheater, true, 2, Mode::RealBackend, SEQ).unwrap();
        assert!((o.total_mass() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn lambda_budget_is_enforced() {
    assert!(matches!(
        run_ev_exp(Scheme::Otp, &HonestDeleter, false, MAX_LAMBDA + 1, IDEAL, SEQ),
        Err(Error::Resource(_))
    ));
    assert!(matches!(run_ev_exp(Scheme::Otp, &HonestDeleter, false, 0, IDEAL, SEQ), Err(Error::Input(_))));
}

fn verdict_mass(o: &certideld_core::harness::ExperimentOutput, verdict: u8) -> f64 {
    o.accepted.iter().filter(|(k, _)| k.last() == Some(&verdict)).map(|(_, m)| m.trace()).sum()
}

#[test]
fn c_exp_examples() {
    for s in Scheme::ALL {
        let h0 = run_c_exp(s, &HonestDeleter, false, 3, IDEAL, SEQ).unwrap();
        assert!((verdict_mass(&h0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(verdict_mass(&h0, 0), 0.0);

        let c0 = run_c_exp(s, &ComputationalCheater, false, 3, IDEAL, SEQ).unwrap();
        let c1 = run_c_exp(s, &ComputationalCheater, true, 3, IDEAL, SEQ).unwrap();
        assert!((verdict_mass(&c0, 1) - verdict_mass(&c1, 1)).abs() < 1e-12);
        assert!((verdict_mass(&c0, 1) - pow(0.75, 3)).abs() < 1e-12);

        let g = run_c_exp(s, &NoMeasureGuesser::default(), true, 3, IDEAL, SEQ).unwrap();
        assert!((verdict_mass(&g, 1) - pow(0.75, 3)).abs() < 1e-12);
        assert!((verdict_mass(&g, 0) - (1.0 - pow(0.75, 3))).abs() < 1e-12);
    }
    // Nothing is released in C-EXP, so the honest view carries no b on the
    // information-theoretic schemes.
    let a = run_c_exp(Scheme::SecretSharing, &HonestDeleter, false, 3, IDEAL, SEQ).unwrap();
    let b = run_c_exp(Scheme::SecretSharing, &HonestDeleter, true, 3, IDEAL, SEQ).unwrap();
    assert!(a.trace_distance(&b).unwrap() < 1e-10);
}

#[test]
fn sampled_acceptance_within_four_sigma() {
    let lambda = 3;
    let shots = 100_000;
    for s in Scheme::ALL {
        for a in BuiltinAdversary::ALL {
            let adv = a.build();
            let exact = run_ev_exp(s, adv.as_ref(), true, lambda, IDEAL, Exec::Parallel).unwrap().accept_mass();
            let est = sample_acceptance(s, IDEAL, adv.as_ref(), true, lambda, shots, 0x5eed, Exec::Parallel).unwrap();
            let p = exact.clamp(0.0, 1.0);
            let sigma = (p * (1.0 - p) / shots as f64).sqrt();
            assert!((est - exact).abs() <= 4.0 * sigma + 1e-12, "{s}/{a}: {est} vs {exact}");
        }
    }
}

#[test]
fn verdict_replays_from_vk_and_certificate() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50 {
        let lambda = rng.gen_range(1..=5);
        let x = BitString::random(lambda, &mut rng);
        let theta = BasisString::random(lambda, &mut rng);
        let vk = VerificationKey::new(x.clone(), theta.clone()).unwrap();
        let state = bb84_prepare(&x, &theta).unwrap();
        let qubits: Vec<usize> = (0..lambda).collect();
        for br in adversary_branches(&PartialDeleter::Even, b"", &state, &qubits).unwrap() {
            let first = verify(&vk, &br.certificate).unwrap();
            let vk2 = VerificationKey::from_bytes(&vk.to_bytes()).unwrap();
            let cert2 = DeletionCertificate::from_bytes(&br.certificate.to_bytes()).unwrap();
            assert_eq!(verify(&vk2, &cert2).unwrap(), first);
        }
    }
}

/// Endgame: a state on `A ⊗ C` whose `C` part, in the Hadamard basis,
/// agrees with `x′` on θ₁ and is closer than ½ to `x′` on θ₀ is rejected by
/// `Π_{x′,θ}`; after the θ₁ positions are Hadamard-measured, the parity of a
/// computational measurement of `C_{θ₀}` is uniform and independent of `A`.
#[test]
fn rejected_states_yield_uniform_parity() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 100 {
        let lambda = rng.gen_range(2..=5);
        let a = rng.gen_range(0..=2);
        let theta = BasisString::random(lambda, &mut rng);
        let comp = theta.computational_positions();
        if comp.is_empty() {
            continue;
        }
        let xp = BitString::random(lambda, &mut rng);
        let n = a + lambda;
        // Coefficients in the Hadamard frame of C.
        let amps: Vec<C64> = (0..1usize << n)
            .map(|idx| {
                let y = BitString::from_index(idx & ((1 << lambda) - 1), lambda);
                let on_h = theta.hadamard_positions().into_iter().all(|i| y.get(i) == xp.get(i));
                let diff = comp.iter().filter(|&&i| y.get(i) != xp.get(i)).count();
                if on_h && 2 * diff < comp.len() {
                    C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let mut psi = StateVector::normalized(n, amps).unwrap();
        for q in a..n {
            psi.apply_hadamard(q).unwrap();
        }
        let c: Vec<usize> = (a..n).collect();
        let rho_c = psi.reduced_density(&c).unwrap();
        assert!(pi_projector_probability(&rho_c, &xp, &theta).unwrap() < 1e-12);

        let h_pos: Vec<usize> = theta.hadamard_positions().into_iter().map(|i| a + i).collect();
        let residuals = if h_pos.is_empty() {
            vec![psi.clone()]
        } else {
            measure_and_discard_all_branches(&psi, &h_pos, &BasisString::hadamard(h_pos.len()))
                .unwrap()
                .into_iter()
                .map(|b| b.residual)
                .collect()
        };
        assert_eq!(residuals.len(), 1, "θ₁ outcome must be x′_θ₁");
        // The channel Hadamard-measures X; rotate first so that it reads the
        // computational outcome of C_θ₀.
        let mut gamma = residuals[0].clone();
        let x: Vec<usize> = (a..a + comp.len()).collect();
        for &q in &x {
            gamma.apply_hadamard(q).unwrap();
        }
        let out = xor_parity_channel(&gamma, &x).unwrap();
        let reference = uniform_parity_reference(&gamma, &x).unwrap();
        assert!(trace_distance(&out, &reference).unwrap() < 1e-10);
        checked += 1;
    }
}

fn scheme() -> impl Strategy<Value = Scheme> {
    prop::sample::select(Scheme::ALL.to_vec())
}

fn adversary() -> impl Strategy<Value = BuiltinAdversary> {
    prop::sample::select(BuiltinAdversary::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn outputs_are_normalized(s in scheme(), a in adversary(), b: bool, lambda in 1usize..=3, real: bool) {
        let mode = if real { Mode::RealBackend } else { IDEAL };
        let o = run_ev_exp(s, a.build().as_ref(), b, lambda, mode, SEQ).unwrap();
        prop_assert!((o.total_mass() - 1.0).abs() < 1e-10);
        for m in o.accepted.values() {
            prop_assert!(m.min_eigenvalue() > -1e-10);
        }
        let c = run_c_exp(s, a.build().as_ref(), b, lambda, IDEAL, SEQ).unwrap();
        prop_assert!((c.total_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn td_is_a_symmetric_probability(s in scheme(), a in adversary(), lambda in 1usize..=3) {
        let adv = a.build();
        let o0 = run_ev_exp(s, adv.as_ref(), false, lambda, IDEAL, SEQ).unwrap();
        let o1 = run_ev_exp(s, adv.as_ref(), true, lambda, IDEAL, SEQ).unwrap();
        let d = o0.trace_distance(&o1).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((d - o1.trace_distance(&o0).unwrap()).abs() < 1e-12);
        prop_assert!(o0.trace_distance(&o0).unwrap() < 1e-12);
    }

    #[test]
    fn parallel_matches_sequential_bitwise(s in scheme(), a in adversary(), b: bool, lambda in 1usize..=4) {
        let adv = a.build();
        let x = run_ev_exp(s, adv.as_ref(), b, lambda, IDEAL, Exec::Sequential).unwrap();
        let y = run_ev_exp(s, adv.as_ref(), b, lambda, IDEAL, Exec::Parallel).unwrap();
        prop_assert_eq!(x, y);
    }

    #[test]
    fn partial_deleter_td_matches_product_formula(lambda in 1usize..=4, mask in 0usize..16) {
        let subset: Vec<usize> = (0..lambda).filter(|i| mask >> i & 1 == 1).collect();
        let adv = PartialDeleter::Positions(subset.clone());
        let (td, _, _) = ev_exp_trace_distance(Scheme::SecretSharing, &adv, lambda, IDEAL, SEQ).unwrap();
        let want = pow(0.5, subset.len()) * pow(0.75, lambda - subset.len());
        prop_assert!((td - want).abs() < 1e-10, "{} vs {}", td, want);
    }
}
