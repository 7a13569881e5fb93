//! Serializable run reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::adversary::BuiltinAdversary;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::harness::{
    ev_exp_trace_distance, hybrid_chain, pi_probability, run_c_exp, HybridReport, Mode, Scheme, EXACT_TOL,
};

/// One asserted inequality `value ≤ bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

impl BoundCheck {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, holds: value <= bound }
    }
}

/// Whether `values` never increases by more than `EXACT_TOL` between
/// neighbours. The recorded value is the largest step up (0 if none).
pub fn non_increasing(name: impl Into<String>, values: &[f64]) -> BoundCheck {
    let rise = values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    BoundCheck::at_most(name, rise, EXACT_TOL)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub op: String,
    pub scheme: Scheme,
    pub adversary: String,
    pub lambda: usize,
    pub mode: Mode,
    pub td: Option<f64>,
    pub accept0: Option<f64>,
    pub accept1: Option<f64>,
    pub pi_value: Option<f64>,
    pub pi_bound: Option<f64>,
    pub hybrids: Option<HybridReport>,
    pub runtime_ms: Option<u64>,
    pub seed: u64,
    pub version: String,
    pub checks: Vec<BoundCheck>,
}

impl ExperimentReport {
    fn blank(op: &str, scheme: Scheme, adversary: BuiltinAdversary, lambda: usize, mode: Mode, seed: u64) -> Self {
        Self {
            op: op.into(),
            scheme,
            adversary: adversary.as_str().into(),
            lambda,
            mode,
            td: None,
            accept0: None,
            accept1: None,
            pi_value: None,
            pi_bound: None,
            hybrids: None,
            runtime_ms: None,
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            checks: Vec::new(),
        }
    }

    /// `TD(EV-EXP(0), EV-EXP(1))` with normalization checks and the bound
    /// asserted for the adversary, if any.
    pub fn td(
        scheme: Scheme,
        adversary: BuiltinAdversary,
        lambda: usize,
        mode: Mode,
        seed: u64,
        exec: Exec,
    ) -> Result<Self> {
        let adv = adversary.build();
        let (td, o0, o1) = ev_exp_trace_distance(scheme, adv.as_ref(), lambda, mode, exec)?;
        let mut r = Self::blank("td", scheme, adversary, lambda, mode, seed);
        r.td = Some(td);
        r.accept0 = Some(o0.accept_mass());
        r.accept1 = Some(o1.accept_mass());
        r.checks.push(BoundCheck::at_most("mass-b0", (o0.total_mass() - 1.0).abs(), EXACT_TOL));
        r.checks.push(BoundCheck::at_most("mass-b1", (o1.total_mass() - 1.0).abs(), EXACT_TOL));
        match adversary {
            BuiltinAdversary::Honest => r.checks.push(BoundCheck::at_most("td-honest", td, EXACT_TOL)),
            BuiltinAdversary::CompCheater => r.checks.push(BoundCheck::at_most(
                "td-comp-cheater",
                td,
                0.75f64.powi(lambda as i32) + EXACT_TOL,
            )),
            _ => {}
        }
        Ok(r)
    }

    /// `TD(C-EXP(0), C-EXP(1))`; only normalization is asserted.
    pub fn c_exp(
        scheme: Scheme,
        adversary: BuiltinAdversary,
        lambda: usize,
        seed: u64,
        exec: Exec,
    ) -> Result<Self> {
        let adv = adversary.build();
        let mode = Mode::IdealizedHiding;
        let o0 = run_c_exp(scheme, adv.as_ref(), false, lambda, mode, exec)?;
        let o1 = run_c_exp(scheme, adv.as_ref(), true, lambda, mode, exec)?;
        let accept = |o: &crate::harness::ExperimentOutput| -> f64 {
            o.accepted.iter().filter(|(k, _)| k.last() == Some(&1)).map(|(_, m)| m.trace()).sum()
        };
        let mut r = Self::blank("cexp", scheme, adversary, lambda, mode, seed);
        r.td = Some(o0.trace_distance(&o1)?);
        r.accept0 = Some(accept(&o0));
        r.accept1 = Some(accept(&o1));
        r.checks.push(BoundCheck::at_most("mass-b0", (o0.total_mass() - 1.0).abs(), EXACT_TOL));
        r.checks.push(BoundCheck::at_most("mass-b1", (o1.total_mass() - 1.0).abs(), EXACT_TOL));
        Ok(r)
    }

    /// Hybrid chain on the compiled scheme, asserting the halving and
    /// deferral identities.
    pub fn hybrids(adversary: BuiltinAdversary, lambda: usize, seed: u64, exec: Exec) -> Result<Self> {
        let h = hybrid_chain(adversary.build().as_ref(), lambda, exec)?;
        let mut r = Self::blank("hybrids", Scheme::CompiledPke, adversary, lambda, Mode::IdealizedHiding, seed);
        r.td = Some(h.advt0);
        r.hybrids = Some(h);
        r.checks.push(BoundCheck::at_most("halving", h.halving_gap(), EXACT_TOL));
        r.checks.push(BoundCheck::at_most("deferral", h.deferral_gap(), EXACT_TOL));
        Ok(r)
    }

    pub fn pi(adversary: BuiltinAdversary, lambda: usize, seed: u64, exec: Exec) -> Result<Self> {
        let p = pi_probability(adversary.build().as_ref(), lambda, exec)?;
        let mut r = Self::blank("pi", Scheme::CompiledPke, adversary, lambda, Mode::IdealizedHiding, seed);
        r.pi_value = Some(p.value);
        r.pi_bound = Some(p.bound);
        r.checks.push(BoundCheck::at_most("pi-hoeffding", p.value, p.bound));
        Ok(r)
    }

    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    fn key(&self) -> (String, Scheme, String, Mode, usize) {
        (self.op.clone(), self.scheme, self.adversary.clone(), self.mode, self.lambda)
    }
}

/// Dedups on `(op, scheme, adversary, mode, λ)`, a later report replacing
/// an earlier one, and sorts by that key.
pub fn merge_reports(reports: impl IntoIterator<Item = ExperimentReport>) -> Vec<ExperimentReport> {
    let mut by_key = BTreeMap::new();
    for r in reports {
        by_key.insert(r.key(), r);
    }
    by_key.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let r = ExperimentReport::td(Scheme::Otp, BuiltinAdversary::CompCheater, 2, Mode::IdealizedHiding, 5, Exec::Sequential)
            .unwrap();
        assert!(r.all_hold());
        let back = ExperimentReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_json().contains("\"runtime_ms\": null"));
        assert!(matches!(ExperimentReport::from_json("{"), Err(Error::Format(_))));
    }

    #[test]
    fn merge_keeps_later() {
        let mut a = ExperimentReport::pi(BuiltinAdversary::Honest, 2, 1, Exec::Sequential).unwrap();
        let mut b = a.clone();
        b.seed = 2;
        a.lambda = 3;
        let c = a.clone();
        let merged = merge_reports([a, b.clone(), c]);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0], b);
    }

    #[test]
    fn monotone() {
        assert!(non_increasing("m", &[0.5, 0.25, 0.25]).holds);
        assert!(!non_increasing("m", &[0.25, 0.5]).holds);
    }
}
