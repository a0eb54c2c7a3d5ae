//! Bell inequalities as coefficient tensors over setting-label tuples.
//!
//! The classical bound is established by exhaustive enumeration of
//! deterministic local-hidden-variable strategies (every party assigns a
//! predetermined +-1 outcome to each of its settings). Coefficients are
//! exact dyadic rationals, so the enumerated bound carries no floating-point
//! error at all; floats appear only when evaluating quantum values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::correlators::{correlation_closed_form, correlation_oracle, SettingTable};
use crate::error::{Error, Result};
use crate::qstate::{materialize_density, NoisyCloneSpec};

/// Cap on the number of enumerated strategies (2^26).
pub const ENUMERATION_CAP_BITS: u32 = 26;

/// Exact dyadic rational `num / 2^den_pow2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dyadic {
    pub num: i64,
    pub den_pow2: u32,
}

impl Dyadic {
    pub fn new(num: i64, den_pow2: u32) -> Self {
        Self { num, den_pow2 }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.den_pow2) as f64
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }
}

/// A Bell inequality `sum(coeff * Q_tuple) <= claimed_bound`.
///
/// `settings_per_party[p]` lists the setting labels party `p + 1` may use;
/// label 0, when declared, is the reserved no-measurement slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InequalityDoc", into = "InequalityDoc")]
pub struct InequalitySpec {
    n: usize,
    settings_per_party: Vec<Vec<u8>>,
    coefficients: BTreeMap<Vec<u8>, Dyadic>,
    claimed_bound: f64,
}

/// Serialized form: `{n, labels, terms: [{idx, num, den_pow2}], bound}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InequalityDoc {
    pub n: usize,
    pub labels: Vec<Vec<u8>>,
    pub terms: Vec<Term>,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Term {
    pub idx: Vec<u8>,
    pub num: i64,
    pub den_pow2: u32,
}

impl From<InequalitySpec> for InequalityDoc {
    fn from(s: InequalitySpec) -> Self {
        Self {
            n: s.n,
            labels: s.settings_per_party,
            terms: s
                .coefficients
                .into_iter()
                .map(|(idx, c)| Term {
                    idx,
                    num: c.num,
                    den_pow2: c.den_pow2,
                })
                .collect(),
            bound: s.claimed_bound,
        }
    }
}

impl TryFrom<InequalityDoc> for InequalitySpec {
    type Error = Error;

    fn try_from(doc: InequalityDoc) -> Result<Self> {
        let coefficients = doc
            .terms
            .into_iter()
            .map(|t| (t.idx, Dyadic::new(t.num, t.den_pow2)))
            .collect();
        InequalitySpec::new(doc.n, doc.labels, coefficients, doc.bound)
    }
}

impl InequalitySpec {
    pub fn new(
        n: usize,
        settings_per_party: Vec<Vec<u8>>,
        coefficients: BTreeMap<Vec<u8>, Dyadic>,
        claimed_bound: f64,
    ) -> Result<Self> {
        if settings_per_party.len() != n {
            return Err(Error::BadSpec(format!(
                "{} label sets declared for {n} parties",
                settings_per_party.len()
            )));
        }
        if settings_per_party.iter().any(|l| l.is_empty()) {
            return Err(Error::BadSpec("every party needs at least one label".into()));
        }
        if coefficients.values().all(|c| c.is_zero()) {
            return Err(Error::BadSpec("all coefficients are zero".into()));
        }
        for idx in coefficients.keys() {
            if idx.len() != n {
                return Err(Error::BadSpec(format!(
                    "coefficient key {idx:?} has arity {}, expected {n}",
                    idx.len()
                )));
            }
            for (p, label) in idx.iter().enumerate() {
                if !settings_per_party[p].contains(label) {
                    return Err(Error::MissingLabel {
                        party: p + 1,
                        label: *label,
                    });
                }
            }
        }
        Ok(Self {
            n,
            settings_per_party,
            coefficients,
            claimed_bound,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn settings_per_party(&self) -> &[Vec<u8>] {
        &self.settings_per_party
    }

    pub fn coefficients(&self) -> &BTreeMap<Vec<u8>, Dyadic> {
        &self.coefficients
    }

    pub fn coefficient(&self, idx: &[u8]) -> Option<Dyadic> {
        self.coefficients.get(idx).copied()
    }

    pub fn claimed_bound(&self) -> f64 {
        self.claimed_bound
    }

    /// `sum(|coeff|)`, a hard cap on any correlation-weighted value.
    pub fn coefficient_l1(&self) -> f64 {
        self.coefficients.values().map(|c| c.to_f64().abs()).sum()
    }

    /// Measured (party, label) slots in enumeration order, label 0 excluded.
    fn measured_slots(&self) -> Vec<(usize, u8)> {
        let mut slots = Vec::new();
        for (p, labels) in self.settings_per_party.iter().enumerate() {
            for &l in labels {
                if l != 0 {
                    slots.push((p, l));
                }
            }
        }
        slots
    }
}

/// CHSH: `(Q11 + Q12 + Q21 - Q22) / 2 <= 1`, stored with the merged
/// `-1/2` coefficient on (2,2).
pub fn chsh_spec() -> InequalitySpec {
    even_spec(2).expect("n = 2 is even")
}

/// Even-N inequality: weight `1/2^(n-1)` on every tuple in `{1,2}^n` plus an
/// extra `-1` merged into the all-twos tuple; bound 1.
pub fn even_spec(n: usize) -> Result<InequalitySpec> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::PartyCount {
            n,
            reason: "even-N inequality needs an even n >= 2",
        });
    }
    let den = (n - 1) as u32;
    let mut coefficients = BTreeMap::new();
    for tuple in label_tuples(&vec![vec![1u8, 2u8]; n]) {
        coefficients.insert(tuple, Dyadic::new(1, den));
    }
    let all_twos = vec![2u8; n];
    coefficients.insert(all_twos, Dyadic::new(1 - (1i64 << den), den));
    InequalitySpec::new(n, vec![vec![1, 2]; n], coefficients, 1.0)
}

/// Odd-N inequality: parties 1..n-1 use labels {1,2}, party n uses {0,1}
/// where 0 means no measurement; weight `1/2^(n-1)` on every tuple plus an
/// extra `-1` merged into `(2,..,2,0)`; bound 1.
pub fn odd_spec(n: usize) -> Result<InequalitySpec> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::PartyCount {
            n,
            reason: "odd-N inequality needs an odd n >= 3",
        });
    }
    let den = (n - 1) as u32;
    let mut labels = vec![vec![1u8, 2u8]; n - 1];
    labels.push(vec![0u8, 1u8]);
    let mut coefficients = BTreeMap::new();
    for tuple in label_tuples(&labels) {
        coefficients.insert(tuple, Dyadic::new(1, den));
    }
    let mut top = vec![2u8; n - 1];
    top.push(0);
    coefficients.insert(top, Dyadic::new(1 - (1i64 << den), den));
    InequalitySpec::new(n, labels, coefficients, 1.0)
}

fn label_tuples(labels: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let mut tuples = vec![Vec::new()];
    for party_labels in labels {
        let mut next = Vec::with_capacity(tuples.len() * party_labels.len());
        for t in &tuples {
            for &l in party_labels {
                let mut t2 = t.clone();
                t2.push(l);
                next.push(t2);
            }
        }
        tuples = next;
    }
    tuples
}

/// Predetermined +-1 outcomes, one per (party, measured label); the reserved
/// no-measurement label 0 is pinned to +1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    /// values[p] maps party p+1's label list (same order as the spec's
    /// `settings_per_party`) to outcomes; label-0 entries are always +1.
    values: Vec<Vec<i8>>,
}

impl DeterministicStrategy {
    /// Decode a strategy from a bitmask: bits are assigned to measured
    /// (party, label) slots in party-major, label-ascending order; a clear
    /// bit means +1, a set bit means -1.
    pub fn from_bitmask(spec: &InequalitySpec, mask: u64) -> Self {
        let mut values = Vec::with_capacity(spec.n);
        let mut bit = 0;
        for labels in &spec.settings_per_party {
            let mut row = Vec::with_capacity(labels.len());
            for &l in labels {
                if l == 0 {
                    row.push(1);
                } else {
                    row.push(if (mask >> bit) & 1 == 1 { -1 } else { 1 });
                    bit += 1;
                }
            }
            values.push(row);
        }
        Self { values }
    }

    /// Outcome of `party` (1-based) at `label`; +1 for the reserved label 0.
    pub fn outcome(&self, spec: &InequalitySpec, party: usize, label: u8) -> Result<i8> {
        let labels = &spec.settings_per_party[party - 1];
        let pos = labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::MissingLabel { party, label })?;
        Ok(self.values[party - 1][pos])
    }

    pub fn values(&self) -> &[Vec<i8>] {
        &self.values
    }
}

/// Inequality value of one deterministic strategy, exact.
pub fn lhv_value(spec: &InequalitySpec, strat: &DeterministicStrategy) -> Result<f64> {
    Ok(lhv_value_dyadic(spec, strat)?.to_f64())
}

/// Exact dyadic value of one deterministic strategy.
pub fn lhv_value_dyadic(spec: &InequalitySpec, strat: &DeterministicStrategy) -> Result<Dyadic> {
    if strat.values.len() != spec.n {
        return Err(Error::ArityMismatch {
            expected: spec.n,
            got: strat.values.len(),
        });
    }
    let den = spec
        .coefficients
        .values()
        .map(|c| c.den_pow2)
        .max()
        .unwrap_or(0);
    let mut num = 0i64;
    for (idx, coeff) in &spec.coefficients {
        let mut sign = 1i64;
        for (p, &label) in idx.iter().enumerate() {
            sign *= strat.outcome(spec, p + 1, label)? as i64;
        }
        num += sign * (coeff.num << (den - coeff.den_pow2));
    }
    Ok(Dyadic::new(num, den))
}

/// Result of exhaustive LHV maximization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvBound {
    pub value: Dyadic,
    pub strategy: DeterministicStrategy,
    pub strategy_mask: u64,
    pub strategies_searched: u64,
}

/// Exact maximum of [`lhv_value`] over all deterministic strategies.
///
/// Enumeration order is the bitmask ascending; ties break toward the lowest
/// mask, so the result is independent of any parallel partitioning.
pub fn lhv_max(spec: &InequalitySpec) -> Result<LhvBound> {
    let bits = spec.measured_slots().len() as u32;
    if bits > ENUMERATION_CAP_BITS {
        return Err(Error::EnumerationCap {
            bits,
            cap_bits: ENUMERATION_CAP_BITS,
        });
    }
    let total = 1u64 << bits;
    let best = (0..total)
        .into_par_iter()
        .map(|mask| {
            let strat = DeterministicStrategy::from_bitmask(spec, mask);
            let v = lhv_value_dyadic(spec, &strat).expect("arity matches by construction");
            (v.num, mask, v.den_pow2)
        })
        .reduce(
            || (i64::MIN, u64::MAX, 0),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    let (num, mask, den) = best;
    Ok(LhvBound {
        value: Dyadic::new(num, den),
        strategy: DeterministicStrategy::from_bitmask(spec, mask),
        strategy_mask: mask,
        strategies_searched: total,
    })
}

/// Quantum value of the inequality for a noisy clone state under a setting
/// table: closed form by default, density-matrix trace when `use_oracle`.
pub fn quantum_value(
    spec: &InequalitySpec,
    state: &NoisyCloneSpec,
    table: &SettingTable,
    use_oracle: bool,
) -> Result<f64> {
    if state.n() != spec.n {
        return Err(Error::ArityMismatch {
            expected: spec.n,
            got: state.n(),
        });
    }
    if table.n() != spec.n {
        return Err(Error::ArityMismatch {
            expected: spec.n,
            got: table.n(),
        });
    }
    let rho = if use_oracle {
        Some(materialize_density(state)?)
    } else {
        None
    };
    let mut total = 0.0;
    for (idx, coeff) in &spec.coefficients {
        let choices = table.choices_for(idx)?;
        let q = match &rho {
            Some(d) => correlation_oracle(d, &choices)?,
            None => correlation_closed_form(state, &choices)?,
        };
        total += coeff.to_f64() * q;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlators::{Direction, PartySettings, SettingTable};
    use crate::qstate::CatParams;
    use std::f64::consts::PI;

    #[test]
    fn chsh_coefficients() {
        let s = chsh_spec();
        assert_eq!(s.n(), 2);
        assert_eq!(s.coefficient(&[2, 2]).unwrap().to_f64(), -0.5);
        assert_eq!(s.coefficient(&[1, 1]).unwrap().to_f64(), 0.5);
        assert_eq!(s.coefficient(&[1, 2]).unwrap().to_f64(), 0.5);
        assert_eq!(s.coefficient(&[2, 1]).unwrap().to_f64(), 0.5);
    }

    #[test]
    fn even_spec_coefficients() {
        let s = even_spec(4).unwrap();
        assert_eq!(s.coefficient(&[2, 2, 2, 2]).unwrap().to_f64(), -0.875);
        assert_eq!(s.coefficient(&[1, 1, 1, 1]).unwrap().to_f64(), 0.125);
        assert_eq!(s.coefficients().len(), 16);
        assert!(even_spec(3).is_err());

        // n = 2 reduces to CHSH coefficientwise
        assert_eq!(even_spec(2).unwrap(), chsh_spec());
    }

    #[test]
    fn odd_spec_coefficients() {
        let s = odd_spec(3).unwrap();
        assert_eq!(s.coefficient(&[2, 2, 0]).unwrap().to_f64(), -0.75);
        assert_eq!(s.coefficients().len(), 8);
        let s5 = odd_spec(5).unwrap();
        assert_eq!(s5.coefficient(&[1, 1, 1, 1, 1]).unwrap().to_f64(), 1.0 / 16.0);
        assert!(odd_spec(4).is_err());
    }

    #[test]
    fn lhv_value_examples() {
        let chsh = chsh_spec();
        let all_plus = DeterministicStrategy::from_bitmask(&chsh, 0);
        assert_eq!(lhv_value(&chsh, &all_plus).unwrap(), 1.0);

        let even4 = even_spec(4).unwrap();
        let all_plus = DeterministicStrategy::from_bitmask(&even4, 0);
        assert_eq!(lhv_value(&even4, &all_plus).unwrap(), 1.0);

        // all setting-2 outcomes flipped to -1: still <= 1
        let mut mask = 0u64;
        for slot in 0..8 {
            if slot % 2 == 1 {
                mask |= 1 << slot;
            }
        }
        let flipped = DeterministicStrategy::from_bitmask(&even4, mask);
        assert!(lhv_value(&even4, &flipped).unwrap() <= 1.0);
    }

    #[test]
    fn lhv_bounds_are_exactly_one() {
        assert_eq!(lhv_max(&chsh_spec()).unwrap().value.to_f64(), 1.0);
        assert_eq!(lhv_max(&even_spec(4).unwrap()).unwrap().value.to_f64(), 1.0);
        assert_eq!(lhv_max(&odd_spec(3).unwrap()).unwrap().value.to_f64(), 1.0);
    }

    #[test]
    fn lhv_max_rejects_huge_spaces() {
        // 14 parties x 2 labels = 28 bits > cap
        let n = 14;
        let labels = vec![vec![1u8, 2u8]; n];
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![1u8; n], Dyadic::new(1, 0));
        let spec = InequalitySpec::new(n, labels, coeffs, 1.0).unwrap();
        assert!(matches!(lhv_max(&spec), Err(Error::EnumerationCap { .. })));
    }

    #[test]
    fn lhv_max_brute_force_cross_check() {
        // independent recursive enumeration as an oracle for the bitmask path
        fn recurse(spec: &InequalitySpec, slots: usize, mask: u64, best: &mut f64) {
            if slots == 0 {
                let strat = DeterministicStrategy::from_bitmask(spec, mask);
                let v = lhv_value(spec, &strat).unwrap();
                if v > *best {
                    *best = v;
                }
                return;
            }
            recurse(spec, slots - 1, mask << 1, best);
            recurse(spec, slots - 1, (mask << 1) | 1, best);
        }
        for spec in [chsh_spec(), odd_spec(3).unwrap()] {
            let mut best = f64::NEG_INFINITY;
            let slots = spec
                .settings_per_party()
                .iter()
                .map(|l| l.iter().filter(|&&x| x != 0).count())
                .sum();
            recurse(&spec, slots, 0, &mut best);
            assert_eq!(best, lhv_max(&spec).unwrap().value.to_f64());
        }
    }

    #[test]
    fn spec_document_round_trip() {
        let spec = odd_spec(3).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: InequalitySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);

        // documents with undeclared labels are rejected
        let bad = r#"{"n":2,"labels":[[1,2],[1,2]],"terms":[{"idx":[1,3],"num":1,"den_pow2":1}],"bound":1.0}"#;
        assert!(serde_json::from_str::<InequalitySpec>(bad).is_err());
    }

    #[test]
    fn quantum_value_reduced_chsh_form() {
        // the reduced CHSH expression cos(theta_b1) + V sin(xi) sin(theta_b1)
        let chsh = chsh_spec();
        for &(v, xi, tb1) in &[(1.0, PI / 2.0, PI / 4.0), (0.6, 1.1, 0.9), (0.3, 2.2, 1.7)] {
            let state = NoisyCloneSpec::new(2, CatParams::new(xi, 0.0).unwrap(), v).unwrap();
            let table = SettingTable::new(vec![
                PartySettings::measured(
                    1,
                    vec![
                        Direction::new(0.0, 0.0).unwrap(),
                        Direction::new(PI / 2.0, 0.0).unwrap(),
                    ],
                ),
                PartySettings::measured(
                    1,
                    vec![
                        Direction::new(tb1, 0.0).unwrap(),
                        Direction::normalized(-tb1, 0.0),
                    ],
                ),
            ])
            .unwrap();
            let expect = tb1.cos() + v * xi.sin() * tb1.sin();
            let closed = quantum_value(&chsh, &state, &table, false).unwrap();
            let oracle = quantum_value(&chsh, &state, &table, true).unwrap();
            assert!((closed - expect).abs() < 1e-12, "closed={closed} expect={expect}");
            assert!((closed - oracle).abs() < 1e-10);
            assert!(closed.abs() <= chsh.coefficient_l1());
        }
    }
}
