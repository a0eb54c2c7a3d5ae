//! Measurement directions, spin observables and correlation functions.
//!
//! Correlations come in two independent flavours: [`correlation_oracle`]
//! traces an explicit observable tensor against a materialized density
//! matrix, while [`correlation_closed_form`] evaluates the analytic
//! expression for the noisy clone family. The test suite holds the two
//! within 1e-10 of each other.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, NoisyCloneSpec, C64};

/// Unit vector on the Bloch sphere given by polar angle `theta` in `[0, pi]`
/// and azimuth `phi` in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                range: "[0, pi]",
            });
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
                range: "[0, 2pi)",
            });
        }
        Ok(Self { theta, phi })
    }

    /// Fold arbitrary angles into range using `(-theta, phi) == (theta, phi + pi)`.
    pub fn normalized(theta: f64, phi: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        let mut p = phi;
        if t > PI {
            t = TAU - t;
            p += PI;
        }
        Self {
            theta: t,
            phi: p.rem_euclid(TAU),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// What one party does for one setting label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PartyChoice {
    /// Projective spin measurement along a direction.
    Measure(Direction),
    /// Identity factor; the party does not measure.
    NoMeasurement,
}

/// Ordered setting choices for one party, labelled from `first_label`
/// upwards. Label 0, when present, is the reserved no-measurement slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartySettings {
    pub first_label: u8,
    pub choices: Vec<PartyChoice>,
}

impl PartySettings {
    pub fn measured(first_label: u8, directions: Vec<Direction>) -> Self {
        Self {
            first_label,
            choices: directions.into_iter().map(PartyChoice::Measure).collect(),
        }
    }
}

/// Measurement settings for every party, indexed by (party, setting label).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingTable {
    parties: Vec<PartySettings>,
}

impl SettingTable {
    pub fn new(parties: Vec<PartySettings>) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::PartyCount {
                n: 0,
                reason: "setting table needs at least one party",
            });
        }
        for (i, p) in parties.iter().enumerate() {
            if p.choices.is_empty() {
                return Err(Error::MissingLabel {
                    party: i + 1,
                    label: p.first_label,
                });
            }
        }
        Ok(Self { parties })
    }

    pub fn n(&self) -> usize {
        self.parties.len()
    }

    pub fn parties(&self) -> &[PartySettings] {
        &self.parties
    }

    /// Choice of `party` (1-based) at a setting label.
    pub fn choice(&self, party: usize, label: u8) -> Result<PartyChoice> {
        let p = self
            .parties
            .get(party - 1)
            .ok_or(Error::MissingLabel { party, label })?;
        if label < p.first_label {
            return Err(Error::MissingLabel { party, label });
        }
        p.choices
            .get((label - p.first_label) as usize)
            .copied()
            .ok_or(Error::MissingLabel { party, label })
    }

    /// Resolve a full label tuple into one choice per party.
    pub fn choices_for(&self, labels: &[u8]) -> Result<Vec<PartyChoice>> {
        if labels.len() != self.n() {
            return Err(Error::ArityMismatch {
                expected: self.n(),
                got: labels.len(),
            });
        }
        labels
            .iter()
            .enumerate()
            .map(|(i, &l)| self.choice(i + 1, l))
            .collect()
    }
}

/// Spin observable `n.sigma` for a direction: eigenvalues exactly +1 / -1.
pub fn observable_from_direction(d: &Direction) -> DMatrix<C64> {
    let (ct, st) = (d.theta.cos(), d.theta.sin());
    DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(ct, 0.0),
            C64::from_polar(st, -d.phi),
            C64::from_polar(st, d.phi),
            C64::new(-ct, 0.0),
        ],
    )
}

fn identity2() -> DMatrix<C64> {
    DMatrix::from_diagonal_element(2, 2, C64::new(1.0, 0.0))
}

/// Correlation `Tr(rho O_1 ⊗ .. ⊗ O_n)` with identity factors for
/// unmeasured parties. The trace must come out real; a large imaginary
/// residue indicates a broken Hermitian input.
pub fn correlation_oracle(d: &DensityMatrix, choices: &[PartyChoice]) -> Result<f64> {
    if choices.len() != d.n() {
        return Err(Error::ArityMismatch {
            expected: d.n(),
            got: choices.len(),
        });
    }
    let mut obs: Option<DMatrix<C64>> = None;
    for c in choices {
        let factor = match c {
            PartyChoice::Measure(dir) => observable_from_direction(dir),
            PartyChoice::NoMeasurement => identity2(),
        };
        obs = Some(match obs {
            None => factor,
            Some(o) => o.kronecker(&factor),
        });
    }
    let obs = obs.expect("at least one party");
    let prod = d.entries() * obs;
    let trace: C64 = prod.diagonal().iter().sum();
    if trace.im.abs() > 1e-10 {
        return Err(Error::Invariant {
            check: "real correlation",
            residue: trace.im.abs(),
        });
    }
    Ok(trace.re)
}

/// Analytic correlation for the noisy clone family.
///
/// With `m` measured parties out of `n`, the populations contribute
/// `prod(cos theta)` (times `V cos xi` when `m` is odd), and the coherence
/// term `V sin xi prod(sin theta) cos(phi_cat - sum(phi))` appears only
/// when every party measures.
pub fn correlation_closed_form(s: &NoisyCloneSpec, choices: &[PartyChoice]) -> Result<f64> {
    if choices.len() != s.n() {
        return Err(Error::ArityMismatch {
            expected: s.n(),
            got: choices.len(),
        });
    }
    let mut measured = 0usize;
    let mut prod_cos = 1.0f64;
    let mut prod_sin = 1.0f64;
    let mut sum_phi = 0.0f64;
    for c in choices {
        if let PartyChoice::Measure(dir) = c {
            measured += 1;
            prod_cos *= dir.theta().cos();
            prod_sin *= dir.theta().sin();
            sum_phi += dir.phi();
        }
    }
    let v = s.visibility();
    let xi = s.cat().xi();
    let population = if measured % 2 == 0 {
        prod_cos
    } else {
        v * xi.cos() * prod_cos
    };
    let coherence = if measured == s.n() {
        v * xi.sin() * prod_sin * (s.cat().phi() - sum_phi).cos()
    } else {
        0.0
    };
    Ok(population + coherence)
}
