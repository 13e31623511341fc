use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::norms::NormValue;
use crate::quadrature::Enclosure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    /// Worst of two outcomes: FAIL beats INCONCLUSIVE beats PASS.
    pub fn and(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn all(statuses: impl IntoIterator<Item = Status>) -> Status {
        statuses.into_iter().fold(Status::Pass, Status::and)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClaimId {
    SupMonotone,
    P4Hierarchy,
    PstHierarchy,
    HolderChain,
    LocalCoefficients,
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClaimId::SupMonotone => "sup-monotone",
            ClaimId::P4Hierarchy => "p4",
            ClaimId::PstHierarchy => "pst",
            ClaimId::HolderChain => "holder-chain",
            ClaimId::LocalCoefficients => "local-coefficients",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessValue {
    Real { value: f64 },
    Enclosure { enclosure: Enclosure },
    Norm { norm: NormValue },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub description: String,
    #[serde(flatten)]
    pub value: WitnessValue,
}

impl Witness {
    pub fn real(description: impl Into<String>, value: f64) -> Self {
        Self {
            description: description.into(),
            value: WitnessValue::Real { value },
        }
    }

    pub fn enclosure(description: impl Into<String>, enclosure: Enclosure) -> Self {
        Self {
            description: description.into(),
            value: WitnessValue::Enclosure { enclosure },
        }
    }

    pub fn norm(description: impl Into<String>, norm: NormValue) -> Self {
        Self {
            description: description.into(),
            value: WitnessValue::Norm { norm },
        }
    }
}

/// Outcome of one claim check. `k_explicit` is the largest degree checked
/// directly, `k_dominated_from` the first degree covered by a bound that is
/// decreasing in `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub claim_id: ClaimId,
    pub params: BTreeMap<String, f64>,
    pub status: Status,
    pub witnesses: Vec<Witness>,
    pub k_explicit: u32,
    pub k_dominated_from: u32,
    pub notes: Vec<String>,
}

impl VerificationRecord {
    pub fn new(claim_id: ClaimId) -> Self {
        Self {
            claim_id,
            params: BTreeMap::new(),
            status: Status::Pass,
            witnesses: Vec::new(),
            k_explicit: 0,
            k_dominated_from: 1,
            notes: Vec::new(),
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_owned(), value);
        self
    }

    /// Folds a comparison outcome into the record's status.
    pub fn require(&mut self, outcome: Status) {
        self.status = self.status.and(outcome);
    }

    pub fn witness(&mut self, w: Witness) {
        self.witnesses.push(w);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Looks up a real-valued or enclosure witness by description; enclosures
    /// report their lower end.
    pub fn witness_value(&self, description: &str) -> Option<f64> {
        self.witnesses
            .iter()
            .find(|w| w.description == description)
            .map(|w| match &w.value {
                WitnessValue::Real { value } => *value,
                WitnessValue::Enclosure { enclosure } => enclosure.lower,
                WitnessValue::Norm { norm } => norm.enclosure.lower,
            })
    }
}

/// Three-way outcome of `a < b` on enclosures.
pub fn compare_less(a: &Enclosure, b: &Enclosure) -> Status {
    if a.upper < b.lower {
        Status::Pass
    } else if a.lower >= b.upper {
        Status::Fail
    } else {
        Status::Inconclusive
    }
}

/// Three-way outcome of a worst-case quantity being positive, given its
/// best-case value.
pub fn positive(worst: f64, best: f64) -> Status {
    if worst > 0.0 {
        Status::Pass
    } else if best <= 0.0 {
        Status::Fail
    } else {
        Status::Inconclusive
    }
}
