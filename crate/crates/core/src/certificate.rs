//! Three-valued outcomes of horizon-bounded property checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Verified,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "VERIFIED",
            Status::Refuted => "REFUTED",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    PropertyD,
    LambdaSync,
    CondIii,
    LambdaConditionI,
    SyncConditionI,
    LambdaIrreducible,
    SynchronizedIrreducible,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::PropertyD => "property (D)",
            Property::LambdaSync => "lambda-synchronizing",
            Property::CondIii => "condition (iii)",
            Property::LambdaConditionI => "lambda-condition (I)",
            Property::SyncConditionI => "synchronizing condition (I)",
            Property::LambdaIrreducible => "lambda-irreducible",
            Property::SynchronizedIrreducible => "synchronized irreducible",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Horizon {
    pub word_length_bound: usize,
    pub follower_horizon: usize,
}

impl Horizon {
    pub fn new(word_length_bound: usize, follower_horizon: usize) -> Self {
        Horizon {
            word_length_bound,
            follower_horizon,
        }
    }
}

impl Default for Horizon {
    fn default() -> Self {
        Horizon::new(8, 8)
    }
}

/// A named bundle of rendered words.
pub type Evidence = BTreeMap<String, String>;

/// An item the check could not witness, or a refutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub subject: String,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub evidence: Evidence,
    /// Set when the failure follows from a failing factor.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inherited_from: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub property: Property,
    pub status: Status,
    pub horizon: Horizon,
    /// The decision does not depend on the horizon.
    pub exact: bool,
    /// Concrete counterexample, present iff the status is `Refuted`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Evidence>,
    /// Unwitnessed items (only roots when failures are inherited).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failures: Vec<Failure>,
    /// Number of failures not listed individually.
    #[serde(skip_serializing_if = "is_zero", default)]
    pub inherited_failures: usize,
    pub checked: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl Certificate {
    pub fn new(property: Property, horizon: Horizon) -> Self {
        Certificate {
            property,
            status: Status::Verified,
            horizon,
            exact: false,
            witness: None,
            failures: Vec::new(),
            inherited_failures: 0,
            checked: 0,
            notes: Vec::new(),
        }
    }

    pub fn refute(&mut self, witness: Evidence) {
        self.status = Status::Refuted;
        self.witness = Some(witness);
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Verified
    }
}

/// Builds an [`Evidence`] map from name/value pairs.
pub fn evidence<const N: usize>(pairs: [(&str, String); N]) -> Evidence {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
