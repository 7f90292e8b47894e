//! Three-valued answers of the bounded isomorphism checkers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::nfa::ExtendedCount;

/// A statistic that differs between two structures, with both values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// What was counted, e.g. `h(24)`.
    pub statistic: String,
    pub left: ExtendedCount,
    pub right: ExtendedCount,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IsoVerdict {
    Isomorphic,
    NonIsomorphic { certificate: Certificate },
    /// No difference found within the named caps.
    ConsistentUpTo { caps: BTreeMap<String, u64> },
}

impl IsoVerdict {
    pub fn consistent(caps: &[(&str, u64)]) -> IsoVerdict {
        IsoVerdict::ConsistentUpTo { caps: caps.iter().map(|&(k, v)| (k.to_string(), v)).collect() }
    }

    pub fn differ(statistic: impl Into<String>, left: ExtendedCount, right: ExtendedCount) -> IsoVerdict {
        IsoVerdict::NonIsomorphic { certificate: Certificate { statistic: statistic.into(), left, right } }
    }

    pub fn is_non_isomorphic(&self) -> bool {
        matches!(self, IsoVerdict::NonIsomorphic { .. })
    }
}

impl fmt::Display for IsoVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoVerdict::Isomorphic => f.write_str("isomorphic"),
            IsoVerdict::NonIsomorphic { certificate: c } => {
                write!(f, "non-isomorphic: {} is {} vs {}", c.statistic, c.left, c.right)
            }
            IsoVerdict::ConsistentUpTo { caps } => {
                f.write_str("consistent up to")?;
                for (k, v) in caps {
                    write!(f, " {k}={v}")?;
                }
                Ok(())
            }
        }
    }
}
