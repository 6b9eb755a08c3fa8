use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    FullIndex, IndexError, IndexKind, IndexSet, Mollifier, NsaIndex, SpecialIndex, TrivialIndex,
};
use crate::testfn::{make_aq, TestFunction};

/// Serializable choice of index set: a kind plus its parameters.
///
/// Full-instance profiles are named `std-bump`, `aq<q>` (unit radius, moments
/// `1..=q` vanish) or given as a `bump(c, r; p0, p1, ...)` literal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IndexConfig {
    Special,
    Full {
        #[serde(default = "one")]
        dim: u32,
        #[serde(default = "std_bump")]
        profile: String,
    },
    NsaBase,
    Trivial {
        #[serde(default = "twelve")]
        tags: u64,
        #[serde(default = "five")]
        max_order: u32,
    },
}

fn one() -> u32 {
    1
}
fn std_bump() -> String {
    "std-bump".into()
}
fn twelve() -> u64 {
    12
}
fn five() -> u32 {
    5
}

impl IndexConfig {
    pub fn default_for(kind: IndexKind) -> Self {
        match kind {
            IndexKind::Special => IndexConfig::Special,
            IndexKind::Full => IndexConfig::Full {
                dim: 1,
                profile: std_bump(),
            },
            IndexKind::NsaBase => IndexConfig::NsaBase,
            IndexKind::Trivial => IndexConfig::Trivial {
                tags: 12,
                max_order: 5,
            },
        }
    }

    pub fn kind(&self) -> IndexKind {
        match self {
            IndexConfig::Special => IndexKind::Special,
            IndexConfig::Full { .. } => IndexKind::Full,
            IndexConfig::NsaBase => IndexKind::NsaBase,
            IndexConfig::Trivial { .. } => IndexKind::Trivial,
        }
    }

    pub fn build(&self) -> Result<Arc<dyn IndexSet>, IndexError> {
        Ok(match self {
            IndexConfig::Special => Arc::new(SpecialIndex),
            IndexConfig::Full { dim, profile } => {
                if *dim != 1 {
                    return Err(IndexError::Unsupported(format!(
                        "only dimension 1 is implemented, got {dim}"
                    )));
                }
                Arc::new(FullIndex::with_profile(parse_profile(profile)?))
            }
            IndexConfig::NsaBase => Arc::new(NsaIndex),
            IndexConfig::Trivial { tags, max_order } => {
                Arc::new(TrivialIndex::new(*tags, *max_order))
            }
        })
    }
}

fn parse_profile(name: &str) -> Result<Mollifier, IndexError> {
    let name = name.trim();
    if name == "std-bump" || name == "std" {
        return Ok(Mollifier::standard());
    }
    if let Some(q) = name.strip_prefix("aq").and_then(|q| q.parse::<u32>().ok()) {
        return Mollifier::new(make_aq(q, 1.0)?);
    }
    let phi: TestFunction = name.parse()?;
    Mollifier::new(phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_each_kind() {
        for kind in [
            IndexKind::Special,
            IndexKind::Full,
            IndexKind::NsaBase,
            IndexKind::Trivial,
        ] {
            assert_eq!(IndexConfig::default_for(kind).build().unwrap().kind(), kind);
        }
        let aq = IndexConfig::Full {
            dim: 1,
            profile: "aq2".into(),
        };
        assert!(aq.build().is_ok());
        let bad = IndexConfig::Full {
            dim: 2,
            profile: std_bump(),
        };
        assert!(bad.build().is_err());
    }
}
