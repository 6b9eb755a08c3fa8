//! Sets of indices: a pre-ordered carrier `I`, a filter base of accuracy
//! classes containing `I`, and strictly down-directed tails `A_{<=e}`.
//!
//! Four instances are provided:
//!
//! | kind       | points                   | classes                 | gauge                    |
//! |------------|--------------------------|-------------------------|--------------------------|
//! | `special`  | `r in (0,1]`             | tails `(0, e0]`         | `r`                      |
//! | `full`     | `r ⊙ phi`, `∫phi = 1`    | moment classes `A_q`    | `min(1, r diam supp phi)`|
//! | `nsa-base` | test functions `phi`     | diameter classes `D_n`  | `min(1, diam supp phi)`  |
//! | `trivial`  | pairs `(r, tag)`         | `I_q` by tag order      | `r`                      |
//!
//! All values are immutable; instances are `Send + Sync`.

mod config;
mod full;
mod nsa;
mod sequences;
mod special;
mod trivial;
mod validate;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::testfn::{TestFnError, TestFunction, MAX_MOLLIFIER_ORDER, MOMENT_RESIDUAL_TOL};

pub use config::IndexConfig;
pub use full::FullIndex;
pub use nsa::NsaIndex;
pub use sequences::{extract_decreasing, tends_to_emptyset, GAUGE_FLOOR, PROBE_LEN};
pub use special::SpecialIndex;
pub use trivial::{TrivialIndex, TrivialTag};
pub use validate::{validate_index_set, Clause, ClauseResult, ValidationReport, DEFAULT_BUDGET};

/// Deterministic generator used by every sampler in the crate.
pub type IndexRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("index kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: IndexKind,
        found: IndexKind,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported for this instance: {0}")]
    Unsupported(String),
    #[error("mollifier must have unit mass, got {0}")]
    NotUnitMass(f64),
    #[error(transparent)]
    TestFn(#[from] TestFnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexKind {
    Special,
    Full,
    NsaBase,
    Trivial,
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexKind::Special => "special",
            IndexKind::Full => "full",
            IndexKind::NsaBase => "nsa-base",
            IndexKind::Trivial => "trivial",
        })
    }
}

impl FromStr for IndexKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "special" => Ok(IndexKind::Special),
            "full" => Ok(IndexKind::Full),
            "nsa-base" | "nsa" => Ok(IndexKind::NsaBase),
            "trivial" => Ok(IndexKind::Trivial),
            other => Err(format!("unknown index kind `{other}`")),
        }
    }
}

/// A unit-mass profile together with its vanishing-moment order, shared by
/// every full-instance point built on it.
#[derive(Debug)]
pub struct MollifierProfile {
    function: TestFunction,
    order: u32,
}

#[derive(Debug, Clone)]
pub struct Mollifier(Arc<MollifierProfile>);

impl Mollifier {
    pub fn new(function: TestFunction) -> Result<Self, IndexError> {
        let order = function
            .vanishing_order(MAX_MOLLIFIER_ORDER, MOMENT_RESIDUAL_TOL)
            .ok_or(IndexError::NotUnitMass(function.mass()))?;
        Ok(Mollifier(Arc::new(MollifierProfile { function, order })))
    }

    pub fn standard() -> Self {
        Self::new(TestFunction::standard_mollifier()).expect("standard bump has unit mass")
    }

    pub fn function(&self) -> &TestFunction {
        &self.0.function
    }

    /// Largest `q` (up to the configured maximum) with the profile in `A_q`.
    pub fn order(&self) -> u32 {
        self.0.order
    }

    /// `lambda` with `self = lambda ⊙ other` as closed forms.
    pub fn dilation_ratio(&self, other: &Mollifier) -> Option<f64> {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Some(1.0);
        }
        self.0.function.dilation_ratio(&other.0.function)
    }

    /// The same profile rescaled to unit support diameter.
    pub fn unit_diameter_profile(&self) -> TestFunction {
        let d = self.0.function.diam_supp();
        self.0
            .function
            .scale(1.0 / d)
            .expect("profiles have positive diameter")
    }
}

impl PartialEq for Mollifier {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.function == other.0.function
    }
}

#[derive(Debug, Clone)]
pub enum IndexPoint {
    Special(f64),
    Full { scale: f64, mollifier: Mollifier },
    NsaBase(Arc<TestFunction>),
    Trivial { r: f64, tag: TrivialTag },
}

impl IndexPoint {
    pub fn kind(&self) -> IndexKind {
        match self {
            IndexPoint::Special(_) => IndexKind::Special,
            IndexPoint::Full { .. } => IndexKind::Full,
            IndexPoint::NsaBase(_) => IndexKind::NsaBase,
            IndexPoint::Trivial { .. } => IndexKind::Trivial,
        }
    }

    /// The point `t` times finer along its own ray (`0 < t`).
    pub fn shrink(&self, t: f64) -> IndexPoint {
        match self {
            IndexPoint::Special(r) => IndexPoint::Special(r * t),
            IndexPoint::Full { scale, mollifier } => IndexPoint::Full {
                scale: scale * t,
                mollifier: mollifier.clone(),
            },
            IndexPoint::NsaBase(phi) => {
                IndexPoint::NsaBase(Arc::new(phi.scale(t).expect("shrink factor is positive")))
            }
            IndexPoint::Trivial { r, tag } => IndexPoint::Trivial {
                r: r * t,
                tag: *tag,
            },
        }
    }

    /// The test function a full-instance point stands for, `r ⊙ phi`.
    pub fn test_function(&self) -> Option<TestFunction> {
        match self {
            IndexPoint::Full { scale, mollifier } => mollifier.function().scale(*scale).ok(),
            IndexPoint::NsaBase(phi) => Some((**phi).clone()),
            _ => None,
        }
    }

    pub fn mollifier(&self) -> Option<&Mollifier> {
        match self {
            IndexPoint::Full { mollifier, .. } => Some(mollifier),
            _ => None,
        }
    }
}

impl fmt::Display for IndexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexPoint::Special(r) => write!(f, "{r}"),
            IndexPoint::Full { scale, mollifier } => {
                write!(f, "{scale} ⊙ {}", mollifier.function())
            }
            IndexPoint::NsaBase(phi) => write!(f, "{phi}"),
            IndexPoint::Trivial { r, tag } => write!(f, "({r}, #{}/q{})", tag.id, tag.order),
        }
    }
}

/// An accuracy class of a filter base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FilterClass {
    /// `(0, e0]` in the special instance.
    Tail(f64),
    /// `A_q`: unit mass, moments `1..=q` vanish.
    Moments(u32),
    /// `D_n`: gauge at most `1/n` (`D_0` is the carrier).
    Diameter(u32),
    /// `I_q`: trivial-instance points whose tag has order at least `q`.
    TagOrder(u32),
}

impl fmt::Display for FilterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterClass::Tail(e) => write!(f, "(0, {e}]"),
            FilterClass::Moments(q) => write!(f, "A_{q}"),
            FilterClass::Diameter(n) => write!(f, "D_{n}"),
            FilterClass::TagOrder(q) => write!(f, "I_{q}"),
        }
    }
}

/// A sequence in `A_{<=a}` meant to tend to the empty set.
#[derive(Debug, Clone)]
pub struct NullSequence {
    pub points: Vec<IndexPoint>,
    pub class: FilterClass,
    pub anchor: IndexPoint,
}

impl NullSequence {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn gauges(&self, set: &dyn IndexSet) -> Vec<f64> {
        self.points.iter().map(|p| set.underline(p)).collect()
    }
}

/// The set-of-indices contract.
pub trait IndexSet: fmt::Debug + Send + Sync {
    fn kind(&self) -> IndexKind;

    /// The pre-order `i <= j`.
    fn leq(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError>;

    /// Identity of points (not the pre-order's symmetric part).
    fn same(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError>;

    /// `i < j`, i.e. `i <= j` and `i != j`.
    fn lt(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError> {
        Ok(self.leq(i, j)? && !self.same(i, j)?)
    }

    fn contains(&self, class: &FilterClass, point: &IndexPoint) -> bool;

    /// The carrier as a class of the filter base.
    fn whole(&self) -> FilterClass;

    /// The first `limit` classes of the (possibly infinite) filter base.
    fn filter_base(&self, limit: usize) -> Vec<FilterClass>;

    /// A class contained in both arguments.
    fn refine(&self, a: &FilterClass, b: &FilterClass) -> Result<FilterClass, IndexError>;

    /// Structural inclusion `a ⊆ b` of classes.
    fn class_subset(&self, a: &FilterClass, b: &FilterClass) -> bool;

    /// A `d in A_{<=e}` with `d < b` and `d < c`.
    fn down_witness(
        &self,
        b: &IndexPoint,
        c: &IndexPoint,
        class: &FilterClass,
        e: &IndexPoint,
    ) -> Result<IndexPoint, IndexError>;

    /// The gauge, in `(0, 1]`.
    fn underline(&self, i: &IndexPoint) -> f64;

    fn sample_point(&self, rng: &mut IndexRng) -> IndexPoint;

    fn sample_class(&self, rng: &mut IndexRng) -> FilterClass;

    /// Some member of the class, `None` when it is empty.
    fn class_witness(&self, class: &FilterClass) -> Option<IndexPoint>;

    /// A random member of the class.
    fn sample_member(&self, class: &FilterClass, rng: &mut IndexRng) -> Option<IndexPoint>;

    /// A random member of `A_{<=e}`, `None` when that set is empty.
    fn sample_member_below(
        &self,
        class: &FilterClass,
        e: &IndexPoint,
        rng: &mut IndexRng,
    ) -> Option<IndexPoint>;

    /// A point of `A_{<=a}` with gauge (approximately) `gauge`, for realizing
    /// gauge thresholds as index points.
    fn point_with_gauge(
        &self,
        class: &FilterClass,
        anchor: &IndexPoint,
        gauge: f64,
    ) -> Result<IndexPoint, IndexError> {
        self.check_member(class, anchor)?;
        let mut p = anchor.clone();
        // a clamped gauge can hide part of the scale, hence the loop
        for _ in 0..64 {
            let g = self.underline(&p);
            if g <= gauge * (1.0 + 1e-12) {
                break;
            }
            p = p.shrink(gauge / g);
        }
        Ok(p)
    }

    /// `z_k = 2^{-k}`-refinements of the anchor inside `A_{<=a}`.
    fn probe(
        &self,
        class: &FilterClass,
        anchor: &IndexPoint,
        len: usize,
    ) -> Result<NullSequence, IndexError> {
        self.check_member(class, anchor)?;
        let points = (0..len)
            .map(|k| anchor.shrink((-(k as f64)).exp2()))
            .collect();
        Ok(NullSequence {
            points,
            class: *class,
            anchor: anchor.clone(),
        })
    }

    /// The full instance behind this set, when it is one.
    fn as_full(&self) -> Option<&FullIndex> {
        None
    }

    fn check_kind(&self, p: &IndexPoint) -> Result<(), IndexError> {
        if p.kind() != self.kind() {
            return Err(IndexError::KindMismatch {
                expected: self.kind(),
                found: p.kind(),
            });
        }
        Ok(())
    }

    fn check_member(&self, class: &FilterClass, p: &IndexPoint) -> Result<(), IndexError> {
        self.check_kind(p)?;
        if !self.contains(class, p) {
            return Err(IndexError::Precondition(format!("{p} is not in {class}")));
        }
        Ok(())
    }
}

/// The default anchor of an instance: the coarsest standard point.
pub fn default_anchor(set: &dyn IndexSet) -> IndexPoint {
    set.class_witness(&set.whole())
        .expect("the carrier of an index set is non-empty")
}

pub(crate) fn log_uniform(rng: &mut IndexRng, lo: f64, hi: f64) -> f64 {
    use rand::Rng;
    let t: f64 = rng.random();
    (lo.ln() + t * (hi.ln() - lo.ln())).exp()
}
