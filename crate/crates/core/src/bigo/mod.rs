//! Generalized big-O over a set of indices.
//!
//! `x = O_{a,A}(y)` means `∃H>0 ∃eps0 ∈ A_{<=a} ∀eps ∈ A_{<=eps0}: |x_eps| <= H|y_eps|`.
//! Nets that are power-log expressions in the gauge are decided exactly
//! ([`bigo_symbolic`]); arbitrary nets are sampled along null sequences
//! ([`bigo_pointwise`]) and may come back indeterminate.

mod laws;
mod net;
mod parse;
mod sampled;
mod symbolic;
mod uniform;

use serde::Serialize;
use thiserror::Error;

use crate::index::{default_anchor, FilterClass, IndexError, IndexPoint, IndexSet, NullSequence};

pub use laws::{
    bounded_net, law_suite, random_net, Family, Law, LawReport, LawResult, LawSuiteConfig,
    NegativeControl,
};
pub use net::{leading_pair, Expr, LogNum, Monomial, SymbolicNet};
pub use parse::{parse_net, ParseError};
pub use sampled::{bigo_oj, bigo_pointwise, Net, SampledNet};
pub use symbolic::{bigo_symbolic, SCAN_OCTAVES};
pub use uniform::{bigo_uniform, sup_abs, ParamNet, SupEstimate, GRID_POINTS};

/// The constants `H` tried by the sampled engine.
pub const H_DECADES: [f64; 7] = [1.0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BigOError {
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Holds,
    Fails,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Symbolic,
    Sampled,
    Uniform,
}

/// `(H, eps0)` with `|x| <= H|y|` on `A_{<=eps0}`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub h: f64,
    pub eps0: IndexPoint,
    pub gauge: f64,
}

/// A null sequence along which `|x| > H|y|`, with the ratio
/// `|x| / (H|y|)` at each term.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub h: f64,
    pub sequence: NullSequence,
    pub margins: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub decision: Decision,
    pub mode: Mode,
    pub witness: Option<Witness>,
    /// One certificate per refuted `H`.
    pub counterexample: Vec<Certificate>,
    /// The accuracy class the verdict was obtained in.
    pub class: Option<FilterClass>,
    pub note: Option<String>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.decision == Decision::Holds
    }

    pub fn fails(&self) -> bool {
        self.decision == Decision::Fails
    }

    pub fn is_decided(&self) -> bool {
        self.decision != Decision::Indeterminate
    }

    fn indeterminate(mode: Mode, class: Option<FilterClass>, note: String) -> Self {
        Verdict {
            decision: Decision::Indeterminate,
            mode,
            witness: None,
            counterexample: Vec::new(),
            class,
            note: Some(note),
        }
    }
}

/// Where an anchored verdict is realized: an index set, a class `A` and an
/// anchor `a ∈ A`.
#[derive(Debug, Clone)]
pub struct Ambient<'a> {
    pub set: &'a dyn IndexSet,
    pub class: FilterClass,
    pub anchor: IndexPoint,
}

impl<'a> Ambient<'a> {
    /// The carrier as class, anchored at the instance's default point.
    pub fn new(set: &'a dyn IndexSet) -> Self {
        Ambient {
            set,
            class: set.whole(),
            anchor: default_anchor(set),
        }
    }

    pub fn with(
        set: &'a dyn IndexSet,
        class: FilterClass,
        anchor: IndexPoint,
    ) -> Result<Self, BigOError> {
        set.check_member(&class, &anchor)?;
        Ok(Ambient { set, class, anchor })
    }

    pub fn point(&self, gauge: f64) -> Result<IndexPoint, BigOError> {
        Ok(self
            .set
            .point_with_gauge(&self.class, &self.anchor, gauge)?)
    }
}
