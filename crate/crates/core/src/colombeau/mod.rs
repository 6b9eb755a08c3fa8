//! Colombeau generalized functions in one variable, at desk scale.
//!
//! Representatives are [`RepNet`]s: finite sums of atoms
//! `u^p * P(x) * K[id, j]((x - a)/u^s) * ...` with `u` the gauge. The class is
//! closed under sums, products and `d/dx`, and every member is moderate, so the
//! interesting questions are the growth order `N` (moderateness), decay to all
//! orders (negligibility) and equality in the quotient. Each is answered twice:
//! by exponent bookkeeping on the atoms and numerically along dyadic probes.
//!
//! Generalized numbers and points are [`GenNumber`] and [`GenPoint`]; the point-value
//! characterization `u = 0` iff `u(x) = 0` at every compactly supported
//! generalized point is exercised by [`zero_test_by_points`].

mod analysis;
mod moderate;
mod negligible;
mod parse;
mod points;
mod repnet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigo::BigOError;
use crate::exec::Exec;
use crate::index::{IndexError, IndexKind, IndexSet};

pub use analysis::{growth_exponent, order_from_exponent, sup_on_k};
pub use moderate::{full_forms, is_moderate, FullForms, ModerateEntry, ModerateVerdict, ProbeRow};
pub use negligible::{
    gen_equal, interpolation_check, is_negligible, Interpolation, NegligibleEntry,
    NegligibleVerdict,
};
pub use parse::{parse_repnet, RepParseError};
pub use points::{
    eval_at, forall_small, make_gen_point, zero_test_by_points, ForallVerdict, GenNumber, GenPoint,
    PointNet, PointValue, ZeroTest, ZeroWitness,
};
pub use repnet::{
    embed_delta, embed_heaviside, embed_smooth, rep_add, rep_derive, rep_mul, Atom, EvalCtx,
    Kernel, KernelFactor, Poly, RepNet,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ColombeauError {
    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(Interval, Interval),
    #[error("K = [{}, {}] is not a compact subset of {omega}", k.0, k.1)]
    NotCompactIn { k: (f64, f64), omega: Interval },
    #[error("K = [{}, {}] leaves the shrunken domain {omega_eps} at eps = {eps}", k.0, k.1)]
    DomainShrink {
        eps: String,
        k: (f64, f64),
        omega_eps: Interval,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not moderate: {0}")]
    NotModerate(String),
    #[error("no compact-support certificate: {0}")]
    NoCompactSupport(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),
    #[error(transparent)]
    Parse(#[from] RepParseError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    BigO(#[from] BigOError),
}

/// An open interval `(lo, hi)`, possibly unbounded; empty when `lo >= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// Whether the closed interval `k` is a compact subset.
    pub fn contains_compact(&self, k: (f64, f64)) -> bool {
        k.0.is_finite() && k.1.is_finite() && k.0 <= k.1 && self.lo < k.0 && k.1 < self.hi
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "({}, {})", self.lo, self.hi)
        }
    }
}

impl std::str::FromStr for Interval {
    type Err = String;

    /// `(lo, hi)` with `inf`/`-inf` allowed, or `R` for the real line.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "R" || t == "ℝ" {
            return Ok(Interval::REAL_LINE);
        }
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("expected `(lo, hi)`, got `{s}`"))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| format!("expected `(lo, hi)`, got `{s}`"))?;
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid bound `{}`", v.trim()))
        };
        let iv = Interval::new(num(a)?, num(b)?);
        if iv.is_empty() {
            return Err(format!("empty interval `{s}`"));
        }
        Ok(iv)
    }
}

/// `K_m = [-m, m] ∩ [lo + 1/(m+2), hi - 1/(m+2)]` for `m = 1..=count`,
/// skipping empty members.
pub fn exhaustion(omega: &Interval, count: usize) -> Vec<(f64, f64)> {
    (1..=count)
        .filter_map(|m| {
            let (mf, margin) = (m as f64, 1.0 / (m as f64 + 2.0));
            let lo = (-mf).max(omega.lo + margin);
            let hi = mf.min(omega.hi - margin);
            (lo <= hi).then_some((lo, hi))
        })
        .collect()
}

/// Probe and tolerance settings shared by the generalized-function tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    /// Highest derivative order probed for moderateness.
    pub alpha_max: u32,
    /// Slope fits use the probe `z_k = 2^{-k}` for `kmin <= k <= kmax`.
    pub kmin: u32,
    pub kmax: u32,
    /// Allowed gap between the fitted and the bookkept exponent.
    pub tol: f64,
    /// Negligibility is probed for `O(u^m)`, `m <= m_max`.
    pub m_max: u32,
    /// Number of members of the compact exhaustion.
    pub exhaustion: usize,
    /// Largest moment class used by the full-instance quantifier forms.
    pub q_max: u32,
    /// Tail length for "sufficiently small" verdicts.
    pub tail: usize,
    /// Classes and anchors per class used by "sufficiently small" verdicts.
    pub classes: usize,
    pub anchors: usize,
    /// Exponent `m` of the `u^m` perturbation in the well-definedness check.
    pub perturb: i64,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            alpha_max: 3,
            kmin: 8,
            kmax: 20,
            tol: 0.25,
            m_max: 4,
            exhaustion: 2,
            q_max: 4,
            tail: 20,
            classes: 4,
            anchors: 4,
            perturb: 10,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

pub(crate) fn check_supported(set: &dyn IndexSet) -> Result<(), ColombeauError> {
    if set.kind() == IndexKind::Trivial {
        return Err(ColombeauError::Unsupported(
            "generalized functions need the special, full or nsa-base instance".into(),
        ));
    }
    Ok(())
}
