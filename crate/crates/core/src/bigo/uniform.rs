//! Uniform big-O over a compact parameter interval, via the sup-net
//! `eps ↦ sup_{t∈K} |x_eps(t)|`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::net::SymbolicNet;
use super::sampled::{bigo_pointwise, SampledNet};
use super::{BigOError, Mode, Verdict};
use crate::index::{FilterClass, IndexPoint, IndexSet, NullSequence};

/// Chebyshev points in the base grid.
pub const GRID_POINTS: usize = 257;
const REFINE_ROUNDS: usize = 48;
const DISAGREEMENT_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupEstimate {
    pub value: f64,
    pub argmax: f64,
    /// The maximum over the base grid (Chebyshev plus focus points).
    pub coarse: f64,
    /// Whether refinement moved the maximum by more than 1%.
    pub disagreement: bool,
}

/// `sup_{t∈[a,b]} |f(t)|` on Chebyshev points plus `focus`, refined around the
/// running maximum by repeated fourfold subdivision of its neighbouring cells.
pub fn sup_abs(f: &dyn Fn(f64) -> f64, k: (f64, f64), focus: &[f64]) -> SupEstimate {
    let (a, b) = k;
    if a == b {
        let v = f(a).abs();
        return SupEstimate {
            value: v,
            argmax: a,
            coarse: v,
            disagreement: false,
        };
    }
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut ts: Vec<f64> = (0..GRID_POINTS)
        .map(|j| mid - half * (PI * j as f64 / (GRID_POINTS - 1) as f64).cos())
        .collect();
    ts.extend(focus.iter().copied().filter(|t| (a..=b).contains(t)));
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let vals: Vec<f64> = ts.iter().map(|&t| f(t).abs()).collect();
    let (mut i_best, mut best) = (0, f64::NEG_INFINITY);
    for (i, &v) in vals.iter().enumerate() {
        if v > best || best.is_nan() {
            i_best = i;
            best = v;
        }
    }
    let coarse = best;
    let mut arg = ts[i_best];
    let mut lo = ts[i_best.saturating_sub(1)];
    let mut hi = ts[(i_best + 1).min(ts.len() - 1)];
    for _ in 0..REFINE_ROUNDS {
        if hi - lo <= 1e-14 * (b - a) {
            break;
        }
        let step = (hi - lo) / 8.0;
        let mut new_arg = arg;
        for j in 0..=8 {
            let t = lo + j as f64 * step;
            let v = f(t).abs();
            if v > best {
                best = v;
                new_arg = t;
            }
        }
        arg = new_arg;
        lo = (arg - step).max(a);
        hi = (arg + step).min(b);
    }
    let disagreement = best > coarse * (1.0 + DISAGREEMENT_TOL) + f64::MIN_POSITIVE;
    SupEstimate {
        value: best,
        argmax: arg,
        coarse,
        disagreement,
    }
}

type ParamFn = dyn Fn(&dyn IndexSet, &IndexPoint, f64) -> f64 + Send + Sync;
type FocusFn = dyn Fn(&dyn IndexSet, &IndexPoint) -> Vec<f64> + Send + Sync;

/// A net of functions `t ↦ x_eps(t)` on a parameter interval, with optional
/// per-index focus points where narrow features sit.
#[derive(Clone)]
pub struct ParamNet {
    label: String,
    f: Arc<ParamFn>,
    focus: Option<Arc<FocusFn>>,
}

impl ParamNet {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&dyn IndexSet, &IndexPoint, f64) -> f64 + Send + Sync + 'static,
    {
        ParamNet {
            label: label.into(),
            f: Arc::new(f),
            focus: None,
        }
    }

    pub fn with_focus<G>(mut self, g: G) -> Self
    where
        G: Fn(&dyn IndexSet, &IndexPoint) -> Vec<f64> + Send + Sync + 'static,
    {
        self.focus = Some(Arc::new(g));
        self
    }

    pub fn eval(&self, set: &dyn IndexSet, p: &IndexPoint, t: f64) -> f64 {
        (self.f)(set, p, t)
    }

    pub fn sup(&self, set: &dyn IndexSet, p: &IndexPoint, k: (f64, f64)) -> SupEstimate {
        let focus = self.focus.as_ref().map(|g| g(set, p)).unwrap_or_default();
        sup_abs(&|t| self.eval(set, p, t), k, &focus)
    }

    /// The sup-net `eps ↦ sup_K |x_eps|` as a sampled net.
    pub fn sup_net(&self, k: (f64, f64)) -> SampledNet {
        let me = self.clone();
        SampledNet::new(format!("sup_K |{}|", self.label), move |s, p| {
            me.sup(s, p, k).value
        })
    }
}

impl fmt::Debug for ParamNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamNet({})", self.label)
    }
}

/// `x = O^K_{a,A}(y)` for a gauge net `y`: one `(H, eps0)` for all `t ∈ K`,
/// decided on the sup-net. A refinement disagreement on any probe term makes
/// the verdict indeterminate.
pub fn bigo_uniform(
    x: &ParamNet,
    y: &SymbolicNet,
    k: (f64, f64),
    class: &FilterClass,
    anchor: &IndexPoint,
    probe: &NullSequence,
    set: &dyn IndexSet,
) -> Result<Verdict, BigOError> {
    if !(k.0 <= k.1) || !k.0.is_finite() || !k.1.is_finite() {
        return Err(BigOError::Precondition(format!(
            "K = [{}, {}] is not a closed bounded interval",
            k.0, k.1
        )));
    }
    for p in &probe.points {
        let s = x.sup(set, p, k);
        if s.disagreement {
            return Ok(Verdict::indeterminate(
                Mode::Uniform,
                Some(*class),
                format!(
                    "grid refinement moved the sup from {} to {} at gauge {}",
                    s.coarse,
                    s.value,
                    set.underline(p)
                ),
            ));
        }
    }
    let sup = x.sup_net(k);
    let yy = SampledNet::from_symbolic(y);
    let mut v = bigo_pointwise(&sup, &yy, class, anchor, probe, set)?;
    v.mode = Mode::Uniform;
    Ok(v)
}
