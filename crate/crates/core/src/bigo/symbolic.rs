//! Exact big-O on power-log nets by leading-term comparison.

use std::cmp::Ordering;
use std::f64::consts::LN_2;

use num_traits::ToPrimitive;

use super::net::{Scaled, SymbolicNet};
use super::{Ambient, BigOError, Certificate, Decision, Mode, Verdict, Witness, H_DECADES};
use crate::index::NullSequence;

/// Witness thresholds are proved down to `u = 2^{-SCAN_OCTAVES}`.
pub const SCAN_OCTAVES: usize = 200;
/// Counterexample sequences are searched down to `2^{-CERT_OCTAVES}`, the
/// smallest dyadic gauges that stay normal doubles.
const CERT_OCTAVES: usize = 1000;
const CERT_LEN: usize = 40;
/// The nets may be singular at `u = 1`; thresholds start just below it.
const T_START: f64 = LN_2 / 16.0;
/// A bad cell among the last octaves means the constant is too small.
const DEEP_OCTAVES: usize = 8;
const MIN_CELL: f64 = LN_2 / 4096.0;
const CELL_BUDGET: usize = 200_000;

/// `ln|x| - ln|y|` at `u = exp(-t)`; `-inf` when `x` vanishes, `+inf` when
/// only `y` does or the value is undefined.
fn log_ratio(x: &SymbolicNet, y: &SymbolicNet, t: f64) -> f64 {
    let (a, b) = (x.eval_log(t), y.eval_log(t));
    if a.is_zero() {
        return f64::NEG_INFINITY;
    }
    let r = a.log - b.log;
    if b.is_zero() || r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

/// The gauge-only part of a symbolic verdict, independent of `(a, A)`.
#[derive(Debug, Clone)]
pub(crate) enum Core {
    /// `|x| <= h|y|` for all scanned `t >= t0`.
    Holds {
        h: f64,
        t0: f64,
    },
    /// For each constant, the first octave `k` from which `|x| > h|y|` on
    /// every scanned octave (`None` when that happens only too deep).
    Fails {
        starts: Vec<(f64, Option<usize>)>,
    },
    Indeterminate,
}

pub(crate) fn decide(x: &SymbolicNet, y: &SymbolicNet) -> Core {
    let holds = match (x.leading(), y.leading()) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(mx), Some(my)) => mx.growth_cmp(my) != Ordering::Greater,
    };
    if holds {
        let mut h = match (x.leading(), y.leading()) {
            (Some(mx), Some(my)) => 2.0 * (mx.coef / my.coef).abs(),
            _ => 1.0,
        };
        for _ in 0..64 {
            if let Some(t0) = threshold(x, y, h) {
                return Core::Holds { h, t0 };
            }
            h *= 2.0;
        }
        return Core::Indeterminate;
    }
    let ratios: Vec<f64> = (0..=CERT_OCTAVES)
        .map(|k| log_ratio(x, y, k as f64 * LN_2))
        .collect();
    let starts = H_DECADES
        .iter()
        .map(|&h| {
            let ln_h = h.ln();
            let start = match ratios.iter().rposition(|&r| r <= ln_h) {
                None => 0,
                Some(k) => k + 1,
            };
            (h, (start + CERT_LEN <= CERT_OCTAVES + 1).then_some(start))
        })
        .collect();
    Core::Fails { starts }
}

/// Smallest `t0 >= T_START` such that `|x| <= h|y|` is proved on
/// `[t0, SCAN_OCTAVES · ln 2]` by interval enclosures of both trees, bisecting
/// from the deep end. `None` when an unproved cell lies among
/// the deepest octaves, i.e. `h` is too small.
fn threshold(x: &SymbolicNet, y: &SymbolicNet, h: f64) -> Option<f64> {
    let ln_h = h.ln();
    let mut budget = CELL_BUDGET;
    // both sides are scaled by the same positive monomial
    let shift = y
        .leading()
        .map(|m| (m.p.to_f64().unwrap_or(0.0), m.k))
        .unwrap_or((0.0, 0));
    let (Some(xs), Some(ys)) = (x.scaled(shift), y.scaled(shift)) else {
        return None;
    };
    let end = SCAN_OCTAVES as f64 * LN_2;
    if let Some(bad) = last_unproved(&xs, &ys, ln_h, T_START, end, &mut budget) {
        return (bad < (SCAN_OCTAVES - DEEP_OCTAVES) as f64 * LN_2).then_some(bad);
    }
    Some(T_START)
}

/// Right end of the rightmost cell of `[a, b]` on which the bound could not
/// be proved, bisecting down to `MIN_CELL`.
fn last_unproved(
    x: &Scaled,
    y: &Scaled,
    ln_h: f64,
    a: f64,
    b: f64,
    budget: &mut usize,
) -> Option<f64> {
    if *budget == 0 {
        return Some(b);
    }
    *budget -= 1;
    let proved = match (x.enclose(a, b), y.enclose(a, b)) {
        (Some(ex), Some(ey)) => {
            let sx = ex.sup_abs();
            sx == f64::NEG_INFINITY || sx <= ln_h + ey.inf_abs()
        }
        _ => false,
    };
    if proved {
        return None;
    }
    if b - a <= MIN_CELL {
        return Some(b);
    }
    let m = 0.5 * (a + b);
    last_unproved(x, y, ln_h, m, b, budget).or_else(|| last_unproved(x, y, ln_h, a, m, budget))
}

/// Decides `x = O(y)` as the gauge tends to 0: true iff the leading exponent
/// pair of `x` is dominated by that of `y`. Because only the gauge enters,
/// the verdict is the same for every `(a, A)`; the witness threshold and the
/// counterexample sequences are realized in `amb`.
pub fn bigo_symbolic(
    x: &SymbolicNet,
    y: &SymbolicNet,
    amb: &Ambient<'_>,
) -> Result<Verdict, BigOError> {
    realize(&decide(x, y), x, y, amb)
}

pub(crate) fn realize(
    core: &Core,
    x: &SymbolicNet,
    y: &SymbolicNet,
    amb: &Ambient<'_>,
) -> Result<Verdict, BigOError> {
    let set = amb.set;
    let t_min = -set.underline(&amb.anchor).ln();
    match core {
        Core::Holds { h, t0 } => {
            let eps0 = amb.point((-t0.max(t_min)).exp())?;
            Ok(Verdict {
                decision: Decision::Holds,
                mode: Mode::Symbolic,
                witness: Some(Witness {
                    h: *h,
                    gauge: set.underline(&eps0),
                    eps0,
                }),
                counterexample: Vec::new(),
                class: Some(amb.class),
                note: None,
            })
        }
        Core::Indeterminate => Ok(Verdict::indeterminate(
            Mode::Symbolic,
            Some(amb.class),
            "no witness threshold found in the scanned gauge range".into(),
        )),
        Core::Fails { starts } => {
            let k_min = (t_min / LN_2).ceil().max(0.0) as usize;
            let mut certs = Vec::new();
            let mut unreachable = Vec::new();
            for &(h, start) in starts {
                match start.map(|s| s.max(k_min)) {
                    Some(s) if s + CERT_LEN <= CERT_OCTAVES + 1 => {
                        certs.push(certificate(x, y, h, s, amb)?)
                    }
                    _ => unreachable.push(h),
                }
            }
            let note = (!unreachable.is_empty()).then(|| {
                format!(
                    "ratio exceeds H = {:?} only below the smallest representable gauge",
                    unreachable
                )
            });
            Ok(Verdict {
                decision: Decision::Fails,
                mode: Mode::Symbolic,
                witness: None,
                counterexample: certs,
                class: Some(amb.class),
                note,
            })
        }
    }
}

/// Dyadic gauges `2^{-k}`, `k >= start`, on which `|x| > H|y|` throughout.
fn certificate(
    x: &SymbolicNet,
    y: &SymbolicNet,
    h: f64,
    start: usize,
    amb: &Ambient<'_>,
) -> Result<Certificate, BigOError> {
    let ln_h = h.ln();
    let mut points = Vec::with_capacity(CERT_LEN);
    let mut margins = Vec::with_capacity(CERT_LEN);
    for k in start..start + CERT_LEN {
        let z = amb.point((-(k as f64)).exp2())?;
        let t = -amb.set.underline(&z).ln();
        points.push(z);
        margins.push((log_ratio(x, y, t) - ln_h).exp());
    }
    // dyadic gauges along one ray: consecutive strict decrease suffices
    for w in points.windows(2) {
        if !amb.set.lt(&w[1], &w[0])? {
            return Err(BigOError::Precondition(
                "dyadic gauges did not give a strictly decreasing sequence".into(),
            ));
        }
    }
    Ok(Certificate {
        h,
        sequence: NullSequence {
            points,
            class: amb.class,
            anchor: amb.anchor.clone(),
        },
        margins,
    })
}
