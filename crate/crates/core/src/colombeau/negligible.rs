//! Negligibility and equality in the quotient.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::analysis::{growth_exponent, sup_on_k, sup_with_ctx};
use super::moderate::is_moderate;
use super::repnet::{EvalCtx, RepNet};
use super::{check_supported, exhaustion, ColombeauError, GenConfig};
use crate::bigo::{bigo_pointwise, Certificate, Decision, SampledNet, SymbolicNet};
use crate::index::{default_anchor, IndexPoint, IndexSet, PROBE_LEN};

/// `sup_K |u_eps| = O(u^m)` at one `(K, m)`.
#[derive(Debug, Clone)]
pub struct NegligibleEntry {
    pub k: (f64, f64),
    pub m: u32,
    /// The sampled verdict along the probe.
    pub decision: Decision,
    /// What the exponent bookkeeping predicts.
    pub bookkept: bool,
    /// One certificate per refuted constant when the bound fails.
    pub certificates: Vec<Certificate>,
}

#[derive(Debug, Clone)]
pub struct NegligibleVerdict {
    pub decision: Decision,
    /// The moderateness order at `alpha = 0`.
    pub moderate_n: Option<u32>,
    pub entries: Vec<NegligibleEntry>,
    /// For negligible nets: whether the first derivative also decays to the
    /// probed order, as the interpolation argument guarantees.
    pub derivative_decay: Option<bool>,
    pub note: Option<String>,
}

impl NegligibleVerdict {
    pub fn holds(&self) -> bool {
        self.decision == Decision::Holds
    }

    /// The first refuted bound, with its certificates.
    pub fn counterexample(&self) -> Option<&NegligibleEntry> {
        self.entries.iter().find(|e| e.decision == Decision::Fails)
    }
}

/// `eps ↦ sup_K |u_eps|` with the probe terms precomputed.
fn sup_net(
    u: &RepNet,
    k: (f64, f64),
    set: &dyn IndexSet,
    points: &[IndexPoint],
    cfg: &GenConfig,
) -> Result<SampledNet, ColombeauError> {
    let sups = cfg.exec.map(points, |p| sup_on_k(u, k, 0, set, p));
    let mut cache = HashMap::with_capacity(points.len());
    for (p, s) in points.iter().zip(sups) {
        cache.insert(set.underline(p).to_bits(), s?.value);
    }
    let cache = Arc::new(Mutex::new(cache));
    let u = u.clone();
    Ok(SampledNet::new(
        format!("sup_[{}, {}] |u|", k.0, k.1),
        move |s, p| {
            let key = s.underline(p).to_bits();
            if let Some(v) = cache.lock().expect("cache lock").get(&key) {
                return *v;
            }
            // beyond the precomputed probe a domain error reads as a violation
            let v = sup_on_k(&u, k, 0, s, p).map_or(f64::NAN, |e| e.value);
            cache.lock().expect("cache lock").insert(key, v);
            v
        },
    ))
}

/// `u ∈ N`: `sup_K |u_eps| = O(u^m)` for every `K` of the exhaustion and
/// `m <= m_max`, tested on the function values only; moderateness is checked
/// first. Sampled verdicts along the default probe are compared with the
/// exponent bookkeeping; a mismatch is indeterminate.
pub fn is_negligible(
    u: &RepNet,
    set: &dyn IndexSet,
    cfg: &GenConfig,
) -> Result<NegligibleVerdict, ColombeauError> {
    check_supported(set)?;
    let moderate = is_moderate(u, set, cfg)?;
    if !moderate.holds() {
        let bad = moderate
            .entries
            .iter()
            .find(|e| !e.agree)
            .map(|e| {
                format!(
                    "tracks disagree on K = [{}, {}] at alpha = {}",
                    e.k.0, e.k.1, e.alpha
                )
            })
            .unwrap_or_default();
        return Err(ColombeauError::NotModerate(bad));
    }
    let moderate_n = moderate.n(0);
    if u.is_zero() {
        return Ok(NegligibleVerdict {
            decision: Decision::Holds,
            moderate_n,
            entries: Vec::new(),
            derivative_decay: Some(true),
            note: Some("zero normal form".into()),
        });
    }
    let whole = set.whole();
    let anchor = default_anchor(set);
    let probe = set.probe(&whole, &anchor, PROBE_LEN)?;
    let ctx = EvalCtx::new(set, &anchor)?;
    let ks = exhaustion(&u.domain(), cfg.exhaustion);
    let mut entries = Vec::new();
    for &k in &ks {
        let e0 = growth_exponent(u, k, 0, &ctx);
        let sup = sup_net(u, k, set, &probe.points, cfg)?;
        for m in 0..=cfg.m_max {
            let y = SampledNet::from_symbolic(&SymbolicNet::gauge_pow(m as i64));
            let v = bigo_pointwise(&sup, &y, &whole, &anchor, &probe, set)?;
            let fails = v.fails();
            entries.push(NegligibleEntry {
                k,
                m,
                decision: v.decision,
                bookkept: e0.is_none_or(|e| e <= -(m as f64) + 1e-9),
                certificates: v.counterexample,
            });
            if fails {
                break;
            }
        }
    }
    let consistent = entries.iter().all(|e| {
        e.decision != Decision::Indeterminate && e.bookkept == (e.decision == Decision::Holds)
    });
    let decision = if !consistent {
        Decision::Indeterminate
    } else if entries.iter().any(|e| e.decision == Decision::Fails) {
        Decision::Fails
    } else {
        Decision::Holds
    };
    let derivative_decay = (decision == Decision::Holds).then(|| {
        ks.iter().all(|&k| {
            growth_exponent(u, k, 1, &ctx).is_none_or(|e| e <= -(cfg.m_max as f64) + 1e-9)
        })
    });
    let note = (!consistent).then(|| "sampled and bookkept verdicts disagree".to_string());
    Ok(NegligibleVerdict {
        decision,
        moderate_n,
        entries,
        derivative_decay,
        note,
    })
}

/// `[u] = [v]`: both moderate and `u - v` negligible.
pub fn gen_equal(
    u: &RepNet,
    v: &RepNet,
    set: &dyn IndexSet,
    cfg: &GenConfig,
) -> Result<NegligibleVerdict, ColombeauError> {
    for w in [u, v] {
        if !is_moderate(w, set, cfg)?.holds() {
            return Err(ColombeauError::NotModerate(format!("{w}")));
        }
    }
    is_negligible(&u.sub(v)?, set, cfg)
}

/// The difference-quotient identity
/// `u'(x) = (u(x+h) - u(x))/h - u''(x_θ) h / 2` with `h = u^{order}` at one
/// index point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interpolation {
    pub h: f64,
    pub derivative: f64,
    pub difference_quotient: f64,
    /// `sup_{[x, x+h]} |u''| h / 2`.
    pub remainder_bound: f64,
    /// Floating-point error allowance of the difference quotient.
    pub rounding: f64,
    pub holds: bool,
}

pub fn interpolation_check(
    u: &RepNet,
    set: &dyn IndexSet,
    eps: &IndexPoint,
    x: f64,
    order: f64,
) -> Result<Interpolation, ColombeauError> {
    u.check_order(2)?;
    let ctx = EvalCtx::new(set, eps)?;
    let h = ctx.gauge.powf(order);
    let (u0, u1) = (u.eval(&ctx, x, 0), u.eval(&ctx, x + h, 0));
    let derivative = u.eval(&ctx, x, 1);
    let difference_quotient = (u1 - u0) / h;
    let remainder_bound = 0.5 * sup_with_ctx(u, (x, x + h), 2, &ctx).value * h;
    let rounding =
        8.0 * f64::EPSILON * (u0.abs() + u1.abs()) / h + 8.0 * f64::EPSILON * derivative.abs();
    let holds =
        (derivative - difference_quotient).abs() <= remainder_bound * (1.0 + 1e-6) + rounding;
    Ok(Interpolation {
        h,
        derivative,
        difference_quotient,
        remainder_bound,
        rounding,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colombeau::{embed_delta, embed_smooth, Interval, Poly};
    use crate::exec::Exec;
    use crate::index::SpecialIndex;
    use crate::testfn::TestFunction;
    use num_rational::Rational64;

    fn cfg() -> GenConfig {
        GenConfig {
            exec: Exec::Sequential,
            ..GenConfig::default()
        }
    }

    fn delta() -> RepNet {
        embed_delta(&TestFunction::standard_mollifier(), Interval::REAL_LINE).unwrap()
    }

    #[test]
    fn high_gauge_power_is_negligible() {
        let x = embed_smooth(Poly::monomial(1.0, 1), Interval::REAL_LINE);
        let u = RepNet::gauge_power(Rational64::from_integer(10), Interval::REAL_LINE)
            .mul(&x)
            .unwrap();
        let v = is_negligible(&u, &SpecialIndex, &cfg()).unwrap();
        assert!(v.holds(), "{v:?}");
        assert_eq!(v.derivative_decay, Some(true));
    }

    #[test]
    fn delta_and_x_delta_are_not_negligible() {
        let d = delta();
        let v = is_negligible(&d, &SpecialIndex, &cfg()).unwrap();
        assert_eq!(v.decision, Decision::Fails);
        assert_eq!(v.counterexample().unwrap().m, 0);
        let x = embed_smooth(Poly::monomial(1.0, 1), Interval::REAL_LINE);
        let v = is_negligible(&x.mul(&d).unwrap(), &SpecialIndex, &cfg()).unwrap();
        assert_eq!(v.decision, Decision::Fails);
        assert_eq!(v.counterexample().unwrap().m, 1);
    }

    #[test]
    fn equality_examples() {
        let std = TestFunction::standard_mollifier();
        let h = crate::colombeau::embed_heaviside(&std, Interval::REAL_LINE).unwrap();
        assert!(gen_equal(&h.derive(), &delta(), &SpecialIndex, &cfg())
            .unwrap()
            .holds());
        let psi = std.scale(0.5).unwrap();
        let dpsi = embed_delta(&psi, Interval::REAL_LINE).unwrap();
        let v = gen_equal(&delta(), &dpsi, &SpecialIndex, &cfg()).unwrap();
        assert_eq!(v.decision, Decision::Fails);
    }

    #[test]
    fn interpolation_identity_on_examples() {
        let d = delta();
        for k in [6, 10, 14] {
            let eps = IndexPoint::Special((-(k as f64)).exp2());
            for x in [0.0, 0.3 * (-(k as f64)).exp2(), 0.5] {
                for order in [2.0, 5.0] {
                    let r = interpolation_check(&d, &SpecialIndex, &eps, x, order).unwrap();
                    assert!(r.holds, "k {k}, x {x}, order {order}: {r:?}");
                }
            }
        }
    }
}
