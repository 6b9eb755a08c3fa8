//! Generalized numbers, generalized points and point values.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::SeedableRng;

use super::analysis::sup_on_k;
use super::moderate::is_moderate;
use super::negligible::is_negligible;
use super::repnet::{EvalCtx, RepNet};
use super::{check_supported, exhaustion, ColombeauError, GenConfig, Interval};
use crate::bigo::{
    bigo_oj, bigo_pointwise, bigo_symbolic, Ambient, Decision, Net, SampledNet, SymbolicNet,
};
use crate::index::{default_anchor, FilterClass, IndexPoint, IndexRng, IndexSet, PROBE_LEN};

/// Largest `N` tried when certifying `x = O_J(u^{-N})`.
const N_MAX: u32 = 32;
/// Classes of `J` used for moderateness of numbers.
const J_CLASSES: usize = 4;

/// A net of reals given in closed form in the gauge, or by evaluation.
#[derive(Debug, Clone)]
pub enum PointNet {
    Closed(SymbolicNet),
    Sampled(SampledNet),
}

impl PointNet {
    pub fn eval(&self, set: &dyn IndexSet, p: &IndexPoint) -> f64 {
        match self {
            PointNet::Closed(n) => n.eval(set.underline(p)),
            PointNet::Sampled(s) => s.eval(set, p),
        }
    }

    pub fn as_net(&self) -> Net {
        match self {
            PointNet::Closed(n) => Net::Symbolic(n.clone()),
            PointNet::Sampled(s) => Net::Sampled(s.clone()),
        }
    }

    /// The representative moved by `u^m`.
    pub fn perturbed(&self, m: i64) -> PointNet {
        match self {
            PointNet::Closed(n) => PointNet::Closed(n + &SymbolicNet::gauge_pow(m)),
            PointNet::Sampled(s) => {
                let s = s.clone();
                let label = format!("{} + u^{m}", s.label());
                PointNet::Sampled(SampledNet::new(label, move |set, p| {
                    s.eval(set, p) + set.underline(p).powi(m as i32)
                }))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            PointNet::Closed(n) => n.to_string(),
            PointNet::Sampled(s) => s.label().to_string(),
        }
    }
}

/// A moderate net of reals with its growth certificate `x = O_J(u^{-n})`.
#[derive(Debug, Clone)]
pub struct GenNumber {
    pub net: Net,
    pub n: u32,
}

fn least_squares(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    (sxx > 0.0).then(|| {
        let slope = sxy / sxx;
        (slope, my - slope * mx)
    })
}

fn label_of(net: &Net) -> String {
    match net {
        Net::Symbolic(n) => n.to_string(),
        Net::Sampled(s) => s.label().to_string(),
    }
}

impl GenNumber {
    /// Certifies moderateness, `∃N: x = O_J(u^{-N})`, with the least such `N`.
    pub fn new(net: Net, set: &dyn IndexSet) -> Result<Self, ColombeauError> {
        check_supported(set)?;
        let j = set.filter_base(J_CLASSES);
        let holds = |n: u32| -> Result<bool, ColombeauError> {
            let y = Net::Symbolic(SymbolicNet::gauge_pow(-(n as i64)));
            Ok(bigo_oj(&net, &y, &j, set)?.holds())
        };
        // start from the fitted growth and walk to the least certified N
        let guess = Self::fit(&net, set, 8, 20)
            .map(|(e, _)| (-e - 0.25).ceil().clamp(0.0, N_MAX as f64) as u32)
            .unwrap_or(0);
        let mut n = guess;
        if holds(n)? {
            while n > 0 && holds(n - 1)? {
                n -= 1;
            }
            return Ok(GenNumber { net, n });
        }
        while n < N_MAX {
            n += 1;
            if holds(n)? {
                return Ok(GenNumber { net, n });
            }
        }
        Err(ColombeauError::NotModerate(format!(
            "{} is not O_J(u^-N) for N <= {N_MAX}",
            label_of(&net)
        )))
    }

    pub fn label(&self) -> String {
        label_of(&self.net)
    }

    pub fn eval(&self, set: &dyn IndexSet, p: &IndexPoint) -> f64 {
        match &self.net {
            Net::Symbolic(n) => n.eval(set.underline(p)),
            Net::Sampled(s) => s.eval(set, p),
        }
    }

    /// `(e, C)` with `|x_eps| ≈ C u^e` along the default ray,
    /// `2^{-kmin} .. 2^{-kmax}`; `None` when the net vanishes there.
    pub fn fit(net: &Net, set: &dyn IndexSet, kmin: u32, kmax: u32) -> Option<(f64, f64)> {
        let anchor = default_anchor(set);
        let s = net.sampled();
        let pts: Vec<(f64, f64)> = (kmin..=kmax)
            .map(|k| anchor.shrink((-(k as f64)).exp2()))
            .filter_map(|p| {
                let v = s.eval(set, &p).abs();
                (v > 0.0 && v.is_finite()).then(|| (set.underline(&p).ln(), v.ln()))
            })
            .collect();
        least_squares(&pts).map(|(e, c)| (e, c.exp()))
    }

    /// The leading behaviour `(e, C)`, `|x_eps| ≈ C u^e`.
    pub fn leading(&self, set: &dyn IndexSet, cfg: &GenConfig) -> Option<(f64, f64)> {
        Self::fit(&self.net, set, cfg.kmin, cfg.kmax)
    }

    /// Whether `[x] = 0`: `x = O(u^m)` for `m <= m_max`. Returns the verdict
    /// and the first refuted `m`.
    pub fn is_zero(
        &self,
        set: &dyn IndexSet,
        m_max: u32,
    ) -> Result<(Decision, Option<u32>), ColombeauError> {
        is_zero_net(&self.net, set, m_max)
    }

    /// The difference of representatives.
    pub fn sub(&self, other: &GenNumber) -> Net {
        match (&self.net, &other.net) {
            (Net::Symbolic(a), Net::Symbolic(b)) => Net::Symbolic(a - b),
            (a, b) => {
                let (a, b) = (a.sampled(), b.sampled());
                let label = format!("({}) - ({})", a.label(), b.label());
                Net::Sampled(SampledNet::new(label, move |s, p| {
                    a.eval(s, p) - b.eval(s, p)
                }))
            }
        }
    }
}

fn is_zero_net(
    net: &Net,
    set: &dyn IndexSet,
    m_max: u32,
) -> Result<(Decision, Option<u32>), ColombeauError> {
    let whole = set.whole();
    let anchor = default_anchor(set);
    let probe = set.probe(&whole, &anchor, PROBE_LEN)?;
    let amb = Ambient::new(set);
    let mut undecided = false;
    for m in 0..=m_max {
        let y = SymbolicNet::gauge_pow(m as i64);
        let v = match net {
            Net::Symbolic(x) => bigo_symbolic(x, &y, &amb)?,
            Net::Sampled(x) => bigo_pointwise(
                x,
                &SampledNet::from_symbolic(&y),
                &whole,
                &anchor,
                &probe,
                set,
            )?,
        };
        match v.decision {
            Decision::Fails => return Ok((Decision::Fails, Some(m))),
            Decision::Indeterminate => undecided = true,
            Decision::Holds => {}
        }
    }
    Ok((
        if undecided {
            Decision::Indeterminate
        } else {
            Decision::Holds
        },
        None,
    ))
}

/// A generalized point of `Omega`, optionally with a certified compact set
/// `K ⋐ Omega` holding `x_eps` for all sufficiently small `eps`.
#[derive(Debug, Clone)]
pub struct GenPoint {
    pub net: PointNet,
    pub domain: Interval,
    pub n: u32,
    pub k: Option<(f64, f64)>,
    /// The class in which the support was certified.
    pub support_class: Option<FilterClass>,
}

/// Result of a "for all sufficiently small eps" evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ForallVerdict {
    pub decision: Decision,
    /// A class `A` in which the predicate holds on every probed tail.
    pub class: Option<FilterClass>,
    pub note: Option<String>,
}

impl ForallVerdict {
    pub fn holds(&self) -> bool {
        self.decision == Decision::Holds
    }
}

/// `∃A ∀a ∈ A ∃eps0 <= a ∀eps ∈ A_{<=eps0}: P(eps)`, evaluated on the first
/// `classes` classes of the filter base with `anchors` anchors each; per
/// anchor, `P` must hold on the last `tail` terms of the `2^{-k}` probe.
/// Holds if some class passes on every anchor; fails if every class has an
/// anchor whose tail is entirely false; a tail mixing both is indeterminate.
pub fn forall_small(
    pred: &(dyn Fn(&IndexPoint) -> bool + Sync),
    set: &dyn IndexSet,
    cfg: &GenConfig,
) -> Result<ForallVerdict, ColombeauError> {
    check_supported(set)?;
    let tail = cfg.tail.clamp(1, PROBE_LEN);
    let mut rng = IndexRng::seed_from_u64(cfg.seed);
    let mut every_class_refuted = true;
    let mut oscillating: Option<String> = None;
    for class in set.filter_base(cfg.classes.max(1)) {
        let mut anchors: Vec<IndexPoint> = set.class_witness(&class).into_iter().collect();
        anchors.extend((1..cfg.anchors.max(1)).filter_map(|_| set.sample_member(&class, &mut rng)));
        let (mut all_true, mut refuted) = (true, false);
        for a in &anchors {
            let probe = set.probe(&class, a, PROBE_LEN)?;
            let vals = cfg.exec.map(&probe.points[PROBE_LEN - tail..], |p| pred(p));
            let trues = vals.iter().filter(|v| **v).count();
            if trues < vals.len() {
                all_true = false;
            }
            if trues == 0 {
                refuted = true;
            } else if trues < vals.len() && oscillating.is_none() {
                oscillating = Some(format!(
                    "predicate alternates on the tail in {class} from {a}"
                ));
            }
        }
        if all_true && !anchors.is_empty() {
            return Ok(ForallVerdict {
                decision: Decision::Holds,
                class: Some(class),
                note: None,
            });
        }
        every_class_refuted &= refuted;
    }
    let decision = if oscillating.is_none() && every_class_refuted {
        Decision::Fails
    } else {
        Decision::Indeterminate
    };
    Ok(ForallVerdict {
        decision,
        class: None,
        note: oscillating,
    })
}

/// A compact set around the limit of a closed-form point, when it has one.
fn infer_k(
    net: &PointNet,
    domain: &Interval,
    set: &dyn IndexSet,
    cfg: &GenConfig,
) -> Option<(f64, f64)> {
    let c = match net {
        PointNet::Closed(n) => {
            if let Some(lead) = n.leading() {
                if lead.p < 0.into() || (lead.p == 0.into() && lead.k > 0) {
                    return None;
                }
            }
            n.terms()
                .iter()
                .filter(|m| m.p == 0.into() && m.k == 0)
                .map(|m| m.coef)
                .sum::<f64>()
        }
        PointNet::Sampled(s) => {
            let p = default_anchor(set).shrink((-(cfg.kmax as f64)).exp2());
            s.eval(set, &p)
        }
    };
    if !domain.contains(c) {
        return None;
    }
    let r = 0.5 * (c - domain.lo).min(domain.hi - c).min(1.0);
    Some((c - r, c + r))
}

/// Builds a generalized point: moderate, with values in `Omega` for all small
/// `eps`, and with `K` certified when one is supplied or can be read off the
/// closed form's limit.
pub fn make_gen_point(
    net: PointNet,
    domain: Interval,
    set: &dyn IndexSet,
    k: Option<(f64, f64)>,
    cfg: &GenConfig,
) -> Result<GenPoint, ColombeauError> {
    let number = GenNumber::new(net.as_net(), set)?;
    let inside = forall_small(&|p| domain.contains(net.eval(set, p)), set, cfg)?;
    if !inside.holds() {
        return Err(ColombeauError::Precondition(format!(
            "x_eps = {} does not stay in {domain}, so it lies in no K ⋐ {domain}",
            net.label()
        )));
    }
    let given = k.is_some();
    let candidate = match k {
        Some(k) => {
            if !domain.contains_compact(k) {
                return Err(ColombeauError::NotCompactIn { k, omega: domain });
            }
            Some(k)
        }
        None => infer_k(&net, &domain, set, cfg),
    };
    let mut point = GenPoint {
        net,
        domain,
        n: number.n,
        k: None,
        support_class: None,
    };
    if let Some(k) = candidate {
        let v = forall_small(
            &|p| {
                let x = point.net.eval(set, p);
                k.0 <= x && x <= k.1
            },
            set,
            cfg,
        )?;
        if v.holds() {
            point.k = Some(k);
            point.support_class = v.class;
        } else if given {
            return Err(ColombeauError::NoCompactSupport(format!(
                "x_eps = {} is not eventually in [{}, {}]",
                point.net.label(),
                k.0,
                k.1
            )));
        }
    }
    Ok(point)
}

/// The value `u(x) = [u_eps(x_eps)]` with its well-definedness spot check.
#[derive(Debug, Clone)]
pub struct PointValue {
    pub number: GenNumber,
    /// Whether moving `x_eps` by `u^perturb` changes the value only
    /// negligibly.
    pub perturbation: Decision,
}

fn value_net(u: &RepNet, x: &PointNet) -> SampledNet {
    let (u, x) = (u.clone(), x.clone());
    SampledNet::new(
        format!("({u})(x = {})", x.label()),
        move |s, p| match EvalCtx::new(s, p) {
            Ok(ctx) => u.eval(&ctx, x.eval(s, p), 0),
            Err(_) => f64::NAN,
        },
    )
}

fn eval_unchecked(
    u: &RepNet,
    x: &GenPoint,
    set: &dyn IndexSet,
    cfg: &GenConfig,
) -> Result<PointValue, ColombeauError> {
    let value = value_net(u, &x.net);
    let moved = value_net(u, &x.net.perturbed(cfg.perturb));
    let number = GenNumber::new(Net::Sampled(value.clone()), set)?;
    let diff = SampledNet::new("perturbation", move |s, p| {
        value.eval(s, p) - moved.eval(s, p)
    });
    let (perturbation, _) = is_zero_net(&Net::Sampled(diff), set, cfg.m_max)?;
    Ok(PointValue {
        number,
        perturbation,
    })
}

/// `u(x) := [u_eps(x_eps)]` at a compactly supported generalized point.
pub fn eval_at(
    u: &RepNet,
    x: &GenPoint,
    set: &dyn IndexSet,
    cfg: &GenConfig,
) -> Result<PointValue, ColombeauError> {
    check_supported(set)?;
    let k = x.k.ok_or_else(|| {
        ColombeauError::NoCompactSupport(format!("{} has no certified K", x.net.label()))
    })?;
    if !u.domain().contains_compact(k) {
        return Err(ColombeauError::NotCompactIn {
            k,
            omega: u.domain(),
        });
    }
    if !is_moderate(u, set, cfg)?.holds() {
        return Err(ColombeauError::NotModerate(u.to_string()));
    }
    eval_unchecked(u, x, set, cfg)
}

/// A generalized point at which `u` has a non-zero value.
#[derive(Debug, Clone)]
pub struct ZeroWitness {
    pub k: (f64, f64),
    pub point: GenPoint,
    pub value: GenNumber,
    /// The first `m` with `u(x) != O(u^m)`.
    pub failing_m: u32,
    /// `(gauge, x_eps)` on the tail of the default probe.
    pub argmax: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct ZeroTest {
    /// `Holds` when every probed point value vanishes.
    pub decision: Decision,
    pub witness: Option<ZeroWitness>,
    /// The negligibility verdict on the same net, for comparison.
    pub negligible: Decision,
    pub agree: bool,
    pub note: Option<String>,
}

/// `x_eps = argmax_K |u_eps|`, memoized per index point.
fn argmax_net(u: &RepNet, k: (f64, f64)) -> SampledNet {
    let u = u.clone();
    let cache: Arc<Mutex<HashMap<String, f64>>> = Arc::default();
    SampledNet::new(format!("argmax_[{}, {}] |u|", k.0, k.1), move |s, p| {
        let key = p.to_string();
        if let Some(v) = cache.lock().expect("cache lock").get(&key) {
            return *v;
        }
        let v = sup_on_k(&u, k, 0, s, p).map_or(f64::NAN, |e| e.argmax);
        cache.lock().expect("cache lock").insert(key, v);
        v
    })
}

/// Whether the maximizers run into the boundary of `K` along the tail.
fn escapes(tail: &[(f64, f64)], k: (f64, f64)) -> bool {
    let d: Vec<f64> = tail.iter().map(|(_, x)| (x - k.0).min(k.1 - x)).collect();
    d.windows(2).all(|w| w[1] < w[0]) && d.last().is_some_and(|v| *v < 1e-6 * (k.1 - k.0))
}

/// Zero test through point values: for each `K` of the exhaustion the
/// maximizers of `|u_eps|` on `K` form a compactly supported generalized
/// point; `u = 0` when the value at every such point vanishes. Compared with
/// [`is_negligible`].
pub fn zero_test_by_points(
    u: &RepNet,
    set: &dyn IndexSet,
    cfg: &GenConfig,
) -> Result<ZeroTest, ColombeauError> {
    let negligible = is_negligible(u, set, cfg)?.decision;
    let anchor = default_anchor(set);
    let mut undecided: Option<String> = None;
    let mut witness = None;
    for k in exhaustion(&u.domain(), cfg.exhaustion) {
        let arg = argmax_net(u, k);
        let tail: Vec<(f64, f64)> = (PROBE_LEN - cfg.tail.clamp(2, PROBE_LEN)..PROBE_LEN)
            .map(|i| {
                let p = anchor.shrink((-(i as f64)).exp2());
                (set.underline(&p), arg.eval(set, &p))
            })
            .collect();
        let point = make_gen_point(PointNet::Sampled(arg), u.domain(), set, Some(k), cfg)?;
        let value = eval_unchecked(u, &point, set, cfg)?.number;
        match value.is_zero(set, cfg.m_max)? {
            (Decision::Fails, Some(m)) => {
                if escapes(&tail, k) {
                    undecided = Some(format!(
                        "maximizers on [{}, {}] run into its boundary",
                        k.0, k.1
                    ));
                    continue;
                }
                witness = Some(ZeroWitness {
                    k,
                    point,
                    value,
                    failing_m: m,
                    argmax: tail,
                });
                break;
            }
            (Decision::Holds, _) => {}
            _ => {
                undecided.get_or_insert_with(|| {
                    format!("value at the maximizers on [{}, {}] is undecided", k.0, k.1)
                });
            }
        }
    }
    let decision = match (&witness, &undecided) {
        (Some(_), _) => Decision::Fails,
        (None, Some(_)) => Decision::Indeterminate,
        (None, None) => Decision::Holds,
    };
    Ok(ZeroTest {
        decision,
        witness,
        negligible,
        agree: decision == negligible,
        note: undecided,
    })
}
