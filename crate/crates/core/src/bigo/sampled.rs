//! Big-O for nets known only through evaluation at index points.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;

use super::net::{LogNum, SymbolicNet};
use super::symbolic;
use super::{Ambient, BigOError, Certificate, Decision, Mode, Verdict, Witness, H_DECADES};
use crate::index::{
    extract_decreasing, tends_to_emptyset, FilterClass, IndexPoint, IndexRng, IndexSet,
    NullSequence, PROBE_LEN,
};

type EvalFn = dyn Fn(&dyn IndexSet, &IndexPoint) -> LogNum + Send + Sync;

/// A net of reals given by an evaluation procedure.
#[derive(Clone)]
pub struct SampledNet {
    label: String,
    f: Arc<EvalFn>,
}

impl SampledNet {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&dyn IndexSet, &IndexPoint) -> f64 + Send + Sync + 'static,
    {
        SampledNet {
            label: label.into(),
            f: Arc::new(move |s, p| LogNum::from_f64(f(s, p))),
        }
    }

    /// A net whose values are produced in log form.
    pub fn new_log<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&dyn IndexSet, &IndexPoint) -> LogNum + Send + Sync + 'static,
    {
        SampledNet {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    /// A net depending on the index only through its gauge.
    pub fn of_gauge<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, move |s, p| f(s.underline(p)))
    }

    pub fn from_symbolic(net: &SymbolicNet) -> Self {
        let n = net.clone();
        SampledNet {
            label: net.to_string(),
            f: Arc::new(move |s, p| n.eval_log(-s.underline(p).ln())),
        }
    }

    pub fn eval_log(&self, set: &dyn IndexSet, p: &IndexPoint) -> LogNum {
        (self.f)(set, p)
    }

    pub fn eval(&self, set: &dyn IndexSet, p: &IndexPoint) -> f64 {
        self.eval_log(set, p).to_f64()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for SampledNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SampledNet({})", self.label)
    }
}

/// Either kind of net.
#[derive(Debug, Clone)]
pub enum Net {
    Symbolic(SymbolicNet),
    Sampled(SampledNet),
}

impl Net {
    pub fn sampled(&self) -> SampledNet {
        match self {
            Net::Symbolic(n) => SampledNet::from_symbolic(n),
            Net::Sampled(s) => s.clone(),
        }
    }
}

const MAX_EXTENDED_LEN: usize = 1000;
const MIN_EXTENDED_GAUGE: f64 = 1e-300;
const FLAT_SLOPE: f64 = 0.3;
const GROWTH_SLOPE: f64 = 0.6;

/// `ln(|x|/|y|)` with `0/0 = 0` (bound holds) and undefined values counted as
/// violations.
fn log_ratio(x: LogNum, y: LogNum) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    if y.is_zero() {
        return f64::INFINITY;
    }
    let r = x.log - y.log;
    if r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

struct Probe<'a> {
    set: &'a dyn IndexSet,
    points: Vec<IndexPoint>,
    ratios: Vec<f64>,
}

impl<'a> Probe<'a> {
    fn new(set: &'a dyn IndexSet, x: &SampledNet, y: &SampledNet, points: Vec<IndexPoint>) -> Self {
        let ratios = points
            .iter()
            .map(|p| log_ratio(x.eval_log(set, p), y.eval_log(set, p)))
            .collect();
        Probe {
            set,
            points,
            ratios,
        }
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    /// Growth exponent of the ratio against `L = ln(1/gauge)` between the last
    /// two quarters, from the quarter maxima.
    fn growth_slope(&self) -> f64 {
        let n = self.len();
        let q = n / 4;
        let max_in = |r: std::ops::Range<usize>| {
            self.ratios[r]
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let (m3, m4) = (max_in(2 * q..3 * q), max_in(3 * q..n));
        let l_at = |i: usize| -self.set.underline(&self.points[i]).ln();
        let (l3, l4) = (l_at(2 * q + q / 2), l_at(3 * q + (n - 3 * q) / 2));
        if m4 == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        if m4 == f64::INFINITY || m3 == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        let dl = (l4 / l3).ln();
        if !(dl > 0.0) || !dl.is_finite() {
            return f64::NAN;
        }
        (m4 - m3) / dl
    }

    fn nondecreasing_tail(&self) -> bool {
        let n = self.len();
        self.ratios[3 * n / 4..]
            .windows(2)
            .all(|w| w[1] >= w[0] - 1e-12 * w[0].abs())
    }

    /// First index from which every ratio is at most `ln H`.
    fn bounded_from(&self, ln_h: f64) -> usize {
        let mut k = self.len();
        while k > 0 && self.ratios[k - 1] <= ln_h {
            k -= 1;
        }
        k
    }

    fn certificate(
        &self,
        h: f64,
        class: &FilterClass,
        anchor: &IndexPoint,
    ) -> Result<Option<Certificate>, BigOError> {
        let n = self.len();
        let ln_h = h.ln();
        let picked: Vec<usize> = (n / 4..n).filter(|&k| self.ratios[k] > ln_h).collect();
        if picked.len() < 4 || *picked.last().expect("non-empty") < 3 * n / 4 {
            return Ok(None);
        }
        let seq = NullSequence {
            points: picked.iter().map(|&k| self.points[k].clone()).collect(),
            class: *class,
            anchor: anchor.clone(),
        };
        let dec = extract_decreasing(&seq, self.set)?;
        if dec.len() < 4 {
            return Ok(None);
        }
        // margins follow the kept terms
        let mut margins = Vec::with_capacity(dec.len());
        let mut it = picked.iter();
        for p in &dec.points {
            for &k in it.by_ref() {
                if self.set.same(p, &self.points[k])? {
                    margins.push((self.ratios[k] - ln_h).exp());
                    break;
                }
            }
        }
        Ok(Some(Certificate {
            h,
            sequence: dec,
            margins,
        }))
    }

    fn certificates(
        &self,
        class: &FilterClass,
        anchor: &IndexPoint,
    ) -> Result<Vec<Certificate>, BigOError> {
        let mut out = Vec::new();
        for &h in &H_DECADES {
            if let Some(c) = self.certificate(h, class, anchor)? {
                out.push(c);
            }
        }
        Ok(out)
    }
}

/// Sampled `x = O_{a,A}(y)` along a probe sequence tending to the empty set.
///
/// Holds when some `H` in `{1, 10, ..., 10^6}` bounds the ratio on the second
/// half of the probe and the ratio shows no growth against `L = ln(1/gauge)`.
/// Fails when every such `H` is exceeded along a subsequence, or when the ratio
/// grows steadily; in the latter case the probe is continued towards smaller
/// gauges to collect certificates. Anything else is indeterminate.
pub fn bigo_pointwise(
    x: &SampledNet,
    y: &SampledNet,
    class: &FilterClass,
    anchor: &IndexPoint,
    probe: &NullSequence,
    set: &dyn IndexSet,
) -> Result<Verdict, BigOError> {
    if probe.len() < 8 {
        return Err(BigOError::Precondition(format!(
            "probe has {} terms, need at least 8",
            probe.len()
        )));
    }
    if !tends_to_emptyset(&probe.points, class, anchor, set)? {
        return Err(BigOError::Precondition(
            "probe does not tend to the empty set".into(),
        ));
    }
    let pr = Probe::new(set, x, y, probe.points.clone());
    let n = pr.len();
    let slope = pr.growth_slope();

    if slope <= FLAT_SLOPE {
        for &h in &H_DECADES {
            let k = pr.bounded_from(h.ln());
            if k <= n / 2 {
                let eps0 = pr.points[k].clone();
                return Ok(Verdict {
                    decision: Decision::Holds,
                    mode: Mode::Sampled,
                    witness: Some(Witness {
                        h,
                        gauge: set.underline(&eps0),
                        eps0,
                    }),
                    counterexample: Vec::new(),
                    class: Some(*class),
                    note: None,
                });
            }
        }
    }

    let certs = pr.certificates(class, anchor)?;
    if certs.len() == H_DECADES.len() {
        return Ok(failed(certs, class, None));
    }
    if slope >= GROWTH_SLOPE && pr.nondecreasing_tail() {
        let ext = extend(set, class, anchor, &probe.points)?;
        let pr = Probe::new(set, x, y, ext);
        let certs = pr.certificates(class, anchor)?;
        if !certs.is_empty() {
            let note = (certs.len() < H_DECADES.len()).then(|| {
                format!(
                    "ratio grows along the probe; certified for {} of {} constants",
                    certs.len(),
                    H_DECADES.len()
                )
            });
            return Ok(failed(certs, class, note));
        }
    }
    Ok(Verdict::indeterminate(
        Mode::Sampled,
        Some(*class),
        format!("no decision along the probe (growth slope {slope:.3})"),
    ))
}

fn failed(certs: Vec<Certificate>, class: &FilterClass, note: Option<String>) -> Verdict {
    Verdict {
        decision: Decision::Fails,
        mode: Mode::Sampled,
        witness: None,
        counterexample: certs,
        class: Some(*class),
        note,
    }
}

/// Continues a probe by halving the gauge of its last term.
fn extend(
    set: &dyn IndexSet,
    class: &FilterClass,
    anchor: &IndexPoint,
    points: &[IndexPoint],
) -> Result<Vec<IndexPoint>, BigOError> {
    let mut out = points.to_vec();
    let mut g = set.underline(out.last().expect("non-empty probe"));
    while out.len() < MAX_EXTENDED_LEN && g * 0.5 >= MIN_EXTENDED_GAUGE {
        g *= 0.5;
        out.push(set.point_with_gauge(class, anchor, g)?);
    }
    Ok(out)
}

const OJ_ANCHORS: usize = 4;

/// `x = O_J(y)`: some class `A ∈ J` such that `x = O_{a,A}(y)` for every
/// sampled `a ∈ A`. `J` must be non-empty and closed under refinement.
pub fn bigo_oj(
    x: &Net,
    y: &Net,
    j: &[FilterClass],
    set: &dyn IndexSet,
) -> Result<Verdict, BigOError> {
    if j.is_empty() {
        return Err(BigOError::Precondition("J is empty".into()));
    }
    for a in j {
        for b in j {
            let closed = j
                .iter()
                .any(|c| set.class_subset(c, a) && set.class_subset(c, b));
            if !closed {
                return Err(BigOError::Precondition(format!(
                    "J has no class inside both {a} and {b}"
                )));
            }
        }
    }
    let core = match (x, y) {
        (Net::Symbolic(xs), Net::Symbolic(ys)) => Some(symbolic::decide(xs, ys)),
        _ => None,
    };
    let mut all_failed = true;
    let mut last_fail: Option<Verdict> = None;
    for class in j {
        let mut anchors: Vec<IndexPoint> = set.class_witness(class).into_iter().collect();
        let mut rng = IndexRng::seed_from_u64(0);
        anchors.extend((1..OJ_ANCHORS).filter_map(|_| set.sample_member(class, &mut rng)));
        if anchors.is_empty() {
            return Err(BigOError::Precondition(format!("class {class} is empty")));
        }
        let mut verdicts = Vec::with_capacity(anchors.len());
        for a in &anchors {
            let v = match (x, y, &core) {
                (Net::Symbolic(xs), Net::Symbolic(ys), Some(c)) => {
                    symbolic::realize(c, xs, ys, &Ambient::with(set, *class, a.clone())?)?
                }
                _ => {
                    let probe = set.probe(class, a, PROBE_LEN)?;
                    bigo_pointwise(&x.sampled(), &y.sampled(), class, a, &probe, set)?
                }
            };
            verdicts.push(v);
        }
        if verdicts.iter().all(Verdict::holds) {
            let mut v = verdicts.swap_remove(0);
            v.class = Some(*class);
            return Ok(v);
        }
        if let Some(f) = verdicts.into_iter().find(Verdict::fails) {
            last_fail = Some(f);
        } else {
            all_failed = false;
        }
    }
    match (all_failed, last_fail) {
        (true, Some(v)) => Ok(v),
        _ => Ok(Verdict::indeterminate(
            Mode::Sampled,
            None,
            "no class of J gives a uniform verdict".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigo::parse_net;
    use crate::index::{default_anchor, FullIndex, SpecialIndex};

    fn special_probe() -> (SpecialIndex, NullSequence) {
        let s = SpecialIndex;
        let a = default_anchor(&s);
        let p = s.probe(&s.whole(), &a, PROBE_LEN).unwrap();
        (s, p)
    }

    #[test]
    fn oscillating_but_bounded() {
        let (s, p) = special_probe();
        let x = SampledNet::of_gauge("sin(1/u) u", |u| (1.0 / u).sin() * u);
        let y = SampledNet::of_gauge("u", |u| u);
        let v = bigo_pointwise(&x, &y, &p.class, &p.anchor, &p, &s).unwrap();
        assert!(v.holds());
        assert_eq!(v.witness.unwrap().h, 1.0);
    }

    #[test]
    fn constant_against_gauge_fails_for_every_decade() {
        let (s, p) = special_probe();
        let x = SampledNet::of_gauge("1", |_| 1.0);
        let y = SampledNet::of_gauge("u", |u| u);
        let v = bigo_pointwise(&x, &y, &p.class, &p.anchor, &p, &s).unwrap();
        assert!(v.fails());
        assert_eq!(v.counterexample.len(), H_DECADES.len());
        for c in &v.counterexample {
            assert_eq!(c.margins.len(), c.sequence.len());
            for (z, m) in c.sequence.points.iter().zip(&c.margins) {
                let u = s.underline(z);
                assert!(1.0 > c.h * u && *m > 1.0);
            }
            let g = c.sequence.gauges(&s);
            assert!(g.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn slow_growth_is_extended() {
        let (s, p) = special_probe();
        let x = SampledNet::from_symbolic(&parse_net("u*L").unwrap());
        let y = SampledNet::from_symbolic(&parse_net("u").unwrap());
        let v = bigo_pointwise(&x, &y, &p.class, &p.anchor, &p, &s).unwrap();
        assert!(v.fails(), "{v:?}");
    }

    #[test]
    fn probe_must_tend_to_empty() {
        let s = SpecialIndex;
        let p = NullSequence {
            points: vec![IndexPoint::Special(0.5); 10],
            class: s.whole(),
            anchor: IndexPoint::Special(1.0),
        };
        let x = SampledNet::of_gauge("u", |u| u);
        assert!(bigo_pointwise(&x, &x, &p.class, &p.anchor, &p, &s).is_err());
    }

    #[test]
    fn oj_on_full_instance() {
        let f = FullIndex::new();
        let x = Net::Symbolic(parse_net("u^5").unwrap());
        let y = Net::Symbolic(parse_net("u^3").unwrap());
        let all: Vec<FilterClass> = f.filter_base(5);
        let v = bigo_oj(&x, &y, &all, &f).unwrap();
        assert!(v.holds());
        assert_eq!(v.class, Some(FilterClass::Moments(0)));
        let v0 = bigo_oj(&x, &y, &all[..1], &f).unwrap();
        assert_eq!(v0.decision, v.decision);
        let back = bigo_oj(&y, &x, &all, &f).unwrap();
        assert!(back.fails());
        let sampled = bigo_oj(
            &Net::Sampled(SampledNet::from_symbolic(&parse_net("u^5").unwrap())),
            &y,
            &all,
            &f,
        )
        .unwrap();
        assert!(sampled.holds());
    }

    #[test]
    fn oj_rejects_bad_families() {
        let f = FullIndex::new();
        let x = Net::Symbolic(parse_net("u").unwrap());
        assert!(bigo_oj(&x, &x, &[], &f).is_err());
        let s = SpecialIndex;
        // two tails are only refine-closed together with their intersection
        let j = [FilterClass::Tail(0.5), FilterClass::Tail(0.25)];
        assert!(bigo_oj(&x, &x, &j, &s).is_ok());
    }
}
