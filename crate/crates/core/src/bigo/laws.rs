//! Executable law suites: random power-log nets are combined into instances
//! of each big-O law and the conclusion is decided, with every witness
//! re-checked on points sampled below its threshold.

use std::fmt;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::net::{Monomial, SymbolicNet};
use super::sampled::{bigo_oj, Net};
use super::symbolic::{self, bigo_symbolic, Core};
use super::{Ambient, Verdict};
use crate::exec::Exec;
use crate::index::{FilterClass, IndexKind, IndexPoint, IndexRng, IndexSet};

/// Slack, in log units, allowed when re-checking `|x| <= H|y|`.
const LOG_SLACK: f64 = 1e-9;
/// Classes of the filter base used as `J` in the class family.
const J_CLASSES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    Reflexive,
    Transitive,
    Product,
    Sum,
    ExternalProduct,
    IdempotentSum,
    NonnegativeSum,
    ScalarInside,
    ScalarOutside,
    ClassRestriction,
}

impl Law {
    pub const ALL: [Law; 10] = [
        Law::Reflexive,
        Law::Transitive,
        Law::Product,
        Law::Sum,
        Law::ExternalProduct,
        Law::IdempotentSum,
        Law::NonnegativeSum,
        Law::ScalarInside,
        Law::ScalarOutside,
        Law::ClassRestriction,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Law::Reflexive => "(i) x = O(x)",
            Law::Transitive => "(ii) transitivity",
            Law::Product => "(iii) O(x) O(y) = O(xy)",
            Law::Sum => "(iv) O(x) + O(y) = O(|x| + |y|)",
            Law::ExternalProduct => "(v) x O(y) = O(xy)",
            Law::IdempotentSum => "(vi) O(x) + O(x) = O(x)",
            Law::NonnegativeSum => "(vii) x + O(y) = O(x + y), x, y >= 0",
            Law::ScalarInside => "(viii) O(kx) = O(x)",
            Law::ScalarOutside => "(ix) k O(x) = O(x)",
            Law::ClassRestriction => "(x) a in B subset A",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Which relation the laws are checked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `O_{a,A}` with random `A` and `a ∈ A`; laws (i)–(x).
    Anchored,
    /// `O_J` with `J` the first classes of the filter base; laws (i)–(ix).
    Classes,
}

impl Family {
    pub fn laws(self) -> &'static [Law] {
        match self {
            Family::Anchored => &Law::ALL,
            Family::Classes => &Law::ALL[..9],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Anchored => "O_{a,A}",
            Family::Classes => "O_J",
        })
    }
}

#[derive(Debug, Clone)]
pub struct LawSuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub exec: Exec,
    pub families: Vec<Family>,
}

impl LawSuiteConfig {
    pub fn new(seed: u64, trials: usize) -> Self {
        LawSuiteConfig {
            seed,
            trials,
            exec: Exec::default(),
            families: vec![Family::Anchored, Family::Classes],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LawResult {
    pub family: Family,
    pub law: Law,
    pub trials: usize,
    pub passed: usize,
    /// The first failing trial, if any.
    pub counterexample: Option<String>,
}

impl LawResult {
    pub fn failures(&self) -> usize {
        self.trials - self.passed
    }
}

/// The sum law without its sign hypothesis: `x = -y`, `y' = 2y`, so
/// `x + y' = y` is not `O(x + y) = O(0)`.
#[derive(Debug, Clone, Serialize)]
pub struct NegativeControl {
    pub trials: usize,
    pub failed_as_expected: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub kind: IndexKind,
    pub seed: u64,
    pub trials: usize,
    pub results: Vec<LawResult>,
    pub negative_control: NegativeControl,
}

impl LawReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed == r.trials)
    }

    pub fn control_ok(&self) -> bool {
        self.negative_control.failed_as_expected == self.negative_control.trials
    }

    pub fn result(&self, family: Family, law: Law) -> Option<&LawResult> {
        self.results
            .iter()
            .find(|r| r.family == family && r.law == law)
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "law suite on {} (seed {}, {} trials)",
            self.kind, self.seed, self.trials
        )?;
        for r in &self.results {
            writeln!(
                f,
                "  {:<8} {:<40} {:>5}/{:<5} {}",
                r.family.to_string(),
                r.law.label(),
                r.passed,
                r.trials,
                if r.passed == r.trials { "ok" } else { "FAILED" }
            )?;
            if let Some(c) = &r.counterexample {
                writeln!(f, "           {c}")?;
            }
        }
        write!(
            f,
            "  negative control (vii) without x, y >= 0: {}/{} failed as expected",
            self.negative_control.failed_as_expected, self.negative_control.trials
        )
    }
}

/// Runs every law of every configured family `cfg.trials` times. Trial `i`
/// of a law draws from its own ChaCha stream, so reports are reproducible
/// and independent of the execution mode.
pub fn law_suite(set: &dyn IndexSet, cfg: &LawSuiteConfig) -> LawReport {
    let mut results = Vec::new();
    for (fi, &family) in cfg.families.iter().enumerate() {
        for (li, &law) in family.laws().iter().enumerate() {
            let outcomes = cfg.exec.map_range(cfg.trials, |i| {
                let mut rng = trial_rng(cfg.seed, fi, li, i);
                run_trial(set, family, law, &mut rng, i)
            });
            let passed = outcomes.iter().filter(|o| o.is_ok()).count();
            let counterexample = outcomes.into_iter().find_map(Result::err);
            results.push(LawResult {
                family,
                law,
                trials: cfg.trials,
                passed,
                counterexample,
            });
        }
    }
    let controls = cfg.exec.map_range(cfg.trials, |i| {
        let mut rng = trial_rng(cfg.seed, 0xff, 0xff, i);
        negative_control(set, &mut rng)
    });
    LawReport {
        kind: set.kind(),
        seed: cfg.seed,
        trials: cfg.trials,
        results,
        negative_control: NegativeControl {
            trials: cfg.trials,
            failed_as_expected: controls.into_iter().filter(|&c| c).count(),
        },
    }
}

fn trial_rng(seed: u64, family: usize, law: usize, trial: usize) -> IndexRng {
    let mut rng = IndexRng::seed_from_u64(seed);
    rng.set_stream(((family as u64) << 40) | ((law as u64) << 32) | trial as u64);
    rng
}

/// A random power-log net: one to three monomials, occasionally wrapped in
/// `abs` or multiplied by a second net.
pub fn random_net(rng: &mut IndexRng) -> SymbolicNet {
    let n = rng.random_range(1..=3);
    let terms: Vec<Monomial> = (0..n).map(|_| random_monomial(rng, false)).collect();
    let net = SymbolicNet::from_terms(&terms);
    match rng.random_range(0..10) {
        0 => net.abs(),
        1 => {
            let t = random_monomial(rng, false);
            &net * &SymbolicNet::from_terms(&[t])
        }
        _ => net,
    }
}

/// A random net that is `O(1)`: every term has `p > 0`, or `p = 0` and
/// `k <= 0`.
pub fn bounded_net(rng: &mut IndexRng) -> SymbolicNet {
    let n = rng.random_range(1..=2);
    let mut terms: Vec<Monomial> = (0..n).map(|_| random_monomial(rng, true)).collect();
    if rng.random_bool(0.7) {
        terms.push(Monomial::new(
            random_coef(rng),
            Rational64::from_integer(0),
            0,
        ));
    }
    SymbolicNet::from_terms(&terms)
}

fn random_coef(rng: &mut IndexRng) -> f64 {
    let m = 10f64.powf(rng.random_range(-1.0..1.0));
    if rng.random_bool(0.5) {
        m
    } else {
        -m
    }
}

fn random_monomial(rng: &mut IndexRng, bounded: bool) -> Monomial {
    let den: i64 = rng.random_range(1..=3);
    let num: i64 = if bounded {
        rng.random_range(0..=3 * den)
    } else {
        rng.random_range(-2 * den..=3 * den)
    };
    let p = Rational64::new(num, den);
    let k: i32 = if rng.random_bool(0.8) {
        0
    } else if rng.random_bool(0.5) {
        1
    } else {
        -1
    };
    let k = if bounded && num == 0 { -k.abs() } else { k };
    Monomial::new(random_coef(rng), p, k)
}

fn random_scalar(rng: &mut IndexRng) -> f64 {
    let m = 10f64.powf(rng.random_range(-2.0..2.0));
    if rng.random_bool(0.5) {
        m
    } else {
        -m
    }
}

/// Where a trial is evaluated.
enum Target<'a> {
    Anchored(Ambient<'a>),
    Classes(&'a dyn IndexSet, Vec<FilterClass>),
}

impl Target<'_> {
    fn set(&self) -> &dyn IndexSet {
        match self {
            Target::Anchored(a) => a.set,
            Target::Classes(s, _) => *s,
        }
    }

    fn verdict(&self, x: &SymbolicNet, y: &SymbolicNet) -> Result<Verdict, String> {
        let v = match self {
            Target::Anchored(amb) => bigo_symbolic(x, y, amb),
            Target::Classes(set, j) => bigo_oj(
                &Net::Symbolic(x.clone()),
                &Net::Symbolic(y.clone()),
                j,
                *set,
            ),
        };
        v.map_err(|e| e.to_string())
    }

    /// `x = O(y)` holds and its witness survives re-evaluation.
    fn check(
        &self,
        x: &SymbolicNet,
        y: &SymbolicNet,
        rng: &mut IndexRng,
    ) -> Result<Verdict, String> {
        let v = self.verdict(x, y)?;
        if !v.holds() {
            return Err(format!("{x} = O({y}) was not confirmed: {:?}", v.decision));
        }
        let w = v
            .witness
            .as_ref()
            .ok_or("verdict holds without a witness")?;
        let class = v.class.ok_or("verdict holds without a class")?;
        reverify(self.set(), x, y, w.h, &class, &w.eps0, rng)
            .map_err(|e| format!("{x} = O({y}): {e}"))?;
        Ok(v)
    }

    /// The bare decision; for gauge-only nets it does not depend on the
    /// anchor or the class.
    fn decides(&self, x: &SymbolicNet, y: &SymbolicNet) -> Result<bool, String> {
        match symbolic::decide(x, y) {
            Core::Holds { .. } => Ok(true),
            Core::Fails { .. } => Ok(false),
            Core::Indeterminate => Err(format!("{x} = O({y}) left indeterminate")),
        }
    }
}

/// Checks `|x| <= H|y|` on `eps0`, on dyadic shrinks of it and on random
/// members of `A_{<=eps0}`.
fn reverify(
    set: &dyn IndexSet,
    x: &SymbolicNet,
    y: &SymbolicNet,
    h: f64,
    class: &FilterClass,
    eps0: &IndexPoint,
    rng: &mut IndexRng,
) -> Result<(), String> {
    let mut pts = vec![eps0.clone()];
    pts.extend(
        [1.0, 7.0, 40.0]
            .iter()
            .map(|&k: &f64| eps0.shrink((-k).exp2())),
    );
    pts.extend((0..3).filter_map(|_| set.sample_member_below(class, eps0, rng)));
    let ln_h = h.ln();
    for p in &pts {
        let t = -set.underline(p).ln();
        let (a, b) = (x.eval_log(t), y.eval_log(t));
        if !a.is_zero() && !(a.log <= ln_h + b.log + LOG_SLACK) {
            return Err(format!(
                "witness H = {h} violated at gauge {}",
                set.underline(p)
            ));
        }
    }
    Ok(())
}

fn run_trial(
    set: &dyn IndexSet,
    family: Family,
    law: Law,
    rng: &mut IndexRng,
    trial: usize,
) -> Result<(), String> {
    let target = match family {
        Family::Anchored => {
            let class = set.sample_class(rng);
            let anchor = set
                .sample_member(&class, rng)
                .ok_or_else(|| format!("class {class} has no members"))?;
            Target::Anchored(Ambient::with(set, class, anchor).map_err(|e| e.to_string())?)
        }
        Family::Classes => Target::Classes(set, set.filter_base(J_CLASSES)),
    };
    let x = random_net(rng);
    let y = random_net(rng);
    let w1 = bounded_net(rng);
    let w2 = bounded_net(rng);
    let t = &target;
    match law {
        Law::Reflexive => t.check(&x, &x, rng).map(drop),
        Law::Transitive => {
            // a constructed chain, then a random triple
            let yy = &x * &w1;
            let xx = &yy * &w2;
            t.check(&yy, &x, rng)?;
            t.check(&xx, &yy, rng)?;
            t.check(&xx, &x, rng)?;
            let z = random_net(rng);
            if t.decides(&x, &y)? && t.decides(&y, &z)? {
                t.check(&x, &z, rng)?;
            }
            Ok(())
        }
        Law::Product => {
            let (xp, yp) = (&x * &w1, &y * &w2);
            t.check(&xp, &x, rng)?;
            t.check(&yp, &y, rng)?;
            t.check(&(&xp * &yp), &(&x * &y), rng).map(drop)
        }
        Law::Sum => {
            let (xp, yp) = (&x * &w1, &y * &w2);
            t.check(&xp, &x, rng)?;
            t.check(&yp, &y, rng)?;
            t.check(&(&xp + &yp), &(&x.abs() + &y.abs()), rng).map(drop)
        }
        Law::ExternalProduct => {
            let yp = &y * &w1;
            t.check(&yp, &y, rng)?;
            t.check(&(&x * &yp), &(&x * &y), rng).map(drop)
        }
        Law::IdempotentSum => {
            let (x1, x2) = (&x * &w1, &x * &w2);
            t.check(&x1, &x, rng)?;
            t.check(&x2, &x, rng)?;
            t.check(&(&x1 + &x2), &x, rng).map(drop)
        }
        Law::NonnegativeSum => {
            let (xa, ya) = (x.abs(), y.abs());
            let yp = &ya * &w1;
            t.check(&yp, &ya, rng)?;
            t.check(&(&xa + &yp), &(&xa + &ya), rng).map(drop)
        }
        Law::ScalarInside => {
            if trial % 10 == 0 {
                // k = 0: O(0) holds only eventually-zero nets, all in O(x)
                let zero = SymbolicNet::zero();
                t.check(&zero, &x.scale(0.0), rng)?;
                return t.check(&zero, &x, rng).map(drop);
            }
            let k = random_scalar(rng);
            let kx = x.scale(k);
            t.check(&(&x * &w1), &kx, rng)?;
            t.check(&(&kx * &w1), &x, rng).map(drop)
        }
        Law::ScalarOutside => {
            let z = &x * &w1;
            t.check(&z, &x, rng)?;
            let k = if trial % 10 == 0 {
                0.0
            } else {
                random_scalar(rng)
            };
            t.check(&z.scale(k), &x, rng)?;
            if k != 0.0 {
                t.check(&z.scale(1.0 / k), &x, rng)?;
            }
            Ok(())
        }
        Law::ClassRestriction => class_restriction(set, &x, &y, &w1, rng, trial),
    }
}

/// Law (x): from `x = O_{a,A}(y)` and `a ∈ B ⊆ A` conclude `x = O_{a,B}(y)`,
/// checking both the decided verdict and that the `A`-witness constant
/// still bounds the ratio on `B_{<=eps1}` for some `eps1 ∈ B_{<=eps0}`.
fn class_restriction(
    set: &dyn IndexSet,
    x: &SymbolicNet,
    y: &SymbolicNet,
    w: &SymbolicNet,
    rng: &mut IndexRng,
    trial: usize,
) -> Result<(), String> {
    let (a_class, b_class) = if trial == 0 && set.kind() == IndexKind::Full {
        (FilterClass::Moments(1), FilterClass::Moments(3))
    } else {
        let a = set.sample_class(rng);
        let other = set.sample_class(rng);
        let b = set.refine(&a, &other).map_err(|e| e.to_string())?;
        (a, b)
    };
    if !set.class_subset(&b_class, &a_class) {
        return Err(format!("refine gave {b_class}, not inside {a_class}"));
    }
    let anchor = set
        .sample_member(&b_class, rng)
        .ok_or_else(|| format!("class {b_class} has no members"))?;
    let big = Ambient::with(set, a_class, anchor.clone()).map_err(|e| e.to_string())?;
    let small = Ambient::with(set, b_class, anchor.clone()).map_err(|e| e.to_string())?;
    let xx = if rng.random_bool(0.5) {
        y * w
    } else {
        x.clone()
    };
    let va = bigo_symbolic(&xx, y, &big).map_err(|e| e.to_string())?;
    let vb = bigo_symbolic(&xx, y, &small).map_err(|e| e.to_string())?;
    if !va.holds() {
        // the premise is false; the restricted verdict must then agree
        return if vb.holds() {
            Err(format!(
                "{xx} = O({y}) holds in {b_class} but not in {a_class}"
            ))
        } else {
            Ok(())
        };
    }
    let wa = va
        .witness
        .as_ref()
        .ok_or("verdict holds without a witness")?;
    let eps1 = if set.contains(&b_class, &wa.eps0) {
        wa.eps0.clone()
    } else {
        set.down_witness(&anchor, &wa.eps0, &b_class, &anchor)
            .map_err(|e| e.to_string())?
    };
    reverify(set, &xx, y, wa.h, &b_class, &eps1, rng)
        .map_err(|e| format!("{xx} = O({y}) restricted to {b_class}: {e}"))?;
    if !vb.holds() {
        return Err(format!("{xx} = O({y}) lost on restriction to {b_class}"));
    }
    Ok(())
}

/// True when the sign-free variant of law (vii) fails, as it must.
fn negative_control(set: &dyn IndexSet, rng: &mut IndexRng) -> bool {
    let y = loop {
        let y = random_net(rng).abs();
        if !y.is_zero() {
            break y;
        }
    };
    let x = y.scale(-1.0);
    let yp = y.scale(2.0);
    let amb = Ambient::new(set);
    matches!(bigo_symbolic(&(&x + &yp), &(&x + &y), &amb), Ok(v) if v.fails())
}
