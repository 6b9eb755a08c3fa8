//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p gencol --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};

use gencol::bigo::{
    bigo_pointwise, bigo_symbolic, law_suite, parse_net, random_net, Ambient, Decision,
    LawSuiteConfig, SampledNet, H_DECADES,
};
use gencol::colombeau::{
    eval_at, exhaustion, full_forms, is_moderate, is_negligible, make_gen_point, parse_repnet,
    zero_test_by_points, ColombeauError, GenConfig, Interval, PointNet, RepNet,
};
use gencol::exec::Exec;
use gencol::index::{
    default_anchor, validate_index_set, Clause, FilterClass, FullIndex, IndexError, IndexKind,
    IndexPoint, IndexRng, IndexSet, NsaIndex, SpecialIndex, TrivialIndex, PROBE_LEN,
};
use gencol::quadrature::GaussLegendre;
use gencol::testfn::{make_aq, TestFunction};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// The special instance with an empty class `(0, 0]` slipped into its
/// filter base.
#[derive(Debug)]
struct EmptyClassIndex(SpecialIndex);

impl IndexSet for EmptyClassIndex {
    fn kind(&self) -> IndexKind {
        self.0.kind()
    }
    fn leq(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError> {
        self.0.leq(i, j)
    }
    fn same(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError> {
        self.0.same(i, j)
    }
    fn contains(&self, class: &FilterClass, point: &IndexPoint) -> bool {
        self.0.contains(class, point)
    }
    fn whole(&self) -> FilterClass {
        self.0.whole()
    }
    fn filter_base(&self, limit: usize) -> Vec<FilterClass> {
        let mut b = vec![FilterClass::Tail(0.0)];
        b.extend(self.0.filter_base(limit.saturating_sub(1)));
        b
    }
    fn refine(&self, a: &FilterClass, b: &FilterClass) -> Result<FilterClass, IndexError> {
        self.0.refine(a, b)
    }
    fn class_subset(&self, a: &FilterClass, b: &FilterClass) -> bool {
        self.0.class_subset(a, b)
    }
    fn down_witness(
        &self,
        b: &IndexPoint,
        c: &IndexPoint,
        class: &FilterClass,
        e: &IndexPoint,
    ) -> Result<IndexPoint, IndexError> {
        self.0.down_witness(b, c, class, e)
    }
    fn underline(&self, i: &IndexPoint) -> f64 {
        self.0.underline(i)
    }
    fn sample_point(&self, rng: &mut IndexRng) -> IndexPoint {
        self.0.sample_point(rng)
    }
    fn sample_class(&self, rng: &mut IndexRng) -> FilterClass {
        self.0.sample_class(rng)
    }
    fn class_witness(&self, class: &FilterClass) -> Option<IndexPoint> {
        self.0.class_witness(class)
    }
    fn sample_member(&self, class: &FilterClass, rng: &mut IndexRng) -> Option<IndexPoint> {
        self.0.sample_member(class, rng)
    }
    fn sample_member_below(
        &self,
        class: &FilterClass,
        e: &IndexPoint,
        rng: &mut IndexRng,
    ) -> Option<IndexPoint> {
        self.0.sample_member_below(class, e, rng)
    }
}

fn ac1_index_validation() -> Outcome {
    let sets: Vec<Box<dyn IndexSet>> = vec![
        Box::new(SpecialIndex),
        Box::new(FullIndex::new()),
        Box::new(NsaIndex),
        Box::new(TrivialIndex::default()),
    ];
    for s in &sets {
        let r = validate_index_set(s.as_ref(), 500, 7, Exec::Sequential);
        ensure(
            r.all_passed(),
            format!("{} failed validation:\n{r}", s.kind()),
        )?;
    }
    let broken = validate_index_set(&EmptyClassIndex(SpecialIndex), 500, 7, Exec::Sequential);
    ensure(
        !broken.clause(Clause::NoEmptyClass).passed(),
        "the empty-class control was not rejected",
    )?;
    Ok("4 instances pass all clauses; empty-class control fails (ii)".into())
}

fn ac2_law_suite() -> Outcome {
    let mut cfg = LawSuiteConfig::new(7, 1000);
    cfg.exec = Exec::Sequential;
    let mut total = 0;
    for s in [&SpecialIndex as &dyn IndexSet, &FullIndex::new()] {
        let r = law_suite(s, &cfg);
        ensure(r.all_passed(), format!("{r}"))?;
        ensure(
            r.control_ok(),
            format!("negative control did not fail:\n{r}"),
        )?;
        total += r.results.iter().map(|x| x.trials).sum::<usize>();
    }
    Ok(format!(
        "{total} law checks on special and full, 0 failures"
    ))
}

fn ac3_differential() -> Outcome {
    let s = SpecialIndex;
    let amb = Ambient::new(&s);
    let anchor = default_anchor(&s);
    let probe = s
        .probe(&s.whole(), &anchor, PROBE_LEN)
        .map_err(|e| e.to_string())?;
    let mut rng = IndexRng::seed_from_u64(3);
    let (mut decided, mut indeterminate) = (0, 0);
    for _ in 0..200 {
        let (x, y) = (random_net(&mut rng), random_net(&mut rng));
        let sym = bigo_symbolic(&x, &y, &amb).map_err(|e| e.to_string())?;
        let (xs, ys) = (SampledNet::from_symbolic(&x), SampledNet::from_symbolic(&y));
        let smp =
            bigo_pointwise(&xs, &ys, &s.whole(), &anchor, &probe, &s).map_err(|e| e.to_string())?;
        if smp.decision == Decision::Indeterminate {
            indeterminate += 1;
            continue;
        }
        decided += 1;
        ensure(
            smp.decision == sym.decision,
            format!(
                "{x} = O({y}): symbolic {:?}, sampled {:?}",
                sym.decision, smp.decision
            ),
        )?;
    }
    ensure(
        indeterminate * 20 <= 200,
        format!("{indeterminate}/200 indeterminate"),
    )?;
    Ok(format!(
        "{decided} decided cases agree, {indeterminate}/200 indeterminate"
    ))
}

fn ac4_action_laws() -> Outcome {
    let phis = [
        TestFunction::standard_mollifier(),
        TestFunction::new(0.25, 0.5, vec![1.0, -0.5, 2.0]).map_err(|e| e.to_string())?,
        make_aq(3, 1.5).map_err(|e| e.to_string())?,
    ];
    let rs: Vec<f64> = (2..=8).map(|i| i as f64 * 0.25).collect();
    let xs: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.125).collect();
    let sc = |r: f64, p: &TestFunction| p.scale(r).map_err(|e| e.to_string());
    for phi in &phis {
        ensure(sc(1.0, phi)? == *phi, "scale(1, phi) != phi")?;
        ensure(phi.translate(0.0) == *phi, "translate(0, phi) != phi")?;
        for &r in &rs {
            for &s in &rs {
                ensure(sc(r, &sc(s, phi)?)? == sc(r * s, phi)?, "scale composition")?;
            }
            for &x in &xs {
                ensure(
                    sc(r, &phi.translate(x))? == sc(r, phi)?.translate(r * x),
                    "scale of translate",
                )?;
            }
            let d = sc(r, phi)?.diam_supp();
            ensure(
                (d - r * phi.diam_supp()).abs() <= 1e-12,
                format!("diam supp at r = {r}"),
            )?;
            ensure(
                (sc(r, phi)? == *phi) == (r == 1.0),
                format!("freeness at r = {r}"),
            )?;
        }
        for &x in &xs {
            for &y in &xs {
                ensure(
                    phi.translate(y).translate(x) == phi.translate(x + y),
                    "translate composition",
                )?;
            }
            ensure(
                (phi.translate(x) == *phi) == (x == 0.0),
                format!("freeness at x = {x}"),
            )?;
        }
    }
    Ok(format!(
        "5 laws, diameters and freeness on {} grids for {} functions",
        rs.len() * xs.len(),
        phis.len()
    ))
}

fn ac5_moments() -> Outcome {
    let mut worst: f64 = 0.0;
    for q in 0..=6u32 {
        let phi = make_aq(q, 1.0).map_err(|e| e.to_string())?;
        // independent re-check: fixed 256-node rule on each half of the support
        let gl = GaussLegendre::new(256);
        for j in 0..=q {
            let f = |y: f64| y.powi(j as i32) * phi.eval(y, 0);
            let m = gl.integrate(&f, -1.0, 0.0) + gl.integrate(&f, 0.0, 1.0);
            let target = if j == 0 { 1.0 } else { 0.0 };
            let err = (m - target).abs();
            worst = worst.max(err);
            ensure(
                err <= 1e-9,
                format!("q = {q}, moment {j} is off by {err:e}"),
            )?;
        }
    }
    Ok(format!("q <= 6, worst moment error {worst:.1e}"))
}

fn gen_cfg() -> GenConfig {
    GenConfig {
        exec: Exec::Sequential,
        ..GenConfig::default()
    }
}

fn rep(text: &str) -> Result<RepNet, String> {
    parse_repnet(text, Interval::REAL_LINE).map_err(|e| format!("{text}: {e}"))
}

fn err(e: ColombeauError) -> String {
    e.to_string()
}

fn ac6_canonical_moderateness() -> Outcome {
    let s = SpecialIndex;
    let cfg = gen_cfg();
    // (net, highest alpha checked, expected N(alpha))
    let cases: [(&str, u32, fn(u32) -> u32); 3] = [
        ("delta()", 2, |a| 1 + a),
        ("delta()^2", 0, |_| 2),
        ("smooth(1 - 2*x + x^3)", 3, |_| 0),
    ];
    let mut worst: f64 = 0.0;
    for (text, alpha_max, expect) in cases {
        let v = is_moderate(&rep(text)?, &s, &cfg).map_err(err)?;
        ensure(v.holds(), format!("{text}: tracks disagree"))?;
        for e in v.entries.iter().filter(|e| e.alpha <= alpha_max) {
            let n = expect(e.alpha);
            ensure(
                e.n_symbolic == n && e.n_numeric == n,
                format!(
                    "{text}, alpha {}: N symbolic {} numeric {}, expected {n}",
                    e.alpha, e.n_symbolic, e.n_numeric
                ),
            )?;
            if n > 0 {
                let slope = e.slope.ok_or(format!("{text}: no slope"))?;
                let gap = (slope + n as f64).abs();
                ensure(
                    gap <= 0.25,
                    format!("{text}, alpha {}: slope {slope}", e.alpha),
                )?;
                worst = worst.max(gap);
            } else {
                // bounded sups: the fitted slope is flat or the sups vanish
                ensure(
                    e.slope.is_none_or(|s| s.abs() <= 0.25),
                    format!("{text}, alpha {}: slope {:?}", e.alpha, e.slope),
                )?;
            }
        }
    }
    Ok(format!(
        "delta N = 1 + alpha, delta^2 N = 2, smooth N = 0; worst slope gap {worst:.3}"
    ))
}

/// Dense-grid maximum of `|y^k phi(y)|` over the support.
fn grid_max(phi: &TestFunction, k: i32) -> f64 {
    let (a, b) = phi.support();
    (0..=200_000)
        .map(|i| {
            let y = a + (b - a) * i as f64 / 200_000.0;
            (y.powi(k) * phi.eval(y, 0)).abs()
        })
        .fold(0.0, f64::max)
}

fn ac7_certificates() -> Outcome {
    let s = SpecialIndex;
    let phi = TestFunction::standard_mollifier();
    let mut terms = 0;
    // sup_K |u_eps| = c u^{-p} with c from an independent dense grid
    for (text, k, p, m) in [("delta()", 0, 1, 0u32), ("x*delta()", 1, 0, 1)] {
        let c = grid_max(&phi, k);
        let v = is_negligible(&rep(text)?, &s, &gen_cfg()).map_err(err)?;
        ensure(
            v.decision == Decision::Fails,
            format!("{text}: {:?}", v.decision),
        )?;
        let entry = v
            .counterexample()
            .ok_or(format!("{text}: no refuted bound"))?;
        ensure(
            entry.m == m,
            format!("{text}: first refuted m = {}", entry.m),
        )?;
        let probed: Vec<f64> = entry.certificates.iter().map(|c| c.h).collect();
        ensure(
            H_DECADES.iter().all(|h| probed.contains(h)),
            format!("{text}: certificates for H = {probed:?}"),
        )?;
        for cert in &entry.certificates {
            let pts = &cert.sequence.points;
            ensure(pts.len() >= 2, format!("{text}: short sequence"))?;
            for w in pts.windows(2) {
                let lt = s.lt(&w[1], &w[0]).map_err(|e| e.to_string())?;
                ensure(
                    lt,
                    format!("{text}, H = {}: sequence not decreasing", cert.h),
                )?;
            }
            for q in pts {
                let g = s.underline(q);
                let x = c * g.powi(-p);
                let y = g.powi(m as i32);
                ensure(
                    x > cert.h * y,
                    format!(
                        "{text}, H = {}: term at u = {g:e} does not re-verify",
                        cert.h
                    ),
                )?;
                terms += 1;
            }
        }
    }
    Ok(format!(
        "delta fails at m = 0, x*delta at m = 1; {terms} terms re-verified"
    ))
}

const CORPUS: [&str; 10] = [
    "delta()",
    "x*delta()",
    "delta()^2",
    "smooth(1 + x^2)",
    "u^10*x",
    "delta(eps)",
    "heaviside()",
    "d(delta(eps))",
    "delta(psi) - delta()",
    "u^12*delta(eps) + u^8*x^2",
];

fn ac8_full_forms() -> Outcome {
    let f = FullIndex::new();
    let cfg = gen_cfg();
    let mut checked = 0;
    let mut ns = Vec::new();
    for text in CORPUS {
        let u = rep(text)?;
        let mut worst = 0;
        for k in exhaustion(&u.domain(), cfg.exhaustion) {
            for alpha in 0..=1 {
                let ff = full_forms(&u, &f, k, alpha, &cfg).map_err(err)?;
                let (n1, q) = ff
                    .exists_nq
                    .ok_or(format!("{text}, alpha {alpha}: no (N, q) found"))?;
                ensure(q <= 4, format!("{text}: q = {q}"))?;
                ensure(
                    ff.n_eq_q == Some(n1),
                    format!(
                        "{text}, alpha {alpha}: (N, q) gives {n1}, N = q gives {:?}",
                        ff.n_eq_q
                    ),
                )?;
                worst = worst.max(n1);
                checked += 1;
            }
        }
        ns.push(worst);
    }
    Ok(format!(
        "{checked} (net, K, alpha) cases agree; N per net {ns:?}"
    ))
}

fn ac9_point_values() -> Outcome {
    let s = SpecialIndex;
    let cfg = gen_cfg();
    let points = ["0", "0.3 + u", "-0.5 + u^2"]
        .iter()
        .map(|t| {
            let net = PointNet::Closed(parse_net(t).map_err(|e| e.to_string())?);
            make_gen_point(net, Interval::REAL_LINE, &s, None, &cfg).map_err(err)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (mut zero, mut nonzero) = (0, 0);
    for text in CORPUS {
        let u = rep(text)?;
        let z = zero_test_by_points(&u, &s, &cfg).map_err(err)?;
        ensure(
            z.decision != Decision::Indeterminate && z.agree,
            format!(
                "{text}: points {:?}, negligible {:?}",
                z.decision, z.negligible
            ),
        )?;
        if z.decision == Decision::Holds {
            zero += 1;
        } else {
            nonzero += 1;
        }
        for x in &points {
            let v = eval_at(&u, x, &s, &cfg).map_err(err)?;
            ensure(
                v.perturbation == Decision::Holds,
                format!(
                    "{text} at {}: perturbation {:?}",
                    x.net.label(),
                    v.perturbation
                ),
            )?;
        }
    }
    Ok(format!(
        "{zero} zero and {nonzero} non-zero nets agree; values stable at {} points",
        points.len()
    ))
}

fn ac10_order_isomorphism() -> Outcome {
    let f = FullIndex::new();
    let mut rng = IndexRng::seed_from_u64(10);
    let mut exceptions = 0;
    for i in 0..500 {
        let e = f.sample_point(&mut rng);
        let r: f64 = rng.random_range(0.0..1.0f64).max(1e-6);
        // every tenth pair compares a point with itself
        let s: f64 = if i % 10 == 0 {
            r
        } else {
            rng.random_range(0.0..1.0f64).max(1e-6)
        };
        let lhs = f
            .leq(&e.shrink(r), &e.shrink(s))
            .map_err(|e| e.to_string())?;
        if lhs != (r <= s) {
            exceptions += 1;
        }
    }
    ensure(exceptions == 0, format!("{exceptions} exceptions"))?;
    Ok("500 pairs, 0 exceptions".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("AC1 index-set validation", ac1_index_validation),
        ("AC2 big-O law suite", ac2_law_suite),
        ("AC3 differential oracle", ac3_differential),
        ("AC4 action laws and freeness", ac4_action_laws),
        ("AC5 mollifier moments", ac5_moments),
        ("AC6 canonical moderateness", ac6_canonical_moderateness),
        ("AC7 non-negligibility certificates", ac7_certificates),
        ("AC8 full-instance quantifier forms", ac8_full_forms),
        ("AC9 point-value characterization", ac9_point_values),
        ("AC10 order isomorphism", ac10_order_isomorphism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        match run() {
            Ok(msg) => println!("PASS {name}: {msg} ({:.1}s)", t.elapsed().as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    println!("total {:.1}s", start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
