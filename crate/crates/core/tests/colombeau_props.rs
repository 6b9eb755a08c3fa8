use num_traits::ToPrimitive;
use proptest::prelude::*;

use gencol::bigo::{parse_net, Decision};
use gencol::colombeau::{
    embed_smooth, eval_at, gen_equal, growth_exponent, is_moderate, is_negligible, make_gen_point,
    order_from_exponent, parse_repnet, EvalCtx, GenConfig, GenNumber, Interval, PointNet, Poly,
    RepNet,
};
use gencol::exec::Exec;
use gencol::index::{default_anchor, IndexPoint, SpecialIndex};
use gencol::quadrature::GaussLegendre;

const R: Interval = Interval::REAL_LINE;

fn cfg() -> GenConfig {
    GenConfig {
        exec: Exec::Sequential,
        ..GenConfig::default()
    }
}

fn rep(text: &str) -> RepNet {
    parse_repnet(text, R).unwrap()
}

const MODERATE: [&str; 8] = [
    "delta()",
    "x*delta()",
    "delta()^2",
    "smooth(1 + x^2)",
    "heaviside(psi)",
    "d(delta(eps))",
    "delta(psi) - delta()",
    "scale-embed(2)",
];

const NEGLIGIBLE: [&str; 3] = ["u^10*x", "u^12*delta(eps) + u^8*x^2", "dH() - delta()"];

#[test]
fn negligible_nets_form_an_ideal() {
    let s = SpecialIndex;
    for n in NEGLIGIBLE {
        assert!(is_negligible(&rep(n), &s, &cfg()).unwrap().holds(), "{n}");
        for m in MODERATE {
            let p = rep(n).mul(&rep(m)).unwrap();
            let v = is_negligible(&p, &s, &cfg()).unwrap();
            assert!(v.holds(), "({n}) * ({m}): {:?}", v.decision);
        }
    }
}

#[test]
fn equality_is_an_equivalence() {
    let s = SpecialIndex;
    let nets: Vec<RepNet> = [
        "delta()",
        "dH()",
        "delta() + u^10*x",
        "x*delta()",
        "heaviside()",
    ]
    .iter()
    .map(|t| rep(t))
    .collect();
    let eq = |a: &RepNet, b: &RepNet| gen_equal(a, b, &s, &cfg()).unwrap().decision;
    let table: Vec<Vec<Decision>> = nets
        .iter()
        .map(|a| nets.iter().map(|b| eq(a, b)).collect())
        .collect();
    for i in 0..nets.len() {
        assert_eq!(table[i][i], Decision::Holds);
        for j in 0..nets.len() {
            assert_ne!(table[i][j], Decision::Indeterminate);
            assert_eq!(table[i][j], table[j][i]);
            for k in 0..nets.len() {
                if table[i][j] == Decision::Holds && table[j][k] == Decision::Holds {
                    assert_eq!(table[i][k], Decision::Holds, "{i} {j} {k}");
                }
            }
        }
    }
    // the three representatives of delta form one class
    assert!((0..3).all(|i| (0..3).all(|j| table[i][j] == Decision::Holds)));
}

#[test]
fn orders_grow_by_at_most_the_kernel_scale() {
    let s = SpecialIndex;
    let ctx = EvalCtx::new(&s, &default_anchor(&s)).unwrap();
    for t in MODERATE.iter().chain(&NEGLIGIBLE) {
        let u = rep(t);
        let s_max = u.s_max().to_f64().unwrap();
        for k in [(-1.0, 1.0), (-2.0, 2.0)] {
            for alpha in 0..3 {
                let n0 = order_from_exponent(growth_exponent(&u, k, alpha, &ctx)) as f64;
                let n1 = order_from_exponent(growth_exponent(&u, k, alpha + 1, &ctx)) as f64;
                assert!(
                    n1 <= n0 + s_max,
                    "{t}, alpha {alpha}: {n1} > {n0} + {s_max}"
                );
            }
        }
    }
}

#[test]
fn point_values_respect_equivalence() {
    let s = SpecialIndex;
    let point = |t: &str| {
        let net = PointNet::Closed(parse_net(t).unwrap());
        make_gen_point(net, R, &s, None, &cfg()).unwrap()
    };
    let (x, y) = (point("0.3 + u"), point("0.3 + u + u^10"));
    for t in MODERATE {
        let u = rep(t);
        let (a, b) = (
            eval_at(&u, &x, &s, &cfg()).unwrap(),
            eval_at(&u, &y, &s, &cfg()).unwrap(),
        );
        let d = GenNumber::new(a.number.sub(&b.number), &s).unwrap();
        assert_eq!(d.is_zero(&s, 4).unwrap().0, Decision::Holds, "{t}");
    }
}

#[test]
fn embedding_examples() {
    let phi_mass = |g: f64| {
        let d = rep("delta()");
        let ctx = EvalCtx::with_gauge(g);
        GaussLegendre::new(64).integrate(&|x| d.eval(&ctx, x, 0), -g, g)
    };
    for k in [1, 5, 10, 20] {
        assert!((phi_mass((-(k as f64)).exp2()) - 1.0).abs() < 1e-9);
    }
    let h = rep("heaviside()");
    for k in 2..=20 {
        let ctx = EvalCtx::with_gauge((-(k as f64)).exp2());
        assert!((h.eval(&ctx, 0.5, 0) - 1.0).abs() < 1e-8);
        assert!(h.eval(&ctx, -0.5, 0).abs() < 1e-8);
    }
    assert_eq!(rep("d(heaviside())"), rep("delta()"));
}

#[test]
fn moderateness_examples() {
    let s = SpecialIndex;
    let v = is_moderate(&rep("x*delta()"), &s, &cfg()).unwrap();
    assert!(v.holds());
    assert_eq!(v.n(0), Some(0));
    assert_eq!(v.n(1), Some(1));
    let p = GenNumber::new(
        gencol::bigo::Net::Symbolic(parse_net("u^-3 + 1").unwrap()),
        &s,
    )
    .unwrap();
    assert_eq!(p.n, 3);
    let unit = Interval::new(0.0, 1.0);
    let edge = make_gen_point(
        PointNet::Closed(parse_net("u^-1").unwrap()),
        unit,
        &s,
        None,
        &cfg(),
    );
    assert!(edge.is_err());
    let ok = make_gen_point(
        PointNet::Closed(parse_net("0.3 + u").unwrap()),
        unit,
        &s,
        Some((0.2, 0.45)),
        &cfg(),
    )
    .unwrap();
    assert_eq!(ok.k, Some((0.2, 0.45)));
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-3i32..=3, 1..4)
        .prop_map(|c| Poly::new(c.into_iter().map(f64::from).collect()))
}

fn atom() -> impl Strategy<Value = String> {
    let kernel = prop::sample::select(vec!["phi", "psi", "eps", "aq1"]);
    (kernel, -1i32..2, -2i32..=2, 0i64..=2, poly())
        .prop_map(|(id, j, a, s, p)| format!("{p} * K[{id}, {j}]((x - {})/u^{s})", a as f64 / 4.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn leibniz_rule_in_normal_form(a in atom(), b in atom(), c in atom()) {
        let u = rep(&format!("{a} + {b}"));
        let v = rep(&c);
        let lhs = u.mul(&v).unwrap().derive();
        let rhs = u.derive().mul(&v).unwrap().add(&u.mul(&v.derive()).unwrap()).unwrap();
        let diff = lhs.sub(&rhs).unwrap();
        // coefficients are small integers times bump values, so cancellation is exact
        prop_assert!(diff.is_zero(), "{diff}");
        let ctx = EvalCtx::new(&SpecialIndex, &IndexPoint::Special((-10f64).exp2())).unwrap();
        for i in 0..400 {
            let x = -1.0 + 2.0 * i as f64 / 399.0;
            let (l, r) = (lhs.eval(&ctx, x, 0), rhs.eval(&ctx, x, 0));
            prop_assert!((l - r).abs() <= 1e-8 * l.abs().max(1.0));
        }
    }

    #[test]
    fn polynomials_embed_faithfully(p in poly(), q in poly()) {
        let prod = embed_smooth(p.clone(), R).mul(&embed_smooth(q.clone(), R)).unwrap();
        let direct = embed_smooth(p.mul(&q), R);
        prop_assert!(gen_equal(&prod, &direct, &SpecialIndex, &cfg()).unwrap().holds());
    }
}
