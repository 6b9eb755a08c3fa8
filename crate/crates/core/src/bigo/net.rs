//! Power-log nets in the gauge: finite sums `c · u^p · L^k` with `u` the gauge,
//! `L = ln(1/u)`, `p` rational and `k` integer, wrapped in an expression tree
//! with `abs` and `max`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

/// A real number stored as `sign · exp(log)`, so that `u^-3` at `u = 2^-500`
/// stays representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNum {
    pub sign: f64,
    pub log: f64,
}

impl LogNum {
    pub const ZERO: LogNum = LogNum {
        sign: 0.0,
        log: f64::NEG_INFINITY,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            LogNum::ZERO
        } else if x.is_nan() {
            LogNum {
                sign: f64::NAN,
                log: f64::NAN,
            }
        } else {
            LogNum {
                sign: x.signum(),
                log: x.abs().ln(),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.sign * self.log.exp()
        }
    }

    pub fn abs(self) -> Self {
        LogNum {
            sign: self.sign.abs(),
            ..self
        }
    }

    /// `ln |self|`, `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        self.log
    }

    pub fn max(self, other: LogNum) -> LogNum {
        if self.total_cmp(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    fn total_cmp(&self, other: &LogNum) -> Ordering {
        let key = |v: &LogNum| {
            if v.sign > 0.0 {
                (2, v.log)
            } else if v.sign < 0.0 {
                (0, -v.log)
            } else {
                (1, 0.0)
            }
        };
        let (a, b) = (key(self), key(other));
        a.0.cmp(&b.0).then(a.1.total_cmp(&b.1))
    }
}

impl Add for LogNum {
    type Output = LogNum;
    fn add(self, rhs: LogNum) -> LogNum {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let m = self.log.max(rhs.log);
        if m.is_infinite() {
            // at least one infinite magnitude
            let s = if self.log == m { self.sign } else { 0.0 }
                + if rhs.log == m { rhs.sign } else { 0.0 };
            return if s == 0.0 {
                LogNum {
                    sign: f64::NAN,
                    log: f64::NAN,
                }
            } else {
                LogNum {
                    sign: s.signum(),
                    log: m,
                }
            };
        }
        let s = self.sign * (self.log - m).exp() + rhs.sign * (rhs.log - m).exp();
        if s == 0.0 {
            LogNum::ZERO
        } else {
            LogNum {
                sign: s.signum(),
                log: m + s.abs().ln(),
            }
        }
    }
}

impl Neg for LogNum {
    type Output = LogNum;
    fn neg(self) -> LogNum {
        LogNum {
            sign: -self.sign,
            ..self
        }
    }
}

impl Sub for LogNum {
    type Output = LogNum;
    fn sub(self, rhs: LogNum) -> LogNum {
        self + (-rhs)
    }
}

impl Mul for LogNum {
    type Output = LogNum;
    fn mul(self, rhs: LogNum) -> LogNum {
        if self.is_zero() || rhs.is_zero() {
            return LogNum::ZERO;
        }
        LogNum {
            sign: self.sign * rhs.sign,
            log: self.log + rhs.log,
        }
    }
}

/// `coef · u^p · L^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub p: Rational64,
    pub k: i32,
}

impl Monomial {
    pub fn new(coef: f64, p: Rational64, k: i32) -> Self {
        Monomial { coef, p, k }
    }

    /// Growth comparison as `u -> 0+`: `Greater` means `self` dominates.
    pub fn growth_cmp(&self, other: &Monomial) -> Ordering {
        other.p.cmp(&self.p).then(self.k.cmp(&other.k))
    }

    pub fn eval_log(&self, t: f64) -> LogNum {
        LogNum::from_f64(self.coef) * gauge_power(self.p, t) * log_power(self.k, t)
    }
}

fn gauge_power(p: Rational64, t: f64) -> LogNum {
    if p.is_zero() {
        return LogNum::from_f64(1.0);
    }
    LogNum {
        sign: 1.0,
        log: -p.to_f64().expect("finite rational") * t,
    }
}

fn log_power(k: i32, t: f64) -> LogNum {
    match k.cmp(&0) {
        Ordering::Equal => LogNum::from_f64(1.0),
        _ if t == 0.0 && k > 0 => LogNum::ZERO,
        _ => LogNum {
            sign: 1.0,
            log: k as f64 * t.ln(),
        },
    }
}

/// A closed interval `[lo, hi]` of log-form reals enclosing a net's values
/// over a range of `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Enclosure {
    pub lo: LogNum,
    pub hi: LogNum,
}

impl Enclosure {
    fn point(v: LogNum) -> Self {
        Enclosure { lo: v, hi: v }
    }

    fn hull(vs: &[LogNum]) -> Self {
        let mut lo = vs[0];
        let mut hi = vs[0];
        for v in &vs[1..] {
            if v.total_cmp(&lo) == Ordering::Less {
                lo = *v;
            }
            if v.total_cmp(&hi) == Ordering::Greater {
                hi = *v;
            }
        }
        Enclosure { lo, hi }
    }

    fn is_nan(&self) -> bool {
        self.lo.sign.is_nan() || self.hi.sign.is_nan()
    }

    /// `sup |v|` in log form.
    pub fn sup_abs(&self) -> f64 {
        self.lo.log.max(self.hi.log)
    }

    /// `inf |v|` in log form, `-inf` when the interval meets zero.
    pub fn inf_abs(&self) -> f64 {
        if self.lo.sign > 0.0 {
            self.lo.log
        } else if self.hi.sign < 0.0 {
            self.hi.log
        } else {
            f64::NEG_INFINITY
        }
    }

    fn add(self, o: Enclosure) -> Self {
        Enclosure {
            lo: self.lo + o.lo,
            hi: self.hi + o.hi,
        }
    }

    fn mul(self, o: Enclosure) -> Self {
        Self::hull(&[
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ])
    }

    fn neg(self) -> Self {
        Enclosure {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    fn abs(self) -> Self {
        if self.lo.sign >= 0.0 {
            self
        } else if self.hi.sign <= 0.0 {
            self.neg()
        } else {
            Enclosure {
                lo: LogNum::ZERO,
                hi: self.lo.abs().max(self.hi),
            }
        }
    }

    fn max(self, o: Enclosure) -> Self {
        Enclosure {
            lo: self.lo.max(o.lo),
            hi: self.hi.max(o.hi),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    U(Rational64),
    L(i32),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Value at `u = exp(-t)`.
    pub fn eval_log(&self, t: f64) -> LogNum {
        match self {
            Expr::Const(c) => LogNum::from_f64(*c),
            Expr::U(p) => gauge_power(*p, t),
            Expr::L(k) => log_power(*k, t),
            Expr::Add(xs) => xs.iter().fold(LogNum::ZERO, |acc, x| acc + x.eval_log(t)),
            Expr::Mul(xs) => xs
                .iter()
                .fold(LogNum::from_f64(1.0), |acc, x| acc * x.eval_log(t)),
            Expr::Neg(x) => -x.eval_log(t),
            Expr::Abs(x) => x.eval_log(t).abs(),
            Expr::Max(a, b) => a.eval_log(t).max(b.eval_log(t)),
        }
    }

    /// The tree times `u^{-p} L^{-k}`, with every product factor rescaled by
    /// its own leading monomial so that enclosures do not compound growth.
    fn scaled(&self, shift: (f64, i32)) -> Option<Scaled> {
        let mono = |c: f64, p: f64, k: i32| Scaled::Mono(c, p - shift.0, k - shift.1);
        Some(match self {
            Expr::Const(c) => mono(*c, 0.0, 0),
            Expr::U(p) => mono(1.0, p.to_f64()?, 0),
            Expr::L(k) => mono(1.0, 0.0, *k),
            Expr::Add(xs) => Scaled::Add(
                xs.iter()
                    .map(|x| x.scaled(shift))
                    .collect::<Option<Vec<_>>>()?,
            ),
            Expr::Mul(xs) => {
                let (mut c, mut p, mut k) = (1.0, 0.0, 0);
                let mut rest = Vec::new();
                for x in xs {
                    match x {
                        Expr::Const(v) => c *= v,
                        Expr::U(q) => p += q.to_f64()?,
                        Expr::L(j) => k += j,
                        other => {
                            let own = other
                                .normalize()
                                .first()
                                .map(|m| (m.p.to_f64().unwrap_or(0.0), m.k))
                                .unwrap_or((0.0, 0));
                            p += own.0;
                            k += own.1;
                            rest.push(other.scaled(own)?);
                        }
                    }
                }
                let mut factors = vec![mono(c, p, k)];
                factors.extend(rest);
                Scaled::Mul(factors)
            }
            Expr::Neg(x) => Scaled::Neg(Box::new(x.scaled(shift)?)),
            Expr::Abs(x) => Scaled::Abs(Box::new(x.scaled(shift)?)),
            Expr::Max(x, y) => Scaled::Max(Box::new(x.scaled(shift)?), Box::new(y.scaled(shift)?)),
        })
    }

    /// Whether the tree is a sum of products of monomials, so that its
    /// normal form is exact.
    fn is_power_sum(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::U(_) | Expr::L(_) => true,
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().all(Expr::is_power_sum),
            Expr::Neg(x) => x.is_power_sum(),
            Expr::Abs(_) | Expr::Max(..) => false,
        }
    }

    fn normalize(&self) -> Vec<Monomial> {
        match self {
            Expr::Const(c) => merge(vec![Monomial::new(*c, Rational64::zero(), 0)]),
            Expr::U(p) => vec![Monomial::new(1.0, *p, 0)],
            Expr::L(k) => vec![Monomial::new(1.0, Rational64::zero(), *k)],
            Expr::Add(xs) => merge(xs.iter().flat_map(|x| x.normalize()).collect()),
            Expr::Mul(xs) => xs
                .iter()
                .fold(vec![Monomial::new(1.0, Rational64::zero(), 0)], |acc, x| {
                    product(&acc, &x.normalize())
                }),
            Expr::Neg(x) => negate(x.normalize()),
            Expr::Abs(x) => {
                let n = x.normalize();
                match n.first() {
                    Some(m) if m.coef < 0.0 => negate(n),
                    _ => n,
                }
            }
            Expr::Max(a, b) => {
                let (na, nb) = (a.normalize(), b.normalize());
                let diff = merge(na.iter().cloned().chain(negate(nb.clone())).collect());
                match diff.first() {
                    Some(m) if m.coef < 0.0 => nb,
                    _ => na,
                }
            }
        }
    }
}

/// A net multiplied by a fixed monomial, in a form suited to enclosures.
#[derive(Debug, Clone)]
pub(crate) enum Scaled {
    /// `c · u^p · L^k` with real `p`.
    Mono(f64, f64, i32),
    Add(Vec<Scaled>),
    Mul(Vec<Scaled>),
    Neg(Box<Scaled>),
    Abs(Box<Scaled>),
    Max(Box<Scaled>, Box<Scaled>),
}

impl Scaled {
    /// An enclosure of the values over `t ∈ [a, b]`, `0 < a <= b`; `None`
    /// when some value is undefined.
    pub(crate) fn enclose(&self, a: f64, b: f64) -> Option<Enclosure> {
        let e = match self {
            Scaled::Mono(c, p, k) => {
                Enclosure::point(LogNum::from_f64(*c)).mul(monomial_range(*p, *k, a, b))
            }
            Scaled::Add(xs) => {
                let mut acc = Enclosure::point(LogNum::ZERO);
                for x in xs {
                    acc = acc.add(x.enclose(a, b)?);
                }
                acc
            }
            Scaled::Mul(xs) => {
                let mut acc = Enclosure::point(LogNum::from_f64(1.0));
                for x in xs {
                    acc = acc.mul(x.enclose(a, b)?);
                }
                acc
            }
            Scaled::Neg(x) => x.enclose(a, b)?.neg(),
            Scaled::Abs(x) => x.enclose(a, b)?.abs(),
            Scaled::Max(x, y) => x.enclose(a, b)?.max(y.enclose(a, b)?),
        };
        (!e.is_nan()).then_some(e)
    }
}

/// Exact range of `e^{-p t} t^k` over `[a, b]`, `a > 0`: the function has
/// at most one interior extremum, at `t = k/p`.
fn monomial_range(p: f64, k: i32, a: f64, b: f64) -> Enclosure {
    let at = |t: f64| LogNum {
        sign: 1.0,
        log: -p * t + if k == 0 { 0.0 } else { k as f64 * t.ln() },
    };
    let ends = Enclosure::hull(&[at(a), at(b)]);
    let c = k as f64 / p;
    if p != 0.0 && k != 0 && c > a && c < b {
        Enclosure::hull(&[ends.lo, ends.hi, at(c)])
    } else {
        ends
    }
}

fn negate(mut v: Vec<Monomial>) -> Vec<Monomial> {
    for m in &mut v {
        m.coef = -m.coef;
    }
    v
}

fn product(a: &[Monomial], b: &[Monomial]) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(Monomial::new(x.coef * y.coef, x.p + y.p, x.k + y.k));
        }
    }
    merge(out)
}

/// Sort by decreasing growth, combine equal exponent pairs and drop terms that
/// cancel (exactly, or to rounding of the combined summands).
fn merge(mut v: Vec<Monomial>) -> Vec<Monomial> {
    v.sort_by(|a, b| b.growth_cmp(a));
    let mut out: Vec<Monomial> = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut m = v[i];
        let mut scale = m.coef.abs();
        let mut j = i + 1;
        while j < v.len() && v[j].p == m.p && v[j].k == m.k {
            m.coef += v[j].coef;
            scale = scale.max(v[j].coef.abs());
            j += 1;
        }
        if m.coef != 0.0 && m.coef.abs() > 1e-13 * scale {
            out.push(m);
        }
        i = j;
    }
    out
}

fn terms_expr(terms: &[Monomial]) -> Expr {
    let parts = terms
        .iter()
        .map(|m| {
            let mut f = vec![Expr::Const(m.coef)];
            if !m.p.is_zero() {
                f.push(Expr::U(m.p));
            }
            if m.k != 0 {
                f.push(Expr::L(m.k));
            }
            Expr::Mul(f)
        })
        .collect();
    Expr::Add(parts)
}

/// A net in the gauge: its expression tree and its normal form.
#[derive(Debug, Clone)]
pub struct SymbolicNet {
    expr: Expr,
    normal: Vec<Monomial>,
    /// The tree used for values and enclosures: the normal form when it is
    /// exact (no `abs`/`max`), which avoids cancellation between subtrees.
    eval: Expr,
}

impl SymbolicNet {
    pub fn new(expr: Expr) -> Self {
        let normal = expr.normalize();
        let eval = if expr.is_power_sum() {
            terms_expr(&normal)
        } else {
            expr.clone()
        };
        SymbolicNet { expr, normal, eval }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Expr::Const(c))
    }

    pub fn monomial(coef: f64, p: Rational64, k: i32) -> Self {
        Self::from_terms(&[Monomial::new(coef, p, k)])
    }

    /// `u^p` for integer `p`.
    pub fn gauge_pow(p: i64) -> Self {
        Self::monomial(1.0, Rational64::from_integer(p), 0)
    }

    pub fn from_terms(terms: &[Monomial]) -> Self {
        Self::new(terms_expr(terms))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.normal
    }

    pub fn is_zero(&self) -> bool {
        self.normal.is_empty()
    }

    /// The dominant term as `u -> 0+`.
    pub fn leading(&self) -> Option<&Monomial> {
        self.normal.first()
    }

    /// The net rebuilt from its normal form (drops `abs`/`max` structure).
    pub fn normalized(&self) -> SymbolicNet {
        Self::from_terms(&self.normal)
    }

    /// Exact tree value at gauge `u = exp(-t)`.
    pub fn eval_log(&self, t: f64) -> LogNum {
        self.eval.eval_log(t)
    }

    /// The net times `u^{-p} L^{-k}`, `None` if an exponent is not finite.
    pub(crate) fn scaled(&self, shift: (f64, i32)) -> Option<Scaled> {
        self.eval.scaled(shift)
    }

    /// Normal-form value at gauge `u = exp(-t)`.
    pub fn eval_normal_log(&self, t: f64) -> LogNum {
        self.normal
            .iter()
            .fold(LogNum::ZERO, |acc, m| acc + m.eval_log(t))
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.eval_log(-u.ln()).to_f64()
    }

    pub fn abs(&self) -> SymbolicNet {
        Self::new(Expr::Abs(Box::new(self.expr.clone())))
    }

    pub fn max(&self, other: &SymbolicNet) -> SymbolicNet {
        Self::new(Expr::Max(
            Box::new(self.expr.clone()),
            Box::new(other.expr.clone()),
        ))
    }

    pub fn scale(&self, k: f64) -> SymbolicNet {
        Self::new(Expr::Mul(vec![Expr::Const(k), self.expr.clone()]))
    }

    /// Whether the normal forms agree, coefficient-wise up to `1e-12` relative.
    pub fn same_normal_form(&self, other: &SymbolicNet) -> bool {
        self.normal.len() == other.normal.len()
            && self.normal.iter().zip(&other.normal).all(|(a, b)| {
                a.p == b.p
                    && a.k == b.k
                    && (a.coef - b.coef).abs() <= 1e-12 * a.coef.abs().max(b.coef.abs())
            })
    }
}

impl Add for &SymbolicNet {
    type Output = SymbolicNet;
    fn add(self, rhs: &SymbolicNet) -> SymbolicNet {
        SymbolicNet::new(Expr::Add(vec![self.expr.clone(), rhs.expr.clone()]))
    }
}

impl Sub for &SymbolicNet {
    type Output = SymbolicNet;
    fn sub(self, rhs: &SymbolicNet) -> SymbolicNet {
        SymbolicNet::new(Expr::Add(vec![
            self.expr.clone(),
            Expr::Neg(Box::new(rhs.expr.clone())),
        ]))
    }
}

impl Mul for &SymbolicNet {
    type Output = SymbolicNet;
    fn mul(self, rhs: &SymbolicNet) -> SymbolicNet {
        SymbolicNet::new(Expr::Mul(vec![self.expr.clone(), rhs.expr.clone()]))
    }
}

impl Neg for &SymbolicNet {
    type Output = SymbolicNet;
    fn neg(self) -> SymbolicNet {
        SymbolicNet::new(Expr::Neg(Box::new(self.expr.clone())))
    }
}

fn fmt_rational(f: &mut fmt::Formatter<'_>, r: Rational64) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "({}/{})", r.numer(), r.denom())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coef.abs())?;
        if !self.p.is_zero() {
            f.write_str("*u^")?;
            fmt_rational(f, self.p)?;
        }
        if self.k != 0 {
            write!(f, "*L^{}", self.k)?;
        }
        Ok(())
    }
}

/// Prints the normal form in the grammar accepted by the parser.
impl fmt::Display for SymbolicNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.normal.is_empty() {
            return f.write_str("0");
        }
        for (i, m) in self.normal.iter().enumerate() {
            match (i, m.coef.is_sign_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Exponent pair of the leading term, for diagnostics.
pub fn leading_pair(net: &SymbolicNet) -> Option<(Rational64, i32)> {
    net.leading().map(|m| (m.p, m.k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn normal_form_orders_by_growth() {
        let x = SymbolicNet::from_terms(&[
            Monomial::new(2.0, r(1, 2), 0),
            Monomial::new(1.0, r(-3, 1), 0),
        ]);
        assert_eq!(x.leading().unwrap().p, r(-3, 1));
        let y = SymbolicNet::from_terms(&[
            Monomial::new(1.0, r(1, 1), 2),
            Monomial::new(1.0, r(1, 1), 0),
        ]);
        let lead = y.leading().unwrap();
        assert_eq!((lead.p, lead.k), (r(1, 1), 2));
    }

    #[test]
    fn abs_and_max_resolve_by_leading_sign() {
        let x = SymbolicNet::monomial(-5.0, r(1, 1), 0).abs();
        assert_eq!(x.terms(), &[Monomial::new(5.0, r(1, 1), 0)]);
        let a = SymbolicNet::gauge_pow(1);
        let b = SymbolicNet::gauge_pow(2);
        let m = a.max(&b);
        assert!(m.same_normal_form(&a));
        // tie on (p, k) falls to the coefficient
        let c = SymbolicNet::monomial(3.0, r(1, 1), 0);
        assert!(a.max(&c).same_normal_form(&c));
    }

    #[test]
    fn cancellation_is_exact() {
        let x = SymbolicNet::monomial(0.1, r(2, 3), 1);
        let d = &(&x + &x) - &x.scale(2.0);
        assert!(d.is_zero());
        assert_eq!(d.to_string(), "0");
    }

    #[test]
    fn log_domain_survives_overflow() {
        let x = SymbolicNet::gauge_pow(-3);
        let v = x.eval_log(600.0 * std::f64::consts::LN_2);
        assert!((v.log - 1800.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!(x.eval(1e-300).is_infinite());
    }

    #[test]
    fn tree_and_normal_form_agree_for_small_gauge() {
        let x = SymbolicNet::from_terms(&[
            Monomial::new(1.0, r(1, 1), 2),
            Monomial::new(-4.0, r(1, 1), 0),
        ])
        .abs();
        for k in [20.0, 40.0, 100.0] {
            let t = k * std::f64::consts::LN_2;
            let (a, b) = (x.eval_log(t), x.eval_normal_log(t));
            assert!((a.log - b.log).abs() < 1e-12 && a.sign == b.sign);
        }
        // near u = 1 the tree is |.| while the normal form is still negative
        assert!(x.eval_normal_log(0.5).sign < 0.0);
        assert!(x.eval_log(0.5).sign > 0.0);
    }
}
