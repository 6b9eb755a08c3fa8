//! Closed-form 1-D test functions `phi(y) = P((y - c)/rho) * B((y - c)/rho)` with
//! the fixed bump `B(t) = exp(-1/(1 - t^2))` on `|t| < 1`.
//!
//! The class is closed under the dilation action `r ⊙ phi = (1/r) phi(./r)` and
//! the translation action `x ⊕ phi = phi(. - x)`, both of which act on
//! `(center, radius, coefficients)` exactly.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::{Jet, MAX_ORDER};
use crate::quadrature::{self, QuadratureError, MOMENT_TOL, PANEL_NODES};

/// Largest `q` accepted by [`make_aq`].
pub const MAX_MOLLIFIER_ORDER: u32 = 6;
/// Largest derivative order accepted by [`TestFunction::eval`].
pub const MAX_DERIVATIVE_ORDER: usize = MAX_ORDER;
/// Moment residual accepted for membership in `A_q`.
pub const MOMENT_RESIDUAL_TOL: f64 = 1e-9;
/// Relative tolerance for structural equality of closed forms.
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Largest condition number of the moment system we are willing to solve.
pub const MAX_CONDITION: f64 = 1e12;

const BASE_MOMENTS: usize = 48;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TestFnError {
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("moment order {requested} exceeds the configured maximum {max}")]
    OrderTooLarge { requested: u32, max: u32 },
    #[error("moment system for q = {q} is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { q: u32, condition: f64 },
    #[error(
        "constructed mollifier misses its moment targets: residual {residual:e} at order {order}"
    )]
    MomentTarget { order: u32, residual: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("cannot parse test function at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// The base bump `exp(-1/(1 - t^2))`, zero for `|t| >= 1`.
pub fn base_bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// `∫_{-1}^{1} t^i B(t) dt`; odd orders vanish by symmetry.
pub fn base_moment(i: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..BASE_MOMENTS)
            .map(|i| {
                if i % 2 == 1 {
                    0.0
                } else {
                    let f = |t: f64| t.powi(i as i32) * base_bump(t);
                    // integrand is even: integrate the half and double
                    2.0 * quadrature::adaptive(&f, 0.0, 1.0, 1e-16, PANEL_NODES)
                        .expect("base bump moments converge")
                }
            })
            .collect()
    });
    assert!(i < BASE_MOMENTS, "base moment index {i} out of table range");
    table[i]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestFunction {
    center: f64,
    radius: f64,
    coeffs: Vec<f64>,
    mass: f64,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= STRUCTURAL_TOL * 1f64.max(a.abs()).max(b.abs())
}

impl PartialEq for TestFunction {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.trimmed(), other.trimmed());
        close(self.center, other.center)
            && close(self.radius, other.radius)
            && a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| close(*x, *y))
    }
}

impl TestFunction {
    pub fn new(center: f64, radius: f64, coeffs: Vec<f64>) -> Result<Self, TestFnError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(TestFnError::NonPositiveRadius(radius));
        }
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        let mass = radius
            * coeffs
                .iter()
                .enumerate()
                .map(|(i, p)| p * base_moment(i))
                .sum::<f64>();
        Ok(TestFunction {
            center,
            radius,
            coeffs,
            mass,
        })
    }

    /// `B((y - c)/rho)` itself.
    pub fn bump(center: f64, radius: f64) -> Result<Self, TestFnError> {
        Self::new(center, radius, vec![1.0])
    }

    /// The unit-mass base bump on [-1, 1].
    pub fn standard_mollifier() -> Self {
        Self::new(0.0, 1.0, vec![1.0 / base_moment(0)]).expect("unit radius is valid")
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn trimmed(&self) -> &[f64] {
        let mut n = self.coeffs.len();
        while n > 1 && self.coeffs[n - 1] == 0.0 {
            n -= 1;
        }
        &self.coeffs[..n]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    /// `∫ phi`, from the cached base moments.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Closed support interval `[c - rho, c + rho]`.
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }

    /// `diam supp phi`: `2 rho`, or 0 for the zero function.
    pub fn diam_supp(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            2.0 * self.radius
        }
    }

    /// `r ⊙ phi`.
    pub fn scale(&self, r: f64) -> Result<Self, TestFnError> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(TestFnError::NonPositiveScale(r));
        }
        if r == 1.0 {
            return Ok(self.clone());
        }
        Ok(TestFunction {
            center: r * self.center,
            radius: r * self.radius,
            coeffs: self.coeffs.iter().map(|p| p / r).collect(),
            mass: self.mass,
        })
    }

    /// `x ⊕ phi`.
    pub fn translate(&self, x: f64) -> Self {
        TestFunction {
            center: self.center + x,
            ..self.clone()
        }
    }

    /// Returns `lambda` with `self = lambda ⊙ other`, if one exists.
    pub fn dilation_ratio(&self, other: &TestFunction) -> Option<f64> {
        if self.is_zero() || other.is_zero() {
            return None;
        }
        let lambda = self.radius / other.radius;
        let (a, b) = (self.trimmed(), other.trimmed());
        let same = close(self.center, lambda * other.center)
            && a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| close(*x, y / lambda));
        same.then_some(lambda)
    }

    /// Returns `x` with `self = x ⊕ other`, if one exists.
    pub fn translation_offset(&self, other: &TestFunction) -> Option<f64> {
        let (a, b) = (self.trimmed(), other.trimmed());
        let same = close(self.radius, other.radius)
            && a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| close(*x, *y));
        same.then_some(self.center - other.center)
    }

    /// `phi^(d)(y)` by truncated Taylor propagation through the closed form.
    pub fn eval(&self, y: f64, d: usize) -> f64 {
        assert!(
            d <= MAX_DERIVATIVE_ORDER,
            "derivative order {d} exceeds {MAX_DERIVATIVE_ORDER}"
        );
        let t = (y - self.center) / self.radius;
        if t.abs() >= 1.0 || !t.is_finite() {
            return 0.0;
        }
        if d == 0 {
            return horner(&self.coeffs, t) * base_bump(t);
        }
        self.jet(t, d).derivative(d)
    }

    /// All derivatives up to `d` at `y`, as a jet in `y`.
    pub fn eval_jet(&self, y: f64, d: usize) -> Jet {
        let t = (y - self.center) / self.radius;
        if t.abs() >= 1.0 || !t.is_finite() {
            return Jet::constant(0.0, d);
        }
        self.jet(t, d)
    }

    fn jet(&self, t: f64, d: usize) -> Jet {
        let tj = Jet::variable(t, 1.0 / self.radius, d);
        let inner = (-(tj * tj)).add_scalar(1.0).recip();
        let bump = (-inner).exp();
        tj.poly(&self.coeffs) * bump
    }

    /// `∫_{-inf}^{y} phi`.
    pub fn cumulative(&self, y: f64) -> f64 {
        let t = (y - self.center) / self.radius;
        if t <= -1.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return self.mass;
        }
        let f = |s: f64| horner(&self.coeffs, s) * base_bump(s);
        let v = quadrature::adaptive(&f, -1.0, t, 1e-14, 16)
            .unwrap_or_else(|_| quadrature::GaussLegendre::cached(128).integrate(&f, -1.0, t));
        self.radius * v
    }

    /// Kernel evaluation by order: `-1` is the cumulative integral, `j >= 0`
    /// the `j`-th derivative.
    pub fn kernel(&self, y: f64, j: i32) -> f64 {
        if j < 0 {
            self.cumulative(y)
        } else {
            self.eval(y, j as usize)
        }
    }

    /// `∫ y^j phi(y) dy` by adaptive Gauss–Legendre with 64-node panels.
    pub fn moment(&self, j: u32) -> Result<f64, TestFnError> {
        self.moment_with(j, PANEL_NODES, MOMENT_TOL)
    }

    pub fn moment_with(&self, j: u32, nodes: usize, tol: f64) -> Result<f64, TestFnError> {
        let (a, b) = self.support();
        let f = |y: f64| y.powi(j as i32) * self.eval(y, 0);
        // split at the center: the integrand is smooth but flat at both ends
        let left = quadrature::adaptive(&f, a, self.center, 0.5 * tol, nodes)?;
        let right = quadrature::adaptive(&f, self.center, b, 0.5 * tol, nodes)?;
        Ok(left + right)
    }

    /// Largest `q <= max` with `|∫ y^j phi| <= tol` for `1 <= j <= q`, provided
    /// the mass is one within `tol`. `None` if the mass test fails.
    pub fn vanishing_order(&self, max: u32, tol: f64) -> Option<u32> {
        if (self.mass - 1.0).abs() > tol {
            return None;
        }
        let mut q = 0;
        for j in 1..=max {
            match self.moment(j) {
                Ok(m) if m.abs() <= tol => q = j,
                _ => break,
            }
        }
        Some(q)
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// A unit-mass test function centred at 0 with radius `radius` whose moments of
/// orders `1..=q` vanish: the polynomial factor solves the Hankel system of
/// base-bump moments.
pub fn make_aq(q: u32, radius: f64) -> Result<TestFunction, TestFnError> {
    if q > MAX_MOLLIFIER_ORDER {
        return Err(TestFnError::OrderTooLarge {
            requested: q,
            max: MAX_MOLLIFIER_ORDER,
        });
    }
    if !(radius > 0.0) {
        return Err(TestFnError::NonPositiveRadius(radius));
    }
    let n = q as usize + 1;
    let hankel = DMatrix::from_fn(n, n, |j, i| base_moment(i + j));
    let sv = hankel.clone().singular_values();
    let condition = sv.max() / sv.min();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(TestFnError::IllConditioned { q, condition });
    }
    let mut rhs = DVector::zeros(n);
    rhs[0] = 1.0 / radius;
    let p = hankel
        .cholesky()
        .ok_or(TestFnError::IllConditioned { q, condition })?
        .solve(&rhs);
    let phi = TestFunction::new(0.0, radius, p.iter().copied().collect())?;
    if (phi.mass() - 1.0).abs() > MOMENT_RESIDUAL_TOL {
        return Err(TestFnError::MomentTarget {
            order: 0,
            residual: phi.mass() - 1.0,
        });
    }
    for j in 1..=q {
        let m = phi.moment(j)?;
        if m.abs() > MOMENT_RESIDUAL_TOL {
            return Err(TestFnError::MomentTarget {
                order: j,
                residual: m,
            });
        }
    }
    Ok(phi)
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bump({}, {};", self.center, self.radius)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {c}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for TestFunction {
    type Err = TestFnError;

    /// `bump(center, radius; c0, c1, ...)`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |pos: usize, msg: &str| TestFnError::Parse {
            pos,
            msg: msg.to_string(),
        };
        let trimmed = s.trim_start();
        let offset = s.len() - trimmed.len();
        let body = trimmed
            .strip_prefix("bump")
            .map(str::trim_start)
            .and_then(|r| r.strip_prefix('('))
            .ok_or_else(|| err(offset, "expected `bump(`"))?;
        let close_at = body.rfind(')').ok_or_else(|| err(s.len(), "missing `)`"))?;
        if !body[close_at + 1..].trim().is_empty() {
            return Err(err(s.len() - body[close_at + 1..].len(), "trailing input"));
        }
        let inner = &body[..close_at];
        let (head, tail) = inner
            .split_once(';')
            .ok_or_else(|| err(offset, "expected `;` between geometry and coefficients"))?;
        let num = |t: &str| -> Result<f64, TestFnError> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| err(offset, &format!("invalid number `{}`", t.trim())))
        };
        let (c, r) = head
            .split_once(',')
            .ok_or_else(|| err(offset, "expected `center, radius`"))?;
        let coeffs = tail.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
        TestFunction::new(num(c)?, num(r)?, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TestFunction {
        TestFunction::new(0.3, 0.7, vec![1.0, -0.5, 2.0]).unwrap()
    }

    #[test]
    fn base_moments_match_reference_values() {
        // independent reference: 30-digit mpmath quadrature
        assert!((base_moment(0) - 0.443_993_816_168_079_4).abs() < 1e-15);
        assert!((base_moment(2) - 0.070_201_476_752_975_41).abs() < 1e-15);
        assert!((base_moment(12) - 0.001_652_598_137_573_326).abs() < 1e-15);
        assert_eq!(base_moment(3), 0.0);
    }

    #[test]
    fn bump_at_origin_is_exp_minus_one() {
        let b = TestFunction::bump(0.0, 1.0).unwrap();
        assert!((b.eval(0.0, 0) - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn vanishes_at_support_boundary_for_all_orders() {
        let phi = sample();
        let (a, b) = phi.support();
        for d in 0..=4 {
            assert_eq!(phi.eval(a, d), 0.0);
            assert_eq!(phi.eval(b, d), 0.0);
        }
    }

    #[test]
    fn action_identities() {
        let phi = sample();
        assert_eq!(phi.scale(1.0).unwrap(), phi);
        assert_eq!(phi.translate(0.0), phi);
        assert_eq!(
            phi.scale(3.0).unwrap().scale(2.0).unwrap(),
            phi.scale(6.0).unwrap()
        );
        assert_eq!(phi.translate(2.0).translate(1.0), phi.translate(3.0));
        assert_eq!(
            phi.translate(0.4).scale(2.5).unwrap(),
            phi.scale(2.5).unwrap().translate(2.5 * 0.4)
        );
    }

    #[test]
    fn scale_rejects_nonpositive() {
        assert!(matches!(
            sample().scale(0.0),
            Err(TestFnError::NonPositiveScale(_))
        ));
        assert!(sample().scale(-1.0).is_err());
    }

    #[test]
    fn diameters() {
        let b = TestFunction::bump(0.0, 1.0).unwrap();
        assert_eq!(b.diam_supp(), 2.0);
        assert_eq!(b.scale(0.25).unwrap().diam_supp(), 0.5);
        let z = TestFunction::new(0.0, 1.0, vec![0.0, 0.0]).unwrap();
        assert_eq!(z.diam_supp(), 0.0);
    }

    #[test]
    fn moments_of_symmetric_and_translated() {
        let m = TestFunction::standard_mollifier();
        assert!(m.moment(1).unwrap().abs() < 1e-12);
        assert!((m.moment(0).unwrap() - 1.0).abs() < 1e-9);
        let phi = sample();
        let a = 0.85;
        let lhs = phi.translate(a).moment(1).unwrap();
        let rhs = phi.moment(1).unwrap() + a * phi.moment(0).unwrap();
        assert!((lhs - rhs).abs() < 1e-11, "{lhs} vs {rhs}");
    }

    #[test]
    fn mass_matches_quadrature() {
        let phi = sample();
        assert!((phi.mass() - phi.moment(0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn make_aq_low_orders() {
        let a0 = make_aq(0, 1.0).unwrap();
        assert_eq!(a0, TestFunction::standard_mollifier());
        let a1 = make_aq(1, 1.0).unwrap();
        assert!(a1.coeffs()[1].abs() < 1e-14);
        assert!((a1.mass() - 1.0).abs() < 1e-12);
        assert!(matches!(
            make_aq(7, 1.0),
            Err(TestFnError::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn make_aq_three_checked_at_doubled_nodes() {
        let phi = make_aq(3, 1.0).unwrap();
        for j in 1..=3 {
            let m = phi.moment_with(j, 2 * PANEL_NODES, 1e-13).unwrap();
            assert!(m.abs() <= 1e-9, "moment {j} = {m}");
        }
        assert_eq!(phi.vanishing_order(6, 1e-9), Some(3));
    }

    #[test]
    fn derivative_matches_central_difference() {
        let phi = sample();
        let h = 1e-6;
        for i in 0..100 {
            let y = -0.35 + 1.3 * (i as f64 + 0.5) / 100.0;
            let fd = (phi.eval(y + h, 0) - phi.eval(y - h, 0)) / (2.0 * h);
            assert!((phi.eval(y, 1) - fd).abs() < 1e-5, "y={y}");
        }
    }

    #[test]
    fn cumulative_reaches_mass() {
        let phi = sample();
        assert_eq!(phi.cumulative(-10.0), 0.0);
        assert_eq!(phi.cumulative(10.0), phi.mass());
        let mid = phi.cumulative(phi.center() + 0.5 * phi.radius());
        assert!(mid > 0.0 && mid < phi.mass());
        let h = 1e-5;
        let y = 0.45;
        let fd = (phi.cumulative(y + h) - phi.cumulative(y - h)) / (2.0 * h);
        assert!((fd - phi.eval(y, 0)).abs() < 1e-7);
    }

    #[test]
    fn text_round_trip() {
        let phi = sample();
        let back: TestFunction = phi.to_string().parse().unwrap();
        assert_eq!(phi, back);
        let parsed: TestFunction = "bump(0, 2; 1)".parse().unwrap();
        assert_eq!(parsed, TestFunction::bump(0.0, 2.0).unwrap());
        assert!("bump(0 2; 1)".parse::<TestFunction>().is_err());
    }

    #[test]
    fn dilation_and_translation_detection() {
        let phi = sample();
        let s = phi.scale(0.4).unwrap();
        assert!((s.dilation_ratio(&phi).unwrap() - 0.4).abs() < 1e-15);
        assert!(phi.translate(0.1).dilation_ratio(&phi).is_none());
        let off = phi.translate(0.25).translation_offset(&phi).unwrap();
        assert!((off - 0.25).abs() < 1e-15);
    }
}
