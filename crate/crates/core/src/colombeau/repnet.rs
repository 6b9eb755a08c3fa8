//! Representatives: sums of gauge-power × polynomial × scaled-kernel atoms.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use super::{check_supported, ColombeauError, Interval};
use crate::index::{IndexPoint, IndexSet};
use crate::jet::{Jet, MAX_ORDER};
use crate::testfn::{make_aq, TestFunction, MAX_MOLLIFIER_ORDER};

/// Summands cancel when the result is this small relative to the inputs.
const CANCEL_TOL: f64 = 1e-12;
const MASS_TOL: f64 = 1e-9;

pub(crate) fn ratf(r: Rational64) -> f64 {
    r.to_f64().expect("small rationals convert")
}

/// A real polynomial by ascending coefficients, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(Vec<f64>);

impl Poly {
    pub fn new(mut c: Vec<f64>) -> Self {
        while c.last() == Some(&0.0) {
            c.pop();
        }
        Poly(c)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c x^n`.
    pub fn monomial(c: f64, n: usize) -> Self {
        let mut v = vec![0.0; n + 1];
        v[n] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn jet(&self, x: f64, order: usize) -> Jet {
        Jet::variable(x, 1.0, order).poly(&self.0)
    }

    pub fn derive(&self) -> Poly {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| i as f64 * c)
                .collect(),
        )
    }

    /// Coefficient-wise sum; near-cancellations become exact zeros.
    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).copied().unwrap_or(0.0);
                    let b = other.0.get(i).copied().unwrap_or(0.0);
                    let s = a + b;
                    if s.abs() <= CANCEL_TOL * (a.abs() + b.abs()) {
                        0.0
                    } else {
                        s
                    }
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::default();
        }
        let mut c = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, k: f64) -> Poly {
        Self::new(self.0.iter().map(|c| c * k).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, f64)> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, c)| (i, *c))
            .collect();
        if terms.is_empty() {
            return write!(f, "0");
        }
        write!(f, "(")?;
        for (n, (i, c)) in terms.iter().enumerate() {
            let mag = if n == 0 {
                write!(f, "{}", if *c < 0.0 { "-" } else { "" })?;
                c.abs()
            } else {
                write!(f, " {} ", if *c < 0.0 { "-" } else { "+" })?;
                c.abs()
            };
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*x")?,
                _ => write!(f, "{mag}*x^{i}")?,
            }
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone)]
enum Source {
    Fixed(Arc<TestFunction>),
    /// The mollifier carried by the index point itself.
    Index,
}

/// A kernel profile: a fixed test function, or the index point's own
/// mollifier rescaled to unit support diameter.
///
/// Registered names: `phi` (standard bump), `psi` (`0.5 ⊙ phi`), `aq<q>`
/// (unit radius, moments `1..=q` vanish), `eps` (the index mollifier).
/// Other fixed profiles are named by their `bump(c, r; ...)` literal.
#[derive(Debug, Clone)]
pub struct Kernel {
    id: Arc<str>,
    source: Source,
}

impl Kernel {
    pub const INDEX_ID: &'static str = "eps";

    pub fn standard() -> Self {
        Kernel {
            id: "phi".into(),
            source: Source::Fixed(Arc::new(TestFunction::standard_mollifier())),
        }
    }

    pub fn index() -> Self {
        Kernel {
            id: Self::INDEX_ID.into(),
            source: Source::Index,
        }
    }

    /// A fixed kernel, under its registered name when it has one.
    pub fn fixed(phi: TestFunction) -> Self {
        let std = TestFunction::standard_mollifier();
        let id: Arc<str> = if phi == std {
            "phi".into()
        } else if std.scale(0.5).is_ok_and(|p| p == phi) {
            "psi".into()
        } else {
            phi.to_string().into()
        };
        Kernel {
            id,
            source: Source::Fixed(Arc::new(phi)),
        }
    }

    pub fn named(id: &str) -> Result<Self, ColombeauError> {
        let unknown = || ColombeauError::UnknownKernel(id.to_string());
        let phi = match id {
            "phi" => return Ok(Self::standard()),
            Self::INDEX_ID => return Ok(Self::index()),
            "psi" => TestFunction::standard_mollifier()
                .scale(0.5)
                .expect("positive scale"),
            _ if id.starts_with("aq") => {
                let q: u32 = id[2..].parse().map_err(|_| unknown())?;
                if q > MAX_MOLLIFIER_ORDER {
                    return Err(unknown());
                }
                make_aq(q, 1.0).map_err(|_| unknown())?
            }
            _ if id.starts_with("bump") => id.parse().map_err(|_| unknown())?,
            _ => return Err(unknown()),
        };
        Ok(Kernel {
            id: id.into(),
            source: Source::Fixed(Arc::new(phi)),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn is_index(&self) -> bool {
        matches!(self.source, Source::Index)
    }

    /// The profile in effect at an evaluation context.
    pub fn function<'a>(&'a self, ctx: &'a EvalCtx) -> &'a TestFunction {
        match &self.source {
            Source::Fixed(f) => f,
            Source::Index => &ctx.index_kernel,
        }
    }
}

impl PartialEq for Kernel {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

/// Everything an atom needs from an index point: the gauge and the point's
/// own mollifier profile.
#[derive(Debug, Clone)]
pub struct EvalCtx {
    pub gauge: f64,
    index_kernel: TestFunction,
}

fn unit_diameter(phi: &TestFunction) -> TestFunction {
    let d = phi.diam_supp();
    if d > 0.0 {
        phi.scale(1.0 / d).expect("positive diameter")
    } else {
        phi.clone()
    }
}

impl EvalCtx {
    pub fn new(set: &dyn IndexSet, eps: &IndexPoint) -> Result<Self, ColombeauError> {
        check_supported(set)?;
        set.check_kind(eps)?;
        let index_kernel = match eps {
            IndexPoint::Full { mollifier, .. } => mollifier.unit_diameter_profile(),
            IndexPoint::NsaBase(phi) => unit_diameter(phi),
            _ => unit_diameter(&TestFunction::standard_mollifier()),
        };
        Ok(EvalCtx {
            gauge: set.underline(eps),
            index_kernel,
        })
    }

    /// A context with the given gauge and the standard index profile.
    pub fn with_gauge(gauge: f64) -> Self {
        EvalCtx {
            gauge,
            index_kernel: unit_diameter(&TestFunction::standard_mollifier()),
        }
    }
}

/// `K^{(j)}((x - shift)/u^s)`; `j = -1` is the cumulative integral.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFactor {
    pub kernel: Kernel,
    pub j: i32,
    pub shift: f64,
    pub s: Rational64,
}

impl KernelFactor {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.kernel
            .id
            .cmp(&other.kernel.id)
            .then(self.j.cmp(&other.j))
            .then(self.shift.total_cmp(&other.shift))
            .then(self.s.cmp(&other.s))
    }

    pub fn is_compact(&self) -> bool {
        self.j >= 0
    }

    /// Closed support of the (derivative) kernel in `x`, `None` for the
    /// cumulative integral.
    pub fn support(&self, ctx: &EvalCtx) -> Option<(f64, f64)> {
        if !self.is_compact() {
            return None;
        }
        let w = ctx.gauge.powf(ratf(self.s));
        let (a, b) = self.kernel.function(ctx).support();
        Some((self.shift + w * a, self.shift + w * b))
    }

    /// Taylor jet in `x` of order `n`.
    pub fn jet(&self, ctx: &EvalCtx, x: f64, n: usize) -> Jet {
        let f = self.kernel.function(ctx);
        let c = ctx.gauge.powf(-ratf(self.s));
        let y = (x - self.shift) * c;
        let mut coeffs = vec![0.0; n + 1];
        let (mut cm, mut fact) = (1.0, 1.0);
        if self.j >= 0 {
            let j = self.j as usize;
            let b = f.eval_jet(y, j + n);
            for (m, v) in coeffs.iter_mut().enumerate() {
                if m > 0 {
                    cm *= c;
                    fact *= m as f64;
                }
                *v = b.derivative(j + m) / fact * cm;
            }
        } else {
            coeffs[0] = f.cumulative(y);
            if n >= 1 {
                let b = f.eval_jet(y, n - 1);
                for (m, v) in coeffs.iter_mut().enumerate().skip(1) {
                    cm *= c;
                    fact *= m as f64;
                    *v = b.derivative(m - 1) / fact * cm;
                }
            }
        }
        Jet::from_coeffs(&coeffs)
    }
}

impl fmt::Display for KernelFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K[{}, {}](", self.kernel.id, self.j)?;
        let arg = if self.shift == 0.0 {
            "x".to_string()
        } else if self.shift < 0.0 {
            format!("x + {}", -self.shift)
        } else {
            format!("x - {}", self.shift)
        };
        if self.s.is_zero() {
            write!(f, "{arg})")
        } else {
            write!(f, "({arg})/{})", GaugePow(self.s))
        }
    }
}

struct GaugePow(Rational64);

impl fmt::Display for GaugePow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.0;
        if p == Rational64::from_integer(1) {
            write!(f, "u")
        } else if p.is_integer() && p > Rational64::zero() {
            write!(f, "u^{p}")
        } else {
            write!(f, "u^({p})")
        }
    }
}

/// `u^p * P(x) * prod K_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub p: Rational64,
    pub poly: Poly,
    pub kernels: Vec<KernelFactor>,
}

fn is_zero_jet(j: &Jet) -> bool {
    (0..=j.order()).all(|k| j.coeff(k) == 0.0)
}

impl Atom {
    fn same_shape(&self, other: &Atom) -> bool {
        self.p == other.p
            && self.kernels.len() == other.kernels.len()
            && self
                .kernels
                .iter()
                .zip(&other.kernels)
                .all(|(a, b)| a.key_cmp(b) == Ordering::Equal)
    }

    fn shape_cmp(&self, other: &Atom) -> Ordering {
        self.p.cmp(&other.p).then_with(|| {
            for (a, b) in self.kernels.iter().zip(&other.kernels) {
                let c = a.key_cmp(b);
                if c != Ordering::Equal {
                    return c;
                }
            }
            self.kernels.len().cmp(&other.kernels.len())
        })
    }

    pub fn jet(&self, ctx: &EvalCtx, x: f64, n: usize) -> Jet {
        let mut acc = Jet::constant(ctx.gauge.powf(ratf(self.p)), n);
        // compact factors first: outside their supports nothing else is needed
        for f in self.kernels.iter().filter(|f| f.is_compact()) {
            let fj = f.jet(ctx, x, n);
            if is_zero_jet(&fj) {
                return Jet::constant(0.0, n);
            }
            acc = acc * fj;
        }
        for f in self.kernels.iter().filter(|f| !f.is_compact()) {
            acc = acc * f.jet(ctx, x, n);
        }
        acc * self.poly.jet(x, n)
    }

    fn derive(&self) -> Vec<Atom> {
        let mut out = Vec::with_capacity(self.kernels.len() + 1);
        let dp = self.poly.derive();
        if !dp.is_zero() {
            out.push(Atom {
                p: self.p,
                poly: dp,
                kernels: self.kernels.clone(),
            });
        }
        for (i, f) in self.kernels.iter().enumerate() {
            let mut kernels = self.kernels.clone();
            kernels[i].j += 1;
            out.push(Atom {
                p: self.p - f.s,
                poly: self.poly.clone(),
                kernels,
            });
        }
        out
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.p.is_zero() {
            parts.push(GaugePow(self.p).to_string());
        }
        let trivial_poly = self.poly.coeffs() == [1.0];
        if !trivial_poly || self.kernels.is_empty() && parts.is_empty() {
            parts.push(self.poly.to_string());
        }
        parts.extend(self.kernels.iter().map(ToString::to_string));
        write!(f, "{}", parts.join(" * "))
    }
}

/// A representative net `eps ↦ u_eps` on the open interval `domain`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepNet {
    atoms: Vec<Atom>,
    domain: Interval,
}

impl RepNet {
    /// Builds the normal form: kernel factors sorted, atoms of equal shape
    /// merged, zero atoms dropped.
    pub fn from_atoms(atoms: Vec<Atom>, domain: Interval) -> Self {
        let mut atoms: Vec<Atom> = atoms
            .into_iter()
            .filter(|a| !a.poly.is_zero())
            .map(|mut a| {
                a.kernels.sort_by(KernelFactor::key_cmp);
                a
            })
            .collect();
        atoms.sort_by(Atom::shape_cmp);
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.same_shape(&a) => last.poly = last.poly.add(&a.poly),
                _ => merged.push(a),
            }
        }
        merged.retain(|a| !a.poly.is_zero());
        RepNet {
            atoms: merged,
            domain,
        }
    }

    pub fn zero(domain: Interval) -> Self {
        RepNet {
            atoms: Vec::new(),
            domain,
        }
    }

    /// `u^p`.
    pub fn gauge_power(p: Rational64, domain: Interval) -> Self {
        Self::from_atoms(
            vec![Atom {
                p,
                poly: Poly::constant(1.0),
                kernels: Vec::new(),
            }],
            domain,
        )
    }

    /// `u^p * K^{(j)}((x - shift)/u^s)`.
    pub fn kernel_atom(
        kernel: Kernel,
        p: Rational64,
        j: i32,
        shift: f64,
        s: Rational64,
        domain: Interval,
    ) -> Self {
        Self::from_atoms(
            vec![Atom {
                p,
                poly: Poly::constant(1.0),
                kernels: vec![KernelFactor {
                    kernel,
                    j,
                    shift,
                    s,
                }],
            }],
            domain,
        )
    }

    /// `phi(x/u)/u` for a kernel.
    pub fn delta(kernel: Kernel, domain: Interval) -> Self {
        let one = Rational64::from_integer(1);
        Self::kernel_atom(kernel, -one, 0, 0.0, one, domain)
    }

    /// `Phi(x/u)`, `Phi` the cumulative integral of the kernel.
    pub fn heaviside(kernel: Kernel, domain: Interval) -> Self {
        let one = Rational64::from_integer(1);
        Self::kernel_atom(kernel, Rational64::zero(), -1, 0.0, one, domain)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn with_domain(mut self, domain: Interval) -> Self {
        self.domain = domain;
        self
    }

    /// Whether the normal form is empty.
    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Highest kernel derivative order in use (`-1` for cumulative only,
    /// `None` without kernels).
    pub fn max_kernel_order(&self) -> Option<i32> {
        self.atoms
            .iter()
            .flat_map(|a| a.kernels.iter().map(|k| k.j))
            .max()
    }

    /// Largest kernel scale exponent `s` (0 without kernels).
    pub fn s_max(&self) -> Rational64 {
        self.atoms
            .iter()
            .flat_map(|a| a.kernels.iter().map(|k| k.s))
            .max()
            .unwrap_or_else(Rational64::zero)
    }

    pub fn uses_index_kernel(&self) -> bool {
        self.atoms
            .iter()
            .any(|a| a.kernels.iter().any(|k| k.kernel.is_index()))
    }

    fn same_domain(&self, other: &RepNet) -> Result<(), ColombeauError> {
        if self.domain != other.domain {
            return Err(ColombeauError::DomainMismatch(self.domain, other.domain));
        }
        Ok(())
    }

    pub fn add(&self, other: &RepNet) -> Result<RepNet, ColombeauError> {
        self.same_domain(other)?;
        let atoms = self.atoms.iter().chain(&other.atoms).cloned().collect();
        Ok(Self::from_atoms(atoms, self.domain))
    }

    pub fn sub(&self, other: &RepNet) -> Result<RepNet, ColombeauError> {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &RepNet) -> Result<RepNet, ColombeauError> {
        self.same_domain(other)?;
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for a in &self.atoms {
            for b in &other.atoms {
                atoms.push(Atom {
                    p: a.p + b.p,
                    poly: a.poly.mul(&b.poly),
                    kernels: a.kernels.iter().chain(&b.kernels).cloned().collect(),
                });
            }
        }
        Ok(Self::from_atoms(atoms, self.domain))
    }

    pub fn scale(&self, k: f64) -> RepNet {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                poly: a.poly.scale(k),
                ..a.clone()
            })
            .collect();
        Self::from_atoms(atoms, self.domain)
    }

    /// `d/dx`.
    pub fn derive(&self) -> RepNet {
        let atoms = self.atoms.iter().flat_map(Atom::derive).collect();
        Self::from_atoms(atoms, self.domain)
    }

    pub fn derive_n(&self, n: u32) -> RepNet {
        (0..n).fold(self.clone(), |u, _| u.derive())
    }

    /// Taylor jet of `x ↦ u_eps(x)` of order `n`.
    pub fn jet(&self, ctx: &EvalCtx, x: f64, n: usize) -> Jet {
        self.atoms
            .iter()
            .fold(Jet::constant(0.0, n), |acc, a| acc + a.jet(ctx, x, n))
    }

    /// `d^alpha/dx^alpha u_eps(x)` through jets.
    pub fn eval(&self, ctx: &EvalCtx, x: f64, alpha: usize) -> f64 {
        self.jet(ctx, x, alpha).derivative(alpha)
    }

    /// Checks that every kernel derivative up to `alpha` is available.
    pub fn check_order(&self, alpha: u32) -> Result<(), ColombeauError> {
        let j = self.max_kernel_order().unwrap_or(0).max(0) as usize;
        if j + alpha as usize > MAX_ORDER {
            return Err(ColombeauError::Precondition(format!(
                "derivative order {} exceeds {MAX_ORDER}",
                j + alpha as usize
            )));
        }
        Ok(())
    }

    /// The domain `Omega_eps` of `u_eps`: `Omega` itself, except in the full
    /// instance where it is `{x : supp(eps) + x ⊆ Omega}`.
    pub fn domain_at(&self, eps: &IndexPoint) -> Interval {
        match eps.test_function() {
            Some(phi) if matches!(eps, IndexPoint::Full { .. }) => {
                let (a, b) = phi.support();
                Interval::new(self.domain.lo - a, self.domain.hi - b)
            }
            _ => self.domain,
        }
    }
}

impl fmt::Display for RepNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "0");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

pub fn rep_add(u: &RepNet, v: &RepNet) -> Result<RepNet, ColombeauError> {
    u.add(v)
}

pub fn rep_mul(u: &RepNet, v: &RepNet) -> Result<RepNet, ColombeauError> {
    u.mul(v)
}

pub fn rep_derive(u: &RepNet) -> RepNet {
    u.derive()
}

/// The `eps`-independent net `P`.
pub fn embed_smooth(p: Poly, domain: Interval) -> RepNet {
    RepNet::from_atoms(
        vec![Atom {
            p: Rational64::zero(),
            poly: p,
            kernels: Vec::new(),
        }],
        domain,
    )
}

fn unit_mass(phi: &TestFunction) -> Result<(), ColombeauError> {
    if (phi.mass() - 1.0).abs() > MASS_TOL {
        return Err(ColombeauError::Precondition(format!(
            "kernel mass is {}, not 1",
            phi.mass()
        )));
    }
    Ok(())
}

/// `u_eps(x) = phi(x/u)/u`.
pub fn embed_delta(phi: &TestFunction, domain: Interval) -> Result<RepNet, ColombeauError> {
    unit_mass(phi)?;
    Ok(RepNet::delta(Kernel::fixed(phi.clone()), domain))
}

/// `u_eps(x) = Phi(x/u)`.
pub fn embed_heaviside(phi: &TestFunction, domain: Interval) -> Result<RepNet, ColombeauError> {
    unit_mass(phi)?;
    Ok(RepNet::heaviside(Kernel::fixed(phi.clone()), domain))
}
