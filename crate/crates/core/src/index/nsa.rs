use std::sync::Arc;

use rand::Rng;

use super::{log_uniform, FilterClass, IndexError, IndexKind, IndexPoint, IndexRng, IndexSet};
use crate::testfn::TestFunction;

/// Test functions pre-ordered by support diameter, with the countable base
/// `D_n = { phi : diam supp phi <= 1/n }` (`D_0` is everything).
///
/// The order compares the raw diameter (with `1` for the zero function); the
/// gauge additionally clamps it into `(0, 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NsaIndex;

impl NsaIndex {
    pub fn new() -> Self {
        NsaIndex
    }

    pub fn point(phi: TestFunction) -> IndexPoint {
        IndexPoint::NsaBase(Arc::new(phi))
    }

    fn function<'a>(&self, p: &'a IndexPoint) -> Result<&'a TestFunction, IndexError> {
        match p {
            IndexPoint::NsaBase(phi) => Ok(phi),
            other => Err(IndexError::KindMismatch {
                expected: IndexKind::NsaBase,
                found: other.kind(),
            }),
        }
    }

    /// `phi̲`: support diameter, or 1 for the zero function.
    pub fn diameter(phi: &TestFunction) -> f64 {
        if phi.is_zero() {
            1.0
        } else {
            phi.diam_supp()
        }
    }

    /// A base class inside the down-set `(∅, eps0]`.
    pub fn tail_class(&self, eps0: &IndexPoint) -> Result<FilterClass, IndexError> {
        let g = Self::diameter(self.function(eps0)?);
        let n = (1.0 / g).ceil();
        if n > u32::MAX as f64 {
            return Err(IndexError::Precondition(format!(
                "diameter {g} is below the representable classes"
            )));
        }
        Ok(FilterClass::Diameter(n as u32))
    }

    fn level(class: &FilterClass) -> Option<u32> {
        match class {
            FilterClass::Diameter(n) => Some(*n),
            _ => None,
        }
    }

    fn bound(n: u32) -> f64 {
        if n == 0 {
            f64::INFINITY
        } else {
            1.0 / n as f64
        }
    }

    fn random_function(rng: &mut IndexRng, max_diam: f64) -> TestFunction {
        let radius = 0.5 * log_uniform(rng, 1e-9_f64.min(max_diam), max_diam);
        let center: f64 = rng.random_range(-2.0..2.0);
        let deg = rng.random_range(0..3);
        let mut coeffs: Vec<f64> = (0..=deg).map(|_| rng.random_range(-1.0..1.0)).collect();
        if coeffs.iter().all(|c| *c == 0.0) {
            coeffs[0] = 1.0;
        }
        TestFunction::new(center, radius, coeffs).expect("positive radius")
    }
}

impl IndexSet for NsaIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::NsaBase
    }

    fn leq(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError> {
        Ok(Self::diameter(self.function(i)?) <= Self::diameter(self.function(j)?))
    }

    fn same(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError> {
        let (a, b) = (self.function(i)?, self.function(j)?);
        Ok(a.is_zero() && b.is_zero() || a == b)
    }

    fn contains(&self, class: &FilterClass, point: &IndexPoint) -> bool {
        match (Self::level(class), point) {
            (Some(n), IndexPoint::NsaBase(phi)) => Self::diameter(phi) <= Self::bound(n),
            _ => false,
        }
    }

    fn whole(&self) -> FilterClass {
        FilterClass::Diameter(0)
    }

    fn filter_base(&self, limit: usize) -> Vec<FilterClass> {
        (0..limit as u32).map(FilterClass::Diameter).collect()
    }

    fn refine(&self, a: &FilterClass, b: &FilterClass) -> Result<FilterClass, IndexError> {
        match (Self::level(a), Self::level(b)) {
            (Some(m), Some(n)) => Ok(FilterClass::Diameter(m.max(n))),
            _ => Err(IndexError::Precondition(format!(
                "{a} or {b} is not a diameter class"
            ))),
        }
    }

    fn class_subset(&self, a: &FilterClass, b: &FilterClass) -> bool {
        matches!(
            (Self::level(a), Self::level(b)),
            (Some(m), Some(n)) if Self::bound(m) <= Self::bound(n)
        )
    }

    fn down_witness(
        &self,
        b: &IndexPoint,
        c: &IndexPoint,
        class: &FilterClass,
        e: &IndexPoint,
    ) -> Result<IndexPoint, IndexError> {
        for p in [b, c] {
            self.check_member(class, p)?;
            if !self.leq(p, e)? {
                return Err(IndexError::Precondition(format!("{p} is not below {e}")));
            }
        }
        let m = Self::diameter(self.function(b)?).min(Self::diameter(self.function(c)?));
        let n_class = Self::level(class).unwrap_or(0) as f64;
        let n = n_class.max((1.0 / m).floor() + 2.0);
        let d = Self::point(TestFunction::bump(0.0, 0.5 / n)?);
        debug_assert!(self.contains(class, &d));
        Ok(d)
    }

    fn underline(&self, i: &IndexPoint) -> f64 {
        match self.function(i) {
            Ok(phi) => Self::diameter(phi).min(1.0),
            Err(_) => 1.0,
        }
    }

    fn point_with_gauge(
        &self,
        class: &FilterClass,
        anchor: &IndexPoint,
        gauge: f64,
    ) -> Result<IndexPoint, IndexError> {
        self.check_member(class, anchor)?;
        let phi = self.function(anchor)?;
        let g = Self::diameter(phi);
        if gauge >= g {
            return Ok(anchor.clone());
        }
        if phi.is_zero() {
            return Ok(Self::point(TestFunction::bump(0.0, 0.5 * gauge)?));
        }
        Ok(anchor.shrink(gauge / g))
    }

    fn probe(
        &self,
        class: &FilterClass,
        anchor: &IndexPoint,
        len: usize,
    ) -> Result<super::NullSequence, IndexError> {
        self.check_member(class, anchor)?;
        let g = Self::diameter(self.function(anchor)?).min(1.0);
        let points = (0..len)
            .map(|k| self.point_with_gauge(class, anchor, g * (-(k as f64)).exp2()))
            .collect::<Result<_, _>>()?;
        Ok(super::NullSequence {
            points,
            class: *class,
            anchor: anchor.clone(),
        })
    }

    fn sample_point(&self, rng: &mut IndexRng) -> IndexPoint {
        if rng.random_bool(0.05) {
            return Self::point(TestFunction::new(0.0, 1.0, vec![]).expect("zero function"));
        }
        Self::point(Self::random_function(rng, 3.0))
    }

    fn sample_class(&self, rng: &mut IndexRng) -> FilterClass {
        if rng.random_bool(0.1) {
            return self.whole();
        }
        FilterClass::Diameter(log_uniform(rng, 1.0, 1e6) as u32)
    }

    fn class_witness(&self, class: &FilterClass) -> Option<IndexPoint> {
        let n = Self::level(class)?;
        let diam = Self::bound(n).min(1.0);
        TestFunction::bump(0.0, 0.5 * diam).ok().map(Self::point)
    }

    fn sample_member(&self, class: &FilterClass, rng: &mut IndexRng) -> Option<IndexPoint> {
        let n = Self::level(class)?;
        Some(Self::point(Self::random_function(
            rng,
            Self::bound(n).min(3.0),
        )))
    }

    fn sample_member_below(
        &self,
        class: &FilterClass,
        e: &IndexPoint,
        rng: &mut IndexRng,
    ) -> Option<IndexPoint> {
        let n = Self::level(class)?;
        let top = Self::bound(n).min(Self::diameter(self.function(e).ok()?));
        Some(Self::point(Self::random_function(rng, top)))
    }
}
