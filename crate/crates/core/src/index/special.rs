use rand::Rng;

use super::{log_uniform, FilterClass, IndexError, IndexKind, IndexPoint, IndexRng, IndexSet};

/// `I = (0,1]` with the real order and the tails `(0, e0]` as classes.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpecialIndex;

impl SpecialIndex {
    pub fn new() -> Self {
        SpecialIndex
    }

    fn value(&self, p: &IndexPoint) -> Result<f64, IndexError> {
        match p {
            IndexPoint::Special(r) => Ok(*r),
            other => Err(IndexError::KindMismatch {
                expected: IndexKind::Special,
                found: other.kind(),
            }),
        }
    }
}

fn tail(class: &FilterClass) -> Option<f64> {
    match class {
        FilterClass::Tail(e) => Some(*e),
        _ => None,
    }
}

impl IndexSet for SpecialIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::Special
    }

    fn leq(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError> {
        Ok(self.value(i)? <= self.value(j)?)
    }

    fn same(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError> {
        Ok(self.value(i)? == self.value(j)?)
    }

    fn contains(&self, class: &FilterClass, point: &IndexPoint) -> bool {
        match (tail(class), point) {
            (Some(e), IndexPoint::Special(r)) => *r > 0.0 && *r <= e && *r <= 1.0,
            _ => false,
        }
    }

    fn whole(&self) -> FilterClass {
        FilterClass::Tail(1.0)
    }

    fn filter_base(&self, limit: usize) -> Vec<FilterClass> {
        (0..limit)
            .map(|k| FilterClass::Tail((-(k as f64)).exp2()))
            .collect()
    }

    fn refine(&self, a: &FilterClass, b: &FilterClass) -> Result<FilterClass, IndexError> {
        match (tail(a), tail(b)) {
            (Some(x), Some(y)) => Ok(FilterClass::Tail(x.min(y))),
            _ => Err(IndexError::Precondition(format!(
                "{a} or {b} is not a tail class"
            ))),
        }
    }

    fn class_subset(&self, a: &FilterClass, b: &FilterClass) -> bool {
        matches!((tail(a), tail(b)), (Some(x), Some(y)) if x <= y)
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
        let m = self.value(b)?.min(self.value(c)?);
        Ok(IndexPoint::Special(0.5 * m))
    }

    fn underline(&self, i: &IndexPoint) -> f64 {
        self.value(i).unwrap_or(1.0)
    }

    fn sample_point(&self, rng: &mut IndexRng) -> IndexPoint {
        if rng.random_bool(0.1) {
            return IndexPoint::Special(1.0);
        }
        IndexPoint::Special(log_uniform(rng, 1e-9, 1.0))
    }

    fn sample_class(&self, rng: &mut IndexRng) -> FilterClass {
        if rng.random_bool(0.1) {
            return self.whole();
        }
        FilterClass::Tail(log_uniform(rng, 1e-6, 1.0))
    }

    fn class_witness(&self, class: &FilterClass) -> Option<IndexPoint> {
        let e = tail(class)?;
        let p = IndexPoint::Special(e.min(1.0));
        self.contains(class, &p).then_some(p)
    }

    fn sample_member(&self, class: &FilterClass, rng: &mut IndexRng) -> Option<IndexPoint> {
        let w = self.class_witness(class)?;
        let t: f64 = rng.random_range(0.01..=1.0);
        Some(w.shrink(t))
    }

    fn sample_member_below(
        &self,
        class: &FilterClass,
        e: &IndexPoint,
        rng: &mut IndexRng,
    ) -> Option<IndexPoint> {
        let top = tail(class)?.min(self.value(e).ok()?).min(1.0);
        if top <= 0.0 {
            return None;
        }
        let t: f64 = rng.random_range(0.01..=1.0);
        Some(IndexPoint::Special(top * t))
    }
}
