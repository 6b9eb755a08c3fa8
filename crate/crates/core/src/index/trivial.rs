use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{log_uniform, FilterClass, IndexError, IndexKind, IndexPoint, IndexRng, IndexSet};

/// An opaque test-object identifier together with its moment order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrivialTag {
    pub id: u64,
    pub order: u32,
}

/// Pairs `(r, tag)`: `(r, a) <= (s, b)` iff `a = b` and `r <= s`; the
/// classes `I_q` collect the pairs whose tag has order at least `q`.
#[derive(Debug, Clone)]
pub struct TrivialIndex {
    tags: Vec<TrivialTag>,
}

impl TrivialIndex {
    /// Tags `0..count`, with orders cycling through `0..=max_order`.
    pub fn new(count: u64, max_order: u32) -> Self {
        let count = count.max(1);
        let tags = (0..count)
            .map(|id| TrivialTag {
                id,
                order: (id % (max_order as u64 + 1)) as u32,
            })
            .collect();
        TrivialIndex { tags }
    }

    pub fn tags(&self) -> &[TrivialTag] {
        &self.tags
    }

    pub fn point(r: f64, tag: TrivialTag) -> IndexPoint {
        IndexPoint::Trivial { r, tag }
    }

    fn parts(&self, p: &IndexPoint) -> Result<(f64, TrivialTag), IndexError> {
        match p {
            IndexPoint::Trivial { r, tag } => Ok((*r, *tag)),
            other => Err(IndexError::KindMismatch {
                expected: IndexKind::Trivial,
                found: other.kind(),
            }),
        }
    }

    fn level(class: &FilterClass) -> Option<u32> {
        match class {
            FilterClass::TagOrder(q) => Some(*q),
            _ => None,
        }
    }

    fn max_order(&self) -> u32 {
        self.tags.iter().map(|t| t.order).max().unwrap_or(0)
    }
}

impl Default for TrivialIndex {
    fn default() -> Self {
        Self::new(12, 5)
    }
}

impl IndexSet for TrivialIndex {
    fn kind(&self) -> IndexKind {
        IndexKind::Trivial
    }

    fn leq(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError> {
        let (r, a) = self.parts(i)?;
        let (s, b) = self.parts(j)?;
        Ok(a == b && r <= s)
    }

    fn same(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError> {
        Ok(self.parts(i)? == self.parts(j)?)
    }

    fn contains(&self, class: &FilterClass, point: &IndexPoint) -> bool {
        match (Self::level(class), point) {
            (Some(q), IndexPoint::Trivial { r, tag }) => *r > 0.0 && *r <= 1.0 && tag.order >= q,
            _ => false,
        }
    }

    fn whole(&self) -> FilterClass {
        FilterClass::TagOrder(0)
    }

    fn filter_base(&self, limit: usize) -> Vec<FilterClass> {
        (0..=self.max_order())
            .take(limit)
            .map(FilterClass::TagOrder)
            .collect()
    }

    fn refine(&self, a: &FilterClass, b: &FilterClass) -> Result<FilterClass, IndexError> {
        match (Self::level(a), Self::level(b)) {
            (Some(p), Some(q)) => Ok(FilterClass::TagOrder(p.max(q))),
            _ => Err(IndexError::Precondition(format!(
                "{a} or {b} is not a tag-order class"
            ))),
        }
    }

    fn class_subset(&self, a: &FilterClass, b: &FilterClass) -> bool {
        matches!(
            (Self::level(a), Self::level(b)),
            (Some(p), Some(q)) if p >= q
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
        let (rb, tag) = self.parts(b)?;
        let (rc, _) = self.parts(c)?;
        Ok(Self::point(0.5 * rb.min(rc), tag))
    }

    fn underline(&self, i: &IndexPoint) -> f64 {
        self.parts(i).map(|(r, _)| r).unwrap_or(1.0)
    }

    fn sample_point(&self, rng: &mut IndexRng) -> IndexPoint {
        let tag = self.tags[rng.random_range(0..self.tags.len())];
        Self::point(log_uniform(rng, 1e-9, 1.0), tag)
    }

    fn sample_class(&self, rng: &mut IndexRng) -> FilterClass {
        FilterClass::TagOrder(rng.random_range(0..=self.max_order()))
    }

    fn class_witness(&self, class: &FilterClass) -> Option<IndexPoint> {
        let q = Self::level(class)?;
        self.tags
            .iter()
            .find(|t| t.order >= q)
            .map(|t| Self::point(1.0, *t))
    }

    fn sample_member(&self, class: &FilterClass, rng: &mut IndexRng) -> Option<IndexPoint> {
        let q = Self::level(class)?;
        let members: Vec<&TrivialTag> = self.tags.iter().filter(|t| t.order >= q).collect();
        if members.is_empty() {
            return None;
        }
        let tag = *members[rng.random_range(0..members.len())];
        Some(Self::point(log_uniform(rng, 1e-9, 1.0), tag))
    }

    fn sample_member_below(
        &self,
        class: &FilterClass,
        e: &IndexPoint,
        rng: &mut IndexRng,
    ) -> Option<IndexPoint> {
        if !self.contains(class, e) {
            return None;
        }
        let t: f64 = rng.random_range(0.01..=1.0);
        Some(e.shrink(t))
    }
}
