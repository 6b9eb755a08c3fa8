use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;

use super::{
    log_uniform, FilterClass, IndexError, IndexKind, IndexPoint, IndexRng, IndexSet, Mollifier,
};
use crate::testfn::{make_aq, MAX_MOLLIFIER_ORDER};

/// Points `r ⊙ phi` with `phi` a unit-mass mollifier; `eps <= e` iff
/// `eps = t ⊙ e` for some `t <= 1`. Classes are the moment classes `A_q`.
///
/// Only `q <= MAX_MOLLIFIER_ORDER` is representable: membership beyond that
/// order is not checked.
#[derive(Debug, Clone)]
pub struct FullIndex {
    profile: Mollifier,
    pool: Arc<Vec<Mollifier>>,
}

impl FullIndex {
    /// The instance anchored at the standard bump.
    pub fn new() -> Self {
        Self::with_profile(Mollifier::standard())
    }

    /// The instance whose default anchor is `1 ⊙ profile`.
    pub fn with_profile(profile: Mollifier) -> Self {
        let mut pool = vec![profile.clone()];
        let std = Mollifier::standard();
        pool.push(std.clone());
        pool.push(
            Mollifier::new(std.function().scale(2.0).expect("positive scale"))
                .expect("dilation keeps unit mass"),
        );
        pool.push(Mollifier::new(std.function().translate(0.3)).expect("translation keeps mass"));
        for q in [2, 3, 4, 6] {
            if let Ok(phi) = make_aq(q, 1.0) {
                pool.push(Mollifier::new(phi).expect("A_q profile has unit mass"));
            }
        }
        if let Ok(phi) = make_aq(2, 0.5) {
            pool.push(Mollifier::new(phi.translate(0.1)).expect("unit mass"));
        }
        FullIndex {
            profile,
            pool: Arc::new(pool),
        }
    }

    pub fn profile(&self) -> &Mollifier {
        &self.profile
    }

    /// The representable profiles used by samplers and witnesses.
    pub fn profiles(&self) -> &[Mollifier] {
        &self.pool
    }

    pub fn point(&self, scale: f64, mollifier: &Mollifier) -> IndexPoint {
        IndexPoint::Full {
            scale,
            mollifier: mollifier.clone(),
        }
    }

    fn parts<'a>(&self, p: &'a IndexPoint) -> Result<(f64, &'a Mollifier), IndexError> {
        match p {
            IndexPoint::Full { scale, mollifier } => Ok((*scale, mollifier)),
            other => Err(IndexError::KindMismatch {
                expected: IndexKind::Full,
                found: other.kind(),
            }),
        }
    }

    /// `t` with `i = t ⊙ j`, when the two points lie on a common ray.
    pub fn ratio(&self, i: &IndexPoint, j: &IndexPoint) -> Result<Option<f64>, IndexError> {
        let (r, phi) = self.parts(i)?;
        let (s, psi) = self.parts(j)?;
        Ok(phi.dilation_ratio(psi).map(|lambda| r * lambda / s))
    }

    fn order_class(class: &FilterClass) -> Option<u32> {
        match class {
            FilterClass::Moments(q) => Some(*q),
            _ => None,
        }
    }
}

impl Default for FullIndex {
    fn default() -> Self {
        Self::new()
    }
}

impl IndexSet for FullIndex {
    fn as_full(&self) -> Option<&FullIndex> {
        Some(self)
    }

    fn kind(&self) -> IndexKind {
        IndexKind::Full
    }

    fn leq(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError> {
        let (r, phi) = self.parts(i)?;
        let (s, psi) = self.parts(j)?;
        Ok(match phi.dilation_ratio(psi) {
            Some(lambda) => r * lambda <= s,
            None => false,
        })
    }

    fn same(&self, i: &IndexPoint, j: &IndexPoint) -> Result<bool, IndexError> {
        let (r, phi) = self.parts(i)?;
        let (s, psi) = self.parts(j)?;
        Ok(match phi.dilation_ratio(psi) {
            Some(lambda) if lambda == 1.0 => r == s,
            Some(lambda) => ((r * lambda - s) / s).abs() <= 1e-12,
            None => false,
        })
    }

    fn contains(&self, class: &FilterClass, point: &IndexPoint) -> bool {
        match (Self::order_class(class), point) {
            (Some(q), IndexPoint::Full { scale, mollifier }) => {
                *scale > 0.0 && q <= MAX_MOLLIFIER_ORDER && mollifier.order() >= q
            }
            _ => false,
        }
    }

    fn whole(&self) -> FilterClass {
        FilterClass::Moments(0)
    }

    fn filter_base(&self, limit: usize) -> Vec<FilterClass> {
        (0..=MAX_MOLLIFIER_ORDER)
            .take(limit)
            .map(FilterClass::Moments)
            .collect()
    }

    fn refine(&self, a: &FilterClass, b: &FilterClass) -> Result<FilterClass, IndexError> {
        match (Self::order_class(a), Self::order_class(b)) {
            (Some(p), Some(q)) => Ok(FilterClass::Moments(p.max(q))),
            _ => Err(IndexError::Precondition(format!(
                "{a} or {b} is not a moment class"
            ))),
        }
    }

    fn class_subset(&self, a: &FilterClass, b: &FilterClass) -> bool {
        matches!(
            (Self::order_class(a), Self::order_class(b)),
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
        // on the ray (0, e] both are t ⊙ e; halve the smaller ratio
        let tb = self.ratio(b, e)?.expect("b <= e gives a ratio");
        let tc = self.ratio(c, e)?.expect("c <= e gives a ratio");
        let (s, phi) = self.parts(e)?;
        Ok(self.point(0.5 * tb.min(tc) * s, phi))
    }

    fn underline(&self, i: &IndexPoint) -> f64 {
        match self.parts(i) {
            Ok((r, phi)) => (r * phi.function().diam_supp()).min(1.0),
            Err(_) => 1.0,
        }
    }

    fn sample_point(&self, rng: &mut IndexRng) -> IndexPoint {
        let phi = self.pool.choose(rng).expect("pool is non-empty");
        let d = phi.function().diam_supp();
        let gauge = log_uniform(rng, 1e-9, 2.0);
        self.point(gauge / d, phi)
    }

    fn sample_class(&self, rng: &mut IndexRng) -> FilterClass {
        FilterClass::Moments(rng.random_range(0..=5))
    }

    fn class_witness(&self, class: &FilterClass) -> Option<IndexPoint> {
        let q = Self::order_class(class)?;
        if self.profile.order() >= q {
            return Some(self.point(1.0, &self.profile));
        }
        self.pool
            .iter()
            .find(|m| m.order() >= q)
            .map(|m| self.point(1.0, m))
    }

    fn sample_member(&self, class: &FilterClass, rng: &mut IndexRng) -> Option<IndexPoint> {
        let q = Self::order_class(class)?;
        let members: Vec<&Mollifier> = self.pool.iter().filter(|m| m.order() >= q).collect();
        let phi = members.choose(rng)?;
        let d = phi.function().diam_supp();
        Some(self.point(log_uniform(rng, 1e-9, 2.0) / d, phi))
    }

    fn sample_member_below(
        &self,
        class: &FilterClass,
        e: &IndexPoint,
        rng: &mut IndexRng,
    ) -> Option<IndexPoint> {
        // (0, e] is the ray through e, so A_{<=e} is empty unless e is in A
        if !self.contains(class, e) {
            return None;
        }
        let t: f64 = rng.random_range(0.01..=1.0);
        Some(e.shrink(t))
    }
}

/// The standard-bump profile rescaled, used in examples: `phi` with the
/// requested support diameter.
#[cfg(test)]
fn profile_with_diameter(diam: f64) -> Result<Mollifier, IndexError> {
    let phi = crate::testfn::TestFunction::standard_mollifier().scale(0.5 * diam)?;
    Mollifier::new(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn order_on_a_ray_and_across_profiles() {
        let s = FullIndex::new();
        let phi = s.profile().clone();
        let psi = Mollifier::new(phi.function().translate(0.25)).unwrap();
        assert!(s.leq(&s.point(0.3, &phi), &s.point(0.6, &phi)).unwrap());
        assert!(!s.leq(&s.point(0.3, &phi), &s.point(0.6, &psi)).unwrap());
        assert!(!s.leq(&s.point(0.6, &phi), &s.point(0.3, &phi)).unwrap());
    }

    #[test]
    fn equal_points_through_different_handles() {
        let s = FullIndex::new();
        let phi = s.profile().clone();
        let phi2 = Mollifier::new(phi.function().scale(2.0).unwrap()).unwrap();
        // 0.5 ⊙ (2 ⊙ phi) = 1 ⊙ phi
        let a = s.point(0.5, &phi2);
        let b = s.point(1.0, &phi);
        assert!(s.leq(&a, &b).unwrap() && s.leq(&b, &a).unwrap());
        assert!(s.same(&a, &b).unwrap());
    }

    #[test]
    fn gauge_and_witness() {
        let s = FullIndex::new();
        let phi = profile_with_diameter(2.0).unwrap();
        assert!((s.underline(&s.point(0.1, &phi)) - 0.2).abs() < 1e-15);
        let e = s.point(1.0, s.profile());
        let b = e.shrink(0.4);
        let c = e.shrink(0.6);
        let d = s
            .down_witness(&b, &c, &FilterClass::Moments(0), &e)
            .unwrap();
        assert!((s.ratio(&d, &e).unwrap().unwrap() - 0.2).abs() < 1e-15);
        assert!(s.lt(&d, &b).unwrap() && s.lt(&d, &c).unwrap());
    }

    #[test]
    fn moment_classes_nest() {
        let s = FullIndex::new();
        assert_eq!(
            s.refine(&FilterClass::Moments(2), &FilterClass::Moments(5))
                .unwrap(),
            FilterClass::Moments(5)
        );
        for q in 0..=MAX_MOLLIFIER_ORDER {
            let w = s.class_witness(&FilterClass::Moments(q)).unwrap();
            for p in 0..=q {
                assert!(s.contains(&FilterClass::Moments(p), &w));
            }
        }
        // the standard bump is even, so its first moment vanishes but not the second
        assert_eq!(s.profile().order(), 1);
    }

    #[test]
    fn sampled_members_respect_class() {
        let s = FullIndex::new();
        let mut rng = IndexRng::seed_from_u64(3);
        for _ in 0..100 {
            let a = s.sample_class(&mut rng);
            let p = s.sample_member(&a, &mut rng).unwrap();
            assert!(s.contains(&a, &p));
        }
    }
}
