//! Sups over compact sets and the exponent bookkeeping on atoms.

use num_traits::Zero;

use super::repnet::{ratf, Atom, EvalCtx, KernelFactor, RepNet};
use super::{check_supported, ColombeauError};
use crate::bigo::{sup_abs, SupEstimate};
use crate::index::{IndexPoint, IndexSet};
use crate::jet::MAX_ORDER;

/// Focus points spread over each narrow kernel support.
const FOCUS_PER_KERNEL: usize = 33;
const VANISH_TOL: f64 = 1e-12;

/// `sup_{x∈K} |d^alpha u_eps(x)|` on a Chebyshev grid refined around the
/// maximum, with extra points on every kernel support.
pub fn sup_on_k(
    u: &RepNet,
    k: (f64, f64),
    alpha: u32,
    set: &dyn IndexSet,
    eps: &IndexPoint,
) -> Result<SupEstimate, ColombeauError> {
    check_supported(set)?;
    if !u.domain().contains_compact(k) {
        return Err(ColombeauError::NotCompactIn {
            k,
            omega: u.domain(),
        });
    }
    let omega_eps = u.domain_at(eps);
    if !omega_eps.contains_compact(k) {
        return Err(ColombeauError::DomainShrink {
            eps: eps.to_string(),
            k,
            omega_eps,
        });
    }
    u.check_order(alpha)?;
    let ctx = EvalCtx::new(set, eps)?;
    Ok(sup_with_ctx(u, k, alpha, &ctx))
}

pub(crate) fn sup_with_ctx(u: &RepNet, k: (f64, f64), alpha: u32, ctx: &EvalCtx) -> SupEstimate {
    let mut windows: Vec<(f64, f64)> = Vec::new();
    for a in u.atoms() {
        for f in &a.kernels {
            let w = ctx.gauge.powf(ratf(f.s));
            let (s0, s1) = f.kernel.function(ctx).support();
            let win = (f.shift + w * s0, f.shift + w * s1);
            if !windows.contains(&win) {
                windows.push(win);
            }
        }
    }
    let mut focus = Vec::with_capacity(windows.len() * (FOCUS_PER_KERNEL + 1));
    for (lo, hi) in windows {
        let step = (hi - lo) / (FOCUS_PER_KERNEL - 1) as f64;
        focus.extend((0..FOCUS_PER_KERNEL).map(|i| lo + i as f64 * step));
        focus.push(0.5 * (lo + hi));
    }
    let n = alpha as usize;
    sup_abs(&|x| u.eval(ctx, x, n), k, &focus)
}

/// Growth exponent of one atom on `K`: `sup_K |atom_eps| ~ u^{-e}`, or `None`
/// when the atom vanishes on `K` for all small gauges.
///
/// Shrinking kernels (`s > 0`, `j >= 0`) must share a centre `c ∈ K`; the
/// smooth part (polynomial times the fixed kernels) vanishing to order `m`
/// at `c` gains `s_max * m`. Cumulative kernels are bounded and only matter
/// where they vanish.
fn atom_exponent(a: &Atom, k: (f64, f64), ctx: &EvalCtx) -> Option<f64> {
    let p = ratf(a.p);
    let shrinking: Vec<&KernelFactor> = a
        .kernels
        .iter()
        .filter(|f| f.is_compact() && !f.s.is_zero())
        .collect();
    let steps = a
        .kernels
        .iter()
        .filter(|f| !f.is_compact() && !f.s.is_zero());
    let fixed: Vec<&KernelFactor> = a.kernels.iter().filter(|f| f.s.is_zero()).collect();
    if let Some(first) = shrinking.first() {
        let c = first.shift;
        if shrinking.iter().any(|f| f.shift != c) || c < k.0 || c > k.1 {
            return None;
        }
        if steps.into_iter().any(|f| f.shift > c) {
            return None;
        }
        let s_max = shrinking.iter().map(|f| ratf(f.s)).fold(0.0, f64::max);
        let smooth = fixed.iter().fold(a.poly.jet(c, MAX_ORDER), |acc, f| {
            acc * f.jet(ctx, c, MAX_ORDER)
        });
        let scale = (0..=MAX_ORDER)
            .map(|m| smooth.coeff(m).abs())
            .fold(0.0, f64::max);
        let m0 = (0..=MAX_ORDER).find(|&m| smooth.coeff(m).abs() > VANISH_TOL * scale)?;
        return Some(-p - s_max * m0 as f64);
    }
    if steps.into_iter().any(|f| k.1 < f.shift) {
        return None;
    }
    for f in fixed.iter().filter(|f| f.is_compact()) {
        let (lo, hi) = f.support(ctx).expect("compact factor");
        if hi < k.0 || lo > k.1 {
            return None;
        }
    }
    Some(-p)
}

/// Bookkept growth exponent of `sup_K |d^alpha u_eps|`: the worst atom of the
/// `alpha`-th derivative; `None` when every atom vanishes on `K`.
pub fn growth_exponent(u: &RepNet, k: (f64, f64), alpha: u32, ctx: &EvalCtx) -> Option<f64> {
    u.derive_n(alpha)
        .atoms()
        .iter()
        .filter_map(|a| atom_exponent(a, k, ctx))
        .reduce(f64::max)
}

/// The least natural `N` with `u^{-e} = O(u^{-N})`.
pub fn order_from_exponent(e: Option<f64>) -> u32 {
    match e {
        Some(e) if e > 0.0 => (e - 1e-9).ceil() as u32,
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colombeau::{embed_delta, embed_smooth, Interval, Poly};
    use crate::index::SpecialIndex;
    use crate::testfn::TestFunction;

    #[test]
    fn sup_of_square_on_interval() {
        let u = embed_smooth(Poly::monomial(1.0, 2), Interval::REAL_LINE);
        for g in [1.0, 0.01] {
            let s = sup_on_k(&u, (-1.0, 2.0), 0, &SpecialIndex, &IndexPoint::Special(g)).unwrap();
            assert_eq!(s.value, 4.0);
        }
    }

    #[test]
    fn delta_peak_and_excluded_support() {
        let phi = TestFunction::standard_mollifier();
        let u = embed_delta(&phi, Interval::REAL_LINE).unwrap();
        let g = 2f64.powi(-10);
        let e = IndexPoint::Special(g);
        let s = sup_on_k(&u, (-1.0, 1.0), 0, &SpecialIndex, &e).unwrap();
        // the standard bump peaks at its centre
        let expect = phi.eval(0.0, 0) / g;
        assert!((s.value - expect).abs() <= 0.01 * expect);
        let far = sup_on_k(&u, (1.0, 2.0), 0, &SpecialIndex, &e).unwrap();
        assert_eq!(far.value, 0.0);
    }

    #[test]
    fn exponents_of_canonical_nets() {
        let phi = TestFunction::standard_mollifier();
        let d = embed_delta(&phi, Interval::REAL_LINE).unwrap();
        let x = embed_smooth(Poly::monomial(1.0, 1), Interval::REAL_LINE);
        let ctx = EvalCtx::with_gauge(0.5);
        let k = (-1.0, 1.0);
        for alpha in 0..=3 {
            assert_eq!(
                growth_exponent(&d, k, alpha, &ctx),
                Some(1.0 + alpha as f64)
            );
        }
        assert_eq!(growth_exponent(&d.mul(&d).unwrap(), k, 0, &ctx), Some(2.0));
        assert_eq!(growth_exponent(&x.mul(&d).unwrap(), k, 0, &ctx), Some(0.0));
        assert_eq!(growth_exponent(&x, k, 0, &ctx), Some(0.0));
        assert_eq!(growth_exponent(&x, k, 2, &ctx), None);
        assert_eq!(growth_exponent(&d, (1.0, 2.0), 0, &ctx), None);
    }

    #[test]
    fn domain_errors() {
        let u = embed_smooth(Poly::constant(1.0), Interval::new(0.0, 1.0));
        let e = IndexPoint::Special(0.5);
        assert!(matches!(
            sup_on_k(&u, (0.0, 0.5), 0, &SpecialIndex, &e),
            Err(ColombeauError::NotCompactIn { .. })
        ));
        use crate::index::{FullIndex, Mollifier};
        let f = FullIndex::new();
        let big = f.point(0.3, &Mollifier::standard());
        match sup_on_k(&u, (0.2, 0.8), 0, &f, &big) {
            Err(ColombeauError::DomainShrink { eps, .. }) => assert!(eps.contains("0.3")),
            other => panic!("expected a domain-shrink error, got {other:?}"),
        }
        assert!(sup_on_k(
            &u,
            (0.2, 0.8),
            0,
            &f,
            &f.point(0.01, &Mollifier::standard())
        )
        .is_ok());
    }
}
