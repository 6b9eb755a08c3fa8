//! Moderateness: `sup_K |d^alpha u_eps| = O(u^{-N})`, bookkept and fitted.

use super::analysis::{growth_exponent, order_from_exponent, sup_on_k};
use super::repnet::{EvalCtx, RepNet};
use super::{check_supported, exhaustion, ColombeauError, GenConfig};
use crate::bigo::Decision;
use crate::index::{default_anchor, FullIndex, IndexPoint, IndexSet};
use crate::testfn::MAX_MOLLIFIER_ORDER;

/// Largest `N` searched by the `(∃N, q)` form.
const N_SEARCH: u32 = 16;

/// One probe term of a moderateness fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub k: u32,
    pub gauge: f64,
    pub sup: f64,
    /// Slope of `ln sup` against `ln gauge` from the previous row.
    pub slope: Option<f64>,
}

/// The full-instance quantifier forms for one `(K, alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullForms {
    /// Least `N` (and least `q <= q_max` for it) with
    /// `sup = O(r^{-N})` for every profile in `A_q`.
    pub exists_nq: Option<(u32, u32)>,
    /// Least `N` with the same bound for every profile in `A_N`.
    pub n_eq_q: Option<u32>,
    /// `(order, fitted exponent)` per profile of the pool.
    pub profiles: Vec<(u32, Option<f64>)>,
}

impl FullForms {
    pub fn agree(&self) -> bool {
        self.exists_nq.map(|(n, _)| n) == self.n_eq_q
    }
}

#[derive(Debug, Clone)]
pub struct ModerateEntry {
    pub k: (f64, f64),
    pub alpha: u32,
    /// Bookkept exponent; `None` when the derivative vanishes on `K`.
    pub exponent: Option<f64>,
    pub n_symbolic: u32,
    /// Fitted slope of `ln sup` against `ln gauge`; `None` when the sups vanish.
    pub slope: Option<f64>,
    pub n_numeric: u32,
    pub agree: bool,
    pub rows: Vec<ProbeRow>,
    pub full: Option<FullForms>,
}

#[derive(Debug, Clone)]
pub struct ModerateVerdict {
    pub decision: Decision,
    pub entries: Vec<ModerateEntry>,
}

impl ModerateVerdict {
    pub fn holds(&self) -> bool {
        self.decision == Decision::Holds
    }

    /// The certificate `N` at derivative order `alpha`: the worst over `K`.
    pub fn n(&self, alpha: u32) -> Option<u32> {
        self.entries
            .iter()
            .filter(|e| e.alpha == alpha)
            .map(|e| e.n_symbolic)
            .max()
    }
}

/// Least-squares slope of `ln sup` against `ln gauge` over the non-zero rows;
/// `None` when fewer than half the rows are non-zero.
fn fit_slope(rows: &[ProbeRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.sup > 0.0 && r.sup.is_finite())
        .map(|r| (r.gauge.ln(), r.sup.ln()))
        .collect();
    if pts.len() < 2 || 2 * pts.len() < rows.len() {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    (sxx > 0.0).then(|| sxy / sxx)
}

fn rows_along(
    u: &RepNet,
    k: (f64, f64),
    alpha: u32,
    set: &dyn IndexSet,
    points: &[(u32, IndexPoint)],
    cfg: &GenConfig,
) -> Result<Vec<ProbeRow>, ColombeauError> {
    let sups = cfg.exec.map(points, |(_, p)| {
        sup_on_k(u, k, alpha, set, p).map(|s| s.value)
    });
    let mut rows: Vec<ProbeRow> = Vec::with_capacity(points.len());
    for ((kk, p), sup) in points.iter().zip(sups) {
        let sup = sup?;
        let gauge = set.underline(p);
        let slope = rows.last().and_then(|r| {
            (r.sup > 0.0 && sup > 0.0 && r.gauge != gauge)
                .then(|| (sup.ln() - r.sup.ln()) / (gauge.ln() - r.gauge.ln()))
        });
        rows.push(ProbeRow {
            k: *kk,
            gauge,
            sup,
            slope,
        });
    }
    Ok(rows)
}

fn ray(anchor: &IndexPoint, cfg: &GenConfig) -> Vec<(u32, IndexPoint)> {
    (cfg.kmin..=cfg.kmax)
        .map(|k| (k, anchor.shrink((-(k as f64)).exp2())))
        .collect()
}

/// Both full-instance forms of moderateness at one `(K, alpha)`: the
/// `(∃N, q)` form and the `N = q` form, each over the profile pool, along
/// `r ⊙ phi` with gauges `2^{-k}`.
///
/// The `N = q` form only searches `N` up to the largest representable moment
/// class.
pub fn full_forms(
    u: &RepNet,
    full: &FullIndex,
    k: (f64, f64),
    alpha: u32,
    cfg: &GenConfig,
) -> Result<FullForms, ColombeauError> {
    let mut profiles = Vec::with_capacity(full.profiles().len());
    for phi in full.profiles() {
        let d = phi.function().diam_supp();
        let points: Vec<(u32, IndexPoint)> = (cfg.kmin..=cfg.kmax)
            .map(|kk| (kk, full.point((-(kk as f64)).exp2() / d, phi)))
            .collect();
        let rows = rows_along(u, k, alpha, full, &points, cfg)?;
        profiles.push((phi.order(), fit_slope(&rows).map(|s| -s)));
    }
    let bounded = |n: u32, q: u32| {
        profiles
            .iter()
            .filter(|(order, _)| *order >= q)
            .all(|(_, e)| e.is_none_or(|e| e <= n as f64 + cfg.tol))
    };
    let exists_nq =
        (0..=N_SEARCH).find_map(|n| (0..=cfg.q_max).find(|&q| bounded(n, q)).map(|q| (n, q)));
    let n_eq_q = (0..=MAX_MOLLIFIER_ORDER)
        .find(|&n| profiles.iter().any(|(order, _)| *order >= n) && bounded(n, n));
    Ok(FullForms {
        exists_nq,
        n_eq_q,
        profiles,
    })
}

/// Two-track moderateness over the compact exhaustion of the domain and
/// `alpha <= alpha_max`. Holds when every bookkept exponent is matched by the
/// fitted slope within `tol` (and, in the full instance, both quantifier forms
/// agree); any mismatch makes the verdict indeterminate. Every member of the
/// atom class is moderate, so the verdict never fails.
pub fn is_moderate(
    u: &RepNet,
    set: &dyn IndexSet,
    cfg: &GenConfig,
) -> Result<ModerateVerdict, ColombeauError> {
    check_supported(set)?;
    u.check_order(cfg.alpha_max)?;
    let anchor = default_anchor(set);
    let ctx = EvalCtx::new(set, &anchor)?;
    let points = ray(&anchor, cfg);
    let mut entries = Vec::new();
    for k in exhaustion(&u.domain(), cfg.exhaustion) {
        for alpha in 0..=cfg.alpha_max {
            let exponent = growth_exponent(u, k, alpha, &ctx);
            let rows = rows_along(u, k, alpha, set, &points, cfg)?;
            let slope = fit_slope(&rows);
            let mut agree = match (exponent, slope) {
                (None, None) => true,
                (Some(e), Some(s)) => (e + s).abs() <= cfg.tol,
                _ => false,
            };
            let full = match set.as_full() {
                Some(f) => Some(full_forms(u, f, k, alpha, cfg)?),
                None => None,
            };
            agree &= full.as_ref().is_none_or(FullForms::agree);
            entries.push(ModerateEntry {
                k,
                alpha,
                exponent,
                n_symbolic: order_from_exponent(exponent),
                slope,
                n_numeric: order_from_exponent(slope.map(|s| -s - cfg.tol)),
                agree,
                rows,
                full,
            });
        }
    }
    let decision = if entries.iter().all(|e| e.agree) {
        Decision::Holds
    } else {
        Decision::Indeterminate
    };
    Ok(ModerateVerdict { decision, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colombeau::{embed_delta, embed_smooth, Interval, Poly};
    use crate::exec::Exec;
    use crate::index::SpecialIndex;
    use crate::testfn::TestFunction;

    fn cfg() -> GenConfig {
        GenConfig {
            exec: Exec::Sequential,
            ..GenConfig::default()
        }
    }

    #[test]
    fn delta_orders_and_slopes() {
        let d = embed_delta(&TestFunction::standard_mollifier(), Interval::REAL_LINE).unwrap();
        let v = is_moderate(&d, &SpecialIndex, &cfg()).unwrap();
        assert!(v.holds());
        for e in &v.entries {
            assert_eq!(e.n_symbolic, 1 + e.alpha);
            let s = e.slope.unwrap();
            assert!(
                (s + 1.0 + e.alpha as f64).abs() <= 0.1,
                "alpha {}: {s}",
                e.alpha
            );
        }
    }

    #[test]
    fn smooth_nets_have_order_zero() {
        let p = embed_smooth(Poly::new(vec![1.0, 0.0, -2.0]), Interval::REAL_LINE);
        let v = is_moderate(&p, &SpecialIndex, &cfg()).unwrap();
        assert!(v.holds());
        assert!((0..=3).all(|a| v.n(a) == Some(0)));
    }

    #[test]
    fn full_forms_agree_for_the_index_delta() {
        use crate::colombeau::Kernel;
        let d = RepNet::delta(Kernel::index(), Interval::REAL_LINE);
        let f = FullIndex::new();
        let ff = full_forms(&d, &f, (-1.0, 1.0), 1, &cfg()).unwrap();
        assert_eq!(ff.exists_nq, Some((2, 0)));
        assert_eq!(ff.n_eq_q, Some(2));
    }
}
