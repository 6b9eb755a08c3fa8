//! Sequences tending to the empty set, decided on finite prefixes.

use super::{FilterClass, IndexError, IndexPoint, IndexSet, NullSequence};

/// Default prefix length for probes.
pub const PROBE_LEN: usize = 40;
/// Gauges at or below this value count as having reached 0.
pub const GAUGE_FLOOR: f64 = 1e-12;

const MIN_PREFIX: usize = 4;

/// Whether the prefix `seq` (all in `A_{<=a}`) tends to the empty set.
///
/// Every entry among the first half is used as a threshold `eps0`, and a tail
/// covering at least the last quarter of the prefix must lie strictly below
/// it. In addition the maxima of the gauges over consecutive quarters must
/// decrease strictly until they reach [`GAUGE_FLOOR`], and the last quarter
/// must sit at most half as high as the second one.
pub fn tends_to_emptyset(
    seq: &[IndexPoint],
    class: &FilterClass,
    anchor: &IndexPoint,
    set: &dyn IndexSet,
) -> Result<bool, IndexError> {
    if seq.len() < MIN_PREFIX {
        return Err(IndexError::Precondition(format!(
            "a prefix of {} terms is too short to decide (need {MIN_PREFIX})",
            seq.len()
        )));
    }
    set.check_member(class, anchor)?;
    for z in seq {
        set.check_member(class, z)?;
        if !set.leq(z, anchor)? {
            return Err(IndexError::Precondition(format!(
                "{z} is not below {anchor}"
            )));
        }
    }
    let n = seq.len();
    let quarter = n / 4;
    let gauges: Vec<f64> = seq.iter().map(|z| set.underline(z)).collect();

    let blocks: Vec<f64> = (0..4)
        .map(|b| {
            let end = if b == 3 { n } else { (b + 1) * quarter };
            gauges[b * quarter..end].iter().cloned().fold(0.0, f64::max)
        })
        .collect();
    for w in blocks.windows(2) {
        if w[0] <= GAUGE_FLOOR {
            break;
        }
        if w[1] >= w[0] {
            return Ok(false);
        }
    }
    // a limit above zero shows up as stalled decay in the second half
    if blocks[3] > GAUGE_FLOOR && blocks[3] > 0.5 * blocks[1] {
        return Ok(false);
    }

    for eps0 in &seq[..n / 2] {
        if set.underline(eps0) <= GAUGE_FLOOR {
            continue;
        }
        // K = first index from which every later term is strictly below eps0
        let mut k = n;
        while k > 0 && set.lt(&seq[k - 1], eps0)? {
            k -= 1;
        }
        if n - k < quarter.max(1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A strictly decreasing subsequence, by taking `z_0` and then repeatedly the
/// first later term strictly below the current one.
///
/// Requires the host down-set to be totally pre-ordered on the given terms.
pub fn extract_decreasing(
    seq: &NullSequence,
    set: &dyn IndexSet,
) -> Result<NullSequence, IndexError> {
    let z = &seq.points;
    for (i, b) in z.iter().enumerate() {
        for c in &z[i + 1..] {
            let total = (set.lt(b, c)? || set.leq(c, b)?) && (set.lt(c, b)? || set.leq(b, c)?);
            if !total {
                return Err(IndexError::Unsupported(format!(
                    "{b} and {c} are incomparable; the down-set is not totally pre-ordered"
                )));
            }
        }
    }
    let mut out = Vec::new();
    if let Some(first) = z.first() {
        out.push(first.clone());
        let mut cur = 0;
        while let Some(next) = (cur + 1..z.len()).find(|&k| set.lt(&z[k], &z[cur]).unwrap_or(false))
        {
            out.push(z[next].clone());
            cur = next;
        }
    }
    Ok(NullSequence {
        points: out,
        class: seq.class,
        anchor: seq.anchor.clone(),
    })
}
