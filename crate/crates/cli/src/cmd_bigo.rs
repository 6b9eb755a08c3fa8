use gencol::bigo::{bigo_symbolic, parse_net, Ambient, LogNum, SymbolicNet};
use gencol::index::{FilterClass, IndexSet};
use serde_json::json;

use crate::report::{decision_word, exit_code, sci, Outcome, Table};
use crate::session::{CliError, Session};

/// Counterexample terms printed in the text report.
const SHOWN_ROWS: usize = 10;

/// `|x|` for values that may leave the `f64` range.
fn magnitude(v: LogNum) -> String {
    if v.is_zero() {
        return sci(0.0);
    }
    let x = v.log.exp();
    if x.is_finite() && x > 0.0 {
        sci(x)
    } else {
        format!("10^{:.3}", v.log / std::f64::consts::LN_10)
    }
}

fn ambient<'a>(set: &'a dyn IndexSet, session: &Session) -> Result<Ambient<'a>, CliError> {
    match session.q {
        Some(q) => {
            let class = FilterClass::Moments(q);
            let anchor = set
                .class_witness(&class)
                .ok_or_else(|| CliError::Data(format!("{class} has no members")))?;
            Ok(Ambient::with(set, class, anchor)?)
        }
        None => Ok(Ambient::new(set)),
    }
}

pub fn run(lhs: &str, rhs: &str, session: &Session) -> Result<Outcome, CliError> {
    let x = parse_net(lhs).map_err(|e| CliError::Usage(format!("lhs: {e}")))?;
    let y = parse_net(rhs).map_err(|e| CliError::Usage(format!("rhs: {e}")))?;
    let set = session.build()?;
    let amb = ambient(set.as_ref(), session)?;
    let v = bigo_symbolic(&x, &y, &amb)?;

    let mut text = format!(
        "x = {x}\ny = {y}\nindex set {} (class {}, anchor {})\nx = O(y): {}\n",
        set.kind(),
        amb.class,
        amb.anchor,
        decision_word(v.decision)
    );
    let mut table = Table::new(&["H", "k", "gauge", "|x|", "H|y|"]);
    for c in &v.counterexample {
        for p in &c.sequence.points {
            let gauge = set.underline(p);
            table.push(vec![
                sci(c.h),
                format!("{}", (-gauge.log2()).round()),
                sci(gauge),
                magnitude(eval_abs(&x, gauge)),
                magnitude(scaled(eval_abs(&y, gauge), c.h)),
            ]);
        }
    }
    if let Some(w) = &v.witness {
        text.push_str(&format!(
            "witness: |x| <= H|y| with H = {} below eps0 = {} (gauge {})\n",
            sci(w.h),
            w.eps0,
            sci(w.gauge)
        ));
    }
    if let Some(last) = v.counterexample.last() {
        text.push_str(&format!(
            "counterexample: {} strictly decreasing null sequences, one per refuted H; largest H = {}:\n",
            v.counterexample.len(),
            sci(last.h)
        ));
        let mut shown = Table::new(&table.header);
        let n = last.sequence.points.len();
        let rows = &table.rows[table.rows.len() - n..];
        shown.rows = rows.iter().take(SHOWN_ROWS).cloned().collect();
        text.push_str(&shown.render(2));
        if n > SHOWN_ROWS {
            text.push_str(&format!(
                "  ... {} more terms (all rows with --csv)\n",
                n - SHOWN_ROWS
            ));
        }
    }
    if let Some(note) = &v.note {
        text.push_str(&format!("note: {note}\n"));
    }

    let json = json!({
        "command": "bigo",
        "x": x.to_string(),
        "y": y.to_string(),
        "index": set.kind(),
        "class": amb.class.to_string(),
        "decision": v.decision,
        "mode": v.mode,
        "witness": v.witness.as_ref().map(|w| json!({
            "h": w.h,
            "eps0": w.eps0.to_string(),
            "gauge": w.gauge,
        })),
        "counterexample": v.counterexample.iter().map(|c| json!({
            "h": c.h,
            "gauges": c.sequence.points.iter().map(|p| set.underline(p)).collect::<Vec<_>>(),
            "margins": c.margins,
        })).collect::<Vec<_>>(),
        "note": v.note,
    });
    Ok(Outcome {
        code: exit_code(v.decision),
        text,
        json,
        csv: (!table.rows.is_empty()).then_some(table),
    })
}

fn eval_abs(net: &SymbolicNet, gauge: f64) -> LogNum {
    net.eval_log(-gauge.ln()).abs()
}

fn scaled(v: LogNum, h: f64) -> LogNum {
    if v.is_zero() {
        v
    } else {
        LogNum {
            sign: v.sign,
            log: v.log + h.ln(),
        }
    }
}
