use gencol::bigo::{parse_net, Decision};
use gencol::colombeau::{
    eval_at, exhaustion, gen_equal, is_moderate, is_negligible, make_gen_point, parse_repnet,
    sup_on_k, zero_test_by_points, GenConfig, NegligibleVerdict, PointNet, ProbeRow, RepNet,
};
use gencol::index::{default_anchor, IndexSet, PROBE_LEN};
use serde_json::{json, Value};

use crate::report::{
    decision_word, exit_code, fixed, interval, opt_fixed, opt_sci, sci, Outcome, Table,
};
use crate::session::{CliError, Session};

fn rep(text: &str, session: &Session) -> Result<RepNet, CliError> {
    Ok(parse_repnet(text, session.domain)?)
}

/// `sup_K |u_eps|` along `2^{-k}`, `kmin <= k <= kmax`, for each `K`.
fn probe_rows(
    u: &RepNet,
    set: &dyn IndexSet,
    cfg: &GenConfig,
) -> Result<Vec<((f64, f64), Vec<ProbeRow>)>, CliError> {
    let anchor = default_anchor(set);
    let mut out = Vec::new();
    for k in exhaustion(&u.domain(), cfg.exhaustion) {
        let mut rows: Vec<ProbeRow> = Vec::new();
        for kk in cfg.kmin..=cfg.kmax {
            let p = anchor.shrink((-(kk as f64)).exp2());
            let gauge = set.underline(&p);
            let sup = sup_on_k(u, k, 0, set, &p)?.value;
            let slope = rows.last().and_then(|r| {
                (r.sup > 0.0 && sup > 0.0)
                    .then(|| (sup.ln() - r.sup.ln()) / (gauge.ln() - r.gauge.ln()))
            });
            rows.push(ProbeRow {
                k: kk,
                gauge,
                sup,
                slope,
            });
        }
        out.push((k, rows));
    }
    Ok(out)
}

fn probe_table(blocks: &[((f64, f64), u32, &[ProbeRow])]) -> Table {
    let mut t = Table::new(&["K_lo", "K_hi", "alpha", "k", "gauge", "sup", "slope"]);
    for (k, alpha, rows) in blocks {
        for r in rows.iter() {
            t.push(vec![
                k.0.to_string(),
                k.1.to_string(),
                alpha.to_string(),
                r.k.to_string(),
                sci(r.gauge),
                sci(r.sup),
                opt_fixed(r.slope),
            ]);
        }
    }
    t
}

fn rows_json(rows: &[ProbeRow]) -> Value {
    rows.iter()
        .map(|r| json!({ "k": r.k, "gauge": r.gauge, "sup": r.sup, "slope": r.slope }))
        .collect()
}

/// Probe rows of one block for display, without the `K` and `alpha` columns.
fn short_rows(rows: &[ProbeRow]) -> String {
    let mut t = Table::new(&["k", "gauge", "sup", "slope"]);
    for r in rows {
        t.push(vec![
            r.k.to_string(),
            sci(r.gauge),
            sci(r.sup),
            opt_fixed(r.slope),
        ]);
    }
    t.render(4)
}

pub fn moderate(text: &str, session: &Session) -> Result<Outcome, CliError> {
    let u = rep(text, session)?;
    let set = session.build()?;
    let v = is_moderate(&u, set.as_ref(), &session.gen)?;
    let full = set.as_full().is_some();
    let mut out = format!(
        "u = {u}\nindex set {}\nmoderate: {}\n",
        set.kind(),
        decision_word(v.decision)
    );

    let mut header = vec!["K", "alpha", "exponent", "N", "slope", "N_fit", "agree"];
    if full {
        header.extend(["(N, q)", "N = q"]);
    }
    let mut t = Table::new(&header);
    for e in &v.entries {
        let mut row = vec![
            interval(e.k),
            e.alpha.to_string(),
            opt_fixed(e.exponent),
            e.n_symbolic.to_string(),
            opt_fixed(e.slope),
            e.n_numeric.to_string(),
            if e.agree { "yes" } else { "no" }.to_string(),
        ];
        if let Some(f) = &e.full {
            row.push(
                f.exists_nq
                    .map_or("-".into(), |(n, q)| format!("({n}, {q})")),
            );
            row.push(f.n_eq_q.map_or("-".into(), |n| n.to_string()));
        }
        t.push(row);
    }
    out.push_str(&t.render(2));
    for alpha in 0..=session.gen.alpha_max {
        if let Some(n) = v.n(alpha) {
            out.push_str(&format!("N = {n} at alpha = {alpha}\n"));
        }
    }
    if let Some(e) = v.entries.first() {
        out.push_str(&format!(
            "probe on K = {}, alpha = {}:\n",
            interval(e.k),
            e.alpha
        ));
        out.push_str(&short_rows(&e.rows));
    }

    let blocks: Vec<_> = v
        .entries
        .iter()
        .map(|e| (e.k, e.alpha, e.rows.as_slice()))
        .collect();
    let json = json!({
        "command": "genfun moderate",
        "u": u.to_string(),
        "index": set.kind(),
        "decision": v.decision,
        "entries": v.entries.iter().map(|e| json!({
            "k": [e.k.0, e.k.1],
            "alpha": e.alpha,
            "exponent": e.exponent,
            "n": e.n_symbolic,
            "slope": e.slope,
            "n_fit": e.n_numeric,
            "agree": e.agree,
            "exists_nq": e.full.as_ref().and_then(|f| f.exists_nq),
            "n_eq_q": e.full.as_ref().and_then(|f| f.n_eq_q),
            "rows": rows_json(&e.rows),
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        code: exit_code(v.decision),
        text: out,
        json,
        csv: Some(probe_table(&blocks)),
    })
}

fn negligible_report(
    what: &str,
    u: &RepNet,
    v: &NegligibleVerdict,
    set: &dyn IndexSet,
    session: &Session,
) -> Result<(String, Value, Table), CliError> {
    let mut out = String::new();
    if let Some(n) = v.moderate_n {
        out.push_str(&format!("moderate with N = {n} at alpha = 0\n"));
    }
    let mut t = Table::new(&["K", "m", "sup = O(u^m)", "bookkept"]);
    for e in &v.entries {
        t.push(vec![
            interval(e.k),
            e.m.to_string(),
            decision_word(e.decision).to_string(),
            if e.bookkept { "holds" } else { "fails" }.to_string(),
        ]);
    }
    if !t.rows.is_empty() {
        out.push_str(&t.render(2));
    }
    if let Some(e) = v.counterexample() {
        out.push_str(&format!(
            "counterexample: sup over {} is not O(u^{}); {} refuted constants up to H = {}\n",
            interval(e.k),
            e.m,
            e.certificates.len(),
            e.certificates.last().map_or("-".into(), |c| sci(c.h)),
        ));
        if let Some(c) = e.certificates.last() {
            let mut ct = Table::new(&["k", "gauge", "sup / (H u^m)"]);
            for (p, margin) in c.sequence.points.iter().zip(&c.margins) {
                let g = set.underline(p);
                ct.push(vec![
                    format!("{}", (-g.log2()).round()),
                    sci(g),
                    sci(*margin),
                ]);
            }
            out.push_str(&ct.render(4));
        }
    }
    if let Some(d) = v.derivative_decay {
        out.push_str(&format!(
            "first derivative decays to the same order: {}\n",
            if d { "yes" } else { "no" }
        ));
    }
    if let Some(n) = &v.note {
        out.push_str(&format!("note: {n}\n"));
    }
    let probes = probe_rows(u, set, &session.gen)?;
    let blocks: Vec<_> = probes.iter().map(|(k, r)| (*k, 0, r.as_slice())).collect();
    let json = json!({
        "command": what,
        "u": u.to_string(),
        "index": set.kind(),
        "decision": v.decision,
        "moderate_n": v.moderate_n,
        "entries": v.entries.iter().map(|e| json!({
            "k": [e.k.0, e.k.1],
            "m": e.m,
            "decision": e.decision,
            "bookkept": e.bookkept,
        })).collect::<Vec<_>>(),
        "derivative_decay": v.derivative_decay,
        "note": v.note,
        "probe": probes.iter().map(|(k, r)| json!({ "k": [k.0, k.1], "rows": rows_json(r) })).collect::<Vec<_>>(),
    });
    Ok((out, json, probe_table(&blocks)))
}

pub fn negligible(text: &str, session: &Session) -> Result<Outcome, CliError> {
    let u = rep(text, session)?;
    let set = session.build()?;
    let v = is_negligible(&u, set.as_ref(), &session.gen)?;
    let (body, json, csv) = negligible_report("genfun negligible", &u, &v, set.as_ref(), session)?;
    Ok(Outcome {
        code: exit_code(v.decision),
        text: format!(
            "u = {u}\nindex set {}\nnegligible: {}\n{body}",
            set.kind(),
            decision_word(v.decision)
        ),
        json,
        csv: Some(csv),
    })
}

fn truth(d: Decision) -> &'static str {
    match d {
        Decision::Holds => "true",
        Decision::Fails => "false",
        Decision::Indeterminate => "indeterminate",
    }
}

pub fn equal(a: &str, b: &str, session: &Session) -> Result<Outcome, CliError> {
    let (u, v) = (rep(a, session)?, rep(b, session)?);
    let set = session.build()?;
    let verdict = gen_equal(&u, &v, set.as_ref(), &session.gen)?;
    let diff = u.sub(&v)?;
    let (body, mut json, csv) =
        negligible_report("genfun equal", &diff, &verdict, set.as_ref(), session)?;
    json["u"] = json!(u.to_string());
    json["v"] = json!(v.to_string());
    json["difference"] = json!(diff.to_string());
    Ok(Outcome {
        code: exit_code(verdict.decision),
        text: format!(
            "u = {u}\nv = {v}\nu - v = {diff}\nindex set {}\nequal: {}\n{body}",
            set.kind(),
            truth(verdict.decision)
        ),
        json,
        csv: Some(csv),
    })
}

fn parse_k(text: &str) -> Result<(f64, f64), CliError> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .unwrap_or(t);
    let bad = || CliError::Usage(format!("expected K as `lo,hi`, got `{text}`"));
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    let lo = a.trim().parse::<f64>().map_err(|_| bad())?;
    let hi = b.trim().parse::<f64>().map_err(|_| bad())?;
    if !(lo <= hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn point_eval(
    text: &str,
    point: &str,
    k: Option<&str>,
    session: &Session,
) -> Result<Outcome, CliError> {
    let u = rep(text, session)?;
    let x = parse_net(point).map_err(|e| CliError::Usage(format!("point: {e}")))?;
    let k = k.map(parse_k).transpose()?;
    let set = session.build()?;
    let cfg = &session.gen;
    let gp = make_gen_point(
        PointNet::Closed(x.clone()),
        u.domain(),
        set.as_ref(),
        k,
        cfg,
    )?;
    let value = eval_at(&u, &gp, set.as_ref(), cfg)?;
    let (zero, failing) = value.number.is_zero(set.as_ref(), cfg.m_max)?;
    let leading = value.number.leading(set.as_ref(), cfg);

    let mut out = format!(
        "u = {u}\nx = [{x}] (N = {}, K = {})\nindex set {}\n",
        gp.n,
        gp.k.map_or("-".into(), interval),
        set.kind()
    );
    out.push_str(&format!(
        "value u(x) = [{}], moderate with N = {}\n",
        value.number.label(),
        value.number.n
    ));
    match leading {
        Some((e, c)) => out.push_str(&format!(
            "leading behaviour: |u(x)_eps| ~ {} * u^{}\n",
            sci(c),
            fixed(e)
        )),
        None => out.push_str("leading behaviour: vanishes along the probe\n"),
    }
    out.push_str(&format!(
        "u(x) = 0: {}{}\n",
        truth(zero),
        failing.map_or(String::new(), |m| format!(" (not O(u^{m}))"))
    ));
    out.push_str(&format!(
        "moving x_eps by u^{} changes the value negligibly: {}\n",
        cfg.perturb,
        decision_word(value.perturbation)
    ));

    let anchor = default_anchor(set.as_ref());
    let mut t = Table::new(&["k", "gauge", "x_eps", "value"]);
    for kk in cfg.kmin..=cfg.kmax {
        let p = anchor.shrink((-(kk as f64)).exp2());
        let g = set.underline(&p);
        t.push(vec![
            kk.to_string(),
            sci(g),
            sci(x.eval(g)),
            sci(value.number.eval(set.as_ref(), &p)),
        ]);
    }
    out.push_str(&t.render(2));
    let json = json!({
        "command": "genfun point-eval",
        "u": u.to_string(),
        "x": x.to_string(),
        "index": set.kind(),
        "point_n": gp.n,
        "k": gp.k.map(|k| [k.0, k.1]),
        "value_n": value.number.n,
        "leading": leading.map(|(e, c)| json!({ "exponent": e, "coefficient": c })),
        "zero": zero,
        "failing_m": failing,
        "perturbation": value.perturbation,
    });
    Ok(Outcome {
        code: exit_code(value.perturbation),
        text: out,
        json,
        csv: Some(t),
    })
}

pub fn zero_test(text: &str, session: &Session) -> Result<Outcome, CliError> {
    let u = rep(text, session)?;
    let set = session.build()?;
    let z = zero_test_by_points(&u, set.as_ref(), &session.gen)?;
    let mut out = format!(
        "u = {u}\nindex set {}\nu = 0 by point values: {}\nnegligible: {} ({})\n",
        set.kind(),
        truth(z.decision),
        decision_word(z.negligible),
        if z.agree { "agrees" } else { "disagrees" }
    );
    let anchor = default_anchor(set.as_ref());
    let mut t = Table::new(&["k", "gauge", "x_eps", "value"]);
    if let Some(w) = &z.witness {
        out.push_str(&format!(
            "nonzero witness: x_eps = argmax over K = {} of |u_eps|, value not O(u^{}), N = {}\n",
            interval(w.k),
            w.failing_m,
            w.value.n
        ));
        let first = PROBE_LEN - w.argmax.len();
        for (i, (g, x)) in w.argmax.iter().enumerate() {
            let kk = first + i;
            let p = anchor.shrink((-(kk as f64)).exp2());
            t.push(vec![
                kk.to_string(),
                sci(*g),
                opt_sci(Some(*x)),
                sci(w.value.eval(set.as_ref(), &p)),
            ]);
        }
        out.push_str(&t.render(2));
    }
    if let Some(n) = &z.note {
        out.push_str(&format!("note: {n}\n"));
    }
    let json = json!({
        "command": "genfun zero-test",
        "u": u.to_string(),
        "index": set.kind(),
        "decision": z.decision,
        "negligible": z.negligible,
        "agree": z.agree,
        "witness": z.witness.as_ref().map(|w| json!({
            "k": [w.k.0, w.k.1],
            "failing_m": w.failing_m,
            "value_n": w.value.n,
            "argmax": w.argmax,
        })),
        "note": z.note,
    });
    Ok(Outcome {
        code: exit_code(z.decision),
        text: out,
        json,
        csv: (!t.rows.is_empty()).then_some(t),
    })
}
