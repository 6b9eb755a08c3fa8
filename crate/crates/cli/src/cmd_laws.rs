use gencol::bigo::{law_suite, LawSuiteConfig};
use gencol::exec::Exec;
use gencol::index::validate_index_set;
use serde_json::json;

use crate::report::{Outcome, Table};
use crate::session::{CliError, Session};

pub fn laws(session: &Session) -> Result<Outcome, CliError> {
    let set = session.build()?;
    let cfg = LawSuiteConfig::new(session.seed, session.trials);
    let report = law_suite(set.as_ref(), &cfg);
    let ok = report.all_passed() && report.control_ok();
    let mut table = Table::new(&["family", "law", "trials", "passed"]);
    for r in &report.results {
        table.push(vec![
            r.family.to_string(),
            r.law.label().to_string(),
            r.trials.to_string(),
            r.passed.to_string(),
        ]);
    }
    Ok(Outcome {
        code: if ok { 0 } else { 1 },
        text: format!("{report}\n"),
        json: json!({ "command": "laws", "passed": ok, "report": report }),
        csv: Some(table),
    })
}

pub fn validate(session: &Session) -> Result<Outcome, CliError> {
    let set = session.build()?;
    let report = validate_index_set(set.as_ref(), session.budget, session.seed, Exec::default());
    let mut table = Table::new(&["clause", "checked", "failures"]);
    for r in &report.clauses {
        table.push(vec![
            r.clause.label().to_string(),
            r.checked.to_string(),
            r.failures.to_string(),
        ]);
    }
    let ok = report.all_passed();
    Ok(Outcome {
        code: if ok { 0 } else { 1 },
        text: report.to_string(),
        json: json!({ "command": "validate", "passed": ok, "report": report }),
        csv: Some(table),
    })
}
