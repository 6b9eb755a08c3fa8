//! Seeded sampling check of the set-of-indices axioms.

use std::fmt;

use rand::SeedableRng;
use serde::Serialize;

use super::{IndexError, IndexKind, IndexRng, IndexSet};
use crate::exec::Exec;

pub const DEFAULT_BUDGET: usize = 500;

const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    Reflexive,
    Transitive,
    NoEmptyClass,
    CarrierIsClass,
    RefineClosure,
    DownDirected,
}

impl Clause {
    pub const ALL: [Clause; 6] = [
        Clause::Reflexive,
        Clause::Transitive,
        Clause::NoEmptyClass,
        Clause::CarrierIsClass,
        Clause::RefineClosure,
        Clause::DownDirected,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Clause::Reflexive => "(i) reflexive",
            Clause::Transitive => "(i) transitive",
            Clause::NoEmptyClass => "(ii) no empty class",
            Clause::CarrierIsClass => "(ii) carrier is a class",
            Clause::RefineClosure => "(iii) refine closure",
            Clause::DownDirected => "(iv) strictly down-directed",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClauseResult {
    pub clause: Clause,
    pub checked: usize,
    pub failures: usize,
    pub counterexamples: Vec<String>,
}

impl ClauseResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub kind: IndexKind,
    pub budget: usize,
    pub seed: u64,
    pub clauses: Vec<ClauseResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.clauses.iter().all(ClauseResult::passed)
    }

    pub fn clause(&self, c: Clause) -> &ClauseResult {
        self.clauses
            .iter()
            .find(|r| r.clause == c)
            .expect("every clause is reported")
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "index set {} (budget {}, seed {})",
            self.kind, self.budget, self.seed
        )?;
        for r in &self.clauses {
            let status = if r.passed() { "pass" } else { "FAIL" };
            writeln!(
                f,
                "  {status}  {:<28} {}/{} failed",
                r.clause.label(),
                r.failures,
                r.checked
            )?;
            for c in &r.counterexamples {
                writeln!(f, "        counterexample: {c}")?;
            }
        }
        Ok(())
    }
}

fn trial_rng(seed: u64, clause: usize, trial: usize) -> IndexRng {
    let mut rng = IndexRng::seed_from_u64(seed);
    rng.set_stream(((clause as u64) << 32) | trial as u64);
    rng
}

/// Checks each clause on `budget` seeded samples; failures are collected in
/// the report rather than returned as errors.
pub fn validate_index_set(
    set: &dyn IndexSet,
    budget: usize,
    seed: u64,
    exec: Exec,
) -> ValidationReport {
    let budget = budget.max(1);
    let clauses = Clause::ALL
        .iter()
        .enumerate()
        .map(|(ci, &clause)| {
            let outcomes = exec.map_range(budget, |t| {
                let mut rng = trial_rng(seed, ci, t);
                match check(set, clause, t, &mut rng) {
                    Ok(r) => r,
                    Err(e) => Err(format!("error: {e}")),
                }
            });
            let failures: Vec<String> = outcomes.into_iter().filter_map(Result::err).collect();
            ClauseResult {
                clause,
                checked: budget,
                failures: failures.len(),
                counterexamples: failures.into_iter().take(MAX_COUNTEREXAMPLES).collect(),
            }
        })
        .collect();
    ValidationReport {
        kind: set.kind(),
        budget,
        seed,
        clauses,
    }
}

type Trial = Result<(), String>;

fn check(
    set: &dyn IndexSet,
    clause: Clause,
    trial: usize,
    rng: &mut IndexRng,
) -> Result<Trial, IndexError> {
    let fail = |msg: String| Ok(Err(msg));
    match clause {
        Clause::Reflexive => {
            let i = set.sample_point(rng);
            if !set.leq(&i, &i)? {
                return fail(format!("{i} is not <= itself"));
            }
        }
        Clause::Transitive => {
            // a constructed chain, then an unconstrained triple
            let i = set.sample_point(rng);
            let whole = set.whole();
            if let Some(j) = set.sample_member_below(&whole, &i, rng) {
                if let Some(k) = set.sample_member_below(&whole, &j, rng) {
                    if set.leq(&k, &j)? && set.leq(&j, &i)? && !set.leq(&k, &i)? {
                        return fail(format!("{k} <= {j} <= {i} but not {k} <= {i}"));
                    }
                }
            }
            let (a, b, c) = (
                set.sample_point(rng),
                set.sample_point(rng),
                set.sample_point(rng),
            );
            if set.leq(&a, &b)? && set.leq(&b, &c)? && !set.leq(&a, &c)? {
                return fail(format!("{a} <= {b} <= {c} but not {a} <= {c}"));
            }
        }
        Clause::NoEmptyClass => {
            let base = set.filter_base(8);
            let class = if trial < base.len() {
                base[trial]
            } else {
                set.sample_class(rng)
            };
            match set.class_witness(&class) {
                Some(w) if set.contains(&class, &w) => {}
                Some(w) => return fail(format!("witness {w} is not a member of {class}")),
                None => return fail(format!("class {class} has no member")),
            }
        }
        Clause::CarrierIsClass => {
            let whole = set.whole();
            if trial == 0 && set.class_witness(&whole).is_none() {
                return fail(format!("carrier {whole} has no member"));
            }
            let p = set.sample_point(rng);
            if !set.contains(&whole, &p) {
                return fail(format!("{p} is a point outside the carrier class {whole}"));
            }
        }
        Clause::RefineClosure => {
            let (a, b) = (set.sample_class(rng), set.sample_class(rng));
            let c = set.refine(&a, &b)?;
            if !set.class_subset(&c, &a) || !set.class_subset(&c, &b) {
                return fail(format!("refine({a}, {b}) = {c} is not below both"));
            }
            let Some(w) = set.class_witness(&c) else {
                return fail(format!("refine({a}, {b}) = {c} is empty"));
            };
            let mut members = vec![w];
            members.extend(set.sample_member(&c, rng));
            for m in members {
                if !set.contains(&a, &m) || !set.contains(&b, &m) {
                    return fail(format!("{m} in {c} but not in both {a} and {b}"));
                }
            }
        }
        Clause::DownDirected => {
            let class = set.sample_class(rng);
            let Some(a) = set
                .sample_member(&class, rng)
                .or_else(|| set.class_witness(&class))
            else {
                return fail(format!("class {class} has no member"));
            };
            let Some(e) = set.sample_member_below(&set.whole(), &a, rng) else {
                return fail(format!("nothing below {a}"));
            };
            let (Some(b), Some(c)) = (
                set.sample_member_below(&class, &e, rng),
                set.sample_member_below(&class, &e, rng),
            ) else {
                return fail(format!("{class}_(<= {e}) is empty although {e} <= {a}"));
            };
            let d = set.down_witness(&b, &c, &class, &e)?;
            let ok = set.contains(&class, &d)
                && set.leq(&d, &e)?
                && set.lt(&d, &b)?
                && set.lt(&d, &c)?;
            if !ok {
                return fail(format!("witness {d} for {b}, {c} below {e} in {class}"));
            }
        }
    }
    Ok(Ok(()))
}
