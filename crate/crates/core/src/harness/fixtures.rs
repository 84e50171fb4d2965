//! Regression fixtures: small instances with stored expected outputs.
//!
//! A fixture is an instance in `HRLQ 1` format plus an expectation file of
//! `<check>: <value>` lines (`#` comments allowed). Checks:
//!
//! | check | value |
//! |---|---|
//! | `<algorithm>` | the matching, e.g. `{(r1,h1), (r2,h2)}`, or `NO_ENVY_FREE` |
//! | `size <algorithm>` | number of matched residents |
//! | `r1 <algorithm>` | residents at their first choice |
//! | `deficiency <algorithm>` | total lower-quota shortfall |
//! | `blocking <algorithm>` | blocking pairs, e.g. `(r2,h1)`, or `none` |
//! | `margin <a> <b>` | residents preferring `a` minus those preferring `b` |
//! | `certify <property> <algorithm>` | `holds` or `fails` |

use std::fmt;

use crate::error::{Error, Result};
use crate::harness::{Algorithm, Property};
use crate::instance::{Instance, Matching};
use crate::io::parse_instance;
use crate::metrics::{blocking_pairs, deficiency, rank1_count, resident_vote_margin};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub name: String,
    pub instance: String,
    pub expected: String,
}

impl Fixture {
    pub fn new(name: impl Into<String>, instance: impl Into<String>, expected: impl Into<String>) -> Self {
        Fixture { name: name.into(), instance: instance.into(), expected: expected.into() }
    }
}

/// The fixtures shipped with the crate.
pub fn bundled_fixtures() -> Vec<Fixture> {
    vec![
        Fixture::new("three_residents", include_str!("../../fixtures/three_residents.hrlq"), include_str!("../../fixtures/three_residents.expected")),
        Fixture::new("stable_favoured", include_str!("../../fixtures/stable_favoured.hrlq"), include_str!("../../fixtures/stable_favoured.expected")),
        Fixture::new("popular_favoured", include_str!("../../fixtures/popular_favoured.hrlq"), include_str!("../../fixtures/popular_favoured.expected")),
    ]
}

/// One evaluated expectation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureLine {
    pub fixture: String,
    pub check: String,
    pub expected: String,
    pub got: String,
}

impl FixtureLine {
    pub fn passed(&self) -> bool {
        self.expected == self.got
    }

    /// Pairs only on one side, when both sides are matchings.
    pub fn diff(&self) -> Option<String> {
        if self.passed() {
            return None;
        }
        let (e, g) = (pair_set(&self.expected)?, pair_set(&self.got)?);
        let missing: Vec<&str> = e.iter().filter(|p| !g.contains(p)).copied().collect();
        let extra: Vec<&str> = g.iter().filter(|p| !e.contains(p)).copied().collect();
        Some(format!("missing [{}] extra [{}]", missing.join(" "), extra.join(" ")))
    }
}

fn pair_set(s: &str) -> Option<Vec<&str>> {
    let inner = s.strip_prefix('{')?.strip_suffix('}')?;
    Some(inner.split(", ").filter(|p| !p.is_empty()).collect())
}

impl fmt::Display for FixtureLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} {}: expected {}; got {}", self.fixture, self.check, self.expected, self.got)?;
        if let Some(d) = self.diff() {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FixtureReport {
    pub lines: Vec<FixtureLine>,
}

impl FixtureReport {
    pub fn all_passed(&self) -> bool {
        self.lines.iter().all(FixtureLine::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FixtureLine> {
        self.lines.iter().filter(|l| !l.passed())
    }
}

impl fmt::Display for FixtureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        let failed = self.failures().count();
        writeln!(f, "{} checks, {} passed, {} failed", self.lines.len(), self.lines.len() - failed, failed)
    }
}

fn solve(instance: &Instance, name: &str) -> Result<Option<Matching>> {
    name.parse::<Algorithm>()?.run(instance, None)
}

fn solve_some(instance: &Instance, name: &str) -> Result<Matching> {
    solve(instance, name)?.ok_or_else(|| Error::InvalidParams(format!("{name} found no envy-free matching")))
}

fn evaluate(instance: &Instance, check: &str) -> Result<String> {
    let words: Vec<&str> = check.split_whitespace().collect();
    Ok(match words.as_slice() {
        [algo] => match solve(instance, algo)? {
            Some(m) => m.to_string(),
            None => "NO_ENVY_FREE".to_string(),
        },
        ["size", algo] => solve_some(instance, algo)?.size().to_string(),
        ["r1", algo] => rank1_count(instance, &solve_some(instance, algo)?).to_string(),
        ["deficiency", algo] => deficiency(instance, &solve_some(instance, algo)?).to_string(),
        ["blocking", algo] => {
            let bp = blocking_pairs(instance, &solve_some(instance, algo)?);
            if bp.is_empty() {
                "none".to_string()
            } else {
                bp.iter().map(|(r, h)| format!("(r{},h{})", r + 1, h + 1)).collect::<Vec<_>>().join(" ")
            }
        }
        ["margin", a, b] => {
            resident_vote_margin(instance, &solve_some(instance, a)?, &solve_some(instance, b)?).to_string()
        }
        ["certify", property, algo] => {
            let m = solve_some(instance, algo)?;
            if property.parse::<Property>()?.check(instance, &m)?.holds { "holds" } else { "fails" }.to_string()
        }
        _ => return Err(Error::InvalidParams(format!("unknown fixture check `{check}`"))),
    })
}

fn line(fixture: &str, check: &str, expected: &str, got: String) -> FixtureLine {
    FixtureLine { fixture: fixture.into(), check: check.into(), expected: expected.into(), got }
}

/// Evaluates every expectation of every fixture. Problems (unparsable
/// instances, malformed lines, solver errors) become failing lines.
pub fn run_fixture_suite_with(fixtures: &[Fixture]) -> FixtureReport {
    let mut report = FixtureReport::default();
    for fx in fixtures {
        let instance = match parse_instance(&fx.instance) {
            Ok(g) => g,
            Err(e) => {
                report.lines.push(line(&fx.name, "parse", "instance", format!("error: {e}")));
                continue;
            }
        };
        for raw in fx.expected.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let Some((check, expected)) = raw.split_once(':') else {
                report.lines.push(line(&fx.name, raw, "<check>: <value>", "malformed expectation".into()));
                continue;
            };
            let (check, expected) = (check.trim(), expected.trim());
            let got = evaluate(&instance, check).unwrap_or_else(|e| format!("error: {e}"));
            report.lines.push(line(&fx.name, check, expected, got));
        }
    }
    report
}

pub fn run_fixture_suite() -> FixtureReport {
    run_fixture_suite_with(&bundled_fixtures())
}
