//! Text formats.
//!
//! Instances use the line-oriented `HRLQ 1` format:
//!
//! ```text
//! HRLQ 1
//! residents <n>
//! hospitals <m>
//! r <id> : <hospital ids, most preferred first>      (n lines)
//! h <id> <lq> <uq> : <resident ids, most preferred first>   (m lines)
//! ```
//!
//! Ids are 1-based. Blank lines and lines starting with `#` are ignored, so
//! generators can record their parameters as comments. Serialization is
//! canonical: lines in id order, single spaces, LF line endings and a trailing
//! newline.
//!
//! Matchings are zero or more `<resident id> <hospital id>` lines sorted by
//! resident id.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{Instance, Matching};

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax { line, message: message.into() }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| syntax(line, format!("expected {what}, found `{tok}`")))
}

fn parse_ids(tokens: &[&str], line: usize, bound: usize, kind: &'static str) -> Result<Vec<usize>> {
    tokens
        .iter()
        .map(|t| {
            let id: usize = parse_num(t, line, "an id")?;
            if id == 0 || id > bound {
                return Err(Error::UnknownId { kind, id });
            }
            Ok(id - 1)
        })
        .collect()
}

fn expect_count(line: Option<(usize, &str)>, keyword: &str) -> Result<usize> {
    let (no, l) = line.ok_or_else(|| syntax(0, format!("missing `{keyword}` line")))?;
    match l.split_whitespace().collect::<Vec<_>>().as_slice() {
        [k, n] if *k == keyword => parse_num(n, no, "a count"),
        _ => Err(syntax(no, format!("expected `{keyword} <count>`"))),
    }
}

/// Splits `head : tail` into the tokens before and after the colon.
fn split_colon(l: &str, no: usize) -> Result<(Vec<&str>, Vec<&str>)> {
    let (head, tail) = l.split_once(':').ok_or_else(|| syntax(no, "missing `:`"))?;
    Ok((head.split_whitespace().collect(), tail.split_whitespace().collect()))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "HRLQ 1")) => {}
        Some((no, _)) => return Err(syntax(no, "expected header `HRLQ 1`")),
        None => return Err(syntax(0, "empty document")),
    }
    let n = expect_count(lines.next(), "residents")?;
    let m = expect_count(lines.next(), "hospitals")?;

    let mut resident_prefs: Vec<Option<Vec<usize>>> = vec![None; n];
    for _ in 0..n {
        let (no, l) = lines.next().ok_or_else(|| syntax(0, format!("expected {n} resident lines")))?;
        let (head, tail) = split_colon(l, no)?;
        let id = match head.as_slice() {
            ["r", id] => parse_num::<usize>(id, no, "a resident id")?,
            _ => return Err(syntax(no, "expected `r <id> : ...`")),
        };
        if id == 0 || id > n {
            return Err(Error::UnknownId { kind: "resident", id });
        }
        if resident_prefs[id - 1].is_some() {
            return Err(syntax(no, format!("resident {id} defined twice")));
        }
        resident_prefs[id - 1] = Some(parse_ids(&tail, no, m, "hospital")?);
    }

    let mut hospitals: Vec<Option<(u32, u32, Vec<usize>)>> = vec![None; m];
    for _ in 0..m {
        let (no, l) = lines.next().ok_or_else(|| syntax(0, format!("expected {m} hospital lines")))?;
        let (head, tail) = split_colon(l, no)?;
        let (id, lq, uq) = match head.as_slice() {
            ["h", id, lq, uq] => (
                parse_num::<usize>(id, no, "a hospital id")?,
                parse_num::<u32>(lq, no, "a lower quota")?,
                parse_num::<u32>(uq, no, "an upper quota")?,
            ),
            _ => return Err(syntax(no, "expected `h <id> <lq> <uq> : ...`")),
        };
        if id == 0 || id > m {
            return Err(Error::UnknownId { kind: "hospital", id });
        }
        if hospitals[id - 1].is_some() {
            return Err(syntax(no, format!("hospital {id} defined twice")));
        }
        hospitals[id - 1] = Some((lq, uq, parse_ids(&tail, no, n, "resident")?));
    }
    if let Some((no, _)) = lines.next() {
        return Err(syntax(no, "unexpected trailing content"));
    }

    let resident_prefs = resident_prefs.into_iter().map(|p| p.expect("all residents defined")).collect();
    let (mut lower, mut upper, mut hospital_prefs) = (Vec::new(), Vec::new(), Vec::new());
    for (lq, uq, prefs) in hospitals.into_iter().map(|h| h.expect("all hospitals defined")) {
        lower.push(lq);
        upper.push(uq);
        hospital_prefs.push(prefs);
    }
    Instance::new(resident_prefs, hospital_prefs, lower, upper)
}

fn push_ids(out: &mut String, ids: &[usize]) {
    for id in ids {
        let _ = write!(out, " {}", id + 1);
    }
    out.push('\n');
}

/// Canonical serialization; `comments` are emitted as `# ` lines after the header.
pub fn serialize_instance_with_comments(instance: &Instance, comments: &[String]) -> String {
    let mut out = String::from("HRLQ 1\n");
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "residents {}", instance.n_residents());
    let _ = writeln!(out, "hospitals {}", instance.n_hospitals());
    for r in 0..instance.n_residents() {
        let _ = write!(out, "r {} :", r + 1);
        push_ids(&mut out, instance.resident_prefs(r));
    }
    for h in 0..instance.n_hospitals() {
        let _ = write!(out, "h {} {} {} :", h + 1, instance.lower_quota(h), instance.upper_quota(h));
        push_ids(&mut out, instance.hospital_prefs(h));
    }
    out
}

pub fn serialize_instance(instance: &Instance) -> String {
    serialize_instance_with_comments(instance, &[])
}

pub fn parse_matching(instance: &Instance, text: &str) -> Result<Matching> {
    let mut m = Matching::empty(instance.n_residents());
    for (no, l) in content_lines(text) {
        let (r, h) = match l.split_whitespace().collect::<Vec<_>>().as_slice() {
            [r, h] => (parse_num::<usize>(r, no, "a resident id")?, parse_num::<usize>(h, no, "a hospital id")?),
            _ => return Err(syntax(no, "expected `<resident> <hospital>`")),
        };
        if r == 0 || r > instance.n_residents() {
            return Err(Error::UnknownId { kind: "resident", id: r });
        }
        if h == 0 || h > instance.n_hospitals() {
            return Err(Error::UnknownId { kind: "hospital", id: h });
        }
        if !instance.is_edge(r - 1, h - 1) {
            return Err(Error::NotAnEdge { resident: r, hospital: h });
        }
        if m.hospital_of(r - 1).is_some() {
            return Err(Error::DuplicateResident(r));
        }
        m.assign(r - 1, h - 1);
    }
    Ok(m)
}

pub fn serialize_matching(matching: &Matching) -> String {
    let mut out = String::new();
    for (r, h) in matching.pairs() {
        let _ = writeln!(out, "{} {}", r + 1, h + 1);
    }
    out
}

/// Something `ingest_hrc` dropped while cleaning a couples instance. Ids are
/// 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IngestWarning {
    /// The resident kept no acceptable hospital; it stays as an isolated vertex.
    EmptyPreferenceList { resident: usize },
    /// One side listed the other without reciprocation; the edge was removed.
    UnreciprocatedEdge { resident: usize, hospital: usize },
}

impl std::fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            IngestWarning::EmptyPreferenceList { resident } => write!(f, "r{resident} has no acceptable hospital left"),
            IngestWarning::UnreciprocatedEdge { resident, hospital } => {
                write!(f, "dropped (r{resident},h{hospital}): listed by one side only")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct HrcIngest {
    pub instance: Instance,
    pub warnings: Vec<IngestWarning>,
}

fn dedupe_first(list: &[usize]) -> Vec<usize> {
    let mut seen = std::collections::HashSet::new();
    list.iter().copied().filter(|x| seen.insert(*x)).collect()
}

/// Reads a hospitals-residents-with-couples instance and turns it into a plain
/// HR instance by keeping only the first copy of every hospital on a
/// resident's list.
///
/// Accepted grammar (whitespace separated, 1-based ids, `#` comments):
///
/// ```text
/// <n_residents> <n_hospitals>
/// <resident id> <hospital id>*            one line per resident
/// <hospital id> <capacity> <resident id>* one line per hospital
/// ```
///
/// Couple members may list the same hospital several times, not necessarily
/// contiguously. Edges that only one side lists are dropped so the result has
/// a symmetric edge set.
pub fn ingest_hrc(text: &str) -> Result<HrcIngest> {
    let mut lines = content_lines(text);
    let (no, header) = lines.next().ok_or_else(|| syntax(0, "empty document"))?;
    let (n, m) = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        [n, m] => (parse_num::<usize>(n, no, "a count")?, parse_num::<usize>(m, no, "a count")?),
        _ => return Err(syntax(no, "expected `<n_residents> <n_hospitals>`")),
    };

    let mut raw_res: Vec<Option<Vec<usize>>> = vec![None; n];
    for _ in 0..n {
        let (no, l) = lines.next().ok_or_else(|| syntax(0, format!("expected {n} resident lines")))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        let id: usize = parse_num(toks[0], no, "a resident id")?;
        if id == 0 || id > n {
            return Err(Error::UnknownId { kind: "resident", id });
        }
        if raw_res[id - 1].is_some() {
            return Err(syntax(no, format!("resident {id} defined twice")));
        }
        raw_res[id - 1] = Some(parse_ids(&toks[1..], no, m, "hospital")?);
    }
    let mut raw_hosp: Vec<Option<(u32, Vec<usize>)>> = vec![None; m];
    for _ in 0..m {
        let (no, l) = lines.next().ok_or_else(|| syntax(0, format!("expected {m} hospital lines")))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 2 {
            return Err(syntax(no, "expected `<hospital id> <capacity> ...`"));
        }
        let id: usize = parse_num(toks[0], no, "a hospital id")?;
        if id == 0 || id > m {
            return Err(Error::UnknownId { kind: "hospital", id });
        }
        if raw_hosp[id - 1].is_some() {
            return Err(syntax(no, format!("hospital {id} defined twice")));
        }
        let cap: u32 = parse_num(toks[1], no, "a capacity")?;
        raw_hosp[id - 1] = Some((cap, parse_ids(&toks[2..], no, n, "resident")?));
    }
    if let Some((no, _)) = lines.next() {
        return Err(syntax(no, "unexpected trailing content"));
    }

    let res: Vec<Vec<usize>> = raw_res.into_iter().map(|l| dedupe_first(&l.expect("defined"))).collect();
    let (caps, hosp): (Vec<u32>, Vec<Vec<usize>>) =
        raw_hosp.into_iter().map(|h| h.expect("defined")).map(|(c, l)| (c, dedupe_first(&l))).unzip();

    let listed_by_hosp: Vec<std::collections::HashSet<usize>> =
        hosp.iter().map(|l| l.iter().copied().collect()).collect();
    let listed_by_res: Vec<std::collections::HashSet<usize>> =
        res.iter().map(|l| l.iter().copied().collect()).collect();

    let mut warnings = Vec::new();
    let resident_prefs: Vec<Vec<usize>> = res
        .iter()
        .enumerate()
        .map(|(r, list)| {
            list.iter()
                .copied()
                .filter(|&h| {
                    let keep = listed_by_hosp[h].contains(&r);
                    if !keep {
                        warnings.push(IngestWarning::UnreciprocatedEdge { resident: r + 1, hospital: h + 1 });
                    }
                    keep
                })
                .collect()
        })
        .collect();
    let hospital_prefs: Vec<Vec<usize>> = hosp
        .iter()
        .enumerate()
        .map(|(h, list)| {
            list.iter()
                .copied()
                .filter(|&r| {
                    let keep = listed_by_res[r].contains(&h);
                    if !keep {
                        warnings.push(IngestWarning::UnreciprocatedEdge { resident: r + 1, hospital: h + 1 });
                    }
                    keep
                })
                .collect()
        })
        .collect();
    for (r, list) in resident_prefs.iter().enumerate() {
        if list.is_empty() {
            warnings.push(IngestWarning::EmptyPreferenceList { resident: r + 1 });
        }
    }

    let lower = vec![0; m];
    let instance = Instance::new(resident_prefs, hospital_prefs, lower, caps)?;
    Ok(HrcIngest { instance, warnings })
}

/// Writes an instance in the couples grammar read by [`ingest_hrc`]. Lower
/// quotas are not representable there and are dropped.
pub fn serialize_hrc(instance: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", instance.n_residents(), instance.n_hospitals());
    for r in 0..instance.n_residents() {
        let _ = write!(out, "{}", r + 1);
        push_ids(&mut out, instance.resident_prefs(r));
    }
    for h in 0..instance.n_hospitals() {
        let _ = write!(out, "{} {}", h + 1, instance.upper_quota(h));
        push_ids(&mut out, instance.hospital_prefs(h));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::three_residents;

    const FIG1: &str = "HRLQ 1\nresidents 3\nhospitals 2\nr 1 : 1 2\nr 2 : 1 2\nr 3 : 1\nh 1 0 2 : 1 2 3\nh 2 1 1 : 2 1\n";

    #[test]
    fn three_residents_text_round_trips() {
        let g = parse_instance(FIG1).unwrap();
        assert_eq!(g, three_residents());
        assert_eq!(serialize_instance(&g), FIG1);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "HRLQ 1\n# seed=7\n\nresidents 3\nhospitals 2\nr 1 : 1 2\nr 2 : 1 2\n# x\nr 3 : 1\nh 1 0 2 : 1 2 3\nh 2 1 1 : 2 1\n";
        assert_eq!(parse_instance(text).unwrap(), three_residents());
    }

    #[test]
    fn header_only_is_the_empty_instance() {
        let g = parse_instance("HRLQ 1\nresidents 0\nhospitals 0\n").unwrap();
        assert_eq!(g.n_residents(), 0);
        assert_eq!(g.n_hospitals(), 0);
        assert_eq!(serialize_instance(&g), "HRLQ 1\nresidents 0\nhospitals 0\n");
    }

    #[test]
    fn asymmetric_document_is_rejected() {
        let text = "HRLQ 1\nresidents 3\nhospitals 2\nr 1 : 1 2\nr 2 : 1 2\nr 3 : 1\nh 1 0 2 : 1 2 3\nh 2 1 1 : 2 1 3\n";
        assert!(matches!(parse_instance(text), Err(Error::AsymmetricEdge(_))));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_instance("HRLQ 2\n"), Err(Error::Syntax { line: 1, .. })));
        let bad_quota = "HRLQ 1\nresidents 1\nhospitals 1\nr 1 : 1\nh 1 2 1 : 1\n";
        assert!(matches!(parse_instance(bad_quota), Err(Error::Quota { .. })));
        let dup = "HRLQ 1\nresidents 1\nhospitals 1\nr 1 : 1 1\nh 1 0 1 : 1\n";
        assert!(matches!(parse_instance(dup), Err(Error::DuplicatePreference { .. })));
        let missing_colon = "HRLQ 1\nresidents 1\nhospitals 1\nr 1 1\nh 1 0 1 : 1\n";
        assert!(matches!(parse_instance(missing_colon), Err(Error::Syntax { line: 4, .. })));
        let trailing = format!("{FIG1}r 4 : 1\n");
        assert!(matches!(parse_instance(&trailing), Err(Error::Syntax { line: 9, .. })));
    }

    #[test]
    fn matching_parse_and_errors() {
        let g = three_residents();
        let m2 = parse_matching(&g, "1 1\n2 2\n3 1\n").unwrap();
        assert_eq!(m2, Matching::from_pairs(3, [(0, 0), (1, 1), (2, 0)]).unwrap());
        assert_eq!(serialize_matching(&m2), "1 1\n2 2\n3 1\n");
        assert!(parse_matching(&g, "").unwrap().is_empty());
        assert_eq!(parse_matching(&g, "1 2\n1 1\n").unwrap_err(), Error::DuplicateResident(1));
        assert_eq!(parse_matching(&g, "3 2\n").unwrap_err(), Error::NotAnEdge { resident: 3, hospital: 2 });
        assert_eq!(parse_matching(&g, "4 1\n").unwrap_err(), Error::UnknownId { kind: "resident", id: 4 });
    }

    #[test]
    fn hrc_keeps_first_unique_copy() {
        let text = "1 3\n1 3 1 3 2 1\n1 1 1\n2 1 1\n3 1 1\n";
        let out = ingest_hrc(text).unwrap();
        assert_eq!(out.instance.resident_prefs(0), &[2, 0, 1]);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn hrc_without_duplicates_is_unchanged() {
        let text = "2 2\n1 2 1\n2 1\n1 3 2 1\n2 1 1\n";
        let out = ingest_hrc(text).unwrap();
        assert_eq!(out.instance.resident_prefs(0), &[1, 0]);
        assert_eq!(out.instance.resident_prefs(1), &[0]);
        assert_eq!(out.instance.hospital_prefs(0), &[1, 0]);
        assert_eq!(out.instance.upper_quota(0), 3);
    }

    #[test]
    fn hrc_resymmetrizes_and_warns() {
        // h2 ranks r1 but r1 never lists h2; r2 lists h1 which does not list it
        let text = "2 2\n1 1\n2 1\n1 1 1\n2 1 1\n";
        let out = ingest_hrc(text).unwrap();
        assert!(out.instance.hospital_prefs(1).is_empty());
        assert!(out.instance.resident_prefs(1).is_empty());
        assert!(out.warnings.contains(&IngestWarning::EmptyPreferenceList { resident: 2 }));
        assert!(out.warnings.contains(&IngestWarning::UnreciprocatedEdge { resident: 1, hospital: 2 }));
    }

    #[test]
    fn hrc_ingest_is_idempotent() {
        let text = "3 2\n1 2 1 2\n2 1 1\n3 2\n1 2 2 1 2\n2 1 3 1\n";
        let once = ingest_hrc(text).unwrap().instance;
        let twice = ingest_hrc(&serialize_hrc(&once)).unwrap();
        assert_eq!(once, twice.instance);
        assert!(twice.warnings.is_empty());
    }
}
