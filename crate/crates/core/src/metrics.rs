//! Quality measures of a matching, alone or against a baseline.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::instance::{Instance, Matching, Resident};

/// Every `(r, h)` outside `m` where `r` is unmatched or prefers `h`, and `h`
/// has room or prefers `r` to one of its residents. Sorted by `(r, h)`.
pub fn blocking_pairs(instance: &Instance, m: &Matching) -> Vec<(usize, usize)> {
    let n_h = instance.n_hospitals();
    let load = m.loads(n_h);
    // worst (largest) position among each hospital's residents
    let mut worst: Vec<Option<usize>> = vec![None; n_h];
    for (r, h) in m.pairs() {
        let pos = instance.hospital_pos(h, r);
        if pos > worst[h] {
            worst[h] = pos;
        }
    }
    let mut out = Vec::new();
    for r in 0..instance.n_residents() {
        let current = m.hospital_of(r);
        for &h in instance.resident_prefs(r) {
            if Some(h) == current {
                // everything after this on r's list is worse
                break;
            }
            let has_room = load[h] < instance.upper_quota(h);
            if has_room || instance.hospital_pos(h, r) < worst[h] {
                out.push((r, h));
            }
        }
    }
    out
}

/// Residents that take part in at least one blocking pair, ascending.
pub fn blocking_residents(instance: &Instance, m: &Matching) -> Vec<Resident> {
    let mut rs: Vec<Resident> = blocking_pairs(instance, m).into_iter().map(|(r, _)| r).collect();
    rs.dedup();
    rs
}

/// Total shortfall below the lower quotas.
pub fn deficiency(instance: &Instance, m: &Matching) -> u64 {
    m.loads(instance.n_hospitals())
        .iter()
        .zip(instance.lower_quotas())
        .map(|(&l, &q)| q.saturating_sub(l) as u64)
        .sum()
}

/// Residents matched to their first choice.
pub fn rank1_count(instance: &Instance, m: &Matching) -> usize {
    m.pairs().filter(|&(r, h)| instance.resident_prefs(r).first() == Some(&h)).count()
}

/// Residents preferring `a` minus residents preferring `b`; being unmatched
/// is worst.
pub fn resident_vote_margin(instance: &Instance, a: &Matching, b: &Matching) -> i64 {
    (0..instance.n_residents())
        .map(|r| {
            let (x, y) = (a.hospital_of(r), b.hospital_of(r));
            if instance.resident_prefers(r, x, y) {
                1
            } else if instance.resident_prefers(r, y, x) {
                -1
            } else {
                0
            }
        })
        .sum()
}

/// Pairs `(r, r')` where `r` has justified envy towards `r'`: `h = M(r')`
/// prefers `r` to `r'` and `r` is unmatched or prefers `h`.
pub fn envy_pairs(instance: &Instance, m: &Matching) -> Vec<(Resident, Resident)> {
    let mut out = Vec::new();
    for r in 0..instance.n_residents() {
        let current = m.hospital_of(r);
        for &h in instance.resident_prefs(r) {
            if Some(h) == current {
                break;
            }
            let pos = instance.hospital_pos(h, r);
            for other in m.residents_of(h) {
                if pos < instance.hospital_pos(h, other) {
                    out.push((r, other));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn is_envy_free(instance: &Instance, m: &Matching) -> bool {
    envy_pairs(instance, m).is_empty()
}

/// An exact percentage, or undefined when its denominator is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Percent(pub Option<BigRational>);

impl Percent {
    pub fn ratio(num: i64, den: i64) -> Self {
        if den == 0 {
            Percent(None)
        } else {
            Percent(Some(BigRational::new(BigInt::from(num) * 100, BigInt::from(den))))
        }
    }

    pub fn is_defined(&self) -> bool {
        self.0.is_some()
    }

    pub fn to_f64(&self) -> Option<f64> {
        use num_traits::ToPrimitive;
        self.0.as_ref().and_then(|r| r.to_f64())
    }

    /// Arithmetic mean of the defined values; undefined if none are.
    pub fn mean<'a>(values: impl IntoIterator<Item = &'a Percent>) -> Percent {
        let defined: Vec<&BigRational> = values.into_iter().filter_map(|p| p.0.as_ref()).collect();
        if defined.is_empty() {
            return Percent(None);
        }
        let n = BigRational::from_integer(BigInt::from(defined.len()));
        let sum = defined.into_iter().fold(BigRational::zero(), |acc, v| acc + v);
        Percent(Some(sum / n))
    }
}

/// Renders a rational with two decimals, rounding half away from zero.
pub fn format_2dp(value: &BigRational) -> String {
    let scaled = value * BigRational::from_integer(BigInt::from(100));
    let rounded = scaled.abs().round().to_integer();
    let sign = if value.is_negative() && !rounded.is_zero() { "-" } else { "" };
    let hundred = BigInt::from(100);
    let int = &rounded / &hundred;
    let frac = &rounded % &hundred;
    format!("{sign}{int}.{frac:0>2}")
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Some(v) => f.write_str(&format_2dp(v)),
            None => f.write_str("NA"),
        }
    }
}

/// Percentages of a matching against a baseline (usually a stable matching).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    /// Relative size gain.
    pub delta_size_pct: Percent,
    /// Relative gain in first-choice residents.
    pub delta_r1_pct: Percent,
    /// Resident vote margin over |R|.
    pub delta_votes_pct: Percent,
    /// Blocking pairs over edges outside the matching.
    pub bp_pct: Percent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsReport {
    pub size: usize,
    pub bpc: usize,
    pub br: usize,
    pub r1: usize,
    pub deficiency: u64,
    pub comparison: Option<Comparison>,
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str = "size,bpc,br,r1,deficiency,delta_size_pct,delta_r1_pct,delta_votes_pct,bp_pct";

    pub fn csv_row(&self) -> String {
        let c = self.comparison.as_ref();
        let pct = |f: fn(&Comparison) -> &Percent| c.map_or_else(|| "NA".to_string(), |c| f(c).to_string());
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.size,
            self.bpc,
            self.br,
            self.r1,
            self.deficiency,
            pct(|c| &c.delta_size_pct),
            pct(|c| &c.delta_r1_pct),
            pct(|c| &c.delta_votes_pct),
            pct(|c| &c.bp_pct)
        )
    }
}

/// Counts for a single matching.
pub fn report(instance: &Instance, m: &Matching) -> MetricsReport {
    let bp = blocking_pairs(instance, m);
    let mut residents: Vec<usize> = bp.iter().map(|&(r, _)| r).collect();
    residents.dedup();
    MetricsReport {
        size: m.size(),
        bpc: bp.len(),
        br: residents.len(),
        r1: rank1_count(instance, m),
        deficiency: deficiency(instance, m),
        comparison: None,
    }
}

pub fn compare(instance: &Instance, m: &Matching, baseline: &Matching) -> Comparison {
    let size = m.size() as i64;
    let base_size = baseline.size() as i64;
    let r1 = rank1_count(instance, m) as i64;
    let base_r1 = rank1_count(instance, baseline) as i64;
    Comparison {
        delta_size_pct: Percent::ratio(size - base_size, base_size),
        delta_r1_pct: Percent::ratio(r1 - base_r1, base_r1),
        delta_votes_pct: Percent::ratio(resident_vote_margin(instance, m, baseline), instance.n_residents() as i64),
        bp_pct: Percent::ratio(blocking_pairs(instance, m).len() as i64, instance.n_edges() as i64 - size),
    }
}

/// Counts for `m` plus its percentages against `baseline`.
pub fn paired_report(instance: &Instance, m: &Matching, baseline: &Matching) -> MetricsReport {
    MetricsReport { comparison: Some(compare(instance, m, baseline)), ..report(instance, m) }
}
