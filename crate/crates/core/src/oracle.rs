//! Exhaustive ground truth for small instances.
//!
//! Everything here enumerates matchings explicitly and is only meant for
//! instances with a handful of residents. Hospital votes use an adversarial
//! pairing: for every comparison each hospital pairs its differing residents
//! in whichever way helps the challenger most, so a `Popular` verdict holds
//! for every choice of pairing.

use rayon::prelude::*;

use crate::bmatching::max_matching;
use crate::error::{Error, Result};
use crate::instance::{Hospital, Instance, Matching};
use crate::metrics::{blocking_pairs, blocking_residents, is_envy_free};

/// Default bound on |R| for exhaustive search.
pub const DEFAULT_RESIDENT_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    AllMatchings,
    FeasibleMatchings,
    MaxCardinalityMatchings,
}

fn check_size(instance: &Instance, cap: usize) -> Result<()> {
    if instance.n_residents() > cap {
        return Err(Error::TooLarge { residents: instance.n_residents(), cap });
    }
    Ok(())
}

fn enumerate_all(instance: &Instance) -> Vec<Matching> {
    fn go(g: &Instance, r: usize, room: &mut [u32], cur: &mut Matching, out: &mut Vec<Matching>) {
        if r == g.n_residents() {
            out.push(cur.clone());
            return;
        }
        go(g, r + 1, room, cur, out);
        for &h in g.resident_prefs(r) {
            if room[h] > 0 {
                room[h] -= 1;
                cur.assign(r, h);
                go(g, r + 1, room, cur, out);
                cur.unassign(r);
                room[h] += 1;
            }
        }
    }
    let mut out = Vec::new();
    let mut room = instance.upper_quotas().to_vec();
    go(instance, 0, &mut room, &mut Matching::empty(instance.n_residents()), &mut out);
    out
}

/// Every valid matching in `domain`, each exactly once, in depth-first order
/// over residents (unmatched first, then the resident's list order).
pub fn enumerate_matchings(instance: &Instance, domain: Domain) -> Result<Vec<Matching>> {
    enumerate_matchings_capped(instance, domain, DEFAULT_RESIDENT_CAP)
}

pub fn enumerate_matchings_capped(instance: &Instance, domain: Domain, cap: usize) -> Result<Vec<Matching>> {
    check_size(instance, cap)?;
    let all = enumerate_all(instance);
    Ok(match domain {
        Domain::AllMatchings => all,
        Domain::FeasibleMatchings => all.into_iter().filter(|m| instance.is_feasible(m)).collect(),
        Domain::MaxCardinalityMatchings => {
            let best = all.iter().map(Matching::size).max().unwrap_or(0);
            all.into_iter().filter(|m| m.size() == best).collect()
        }
    })
}

/// Net votes of hospital `h` for `challenger` over `m`, under the pairing of
/// differing positions that favours `challenger` most. Unfilled positions are
/// empty and lose to any resident; an empty position in both matchings counts
/// as unchanged.
pub fn hospital_vote_adversarial(instance: &Instance, h: Hospital, m: &Matching, challenger: &Matching) -> i64 {
    let ours = m.residents_of(h);
    let theirs = challenger.residents_of(h);
    let only_ours: Vec<usize> = ours.iter().copied().filter(|r| !theirs.contains(r)).collect();
    let only_theirs: Vec<usize> = theirs.iter().copied().filter(|r| !ours.contains(r)).collect();
    if only_ours.is_empty() && only_theirs.is_empty() {
        return 0;
    }
    // Both sides hold q+ positions with empties filling the gap. Positions
    // equal on both sides (shared residents and shared empties) drop out, so
    // only the shorter side ever carries empties.
    let width = only_ours.len().max(only_theirs.len());
    assert!(width <= 24, "adversarial pairing over {width} positions is too large for exhaustive search");

    let rank = |r: Option<usize>| r.map_or(usize::MAX, |r| instance.hospital_pos(h, r).expect("matched along an edge"));
    let a: Vec<usize> = (0..width).map(|i| rank(only_ours.get(i).copied())).collect();
    let b: Vec<usize> = (0..width).map(|i| rank(only_theirs.get(i).copied())).collect();
    let vote = |x: usize, y: usize| -> i64 {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => 1,
            std::cmp::Ordering::Greater => -1,
            std::cmp::Ordering::Equal => 0,
        }
    };

    // best[mask]: best total pairing the first popcount(mask) entries of `a`
    // with the entries of `b` selected by mask
    let mut best = vec![i64::MIN; 1 << width];
    best[0] = 0;
    for mask in 0..(1usize << width) {
        if best[mask] == i64::MIN {
            continue;
        }
        let i = mask.count_ones() as usize;
        if i == width {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let v = best[mask] + vote(bj, a[i]);
                if v > best[next] {
                    best[next] = v;
                }
            }
        }
    }
    best[(1 << width) - 1]
}

/// Votes for `challenger` minus votes for `m`, residents voting sincerely and
/// hospitals pairing adversarially in the challenger's favour.
pub fn popularity_margin(instance: &Instance, m: &Matching, challenger: &Matching) -> i64 {
    let residents: i64 = (0..instance.n_residents())
        .map(|r| {
            let (x, y) = (challenger.hospital_of(r), m.hospital_of(r));
            if instance.resident_prefers(r, x, y) {
                1
            } else if instance.resident_prefers(r, y, x) {
                -1
            } else {
                0
            }
        })
        .sum();
    let hospitals: i64 = (0..instance.n_hospitals()).map(|h| hospital_vote_adversarial(instance, h, m, challenger)).sum();
    residents + hospitals
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Popular,
    NotPopular,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub challenger: Matching,
    /// Strictly positive.
    pub margin: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopularityCertificate {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub domain: Domain,
}

impl PopularityCertificate {
    pub fn is_popular(&self) -> bool {
        self.verdict == Verdict::Popular
    }
}

/// Checks `m` against every matching of `domain`; on failure the certificate
/// carries the first (in enumeration order) strictly more popular matching.
pub fn is_popular(instance: &Instance, m: &Matching, domain: Domain) -> Result<PopularityCertificate> {
    let candidates = enumerate_matchings(instance, domain)?;
    let witness = candidates
        .par_iter()
        .map(|c| (c, popularity_margin(instance, m, c)))
        .find_first(|&(_, margin)| margin > 0)
        .map(|(c, margin)| Witness { challenger: c.clone(), margin });
    Ok(PopularityCertificate {
        verdict: if witness.is_some() { Verdict::NotPopular } else { Verdict::Popular },
        witness,
        domain,
    })
}

fn feasible_or_err(instance: &Instance) -> Result<Vec<Matching>> {
    let feasible = enumerate_matchings(instance, Domain::FeasibleMatchings)?;
    if feasible.is_empty() {
        return Err(Error::InfeasibleInstance);
    }
    Ok(feasible)
}

/// Fewest blocking pairs over feasible matchings.
pub fn min_bp(instance: &Instance) -> Result<usize> {
    Ok(feasible_or_err(instance)?.iter().map(|m| blocking_pairs(instance, m).len()).min().expect("non-empty"))
}

/// Fewest blocking residents over feasible matchings.
pub fn min_br(instance: &Instance) -> Result<usize> {
    Ok(feasible_or_err(instance)?.iter().map(|m| blocking_residents(instance, m).len()).min().expect("non-empty"))
}

/// Size of a maximum matching under the upper quotas, by augmenting paths.
pub fn max_matching_size(instance: &Instance) -> usize {
    max_matching(instance).size()
}

pub fn is_stable(instance: &Instance, m: &Matching) -> bool {
    instance.is_valid(m) && blocking_pairs(instance, m).is_empty()
}

/// Feasible, envy-free, and no edge can be added without creating envy.
pub fn is_maximal_envy_free(instance: &Instance, m: &Matching) -> bool {
    if !instance.is_feasible(m) || !is_envy_free(instance, m) {
        return false;
    }
    for (r, h) in instance.edges() {
        if m.hospital_of(r).is_some() {
            continue;
        }
        let mut extended = m.clone();
        extended.assign(r, h);
        if instance.is_valid(&extended) && is_envy_free(instance, &extended) {
            return false;
        }
    }
    true
}
