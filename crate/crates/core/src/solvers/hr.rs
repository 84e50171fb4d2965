//! Stable and popular matchings for instances without lower quotas.
//!
//! Lower quotas, when present, are ignored by every routine here.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::instance::{Instance, Matching};

/// Resident-proposing Gale–Shapley. Residents propose in FIFO order starting
/// from index order; a displaced resident joins the tail of the queue.
pub fn gs_resident(instance: &Instance) -> Matching {
    let n_h = instance.n_hospitals();
    let mut m = Matching::empty(instance.n_residents());
    let mut cursor = vec![0usize; instance.n_residents()];
    // max-heap on hospital-side position: the top is the least preferred holder
    let mut held: Vec<BinaryHeap<(usize, usize)>> = vec![BinaryHeap::new(); n_h];
    let mut queue: VecDeque<usize> = (0..instance.n_residents()).collect();

    while let Some(r) = queue.pop_front() {
        let prefs = instance.resident_prefs(r);
        while cursor[r] < prefs.len() {
            let h = prefs[cursor[r]];
            cursor[r] += 1;
            let pos = instance.hospital_pos(h, r).expect("symmetric edge");
            let cap = instance.upper_quota(h) as usize;
            if held[h].len() < cap {
                held[h].push((pos, r));
                m.assign(r, h);
                break;
            }
            if let Some(&(worst_pos, worst)) = held[h].peek() {
                if pos < worst_pos {
                    held[h].pop();
                    m.unassign(worst);
                    queue.push_back(worst);
                    held[h].push((pos, r));
                    m.assign(r, h);
                    break;
                }
            }
        }
    }
    m
}

/// Hospital-proposing Gale–Shapley with a FIFO queue over hospital indices.
/// A hospital proposes down its list while below its upper quota.
pub fn gs_hospital(instance: &Instance) -> Matching {
    let n_h = instance.n_hospitals();
    let mut m = Matching::empty(instance.n_residents());
    let mut load = vec![0u32; n_h];
    let mut cursor = vec![0usize; n_h];
    let mut queued = vec![true; n_h];
    let mut queue: VecDeque<usize> = (0..n_h).collect();

    while let Some(h) = queue.pop_front() {
        queued[h] = false;
        let prefs = instance.hospital_prefs(h);
        while load[h] < instance.upper_quota(h) && cursor[h] < prefs.len() {
            let r = prefs[cursor[h]];
            cursor[h] += 1;
            let current = m.hospital_of(r);
            if instance.resident_prefers(r, Some(h), current) {
                if let Some(prev) = current {
                    load[prev] -= 1;
                    if !queued[prev] {
                        queued[prev] = true;
                        queue.push_back(prev);
                    }
                }
                m.assign(r, h);
                load[h] += 1;
            }
        }
    }
    m
}

/// Per-resident bookkeeping of the level construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelState {
    pub level: Vec<usize>,
    pub cursor: Vec<usize>,
}

/// Resident-proposing Gale–Shapley on the `level_cap`-level reduced instance,
/// run implicitly. A resident that runs off the end of its list at level
/// `l < level_cap - 1` starts over at level `l + 1`; hospitals prefer a higher
/// level and break equal levels by their own list.
pub fn level_propose(instance: &Instance, level_cap: usize) -> Result<Matching> {
    level_propose_with_state(instance, level_cap).map(|(m, _)| m)
}

pub fn level_propose_with_state(instance: &Instance, level_cap: usize) -> Result<(Matching, LevelState)> {
    if level_cap < 1 {
        return Err(Error::InvalidParams("level cap must be at least 1".into()));
    }
    let n_r = instance.n_residents();
    let mut m = Matching::empty(n_r);
    let mut state = LevelState { level: vec![0; n_r], cursor: vec![0; n_r] };
    // top of each heap is the holder the hospital likes least: lowest level, then worst position
    let mut held: Vec<BinaryHeap<(Reverse<usize>, usize, usize)>> = vec![BinaryHeap::new(); instance.n_hospitals()];
    let mut queue: VecDeque<usize> = (0..n_r).collect();

    while let Some(r) = queue.pop_front() {
        let prefs = instance.resident_prefs(r);
        loop {
            if state.cursor[r] == prefs.len() {
                if state.level[r] + 1 < level_cap && !prefs.is_empty() {
                    state.level[r] += 1;
                    state.cursor[r] = 0;
                    continue;
                }
                break;
            }
            let h = prefs[state.cursor[r]];
            state.cursor[r] += 1;
            let key = (Reverse(state.level[r]), instance.hospital_pos(h, r).expect("symmetric edge"), r);
            if held[h].len() < instance.upper_quota(h) as usize {
                held[h].push(key);
                m.assign(r, h);
                break;
            }
            if let Some(&worst) = held[h].peek() {
                // smaller key = more preferred
                if key < worst {
                    held[h].pop();
                    m.unassign(worst.2);
                    queue.push_back(worst.2);
                    held[h].push(key);
                    m.assign(r, h);
                    break;
                }
            }
        }
    }
    Ok((m, state))
}

/// Maximum cardinality popular matching (two levels).
pub fn max_card_popular(instance: &Instance) -> Matching {
    level_propose(instance, 2).expect("cap 2 is valid")
}

/// Popular among maximum cardinality matchings when `level_cap = |R|`;
/// smaller caps trade the guarantee for speed.
pub fn popular_among_maxcard(instance: &Instance, level_cap: Option<usize>) -> Result<Matching> {
    let cap = level_cap.unwrap_or_else(|| instance.n_residents().max(1));
    level_propose(instance, cap)
}
