//! Popular matching among feasible matchings for instances with lower quotas.
//!
//! Hospital-proposing Gale–Shapley in which deficient lower-quota hospitals
//! restart their list at a higher level. A resident compares two hospitals by
//! level first and by its own list second, so a higher-level proposal always
//! displaces a lower-level partner.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::generators::feasibility_exists;
use crate::instance::{Hospital, Instance, Matching, Resident};

/// One step of a run; ids are 0-based in memory and 1-based when displayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Propose { hospital: Hospital, resident: Resident, level: usize },
    Accept { hospital: Hospital, resident: Resident },
    Reject { hospital: Hospital, resident: Resident },
    /// `hospital` lost `resident` to a proposal it accepted.
    Bump { hospital: Hospital, resident: Resident },
    LevelUp { hospital: Hospital, level: usize },
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Event::Propose { hospital, resident, level } => {
                write!(f, "propose h{} r{} level={}", hospital + 1, resident + 1, level)
            }
            Event::Accept { hospital, resident } => write!(f, "accept h{} r{}", hospital + 1, resident + 1),
            Event::Reject { hospital, resident } => write!(f, "reject h{} r{}", hospital + 1, resident + 1),
            Event::Bump { hospital, resident } => write!(f, "bump h{} r{}", hospital + 1, resident + 1),
            Event::LevelUp { hospital, level } => write!(f, "level-up h{} level={}", hospital + 1, level),
        }
    }
}

/// Result of a run with its counters.
#[derive(Debug, Clone)]
pub struct HrlqRun {
    pub matching: Matching,
    pub proposals: u64,
    pub level_ups: u64,
    pub hospital_level: Vec<usize>,
    /// Level of the hospital each resident was matched at; `None` if never matched.
    pub resident_level: Vec<Option<usize>>,
    pub events: Vec<Event>,
}

struct HrlqState<'a> {
    instance: &'a Instance,
    matching: Matching,
    load: Vec<u32>,
    queue: VecDeque<Hospital>,
    queued: Vec<bool>,
    hospital_level: Vec<usize>,
    resident_level: Vec<Option<usize>>,
    cursor: Vec<usize>,
    proposals: u64,
    level_ups: u64,
    events: Option<Vec<Event>>,
}

impl HrlqState<'_> {
    fn log(&mut self, e: Event) {
        if let Some(ev) = self.events.as_mut() {
            ev.push(e);
        }
    }

    fn enqueue(&mut self, h: Hospital) {
        if !self.queued[h] {
            self.queued[h] = true;
            self.queue.push_back(h);
        }
    }

    /// Does `r`, currently matched to `current`, switch to `h`?
    fn prefers(&self, r: Resident, h: Hospital, current: Hospital) -> bool {
        let lr = self.resident_level[r];
        let lh = Some(self.hospital_level[h]);
        lr < lh || (lr == lh && self.instance.resident_pos(r, h) < self.instance.resident_pos(r, current))
    }

    fn run(&mut self) {
        let g = self.instance;
        let max_level = g.n_residents();
        while let Some(h) = self.queue.pop_front() {
            self.queued[h] = false;
            let prefs = g.hospital_prefs(h);
            let lq = g.lower_quota(h);
            if self.cursor[h] < prefs.len() {
                let r = prefs[self.cursor[h]];
                self.cursor[h] += 1;
                self.proposals += 1;
                self.log(Event::Propose { hospital: h, resident: r, level: self.hospital_level[h] });
                if let Some(current) = self.matching.hospital_of(r) {
                    if current == h {
                        // re-proposal after a level-up only lifts the resident's level
                        if self.resident_level[r] < Some(self.hospital_level[h]) {
                            self.resident_level[r] = Some(self.hospital_level[h]);
                            self.log(Event::Accept { hospital: h, resident: r });
                        } else {
                            self.log(Event::Reject { hospital: h, resident: r });
                        }
                        self.enqueue(h);
                        continue;
                    }
                    if !self.prefers(r, h, current) {
                        self.log(Event::Reject { hospital: h, resident: r });
                        self.enqueue(h);
                        continue;
                    }
                    self.matching.unassign(r);
                    self.load[current] -= 1;
                    self.log(Event::Bump { hospital: current, resident: r });
                    self.enqueue(current);
                }
                self.matching.assign(r, h);
                self.load[h] += 1;
                self.resident_level[r] = Some(self.hospital_level[h]);
                self.log(Event::Accept { hospital: h, resident: r });
                if (self.hospital_level[h] == 0 && self.load[h] < g.upper_quota(h)) || (lq > 0 && self.load[h] < lq) {
                    self.enqueue(h);
                }
            } else if lq > 0 && self.load[h] < lq && self.hospital_level[h] < max_level {
                self.hospital_level[h] += 1;
                self.cursor[h] = 0;
                self.level_ups += 1;
                self.log(Event::LevelUp { hospital: h, level: self.hospital_level[h] });
                self.enqueue(h);
            }
        }
    }
}

fn run(instance: &Instance, record: bool) -> Result<HrlqRun> {
    if !feasibility_exists(instance) {
        return Err(Error::InfeasibleInstance);
    }
    let n_h = instance.n_hospitals();
    let mut st = HrlqState {
        instance,
        matching: Matching::empty(instance.n_residents()),
        load: vec![0; n_h],
        queue: (0..n_h).collect(),
        queued: vec![true; n_h],
        hospital_level: vec![0; n_h],
        resident_level: vec![None; instance.n_residents()],
        cursor: vec![0; n_h],
        proposals: 0,
        level_ups: 0,
        events: record.then(Vec::new),
    };
    st.run();
    if !instance.is_feasible(&st.matching) {
        return Err(Error::InfeasibleInstance);
    }
    Ok(HrlqRun {
        matching: st.matching,
        proposals: st.proposals,
        level_ups: st.level_ups,
        hospital_level: st.hospital_level,
        resident_level: st.resident_level,
        events: st.events.unwrap_or_default(),
    })
}

/// A feasible matching that is popular among all feasible matchings.
/// Fails with `InfeasibleInstance` when no feasible matching exists.
pub fn hrlq_popular(instance: &Instance) -> Result<Matching> {
    run(instance, false).map(|r| r.matching)
}

/// Same as [`hrlq_popular`] with counters but without the event log.
pub fn hrlq_popular_stats(instance: &Instance) -> Result<HrlqRun> {
    run(instance, false)
}

/// Runs [`hrlq_popular`] and records every event.
pub fn trace(instance: &Instance) -> Result<HrlqRun> {
    run(instance, true)
}

/// Rebuilds the final matching from an event log.
pub fn replay(n_residents: usize, events: &[Event]) -> Matching {
    let mut m = Matching::empty(n_residents);
    for e in events {
        match *e {
            Event::Accept { hospital, resident } => m.assign(resident, hospital),
            Event::Bump { resident, .. } => m.unassign(resident),
            _ => {}
        }
    }
    m
}
