//! Maximum cardinality many-to-one matching by augmenting paths.
//!
//! Each hospital has an arbitrary capacity (not necessarily its upper quota),
//! which lets the same routine answer both "how large can a matching be" and
//! "can every lower quota be filled at once".

use crate::instance::{Hospital, Instance, Matching, Resident};

struct Augmenter<'a> {
    instance: &'a Instance,
    capacity: &'a [u32],
    assigned: Vec<Vec<Resident>>,
    matched: Vec<Option<Hospital>>,
    stamp: Vec<u32>,
    round: u32,
}

impl Augmenter<'_> {
    fn augment(&mut self, r: Resident) -> bool {
        for &h in self.instance.resident_prefs(r) {
            if self.stamp[h] == self.round || self.capacity[h] == 0 {
                continue;
            }
            self.stamp[h] = self.round;
            if (self.assigned[h].len() as u32) < self.capacity[h] {
                self.assigned[h].push(r);
                self.matched[r] = Some(h);
                return true;
            }
            for i in 0..self.assigned[h].len() {
                let other = self.assigned[h][i];
                if self.augment(other) {
                    self.assigned[h][i] = r;
                    self.matched[r] = Some(h);
                    return true;
                }
            }
        }
        false
    }
}

/// A maximum matching in which hospital `h` receives at most `capacity[h]` residents.
pub fn max_matching_with_capacity(instance: &Instance, capacity: &[u32]) -> Matching {
    assert_eq!(capacity.len(), instance.n_hospitals());
    let mut aug = Augmenter {
        instance,
        capacity,
        assigned: vec![Vec::new(); instance.n_hospitals()],
        matched: vec![None; instance.n_residents()],
        stamp: vec![0; instance.n_hospitals()],
        round: 0,
    };
    for r in 0..instance.n_residents() {
        aug.round += 1;
        aug.augment(r);
    }
    Matching::from_assignment(aug.matched)
}

/// A maximum cardinality matching under the upper quotas.
pub fn max_matching(instance: &Instance) -> Matching {
    max_matching_with_capacity(instance, instance.upper_quotas())
}
