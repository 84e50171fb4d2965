//! Envy-free matchings for instances with lower quotas.

use crate::error::{Error, Result};
use crate::instance::{Hospital, Instance, Matching, Resident};
use crate::solvers::hr::gs_hospital;

/// The instance in which every hospital's upper quota is its lower quota and
/// lower quotas are dropped.
pub fn lower_quota_instance(instance: &Instance) -> Instance {
    instance
        .with_quotas(vec![0; instance.n_hospitals()], instance.lower_quotas().to_vec())
        .expect("zero lower quotas are always valid")
}

/// Stable matching of the lower-quota instance, returned only if it fills
/// every lower quota. `None` means the instance has no envy-free feasible
/// matching.
pub fn yokoi(instance: &Instance) -> Option<Matching> {
    let g1 = lower_quota_instance(instance);
    let m1 = gs_hospital(&g1);
    let load = m1.loads(instance.n_hospitals());
    load.iter().zip(instance.lower_quotas()).all(|(l, q)| l == q).then_some(m1)
}

/// Threshold resident of an under-subscribed hospital.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    Resident(Resident),
    /// Sits just after the end of the hospital's list.
    Dummy,
}

impl Threshold {
    /// Position on `h`'s list; the dummy is one past the end.
    pub fn position(self, instance: &Instance, h: Hospital) -> usize {
        match self {
            Threshold::Resident(r) => instance.hospital_pos(h, r).expect("threshold is on the list"),
            Threshold::Dummy => instance.hospital_prefs(h).len(),
        }
    }
}

/// Most preferred resident on `h`'s list that is matched in `m1` and would
/// rather be at `h`.
pub fn threshold_resident(instance: &Instance, m1: &Matching, h: Hospital) -> Result<Threshold> {
    if m1.residents_of(h).len() as u32 >= instance.upper_quota(h) {
        return Err(Error::NotUndersubscribed(h + 1));
    }
    Ok(instance
        .hospital_prefs(h)
        .iter()
        .copied()
        .find(|&r| matches!(m1.hospital_of(r), Some(cur) if instance.resident_prefers(r, Some(h), Some(cur))))
        .map_or(Threshold::Dummy, Threshold::Resident))
}

/// The reduced instance on the same vertex set: only residents unmatched in
/// `m1` and under-subscribed hospitals keep edges, and `h` keeps `r` only if it
/// prefers `r` to its threshold resident. Upper quotas become `q+ - q-`, lower
/// quotas 0.
pub fn build_reduced(instance: &Instance, m1: &Matching) -> Instance {
    let n_h = instance.n_hospitals();
    let load = m1.loads(n_h);
    let cutoff: Vec<Option<usize>> = (0..n_h)
        .map(|h| {
            (load[h] < instance.upper_quota(h))
                .then(|| threshold_resident(instance, m1, h).expect("under-subscribed").position(instance, h))
        })
        .collect();
    let reduced = instance.restrict_edges(|r, h| {
        m1.hospital_of(r).is_none()
            && cutoff[h].is_some_and(|c| instance.hospital_pos(h, r).expect("edge") < c)
    });
    let upper = (0..n_h).map(|h| instance.upper_quota(h) - instance.lower_quota(h)).collect();
    reduced.with_quotas(vec![0; n_h], upper).expect("q+ - q- is non-negative")
}

/// Maximal envy-free matching: the Yokoi matching extended by a stable
/// matching of the reduced instance. `None` when no envy-free matching exists.
pub fn maximal_envy_free(instance: &Instance) -> Option<Matching> {
    let m1 = yokoi(instance)?;
    let reduced = build_reduced(instance, &m1);
    let m2 = gs_hospital(&reduced);
    let mut m = m1;
    for (r, h) in m2.pairs() {
        m.assign(r, h);
    }
    Some(m)
}
