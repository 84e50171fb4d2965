//! Hospital-residents instances and matchings.
//!
//! Residents and hospitals are dense indices starting at 0 in memory; the text
//! formats in [`crate::io`] shift them to 1-based ids. Every instance carries a
//! single symmetric edge set: `h` is on `r`'s list iff `r` is on `h`'s list.

use std::fmt;

use crate::error::{Error, Result};

pub type Resident = usize;
pub type Hospital = usize;

/// Either side of the bipartition, used where an operation applies to both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    Resident(Resident),
    Hospital(Hospital),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Resident(r) => write!(f, "r{}", r + 1),
            Vertex::Hospital(h) => write!(f, "h{}", h + 1),
        }
    }
}

/// Outcome of classifying an instance with lower quotas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feasibility {
    /// Some stable matching meets every lower quota.
    FeasibleStable,
    /// Feasible matchings exist but none of them is stable.
    FeasibleNoStable,
    /// No matching meets every lower quota.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    resident_prefs: Vec<Vec<Hospital>>,
    hospital_prefs: Vec<Vec<Resident>>,
    lower: Vec<u32>,
    upper: Vec<u32>,
    // (neighbor, position) sorted by neighbor, for O(log d) rank lookups
    resident_index: Vec<Vec<(Hospital, u32)>>,
    hospital_index: Vec<Vec<(Resident, u32)>>,
}

fn build_index(prefs: &[Vec<usize>], owner: impl Fn(usize) -> Vertex) -> Result<Vec<Vec<(usize, u32)>>> {
    prefs
        .iter()
        .enumerate()
        .map(|(v, list)| {
            let mut idx: Vec<(usize, u32)> = list.iter().enumerate().map(|(pos, &n)| (n, pos as u32)).collect();
            idx.sort_unstable();
            if let Some(w) = idx.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::DuplicatePreference { vertex: owner(v).to_string(), entry: w[0].0 + 1 });
            }
            Ok(idx)
        })
        .collect()
}

fn lookup(index: &[(usize, u32)], neighbor: usize) -> Option<usize> {
    index
        .binary_search_by_key(&neighbor, |&(n, _)| n)
        .ok()
        .map(|i| index[i].1 as usize)
}

impl Instance {
    /// Builds an instance, rejecting out-of-range ids, duplicate list entries,
    /// asymmetric acceptability and `lower > upper`.
    pub fn new(
        resident_prefs: Vec<Vec<Hospital>>,
        hospital_prefs: Vec<Vec<Resident>>,
        lower: Vec<u32>,
        upper: Vec<u32>,
    ) -> Result<Self> {
        let n_h = hospital_prefs.len();
        let n_r = resident_prefs.len();
        if lower.len() != n_h || upper.len() != n_h {
            return Err(Error::InvalidParams(format!(
                "{} hospitals but {} lower and {} upper quotas",
                n_h,
                lower.len(),
                upper.len()
            )));
        }
        for (h, (&lq, &uq)) in lower.iter().zip(&upper).enumerate() {
            if lq > uq {
                return Err(Error::Quota { hospital: h + 1, lower: lq, upper: uq });
            }
        }
        for list in &resident_prefs {
            if let Some(&h) = list.iter().find(|&&h| h >= n_h) {
                return Err(Error::UnknownId { kind: "hospital", id: h + 1 });
            }
        }
        for list in &hospital_prefs {
            if let Some(&r) = list.iter().find(|&&r| r >= n_r) {
                return Err(Error::UnknownId { kind: "resident", id: r + 1 });
            }
        }
        let resident_index = build_index(&resident_prefs, Vertex::Resident)?;
        let hospital_index = build_index(&hospital_prefs, Vertex::Hospital)?;

        for (r, list) in resident_prefs.iter().enumerate() {
            for &h in list {
                if lookup(&hospital_index[h], r).is_none() {
                    return Err(Error::AsymmetricEdge(format!(
                        "r{} lists h{} but h{} does not list r{}",
                        r + 1,
                        h + 1,
                        h + 1,
                        r + 1
                    )));
                }
            }
        }
        let res_edges: usize = resident_prefs.iter().map(Vec::len).sum();
        let hosp_edges: usize = hospital_prefs.iter().map(Vec::len).sum();
        if res_edges != hosp_edges {
            // some hospital lists a resident that does not list it back
            for (h, list) in hospital_prefs.iter().enumerate() {
                for &r in list {
                    if lookup(&resident_index[r], h).is_none() {
                        return Err(Error::AsymmetricEdge(format!(
                            "h{} lists r{} but r{} does not list h{}",
                            h + 1,
                            r + 1,
                            r + 1,
                            h + 1
                        )));
                    }
                }
            }
        }

        Ok(Instance { resident_prefs, hospital_prefs, lower, upper, resident_index, hospital_index })
    }

    pub fn empty() -> Self {
        Instance::new(Vec::new(), Vec::new(), Vec::new(), Vec::new()).expect("empty instance is valid")
    }

    pub fn n_residents(&self) -> usize {
        self.resident_prefs.len()
    }

    pub fn n_hospitals(&self) -> usize {
        self.hospital_prefs.len()
    }

    /// |E|.
    pub fn n_edges(&self) -> usize {
        self.resident_prefs.iter().map(Vec::len).sum()
    }

    pub fn resident_prefs(&self, r: Resident) -> &[Hospital] {
        &self.resident_prefs[r]
    }

    pub fn hospital_prefs(&self, h: Hospital) -> &[Resident] {
        &self.hospital_prefs[h]
    }

    pub fn lower_quota(&self, h: Hospital) -> u32 {
        self.lower[h]
    }

    pub fn upper_quota(&self, h: Hospital) -> u32 {
        self.upper[h]
    }

    pub fn lower_quotas(&self) -> &[u32] {
        &self.lower
    }

    pub fn upper_quotas(&self) -> &[u32] {
        &self.upper
    }

    /// True when some hospital has a positive lower quota.
    pub fn has_lower_quotas(&self) -> bool {
        self.lower.iter().any(|&q| q > 0)
    }

    /// 0-based position of `h` on `r`'s list.
    pub fn resident_pos(&self, r: Resident, h: Hospital) -> Option<usize> {
        lookup(&self.resident_index[r], h)
    }

    /// 0-based position of `r` on `h`'s list.
    pub fn hospital_pos(&self, h: Hospital, r: Resident) -> Option<usize> {
        lookup(&self.hospital_index[h], r)
    }

    pub fn is_edge(&self, r: Resident, h: Hospital) -> bool {
        r < self.n_residents() && h < self.n_hospitals() && self.resident_pos(r, h).is_some()
    }

    /// 1-based rank of `neighbor` on `vertex`'s preference list.
    pub fn rank_of(&self, vertex: Vertex, neighbor: usize) -> Result<usize> {
        let (pos, other) = match vertex {
            Vertex::Resident(r) if r < self.n_residents() => {
                (self.resident_pos(r, neighbor), Vertex::Hospital(neighbor))
            }
            Vertex::Hospital(h) if h < self.n_hospitals() => {
                (self.hospital_pos(h, neighbor), Vertex::Resident(neighbor))
            }
            Vertex::Resident(r) => return Err(Error::UnknownId { kind: "resident", id: r + 1 }),
            Vertex::Hospital(h) => return Err(Error::UnknownId { kind: "hospital", id: h + 1 }),
        };
        pos.map(|p| p + 1)
            .ok_or_else(|| Error::NotAcceptable { vertex: vertex.to_string(), neighbor: other.to_string() })
    }

    /// Does `r` strictly prefer `a` to `b`? `None` stands for being unmatched,
    /// which is worse than any acceptable hospital.
    pub fn resident_prefers(&self, r: Resident, a: Option<Hospital>, b: Option<Hospital>) -> bool {
        match (a, b) {
            (Some(a), Some(b)) => self.resident_pos(r, a) < self.resident_pos(r, b),
            (Some(_), None) => true,
            (None, _) => false,
        }
    }

    /// All edges `(r, h)` in resident order, then preference order.
    pub fn edges(&self) -> impl Iterator<Item = (Resident, Hospital)> + '_ {
        self.resident_prefs
            .iter()
            .enumerate()
            .flat_map(|(r, list)| list.iter().map(move |&h| (r, h)))
    }

    /// Same preference lists with replaced quotas.
    pub fn with_quotas(&self, lower: Vec<u32>, upper: Vec<u32>) -> Result<Self> {
        Instance::new(self.resident_prefs.clone(), self.hospital_prefs.clone(), lower, upper)
    }

    /// The HR instance obtained by dropping every lower quota.
    pub fn without_lower_quotas(&self) -> Self {
        let mut out = self.clone();
        out.lower.iter_mut().for_each(|q| *q = 0);
        out
    }

    /// Sub-instance on the same vertex set keeping only the edges accepted by
    /// `keep`; relative orders are inherited from this instance.
    pub fn restrict_edges(&self, keep: impl Fn(Resident, Hospital) -> bool) -> Self {
        let resident_prefs = self
            .resident_prefs
            .iter()
            .enumerate()
            .map(|(r, list)| list.iter().copied().filter(|&h| keep(r, h)).collect())
            .collect();
        let hospital_prefs = self
            .hospital_prefs
            .iter()
            .enumerate()
            .map(|(h, list)| list.iter().copied().filter(|&r| keep(r, h)).collect())
            .collect();
        Instance::new(resident_prefs, hospital_prefs, self.lower.clone(), self.upper.clone())
            .expect("restriction of a valid instance is valid")
    }

    /// Every resident matched at most once along an edge, no hospital above its upper quota.
    pub fn is_valid(&self, m: &Matching) -> bool {
        if m.n_residents() != self.n_residents() {
            return false;
        }
        let mut load = vec![0u32; self.n_hospitals()];
        for (r, h) in m.pairs() {
            if !self.is_edge(r, h) {
                return false;
            }
            load[h] += 1;
        }
        load.iter().zip(&self.upper).all(|(l, u)| l <= u)
    }

    /// Valid and every lower quota met.
    pub fn is_feasible(&self, m: &Matching) -> bool {
        self.is_valid(m) && m.loads(self.n_hospitals()).iter().zip(&self.lower).all(|(l, q)| l >= q)
    }
}

/// A partial assignment of residents to hospitals. Unmatched residents are
/// absent; two matchings compare equal iff they assign identically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    assignment: Vec<Option<Hospital>>,
}

impl Matching {
    pub fn empty(n_residents: usize) -> Self {
        Matching { assignment: vec![None; n_residents] }
    }

    pub fn from_assignment(assignment: Vec<Option<Hospital>>) -> Self {
        Matching { assignment }
    }

    /// Fails with `DuplicateResident` if a resident occurs twice.
    pub fn from_pairs(n_residents: usize, pairs: impl IntoIterator<Item = (Resident, Hospital)>) -> Result<Self> {
        let mut m = Matching::empty(n_residents);
        for (r, h) in pairs {
            if r >= n_residents {
                return Err(Error::UnknownId { kind: "resident", id: r + 1 });
            }
            if m.assignment[r].is_some() {
                return Err(Error::DuplicateResident(r + 1));
            }
            m.assignment[r] = Some(h);
        }
        Ok(m)
    }

    pub fn n_residents(&self) -> usize {
        self.assignment.len()
    }

    pub fn hospital_of(&self, r: Resident) -> Option<Hospital> {
        self.assignment[r]
    }

    pub fn assignment(&self) -> &[Option<Hospital>] {
        &self.assignment
    }

    pub fn assign(&mut self, r: Resident, h: Hospital) {
        self.assignment[r] = Some(h);
    }

    pub fn unassign(&mut self, r: Resident) {
        self.assignment[r] = None;
    }

    /// |M|.
    pub fn size(&self) -> usize {
        self.assignment.iter().filter(|h| h.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    pub fn contains(&self, r: Resident, h: Hospital) -> bool {
        self.assignment.get(r).copied().flatten() == Some(h)
    }

    /// Matched pairs sorted by resident.
    pub fn pairs(&self) -> impl Iterator<Item = (Resident, Hospital)> + '_ {
        self.assignment.iter().enumerate().filter_map(|(r, h)| h.map(|h| (r, h)))
    }

    /// |M(h)| for every hospital.
    pub fn loads(&self, n_hospitals: usize) -> Vec<u32> {
        let mut load = vec![0u32; n_hospitals];
        for (_, h) in self.pairs() {
            if h < n_hospitals {
                load[h] += 1;
            }
        }
        load
    }

    /// M(h) in resident order.
    pub fn residents_of(&self, h: Hospital) -> Vec<Resident> {
        self.pairs().filter(|&(_, x)| x == h).map(|(r, _)| r).collect()
    }

    /// True when every pair of `self` is also in `other`.
    pub fn is_subset_of(&self, other: &Matching) -> bool {
        self.pairs().all(|(r, h)| other.contains(r, h))
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (r, h)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "(r{},h{})", r + 1, h + 1)?;
        }
        f.write_str("}")
    }
}
