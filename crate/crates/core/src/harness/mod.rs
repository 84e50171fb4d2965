//! Named algorithms and properties shared by the CLI, the experiment grid and
//! the fixture suite.

pub mod experiment;
pub mod fixtures;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::instance::{Instance, Matching};
use crate::metrics::{blocking_pairs, envy_pairs};
use crate::oracle::{self, Domain};
use crate::solvers::{envyfree, hr, hrlq};

/// Every solver reachable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Resident-proposing Gale–Shapley, lower quotas ignored.
    GsRes,
    /// Hospital-proposing Gale–Shapley, lower quotas ignored.
    GsHosp,
    /// Maximum cardinality popular matching, lower quotas ignored.
    PopularMax,
    /// Popular among maximum cardinality matchings, lower quotas ignored.
    MaxPopular,
    HrlqPopular,
    EnvyFreeYokoi,
    EnvyFreeMaximal,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::GsRes,
        Algorithm::GsHosp,
        Algorithm::PopularMax,
        Algorithm::MaxPopular,
        Algorithm::HrlqPopular,
        Algorithm::EnvyFreeYokoi,
        Algorithm::EnvyFreeMaximal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::GsRes => "gs-res",
            Algorithm::GsHosp => "gs-hosp",
            Algorithm::PopularMax => "popular-max",
            Algorithm::MaxPopular => "max-popular",
            Algorithm::HrlqPopular => "hrlq-popular",
            Algorithm::EnvyFreeYokoi => "envy-free-yokoi",
            Algorithm::EnvyFreeMaximal => "envy-free-maximal",
        }
    }

    /// Runs the solver. `Ok(None)` means the instance has no envy-free
    /// matching (envy-free algorithms only). `level_cap` applies to
    /// `max-popular` and defaults to `|R|`.
    pub fn run(self, instance: &Instance, level_cap: Option<usize>) -> Result<Option<Matching>> {
        let hr_view = || instance.without_lower_quotas();
        Ok(Some(match self {
            Algorithm::GsRes => hr::gs_resident(&hr_view()),
            Algorithm::GsHosp => hr::gs_hospital(&hr_view()),
            Algorithm::PopularMax => hr::max_card_popular(&hr_view()),
            Algorithm::MaxPopular => hr::popular_among_maxcard(&hr_view(), level_cap)?,
            Algorithm::HrlqPopular => hrlq::hrlq_popular(instance)?,
            Algorithm::EnvyFreeYokoi => return Ok(envyfree::yokoi(instance)),
            Algorithm::EnvyFreeMaximal => return Ok(envyfree::maximal_envy_free(instance)),
        }))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown algorithm `{s}`")))
    }
}

/// Properties the `verify` command can certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    Stable,
    Feasible,
    PopularAll,
    PopularFeasible,
    EnvyFree,
    MaximalEnvyFree,
}

/// Verdict of a property check, with a counterexample where one exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyOutcome {
    pub holds: bool,
    /// A strictly more popular matching, for the popularity properties.
    pub witness: Option<Matching>,
    /// Human-readable reason, empty when the property holds.
    pub detail: String,
}

impl PropertyOutcome {
    fn from_bool(holds: bool, detail: impl FnOnce() -> String) -> Self {
        PropertyOutcome { holds, witness: None, detail: if holds { String::new() } else { detail() } }
    }
}

fn pair_list(pairs: &[(usize, usize)], a: char, b: char) -> String {
    pairs.iter().map(|(x, y)| format!("({a}{},{b}{})", x + 1, y + 1)).collect::<Vec<_>>().join(" ")
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Stable,
        Property::Feasible,
        Property::PopularAll,
        Property::PopularFeasible,
        Property::EnvyFree,
        Property::MaximalEnvyFree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Stable => "stable",
            Property::Feasible => "feasible",
            Property::PopularAll => "popular-all",
            Property::PopularFeasible => "popular-feasible",
            Property::EnvyFree => "envy-free",
            Property::MaximalEnvyFree => "maximal-envy-free",
        }
    }

    /// Checks the property. The popularity checks enumerate matchings and
    /// fail with `TooLarge` on big instances. Stability ignores lower quotas.
    pub fn check(self, instance: &Instance, m: &Matching) -> Result<PropertyOutcome> {
        if !instance.is_valid(m) {
            return Ok(PropertyOutcome::from_bool(false, || "matching exceeds an upper quota".into()));
        }
        Ok(match self {
            Property::Stable => {
                let bp = blocking_pairs(instance, m);
                PropertyOutcome::from_bool(bp.is_empty(), || format!("blocking pairs: {}", pair_list(&bp, 'r', 'h')))
            }
            Property::Feasible => PropertyOutcome::from_bool(instance.is_feasible(m), || "a lower quota is not met".into()),
            Property::PopularAll | Property::PopularFeasible => {
                let domain = if self == Property::PopularAll { Domain::AllMatchings } else { Domain::FeasibleMatchings };
                let cert = oracle::is_popular(instance, m, domain)?;
                match cert.witness {
                    None => PropertyOutcome { holds: true, witness: None, detail: String::new() },
                    Some(w) => PropertyOutcome {
                        holds: false,
                        detail: format!("{} is more popular by {}", w.challenger, w.margin),
                        witness: Some(w.challenger),
                    },
                }
            }
            Property::EnvyFree => {
                let envy = envy_pairs(instance, m);
                PropertyOutcome::from_bool(envy.is_empty(), || format!("justified envy: {}", pair_list(&envy, 'r', 'r')))
            }
            Property::MaximalEnvyFree => PropertyOutcome::from_bool(oracle::is_maximal_envy_free(instance, m), || {
                "not a maximal envy-free feasible matching".into()
            }),
        })
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown property `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::three_residents;

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        for p in Property::ALL {
            assert_eq!(p.to_string().parse::<Property>().unwrap(), p);
        }
        assert!("gs".parse::<Algorithm>().is_err());
    }

    #[test]
    fn three_residents_properties() {
        let g = three_residents();
        let m2 = Algorithm::HrlqPopular.run(&g, None).unwrap().unwrap();
        assert!(Property::Feasible.check(&g, &m2).unwrap().holds);
        assert!(Property::PopularFeasible.check(&g, &m2).unwrap().holds);
        let stable = Property::Stable.check(&g, &m2).unwrap();
        assert!(!stable.holds);
        assert_eq!(stable.detail, "blocking pairs: (r2,h1)");
        let envy = Property::EnvyFree.check(&g, &m2).unwrap();
        assert_eq!(envy.detail, "justified envy: (r2,r3)");
        let m1 = Algorithm::GsHosp.run(&g, None).unwrap().unwrap();
        assert!(Property::Stable.check(&g, &m1).unwrap().holds);
        assert!(!Property::Feasible.check(&g, &m1).unwrap().holds);
    }

    #[test]
    fn overfull_matching_fails_everything() {
        let g = Instance::new(vec![vec![0]; 2], vec![vec![0, 1]], vec![0], vec![1]).unwrap();
        let m = Matching::from_pairs(2, [(0, 0), (1, 0)]).unwrap();
        for p in Property::ALL {
            assert!(!p.check(&g, &m).unwrap().holds, "{p}");
        }
    }
}
