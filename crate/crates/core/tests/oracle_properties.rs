mod common;

use common::{certify_small_instance, random_small};
use popmatch::generators::{classify, feasibility_exists};
use popmatch::metrics::blocking_pairs;
use popmatch::oracle::{enumerate_matchings, hospital_vote_adversarial, popularity_margin, Domain};
use popmatch::solvers::{hr, hrlq};
use popmatch::{Feasibility, Matching};
use proptest::prelude::*;

#[test]
fn solver_guarantees_on_random_small_instances() {
    for seed in 10_000..10_300 {
        let g = random_small(seed, 6, 4, 2);
        if let Err(e) = certify_small_instance(&g) {
            panic!("seed {seed}: {e}\n{}", popmatch::io::serialize_instance(&g));
        }
    }
}

#[test]
fn larger_capacities() {
    for seed in 0..60 {
        let g = random_small(seed, 6, 3, 4);
        if let Err(e) = certify_small_instance(&g) {
            panic!("seed {seed}: {e}\n{}", popmatch::io::serialize_instance(&g));
        }
    }
}

#[test]
fn classify_agrees_with_enumeration() {
    for seed in 0..200 {
        let g = random_small(seed, 6, 4, 2);
        let feasible = enumerate_matchings(&g, Domain::FeasibleMatchings).unwrap();
        let hr_view = g.without_lower_quotas();
        let feasible_stable = feasible.iter().any(|m| blocking_pairs(&hr_view, m).is_empty());
        let expected = match (feasible.is_empty(), feasible_stable) {
            (true, _) => Feasibility::Infeasible,
            (false, true) => Feasibility::FeasibleStable,
            (false, false) => Feasibility::FeasibleNoStable,
        };
        assert_eq!(classify(&g), expected, "seed {seed}");
        assert_eq!(feasibility_exists(&g), !feasible.is_empty());
    }
}

#[test]
fn feasible_stable_instances_run_without_level_ups() {
    for seed in 0..200 {
        let g = random_small(seed, 6, 4, 2);
        if classify(&g) == Feasibility::FeasibleStable {
            let run = hrlq::hrlq_popular_stats(&g).unwrap();
            assert_eq!(run.level_ups, 0, "seed {seed}");
            assert!(blocking_pairs(&g, &run.matching).is_empty());
        }
    }
}

#[test]
fn hrlq_levels_and_trace() {
    for seed in 0..200 {
        let g = random_small(seed, 6, 4, 2);
        let Ok(run) = hrlq::trace(&g) else { continue };
        for h in 0..g.n_hospitals() {
            assert!(run.hospital_level[h] <= g.n_residents());
            if g.lower_quota(h) == 0 {
                assert_eq!(run.hospital_level[h], 0);
            }
        }
        assert!(run.proposals <= (g.n_edges() * (g.n_residents() + 1)) as u64);
        assert_eq!(hrlq::replay(g.n_residents(), &run.events), run.matching);
        assert_eq!(hrlq::hrlq_popular(&g).unwrap(), run.matching);
    }
}

fn arb_seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn level_sizes_are_monotone(seed in arb_seed()) {
        let g = random_small(seed, 8, 5, 3).without_lower_quotas();
        let mut last = 0;
        for cap in 1..=g.n_residents() {
            let size = hr::level_propose(&g, cap).unwrap().size();
            prop_assert!(size >= last);
            last = size;
        }
        prop_assert_eq!(hr::level_propose(&g, 1).unwrap(), hr::gs_resident(&g));
    }

    #[test]
    fn stable_is_at_least_half_maximum(seed in arb_seed()) {
        let g = random_small(seed, 8, 5, 3).without_lower_quotas();
        let best = popmatch::bmatching::max_matching(&g).size();
        prop_assert!(2 * hr::gs_resident(&g).size() >= best);
        prop_assert_eq!(hr::gs_resident(&g).size(), hr::gs_hospital(&g).size());
    }

    #[test]
    fn adversarial_votes_bound_each_other(seed in arb_seed(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let g = random_small(seed, 5, 3, 3);
        let all = enumerate_matchings(&g, Domain::AllMatchings).unwrap();
        let (m, c) = (&all[a.index(all.len())], &all[b.index(all.len())]);
        for h in 0..g.n_hospitals() {
            prop_assert!(hospital_vote_adversarial(&g, h, m, c) >= -hospital_vote_adversarial(&g, h, c, m));
        }
        prop_assert_eq!(popularity_margin(&g, m, m), 0);
        prop_assert!(popularity_margin(&g, m, c) >= -popularity_margin(&g, c, m));
    }
}

#[test]
fn enumeration_is_duplicate_free() {
    for seed in 0..100 {
        let g = random_small(seed, 6, 4, 2);
        let all = enumerate_matchings(&g, Domain::AllMatchings).unwrap();
        let mut sorted: Vec<Matching> = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
        assert!(all.iter().all(|m| g.is_valid(m)));
    }
}
