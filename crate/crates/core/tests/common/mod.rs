#![allow(dead_code, clippy::needless_range_loop)]

use popmatch::bmatching::max_matching;
use popmatch::generators::{classify, feasibility_exists};
use popmatch::io::parse_instance;
use popmatch::metrics::{blocking_pairs, deficiency, is_envy_free};
use popmatch::oracle::{enumerate_matchings, is_maximal_envy_free, is_popular, min_bp, min_br, Domain};
use popmatch::solvers::{envyfree, hr, hrlq};
use popmatch::{Error, Feasibility, Instance, Matching};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn three_residents() -> Instance {
    parse_instance(include_str!("../../fixtures/three_residents.hrlq")).unwrap()
}

pub fn stable_favoured() -> Instance {
    parse_instance(include_str!("../../fixtures/stable_favoured.hrlq")).unwrap()
}

pub fn popular_favoured() -> Instance {
    parse_instance(include_str!("../../fixtures/popular_favoured.hrlq")).unwrap()
}

/// Pairs given with 1-based ids.
pub fn matching(n_residents: usize, pairs: &[(usize, usize)]) -> Matching {
    Matching::from_pairs(n_residents, pairs.iter().map(|&(r, h)| (r - 1, h - 1))).unwrap()
}

/// A random instance with up to `max_r` residents, `max_h` hospitals and
/// upper quotas up to `max_q`; roughly half the hospitals get a lower quota.
pub fn random_small(seed: u64, max_r: usize, max_h: usize, max_q: u32) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_r = rng.gen_range(1..=max_r);
    let n_h = rng.gen_range(1..=max_h);
    let density = rng.gen_range(0.3..0.9);
    let mut resident_prefs = vec![Vec::new(); n_r];
    let mut hospital_prefs = vec![Vec::new(); n_h];
    for r in 0..n_r {
        for h in 0..n_h {
            if rng.gen_bool(density) {
                resident_prefs[r].push(h);
                hospital_prefs[h].push(r);
            }
        }
        resident_prefs[r].shuffle(&mut rng);
    }
    for list in &mut hospital_prefs {
        list.shuffle(&mut rng);
    }
    let upper: Vec<u32> = (0..n_h).map(|_| rng.gen_range(1..=max_q)).collect();
    let lower: Vec<u32> = upper.iter().map(|&u| if rng.gen_bool(0.5) { rng.gen_range(0..=u) } else { 0 }).collect();
    Instance::new(resident_prefs, hospital_prefs, lower, upper).unwrap()
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// Every solver guarantee that exhaustive search can check on a small
/// instance. Returns the first violated one.
pub fn certify_small_instance(g: &Instance) -> Result<(), String> {
    let hr_view = g.without_lower_quotas();
    let all = enumerate_matchings(g, Domain::AllMatchings).map_err(|e| e.to_string())?;
    let best = all.iter().map(Matching::size).max().unwrap_or(0);

    // stable matchings
    let ms_res = hr::gs_resident(&hr_view);
    let ms_hosp = hr::gs_hospital(&hr_view);
    ensure(blocking_pairs(&hr_view, &ms_res).is_empty(), || "gs_resident output has a blocking pair".into())?;
    ensure(blocking_pairs(&hr_view, &ms_hosp).is_empty(), || "gs_hospital output has a blocking pair".into())?;
    ensure(ms_res.size() == ms_hosp.size(), || "stable matchings differ in size".into())?;

    // popular matchings without lower quotas
    let mp = hr::max_card_popular(&hr_view);
    ensure(3 * mp.size() >= 2 * best, || format!("max_card_popular size {} below 2/3 of {best}", mp.size()))?;
    ensure(is_popular(&hr_view, &mp, Domain::AllMatchings).unwrap().is_popular(), || {
        format!("max_card_popular output {mp} is not popular")
    })?;
    let mm = hr::popular_among_maxcard(&hr_view, None).unwrap();
    ensure(mm.size() == best, || format!("popular_among_maxcard size {} != maximum {best}", mm.size()))?;
    ensure(max_matching(&hr_view).size() == best, || "augmenting-path maximum disagrees with enumeration".into())?;
    ensure(is_popular(&hr_view, &mm, Domain::MaxCardinalityMatchings).unwrap().is_popular(), || {
        format!("popular_among_maxcard output {mm} is not popular among maximum matchings")
    })?;

    // lower quotas
    let feasible = enumerate_matchings(g, Domain::FeasibleMatchings).unwrap();
    ensure(feasibility_exists(g) == !feasible.is_empty(), || "feasibility_exists disagrees with enumeration".into())?;
    match hrlq::hrlq_popular(g) {
        Ok(m) => {
            ensure(g.is_feasible(&m), || format!("hrlq_popular output {m} is infeasible"))?;
            let cert = is_popular(g, &m, Domain::FeasibleMatchings).unwrap();
            ensure(cert.is_popular(), || format!("hrlq_popular output {m} loses to {:?}", cert.witness))?;
            if classify(g) == Feasibility::FeasibleStable {
                ensure(m == ms_hosp, || "hrlq_popular differs from the feasible stable matching".into())?;
            }
            let def = deficiency(g, &ms_hosp) as usize;
            let (bp, br) = (min_bp(g).unwrap(), min_br(g).unwrap());
            ensure(def <= br && br <= bp, || format!("expected Def {def} <= min_br {br} <= min_bp {bp}"))?;
        }
        Err(Error::InfeasibleInstance) => ensure(feasible.is_empty(), || "hrlq_popular gave up on a feasible instance".into())?,
        Err(e) => return Err(format!("hrlq_popular failed: {e}")),
    }

    // envy-freeness
    let envy_free_exists = feasible.iter().any(|m| is_envy_free(g, m));
    let m1 = envyfree::yokoi(g);
    ensure(m1.is_some() == envy_free_exists, || {
        format!("yokoi says {} but enumeration says {envy_free_exists}", m1.is_some())
    })?;
    if let Some(m1) = m1 {
        let me = envyfree::maximal_envy_free(g).ok_or("maximal_envy_free disagrees with yokoi")?;
        ensure(is_maximal_envy_free(g, &me), || format!("{me} is not maximal envy-free"))?;
        ensure(m1.is_subset_of(&me), || format!("{me} does not contain {m1}"))?;
    } else {
        ensure(envyfree::maximal_envy_free(g).is_none(), || "maximal_envy_free disagrees with yokoi".into())?;
    }
    Ok(())
}
