//! Seeded synthetic instances.
//!
//! Residents draw `k` distinct hospitals from a geometric distribution over
//! hospital ids (id 1 is the most popular), truncated to `1..=|H|`, and rank
//! them in draw order. By default the geometric decay is stretched over the
//! whole id range (see [`GeneratorParams::geometric_span`]) so the popularity
//! profile looks the same for 10 or 1000 hospitals. Under [`Model::Master`] every hospital ranks its
//! applicants by one shared random permutation of residents; under
//! [`Model::Shuffle`] each hospital shuffles its applicants independently.
//!
//! All randomness comes from ChaCha8 seeded with the 64-bit seed, so a
//! `(params, seed)` pair always yields the same instance on every platform.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bmatching::max_matching_with_capacity;
use crate::error::{Error, Result};
use crate::instance::{Feasibility, Instance};
use crate::solvers::hr::gs_hospital;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Master,
    Shuffle,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Master => "master",
            Model::Shuffle => "shuffle",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "master" => Ok(Model::Master),
            "shuffle" => Ok(Model::Shuffle),
            other => Err(Error::InvalidParams(format!("unknown model `{other}`"))),
        }
    }
}

/// Default [`GeneratorParams::geometric_span`].
pub const DEFAULT_GEOMETRIC_SPAN: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub model: Model,
    pub n_residents: usize,
    pub n_hospitals: usize,
    /// Length of every resident's list.
    pub pref_len: usize,
    /// Uniform upper quota; `None` means `|R| / |H|` (at least 1).
    pub capacity: Option<u32>,
    pub geometric_p: f64,
    /// Number of geometric steps spread evenly over the whole hospital list:
    /// hospital `i` (0-based) has weight `(1-p)^(i * span / |H|)`. `None`
    /// takes one step per hospital, which for large `|H|` puts almost every
    /// draw on the first few dozen ids.
    pub geometric_span: Option<f64>,
    /// Fraction of hospitals that receive a positive lower quota.
    pub lq_hospital_fraction: f64,
    /// Total lower quota as a fraction of total upper quota.
    pub lq_load_fraction: f64,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn new(model: Model, n_residents: usize, n_hospitals: usize, pref_len: usize, seed: u64) -> Self {
        GeneratorParams {
            model,
            n_residents,
            n_hospitals,
            pref_len,
            capacity: None,
            geometric_p: 0.10,
            geometric_span: Some(DEFAULT_GEOMETRIC_SPAN),
            lq_hospital_fraction: 0.90,
            lq_load_fraction: 0.50,
            seed,
        }
    }

    pub fn effective_capacity(&self) -> u32 {
        self.capacity.unwrap_or_else(|| (self.n_residents / self.n_hospitals.max(1)).max(1) as u32)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.n_residents == 0 || self.n_hospitals == 0 {
            return bad("need at least one resident and one hospital".into());
        }
        if self.pref_len == 0 || self.pref_len > self.n_hospitals {
            return bad(format!("list length k={} must be in 1..={}", self.pref_len, self.n_hospitals));
        }
        if self.capacity == Some(0) {
            return bad("capacity must be at least 1".into());
        }
        if !(self.geometric_p > 0.0 && self.geometric_p < 1.0) {
            return bad(format!("geometric p={} must be in (0,1)", self.geometric_p));
        }
        if let Some(span) = self.geometric_span {
            if !(span.is_finite() && span > 0.0) {
                return bad(format!("geometric span {span} must be positive"));
            }
        }
        for (name, v) in [("lq hospital fraction", self.lq_hospital_fraction), ("lq load fraction", self.lq_load_fraction)] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} {v} must be in [0,1]"));
            }
        }
        Ok(())
    }

    /// `key=value` pairs recorded as comments in generated files.
    pub fn describe(&self) -> Vec<String> {
        vec![
            format!("model={} residents={} hospitals={} k={}", self.model, self.n_residents, self.n_hospitals, self.pref_len),
            format!(
                "cap={} p={} span={} lq_hospital_fraction={} lq_load_fraction={}",
                self.effective_capacity(),
                self.geometric_p,
                self.geometric_span.map_or_else(|| "per-hospital".to_string(), |s| s.to_string()),
                self.lq_hospital_fraction,
                self.lq_load_fraction
            ),
            format!("seed={} rng=chacha8", self.seed),
        ]
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const PREFERENCE_STREAM: u64 = 0;
const QUOTA_STREAM: u64 = 1;

/// Draws `k` distinct ids without replacement, each draw proportional to the
/// geometric weight among the ids not yet drawn. This is the same law as
/// drawing from the full distribution and rejecting repeats, without the
/// unbounded retries when the tail is thin.
fn sample_hospitals(rng: &mut ChaCha8Rng, weights: &[f64], k: usize) -> Vec<usize> {
    let mut taken = vec![false; weights.len()];
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let total: f64 = weights.iter().zip(&taken).filter(|(_, &t)| !t).map(|(w, _)| w).sum();
        let mut u = rng.gen::<f64>() * total;
        let mut pick = None;
        for (h, w) in weights.iter().enumerate() {
            if taken[h] {
                continue;
            }
            pick = Some(h);
            if u < *w {
                break;
            }
            u -= w;
        }
        // rounding can run past the last weight; the last free id absorbs it
        let h = pick.expect("k <= |H| leaves a free id");
        taken[h] = true;
        out.push(h);
    }
    out
}

fn resident_lists(params: &GeneratorParams, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let n_h = params.n_hospitals;
    let step = params.geometric_span.map_or(1.0, |span| span / n_h as f64);
    let q = 1.0 - params.geometric_p;
    let weights: Vec<f64> = (0..n_h).map(|i| q.powf(i as f64 * step)).collect();
    (0..params.n_residents).map(|_| sample_hospitals(rng, &weights, params.pref_len)).collect()
}

fn applicants(n_hospitals: usize, resident_prefs: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); n_hospitals];
    for (r, list) in resident_prefs.iter().enumerate() {
        for &h in list {
            out[h].push(r);
        }
    }
    out
}

fn assemble(params: &GeneratorParams, resident_prefs: Vec<Vec<usize>>, hospital_prefs: Vec<Vec<usize>>) -> Result<Instance> {
    let cap = params.effective_capacity();
    Instance::new(resident_prefs, hospital_prefs, vec![0; params.n_hospitals], vec![cap; params.n_hospitals])
}

/// Master model: geometric resident lists, one master order of residents.
pub fn gen_master(params: &GeneratorParams) -> Result<Instance> {
    params.validate()?;
    let mut rng = rng_for(params.seed, PREFERENCE_STREAM);
    let mut master: Vec<usize> = (0..params.n_residents).collect();
    master.shuffle(&mut rng);
    let mut position = vec![0usize; params.n_residents];
    for (pos, &r) in master.iter().enumerate() {
        position[r] = pos;
    }
    let resident_prefs = resident_lists(params, &mut rng);
    let mut hospital_prefs = applicants(params.n_hospitals, &resident_prefs);
    for list in &mut hospital_prefs {
        list.sort_by_key(|&r| position[r]);
    }
    assemble(params, resident_prefs, hospital_prefs)
}

/// Shuffle model: geometric resident lists, each hospital orders its
/// applicants uniformly at random.
pub fn gen_shuffle(params: &GeneratorParams) -> Result<Instance> {
    params.validate()?;
    let mut rng = rng_for(params.seed, PREFERENCE_STREAM);
    let resident_prefs = resident_lists(params, &mut rng);
    let mut hospital_prefs = applicants(params.n_hospitals, &resident_prefs);
    for list in &mut hospital_prefs {
        list.shuffle(&mut rng);
    }
    assemble(params, resident_prefs, hospital_prefs)
}

/// Dispatches on `params.model`.
pub fn generate(params: &GeneratorParams) -> Result<Instance> {
    match params.model {
        Model::Master => gen_master(params),
        Model::Shuffle => gen_shuffle(params),
    }
}

/// Gives `ceil(lq_hospital_fraction * |H|)` random hospitals a lower quota,
/// handing out `floor(lq_load_fraction * sum q+)` units round-robin in id
/// order, never above a hospital's upper quota.
pub fn assign_lower_quotas(instance: &Instance, params: &GeneratorParams) -> Result<Instance> {
    params.validate()?;
    let n_h = instance.n_hospitals();
    let total_upper: u64 = instance.upper_quotas().iter().map(|&u| u as u64).sum();
    let n_chosen = ((params.lq_hospital_fraction * n_h as f64).ceil() as usize).min(n_h);
    let budget = (params.lq_load_fraction * total_upper as f64).floor() as u64;

    let mut rng = rng_for(params.seed, QUOTA_STREAM);
    let mut ids: Vec<usize> = (0..n_h).collect();
    ids.shuffle(&mut rng);
    let mut chosen = ids[..n_chosen].to_vec();
    chosen.sort_unstable();

    let available: u64 = chosen.iter().map(|&h| instance.upper_quota(h) as u64).sum();
    if budget > available {
        return Err(Error::InfeasibleQuotaBudget { budget, available });
    }
    let mut lower = vec![0u32; n_h];
    let mut left = budget;
    while left > 0 {
        for &h in &chosen {
            if left == 0 {
                break;
            }
            if lower[h] < instance.upper_quota(h) {
                lower[h] += 1;
                left -= 1;
            }
        }
    }
    instance.with_quotas(lower, instance.upper_quotas().to_vec())
}

/// Does some valid matching meet every lower quota? Decided by a maximum
/// matching in which each hospital offers only `q-(h)` slots.
pub fn feasibility_exists(instance: &Instance) -> bool {
    let need: u64 = instance.lower_quotas().iter().map(|&q| q as u64).sum();
    if need == 0 {
        return true;
    }
    max_matching_with_capacity(instance, instance.lower_quotas()).size() as u64 == need
}

/// Rural hospitals: every stable matching fills each hospital identically,
/// so one hospital-proposing run decides whether a stable matching is feasible.
pub fn classify(instance: &Instance) -> Feasibility {
    if !feasibility_exists(instance) {
        return Feasibility::Infeasible;
    }
    let stable = gs_hospital(&instance.without_lower_quotas());
    if instance.is_feasible(&stable) {
        Feasibility::FeasibleStable
    } else {
        Feasibility::FeasibleNoStable
    }
}

/// First instance, over seeds `seed, seed+1, ...`, that is feasible but has no
/// feasible stable matching.
pub fn gen_hrlq_filtered(params: &GeneratorParams, max_retries: usize) -> Result<Instance> {
    gen_hrlq_filtered_with_seed(params, max_retries).map(|(g, _)| g)
}

/// Like [`gen_hrlq_filtered`], also returning the seed that produced the instance.
pub fn gen_hrlq_filtered_with_seed(params: &GeneratorParams, max_retries: usize) -> Result<(Instance, u64)> {
    if max_retries == 0 {
        return Err(Error::InvalidParams("max_retries must be at least 1".into()));
    }
    params.validate()?;
    for attempt in 0..max_retries as u64 {
        let p = GeneratorParams { seed: params.seed.wrapping_add(attempt), ..params.clone() };
        let g = assign_lower_quotas(&generate(&p)?, &p)?;
        if classify(&g) == Feasibility::FeasibleNoStable {
            return Ok((g, p.seed));
        }
    }
    Err(Error::RetriesExhausted(max_retries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::three_residents;
    use crate::io::serialize_instance;

    fn small(model: Model, seed: u64) -> GeneratorParams {
        GeneratorParams::new(model, 60, 10, 4, seed)
    }

    #[test]
    fn structure_of_generated_lists() {
        for model in [Model::Master, Model::Shuffle] {
            let p = GeneratorParams::new(model, 1000, 100, 5, 3);
            let g = generate(&p).unwrap();
            assert_eq!(g.n_residents(), 1000);
            assert!((0..1000).all(|r| g.resident_prefs(r).len() == 5));
            assert!(g.upper_quotas().iter().all(|&u| u == 10));
        }
    }

    #[test]
    fn master_lists_follow_one_order() {
        let g = gen_master(&small(Model::Master, 11)).unwrap();
        // a consistent global order exists iff the "ranked before" relation is acyclic;
        // with a single master order, every pair is ordered the same way everywhere
        let mut before = std::collections::HashMap::new();
        for h in 0..g.n_hospitals() {
            let list = g.hospital_prefs(h);
            for i in 0..list.len() {
                for j in i + 1..list.len() {
                    let key = (list[i].min(list[j]), list[i].max(list[j]));
                    let v = list[i] < list[j];
                    assert_eq!(*before.entry(key).or_insert(v), v);
                }
            }
        }
    }

    #[test]
    fn determinism() {
        for model in [Model::Master, Model::Shuffle] {
            let a = serialize_instance(&generate(&small(model, 5)).unwrap());
            let b = serialize_instance(&generate(&small(model, 5)).unwrap());
            assert_eq!(a, b);
            let c = serialize_instance(&generate(&small(model, 6)).unwrap());
            assert_ne!(a, c);
        }
    }

    #[test]
    fn invalid_params() {
        let mut p = small(Model::Master, 1);
        p.pref_len = 11;
        assert!(matches!(gen_master(&p), Err(Error::InvalidParams(_))));
        assert!(matches!(gen_shuffle(&p), Err(Error::InvalidParams(_))));
        p.pref_len = 3;
        p.lq_load_fraction = 1.5;
        assert!(matches!(gen_master(&p), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn lower_quota_arithmetic() {
        let p = GeneratorParams::new(Model::Master, 1000, 10, 5, 9);
        let g = assign_lower_quotas(&generate(&p).unwrap(), &p).unwrap();
        assert_eq!(g.lower_quotas().iter().filter(|&&q| q >= 1).count(), 9);
        assert_eq!(g.lower_quotas().iter().sum::<u32>(), 500);
        assert!((0..10).all(|h| g.lower_quota(h) <= g.upper_quota(h)));
    }

    #[test]
    fn zero_load_leaves_quotas_untouched() {
        let mut p = GeneratorParams::new(Model::Master, 100, 10, 5, 9);
        p.lq_load_fraction = 0.0;
        let raw = generate(&p).unwrap();
        assert_eq!(assign_lower_quotas(&raw, &p).unwrap(), raw);
    }

    #[test]
    fn budget_beyond_chosen_positions() {
        let mut p = GeneratorParams::new(Model::Master, 100, 10, 5, 9);
        p.lq_hospital_fraction = 0.1;
        p.lq_load_fraction = 0.5;
        let err = assign_lower_quotas(&generate(&p).unwrap(), &p).unwrap_err();
        assert_eq!(err, Error::InfeasibleQuotaBudget { budget: 50, available: 10 });
    }

    #[test]
    fn feasibility_examples() {
        assert!(feasibility_exists(&three_residents()));
        let g = Instance::new(vec![vec![0]], vec![vec![0], vec![]], vec![0, 1], vec![1, 1]).unwrap();
        assert!(!feasibility_exists(&g));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&three_residents()), Feasibility::FeasibleNoStable);
        let edge = Instance::new(vec![vec![0]], vec![vec![0]], vec![1], vec![1]).unwrap();
        assert_eq!(classify(&edge), Feasibility::FeasibleStable);
        let isolated = Instance::new(vec![vec![0]], vec![vec![0], vec![]], vec![0, 1], vec![1, 1]).unwrap();
        assert_eq!(classify(&isolated), Feasibility::Infeasible);
    }

    #[test]
    fn filter_never_passes_without_lower_quotas() {
        let mut p = GeneratorParams::new(Model::Master, 50, 5, 3, 1);
        p.lq_load_fraction = 0.0;
        assert_eq!(gen_hrlq_filtered(&p, 1).unwrap_err(), Error::RetriesExhausted(1));
    }

    #[test]
    fn model_parsing() {
        assert_eq!("Master".parse::<Model>().unwrap(), Model::Master);
        assert_eq!("shuffle".parse::<Model>().unwrap(), Model::Shuffle);
        assert!("random".parse::<Model>().is_err());
    }
}
