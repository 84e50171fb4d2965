//! Experiment grids over generated instances, reported as CSV.
//!
//! Each grid point (one hospital count) runs `reps` instances and emits one
//! row of arithmetic means, rendered with two decimals. Percentages with a
//! zero denominator are skipped by the mean; a column with no defined value
//! prints `NA`.
//!
//! HRLQ rows (`M_s` stable ignoring lower quotas, `M_p` popular among feasible
//! matchings, `M_e` maximal envy-free; the `*_me` columns average only the
//! instances that admit an envy-free matching, counted in `ef_instances`):
//!
//! ```text
//! model,residents,hospitals,k,cap,reps,seed,def_ms,s_mp,s_me,bpc_mp,bpc_me,br_mp,br_me,r1_mp,r1_me,ef_instances
//! ```
//!
//! HR rows (`M_s` resident-proposing stable, `M_p` maximum cardinality
//! popular, `M_m` popular among maximum cardinality matchings; every column
//! after `s_ms` is a percentage against `M_s`):
//!
//! ```text
//! model,residents,hospitals,k,cap,reps,seed,s_ms,delta_mp,bp_mp,delta1_mp,deltar_mp,delta_mm,bp_mm,delta1_mm,deltar_mm
//! ```
//!
//! With `stddev` set, a population standard deviation column `sd_<name>`
//! follows for every metric column. Per-instance tables replace `reps` by
//! `rep` and carry each instance's own seed.
//!
//! Seeds: grid point `i` starts at `seed + i * 1_000_000`. HR instance `j`
//! uses that start plus `j`. HRLQ instances come from the feasible-but-unstable
//! filter, which tries consecutive seeds; instance `j + 1` starts one past the
//! seed that produced instance `j`, so no two instances share a seed.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{gen_hrlq_filtered_with_seed, generate, GeneratorParams, Model, DEFAULT_GEOMETRIC_SPAN};
use crate::instance::Instance;
use crate::metrics::{blocking_pairs, blocking_residents, compare, deficiency, format_2dp, rank1_count, Comparison};
use crate::solvers::{envyfree, hr, hrlq};

/// Distance between the seed ranges of consecutive grid points.
pub const GRID_SEED_STRIDE: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Hrlq,
    Hr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub model: Model,
    pub n_residents: usize,
    /// One grid point per entry.
    pub hospitals: Vec<usize>,
    pub pref_len: usize,
    /// Uniform upper quota; `None` is `|R| / |H|`.
    pub capacity: Option<u32>,
    pub reps: usize,
    pub seed: u64,
    /// Attempts per instance for the HRLQ filter.
    pub max_retries: usize,
    /// Level cap for `M_m`; `None` is `|R|`.
    pub level_cap: Option<usize>,
    pub geometric_p: f64,
    pub geometric_span: Option<f64>,
    pub per_instance: bool,
    pub stddev: bool,
    /// Worker threads; `None` uses rayon's global pool.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, model: Model, n_residents: usize, hospitals: Vec<usize>, pref_len: usize) -> Self {
        ExperimentConfig {
            kind,
            model,
            n_residents,
            hospitals,
            pref_len,
            capacity: None,
            reps: 10,
            seed: 0,
            max_retries: 1000,
            level_cap: None,
            geometric_p: 0.10,
            geometric_span: Some(DEFAULT_GEOMETRIC_SPAN),
            per_instance: false,
            stddev: false,
            threads: None,
        }
    }

    fn params(&self, n_hospitals: usize, seed: u64) -> GeneratorParams {
        GeneratorParams {
            capacity: self.capacity,
            geometric_p: self.geometric_p,
            geometric_span: self.geometric_span,
            ..GeneratorParams::new(self.model, self.n_residents, n_hospitals, self.pref_len, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidParams("reps must be at least 1".into()));
        }
        if self.hospitals.is_empty() {
            return Err(Error::InvalidParams("the hospital grid is empty".into()));
        }
        if self.max_retries == 0 {
            return Err(Error::InvalidParams("max_retries must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParams("threads must be at least 1".into()));
        }
        for &h in &self.hospitals {
            self.params(h, self.seed).validate()?;
        }
        Ok(())
    }

    pub fn metric_columns(&self) -> &'static [&'static str] {
        match self.kind {
            ExperimentKind::Hrlq => {
                &["def_ms", "s_mp", "s_me", "bpc_mp", "bpc_me", "br_mp", "br_me", "r1_mp", "r1_me"]
            }
            ExperimentKind::Hr => {
                &["s_ms", "delta_mp", "bp_mp", "delta1_mp", "deltar_mp", "delta_mm", "bp_mm", "delta1_mm", "deltar_mm"]
            }
        }
    }

    /// Header of the summary table.
    pub fn header(&self) -> String {
        let mut cols: Vec<String> = ["model", "residents", "hospitals", "k", "cap", "reps", "seed"].map(String::from).into();
        cols.extend(self.metric_columns().iter().map(|c| c.to_string()));
        if self.kind == ExperimentKind::Hrlq {
            cols.push("ef_instances".into());
        }
        if self.stddev {
            cols.extend(self.metric_columns().iter().map(|c| format!("sd_{c}")));
        }
        cols.join(",")
    }

    /// Header of the per-instance table.
    pub fn instance_header(&self) -> String {
        let mut cols: Vec<String> = ["model", "residents", "hospitals", "k", "cap", "rep", "seed"].map(String::from).into();
        cols.extend(self.metric_columns().iter().map(|c| c.to_string()));
        cols.join(",")
    }
}

/// Metrics of one instance, in [`ExperimentConfig::metric_columns`] order;
/// `None` is undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceResult {
    pub rep: usize,
    pub seed: u64,
    pub values: Vec<Option<BigRational>>,
}

/// Outcome of one grid point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridPoint {
    pub n_hospitals: usize,
    pub capacity: u32,
    pub seed: u64,
    /// Empty when instance generation gave up.
    pub instances: Vec<InstanceResult>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentOutput {
    pub grid: Vec<GridPoint>,
    pub summary_csv: String,
    pub per_instance_csv: Option<String>,
}

fn int(v: impl Into<BigInt>) -> Option<BigRational> {
    Some(BigRational::from_integer(v.into()))
}

fn hrlq_metrics(g: &Instance) -> Result<Vec<Option<BigRational>>> {
    let ms = hr::gs_hospital(&g.without_lower_quotas());
    let mp = hrlq::hrlq_popular(g)?;
    let me = envyfree::maximal_envy_free(g);
    let side = |m: Option<&crate::instance::Matching>| -> [Option<BigRational>; 4] {
        match m {
            Some(m) => [
                int(m.size()),
                int(blocking_pairs(g, m).len()),
                int(blocking_residents(g, m).len()),
                int(rank1_count(g, m)),
            ],
            None => [None, None, None, None],
        }
    };
    let [s_mp, bpc_mp, br_mp, r1_mp] = side(Some(&mp));
    let [s_me, bpc_me, br_me, r1_me] = side(me.as_ref());
    Ok(vec![int(deficiency(g, &ms)), s_mp, s_me, bpc_mp, bpc_me, br_mp, br_me, r1_mp, r1_me])
}

fn hr_metrics(g: &Instance, level_cap: Option<usize>) -> Result<Vec<Option<BigRational>>> {
    let ms = hr::gs_resident(g);
    let mp = hr::max_card_popular(g);
    let mm = hr::popular_among_maxcard(g, level_cap)?;
    let cols = |c: Comparison| [c.delta_size_pct.0, c.bp_pct.0, c.delta_r1_pct.0, c.delta_votes_pct.0];
    let mut out = vec![int(ms.size())];
    out.extend(cols(compare(g, &mp, &ms)));
    out.extend(cols(compare(g, &mm, &ms)));
    Ok(out)
}

fn run_grid_point(config: &ExperimentConfig, index: usize) -> Result<GridPoint> {
    let n_h = config.hospitals[index];
    let start = config.seed.wrapping_add(index as u64 * GRID_SEED_STRIDE);
    let capacity = config.params(n_h, start).effective_capacity();
    let mut point = GridPoint { n_hospitals: n_h, capacity, seed: start, instances: Vec::new() };

    let jobs: Vec<(usize, u64, Instance)> = match config.kind {
        ExperimentKind::Hr => (0..config.reps)
            .into_par_iter()
            .map(|rep| {
                let seed = start.wrapping_add(rep as u64);
                generate(&config.params(n_h, seed)).map(|g| (rep, seed, g))
            })
            .collect::<Result<_>>()?,
        ExperimentKind::Hrlq => {
            let mut jobs = Vec::with_capacity(config.reps);
            let mut next = start;
            for rep in 0..config.reps {
                match gen_hrlq_filtered_with_seed(&config.params(n_h, next), config.max_retries) {
                    Ok((g, seed)) => {
                        jobs.push((rep, seed, g));
                        next = seed.wrapping_add(1);
                    }
                    Err(Error::RetriesExhausted(_)) => return Ok(point),
                    Err(e) => return Err(e),
                }
            }
            jobs
        }
    };

    point.instances = jobs
        .into_par_iter()
        .map(|(rep, seed, g)| {
            let values = match config.kind {
                ExperimentKind::Hrlq => hrlq_metrics(&g)?,
                ExperimentKind::Hr => hr_metrics(&g, config.level_cap)?,
            };
            Ok(InstanceResult { rep, seed, values })
        })
        .collect::<Result<_>>()?;
    Ok(point)
}

fn mean(values: &[&BigRational]) -> Option<BigRational> {
    if values.is_empty() {
        return None;
    }
    let sum = values.iter().fold(BigRational::zero(), |acc, v| acc + *v);
    Some(sum / BigRational::from_integer(BigInt::from(values.len())))
}

fn population_sd(values: &[&BigRational]) -> Option<f64> {
    let m = mean(values)?;
    let var = values.iter().map(|v| (*v - &m) * (*v - &m)).fold(BigRational::zero(), |a, b| a + b)
        / BigRational::from_integer(BigInt::from(values.len()));
    var.to_f64().map(f64::sqrt)
}

fn cell(v: Option<&BigRational>) -> String {
    v.map_or_else(|| "NA".to_string(), format_2dp)
}

fn render(config: &ExperimentConfig, grid: &[GridPoint]) -> (String, Option<String>) {
    let n_cols = config.metric_columns().len();
    let mut summary = config.header();
    summary.push('\n');
    let mut per_instance = config.per_instance.then(|| format!("{}\n", config.instance_header()));
    for p in grid {
        let prefix = |reps_or_rep: String, seed: u64| {
            format!(
                "{},{},{},{},{},{},{}",
                config.model, config.n_residents, p.n_hospitals, config.pref_len, p.capacity, reps_or_rep, seed
            )
        };
        let mut row = prefix(config.reps.to_string(), p.seed);
        let columns: Vec<Vec<&BigRational>> =
            (0..n_cols).map(|c| p.instances.iter().filter_map(|i| i.values[c].as_ref()).collect()).collect();
        for col in &columns {
            let _ = write!(row, ",{}", cell(mean(col).as_ref()));
        }
        if config.kind == ExperimentKind::Hrlq {
            // s_me is defined exactly when the instance admits an envy-free matching
            if p.instances.is_empty() {
                row.push_str(",NA");
            } else {
                let _ = write!(row, ",{}", columns[2].len());
            }
        }
        if config.stddev {
            for col in &columns {
                let _ = match population_sd(col) {
                    Some(sd) => write!(row, ",{sd:.2}"),
                    None => write!(row, ",NA"),
                };
            }
        }
        summary.push_str(&row);
        summary.push('\n');

        if let Some(out) = per_instance.as_mut() {
            for i in &p.instances {
                out.push_str(&prefix(i.rep.to_string(), i.seed));
                for v in &i.values {
                    let _ = write!(out, ",{}", cell(v.as_ref()));
                }
                out.push('\n');
            }
        }
    }
    (summary, per_instance)
}

/// Runs every grid point and renders the tables. Results do not depend on
/// the number of threads.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let body = || (0..config.hospitals.len()).map(|i| run_grid_point(config, i)).collect::<Result<Vec<_>>>();
    let grid = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParams(format!("cannot start worker pool: {e}")))?
            .install(body)?,
        None => body()?,
    };
    let (summary_csv, per_instance_csv) = render(config, &grid);
    Ok(ExperimentOutput { grid, summary_csv, per_instance_csv })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig { reps: 3, seed: 42, ..ExperimentConfig::new(kind, Model::Master, 60, vec![6, 12], 3) }
    }

    #[test]
    fn hr_shape() {
        let out = run_experiment(&small(ExperimentKind::Hr)).unwrap();
        let lines: Vec<&str> = out.summary_csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            "model,residents,hospitals,k,cap,reps,seed,s_ms,delta_mp,bp_mp,delta1_mp,deltar_mp,delta_mm,bp_mm,delta1_mm,deltar_mm"
        );
        assert!(lines[1].starts_with("master,60,6,3,10,3,42,"));
        assert!(lines[2].starts_with("master,60,12,3,5,3,1000042,"));
        assert!(out.per_instance_csv.is_none());
        assert_eq!(out.grid[0].instances.iter().map(|i| i.seed).collect::<Vec<_>>(), vec![42, 43, 44]);
    }

    #[test]
    fn hrlq_shape_and_distinct_seeds() {
        let mut cfg = small(ExperimentKind::Hrlq);
        cfg.per_instance = true;
        cfg.stddev = true;
        let out = run_experiment(&cfg).unwrap();
        let header = out.summary_csv.lines().next().unwrap();
        assert!(header.ends_with("r1_mp,r1_me,ef_instances,sd_def_ms,sd_s_mp,sd_s_me,sd_bpc_mp,sd_bpc_me,sd_br_mp,sd_br_me,sd_r1_mp,sd_r1_me"));
        for p in &out.grid {
            let seeds: Vec<u64> = p.instances.iter().map(|i| i.seed).collect();
            assert!(seeds.windows(2).all(|w| w[0] < w[1]), "{seeds:?}");
        }
        let per = out.per_instance_csv.unwrap();
        let n_instances: usize = out.grid.iter().map(|p| p.instances.len()).sum();
        assert_eq!(per.lines().count(), 1 + n_instances);
        let cols = header.split(',').count();
        assert!(out.summary_csv.lines().all(|l| l.split(',').count() == cols));
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let mut cfg = small(ExperimentKind::Hr);
        cfg.threads = Some(1);
        let a = run_experiment(&cfg).unwrap().summary_csv;
        cfg.threads = Some(4);
        let b = run_experiment(&cfg).unwrap().summary_csv;
        assert_eq!(a, b);
    }

    #[test]
    fn exhausted_filter_gives_na_row() {
        let mut cfg = small(ExperimentKind::Hrlq);
        cfg.hospitals = vec![6];
        cfg.max_retries = 1;
        cfg.capacity = Some(1);
        // 60 residents on 6 single-seat hospitals: the lower quotas are trivially met
        let out = run_experiment(&cfg).unwrap();
        let row = out.summary_csv.lines().nth(1).unwrap();
        assert!(row.ends_with(",NA,NA,NA,NA,NA,NA,NA,NA,NA,NA"), "{row}");
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = small(ExperimentKind::Hr);
        cfg.reps = 0;
        assert!(matches!(run_experiment(&cfg), Err(Error::InvalidParams(_))));
        let mut cfg = small(ExperimentKind::Hr);
        cfg.hospitals.clear();
        assert!(matches!(run_experiment(&cfg), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn means_and_sd() {
        let v: Vec<BigRational> = [1, 2, 4].iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
        let refs: Vec<&BigRational> = v.iter().collect();
        assert_eq!(format_2dp(&mean(&refs).unwrap()), "2.33");
        assert!((population_sd(&refs).unwrap() - 1.247219).abs() < 1e-6);
        assert!(mean(&[]).is_none());
    }
}
