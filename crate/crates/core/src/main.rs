use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use popmatch::generators::{gen_hrlq_filtered_with_seed, generate, assign_lower_quotas, GeneratorParams, Model};
use popmatch::harness::experiment::{run_experiment, ExperimentConfig, ExperimentKind};
use popmatch::harness::fixtures::run_fixture_suite;
use popmatch::harness::{Algorithm, Property};
use popmatch::io::{ingest_hrc, parse_instance, parse_matching, serialize_instance, serialize_instance_with_comments, serialize_matching};
use popmatch::metrics::{paired_report, report, MetricsReport};
use popmatch::solvers::hrlq;
use popmatch::{Error, Instance};

#[derive(Parser)]
#[command(name = "popmatch", version, about = "Stable, popular and envy-free matchings for hospital-residents instances")]
struct Cli {
    /// Base seed for generation and experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tabular output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Master,
    Shuffle,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Master => Model::Master,
            ModelArg::Shuffle => Model::Shuffle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Hrlq,
    Hr,
}

#[derive(Args)]
struct GeneratorArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::Master)]
    model: ModelArg,
    #[arg(long)]
    residents: usize,
    /// Preference list length.
    #[arg(short = 'k', long = "pref-len", default_value_t = 5)]
    pref_len: usize,
    /// Uniform hospital capacity (default |R|/|H|).
    #[arg(long)]
    cap: Option<u32>,
    #[arg(long = "geometric-p", default_value_t = 0.10)]
    geometric_p: f64,
    /// Geometric steps across the whole hospital list, or `per-hospital`.
    #[arg(long, default_value = "30")]
    span: String,
}

impl GeneratorArgs {
    fn params(&self, n_hospitals: usize, seed: u64) -> Result<GeneratorParams, Failure> {
        let span = match self.span.as_str() {
            "per-hospital" => None,
            s => Some(s.parse::<f64>().map_err(|_| Failure::usage(format!("invalid --span `{s}`")))?),
        };
        Ok(GeneratorParams {
            capacity: self.cap,
            geometric_p: self.geometric_p,
            geometric_span: span,
            ..GeneratorParams::new(self.model.into(), self.residents, n_hospitals, self.pref_len, seed)
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Generate {
        #[command(flatten)]
        gen: GeneratorArgs,
        #[arg(long)]
        hospitals: usize,
        /// Assign lower quotas.
        #[arg(long)]
        lq: bool,
        /// Assign lower quotas and keep only feasible instances without a feasible stable matching.
        #[arg(long)]
        filter: bool,
        #[arg(long = "max-retries", default_value_t = 1000)]
        max_retries: usize,
        #[arg(long = "lq-hospital-fraction", default_value_t = 0.90)]
        lq_hospital_fraction: f64,
        #[arg(long = "lq-load-fraction", default_value_t = 0.50)]
        lq_load_fraction: f64,
    },
    /// Run a matching algorithm.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        algo: String,
        /// Level cap for max-popular (default |R|).
        #[arg(long = "level-cap")]
        level_cap: Option<usize>,
        /// Write the event log of hrlq-popular here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Report quality measures of a matching as one CSV row.
    Metrics {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        matching: PathBuf,
        /// Matching to compare against (adds the percentage columns).
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Check a property of a matching.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        matching: PathBuf,
        #[arg(long)]
        property: String,
        /// Write a more popular matching here when one exists.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run an experiment grid and print CSV.
    Experiment {
        #[arg(long, value_enum, default_value_t = KindArg::Hrlq)]
        kind: KindArg,
        #[command(flatten)]
        gen: GeneratorArgs,
        /// Comma-separated hospital counts, one row each.
        #[arg(long, value_delimiter = ',', required = true)]
        hospitals: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long = "max-retries", default_value_t = 1000)]
        max_retries: usize,
        /// Level cap for the popular-among-maximum matching (default |R|).
        #[arg(long = "level-cap")]
        level_cap: Option<usize>,
        /// Also write one row per instance to this file.
        #[arg(long = "per-instance")]
        per_instance: Option<PathBuf>,
        /// Add standard deviation columns.
        #[arg(long)]
        stddev: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Convert an HR-with-couples file into the native format.
    IngestHrc {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run the bundled regression fixtures.
    Fixtures,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
    fn data(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) => 1,
            Error::InfeasibleInstance => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn load_matching(instance: &Instance, path: &Path) -> Result<popmatch::Matching, Failure> {
    parse_matching(instance, &read(path)?).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<String, Failure> {
    let Format::Csv = cli.format;
    match cli.command {
        Command::Generate { gen, hospitals, lq, filter, max_retries, lq_hospital_fraction, lq_load_fraction } => {
            let params = GeneratorParams {
                lq_hospital_fraction,
                lq_load_fraction,
                ..gen.params(hospitals, cli.seed)?
            };
            let (instance, mut comments) = if filter {
                let (g, seed) = gen_hrlq_filtered_with_seed(&params, max_retries)?;
                let used = GeneratorParams { seed, ..params };
                (g, used.describe())
            } else {
                let raw = generate(&params)?;
                let g = if lq { assign_lower_quotas(&raw, &params)? } else { raw };
                (g, params.describe())
            };
            if filter {
                comments.push("filter=feasible-no-stable".into());
            }
            Ok(serialize_instance_with_comments(&instance, &comments))
        }
        Command::Solve { instance, algo, level_cap, trace } => {
            let g = load_instance(&instance)?;
            let algo: Algorithm = algo.parse()?;
            if let Some(path) = trace {
                if algo != Algorithm::HrlqPopular {
                    return Err(Failure::usage("--trace is only available for hrlq-popular"));
                }
                let run = hrlq::trace(&g)?;
                let log: String = run.events.iter().map(|e| format!("{e}\n")).collect();
                write(&path, &log)?;
                return Ok(serialize_matching(&run.matching));
            }
            match algo.run(&g, level_cap)? {
                Some(m) => Ok(serialize_matching(&m)),
                None => Ok("status=NO_ENVY_FREE\n".into()),
            }
        }
        Command::Metrics { instance, matching, baseline } => {
            let g = load_instance(&instance)?;
            let m = load_matching(&g, &matching)?;
            let row = match baseline {
                Some(b) => paired_report(&g, &m, &load_matching(&g, &b)?),
                None => report(&g, &m),
            };
            Ok(format!("{}\n{}\n", MetricsReport::CSV_HEADER, row.csv_row()))
        }
        Command::Verify { instance, matching, property, witness } => {
            let g = load_instance(&instance)?;
            let m = load_matching(&g, &matching)?;
            let property: Property = property.parse()?;
            let outcome = property.check(&g, &m)?;
            if let (Some(path), Some(w)) = (witness, outcome.witness.as_ref()) {
                write(&path, &serialize_matching(w))?;
            }
            let verdict = if outcome.holds { "holds" } else { "fails" };
            let mut text = format!("property={property} verdict={verdict}\n");
            if !outcome.detail.is_empty() {
                text.push_str(&outcome.detail);
                text.push('\n');
            }
            Ok(text)
        }
        Command::Experiment { kind, gen, hospitals, reps, max_retries, level_cap, per_instance, stddev, threads } => {
            let kind = match kind {
                KindArg::Hrlq => ExperimentKind::Hrlq,
                KindArg::Hr => ExperimentKind::Hr,
            };
            let base = gen.params(hospitals[0], cli.seed)?;
            let config = ExperimentConfig {
                capacity: gen.cap,
                reps,
                seed: cli.seed,
                max_retries,
                level_cap,
                geometric_p: base.geometric_p,
                geometric_span: base.geometric_span,
                per_instance: per_instance.is_some(),
                stddev,
                threads,
                ..ExperimentConfig::new(kind, gen.model.into(), gen.residents, hospitals, gen.pref_len)
            };
            let out = run_experiment(&config)?;
            if let (Some(path), Some(csv)) = (per_instance, out.per_instance_csv.as_ref()) {
                write(&path, csv)?;
            }
            Ok(out.summary_csv)
        }
        Command::IngestHrc { input } => {
            let ingest = ingest_hrc(&read(&input)?).map_err(|e| Failure::data(format!("{}: {e}", input.display())))?;
            for w in &ingest.warnings {
                eprintln!("warning: {w}");
            }
            Ok(serialize_instance(&ingest.instance))
        }
        Command::Fixtures => {
            let report = run_fixture_suite();
            if report.all_passed() {
                Ok(report.to_string())
            } else {
                print!("{report}");
                Err(Failure::data(format!("{} fixture checks failed", report.failures().count())))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.out.clone();
    match run(cli).and_then(|text| match &out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
