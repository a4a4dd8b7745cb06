//! The `kgrec` command line: load → infer → query / recommend / diagnose →
//! experiment. Every command is a function of its input files and flags;
//! nothing reads the clock or the environment.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use kgrec_core::dataset::{generate, stats, GeneratorConfig};
use kgrec_core::diagnosis::{
    enumerate_minimal_diagnoses, preferred_diagnosis, run_cohort_experiment, BucketScheme, DeltaSet, DiagnosisError,
};
use kgrec_core::query::{execute, parse_query};
use kgrec_core::recommender::{
    recommend, solution_count, CatalogSchema, RecommendError, Recommendation, RecommendationTask, UserProfile,
};
use kgrec_core::rules::{parse_rules, saturate, RuleError};
use kgrec_core::{Date, Graph};
use serde_json::json;
use thiserror::Error;

use crate::ntriples::{load_ntriples, serialize_ntriples};
use crate::profiles::{parse_profiles, profiles_to_jsonl};
use crate::report::{report_csv, report_json, user_counts_csv};
use crate::results::{recommendation_json, results_csv, results_json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;
pub const EXIT_NO_DIAGNOSIS: i32 = 4;
pub const EXIT_NON_TERMINATION: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Inconsistent(String),
    #[error("{0}")]
    NoDiagnosis(String),
    #[error("{0}")]
    NonTermination(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Failed(_) => EXIT_FAILURE,
            CliError::Parse(_) | CliError::Usage(_) => EXIT_PARSE,
            CliError::Inconsistent(_) => EXIT_INCONSISTENT,
            CliError::NoDiagnosis(_) => EXIT_NO_DIAGNOSIS,
            CliError::NonTermination(_) => EXIT_NON_TERMINATION,
        }
    }
}

impl From<RuleError> for CliError {
    fn from(e: RuleError) -> Self {
        match e {
            RuleError::NonTermination { .. } => CliError::NonTermination(e.to_string()),
            RuleError::Parse { .. } | RuleError::UnsafeHeadVariable { .. } | RuleError::BuiltinInHead { .. } => {
                CliError::Parse(e.to_string())
            }
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<RecommendError> for CliError {
    fn from(e: RecommendError) -> Self {
        match e {
            RecommendError::Inconsistent { .. } => CliError::Inconsistent(e.to_string()),
            RecommendError::InvalidProfile { .. } => CliError::Parse(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<DiagnosisError> for CliError {
    fn from(e: DiagnosisError) -> Self {
        match e {
            DiagnosisError::NoDiagnosis { .. } => CliError::NoDiagnosis(e.to_string()),
            DiagnosisError::Recommend(r) => r.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kgrec", version, about = "Knowledge-graph constraint-based recommender")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Ntriples,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// N-Triples file; repeat to merge several
    #[arg(long = "graph", value_name = "FILE")]
    graphs: Vec<PathBuf>,
    /// Rule file; the merged graph is saturated with it before use
    #[arg(long, value_name = "FILE")]
    rules: Option<PathBuf>,
    /// Reference date for temporal builtins, YYYY-MM-DD
    #[arg(long, value_name = "DATE", value_parser = parse_date)]
    now: Option<Date>,
    /// Saturation gives up after this many productive rounds
    #[arg(long, default_value_t = 100)]
    max_rounds: usize,
}

#[derive(Debug, Args)]
struct CohortArgs {
    /// Seed for the generated catalog and cohort
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    vehicles: usize,
    #[arg(long, default_value_t = 50)]
    users: usize,
    /// Fraction of brands, colours and styles the catalog draws from
    #[arg(long, default_value_t = 1.0)]
    diversity: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic catalog, users, profiles and interactions
    Generate {
        #[command(flatten)]
        cohort: CohortArgs,
        /// Output directory
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Load and merge graphs, print statistics, optionally persist the snapshot
    Load {
        #[arg(long = "graph", value_name = "FILE", required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Print the merged graph as canonical N-Triples
    Dump {
        #[arg(long = "graph", value_name = "FILE", required = true)]
        graphs: Vec<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Saturate with a rule file and report the derived triples
    Infer {
        #[command(flatten)]
        graph: GraphArgs,
        /// Where to write the saturated snapshot
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run a query
    Query {
        #[command(flatten)]
        graph: GraphArgs,
        /// File holding the query
        #[arg(long, value_name = "FILE", conflicts_with = "text")]
        query: Option<PathBuf>,
        /// Query given inline
        #[arg(long)]
        text: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Recommend items for one user
    Recommend {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_name = "FILE")]
        profiles: PathBuf,
        #[arg(long)]
        user: String,
        /// Maximum number of items listed
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
    /// Find the preferences to drop for a user with no recommendation
    Diagnose {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_name = "FILE")]
        profiles: PathBuf,
        #[arg(long)]
        user: String,
    },
    /// Solution-count histograms for a cohort under each diagnosis set
    Experiment {
        #[command(flatten)]
        graph: GraphArgs,
        /// Cohort profiles; required with --graph, otherwise generated
        #[arg(long, value_name = "FILE")]
        profiles: Option<PathBuf>,
        #[command(flatten)]
        cohort: CohortArgs,
        /// Diagnosis sets as name=Label+Label;name=Label
        #[arg(long, value_name = "SETS")]
        delta_sets: Option<String>,
        /// Histogram buckets, such as 0,1-5,6-10,>10
        #[arg(long, default_value = "0,1-5,6-10,>10")]
        buckets: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Also write per-user counts as CSV
        #[arg(long, value_name = "FILE")]
        per_user: Option<PathBuf>,
    },
}

fn parse_date(s: &str) -> Result<Date, String> {
    Date::parse(s).ok_or_else(|| format!("{s:?} is not a date of the form YYYY-MM-DD"))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

fn load_graphs(paths: &[PathBuf]) -> Result<Graph, CliError> {
    let mut g = Graph::new();
    for p in paths {
        let text = read(p)?;
        let part = load_ntriples(&text).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?;
        g = g.union(&part);
    }
    Ok(g)
}

struct Saturated {
    graph: Graph,
    derived: Vec<kgrec_core::graph::Triple>,
    rounds: usize,
}

fn prepare(args: &GraphArgs) -> Result<Saturated, CliError> {
    prepare_with(args, Graph::new())
}

/// Loads the graphs on top of `base` and, when a rule file is given,
/// saturates the result.
fn prepare_with(args: &GraphArgs, base: Graph) -> Result<Saturated, CliError> {
    let graph = base.union(&load_graphs(&args.graphs)?);
    let Some(rules_path) = &args.rules else {
        return Ok(Saturated { graph, derived: Vec::new(), rounds: 0 });
    };
    let now = args.now.ok_or_else(|| CliError::Usage("--rules needs a reference date (--now YYYY-MM-DD)".into()))?;
    let text = read(rules_path)?;
    let rules = parse_rules(&text).map_err(|e| CliError::Parse(format!("{}: {e}", rules_path.display())))?;
    let sat = saturate(&graph, &rules, now, args.max_rounds)?;
    Ok(Saturated { graph: sat.graph, derived: sat.derived.into_iter().collect(), rounds: sat.rounds })
}

fn load_profiles(path: &Path) -> Result<Vec<UserProfile>, CliError> {
    parse_profiles(&read(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn task_for(path: &Path, user: &str) -> Result<RecommendationTask, CliError> {
    let profile = load_profiles(path)?
        .into_iter()
        .find(|p| p.user_id == user)
        .ok_or_else(|| CliError::Failed(format!("unknown user_id {user:?} in {}", path.display())))?;
    Ok(RecommendationTask::new(profile, CatalogSchema::default())?)
}

fn stats_text(g: &Graph) -> String {
    let s = stats(g);
    let mut out = format!("triples {}\n", s.triples);
    for (c, n) in &s.classes {
        out.push_str(&format!("class {c} {n}\n"));
    }
    for (p, n) in &s.properties {
        out.push_str(&format!("property {p} {n}\n"));
    }
    out
}

fn cohort_config(c: &CohortArgs) -> GeneratorConfig {
    GeneratorConfig { diversity: c.diversity, ..GeneratorConfig::default() }
}

fn execute_command(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Generate { cohort, out: dir } => {
            let d = generate(cohort.seed, cohort.vehicles, cohort.users, &cohort_config(&cohort));
            fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
            write_file(&dir.join("vehicles.nt"), &serialize_ntriples(&d.vehicles))?;
            write_file(&dir.join("users.nt"), &serialize_ntriples(&d.users))?;
            write_file(&dir.join("profiles.jsonl"), &profiles_to_jsonl(&d.profiles))?;
            let mut inter = String::new();
            for r in &d.interactions {
                let rec = json!({
                    "user": r.user.as_str(),
                    "item": r.item.as_str(),
                    "kind": r.kind,
                    "context": r.context.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                });
                inter.push_str(&rec.to_string());
                inter.push('\n');
            }
            write_file(&dir.join("interactions.jsonl"), &inter)?;
            emit(
                out,
                None,
                &format!(
                    "vehicles {} triples, users {} triples, {} profiles, {} interactions\n",
                    d.vehicles.len(),
                    d.users.len(),
                    d.profiles.len(),
                    d.interactions.len()
                ),
            )?;
        }
        Command::Load { graphs, out: snapshot } => {
            let g = load_graphs(&graphs)?;
            if let Some(p) = &snapshot {
                write_file(p, &serialize_ntriples(&g))?;
            }
            emit(out, None, &stats_text(&g))?;
        }
        Command::Dump { graphs, out: path } => {
            let g = load_graphs(&graphs)?;
            emit(out, path.as_deref(), &serialize_ntriples(&g))?;
        }
        Command::Infer { graph, out: path } => {
            if graph.rules.is_none() {
                return Err(CliError::Usage("infer needs --rules".into()));
            }
            let sat = prepare(&graph)?;
            if let Some(p) = &path {
                write_file(p, &serialize_ntriples(&sat.graph))?;
            }
            let mut text = format!("derived {} triples in {} rounds\n", sat.derived.len(), sat.rounds);
            for t in &sat.derived {
                text.push_str(&format!("{t}\n"));
            }
            emit(out, None, &text)?;
        }
        Command::Query { graph, query, text, format, out: path } => {
            let source = match (query, text) {
                (Some(p), _) => read(&p)?,
                (None, Some(t)) => t,
                (None, None) => return Err(CliError::Usage("query needs --query FILE or --text QUERY".into())),
            };
            let q = parse_query(&source).map_err(|e| CliError::Parse(e.to_string()))?;
            let g = prepare(&graph)?.graph;
            let r = execute(&g, &q);
            let rendered = match format {
                Format::Json => results_json(&r),
                Format::Csv => results_csv(&r),
                Format::Ntriples => return Err(CliError::Usage("query results are json or csv".into())),
            };
            emit(out, path.as_deref(), &rendered)?;
        }
        Command::Recommend { graph, profiles, user, limit } => {
            let task = task_for(&profiles, &user)?;
            let g = prepare(&graph)?.graph;
            return match recommend(&g, &task, limit) {
                Ok(r) => {
                    emit(out, None, &recommendation_json(&r))?;
                    Ok(EXIT_OK)
                }
                Err(RecommendError::Inconsistent { user }) => {
                    let empty = Recommendation {
                        user_id: user.clone(),
                        items: Vec::new(),
                        count: 0,
                        diagnostics: Default::default(),
                    };
                    emit(out, None, &recommendation_json(&empty))?;
                    let _ = writeln!(err, "no item satisfies the preferences of {user}; try `kgrec diagnose`");
                    Ok(EXIT_INCONSISTENT)
                }
                Err(e) => Err(e.into()),
            };
        }
        Command::Diagnose { graph, profiles, user } => {
            let task = task_for(&profiles, &user)?;
            let g = prepare(&graph)?.graph;
            let count = solution_count(&g, &task, &task.supplied())?;
            if count > 0 {
                let doc =
                    json!({ "user_id": user, "consistent": true, "count": count, "preferred": [], "minimal": [] });
                emit(out, None, &(serde_json::to_string_pretty(&doc).expect("json") + "\n"))?;
                return Ok(EXIT_OK);
            }
            let minimal = enumerate_minimal_diagnoses(&g, &task, usize::MAX)?;
            let names = |d: &kgrec_core::diagnosis::Diagnosis| d.removed.iter().map(|l| l.name()).collect::<Vec<_>>();
            let preferred = match preferred_diagnosis(&g, &task) {
                Ok(d) => Some(d),
                Err(DiagnosisError::NoDiagnosis { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let doc = json!({
                "user_id": user,
                "consistent": false,
                "count": 0,
                "preferred": preferred.as_ref().map(names),
                "minimal": minimal.iter().map(names).collect::<Vec<_>>(),
            });
            emit(out, None, &(serde_json::to_string_pretty(&doc).expect("json") + "\n"))?;
            if preferred.is_none() {
                return Err(CliError::NoDiagnosis(format!("no diagnosis restores consistency for {user}")));
            }
        }
        Command::Experiment { graph, profiles, cohort, delta_sets, buckets, format, out: path, per_user } => {
            let (base, profiles) = match (graph.graphs.is_empty(), profiles) {
                (true, None) => {
                    let d = generate(cohort.seed, cohort.vehicles, cohort.users, &cohort_config(&cohort));
                    (d.vehicles.union(&d.users), d.profiles)
                }
                (false, Some(p)) => (Graph::new(), load_profiles(&p)?),
                _ => return Err(CliError::Usage("--graph and --profiles go together".into())),
            };
            let g = prepare_with(&graph, base)?.graph;
            let deltas = match &delta_sets {
                Some(s) => DeltaSet::parse_list(s).map_err(CliError::Usage)?,
                None => DeltaSet::defaults(),
            };
            let scheme = BucketScheme::parse(&buckets).map_err(CliError::Usage)?;
            let tasks = profiles
                .into_iter()
                .map(|p| RecommendationTask::new(p, CatalogSchema::default()))
                .collect::<Result<Vec<_>, _>>()?;
            let report = run_cohort_experiment(&g, &tasks, &deltas, &scheme)?;
            if report.filter_errors > 0 {
                let _ = writeln!(err, "warning: {} filter evaluation errors", report.filter_errors);
            }
            let rendered = match format {
                Format::Csv => report_csv(&report),
                Format::Json => report_json(&report),
                Format::Ntriples => return Err(CliError::Usage("experiment reports are csv or json".into())),
            };
            if let Some(p) = &per_user {
                write_file(p, &user_counts_csv(&report))?;
            }
            emit(out, path.as_deref(), &rendered)?;
        }
    }
    Ok(EXIT_OK)
}

/// Runs one command and returns its exit code: 0 success, 1 failure,
/// 2 parse or usage error, 3 inconsistent task, 4 no diagnosis,
/// 5 non-termination.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute_command(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
