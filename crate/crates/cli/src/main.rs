//! `poipg` command-line tool.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use poipg::io::{emit_dot, emit_poipg, parse_ci, parse_csv, parse_graph, parse_poipg};
use poipg::query::{blocking_claims, definite_cause, latent_confounder, no_cause_either_way};
use poipg::{
    caching_oracle, d_separated, data_oracle, equiv_members, fci, fci_from_dag, inducing_path_orientations,
    observable_independent, table_oracle, verify_poipg, CausalClaim, ConflictPolicy, Dag, EdgeConstraint,
    EnumBounds, Error, FciConfig, FciEvent, FciResult, InsufficientPolicy, Poipg, VertexSet,
};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY_FAILED: u8 = 2;
const EXIT_NO_CLAIM: u8 = 3;
const EXIT_DATA: u8 = 4;

#[derive(Parser)]
#[command(
    name = "poipg",
    version,
    about = "Causal discovery with latent variables and selection bias"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a POIPG from a graph, a CI file or discrete data.
    Discover(DiscoverArgs),
    /// Read causal claims off a POIPG.
    Query(QueryArgs),
    /// d-separation in a DAG.
    Dsep(DsepArgs),
    /// Inducing paths between two observed variables of a DAG.
    Inducing(InducingArgs),
    /// Check a CI file's POIPG against every DAG in a bounded class.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// DAG in the JSON graph format; queried as an exact oracle.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// CI statements in the line format.
    #[arg(long)]
    ci: Option<PathBuf>,
    /// Discrete CSV data; tested with G².
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Warn,
    Fail,
}

#[derive(Clone, Copy, ValueEnum)]
enum Insufficient {
    Dependent,
    Independent,
}

#[derive(Args)]
struct DiscoverArgs {
    #[command(flatten)]
    source: Source,
    /// Significance level for data.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Largest conditioning set; default 3 for data, unbounded otherwise.
    #[arg(long)]
    max_cond: Option<usize>,
    /// Conflict handling; default warn for data, fail otherwise.
    #[arg(long, value_enum)]
    policy: Option<Policy>,
    /// Verdict for tests with too little data.
    #[arg(long, value_enum, default_value_t = Insufficient::Dependent)]
    insufficient: Insufficient,
    /// Column arity `NAME=K`, added to any `#arity` lines in the CSV.
    #[arg(long = "arity", value_name = "NAME=K")]
    arities: Vec<String>,
    /// Merge all selection variables of `--graph` into one.
    #[arg(long)]
    collapse_selection: bool,
    /// POIPG JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum QueryKind {
    /// Theorem 2: definite cause.
    Cause,
    /// Theorem 3: no causal path either way, latent confounder.
    Confound,
    /// Theorems 4-6: paths that must pass through S (or the `--through` set).
    Blocked,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(value_enum)]
    kind: QueryKind,
    #[arg(long)]
    poipg: PathBuf,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    #[arg(long, value_delimiter = ',')]
    through: Vec<String>,
}

#[derive(Args)]
struct DsepArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    z: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    y: Vec<String>,
    /// Also condition on every selection variable.
    #[arg(long)]
    observable: bool,
}

#[derive(Args)]
struct InducingArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    ci: PathBuf,
    #[arg(long)]
    obs: usize,
    #[arg(long, default_value_t = 0)]
    max_latent: usize,
    #[arg(long, default_value_t = 0)]
    max_sel: usize,
    /// Only enumerate DAGs whose selection variables have no children.
    #[arg(long)]
    selection_sinks: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Oracle { .. } | Error::Dataset(_) | Error::OrientationConflict { .. } => EXIT_DATA,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn stdout(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| usage(format!("cannot write to stdout: {e}")))
}

fn parse_arities(specs: &[String]) -> Result<BTreeMap<String, u32>, Failure> {
    let mut map = BTreeMap::new();
    for s in specs {
        let parsed = s
            .split_once('=')
            .and_then(|(n, k)| Some((n.trim(), k.trim().parse::<u32>().ok()?)));
        let Some((name, k)) = parsed else {
            return Err(usage(format!("malformed arity `{s}`, expected NAME=K")));
        };
        if map.insert(name.to_string(), k).is_some_and(|prev| prev != k) {
            return Err(usage(format!("conflicting arities for `{name}`")));
        }
    }
    Ok(map)
}

fn discover(args: DiscoverArgs) -> Outcome {
    let from_data = args.source.data.is_some();
    let mut config = if from_data {
        FciConfig::for_data()
    } else {
        FciConfig::exact()
    };
    if args.max_cond.is_some() {
        config.max_cond_size = args.max_cond;
    }
    match args.policy {
        Some(Policy::Warn) => config.conflict_policy = ConflictPolicy::WarnKeepFirst,
        Some(Policy::Fail) => config.conflict_policy = ConflictPolicy::FailFast,
        None => {}
    }
    if args.collapse_selection && args.source.graph.is_none() {
        return Err(usage("--collapse-selection needs --graph"));
    }
    config.collapse_selection = args.collapse_selection;

    let result: FciResult = if let Some(path) = &args.source.graph {
        let g = parse_graph(&read(path)?)?;
        fci_from_dag(&g, &config)?
    } else if let Some(path) = &args.source.ci {
        let cond = parse_ci(&read(path)?)?;
        fci(&table_oracle(cond), &config)?
    } else if let Some(path) = &args.source.data {
        let data = parse_csv(&read(path)?, &parse_arities(&args.arities)?)?;
        let policy = match args.insufficient {
            Insufficient::Dependent => InsufficientPolicy::AssumeDependent,
            Insufficient::Independent => InsufficientPolicy::AssumeIndependent,
        };
        let oracle = caching_oracle(data_oracle(data, args.alpha, policy)?);
        fci(&oracle, &config)?
    } else {
        unreachable!("clap requires one source");
    };

    for e in result.trace.events() {
        if let FciEvent::Conflict { description } = e {
            eprintln!("warning: orientation conflict: {description}");
        }
    }
    let json = emit_poipg(&result.poipg);
    match &args.out {
        Some(path) => write(path, &json)?,
        None => stdout(&json)?,
    }
    if let Some(path) = &args.dot {
        write(path, &emit_dot(&result.poipg))?;
    }
    if let Some(path) = &args.trace {
        write(path, result.trace.to_text().as_bytes())?;
    }
    Ok(0)
}

fn names_to_set(ids: impl Fn(&str) -> poipg::Result<usize>, names: &[String]) -> Result<VertexSet, Failure> {
    names
        .iter()
        .map(|n| ids(n.trim()).map_err(Failure::from))
        .collect()
}

fn query(args: QueryArgs) -> Outcome {
    let p: Poipg = parse_poipg(&read(&args.poipg)?)?;
    let a = p.id_of(&args.from)?;
    let b = p.id_of(&args.to)?;
    if a == b {
        return Err(usage("--from and --to must differ"));
    }
    let claims: Vec<CausalClaim> = match args.kind {
        QueryKind::Cause => definite_cause(&p, a, b)?.into_iter().collect(),
        QueryKind::Confound => no_cause_either_way(&p, a, b)?
            .into_iter()
            .chain(latent_confounder(&p, a, b)?)
            .collect(),
        QueryKind::Blocked => {
            let c = names_to_set(|n| p.id_of(n), &args.through)?;
            blocking_claims(&p, a, b, &c)?
        }
    };
    let text: String = claims.iter().map(|c| format!("{c}\n")).collect();
    stdout(text.as_bytes())?;
    Ok(if claims.is_empty() { EXIT_NO_CLAIM } else { 0 })
}

fn load_dag(path: &Path) -> Result<Dag, Failure> {
    Ok(parse_graph(&read(path)?)?)
}

fn dsep(args: DsepArgs) -> Outcome {
    let g = load_dag(&args.graph)?;
    let x = names_to_set(|n| g.id_of(n), &args.x)?;
    let z = names_to_set(|n| g.id_of(n), &args.z)?;
    let y = names_to_set(|n| g.id_of(n), &args.y)?;
    let separated = if args.observable {
        observable_independent(&g, &x, &z, &y)?
    } else {
        d_separated(&g, &x, &z, &y)?
    };
    stdout(format!("{separated}\n").as_bytes())?;
    Ok(0)
}

fn inducing(args: InducingArgs) -> Outcome {
    let g = load_dag(&args.graph)?;
    let a = g.id_of(&args.a)?;
    let b = g.id_of(&args.b)?;
    let orientations = inducing_path_orientations(&g, a, b)?;
    let end = |into: bool| if into { "into" } else { "out" };
    let mut text = format!("{}\n", !orientations.is_empty());
    for o in &orientations {
        text.push_str(&format!(
            "{}={} {}={}\n",
            args.a,
            end(o.into_a),
            args.b,
            end(o.into_b)
        ));
    }
    stdout(text.as_bytes())?;
    Ok(0)
}

fn verify(args: VerifyArgs) -> Outcome {
    let cond = parse_ci(&read(&args.ci)?)?;
    let mut bounds = EnumBounds::new(args.obs, args.max_latent, args.max_sel)?;
    if args.selection_sinks {
        bounds = bounds.with_constraint(EdgeConstraint::SelectionSinks);
    }
    let p = fci(&table_oracle(cond.clone()), &FciConfig::exact())?.poipg;
    let members = equiv_members(&cond, &bounds)?;
    if members.is_empty() {
        stdout(format!("CLASS size=0 bounds={bounds}\nRESULT fail\n").as_bytes())?;
        eprintln!("no DAG within bounds {bounds} entails the CI set");
        return Ok(EXIT_VERIFY_FAILED);
    }
    let mut report = verify_poipg(&p, &members)?;
    report.bounds = Some(bounds);
    stdout(report.to_text().as_bytes())?;
    eprintln!("elapsed {:.3}s", report.elapsed.as_secs_f64());
    Ok(if report.all_passed() {
        0
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Discover(a) => discover(a),
        Command::Query(a) => query(a),
        Command::Dsep(a) => dsep(a),
        Command::Inducing(a) => inducing(a),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
