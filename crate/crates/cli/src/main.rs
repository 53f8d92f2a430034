//! `graphlet`: generation, census, oracle census and comparison as
//! subcommands with reproducible file-based inputs and outputs.

use std::fs::{self, File};
use std::io::{BufWriter, Cursor, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use graphlet_core::{
    cluster, esu_census, gda_matrix, generate, gtrie_census_parallel, random, GdaMode, Graph,
    GTrie,
};

#[derive(Parser)]
#[command(name = "graphlet", version, about = "Graphlet census and network comparison over a graphlet-trie")]
struct Cli {
    /// Census worker threads (default: available parallelism; outputs are
    /// independent of this)
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for randomized utilities; recorded in output headers
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Print progress to stderr
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate the graphlet set for size k, build the trie and store it
    Gen(GenArgs),
    /// Enumerate graphlet occurrences and write orbit frequencies
    Census(CensusArgs),
    /// Like census, but via the ESU reference enumerator
    OracleCensus(CensusArgs),
    /// Compare networks by GDD-agreement and cluster them
    Compare(CompareArgs),
    /// Write a seeded random network as an edge list
    RandNet(RandNetArgs),
}

#[derive(Args, Clone)]
struct DirectednessArgs {
    /// Treat edges as ordered pairs
    #[arg(long, conflicts_with = "undirected")]
    directed: bool,
    /// Treat edges as unordered pairs (default)
    #[arg(long)]
    undirected: bool,
}

impl DirectednessArgs {
    fn directed(&self) -> bool {
        self.directed
    }
    fn flag(&self) -> &'static str {
        if self.directed {
            "--directed"
        } else {
            "--undirected"
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Maximum graphlet size
    #[arg(short)]
    k: usize,
    #[command(flatten)]
    dir: DirectednessArgs,
    /// Output .gt file
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct CensusArgs {
    /// Input edge list
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    dir: DirectednessArgs,
    /// Maximum graphlet size (may be omitted when --gtrie is given)
    #[arg(short)]
    k: Option<usize>,
    /// Pre-built .gt file to match against
    #[arg(long)]
    gtrie: Option<PathBuf>,
    /// Per-node orbit frequency CSV
    #[arg(long)]
    out_fr: PathBuf,
    /// Per-graphlet frequency CSV
    #[arg(long)]
    out_freq: PathBuf,
    /// Cross-check the trie census against the ESU oracle
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Input edge lists (at least two)
    #[arg(long, num_args = 2.., required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    dir: DirectednessArgs,
    /// Maximum graphlet size
    #[arg(short)]
    k: usize,
    /// Similarity metric
    #[arg(long, value_enum, default_value_t = MetricArg::Gda)]
    metric: MetricArg,
    /// Pairwise GDA matrix CSV
    #[arg(long)]
    out_matrix: PathBuf,
    /// Newick dendrogram
    #[arg(long)]
    out_newick: Option<PathBuf>,
    /// Long-form netA,netB,gda CSV
    #[arg(long)]
    out_heatmap: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    /// Modified GDD-agreement: only orbits present in at least one network
    Gda,
    /// Original GDD-agreement over all orbits
    GdaPrime,
}

impl MetricArg {
    fn mode(self) -> GdaMode {
        match self {
            MetricArg::Gda => GdaMode::Modified,
            MetricArg::GdaPrime => GdaMode::Original,
        }
    }
}

#[derive(Args)]
struct RandNetArgs {
    /// Network model
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Node count
    #[arg(short)]
    n: usize,
    /// Edge count (ordered edges for gnm/dag, mutual pairs for reciprocal)
    #[arg(short)]
    m: usize,
    #[command(flatten)]
    dir: DirectednessArgs,
    /// Output edge list
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    /// Uniform random edges
    Gnm,
    /// Every connection is a mutual pair (directed only)
    Reciprocal,
    /// Edges run from lower to higher node index (directed only)
    Dag,
}

enum CliError {
    /// Bad invocation: unknown/missing file, k out of range. Exit code 2.
    Usage(String),
    /// Failure while processing valid inputs. Exit code 1.
    Run(String),
}

impl From<graphlet_core::Error> for CliError {
    fn from(e: graphlet_core::Error) -> Self {
        use graphlet_core::Error as E;
        match &e {
            E::SizeOutOfRange { .. } => CliError::Usage(e.to_string()),
            E::Io(io) if io.kind() == std::io::ErrorKind::NotFound => CliError::Usage(e.to_string()),
            _ => CliError::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::Usage(e.to_string())
        } else {
            CliError::Run(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |p| p.get()));
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let ctx = Ctx {
        workers,
        seed: cli.seed,
        verbose: cli.verbose,
    };
    match cli.cmd {
        Cmd::Gen(args) => cmd_gen(&ctx, args),
        Cmd::Census(args) => cmd_census(&ctx, args, false),
        Cmd::OracleCensus(args) => cmd_census(&ctx, args, true),
        Cmd::Compare(args) => cmd_compare(&ctx, args),
        Cmd::RandNet(args) => cmd_rand_net(&ctx, args),
    }
}

struct Ctx {
    workers: usize,
    seed: Option<u64>,
    verbose: u8,
}

impl Ctx {
    fn progress(&self, what: &str, started: Instant) {
        if self.verbose > 0 {
            eprintln!("{} took {:?}", what, started.elapsed());
        }
    }
}

/// Output header: tool version, subcommand, the flags that determine the
/// output (execution-only flags like --workers are omitted so identical
/// results are byte-identical), input checksums and the seed when given.
fn header(ctx: &Ctx, subcommand: &str, args: &str, inputs: &[&Path]) -> Result<Vec<String>, CliError> {
    let mut lines = vec![
        format!("# graphlet {} {}", env!("CARGO_PKG_VERSION"), subcommand),
        format!("# args: {args}"),
    ];
    for path in inputs {
        let bytes = fs::read(path).map_err(|e| at_path(e, path))?;
        let digest = Sha256::digest(&bytes);
        lines.push(format!("# input {} sha256={:x}", file_name(path), digest));
    }
    if let Some(seed) = ctx.seed {
        lines.push(format!("# seed {seed}"));
    }
    Ok(lines)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn at_path(e: std::io::Error, path: &Path) -> CliError {
    let msg = format!("{}: {e}", path.display());
    if e.kind() == std::io::ErrorKind::NotFound {
        CliError::Usage(msg)
    } else {
        CliError::Run(msg)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path).map_err(|e| at_path(e, path))?))
}

fn load_graph(path: &Path, directed: bool) -> Result<Graph, CliError> {
    let bytes = fs::read(path).map_err(|e| at_path(e, path))?;
    let g = Graph::from_edge_list(Cursor::new(bytes), directed)
        .map_err(|e| CliError::Run(format!("{}: {e}", path.display())))?;
    if g.self_loops_dropped() > 0 {
        eprintln!(
            "warning: {}: dropped {} self-loop(s)",
            path.display(),
            g.self_loops_dropped()
        );
    }
    Ok(g)
}

fn cmd_gen(ctx: &Ctx, args: GenArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let set = generate(args.k, args.dir.directed())?;
    let trie = GTrie::build(set);
    ctx.progress("generation", started);

    let arg_line = format!("gen -k {} {} -o {}", args.k, args.dir.flag(), file_name(&args.output));
    let mut w = create(&args.output)?;
    for line in header(ctx, "gen", &arg_line, &[])? {
        writeln!(w, "{line}").map_err(|e| at_path(e, &args.output))?;
    }
    trie.write_text(&mut w)?;
    w.flush().map_err(|e| at_path(e, &args.output))?;
    eprintln!(
        "wrote {}: {} graphlets, {} orbits, {} trie nodes",
        args.output.display(),
        trie.set().len(),
        trie.set().orbit_count(),
        trie.node_count()
    );
    Ok(())
}

fn cmd_census(ctx: &Ctx, args: CensusArgs, use_oracle_engine: bool) -> Result<(), CliError> {
    let g = load_graph(&args.input, args.dir.directed())?;

    let trie = match &args.gtrie {
        Some(path) => {
            let bytes = fs::read(path).map_err(|e| at_path(e, path))?;
            let trie = GTrie::read_text(Cursor::new(bytes))
                .map_err(|e| CliError::Run(format!("{}: {e}", path.display())))?;
            if trie.directed() != args.dir.directed() {
                return Err(CliError::Usage(format!(
                    "{}: trie is {}, but the graph flag says {}",
                    path.display(),
                    if trie.directed() { "directed" } else { "undirected" },
                    args.dir.flag()
                )));
            }
            if let Some(k) = args.k {
                if k != trie.k() {
                    return Err(CliError::Usage(format!(
                        "-k {k} disagrees with the trie's k={}",
                        trie.k()
                    )));
                }
            }
            trie
        }
        None => {
            let k = args
                .k
                .ok_or_else(|| CliError::Usage("either -k or --gtrie is required".into()))?;
            GTrie::build(generate(k, args.dir.directed())?)
        }
    };

    let started = Instant::now();
    let engine = if use_oracle_engine { "oracle-census" } else { "census" };
    let matrix = if use_oracle_engine {
        esu_census(&g, trie.k(), trie.set())?
    } else {
        gtrie_census_parallel(&g, &trie, ctx.workers)?
    };
    ctx.progress(engine, started);

    if args.oracle && !use_oracle_engine {
        let started = Instant::now();
        let reference = esu_census(&g, trie.k(), trie.set())?;
        ctx.progress("oracle cross-check", started);
        if reference != matrix {
            return Err(CliError::Run(
                "oracle mismatch: ESU census disagrees with the g-trie census".into(),
            ));
        }
        eprintln!("oracle check passed: ESU census matches entrywise");
    }

    let mut arg_line = format!(
        "{engine} --input {} {} -k {}",
        file_name(&args.input),
        args.dir.flag(),
        trie.k()
    );
    if let Some(p) = &args.gtrie {
        arg_line.push_str(&format!(" --gtrie {}", file_name(p)));
    }
    if args.oracle {
        arg_line.push_str(" --oracle");
    }
    arg_line.push_str(&format!(
        " --out-fr {} --out-freq {}",
        file_name(&args.out_fr),
        file_name(&args.out_freq)
    ));
    let head = header(ctx, engine, &arg_line, &[&args.input])?;

    let mut w = create(&args.out_fr)?;
    matrix.write_fr_csv(&mut w, &g, &head)?;
    w.flush().map_err(|e| at_path(e, &args.out_fr))?;

    let mut w = create(&args.out_freq)?;
    matrix.write_freq_csv(&mut w, trie.set(), &head)?;
    w.flush().map_err(|e| at_path(e, &args.out_freq))?;

    eprintln!(
        "census of {} ({} nodes, {} edges): {} occurrences over {} graphlets",
        args.input.display(),
        g.node_count(),
        g.edge_count(),
        matrix.graphlet_freqs().iter().sum::<u64>(),
        trie.set().len()
    );
    Ok(())
}

fn cmd_compare(ctx: &Ctx, args: CompareArgs) -> Result<(), CliError> {
    let directed = args.dir.directed();
    let mut networks = Vec::with_capacity(args.inputs.len());
    let mut used = std::collections::HashSet::new();
    for path in &args.inputs {
        let g = load_graph(path, directed)?;
        let stem = file_stem(path);
        let mut id = stem.clone();
        let mut suffix = 2;
        while !used.insert(id.clone()) {
            id = format!("{stem}-{suffix}");
            suffix += 1;
        }
        networks.push((id, g));
    }

    let started = Instant::now();
    let sim = gda_matrix(&networks, args.k, args.metric.mode(), ctx.workers)?;
    ctx.progress("pairwise GDA", started);
    let tree = cluster(&sim)?;

    let metric_name = match args.metric {
        MetricArg::Gda => "gda",
        MetricArg::GdaPrime => "gda-prime",
    };
    let mut arg_line = String::from("compare --inputs");
    for p in &args.inputs {
        arg_line.push_str(&format!(" {}", file_name(p)));
    }
    arg_line.push_str(&format!(
        " {} -k {} --metric {metric_name} --out-matrix {}",
        args.dir.flag(),
        args.k,
        file_name(&args.out_matrix)
    ));
    if let Some(p) = &args.out_newick {
        arg_line.push_str(&format!(" --out-newick {}", file_name(p)));
    }
    if let Some(p) = &args.out_heatmap {
        arg_line.push_str(&format!(" --out-heatmap {}", file_name(p)));
    }
    let input_refs: Vec<&Path> = args.inputs.iter().map(|p| p.as_path()).collect();
    let head = header(ctx, "compare", &arg_line, &input_refs)?;

    let mut w = create(&args.out_matrix)?;
    sim.write_csv(&mut w, &head)?;
    w.flush().map_err(|e| at_path(e, &args.out_matrix))?;

    if let Some(path) = &args.out_heatmap {
        let mut w = create(path)?;
        sim.write_heatmap_csv(&mut w, &head)?;
        w.flush().map_err(|e| at_path(e, path))?;
    }

    if let Some(path) = &args.out_newick {
        let mut w = create(path)?;
        // Newick comments are bracketed
        for line in &head {
            writeln!(w, "[{}]", line.trim_start_matches("# ")).map_err(|e| at_path(e, path))?;
        }
        writeln!(w, "{}", tree.newick()).map_err(|e| at_path(e, path))?;
        w.flush().map_err(|e| at_path(e, path))?;
    }

    eprintln!(
        "compared {} networks at k={} ({})",
        networks.len(),
        args.k,
        metric_name
    );
    Ok(())
}

fn cmd_rand_net(ctx: &Ctx, args: RandNetArgs) -> Result<(), CliError> {
    let seed = ctx.seed.unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = match args.model {
        ModelArg::Gnm => {
            if args.dir.directed() {
                random::gnm_digraph(args.n, args.m, &mut rng)
            } else {
                random::gnm_graph(args.n, args.m, &mut rng)
            }
        }
        ModelArg::Reciprocal => {
            if !args.dir.directed() {
                return Err(CliError::Usage("--model reciprocal requires --directed".into()));
            }
            random::reciprocal_digraph(args.n, args.m, &mut rng)
        }
        ModelArg::Dag => {
            if !args.dir.directed() {
                return Err(CliError::Usage("--model dag requires --directed".into()));
            }
            random::dag_digraph(args.n, args.m, &mut rng)
        }
    };

    let model_name = match args.model {
        ModelArg::Gnm => "gnm",
        ModelArg::Reciprocal => "reciprocal",
        ModelArg::Dag => "dag",
    };
    let arg_line = format!(
        "rand-net --model {model_name} -n {} -m {} {} -o {}",
        args.n,
        args.m,
        args.dir.flag(),
        file_name(&args.output)
    );
    let ctx_with_seed = Ctx {
        workers: ctx.workers,
        seed: Some(seed),
        verbose: ctx.verbose,
    };
    let mut w = create(&args.output)?;
    for line in header(&ctx_with_seed, "rand-net", &arg_line, &[])? {
        writeln!(w, "{line}").map_err(|e| at_path(e, &args.output))?;
    }
    g.write_edge_list(&mut w)?;
    w.flush().map_err(|e| at_path(e, &args.output))?;
    eprintln!(
        "wrote {}: {} nodes, {} edges",
        args.output.display(),
        g.node_count(),
        g.edge_count()
    );
    Ok(())
}
