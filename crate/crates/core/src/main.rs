use std::collections::BTreeSet;
use std::error::Error as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use log::info;

use prefgraph::eval::{run_experiment, runtime_ordering, CandidateMode, ExperimentConfig, Gain};
use prefgraph::io::{
    config_args, ingest, read_config, read_pairs, results_table, write_ratings, write_report, DatasetDescriptor,
    DatasetFormat, Snapshot,
};
use prefgraph::metapath::{TypeSequence, DEFAULT_WALK_CAP};
use prefgraph::preference::{build_tpg, derive_preferences, Catalog, ItemId, RatingScale, TripartitePreferenceGraph};
use prefgraph::projection::{build_variant, project, verify_projection, ProjectedGraph, Variant};
use prefgraph::ranking::{recommend, CandidateSet, PprConfig};
use prefgraph::{Error, Result};

/// Collaborative ranking over tripartite preference graphs.
#[derive(Debug, Parser)]
#[command(name = "prefgraph", version, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a rating file and write it back as a normalised table.
    Ingest {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build a projected graph and write a snapshot.
    Build {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value = "rnc", conflicts_with = "metapaths")]
        variant: Variant,
        /// Comma-separated meta-path set, e.g. "UPU,UPR".
        #[arg(long)]
        metapaths: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the top items for one user.
    Recommend {
        #[command(flatten)]
        source: SourceArgs,
        /// A snapshot written by `build`, instead of a dataset.
        #[arg(long, conflicts_with_all = ["input", "pairs"])]
        snapshot: Option<PathBuf>,
        #[arg(long, default_value = "rnc")]
        variant: Variant,
        #[arg(long)]
        user: String,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[command(flatten)]
        ppr: PprArgs,
    },
    /// Run the UPL evaluation protocol.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_delimiter = ',', default_value = "10")]
        upl: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "unc,pnc,rnc,grank")]
        variants: Vec<Variant>,
        #[arg(long, default_value = "test")]
        candidate_mode: CandidateMode,
        #[arg(long, default_value = "standard")]
        gain: Gain,
        #[arg(long, default_value_t = 10)]
        top_n: usize,
        #[command(flatten)]
        ppr: PprArgs,
        /// Line-delimited JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Tab-separated results table; printed to stdout when absent.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Time per-user recommendation for each variant on one split.
    Timing {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 40)]
        upl: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        users: usize,
        #[arg(long, value_delimiter = ',', default_value = "rnc,pnc,unc,grank")]
        variants: Vec<Variant>,
        #[command(flatten)]
        ppr: PprArgs,
    },
    /// Check projections against brute-force walk enumeration.
    Verify {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_delimiter = ',', default_value = "unc,pnc,rnc")]
        variants: Vec<Variant>,
        #[arg(long, default_value_t = 9)]
        max_len: usize,
        /// Keep only the first N users of a rating dataset.
        #[arg(long, default_value_t = 6)]
        max_users: usize,
        #[arg(long, default_value_t = DEFAULT_WALK_CAP)]
        cap: usize,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    #[arg(long, default_value = "movielens-100k")]
    format: DatasetFormat,
    #[arg(long)]
    input: PathBuf,
    /// Rating scale as min,max,step; defaults to the format's scale.
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    delimiter: Option<String>,
    /// Plain key=value file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SourceArgs {
    #[arg(long, default_value = "movielens-100k")]
    format: DatasetFormat,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Preference list `user winner loser`; `*` marks a candidate preference.
    #[arg(long, conflicts_with = "input")]
    pairs: Option<PathBuf>,
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    delimiter: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PprArgs {
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    #[arg(long, default_value_t = 20)]
    iterations: usize,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
}

impl PprArgs {
    fn config(&self) -> PprConfig {
        PprConfig {
            damping: self.damping,
            iterations: self.iterations,
            epsilon: self.epsilon,
        }
    }
}

fn descriptor(format: DatasetFormat, input: PathBuf, scale: Option<&str>, delimiter: Option<String>) -> Result<DatasetDescriptor> {
    let mut d = DatasetDescriptor::new(format, input);
    if let Some(s) = scale {
        let parts: Vec<f64> = s
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidConfig(format!("scale {s:?} is not min,max,step")))?;
        let [min, max, step] = parts[..] else {
            return Err(Error::InvalidConfig(format!("scale {s:?} is not min,max,step")));
        };
        if !(step > 0.0 && min <= max) {
            return Err(Error::InvalidConfig(format!("scale {s:?} is empty")));
        }
        d.scale = RatingScale { min, max, step };
    }
    d.delimiter = delimiter;
    Ok(d)
}

impl DataArgs {
    fn descriptor(&self) -> Result<DatasetDescriptor> {
        descriptor(self.format, self.input.clone(), self.scale.as_deref(), self.delimiter.clone())
    }
}

/// A preference graph plus the catalog its ids refer to, and the rated
/// items per user when it came from ratings.
struct Source {
    catalog: Catalog,
    graph: TripartitePreferenceGraph,
    rated: Option<prefgraph::preference::RatingTable>,
}

impl SourceArgs {
    fn load(&self, max_users: Option<usize>) -> Result<Source> {
        if let Some(pairs) = &self.pairs {
            let (catalog, graph) = read_pairs(pairs)?;
            return Ok(Source {
                catalog,
                graph,
                rated: None,
            });
        }
        let input = self
            .input
            .clone()
            .ok_or_else(|| Error::InvalidConfig("either --input or --pairs is required".into()))?;
        let table = ingest(&descriptor(self.format, input, self.scale.as_deref(), self.delimiter.clone())?)?;
        let keep: Vec<_> = match max_users {
            Some(n) => {
                let users: BTreeSet<_> = table.by_user().map(|(u, _)| u).take(n).collect();
                table.ratings().iter().copied().filter(|r| users.contains(&r.user)).collect()
            }
            None => table.ratings().to_vec(),
        };
        let graph = build_tpg(&derive_preferences(&keep))?;
        Ok(Source {
            catalog: table.catalog().clone(),
            graph,
            rated: Some(table),
        })
    }
}

fn parse_metapaths(list: &str) -> Result<Vec<TypeSequence>> {
    list.split(',').map(|s| s.trim().parse()).collect()
}

fn describe(g: &ProjectedGraph) -> String {
    use prefgraph::metapath::NodeType::{R, U};
    format!(
        "{} graph: {} nodes, {} edges (U->U {}, U->R {}, R->U {}), {} dangling rows",
        g.variant(),
        g.roster().len(),
        g.edge_count(),
        g.block_nnz(U, U),
        g.block_nnz(U, R),
        g.block_nnz(R, U),
        g.dangling().len()
    )
}

fn run(cli: Cli) -> Result<()> {
    info!("resolved configuration: {cli:?}");
    match cli.command {
        Command::Ingest { data, output } => {
            let table = ingest(&data.descriptor()?)?;
            println!(
                "{} ratings, {} users, {} items, scale {}",
                table.len(),
                table.catalog().user_count(),
                table.catalog().item_count(),
                table.scale()
            );
            if let Some(out) = output {
                write_ratings(&table, &out)?;
            }
        }
        Command::Build {
            source,
            variant,
            metapaths,
            output,
        } => {
            let src = source.load(None)?;
            let g = match metapaths {
                Some(list) => project(&src.graph, &parse_metapaths(&list)?)?,
                None => build_variant(&src.graph, variant)?,
            };
            println!("{}", describe(&g));
            for (r, c, w) in g.adjacency().triplets().filter(|_| g.roster().len() <= 64) {
                println!("{}\t{}\t{w:.6}", label(&g, &src.catalog, r), label(&g, &src.catalog, c));
            }
            if let Some(out) = output {
                Snapshot::new(g, Some(&src.catalog)).save(&out)?;
            }
        }
        Command::Recommend {
            source,
            snapshot,
            variant,
            user,
            top,
            ppr,
        } => {
            let (g, catalog, rated) = match snapshot {
                Some(path) => {
                    let s = Snapshot::load(&path)?;
                    let catalog = s
                        .catalog()
                        .ok_or_else(|| Error::InvalidConfig("snapshot carries no labels".into()))?;
                    (s.graph, catalog, None)
                }
                None => {
                    let src = source.load(None)?;
                    (build_variant(&src.graph, variant)?, src.catalog, src.rated)
                }
            };
            let id = catalog.user(&user).ok_or_else(|| Error::UnknownUser(user.clone()))?;
            let trained: BTreeSet<ItemId> = rated
                .map(|t| t.ratings().iter().filter(|r| r.user == id).map(|r| r.item).collect())
                .unwrap_or_default();
            let list = recommend(&g, id, top, CandidateSet::Untrained(&trained), &ppr.config())?;
            println!("rank\titem\tscore");
            for (k, it) in list.items.iter().enumerate() {
                println!("{}\t{}\t{:.6e}", k + 1, catalog.item_label(it.item), it.rank);
            }
        }
        Command::Evaluate {
            data,
            upl,
            samples,
            seed,
            variants,
            candidate_mode,
            gain,
            top_n,
            ppr,
            report,
            table,
        } => {
            let t = ingest(&data.descriptor()?)?;
            let cfg = ExperimentConfig {
                variants,
                upls: upl,
                samples,
                seed,
                top_n,
                ppr: ppr.config(),
                candidates: candidate_mode,
                gain,
            };
            let reports = run_experiment(&t, &cfg)?;
            let rendered = results_table(&reports);
            match table {
                Some(p) => fs::write(p, &rendered)?,
                None => print!("{rendered}"),
            }
            if let Some(p) = report {
                write_report(&p, &cfg, &reports)?;
            }
        }
        Command::Timing {
            data,
            upl,
            seed,
            users,
            variants,
            ppr,
        } => {
            let t = ingest(&data.descriptor()?)?;
            let entries = runtime_ordering(&t, upl, seed, &variants, users, &ppr.config())?;
            println!("variant\tupl\tusers\tedges\tbuild_seconds\tseconds_per_user");
            for e in entries {
                println!(
                    "{}\t{upl}\t{}\t{}\t{:.3}\t{:.6}",
                    e.variant, e.users, e.edges, e.build_seconds, e.seconds_per_user
                );
            }
        }
        Command::Verify {
            source,
            variants,
            max_len,
            max_users,
            cap,
        } => {
            let src = source.load(Some(max_users))?;
            let mut clean = true;
            for v in variants {
                let r = verify_projection(Some(&src.graph), v, max_len, cap)?;
                println!(
                    "{v}: {} projected paths, {} walk classes, {} admitted, {} violations",
                    r.projected_paths,
                    r.walks,
                    r.admitted,
                    r.violations.len()
                );
                for (types, n) in &r.excluded {
                    println!("{v}\texcluded\t{types}\t{n}");
                }
                for x in &r.violations {
                    println!("{v}\tviolation\t{:?}\t{}", x.kind, x.types);
                }
                clean &= r.is_clean();
            }
            if !clean {
                return Err(Error::InvalidConfig("projection verification found violations".into()));
            }
        }
    }
    Ok(())
}

fn label(g: &ProjectedGraph, catalog: &Catalog, row: usize) -> String {
    let r = g.roster();
    if row < r.users.len() {
        return catalog.user_label(r.users[row]).to_string();
    }
    if let Some(rep) = r.representative(row) {
        let side = match rep.side {
            prefgraph::preference::Side::Desirable => "d",
            prefgraph::preference::Side::Undesirable => "u",
        };
        return format!("{}_{side}", catalog.item_label(rep.item));
    }
    let p = r.prefs[row - r.users.len()];
    format!("<{},{}>", catalog.item_label(p.winner), catalog.item_label(p.loser))
}

/// Splices `--config` file entries in front of the explicit flags.
fn expand_config(mut args: Vec<String>) -> Result<Vec<String>> {
    let pos = args.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else {
        return Ok(args);
    };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args
            .get(pos + 1)
            .cloned()
            .ok_or_else(|| Error::InvalidConfig("--config needs a file".into()))?,
    };
    let extra = config_args(&read_config(std::path::Path::new(&path))?);
    let at = if args.len() > 1 { 2 } else { args.len() };
    args.splice(at..at, extra);
    Ok(args)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            eprint!("{e}");
            let mut cmd = Cli::command();
            cmd.build();
            let usage = match args.get(1).and_then(|name| cmd.find_subcommand_mut(name)) {
                Some(sub) => sub.render_usage(),
                None => Cli::command().render_usage(),
            };
            eprintln!("\n{usage}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = e.source();
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
