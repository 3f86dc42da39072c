use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use pachner::io::{detect_format, parse_gtri, write_gtri, InputFormat};
use pachner::invariants::homology;
use pachner::moves::format_trace;
use pachner::search::{census_stats, dual_source_bfs_with_progress, SearchConfig, SearchOutcome, VisitedStore};
use pachner::simplify::{anneal, bfs_simplify, collapse_phase, greedy, pipeline, PipelineConfig};
use pachner::{FacetList, IsoSig, Triangulation};

#[derive(Parser)]
#[command(name = "pachner", version, about = "Triangulated 4-manifolds: invariants, moves, signatures, simplification and search")]
struct Cli {
    /// Random seed for the annealing phase.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for search.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Simplification config file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Read facet lists with 0-based vertex labels.
    #[arg(long, global = true)]
    zero_based: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhaseArg {
    Pipeline,
    Greedy,
    Collapse,
    Anneal,
    Bfs,
}

#[derive(Subcommand)]
enum Command {
    /// Check closedness, gluing consistency, face and link conditions.
    Validate { input: String },
    /// Print the f-vector.
    Fvector { input: String },
    /// Print H_0 .. H_4.
    Homology { input: String },
    /// Print the isomorphism signature, or with --decode turn a signature
    /// back into a .gtri file.
    Isosig {
        input: String,
        #[arg(long)]
        decode: bool,
    },
    /// Reduce the triangulation; writes the result and the move trace.
    Simplify {
        input: String,
        /// Where to write the reduced triangulation (default: next to the input).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the move trace (default: next to the input).
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "pipeline")]
        phase: PhaseArg,
        /// Total annealing steps (overrides the config).
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        bfs_height: Option<u64>,
        #[arg(long)]
        bfs_nodes: Option<u64>,
    },
    /// Dual-source breadth-first search between two triangulations.
    Connect {
        #[arg(long)]
        source_a: String,
        #[arg(long)]
        source_b: String,
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long, default_value_t = 1_000_000)]
        nodes: u64,
        #[arg(long, env = "PACHNER_STORE")]
        store: Option<PathBuf>,
        #[arg(long)]
        resume: bool,
        /// Signatures between checkpoints and progress lines.
        #[arg(long, default_value_t = 10_000)]
        checkpoint: u64,
    },
    /// Summarise a search store.
    Stats {
        #[arg(long, env = "PACHNER_STORE")]
        store: PathBuf,
    },
}

fn read_input(input: &str) -> Result<String> {
    if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(input).with_context(|| format!("reading {input}"))
    }
}

fn parse_triangulation(text: &str, origin: &str, zero_based: bool) -> Result<Triangulation> {
    let t = match detect_format(text) {
        InputFormat::Gtri => parse_gtri(text).with_context(|| format!("{origin}: parsing .gtri"))?,
        InputFormat::FacetList => FacetList::parse(text, zero_based)
            .and_then(|f| f.to_triangulation())
            .with_context(|| format!("{origin}: parsing facet list"))?,
        InputFormat::Signature => pachner::isosig::decode(text.trim()).with_context(|| format!("{origin}: decoding signature"))?,
    };
    Ok(t)
}

/// A file path (or `-`) if one exists, otherwise a literal signature.
fn load(input: &str, zero_based: bool) -> Result<Triangulation> {
    if input != "-" && !Path::new(input).exists() {
        if matches!(detect_format(input), InputFormat::Signature) {
            return pachner::isosig::decode(input).with_context(|| format!("decoding signature {input:?}"));
        }
        bail!("{input}: no such file, and not a signature");
    }
    parse_triangulation(&read_input(input)?, input, zero_based)
}

fn load_source(arg: &str, zero_based: bool) -> Result<IsoSig> {
    Ok(IsoSig::of(&load(arg, zero_based)?)?)
}

fn require_valid(t: &Triangulation) -> Result<()> {
    let report = t.validity();
    if !report.is_valid() {
        bail!("input is not a closed valid triangulation:\n{report}");
    }
    Ok(())
}

fn sibling(input: &str, suffix: &str) -> Result<PathBuf> {
    if input == "-" {
        bail!("output paths are required when reading standard input");
    }
    let p = Path::new(input);
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    Ok(p.with_file_name(format!("{stem}{suffix}")))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let zb = cli.zero_based;
    match cli.command {
        Command::Validate { input } => {
            let t = load(&input, zb)?;
            let report = t.validity();
            print!("{report}");
            let orientable = if report.involution_violations.is_empty() {
                t.is_orientable()?
            } else {
                false
            };
            println!("pentachora {}", t.size());
            println!("orientable {orientable}");
            if report.is_valid() {
                println!("valid");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("invalid");
                Ok(ExitCode::from(1))
            }
        }
        Command::Fvector { input } => {
            let t = load(&input, zb)?;
            println!("{}", t.f_vector()?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Homology { input } => {
            let t = load(&input, zb)?;
            require_valid(&t)?;
            let h = homology(&t)?;
            for (k, g) in h.iter().enumerate() {
                println!("H_{k} = {g}");
            }
            let parts: Vec<String> = h.iter().map(|g| g.to_string()).collect();
            println!("({})", parts.join(", "));
            Ok(ExitCode::SUCCESS)
        }
        Command::Isosig { input, decode } => {
            if decode {
                let text = if Path::new(&input).exists() { read_input(&input)? } else { input.clone() };
                let t = pachner::isosig::decode(text.trim()).context("decoding signature")?;
                print!("{}", write_gtri(&t));
            } else {
                let t = load(&input, zb)?;
                println!("{}", IsoSig::of(&t)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simplify {
            input,
            output,
            trace,
            phase,
            steps,
            bfs_height,
            bfs_nodes,
        } => {
            let t = load(&input, zb)?;
            require_valid(&t)?;
            let mut cfg = match &cli.config {
                Some(path) => PipelineConfig::parse(&fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
                    .with_context(|| format!("{}", path.display()))?,
                None => PipelineConfig::default(),
            };
            if let Some(s) = cli.seed {
                cfg.schedule.seed = s;
            }
            if let Some(s) = steps {
                cfg.step_budget = s;
                cfg.schedule.max_steps = cfg.schedule.max_steps.min(s);
            }
            if let Some(h) = bfs_height {
                cfg.bfs_height = h;
            }
            if let Some(n) = bfs_nodes {
                cfg.bfs_nodes = n;
            }
            let (out, report) = match phase {
                PhaseArg::Pipeline => pipeline(&t, &cfg)?,
                PhaseArg::Greedy => greedy(&t)?,
                PhaseArg::Collapse => collapse_phase(&t, cfg.schedule.beta)?,
                PhaseArg::Anneal => anneal(&t, &cfg.schedule)?,
                PhaseArg::Bfs => bfs_simplify(&t, cfg.bfs_height, cfg.bfs_nodes)?,
            };
            let out_path = match output {
                Some(p) => p,
                None => sibling(&input, ".simplified.gtri")?,
            };
            let trace_path = match trace {
                Some(p) => p,
                None => sibling(&input, ".trace")?,
            };
            fs::write(&out_path, write_gtri(&out)).with_context(|| format!("writing {}", out_path.display()))?;
            fs::write(&trace_path, format_trace(&report.trace))
                .with_context(|| format!("writing {}", trace_path.display()))?;
            println!("output {}", out_path.display());
            println!("trace {}", trace_path.display());
            println!("{report}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Connect {
            source_a,
            source_b,
            level,
            nodes,
            store,
            resume,
            checkpoint,
        } => {
            let mut cfg = SearchConfig::new(load_source(&source_a, zb)?, load_source(&source_b, zb)?);
            cfg.level_cap = level;
            cfg.node_budget = nodes;
            cfg.workers = cli.workers;
            cfg.store = store;
            cfg.resume = resume;
            cfg.checkpoint_interval = checkpoint;
            let run = dual_source_bfs_with_progress(&cfg, &mut |p| eprintln!("{p}"))?;
            if let SearchOutcome::Connected { path, .. } = &run.outcome {
                for (side, arcs) in [("A", &path.a_side), ("B", &path.b_side)] {
                    for arc in arcs {
                        let moves: Vec<String> = arc.moves.iter().map(|s| s.to_string()).collect();
                        println!("{side} {} -> {} via {}", arc.from, arc.to, moves.join(", "));
                    }
                }
            }
            println!("{}", run.outcome);
            Ok(ExitCode::from(run.outcome.exit_code() as u8))
        }
        Command::Stats { store } => {
            let s = VisitedStore::resume(&store).map_err(|e| anyhow!(e))?;
            println!("{}", census_stats(&s));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
