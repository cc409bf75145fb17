use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lcatsp_core::brute::{brute_force_atsp_with_limit, DEFAULT_MAX_N, EXTENDED_MAX_N};
use lcatsp_core::flow_routing::route;
use lcatsp_core::generate::{generate, Family, GenParams};
use lcatsp_core::local::{prepare, solve_uncertified, Partition};
use lcatsp_core::pipeline::{report_json, run_pipeline, write_run};
use lcatsp_core::split::{build_split, compute_lower_bound};
use lcatsp_core::tour::assemble_tour;
use lcatsp_core::verify::verify_solution;
use lcatsp_core::{io, solve_held_karp, FractionalCirculation, TwoWeightDigraph};
use rayon::prelude::*;

/// Local-connectivity ATSP on digraphs with two edge weights.
#[derive(Parser)]
#[command(name = "lcatsp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve the Held-Karp relaxation.
    SolveLp {
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute a minimal terminal set and its sink flow.
    FindTerminals {
        graph: PathBuf,
        lp: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Dump the split graph and the lower bound table.
    Split {
        graph: PathBuf,
        lp: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve local-connectivity ATSP for a partition.
    LocalConnectivity {
        graph: PathBuf,
        lp: PathBuf,
        /// Partition file; omit together with --singletons.
        partition: Option<PathBuf>,
        #[arg(long, conflicts_with = "partition")]
        singletons: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a solution against a lower bound table and a partition.
    Verify {
        graph: PathBuf,
        lb: PathBuf,
        partition: PathBuf,
        solution: PathBuf,
    },
    /// Exact ATSP optimum by dynamic programming.
    Bruteforce {
        graph: PathBuf,
        /// Allow up to 16 vertices.
        #[arg(long)]
        allow_large: bool,
    },
    /// Assemble a full tour by repeated local-connectivity rounds.
    Tour {
        graph: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run every stage, writing artifacts and report.json into a directory.
    Pipeline {
        graph: PathBuf,
        #[arg(long, required_unless_present = "singletons")]
        partition: Option<PathBuf>,
        #[arg(long, conflicts_with = "partition")]
        singletons: bool,
        #[arg(long)]
        out_dir: PathBuf,
        /// Recorded in the report.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate and run many seeds in parallel with singleton partitions.
    Batch {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 100)]
        count: u64,
        /// Write one run directory per seed here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    density: f64,
    #[arg(long, default_value_t = 1.0)]
    w0: f64,
    #[arg(long, default_value_t = 10.0)]
    w1: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GenArgs {
    fn params(&self, seed: u64) -> GenParams {
        GenParams {
            family: self.family,
            n: self.n,
            density: self.density,
            w0: self.w0,
            w1: self.w1,
            seed,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &Path) -> Result<TwoWeightDigraph> {
    io::parse_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_lp(graph: &TwoWeightDigraph, path: &Path) -> Result<FractionalCirculation> {
    io::parse_lp_solution(graph, &read(path)?)
        .with_context(|| format!("parsing {}", path.display()))
}

fn load_partition(n: usize, path: &Path) -> Result<Partition> {
    io::parse_partition(n, &read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `Ok(false)` means a certificate failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen { gen, output } => {
            let g = generate(&gen.params(gen.seed))?;
            emit(output.as_deref(), &io::write_graph(&g))?;
        }
        Command::SolveLp { graph, output } => {
            let g = load_graph(&graph)?;
            let x = solve_held_karp(&g)?;
            emit(output.as_deref(), &io::write_lp_solution(&x))?;
        }
        Command::FindTerminals { graph, lp, output } => {
            let g = load_graph(&graph)?;
            let x = load_lp(&g, &lp)?;
            let sink = route(&g, &x)?;
            emit(output.as_deref(), &io::write_sink_flow(&sink))?;
        }
        Command::Split { graph, lp, output } => {
            let g = load_graph(&graph)?;
            let x = load_lp(&g, &lp)?;
            let sink = route(&g, &x)?;
            let (split, xsp) = build_split(&g, &x, &sink)?;
            let lower = compute_lower_bound(&g, &x, &sink)?;
            emit(output.as_deref(), &io::write_split(&split, &xsp, &lower))?;
        }
        Command::LocalConnectivity {
            graph,
            lp,
            partition,
            singletons,
            output,
        } => {
            let g = load_graph(&graph)?;
            let x = load_lp(&g, &lp)?;
            let p = match (partition, singletons) {
                (Some(path), _) => load_partition(g.vertex_count(), &path)?,
                (None, true) => Partition::singletons(g.vertex_count()),
                (None, false) => bail!("give a partition file or --singletons"),
            };
            let prepared = prepare(&g, &x)?;
            let sol = solve_uncertified(&g, &prepared, &p)?;
            emit(output.as_deref(), &io::write_solution(&sol)?)?;
            return Ok(sol.certificate.passed);
        }
        Command::Verify {
            graph,
            lb,
            partition,
            solution,
        } => {
            let g = load_graph(&graph)?;
            let n = g.vertex_count();
            let lower =
                io::parse_lower_bound(n, &read(&lb)?).context("parsing lower bound table")?;
            let p = load_partition(n, &partition)?;
            let f = io::parse_solution(&g, &read(&solution)?).context("parsing solution")?;
            let cert = verify_solution(&g, &lower, &p, &f);
            println!("{}", serde_json::to_string_pretty(&cert)?);
            return Ok(cert.passed);
        }
        Command::Bruteforce { graph, allow_large } => {
            let g = load_graph(&graph)?;
            let limit = if allow_large {
                EXTENDED_MAX_N
            } else {
                DEFAULT_MAX_N
            };
            println!("opt {}", brute_force_atsp_with_limit(&g, limit)?);
        }
        Command::Tour { graph, output } => {
            let g = load_graph(&graph)?;
            let x = solve_held_karp(&g)?;
            let prepared = prepare(&g, &x)?;
            let tour = assemble_tour(&g, &prepared)?;
            let text = format!("{}ratio {}\n", io::write_multiset(&tour.f), tour.ratio);
            emit(output.as_deref(), &text)?;
        }
        Command::Pipeline {
            graph,
            partition,
            singletons: _,
            out_dir,
            seed,
        } => {
            let g = load_graph(&graph)?;
            let p = partition
                .map(|path| load_partition(g.vertex_count(), &path))
                .transpose()?;
            let run = run_pipeline(&g, p.as_ref(), seed)?;
            write_run(&run, &out_dir)?;
            print!("{}", report_json(&run.report)?);
            return Ok(run.report.certificate.passed);
        }
        Command::Batch {
            gen,
            count,
            out_dir,
        } => {
            let seeds: Vec<u64> = (gen.seed..gen.seed + count).collect();
            let results: Vec<Result<(u64, bool, Option<f64>)>> = seeds
                .par_iter()
                .map(|&seed| {
                    let g = generate(&gen.params(seed))?;
                    let run = run_pipeline(&g, None, Some(seed))
                        .with_context(|| format!("seed {seed}"))?;
                    if let Some(dir) = &out_dir {
                        write_run(&run, &dir.join(format!("seed-{seed}")))?;
                    }
                    let c = &run.report.certificate;
                    Ok((seed, c.passed, c.max_ratio))
                })
                .collect();
            let mut all = true;
            let mut max_ratio = Some(0.0f64);
            for r in results {
                let (seed, passed, ratio) = r?;
                all &= passed;
                max_ratio = max_ratio.zip(ratio).map(|(a, b)| a.max(b));
                let shown = ratio.map_or("inf".to_string(), |r| r.to_string());
                println!(
                    "seed {seed} {} max_ratio {shown}",
                    if passed { "pass" } else { "FAIL" }
                );
            }
            let shown = max_ratio.map_or("inf".to_string(), |r| r.to_string());
            println!("aggregate max_ratio {shown} over {count} runs");
            return Ok(all);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
