use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

mod commands;
mod report;

use report::CommandReport;

#[derive(Parser)]
#[command(name = "mpnnv", version, about = "Exact MPNN evaluation, GLP compilation and node-classifier verification")]
struct Cli {
    /// Worker threads for tree-shape search.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed recorded in the report for randomized corpus generation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write a JSON command report to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate an MPNN on a graph.
    EvalMpnn {
        mpnn: PathBuf,
        graph: PathBuf,
        /// Node to classify (node-classifiers only).
        #[arg(long)]
        node: Option<usize>,
    },
    /// Check whether a graph is a model of a program.
    CheckGlp { program: PathBuf, graph: PathBuf },
    /// Check the DGLP side condition of a program.
    IsDglp { program: PathBuf },
    /// Search for a PCP solution of bounded length.
    PcpSolve {
        pcp: PathBuf,
        #[arg(long)]
        max_len: usize,
    },
    /// Reduce a PCP instance to a DGLP program.
    PcpReduce {
        pcp: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Encode a PCP solution as a labelled graph.
    PcpEncode {
        pcp: PathBuf,
        /// Comma-separated 1-based tile indices.
        #[arg(long, value_delimiter = ',')]
        solution: Vec<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compile a DGLP program into a graph-classifier MPNN.
    CompileDglp {
        program: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Add a constant 0 second output.
        #[arg(long)]
        leq_variant: bool,
    },
    /// Decide output reachability of a ReLU network.
    NnReach {
        net: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Verify a node-classifier query.
    VerifyNode {
        query: PathBuf,
        /// Witness file; defaults to `<query>.witness.json`.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Unroll a graph around a node into a tree.
    Unroll {
        graph: PathBuf,
        #[arg(long)]
        node: usize,
        #[arg(long)]
        depth: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// List bounded-degree tree shapes as parent arrays.
    EnumerateTrees {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        depth: usize,
    },
    /// Run the full PCP pipeline on the running example.
    DemoP0 {
        /// Directory for the intermediate files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::EvalMpnn { .. } => "eval-mpnn",
            Command::CheckGlp { .. } => "check-glp",
            Command::IsDglp { .. } => "is-dglp",
            Command::PcpSolve { .. } => "pcp-solve",
            Command::PcpReduce { .. } => "pcp-reduce",
            Command::PcpEncode { .. } => "pcp-encode",
            Command::CompileDglp { .. } => "compile-dglp",
            Command::NnReach { .. } => "nn-reach",
            Command::VerifyNode { .. } => "verify-node",
            Command::Unroll { .. } => "unroll",
            Command::EnumerateTrees { .. } => "enumerate-trees",
            Command::DemoP0 { .. } => "demo-p0",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut ctx = commands::Context::new(cli.jobs.max(1));
    let result = commands::run(&cli.command, &mut ctx);
    let (code, outcome) = match &result {
        Ok(o) => {
            for line in &o.lines {
                println!("{line}");
            }
            (if o.positive { 0 } else { 1 }, o.outcome.clone())
        }
        Err(e) => {
            eprintln!("error: {e}");
            (2, "ERROR".to_string())
        }
    };
    if let Some(path) = &cli.report {
        let report = CommandReport {
            command: cli.command.name().to_string(),
            inputs_digest: ctx.digest(),
            outcome,
            witness_paths: ctx.witnesses.iter().map(|p| p.display().to_string()).collect(),
            wall_time_ms: start.elapsed().as_millis() as u64,
            jobs: cli.jobs,
            seed: cli.seed,
            nondeterministic: report::NONDETERMINISTIC.to_vec(),
        };
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
