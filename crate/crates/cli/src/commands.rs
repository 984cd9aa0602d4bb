use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use mpnnv_core::glp::{check_program, first_violating_node};
use mpnnv_core::io::{self, GraphFile, MpnnFile, NetworkFile, PolytopeFile, ProgramFile, QueryFile, QueryMode};
use mpnnv_core::pcp::{check_solution, encode_solution, reduce_to_dglp, solve_bounded};
use mpnnv_core::rational::format_vec;
use mpnnv_core::reach::{solve, ReachQuery, ReachResult};
use mpnnv_core::verify::{enumerate_trees, verify_arp_jobs, verify_orp_jobs};
use mpnnv_core::{compile, compile_leq_variant, graph, DimensionMap, ClassifierKind, Error, LabeledGraph, PcpInstance};

use crate::Command;

pub struct Context {
    jobs: usize,
    hasher: Sha256,
    pub witnesses: Vec<PathBuf>,
}

impl Context {
    pub fn new(jobs: usize) -> Self {
        Context { jobs, hasher: Sha256::new(), witnesses: Vec::new() }
    }

    pub fn digest(&self) -> String {
        format!("{:x}", self.hasher.clone().finalize())
    }

    fn read<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.hasher.update(text.as_bytes());
        io::from_json(&text).map_err(|e| CliError::at(path, e))
    }

    fn write<T: Serialize>(&self, path: &Path, value: &T) -> Result<(), CliError> {
        std::fs::write(path, io::to_json(value)).map_err(|e| CliError::io(path, e))
    }
}

/// A failure tied to the file it arose from, if any.
#[derive(Debug)]
pub struct CliError {
    path: Option<PathBuf>,
    msg: String,
}

impl CliError {
    fn at(path: &Path, e: Error) -> Self {
        CliError { path: Some(path.to_path_buf()), msg: e.to_string() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError { path: Some(path.to_path_buf()), msg: e.to_string() }
    }

    fn plain(e: Error) -> Self {
        CliError { path: None, msg: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.path {
            Some(p) => write!(f, "{}: {}", p.display(), self.msg),
            None => f.write_str(&self.msg),
        }
    }
}

/// Printed lines plus whether the outcome is positive (exit 0) or
/// negative (exit 1).
pub struct Outcome {
    pub lines: Vec<String>,
    pub outcome: String,
    pub positive: bool,
}

impl Outcome {
    fn new(outcome: impl Into<String>, positive: bool, lines: Vec<String>) -> Self {
        Outcome { lines, outcome: outcome.into(), positive }
    }
}

fn show(v: &[mpnnv_core::Rational]) -> String {
    format_vec(v).join(" ")
}

fn show_indices(ix: &[usize]) -> String {
    let parts: Vec<String> = ix.iter().map(usize::to_string).collect();
    format!("({})", parts.join(","))
}

pub fn run(cmd: &Command, ctx: &mut Context) -> Result<Outcome, CliError> {
    match cmd {
        Command::EvalMpnn { mpnn, graph, node } => {
            let m = ctx.read::<MpnnFile>(mpnn).and_then(|f| io::mpnn_from_file(&f).map_err(|e| CliError::at(mpnn, e)))?;
            let g = read_graph(ctx, graph)?;
            let out = match (m.kind(), node) {
                (ClassifierKind::Graph, None) => m.eval_graph(&g),
                (ClassifierKind::Node, Some(v)) => m.eval_node(&g, *v),
                (ClassifierKind::Node, None) => {
                    return Err(CliError::plain(Error::Format("node-classifiers need --node".into())))
                }
                (ClassifierKind::Graph, Some(_)) => {
                    return Err(CliError::plain(Error::KindMismatch { expected: "node", found: "graph" }))
                }
            }
            .map_err(CliError::plain)?;
            let s = show(&out);
            Ok(Outcome::new(s.clone(), true, vec![s]))
        }
        Command::CheckGlp { program, graph } => {
            let (p, _) = read_program(ctx, program)?;
            let g = read_graph(ctx, graph)?;
            if check_program(&g, &p.base).map_err(CliError::plain)? {
                return Ok(Outcome::new("MODEL", true, vec!["MODEL".into()]));
            }
            let detail = match first_violating_node(&g, &p.base.phi) {
                Some(v) => format!("NOT A MODEL: node {v} violates the node condition"),
                None => "NOT A MODEL: the graph condition fails".to_string(),
            };
            Ok(Outcome::new("NOT A MODEL", false, vec![detail]))
        }
        Command::IsDglp { program } => {
            let (p, _) = read_program(ctx, program)?;
            Ok(if p.is_dglp() {
                Outcome::new("DGLP", true, vec!["DGLP".into()])
            } else {
                Outcome::new("NOT DGLP", false, vec!["NOT DGLP".into()])
            })
        }
        Command::PcpSolve { pcp, max_len } => {
            let p = read_pcp(ctx, pcp)?;
            Ok(match solve_bounded(&p, *max_len) {
                Some(ix) => {
                    let s = show_indices(&ix);
                    Outcome::new(s.clone(), true, vec![s])
                }
                None => Outcome::new("NO SOLUTION", false, vec![format!("NO SOLUTION of length <= {max_len}")]),
            })
        }
        Command::PcpReduce { pcp, output } => {
            let p = read_pcp(ctx, pcp)?;
            let (prog, layout) = reduce_to_dglp(&p);
            ctx.write(output, &io::program_to_file(&prog, layout.names.names()))?;
            let line = format!("{} variables, {} discrete", prog.num_vars(), prog.discrete.len());
            Ok(Outcome::new("REDUCED", true, vec![line]))
        }
        Command::PcpEncode { pcp, solution, output } => {
            let p = read_pcp(ctx, pcp)?;
            let g = encode_solution(&p, solution).map_err(CliError::plain)?;
            ctx.write(output, &io::graph_to_file(&g))?;
            let line = format!("{} nodes, {} edges, label dimension {}", g.node_count(), g.edge_count(), g.label_dim());
            Ok(Outcome::new("ENCODED", true, vec![line]))
        }
        Command::CompileDglp { program, output, leq_variant } => {
            let (p, names) = read_program(ctx, program)?;
            let mpnn = if *leq_variant { compile_leq_variant(&p) } else { compile(&p).map(|c| c.mpnn) }
                .map_err(|e| CliError::at(program, e))?;
            ctx.write(output, &io::mpnn_to_file(&mpnn))?;
            let side = sidecar(output, "dims");
            ctx.write(&side, &DimensionMap::new(p.num_vars()).with_names(&names))?;
            let lines = vec![format!("widths {:?}", mpnn.widths()), format!("dimension map written to {}", side.display())];
            Ok(Outcome::new("COMPILED", true, lines))
        }
        Command::NnReach { net, input, output, witness } => {
            let n = ctx.read::<NetworkFile>(net).and_then(|f| io::network_from_file(&f).map_err(|e| CliError::at(net, e)))?;
            let i = read_polytope(ctx, input)?;
            let o = read_polytope(ctx, output)?;
            let q = ReachQuery { net: n, input: i, output: o };
            match solve(&q).map_err(CliError::plain)? {
                ReachResult::Sat(x) => {
                    let y = q.net.eval(&x).map_err(CliError::plain)?;
                    let mut lines = vec!["SAT".into(), format!("input {}", show(&x)), format!("output {}", show(&y))];
                    if let Some(path) = witness {
                        let body = serde_json::json!({ "input": format_vec(&x), "output": format_vec(&y) });
                        ctx.write(path, &body)?;
                        ctx.witnesses.push(path.clone());
                        lines.push(format!("witness written to {}", path.display()));
                    }
                    Ok(Outcome::new("SAT", true, lines))
                }
                ReachResult::Unsat => Ok(Outcome::new("UNSAT", false, vec!["UNSAT".into()])),
            }
        }
        Command::VerifyNode { query, witness } => {
            let q = ctx.read::<QueryFile>(query)?;
            let (spec, outputs) = io::query_specs(&q).map_err(|e| CliError::at(query, e))?;
            let mpnn_path = query.parent().unwrap_or(Path::new("")).join(&q.mpnn);
            let m = ctx
                .read::<MpnnFile>(&mpnn_path)
                .and_then(|f| io::mpnn_from_file(&f).map_err(|e| CliError::at(&mpnn_path, e)))?;
            let result = match q.mode {
                QueryMode::Orp => verify_orp_jobs(&m, &spec, &outputs, ctx.jobs),
                QueryMode::Arp => verify_arp_jobs(&m, &spec, &outputs[0], ctx.jobs),
            }
            .map_err(|e| CliError::at(query, e))?;
            let label = result.label();
            let mut lines = vec![label.to_string()];
            if let Some(w) = result.witness() {
                let path = witness.clone().unwrap_or_else(|| sidecar(query, "witness"));
                let body = serde_json::json!({
                    "graph": io::graph_to_file(&w.tree.graph),
                    "root": w.tree.root,
                    "output": format_vec(&w.output),
                });
                ctx.write(&path, &body)?;
                lines.push(format!("output {}", show(&w.output)));
                lines.push(format!("witness written to {}", path.display()));
                ctx.witnesses.push(path);
            }
            let positive = matches!(label, "REACHABLE" | "HOLDS");
            Ok(Outcome::new(label, positive, lines))
        }
        Command::Unroll { graph: path, node, depth, output } => {
            let g = read_graph(ctx, path)?;
            let t = graph::unroll(&g, *node, *depth).map_err(|e| CliError::at(path, e))?;
            ctx.write(output, &io::graph_to_file(&t.graph))?;
            let line = format!("{} tree nodes, depth {}", t.node_count(), t.depth);
            Ok(Outcome::new("UNROLLED", true, vec![line]))
        }
        Command::EnumerateTrees { degree, depth } => {
            let trees = enumerate_trees(*degree, *depth);
            let mut lines = vec![format!("{} shapes", trees.len())];
            for t in &trees {
                let parents: Vec<String> =
                    t.parent.iter().map(|p| p.map_or_else(|| "-".to_string(), |p| p.to_string())).collect();
                lines.push(parents.join(" "));
            }
            Ok(Outcome::new(format!("{} shapes", trees.len()), true, lines))
        }
        Command::DemoP0 { out_dir } => demo_p0(ctx, out_dir.as_deref()),
    }
}

fn demo_p0(ctx: &mut Context, out_dir: Option<&Path>) -> Result<Outcome, CliError> {
    let p = PcpInstance::p0();
    let mut lines = Vec::new();
    let ix = solve_bounded(&p, 4).ok_or_else(|| CliError::plain(Error::InvalidSolution("P0 has no solution of length <= 4".into())))?;
    lines.push(format!("pcp-solve     {}", show_indices(&ix)));
    debug_assert!(check_solution(&p, &ix).unwrap_or(false));
    let g = encode_solution(&p, &ix).map_err(CliError::plain)?;
    lines.push(format!("pcp-encode    {} nodes, {} edges", g.node_count(), g.edge_count()));
    let (prog, layout) = reduce_to_dglp(&p);
    lines.push(format!("pcp-reduce    {} variables", prog.num_vars()));
    let model = check_program(&g, &prog.base).map_err(CliError::plain)?;
    lines.push(format!("check-glp     {}", if model { "MODEL" } else { "NOT A MODEL" }));
    let compiled = compile(&prog).map_err(CliError::plain)?;
    lines.push(format!("compile-dglp  widths {:?}", compiled.mpnn.widths()));
    let out = compiled.mpnn.eval_graph(&g).map_err(CliError::plain)?;
    lines.push(format!("eval-mpnn     {}", show(&out)));
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        ctx.write(&dir.join("p0.json"), &p)?;
        ctx.write(&dir.join("encoded.json"), &io::graph_to_file(&g))?;
        ctx.write(&dir.join("program.json"), &io::program_to_file(&prog, layout.names.names()))?;
        ctx.write(&dir.join("compiled.json"), &io::mpnn_to_file(&compiled.mpnn))?;
        ctx.write(&dir.join("compiled.dims.json"), &compiled.layout.clone().with_names(layout.names.names()))?;
    }
    let ok = model && out.len() == 1 && out[0] == mpnnv_core::rational::zero();
    Ok(Outcome::new(if ok { "OK" } else { "FAILED" }, ok, lines))
}

/// `dir/stem.json` becomes `dir/stem.<tag>.json`.
fn sidecar(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}.json"))
}

fn read_graph(ctx: &mut Context, path: &Path) -> Result<LabeledGraph, CliError> {
    let f = ctx.read::<GraphFile>(path)?;
    io::graph_from_file(&f).map_err(|e| CliError::at(path, e))
}

fn read_program(ctx: &mut Context, path: &Path) -> Result<(mpnnv_core::DglpProgram, Vec<String>), CliError> {
    let f = ctx.read::<ProgramFile>(path)?;
    let p = io::program_from_file(&f).map_err(|e| CliError::at(path, e))?;
    Ok((p, io::program_names(&f)))
}

fn read_pcp(ctx: &mut Context, path: &Path) -> Result<PcpInstance, CliError> {
    let f = ctx.read::<PcpInstance>(path)?;
    PcpInstance::new(f.tiles).map_err(|e| CliError::at(path, e))
}

fn read_polytope(ctx: &mut Context, path: &Path) -> Result<mpnnv_core::Polytope, CliError> {
    let f = ctx.read::<PolytopeFile>(path)?;
    io::polytope_from_file(&f).map_err(|e| CliError::at(path, e))
}
