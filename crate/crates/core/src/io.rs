//! JSON file formats. Rationals are canonical strings (`"p/q"` or `"p"`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glp::{parse_graph_condition, parse_node_condition, DglpProgram};
use crate::graph::LabeledGraph;
use crate::mpnn::{ClassifierKind, Mpnn};
use crate::rational::{format_rational, format_vec, parse_rational, parse_vec, Rational};
use crate::reach::{LinearConstraint, Polytope, Relation};
use crate::relu::{Layer, ReluNetwork, SparseMatrix};
use crate::verify::BoundedInputSpec;

/// Networks with more weight entries than this are written sparsely.
const DENSE_LIMIT: usize = 4096;

#[derive(Serialize, Deserialize)]
pub struct GraphFile {
    pub n_labels: usize,
    pub nodes: usize,
    pub edges: Vec<[usize; 2]>,
    pub labels: Vec<Vec<String>>,
}

pub fn graph_to_file(g: &LabeledGraph) -> GraphFile {
    GraphFile {
        n_labels: g.label_dim(),
        nodes: g.node_count(),
        edges: g.edges().map(|(u, v)| [u, v]).collect(),
        labels: g.labels().iter().map(|l| format_vec(l)).collect(),
    }
}

pub fn graph_from_file(f: &GraphFile) -> Result<LabeledGraph> {
    if f.labels.len() != f.nodes {
        return Err(Error::DimensionMismatch { context: "graph labels", expected: f.nodes, found: f.labels.len() });
    }
    let labels = f.labels.iter().map(|l| parse_vec(l)).collect::<Result<Vec<_>>>()?;
    LabeledGraph::new(f.n_labels, labels, f.edges.iter().map(|e| (e[0], e[1])))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsFile {
    Dense(Vec<Vec<String>>),
    Sparse { rows: usize, cols: usize, entries: Vec<(usize, usize, String)> },
}

#[derive(Serialize, Deserialize)]
pub struct LayerFile {
    pub w: WeightsFile,
    pub b: Vec<String>,
    pub relu: bool,
}

#[derive(Serialize, Deserialize)]
pub struct NetworkFile {
    pub input_dim: usize,
    pub layers: Vec<LayerFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<Option<String>>>,
}

pub fn network_to_file(net: &ReluNetwork) -> NetworkFile {
    let dense = net.nonzeros() <= DENSE_LIMIT;
    let layers = net
        .layers()
        .iter()
        .map(|l| {
            let w = if dense {
                WeightsFile::Dense(l.weights.to_dense().iter().map(|r| format_vec(r)).collect())
            } else {
                let entries = l
                    .weights
                    .rows()
                    .iter()
                    .enumerate()
                    .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, format_rational(v))))
                    .collect();
                WeightsFile::Sparse { rows: l.output_dim(), cols: l.input_dim(), entries }
            };
            LayerFile { w, b: format_vec(&l.bias), relu: l.relu }
        })
        .collect();
    let bounds = net.bounds().iter().any(Option::is_some).then(|| {
        net.bounds().iter().map(|b| b.as_ref().map(format_rational)).collect()
    });
    NetworkFile { input_dim: net.input_dim(), layers, bounds }
}

pub fn network_from_file(f: &NetworkFile) -> Result<ReluNetwork> {
    let mut cols = f.input_dim;
    let mut layers = Vec::with_capacity(f.layers.len());
    for l in &f.layers {
        let weights = match &l.w {
            WeightsFile::Dense(rows) => {
                let dense = rows.iter().map(|r| parse_vec(r)).collect::<Result<Vec<_>>>()?;
                SparseMatrix::from_dense(cols, dense)?
            }
            WeightsFile::Sparse { rows, cols: c, entries } => {
                if *c != cols {
                    return Err(Error::DimensionMismatch { context: "layer columns", expected: cols, found: *c });
                }
                let mut out = vec![Vec::new(); *rows];
                for (r, col, v) in entries {
                    let row = out.get_mut(*r).ok_or_else(|| Error::Format(format!("entry row {r} out of range")))?;
                    row.push((*col, parse_rational(v)?));
                }
                SparseMatrix::from_rows(cols, out)?
            }
        };
        let layer = Layer::new(weights, parse_vec(&l.b)?, l.relu)?;
        cols = layer.output_dim();
        layers.push(layer);
    }
    let net = ReluNetwork::new(f.input_dim, layers)?;
    Ok(match &f.bounds {
        None => net,
        Some(b) => {
            let bounds = b.iter().map(|x| x.as_deref().map(parse_rational).transpose()).collect::<Result<Vec<_>>>()?;
            net.with_bounds(bounds)
        }
    })
}

#[derive(Serialize, Deserialize)]
pub struct MpnnFile {
    pub kind: ClassifierKind,
    pub label_dim: usize,
    pub layers: Vec<NetworkFile>,
    pub readout: NetworkFile,
}

pub fn mpnn_to_file(m: &Mpnn) -> MpnnFile {
    MpnnFile {
        kind: m.kind(),
        label_dim: m.label_dim(),
        layers: m.layers().iter().map(network_to_file).collect(),
        readout: network_to_file(m.readout()),
    }
}

pub fn mpnn_from_file(f: &MpnnFile) -> Result<Mpnn> {
    let layers = f.layers.iter().map(network_from_file).collect::<Result<Vec<_>>>()?;
    Mpnn::new(f.kind, f.label_dim, layers, network_from_file(&f.readout)?)
}

/// `phi` holds the program's own node condition; for a DGLP this is the
/// condition before the discretisation conjunct is added.
#[derive(Serialize, Deserialize)]
pub struct ProgramFile {
    pub num_vars: usize,
    pub phi: String,
    pub psi: String,
    #[serde(default)]
    pub discrete: BTreeMap<String, Vec<u64>>,
    #[serde(default)]
    pub names: BTreeMap<String, String>,
}

pub fn program_to_file(p: &DglpProgram, names: &[String]) -> ProgramFile {
    ProgramFile {
        num_vars: p.num_vars(),
        phi: p.phi_prime.to_string(),
        psi: p.psi().to_string(),
        discrete: p.discrete.iter().map(|(i, m)| (i.to_string(), m.clone())).collect(),
        names: names.iter().enumerate().map(|(i, n)| (i.to_string(), n.clone())).collect(),
    }
}

pub fn program_from_file(f: &ProgramFile) -> Result<DglpProgram> {
    let phi = parse_node_condition(&f.phi)?;
    let psi = parse_graph_condition(&f.psi)?;
    let mut discrete = BTreeMap::new();
    for (k, m) in &f.discrete {
        let i: usize = k.parse().map_err(|_| Error::Format(format!("discrete key `{k}` is not an index")))?;
        discrete.insert(i, m.clone());
    }
    DglpProgram::new(f.num_vars, phi, psi, discrete)
}

/// Names for every variable, `x<i>` where the file gives none.
pub fn program_names(f: &ProgramFile) -> Vec<String> {
    (0..f.num_vars).map(|i| f.names.get(&i.to_string()).cloned().unwrap_or_else(|| format!("x{i}"))).collect()
}

#[derive(Serialize, Deserialize)]
pub struct ConstraintFile {
    pub a: Vec<String>,
    pub rel: Relation,
    pub b: String,
}

#[derive(Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    pub constraints: Vec<ConstraintFile>,
}

pub fn polytope_to_file(p: &Polytope) -> PolytopeFile {
    PolytopeFile {
        dim: p.dim,
        constraints: p
            .constraints
            .iter()
            .map(|c| ConstraintFile { a: format_vec(&c.a), rel: c.rel, b: format_rational(&c.b) })
            .collect(),
    }
}

pub fn polytope_from_file(f: &PolytopeFile) -> Result<Polytope> {
    let mut p = Polytope::new(f.dim);
    for c in &f.constraints {
        p.push(LinearConstraint { a: parse_vec(&c.a)?, b: parse_rational(&c.b)?, rel: c.rel })?;
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    Orp,
    Arp,
}

#[derive(Serialize, Deserialize)]
pub struct QueryFile {
    pub mpnn: String,
    pub degree: usize,
    pub radius: usize,
    #[serde(default)]
    pub labels: BTreeMap<String, PolytopeFile>,
    pub output: Vec<PolytopeFile>,
    pub mode: QueryMode,
}

/// The input specification and output polytopes of a query file.
pub fn query_specs(f: &QueryFile) -> Result<(BoundedInputSpec, Vec<Polytope>)> {
    let mut spec = BoundedInputSpec { degree: f.degree, radius: f.radius, labels: BTreeMap::new(), default: None };
    for (k, p) in &f.labels {
        let p = polytope_from_file(p)?;
        if k == "default" {
            spec.default = Some(p);
        } else {
            let d: usize = k.parse().map_err(|_| Error::Format(format!("label key `{k}` is neither a distance nor `default`")))?;
            spec.labels.insert(d, p);
        }
    }
    let out = f.output.iter().map(polytope_from_file).collect::<Result<Vec<_>>>()?;
    if f.mode == QueryMode::Arp && out.len() != 1 {
        return Err(Error::Format(format!("arp queries take exactly one output polytope, got {}", out.len())));
    }
    Ok((spec, out))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types serialise")
}

pub fn format_point(x: &[Rational]) -> Vec<String> {
    format_vec(x)
}
