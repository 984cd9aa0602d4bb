//! Message passing networks with sum aggregation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::rational::Rational;
use crate::relu::ReluNetwork;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Graph,
    Node,
}

impl ClassifierKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Graph => "graph",
            ClassifierKind::Node => "node",
        }
    }
}

/// `x_v^i = N_i(x_v^{i-1}, sum over Neigh(v) of x^{i-1})`, followed by a
/// readout on either the summed final vectors or one node's final vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mpnn {
    kind: ClassifierKind,
    label_dim: usize,
    layers: Vec<ReluNetwork>,
    readout: ReluNetwork,
}

/// `states[i][v]` is `x_v^i`; `states[0]` are the labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerTrace {
    pub states: Vec<Vec<Vec<Rational>>>,
}

impl LayerTrace {
    pub fn last(&self) -> &[Vec<Rational>] {
        self.states.last().expect("trace holds the input layer")
    }
}

impl Mpnn {
    pub fn new(kind: ClassifierKind, label_dim: usize, layers: Vec<ReluNetwork>, readout: ReluNetwork) -> Result<Self> {
        let mut dim = label_dim;
        for layer in &layers {
            if layer.input_dim() != 2 * dim {
                return Err(Error::DimensionMismatch {
                    context: "combination input",
                    expected: 2 * dim,
                    found: layer.input_dim(),
                });
            }
            dim = layer.output_dim();
        }
        if readout.input_dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "readout input",
                expected: dim,
                found: readout.input_dim(),
            });
        }
        Ok(Mpnn {
            kind,
            label_dim,
            layers,
            readout,
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn label_dim(&self) -> usize {
        self.label_dim
    }

    pub fn layers(&self) -> &[ReluNetwork] {
        &self.layers
    }

    pub fn readout(&self) -> &ReluNetwork {
        &self.readout
    }

    pub fn output_dim(&self) -> usize {
        self.readout.output_dim()
    }

    /// Width of `x^i` for `i = 0..=k`.
    pub fn widths(&self) -> Vec<usize> {
        std::iter::once(self.label_dim)
            .chain(self.layers.iter().map(ReluNetwork::output_dim))
            .collect()
    }

    pub fn trace(&self, g: &LabeledGraph) -> Result<LayerTrace> {
        if g.label_dim() != self.label_dim {
            return Err(Error::DimensionMismatch {
                context: "graph label",
                expected: self.label_dim,
                found: g.label_dim(),
            });
        }
        let mut states = vec![g.labels().to_vec()];
        for (i, layer) in self.layers.iter().enumerate() {
            let prev = &states[i];
            let width = prev.first().map_or(0, Vec::len);
            let mut next = Vec::with_capacity(prev.len());
            for v in 0..g.node_count() {
                let mut input = prev[v].clone();
                let mut agg = vec![Rational::default(); width];
                for &u in g.adj(v) {
                    for (a, x) in agg.iter_mut().zip(&prev[u]) {
                        *a += x;
                    }
                }
                input.extend(agg);
                next.push(layer.eval(&input)?);
            }
            states.push(next);
        }
        Ok(LayerTrace { states })
    }

    pub fn eval_graph(&self, g: &LabeledGraph) -> Result<Vec<Rational>> {
        self.expect_kind(ClassifierKind::Graph)?;
        let trace = self.trace(g)?;
        let width = self.readout.input_dim();
        let mut sum = vec![Rational::default(); width];
        for x in trace.last() {
            for (s, xi) in sum.iter_mut().zip(x) {
                *s += xi;
            }
        }
        self.readout.eval(&sum)
    }

    pub fn eval_node(&self, g: &LabeledGraph, v: usize) -> Result<Vec<Rational>> {
        self.expect_kind(ClassifierKind::Node)?;
        g.neighbors(v)?;
        let trace = self.trace(g)?;
        self.readout.eval(&trace.last()[v])
    }

    fn expect_kind(&self, kind: ClassifierKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::KindMismatch {
                expected: kind.name(),
                found: self.kind.name(),
            });
        }
        Ok(())
    }
}
