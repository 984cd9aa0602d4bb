//! Exact-arithmetic MPNNs, graph linear programs, and the reductions and
//! verification procedures connecting them.

pub mod error;
pub mod graph;
pub mod rational;
pub mod relu;
pub mod mpnn;
pub mod glp;
pub mod pcp;
pub mod compile;
pub mod reach;
pub mod verify;
pub mod io;

pub use compile::{compile, compile_leq_variant, CompiledProgram, DimensionMap};
pub use error::{Error, Result};
pub use glp::{DglpProgram, GlpProgram, GraphCondition, NodeCondition};
pub use graph::{LabeledGraph, RootedTree};
pub use mpnn::{ClassifierKind, Mpnn};
pub use pcp::{PcpInstance, VarLayout};
pub use rational::Rational;
pub use reach::{LinearConstraint, Polytope, ReachQuery, ReachResult, Relation};
pub use relu::{Layer, ReluNetwork, SparseMatrix};
pub use verify::{BoundedInputSpec, VerifyOutcome, Witness};
