//! Exact-rational feed-forward ReLU networks, the circuit builder used to
//! assemble them, and the gadget constructors.

mod algebra;
mod circuit;
mod gadget;
mod network;

pub use algebra::{add_outputs, compose_sequential, precompose_affine, stack_parallel};
pub use circuit::{Affine, Circuit, Signal};
pub use gadget::{
    gadget_disjunction, gadget_disjunction_certified, gadget_eq, gadget_identity, gadget_in_set,
    gadget_interval, gadget_leq,
};
pub use network::{GadgetBound, Layer, ReluNetwork, SparseMatrix};
