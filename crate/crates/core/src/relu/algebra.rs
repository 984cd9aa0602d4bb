//! Combinators on networks. Each one imports its operands into a fresh
//! circuit and lowers the result, so shared subexpressions are merged.

use super::circuit::{Affine, Circuit};
use super::network::{ReluNetwork, SparseMatrix};
use crate::error::{Error, Result};
use crate::rational::Rational;

fn mismatch(context: &'static str, expected: usize, found: usize) -> Error {
    Error::DimensionMismatch { context, expected, found }
}

/// `b` after `a`.
pub fn compose_sequential(a: &ReluNetwork, b: &ReluNetwork) -> Result<ReluNetwork> {
    if a.output_dim() != b.input_dim() {
        return Err(mismatch("sequential composition", a.output_dim(), b.input_dim()));
    }
    let mut c = Circuit::new(a.input_dim());
    let xs = c.inputs();
    let mid = c.import(a, &xs);
    let out = c.import(b, &mid);
    Ok(c.lower(&out).with_bounds(b.bounds().to_vec()))
}

/// Runs every network on the same input and concatenates their outputs.
pub fn stack_parallel(nets: &[ReluNetwork]) -> Result<ReluNetwork> {
    let dim = nets.first().map_or(0, ReluNetwork::input_dim);
    let mut c = Circuit::new(dim);
    let xs = c.inputs();
    let mut out = Vec::new();
    let mut bounds = Vec::new();
    for n in nets {
        if n.input_dim() != dim {
            return Err(mismatch("parallel stack", dim, n.input_dim()));
        }
        out.extend(c.import(n, &xs));
        bounds.extend(n.bounds().iter().cloned());
    }
    Ok(c.lower(&out).with_bounds(bounds))
}

/// `x -> net(matrix * x + bias)`.
pub fn precompose_affine(net: &ReluNetwork, matrix: &SparseMatrix, bias: &[Rational]) -> Result<ReluNetwork> {
    if matrix.row_count() != net.input_dim() {
        return Err(mismatch("affine pre-map rows", net.input_dim(), matrix.row_count()));
    }
    if bias.len() != matrix.row_count() {
        return Err(mismatch("affine pre-map bias", matrix.row_count(), bias.len()));
    }
    let mut c = Circuit::new(matrix.col_count());
    let pre: Vec<Affine> = matrix
        .rows()
        .iter()
        .zip(bias)
        .map(|(row, b)| Affine::linear(row.iter().map(|(i, w)| (*i, w)), b.clone()))
        .collect();
    let out = c.import(net, &pre);
    Ok(c.lower(&out).with_bounds(net.bounds().to_vec()))
}

/// Pointwise sum of networks with identical signatures; bounds add.
pub fn add_outputs(nets: &[ReluNetwork]) -> Result<ReluNetwork> {
    let first = nets
        .first()
        .ok_or_else(|| Error::InvalidGadget("sum of no networks".into()))?;
    let (din, dout) = (first.input_dim(), first.output_dim());
    let mut c = Circuit::new(din);
    let xs = c.inputs();
    let mut sum = vec![Affine::default(); dout];
    let mut bounds: Vec<Option<Rational>> = vec![Some(Rational::default()); dout];
    for n in nets {
        if n.input_dim() != din {
            return Err(mismatch("sum input", din, n.input_dim()));
        }
        if n.output_dim() != dout {
            return Err(mismatch("sum output", dout, n.output_dim()));
        }
        for (i, o) in c.import(n, &xs).into_iter().enumerate() {
            sum[i] = std::mem::take(&mut sum[i]) + o;
            bounds[i] = match (bounds[i].take(), &n.bounds()[i]) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
        }
    }
    Ok(c.lower(&sum).with_bounds(bounds))
}
