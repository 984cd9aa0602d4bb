//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mpnnv_core::rational::{int, rat};
use mpnnv_core::{ClassifierKind, Layer, Mpnn, Polytope, ReluNetwork, SparseMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dense(rng: &mut ChaCha8Rng, rows: usize, cols: usize, relu: bool) -> Layer {
    let mut w = || rat(rng.gen_range(-3..=3), rng.gen_range(1..=2));
    let m = (0..rows).map(|_| (0..cols).map(|_| w()).collect()).collect();
    let b = (0..rows).map(|_| w()).collect();
    Layer::new(SparseMatrix::from_dense(cols, m).unwrap(), b, relu).unwrap()
}

/// A fully connected network `input -> hidden... -> output` with ReLU on
/// every hidden layer.
pub fn random_net(rng: &mut ChaCha8Rng, input: usize, hidden: &[usize], output: usize) -> ReluNetwork {
    let mut dims = vec![input];
    dims.extend_from_slice(hidden);
    dims.push(output);
    let layers = dims.windows(2).enumerate().map(|(i, w)| dense(rng, w[1], w[0], i + 2 < dims.len())).collect();
    ReluNetwork::new(input, layers).unwrap()
}

/// A node-classifier with `layers` layers of width `width`.
pub fn random_mpnn(rng: &mut ChaCha8Rng, dim: usize, layers: usize, width: usize) -> Mpnn {
    let mut d = dim;
    let mut nets = Vec::new();
    for _ in 0..layers {
        nets.push(random_net(rng, 2 * d, &[width], width));
        d = width;
    }
    let readout = random_net(rng, d, &[], 1);
    Mpnn::new(ClassifierKind::Node, dim, nets, readout).unwrap()
}

pub fn unit_box(dim: usize) -> Polytope {
    Polytope::cube(dim, &int(-1), &int(1))
}
