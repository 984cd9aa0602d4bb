use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{relu, Rational};

/// Row-major sparse matrix; each row lists `(column, value)` with distinct,
/// ascending columns and no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    cols: usize,
    rows: Vec<Vec<(usize, Rational)>>,
}

impl SparseMatrix {
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, Rational)>>) -> Result<Self> {
        let mut clean = Vec::with_capacity(rows.len());
        for row in rows {
            let mut row: Vec<(usize, Rational)> = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            row.sort_by_key(|(c, _)| *c);
            let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(row.len());
            for (c, v) in row {
                if c >= cols {
                    return Err(Error::DimensionMismatch {
                        context: "sparse matrix column",
                        expected: cols,
                        found: c + 1,
                    });
                }
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            clean.push(merged);
        }
        Ok(SparseMatrix { cols, rows: clean })
    }

    pub fn from_dense(cols: usize, dense: Vec<Vec<Rational>>) -> Result<Self> {
        let mut rows = Vec::with_capacity(dense.len());
        for r in dense {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    context: "dense matrix row",
                    expected: cols,
                    found: r.len(),
                });
            }
            rows.push(r.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect());
        }
        Ok(SparseMatrix { cols, rows })
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        self.rows
            .iter()
            .map(|row| {
                let mut d = vec![Rational::zero(); self.cols];
                for (c, v) in row {
                    d[*c] = v.clone();
                }
                d
            })
            .collect()
    }

    pub fn rows(&self) -> &[Vec<(usize, Rational)>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(c, w)| w * &x[*c]).sum())
            .collect()
    }
}

/// One affine map followed by an optional ReLU.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub weights: SparseMatrix,
    pub bias: Vec<Rational>,
    pub relu: bool,
}

impl Layer {
    pub fn new(weights: SparseMatrix, bias: Vec<Rational>, relu: bool) -> Result<Self> {
        if bias.len() != weights.row_count() {
            return Err(Error::DimensionMismatch {
                context: "layer bias",
                expected: weights.row_count(),
                found: bias.len(),
            });
        }
        Ok(Layer { weights, bias, relu })
    }

    pub fn input_dim(&self) -> usize {
        self.weights.col_count()
    }

    pub fn output_dim(&self) -> usize {
        self.bias.len()
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        let mut y = self.weights.mul_vec(x);
        for (yi, bi) in y.iter_mut().zip(&self.bias) {
            *yi += bi;
            if self.relu {
                *yi = relu(yi);
            }
        }
        y
    }
}

/// Certified upper bound of a single-output network; `None` when no
/// certificate is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetBound {
    pub upper: Option<Rational>,
}

/// A feed-forward network: affine layers, each optionally ReLU-activated.
///
/// A network with no layers is the identity on its input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReluNetwork {
    input_dim: usize,
    layers: Vec<Layer>,
    /// Per-output upper bounds recorded by the gadget constructors.
    bounds: Vec<Option<Rational>>,
}

impl ReluNetwork {
    pub fn new(input_dim: usize, layers: Vec<Layer>) -> Result<Self> {
        let mut dim = input_dim;
        for layer in &layers {
            if layer.input_dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "layer chaining",
                    expected: dim,
                    found: layer.input_dim(),
                });
            }
            dim = layer.output_dim();
        }
        Ok(ReluNetwork {
            input_dim,
            layers,
            bounds: vec![None; dim],
        })
    }

    pub fn identity(dim: usize) -> Self {
        ReluNetwork {
            input_dim: dim,
            layers: Vec::new(),
            bounds: vec![None; dim],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, Layer::output_dim)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Number of ReLU-activated units.
    pub fn relu_count(&self) -> usize {
        self.layers.iter().filter(|l| l.relu).map(Layer::output_dim).sum()
    }

    pub fn nonzeros(&self) -> usize {
        self.layers.iter().map(|l| l.weights.nonzeros()).sum()
    }

    pub fn with_bounds(mut self, bounds: Vec<Option<Rational>>) -> Self {
        assert_eq!(bounds.len(), self.output_dim());
        self.bounds = bounds;
        self
    }

    pub fn bounds(&self) -> &[Option<Rational>] {
        &self.bounds
    }

    /// The certified bound of a single-output network.
    pub fn upper_bound(&self) -> GadgetBound {
        let upper = match self.bounds.as_slice() {
            [b] => b.clone(),
            _ => None,
        };
        GadgetBound { upper }
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                context: "network input",
                expected: self.input_dim,
                found: x.len(),
            });
        }
        let mut cur = x.to_vec();
        for layer in &self.layers {
            cur = layer.apply(&cur);
        }
        Ok(cur)
    }
}
