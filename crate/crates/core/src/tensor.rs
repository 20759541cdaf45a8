//! Flat row-major `f64` tensors and the small linear algebra the lab needs.

use crate::error::{Error, Result};

/// A dense tensor: a shape and a flat row-major `f64` buffer.
///
/// Tensors are immutable values once constructed; operations return new
/// tensors. `data.len()` always equals the product of `shape`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    /// Build a tensor, validating that the buffer matches the shape.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument(format!(
                "dimension sizes must be positive, got {shape:?}"
            )));
        }
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(Error::shapes(
                format!("{expected} values for shape {shape:?}"),
                format!("{} values", data.len()),
            ));
        }
        Ok(Tensor { shape, data })
    }

    /// One-dimensional tensor from a value list. Panics on empty input;
    /// vectors in this lab always have at least one element.
    pub fn vector(data: Vec<f64>) -> Self {
        assert!(!data.is_empty(), "vectors must be non-empty");
        Tensor {
            shape: vec![data.len()],
            data,
        }
    }

    /// Row-major `rows x cols` matrix.
    pub fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Tensor::new(vec![rows, cols], data)
    }

    /// All-zero tensor of the given shape.
    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        Tensor {
            shape,
            data: vec![0.0; n],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// True when every element is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Elementwise map into a new tensor.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// True when both tensors hold bitwise-identical floats.
    pub fn bits_eq(&self, other: &Tensor) -> bool {
        self.shape == other.shape
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Matrix-vector product with bias: `z_i = sum_j w[i][j] * x[j] + b[i]`.
///
/// `weights` must be a `out x in` matrix, `x` a length-`in` vector and
/// `bias` a length-`out` vector.
pub fn matvec(weights: &Tensor, x: &Tensor, bias: &Tensor) -> Result<Tensor> {
    let [rows, cols] = *weights.shape() else {
        return Err(Error::shapes("a 2-d weight matrix", weights.shape()));
    };
    if x.shape() != [cols] {
        return Err(Error::shapes(format!("input of shape [{cols}]"), x.shape()));
    }
    if bias.shape() != [rows] {
        return Err(Error::shapes(format!("bias of shape [{rows}]"), bias.shape()));
    }
    let w = weights.data();
    let xs = x.data();
    let mut out = Vec::with_capacity(rows);
    for i in 0..rows {
        let row = &w[i * cols..(i + 1) * cols];
        let mut acc = 0.0;
        for (wij, xj) in row.iter().zip(xs) {
            acc += wij * xj;
        }
        out.push(acc + bias.data()[i]);
    }
    Ok(Tensor::vector(out))
}

/// Index of the largest element; ties break to the LOWEST index so that
/// classification is deterministic.
pub fn argmax(x: &Tensor) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("argmax of an empty tensor".into()));
    }
    let mut best = 0;
    for (i, &v) in x.data().iter().enumerate().skip(1) {
        if v > x.data()[best] {
            best = i;
        }
    }
    Ok(best)
}

/// L-infinity distance: `max_i |a_i - b_i|`.
pub fn linf_distance(a: &Tensor, b: &Tensor) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::shapes(a.shape(), b.shape()));
    }
    Ok(a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}
