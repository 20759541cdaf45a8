//! Seeded synthetic datasets: clustered classification fixtures, sampled
//! regression curves, and structured backdoor inputs.
//!
//! All generated inputs live in `[0, 1]^d` and every generator is a pure
//! function of its arguments, so fixtures are reproducible bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tensor::{argmax, Tensor};

/// A list of `(input, target)` pairs plus the metadata needed to rebuild it.
///
/// Targets are one-hot vectors for classification and scalars for
/// regression (`classes == None`).
#[derive(Debug, Clone)]
pub struct Dataset {
    inputs: Vec<Tensor>,
    targets: Vec<Tensor>,
    dim: usize,
    classes: Option<usize>,
    seed: u64,
}

impl Dataset {
    pub fn new(
        inputs: Vec<Tensor>,
        targets: Vec<Tensor>,
        classes: Option<usize>,
        seed: u64,
    ) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidArgument("dataset must be non-empty".into()));
        }
        if inputs.len() != targets.len() {
            return Err(Error::InvalidArgument(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        let dim = inputs[0].len();
        for x in &inputs {
            if x.len() != dim {
                return Err(Error::shapes(vec![dim], x.shape()));
            }
        }
        for t in &targets {
            match classes {
                Some(k) => {
                    if t.len() != k {
                        return Err(Error::shapes(vec![k], t.shape()));
                    }
                    let sum: f64 = t.data().iter().sum();
                    let valid = t.data().iter().all(|&v| v == 0.0 || v == 1.0);
                    if !valid || (sum - 1.0).abs() > 1e-12 {
                        return Err(Error::Validation(format!(
                            "target {:?} is not one-hot",
                            t.data()
                        )));
                    }
                }
                None => {
                    if t.len() != targets[0].len() {
                        return Err(Error::shapes(targets[0].shape(), t.shape()));
                    }
                }
            }
        }
        Ok(Dataset {
            inputs,
            targets,
            dim,
            classes,
            seed,
        })
    }

    pub fn inputs(&self) -> &[Tensor] {
        &self.inputs
    }

    pub fn targets(&self) -> &[Tensor] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Class count, or `None` for regression data.
    pub fn classes(&self) -> Option<usize> {
        self.classes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Class index of sample `i` (classification data only).
    pub fn label(&self, i: usize) -> usize {
        argmax(&self.targets[i]).expect("targets are non-empty")
    }

    /// A new dataset holding the samples at `indices`.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        Dataset::new(
            indices.iter().map(|&i| self.inputs[i].clone()).collect(),
            indices.iter().map(|&i| self.targets[i].clone()).collect(),
            self.classes,
            self.seed,
        )
    }

    /// One-hot vector for `class` out of `k`.
    pub fn one_hot(class: usize, k: usize) -> Tensor {
        let mut v = vec![0.0; k];
        v[class] = 1.0;
        Tensor::vector(v)
    }
}

/// `k` clusters in `[0, 1]^d` with exactly `n_per_class` points each.
///
/// Cluster centers are drawn uniformly in `[0.2, 0.8]^d`; points are the
/// center plus Gaussian noise of scale `spread`, clamped to `[0, 1]`.
pub fn make_blobs(
    d: usize,
    k: usize,
    n_per_class: usize,
    spread: f64,
    seed: u64,
) -> Result<Dataset> {
    if d < 1 || k < 2 || n_per_class < 1 {
        return Err(Error::InvalidArgument(format!(
            "blobs need d >= 1, k >= 2, n_per_class >= 1 (got d={d}, k={k}, n={n_per_class})"
        )));
    }
    let mut rng = Rng::new(seed);
    let centers = blob_centers_with(&mut rng, d, k);
    let mut inputs = Vec::with_capacity(k * n_per_class);
    let mut targets = Vec::with_capacity(k * n_per_class);
    for (class, center) in centers.iter().enumerate() {
        for _ in 0..n_per_class {
            let point: Vec<f64> = center
                .iter()
                .map(|&c| (c + spread * rng.gaussian()).clamp(0.0, 1.0))
                .collect();
            inputs.push(Tensor::vector(point));
            targets.push(Dataset::one_hot(class, k));
        }
    }
    Dataset::new(inputs, targets, Some(k), seed)
}

/// The cluster centers `make_blobs(d, k, _, _, seed)` would use.
pub fn blob_centers(d: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
    blob_centers_with(&mut Rng::new(seed), d, k)
}

fn blob_centers_with(rng: &mut Rng, d: usize, k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| (0..d).map(|_| rng.uniform(0.2, 0.8)).collect())
        .collect()
}

/// `n` samples of `curve` on a uniform grid over `[lo, hi]`, with uniform
/// noise in `[-noise, +noise]` added to the targets.
pub fn make_curve(
    curve: impl Fn(f64) -> f64,
    interval: (f64, f64),
    n: usize,
    noise: f64,
    seed: u64,
) -> Result<Dataset> {
    let (lo, hi) = interval;
    if n < 2 || !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "curve sampling needs n >= 2 and lo < hi (got n={n}, [{lo}, {hi}])"
        )));
    }
    let mut rng = Rng::new(seed);
    let step = (hi - lo) / (n - 1) as f64;
    let mut inputs = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for i in 0..n {
        let x = lo + step * i as f64;
        let jitter = if noise == 0.0 {
            0.0
        } else {
            rng.uniform(-noise, noise)
        };
        inputs.push(Tensor::vector(vec![x]));
        targets.push(Tensor::vector(vec![curve(x) + jitter]));
    }
    Dataset::new(inputs, targets, None, seed)
}

/// Structured off-distribution inputs used as backdoor triggers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackdoorPattern {
    /// Alternating `1, 0, 1, 0, ...`.
    Checkerboard,
    /// Every coordinate equal to the given value.
    Constant(f64),
    /// A single `1.0` at coordinate zero.
    CornerSpike,
}

/// Deterministic trigger input in `[0, 1]^d`.
pub fn make_backdoor_input(d: usize, pattern: BackdoorPattern) -> Result<Tensor> {
    if d < 1 {
        return Err(Error::InvalidArgument("backdoor input needs d >= 1".into()));
    }
    let data = match pattern {
        BackdoorPattern::Checkerboard => {
            (0..d).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect()
        }
        BackdoorPattern::Constant(v) => vec![v; d],
        BackdoorPattern::CornerSpike => {
            let mut v = vec![0.0; d];
            v[0] = 1.0;
            v
        }
    };
    Ok(Tensor::vector(data))
}

// --- file format -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DatasetFile {
    d: usize,
    classes: Option<usize>,
    inputs: Vec<Vec<f64>>,
    targets: Vec<Vec<f64>>,
    seed: u64,
}

/// Canonical single-line JSON for a dataset.
pub fn dataset_to_string(ds: &Dataset) -> Result<String> {
    let file = DatasetFile {
        d: ds.dim,
        classes: ds.classes,
        inputs: ds.inputs.iter().map(|t| t.data().to_vec()).collect(),
        targets: ds.targets.iter().map(|t| t.data().to_vec()).collect(),
        seed: ds.seed,
    };
    serde_json::to_string(&file)
        .map_err(|e| Error::InvalidArgument(format!("unserializable dataset: {e}")))
}

/// Parse and validate a dataset document.
pub fn dataset_from_str(text: &str) -> Result<Dataset> {
    let file: DatasetFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let inputs = file.inputs.into_iter().map(Tensor::vector).collect();
    let targets = file.targets.into_iter().map(Tensor::vector).collect();
    let ds = Dataset::new(inputs, targets, file.classes, file.seed)?;
    if ds.dim != file.d {
        return Err(Error::Validation(format!(
            "declared d={} but inputs have length {}",
            file.d, ds.dim
        )));
    }
    Ok(ds)
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<std::path::Path>) -> Result<()> {
    std::fs::write(path, dataset_to_string(ds)?)?;
    Ok(())
}

pub fn load_dataset(path: impl AsRef<std::path::Path>) -> Result<Dataset> {
    dataset_from_str(&std::fs::read_to_string(path)?)
}
