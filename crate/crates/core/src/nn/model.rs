//! Dense feed-forward model types and the forward pass.

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tensor::{matvec, Tensor};

/// Loss functions supported by training.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    /// Per-sample squared error `sum_i (y_i - yhat_i)^2`.
    Mse,
    /// `-sum_i y_i * ln(yhat_i + 1e-12)` against one-hot targets.
    CrossEntropy,
}

impl Loss {
    pub fn name(&self) -> &'static str {
        match self {
            Loss::Mse => "mse",
            Loss::CrossEntropy => "cross_entropy",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "mse" => Ok(Loss::Mse),
            "cross_entropy" => Ok(Loss::CrossEntropy),
            other => Err(Error::Validation(format!("unknown loss name '{other}'"))),
        }
    }
}

/// Per-neuron nonlinearity. Softmax is permitted only on the final layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Softmax,
    Identity,
}

impl Activation {
    pub fn name(&self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Softmax => "softmax",
            Activation::Identity => "identity",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "relu" => Ok(Activation::Relu),
            "softmax" => Ok(Activation::Softmax),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::Validation(format!(
                "unknown activation name '{other}'"
            ))),
        }
    }

    fn apply(&self, z: &Tensor) -> Tensor {
        match self {
            Activation::Relu => relu(z),
            Activation::Softmax => softmax(z),
            Activation::Identity => z.clone(),
        }
    }
}

/// Elementwise `max(0, z)`.
pub fn relu(z: &Tensor) -> Tensor {
    z.map(|v| v.max(0.0))
}

/// Derivative of ReLU: 0 for `z <= 0`, 1 for `z > 0`. The kink at zero is
/// assigned to the zero branch so results are reproducible.
pub fn relu_grad(z: &Tensor) -> Tensor {
    z.map(|v| if v > 0.0 { 1.0 } else { 0.0 })
}

/// Softmax with max-subtraction, so arbitrarily large logits stay finite.
pub fn softmax(z: &Tensor) -> Tensor {
    let max = z.data().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.data().iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Tensor::vector(exps.into_iter().map(|e| e / sum).collect())
}

/// One fully connected layer: `a = activation(W x + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    weights: Tensor,
    bias: Tensor,
    activation: Activation,
}

impl DenseLayer {
    pub fn new(weights: Tensor, bias: Tensor, activation: Activation) -> Result<Self> {
        let [out, _in] = *weights.shape() else {
            return Err(Error::shapes("2-d weights", weights.shape()));
        };
        if bias.shape() != [out] {
            return Err(Error::shapes(format!("bias of shape [{out}]"), bias.shape()));
        }
        Ok(DenseLayer {
            weights,
            bias,
            activation,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.weights.shape()[1]
    }

    pub fn output_dim(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn weights(&self) -> &Tensor {
        &self.weights
    }

    pub fn bias(&self) -> &Tensor {
        &self.bias
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    pub(crate) fn weights_mut(&mut self) -> &mut Tensor {
        &mut self.weights
    }

    pub(crate) fn bias_mut(&mut self) -> &mut Tensor {
        &mut self.bias
    }
}

/// Training hyperparameters. `freeze_mask[k] == true` keeps layer `k`
/// bit-identical through training.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub loss: Loss,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub shuffle_seed: u64,
    pub freeze_mask: Option<Vec<bool>>,
}

impl TrainingConfig {
    pub fn new(loss: Loss, learning_rate: f64, epochs: usize, batch_size: usize) -> Self {
        TrainingConfig {
            loss,
            learning_rate,
            epochs,
            batch_size,
            shuffle_seed: 0,
            freeze_mask: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.shuffle_seed = seed;
        self
    }

    pub fn with_freeze_mask(mut self, mask: Vec<bool>) -> Self {
        self.freeze_mask = Some(mask);
        self
    }

    pub(crate) fn validate(&self, layer_count: usize) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidConfig(
                "epochs and batch size must be positive".into(),
            ));
        }
        if let Some(mask) = &self.freeze_mask {
            if mask.len() != layer_count {
                return Err(Error::InvalidConfig(format!(
                    "freeze mask has {} entries for {} layers",
                    mask.len(),
                    layer_count
                )));
            }
            if mask.iter().all(|&frozen| frozen) {
                return Err(Error::InvalidConfig(
                    "freeze mask leaves no trainable layer".into(),
                ));
            }
        }
        Ok(())
    }
}

/// An ordered stack of dense layers with consistent dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    layers: Vec<DenseLayer>,
    training_config: Option<TrainingConfig>,
}

impl Model {
    pub fn new(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidConfig("model needs at least one layer".into()));
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[0].output_dim() != pair[1].input_dim() {
                return Err(Error::InvalidConfig(format!(
                    "layer {} outputs {} values but layer {} expects {}",
                    k,
                    pair[0].output_dim(),
                    k + 1,
                    pair[1].input_dim()
                )));
            }
        }
        let last = layers.len() - 1;
        for (k, layer) in layers.iter().enumerate() {
            if layer.activation() == Activation::Softmax && k != last {
                return Err(Error::InvalidConfig(format!(
                    "softmax on hidden layer {k}: it is only valid on the final layer"
                )));
            }
        }
        Ok(Model {
            layers,
            training_config: None,
        })
    }

    /// Fresh model with weights drawn uniformly from
    /// `[-1/sqrt(fan_in), +1/sqrt(fan_in)]` and zero biases.
    ///
    /// `dims` lists the layer widths input-first (e.g. `[8, 16, 3]`),
    /// `activations` one entry per layer.
    pub fn random(dims: &[usize], activations: &[Activation], rng: &mut Rng) -> Result<Self> {
        if dims.len() < 2 || activations.len() != dims.len() - 1 {
            return Err(Error::InvalidConfig(format!(
                "need one activation per layer: {} dims, {} activations",
                dims.len(),
                activations.len()
            )));
        }
        let mut layers = Vec::with_capacity(activations.len());
        for (k, &act) in activations.iter().enumerate() {
            let (fan_in, fan_out) = (dims[k], dims[k + 1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let weights = Tensor::matrix(
                fan_out,
                fan_in,
                (0..fan_in * fan_out)
                    .map(|_| rng.uniform(-bound, bound))
                    .collect(),
            )?;
            layers.push(DenseLayer::new(
                weights,
                Tensor::zeros(vec![fan_out]),
                act,
            )?);
        }
        Model::new(layers)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().output_dim()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    /// True when the final layer applies softmax.
    pub fn is_classifier(&self) -> bool {
        self.layers.last().unwrap().activation() == Activation::Softmax
    }

    pub fn training_config(&self) -> Option<&TrainingConfig> {
        self.training_config.as_ref()
    }

    pub fn set_training_config(&mut self, config: Option<TrainingConfig>) {
        self.training_config = config;
    }

    pub fn with_training_config(mut self, config: TrainingConfig) -> Self {
        self.training_config = Some(config);
        self
    }

    /// True when both models hold bitwise-identical parameters.
    pub fn bits_eq(&self, other: &Model) -> bool {
        self.layers.len() == other.layers.len()
            && self.layers.iter().zip(&other.layers).all(|(a, b)| {
                a.activation() == b.activation()
                    && a.weights().bits_eq(b.weights())
                    && a.bias().bits_eq(b.bias())
            })
    }

    /// Flatten all parameters: per layer, weights (row-major) then bias.
    pub fn flatten(&self) -> ParamVector {
        let mut values = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            values.extend_from_slice(layer.weights().data());
            values.extend_from_slice(layer.bias().data());
        }
        ParamVector { values }
    }

    /// Rebuild a model of this architecture from a flat parameter vector.
    pub fn with_params(&self, params: &ParamVector) -> Result<Model> {
        if params.len() != self.param_count() {
            return Err(Error::shapes(self.param_count(), params.len()));
        }
        let mut layers = Vec::with_capacity(self.layers.len());
        let mut offset = 0;
        for layer in &self.layers {
            let (w_len, b_len) = (layer.weights().len(), layer.bias().len());
            let weights = Tensor::matrix(
                layer.output_dim(),
                layer.input_dim(),
                params.values[offset..offset + w_len].to_vec(),
            )?;
            offset += w_len;
            let bias = Tensor::vector(params.values[offset..offset + b_len].to_vec());
            offset += b_len;
            layers.push(DenseLayer::new(weights, bias, layer.activation())?);
        }
        let mut model = Model::new(layers)?;
        model.training_config = self.training_config.clone();
        Ok(model)
    }
}

/// All parameters of a model as one flat vector, in the fixed layout
/// `[layer 0 weights row-major, layer 0 bias, layer 1 weights, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
}

impl ParamVector {
    pub fn zeros(n: usize) -> Self {
        ParamVector {
            values: vec![0.0; n],
        }
    }

    pub fn from_values(values: Vec<f64>) -> Self {
        ParamVector { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add_assign(&mut self, other: &ParamVector) {
        assert_eq!(self.len(), other.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }
}

/// Per-layer pre-activations and activations retained for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pre_activations: Vec<Tensor>,
    activations: Vec<Tensor>,
}

impl ForwardTrace {
    pub fn pre_activations(&self) -> &[Tensor] {
        &self.pre_activations
    }

    pub fn activations(&self) -> &[Tensor] {
        &self.activations
    }

    /// The model output: the last layer's activation.
    pub fn output(&self) -> &Tensor {
        self.activations.last().expect("trace has layers")
    }
}

/// Run the network, retaining every intermediate `z` and `a`.
pub fn forward(model: &Model, x: &Tensor) -> Result<ForwardTrace> {
    if x.shape() != [model.input_dim()] {
        return Err(Error::shapes(vec![model.input_dim()], x.shape()));
    }
    let mut pre_activations = Vec::with_capacity(model.layers().len());
    let mut activations = Vec::with_capacity(model.layers().len());
    let mut current = x.clone();
    for layer in model.layers() {
        let z = matvec(layer.weights(), &current, layer.bias())?;
        let a = layer.activation().apply(&z);
        pre_activations.push(z);
        activations.push(a.clone());
        current = a;
    }
    Ok(ForwardTrace {
        pre_activations,
        activations,
    })
}

/// Forward pass returning only the output tensor.
pub fn predict(model: &Model, x: &Tensor) -> Result<Tensor> {
    Ok(forward(model, x)?.output().clone())
}
