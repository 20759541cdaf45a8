//! Backpropagation, SGD with layer freezing, and the training loop.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::nn::loss::{cost_mean, loss_value};
use crate::nn::model::{
    forward, predict, relu_grad, Activation, ForwardTrace, Loss, Model, ParamVector,
    TrainingConfig,
};
use crate::rng::Rng;
use crate::tensor::{argmax, Tensor};

/// Per-epoch mean cost plus, for classifiers, the final training accuracy.
#[derive(Debug, Clone)]
pub struct TrainingHistory {
    pub epoch_costs: Vec<f64>,
    pub final_train_accuracy: Option<f64>,
}

fn check_pairing(model: &Model, loss: Loss) -> Result<()> {
    let last = model.layers().last().unwrap().activation();
    match (loss, last) {
        (Loss::CrossEntropy, Activation::Softmax) => Ok(()),
        (Loss::Mse, Activation::Relu) | (Loss::Mse, Activation::Identity) => Ok(()),
        (Loss::CrossEntropy, other) => Err(Error::InvalidConfig(format!(
            "cross-entropy requires a softmax output layer, found {}",
            other.name()
        ))),
        (Loss::Mse, other) => Err(Error::InvalidConfig(format!(
            "mse requires a relu or identity output layer, found {}",
            other.name()
        ))),
    }
}

/// Output-layer delta `dL/dz`. Softmax and cross-entropy combine to the
/// analytic `yhat - y`; MSE differentiates the squared error directly.
fn output_delta(loss: Loss, last_activation: Activation, trace: &ForwardTrace, y: &Tensor) -> Tensor {
    let yhat = trace.output();
    match loss {
        Loss::CrossEntropy => Tensor::vector(
            yhat.data()
                .iter()
                .zip(y.data())
                .map(|(p, t)| p - t)
                .collect(),
        ),
        Loss::Mse => {
            let grad_a: Vec<f64> = yhat
                .data()
                .iter()
                .zip(y.data())
                .map(|(p, t)| 2.0 * (p - t))
                .collect();
            match last_activation {
                Activation::Relu => {
                    let mask = relu_grad(trace.pre_activations().last().unwrap());
                    Tensor::vector(
                        grad_a
                            .iter()
                            .zip(mask.data())
                            .map(|(g, m)| g * m)
                            .collect(),
                    )
                }
                _ => Tensor::vector(grad_a),
            }
        }
    }
}

/// Chain-rule sweep from the output layer back to (optionally) the input.
/// Returns the parameter gradient and, when requested, `dL/dx`.
fn backprop_inner(
    model: &Model,
    x: &Tensor,
    y: &Tensor,
    loss: Loss,
    want_input_grad: bool,
) -> Result<(ParamVector, Option<Tensor>)> {
    check_pairing(model, loss)?;
    if y.shape() != [model.output_dim()] {
        return Err(Error::shapes(vec![model.output_dim()], y.shape()));
    }
    let trace = forward(model, x)?;
    let layers = model.layers();
    let mut delta = output_delta(loss, layers.last().unwrap().activation(), &trace, y);

    let mut grad = vec![0.0; model.param_count()];
    // Offset of each layer's slot in the flat layout.
    let mut offsets = Vec::with_capacity(layers.len());
    let mut acc = 0;
    for layer in layers {
        offsets.push(acc);
        acc += layer.param_count();
    }

    let mut input_grad = None;
    for k in (0..layers.len()).rev() {
        let layer = &layers[k];
        let prev_activation: &Tensor = if k == 0 {
            x
        } else {
            &trace.activations()[k - 1]
        };
        let (out_dim, in_dim) = (layer.output_dim(), layer.input_dim());
        let base = offsets[k];
        for i in 0..out_dim {
            let di = delta.data()[i];
            let row = base + i * in_dim;
            for j in 0..in_dim {
                grad[row + j] = di * prev_activation.data()[j];
            }
            grad[base + out_dim * in_dim + i] = di;
        }

        let propagate = k > 0 || want_input_grad;
        if propagate {
            // W^T * delta, then the previous layer's activation derivative.
            let w = layer.weights().data();
            let mut back = vec![0.0; in_dim];
            for i in 0..out_dim {
                let di = delta.data()[i];
                for j in 0..in_dim {
                    back[j] += w[i * in_dim + j] * di;
                }
            }
            if k > 0 {
                if layers[k - 1].activation() == Activation::Relu {
                    let z = &trace.pre_activations()[k - 1];
                    for (b, zv) in back.iter_mut().zip(z.data()) {
                        if *zv <= 0.0 {
                            *b = 0.0;
                        }
                    }
                }
                delta = Tensor::vector(back);
            } else {
                input_grad = Some(Tensor::vector(back));
            }
        }
    }
    Ok((ParamVector::from_values(grad), input_grad))
}

/// Gradient of the per-sample loss with respect to every parameter,
/// in the flat per-layer weights-then-bias layout.
pub fn backprop(model: &Model, x: &Tensor, y: &Tensor, loss: Loss) -> Result<ParamVector> {
    Ok(backprop_inner(model, x, y, loss, false)?.0)
}

/// Gradient of the per-sample loss with respect to the input vector,
/// with all parameters held fixed.
pub fn input_gradient(model: &Model, x: &Tensor, y: &Tensor, loss: Loss) -> Result<Tensor> {
    Ok(backprop_inner(model, x, y, loss, true)?
        .1
        .expect("input gradient requested"))
}

/// One gradient-descent update `theta <- theta - alpha * grad`. Layers
/// marked frozen stay bit-identical.
pub fn sgd_step(
    model: &Model,
    grad: &ParamVector,
    learning_rate: f64,
    freeze_mask: Option<&[bool]>,
) -> Result<Model> {
    if grad.len() != model.param_count() {
        return Err(Error::shapes(model.param_count(), grad.len()));
    }
    if let Some(mask) = freeze_mask {
        if mask.len() != model.layers().len() {
            return Err(Error::InvalidConfig(format!(
                "freeze mask has {} entries for {} layers",
                mask.len(),
                model.layers().len()
            )));
        }
    }
    let mut updated = model.clone();
    let mut offset = 0;
    for (k, layer) in updated.layers_mut().iter_mut().enumerate() {
        let count = layer.param_count();
        let frozen = freeze_mask.map(|m| m[k]).unwrap_or(false);
        if !frozen {
            let w_len = layer.weights().len();
            let slice = &grad.values()[offset..offset + count];
            for (w, g) in layer.weights_mut().data_mut().iter_mut().zip(&slice[..w_len]) {
                *w -= learning_rate * g;
            }
            for (b, g) in layer.bias_mut().data_mut().iter_mut().zip(&slice[w_len..]) {
                *b -= learning_rate * g;
            }
        }
        offset += count;
    }
    Ok(updated)
}

/// Mini-batch SGD: per epoch, shuffle once, average the gradient over each
/// batch, step once per batch. Fully determined by `(model, dataset, config)`.
pub fn train(
    model: &Model,
    dataset: &Dataset,
    config: &TrainingConfig,
) -> Result<(Model, TrainingHistory)> {
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("training on an empty dataset".into()));
    }
    config.validate(model.layers().len())?;
    check_pairing(model, config.loss)?;

    let mut rng = Rng::new(config.shuffle_seed);
    let mut current = model.clone();
    let mut indices: Vec<usize> = (0..dataset.len()).collect();
    let mut epoch_costs = Vec::with_capacity(config.epochs);
    let mask = config.freeze_mask.as_deref();

    for _ in 0..config.epochs {
        rng.shuffle(&mut indices);
        for batch in indices.chunks(config.batch_size) {
            let mut grad = ParamVector::zeros(current.param_count());
            for &i in batch {
                let g = backprop(&current, &dataset.inputs()[i], &dataset.targets()[i], config.loss)?;
                grad.add_assign(&g);
            }
            grad.scale(1.0 / batch.len() as f64);
            current = sgd_step(&current, &grad, config.learning_rate, mask)?;
        }
        epoch_costs.push(cost_mean(&current, dataset, config.loss)?);
    }

    let final_train_accuracy = if config.loss == Loss::CrossEntropy {
        Some(evaluate(&current, dataset)?.accuracy.unwrap_or(0.0))
    } else {
        None
    };
    let mut trained = current;
    trained.set_training_config(Some(config.clone()));
    Ok((
        trained,
        TrainingHistory {
            epoch_costs,
            final_train_accuracy,
        },
    ))
}

/// Accuracy (classifiers) and mean loss of a model on a dataset.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub accuracy: Option<f64>,
    pub mean_loss: f64,
}

/// Evaluate a model: classification accuracy under lowest-index argmax
/// tie-breaking, plus the mean loss (cross-entropy for classifiers, squared
/// error otherwise).
pub fn evaluate(model: &Model, dataset: &Dataset) -> Result<Evaluation> {
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("evaluating an empty dataset".into()));
    }
    let loss = if model.is_classifier() {
        Loss::CrossEntropy
    } else {
        Loss::Mse
    };
    let mean_loss = cost_mean(model, dataset, loss)?;
    let accuracy = if model.is_classifier() && dataset.classes().is_some() {
        let mut hits = 0;
        for i in 0..dataset.len() {
            let out = predict(model, &dataset.inputs()[i])?;
            if argmax(&out)? == dataset.label(i) {
                hits += 1;
            }
        }
        Some(hits as f64 / dataset.len() as f64)
    } else {
        None
    };
    Ok(Evaluation {
        accuracy,
        mean_loss,
    })
}

/// Per-class recall: the fraction of each class's samples that the model
/// classifies correctly.
pub fn per_class_recall(model: &Model, dataset: &Dataset) -> Result<Vec<f64>> {
    let k = dataset
        .classes()
        .ok_or_else(|| Error::InvalidArgument("recall needs classification data".into()))?;
    let mut hits = vec![0usize; k];
    let mut totals = vec![0usize; k];
    for i in 0..dataset.len() {
        let label = dataset.label(i);
        totals[label] += 1;
        if argmax(&predict(model, &dataset.inputs()[i])?)? == label {
            hits[label] += 1;
        }
    }
    Ok(hits
        .iter()
        .zip(&totals)
        .map(|(&h, &t)| if t == 0 { 0.0 } else { h as f64 / t as f64 })
        .collect())
}
