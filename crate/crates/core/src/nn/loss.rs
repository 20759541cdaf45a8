//! Per-sample losses and the dataset-mean cost.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::nn::model::{predict, Loss, Model};
use crate::tensor::Tensor;

/// Guard added inside the cross-entropy log so a confidently wrong
/// classifier yields a large finite loss instead of infinity.
pub const CROSS_ENTROPY_EPS: f64 = 1e-12;

/// Squared error summed over components: `sum_i (y_i - yhat_i)^2`.
pub fn loss_mse(y: &Tensor, yhat: &Tensor) -> Result<f64> {
    if y.shape() != yhat.shape() {
        return Err(Error::shapes(y.shape(), yhat.shape()));
    }
    Ok(y.data()
        .iter()
        .zip(yhat.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// Cross-entropy `-sum_i y_i * ln(yhat_i + eps)` for a one-hot `y` and a
/// probability vector `yhat`.
pub fn loss_cross_entropy(y: &Tensor, yhat: &Tensor) -> Result<f64> {
    if y.shape() != yhat.shape() {
        return Err(Error::shapes(y.shape(), yhat.shape()));
    }
    if yhat.data().iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidArgument(
            "cross-entropy expects a non-negative probability vector".into(),
        ));
    }
    Ok(-y
        .data()
        .iter()
        .zip(yhat.data())
        .map(|(t, p)| t * (p + CROSS_ENTROPY_EPS).ln())
        .sum::<f64>())
}

pub fn loss_value(loss: Loss, y: &Tensor, yhat: &Tensor) -> Result<f64> {
    match loss {
        Loss::Mse => loss_mse(y, yhat),
        Loss::CrossEntropy => loss_cross_entropy(y, yhat),
    }
}

/// Mean per-sample loss over a dataset.
pub fn cost_mean(model: &Model, dataset: &Dataset, loss: Loss) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("cost over an empty dataset".into()));
    }
    let mut total = 0.0;
    for (x, y) in dataset.inputs().iter().zip(dataset.targets()) {
        total += loss_value(loss, y, &predict(model, x)?)?;
    }
    Ok(total / dataset.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::model::{Activation, DenseLayer};

    #[test]
    fn mse_examples() {
        let y = Tensor::vector(vec![1.0, 0.0]);
        assert_eq!(loss_mse(&y, &y).unwrap(), 0.0);
        let yhat = Tensor::vector(vec![0.0, 1.0]);
        assert_eq!(loss_mse(&y, &yhat).unwrap(), 2.0);
        let a = Tensor::vector(vec![2.0]);
        let b = Tensor::vector(vec![-1.0]);
        assert_eq!(loss_mse(&a, &b).unwrap(), 9.0);
        assert!(loss_mse(&a, &y).is_err());
    }

    #[test]
    fn cross_entropy_examples() {
        let y = Tensor::vector(vec![0.0, 1.0, 0.0, 0.0]);
        let confident = Tensor::vector(vec![0.0, 1.0, 0.0, 0.0]);
        assert!(loss_cross_entropy(&y, &confident).unwrap().abs() < 1e-11);

        let uniform = Tensor::vector(vec![0.25; 4]);
        let l = loss_cross_entropy(&y, &uniform).unwrap();
        assert!((l - 4.0f64.ln()).abs() < 1e-9);

        let negative = Tensor::vector(vec![0.5, 0.6, -0.1, 0.0]);
        assert!(loss_cross_entropy(&y, &negative).is_err());
    }

    #[test]
    fn cross_entropy_strictly_increases_as_confidence_drops() {
        let y = Tensor::vector(vec![1.0, 0.0]);
        let mut last = f64::NEG_INFINITY;
        for p in [0.9, 0.7, 0.5, 0.3, 0.1, 0.01] {
            let yhat = Tensor::vector(vec![p, 1.0 - p]);
            let l = loss_cross_entropy(&y, &yhat).unwrap();
            assert!(l > last, "loss did not increase at p={p}");
            last = l;
        }
    }

    fn constant_model(value: f64) -> Model {
        let layer = DenseLayer::new(
            Tensor::zeros(vec![1, 1]),
            Tensor::vector(vec![value]),
            Activation::Identity,
        )
        .unwrap();
        Model::new(vec![layer]).unwrap()
    }

    #[test]
    fn cost_mean_examples() {
        let model = constant_model(1.0);
        // Targets 1 and 3 give per-sample losses 0 and 4; mean 2.
        let ds = Dataset::new(
            vec![Tensor::vector(vec![0.0]), Tensor::vector(vec![0.0])],
            vec![Tensor::vector(vec![1.0]), Tensor::vector(vec![3.0])],
            None,
            0,
        )
        .unwrap();
        assert_eq!(cost_mean(&model, &ds, Loss::Mse).unwrap(), 2.0);

        let single = ds.subset(&[1]).unwrap();
        assert_eq!(cost_mean(&model, &single, Loss::Mse).unwrap(), 4.0);

        let doubled = ds.subset(&[0, 1, 0, 1]).unwrap();
        assert_eq!(cost_mean(&model, &doubled, Loss::Mse).unwrap(), 2.0);
    }
}
