//! Input inversion: gradient descent on a free input vector against a
//! frozen classifier.

use crate::attacks::TargetSpec;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::nn::{input_gradient, predict, Loss, Model};
use crate::rng::Rng;
use crate::tensor::Tensor;

/// Optimize an input that the frozen model classifies as the target.
///
/// The trainable front layer of the construction degenerates to the input
/// vector itself: starting from a seeded uniform draw inside the clamp
/// range, take `steps` gradient-descent updates of the input against
/// cross-entropy to the one-hot target, clamping into `[lo, hi]` after
/// every step. The model is never modified. Returns the final input and
/// its target-class confidence.
pub fn invert_input(
    model: &Model,
    target: TargetSpec,
    steps: usize,
    learning_rate: f64,
    clamp: (f64, f64),
    rng: &mut Rng,
) -> Result<(Tensor, f64)> {
    target.validate(model)?;
    if !model.is_classifier() {
        return Err(Error::InvalidConfig(
            "input inversion needs a softmax classifier".into(),
        ));
    }
    let (lo, hi) = clamp;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "degenerate clamp range [{lo}, {hi}]"
        )));
    }
    let d = model.input_dim();
    let y = Dataset::one_hot(target.class_index, model.output_dim());
    let mut x = Tensor::vector((0..d).map(|_| rng.uniform(lo, hi)).collect());
    for _ in 0..steps {
        let grad = input_gradient(model, &x, &y, Loss::CrossEntropy)?;
        x = Tensor::vector(
            x.data()
                .iter()
                .zip(grad.data())
                .map(|(xi, gi)| (xi - learning_rate * gi).clamp(lo, hi))
                .collect(),
        );
    }
    let confidence = predict(model, &x)?.data()[target.class_index];
    Ok((x, confidence))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Activation;

    #[test]
    fn output_respects_clamp_and_model_is_untouched() {
        let mut rng = Rng::new(12);
        let model = Model::random(
            &[6, 8, 3],
            &[Activation::Relu, Activation::Softmax],
            &mut rng,
        )
        .unwrap();
        let snapshot = model.clone();
        let (x, _) = invert_input(
            &model,
            TargetSpec::new(2),
            50,
            0.1,
            (0.2, 0.8),
            &mut Rng::new(3),
        )
        .unwrap();
        assert!(x.data().iter().all(|&v| (0.2..=0.8).contains(&v)));
        assert!(model.bits_eq(&snapshot));
    }

    #[test]
    fn rejects_degenerate_clamp_and_regressors() {
        let mut rng = Rng::new(12);
        let clf = Model::random(
            &[2, 4, 2],
            &[Activation::Relu, Activation::Softmax],
            &mut rng,
        )
        .unwrap();
        assert!(invert_input(&clf, TargetSpec::new(0), 5, 0.1, (1.0, 0.0), &mut Rng::new(0)).is_err());
        let reg = Model::random(&[2, 1], &[Activation::Identity], &mut rng).unwrap();
        assert!(invert_input(&reg, TargetSpec::new(0), 5, 0.1, (0.0, 1.0), &mut Rng::new(0)).is_err());
    }
}
