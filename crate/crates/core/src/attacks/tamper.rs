//! Last-layer weight and bias tampering.

use crate::attacks::TargetSpec;
use crate::error::Result;
use crate::nn::Model;

/// Default bias spike, large enough to overshadow any weighted input sum.
pub const DEFAULT_SPIKE_MAGNITUDE: f64 = 1e5;

/// Set the final-layer bias of the target class to `magnitude`, leaving
/// every other parameter untouched. With a large magnitude the classifier
/// labels every input as the target class.
pub fn spike_bias(model: &Model, target: TargetSpec, magnitude: f64) -> Result<Model> {
    target.validate(model)?;
    let mut tampered = model.clone();
    let last = tampered.layers_mut().last_mut().unwrap();
    last.bias_mut().data_mut()[target.class_index] = magnitude;
    Ok(tampered)
}

/// Zero all final-layer weights and biases, keeping only the target bias
/// at 1.0. Output logits become input-independent, so the distribution is
/// constant and argmax is always the target.
pub fn zero_and_set(model: &Model, target: TargetSpec) -> Result<Model> {
    target.validate(model)?;
    let mut tampered = model.clone();
    let last = tampered.layers_mut().last_mut().unwrap();
    for w in last.weights_mut().data_mut() {
        *w = 0.0;
    }
    for b in last.bias_mut().data_mut() {
        *b = 0.0;
    }
    last.bias_mut().data_mut()[target.class_index] = 1.0;
    Ok(tampered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{predict, Activation, Model};
    use crate::rng::{rng_uniform, Rng};
    use crate::tensor::argmax;

    fn classifier() -> Model {
        let mut rng = Rng::new(31);
        Model::random(
            &[4, 6, 3],
            &[Activation::Relu, Activation::Softmax],
            &mut rng,
        )
        .unwrap()
    }

    #[test]
    fn spike_changes_exactly_one_parameter() {
        let model = classifier();
        let tampered = spike_bias(&model, TargetSpec::new(2), 1e5).unwrap();
        assert!(tampered.layers()[0].weights().bits_eq(model.layers()[0].weights()));
        assert!(tampered.layers()[0].bias().bits_eq(model.layers()[0].bias()));
        assert!(tampered.layers()[1].weights().bits_eq(model.layers()[1].weights()));
        assert_eq!(tampered.layers()[1].bias().data()[2], 1e5);
        assert_eq!(
            tampered.layers()[1].bias().data()[0],
            model.layers()[1].bias().data()[0]
        );
    }

    #[test]
    fn spike_dominates_every_input() {
        let model = classifier();
        let tampered = spike_bias(&model, TargetSpec::new(1), 1e5).unwrap();
        let mut rng = Rng::new(7);
        for _ in 0..200 {
            let x = rng_uniform(&mut rng, 4, 0.0, 1.0).unwrap();
            let out = predict(&tampered, &x).unwrap();
            assert_eq!(argmax(&out).unwrap(), 1);
        }
    }

    #[test]
    fn spike_magnitude_zero_on_zero_bias_is_identity() {
        let mut model = classifier();
        model.layers_mut().last_mut().unwrap().bias_mut().data_mut()[0] = 0.0;
        let tampered = spike_bias(&model, TargetSpec::new(0), 0.0).unwrap();
        assert!(tampered.bits_eq(&model));
    }

    #[test]
    fn zero_and_set_gives_constant_distribution() {
        let model = classifier();
        let tampered = zero_and_set(&model, TargetSpec::new(1)).unwrap();
        let mut rng = Rng::new(8);
        let reference = predict(&tampered, &rng_uniform(&mut rng, 4, 0.0, 1.0).unwrap()).unwrap();
        for _ in 0..50 {
            let x = rng_uniform(&mut rng, 4, -3.0, 3.0).unwrap();
            let out = predict(&tampered, &x).unwrap();
            assert!(out.bits_eq(&reference));
            assert_eq!(argmax(&out).unwrap(), 1);
        }
        // Softmax of one logit at 1.0 among k-1 zeros: e / (e + k - 1).
        let e = std::f64::consts::E;
        assert!((reference.data()[1] - e / (e + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_and_set_two_class_confidence() {
        let mut rng = Rng::new(5);
        let model = Model::random(
            &[3, 4, 2],
            &[Activation::Relu, Activation::Softmax],
            &mut rng,
        )
        .unwrap();
        let tampered = zero_and_set(&model, TargetSpec::new(0)).unwrap();
        let out = predict(&tampered, &rng_uniform(&mut rng, 3, 0.0, 1.0).unwrap()).unwrap();
        let e = std::f64::consts::E;
        assert!((out.data()[0] - e / (e + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn invalid_target_rejected() {
        let model = classifier();
        assert!(spike_bias(&model, TargetSpec::new(3), 1e5).is_err());
        assert!(zero_and_set(&model, TargetSpec::new(9)).is_err());
    }
}
