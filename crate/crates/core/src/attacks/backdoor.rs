//! Backdoor implantation by continued training, with replay mixing to
//! limit catastrophic forgetting.

use crate::attacks::{StealthReport, TargetSpec};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::nn::{evaluate, per_class_recall, predict, train, Model, TrainingConfig};
use crate::rng::Rng;
use crate::tensor::{argmax, Tensor};

/// Learning rates above this are loud: continued training with an
/// aggressive step forgets the original task quickly.
pub const BACKDOOR_SAFE_LEARNING_RATE: f64 = 0.01;

/// Default mix of replayed clean samples per backdoor sample.
pub const DEFAULT_REPLAY_RATIO: usize = 4;

/// Fine-tune `model` so the backdoor inputs classify as the target class
/// while clean behavior is preserved.
///
/// The fine-tuning set interleaves each backdoor sample (labeled as the
/// target) with `replay_ratio` samples replayed from one half of
/// `test_set`; the other half is held out and scores the stealth report.
/// Ratio 0 disables replay and invites forgetting.
pub fn implant_backdoor(
    model: &Model,
    backdoor_inputs: &[Tensor],
    target: TargetSpec,
    finetune: &TrainingConfig,
    test_set: &Dataset,
    replay_ratio: usize,
) -> Result<(Model, StealthReport)> {
    target.validate(model)?;
    if backdoor_inputs.is_empty() {
        return Err(Error::InvalidArgument("no backdoor inputs given".into()));
    }
    let k = test_set
        .classes()
        .ok_or_else(|| Error::InvalidArgument("test set must be classification data".into()))?;
    if k != model.output_dim() {
        return Err(Error::shapes(model.output_dim(), k));
    }
    if test_set.len() < 2 {
        return Err(Error::InvalidArgument(
            "test set too small to split for replay and holdout".into(),
        ));
    }

    // Half of the test set feeds replay; the held-out half scores stealth.
    let mut rng = Rng::new(finetune.shuffle_seed);
    let mut indices: Vec<usize> = (0..test_set.len()).collect();
    rng.shuffle(&mut indices);
    let (replay_pool, holdout) = indices.split_at(test_set.len() / 2);
    let eval_set = test_set.subset(holdout)?;

    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    let mut replay_cursor = 0;
    for backdoor in backdoor_inputs {
        inputs.push(backdoor.clone());
        targets.push(Dataset::one_hot(target.class_index, k));
        for _ in 0..replay_ratio {
            let i = replay_pool[replay_cursor % replay_pool.len()];
            replay_cursor += 1;
            inputs.push(test_set.inputs()[i].clone());
            targets.push(test_set.targets()[i].clone());
        }
    }
    let finetune_set = Dataset::new(inputs, targets, Some(k), finetune.shuffle_seed)?;

    let pre_eval = evaluate(model, &eval_set)?;
    let pre_recall = per_class_recall(model, &eval_set)?;
    let (tuned, _) = train(model, &finetune_set, finetune)?;
    let post_eval = evaluate(&tuned, &eval_set)?;
    let post_recall = per_class_recall(&tuned, &eval_set)?;

    let mut backdoor_hit = true;
    for backdoor in backdoor_inputs {
        if argmax(&predict(&tuned, backdoor)?)? != target.class_index {
            backdoor_hit = false;
        }
    }

    let pre_accuracy = pre_eval.accuracy.unwrap_or(0.0);
    let post_accuracy = post_eval.accuracy.unwrap_or(0.0);
    let report = StealthReport {
        pre_accuracy,
        post_accuracy,
        accuracy_drop: pre_accuracy - post_accuracy,
        backdoor_hit,
        per_class_recall_deltas: pre_recall
            .iter()
            .zip(&post_recall)
            .map(|(pre, post)| pre - post)
            .collect(),
    };
    Ok((tuned, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Loss;

    #[test]
    fn rejects_empty_backdoor_and_bad_target() {
        let mut rng = Rng::new(2);
        let model = Model::random(
            &[2, 4, 2],
            &[crate::nn::Activation::Relu, crate::nn::Activation::Softmax],
            &mut rng,
        )
        .unwrap();
        let ds = crate::data::make_blobs(2, 2, 6, 0.05, 3).unwrap();
        let config = TrainingConfig::new(Loss::CrossEntropy, 0.005, 5, 2).with_seed(1);
        assert!(implant_backdoor(&model, &[], TargetSpec::new(0), &config, &ds, 4).is_err());
        let trigger = Tensor::vector(vec![1.0, 0.0]);
        assert!(implant_backdoor(
            &model,
            std::slice::from_ref(&trigger),
            TargetSpec::new(5),
            &config,
            &ds,
            4
        )
        .is_err());
    }

    #[test]
    fn report_drop_matches_recomputation() {
        let mut rng = Rng::new(4);
        let model = Model::random(
            &[2, 8, 2],
            &[crate::nn::Activation::Relu, crate::nn::Activation::Softmax],
            &mut rng,
        )
        .unwrap();
        let ds = crate::data::make_blobs(2, 2, 20, 0.05, 5).unwrap();
        let config = TrainingConfig::new(Loss::CrossEntropy, 0.005, 20, 4).with_seed(6);
        let trigger = Tensor::vector(vec![1.0, 0.0]);
        let (_, report) = implant_backdoor(
            &model,
            std::slice::from_ref(&trigger),
            TargetSpec::new(1),
            &config,
            &ds,
            4,
        )
        .unwrap();
        assert!(
            (report.accuracy_drop - (report.pre_accuracy - report.post_accuracy)).abs() < 1e-15
        );
        assert_eq!(report.per_class_recall_deltas.len(), 2);
    }
}
