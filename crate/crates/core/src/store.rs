//! Persistence and surgical editing of model files.
//!
//! The on-disk format is a single-line UTF-8 JSON document in canonical
//! form: fixed key order, no insignificant whitespace, arrays in layer
//! order, floats printed as shortest round-trip decimals. Saving the same
//! model therefore always produces identical bytes, and every float
//! survives a save/load round trip bit for bit.
//!
//! ```text
//! {"format_version":1,
//!  "layers":[{"in":N,"out":M,"activation":"relu|softmax|identity",
//!             "weights":[M*N floats row-major],"bias":[M floats]}, ...],
//!  "training":{"loss":"mse|cross_entropy","optimizer":"sgd","learning_rate":a}}
//! ```
//!
//! The `training` section is omitted for models that carry no training
//! configuration.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Activation, DenseLayer, Loss, Model, TrainingConfig};
use crate::tensor::Tensor;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct LayerRecord {
    #[serde(rename = "in")]
    input: usize,
    out: usize,
    activation: String,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TrainingRecord {
    loss: String,
    optimizer: String,
    learning_rate: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    layers: Vec<LayerRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    training: Option<TrainingRecord>,
}

/// Canonical serialization of a model.
pub fn model_to_string(model: &Model) -> Result<String> {
    for (k, layer) in model.layers().iter().enumerate() {
        if !layer.weights().is_finite() || !layer.bias().is_finite() {
            return Err(Error::Validation(format!(
                "layer {k} holds non-finite parameters"
            )));
        }
    }
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        layers: model
            .layers()
            .iter()
            .map(|layer| LayerRecord {
                input: layer.input_dim(),
                out: layer.output_dim(),
                activation: layer.activation().name().to_string(),
                weights: layer.weights().data().to_vec(),
                bias: layer.bias().data().to_vec(),
            })
            .collect(),
        training: model.training_config().map(|config| TrainingRecord {
            loss: config.loss.name().to_string(),
            optimizer: "sgd".to_string(),
            learning_rate: config.learning_rate,
        }),
    };
    serde_json::to_string(&file)
        .map_err(|e| Error::Validation(format!("unserializable model: {e}")))
}

/// Parse and fully validate a model document. No partially valid model is
/// ever returned.
pub fn model_from_str(text: &str) -> Result<Model> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    if file.format_version != FORMAT_VERSION {
        return Err(Error::Validation(format!(
            "unsupported format_version {}",
            file.format_version
        )));
    }
    if file.layers.is_empty() {
        return Err(Error::Validation("model file declares no layers".into()));
    }
    let mut layers = Vec::with_capacity(file.layers.len());
    for (k, record) in file.layers.iter().enumerate() {
        if record.input == 0 || record.out == 0 {
            return Err(Error::Validation(format!(
                "layer {k} declares a zero dimension"
            )));
        }
        if record.weights.len() != record.input * record.out {
            return Err(Error::Validation(format!(
                "layer {k}: {} weights for a {}x{} layer",
                record.weights.len(),
                record.out,
                record.input
            )));
        }
        if record.bias.len() != record.out {
            return Err(Error::Validation(format!(
                "layer {k}: {} bias values for {} outputs",
                record.bias.len(),
                record.out
            )));
        }
        let activation = Activation::from_name(&record.activation)
            .map_err(|_| Error::Validation(format!(
                "layer {k}: unknown activation name '{}'",
                record.activation
            )))?;
        layers.push(DenseLayer::new(
            Tensor::matrix(record.out, record.input, record.weights.clone())?,
            Tensor::vector(record.bias.clone()),
            activation,
        )?);
    }
    let mut model = Model::new(layers).map_err(|e| Error::Validation(e.to_string()))?;
    if let Some(training) = &file.training {
        if training.optimizer != "sgd" {
            return Err(Error::Validation(format!(
                "unknown optimizer name '{}'",
                training.optimizer
            )));
        }
        if !(training.learning_rate > 0.0) {
            return Err(Error::Validation(format!(
                "learning rate must be positive, got {}",
                training.learning_rate
            )));
        }
        let loss = Loss::from_name(&training.loss)?;
        model.set_training_config(Some(TrainingConfig::new(
            loss,
            training.learning_rate,
            1,
            1,
        )));
    }
    Ok(model)
}

pub fn save(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, model_to_string(model)?)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Model> {
    model_from_str(&std::fs::read_to_string(path)?)
}

/// Which parameter array of a layer an edit addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Weight,
    Bias,
}

/// Return a model differing from `model` in exactly one parameter:
/// `position` indexes row-major into the addressed array.
pub fn edit_param(
    model: &Model,
    layer: usize,
    kind: ParamKind,
    position: usize,
    value: f64,
) -> Result<Model> {
    let layer_count = model.layers().len();
    if layer >= layer_count {
        return Err(Error::InvalidArgument(format!(
            "layer {layer} out of range for a {layer_count}-layer model"
        )));
    }
    let mut edited = model.clone();
    let target = &mut edited.layers_mut()[layer];
    let slot = match kind {
        ParamKind::Weight => target.weights_mut().data_mut().get_mut(position),
        ParamKind::Bias => target.bias_mut().data_mut().get_mut(position),
    };
    match slot {
        Some(v) => *v = value,
        None => {
            return Err(Error::InvalidArgument(format!(
                "position {position} out of range in layer {layer}"
            )))
        }
    }
    Ok(edited)
}

/// Structural summary of a model.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub layer_count: usize,
    pub layers: Vec<LayerSummary>,
    pub parameters: usize,
    pub training: Option<TrainingSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LayerSummary {
    #[serde(rename = "in")]
    pub input: usize,
    pub out: usize,
    pub activation: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainingSummary {
    pub loss: String,
    pub optimizer: String,
    pub learning_rate: f64,
}

pub fn inspect(model: &Model) -> Summary {
    Summary {
        layer_count: model.layers().len(),
        layers: model
            .layers()
            .iter()
            .map(|layer| LayerSummary {
                input: layer.input_dim(),
                out: layer.output_dim(),
                activation: layer.activation().name().to_string(),
            })
            .collect(),
        parameters: model.param_count(),
        training: model.training_config().map(|config| TrainingSummary {
            loss: config.loss.name().to_string(),
            optimizer: "sgd".to_string(),
            learning_rate: config.learning_rate,
        }),
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "layers: {}", self.layer_count)?;
        for (k, layer) in self.layers.iter().enumerate() {
            writeln!(
                f,
                "  layer {k}: {} -> {}, {}",
                layer.input, layer.out, layer.activation
            )?;
        }
        writeln!(f, "parameters: {}", self.parameters)?;
        match &self.training {
            Some(t) => write!(
                f,
                "training config: loss={}, optimizer={}, learning_rate={}",
                t.loss, t.optimizer, t.learning_rate
            ),
            None => write!(f, "training config: absent"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Loss;
    use crate::rng::Rng;

    fn sample_model() -> Model {
        let mut rng = Rng::new(17);
        Model::random(
            &[3, 4, 2],
            &[Activation::Relu, Activation::Softmax],
            &mut rng,
        )
        .unwrap()
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let model = sample_model();
        let text = model_to_string(&model).unwrap();
        let back = model_from_str(&text).unwrap();
        assert!(back.bits_eq(&model));
        // Canonical: re-serializing yields identical bytes.
        assert_eq!(text, model_to_string(&back).unwrap());
    }

    #[test]
    fn training_section_roundtrips_and_is_optional() {
        let mut model = sample_model();
        let without = model_to_string(&model).unwrap();
        assert!(!without.contains("training"));
        assert!(model_from_str(&without).unwrap().training_config().is_none());

        model.set_training_config(Some(TrainingConfig::new(Loss::CrossEntropy, 0.05, 10, 4)));
        let with = model_to_string(&model).unwrap();
        assert!(with.contains("\"training\":{\"loss\":\"cross_entropy\""));
        let back = model_from_str(&with).unwrap();
        let config = back.training_config().unwrap();
        assert_eq!(config.loss, Loss::CrossEntropy);
        assert_eq!(config.learning_rate, 0.05);
    }

    #[test]
    fn handwritten_minimal_file_loads() {
        let text = r#"{"format_version":1,"layers":[{"in":3,"out":1,"activation":"relu","weights":[0.2,0.5,1.2],"bias":[0.7]}]}"#;
        let model = model_from_str(text).unwrap();
        let out = crate::nn::predict(&model, &Tensor::vector(vec![1.0, 1.0, 1.0])).unwrap();
        assert!((out.data()[0] - 2.6).abs() < 1e-12);
    }

    #[test]
    fn truncated_file_is_a_parse_error() {
        let text = model_to_string(&sample_model()).unwrap();
        let truncated = &text[..text.len() / 2];
        match model_from_str(truncated) {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_weight_length_names_layer() {
        let text = r#"{"format_version":1,"layers":[{"in":2,"out":1,"activation":"relu","weights":[1.0,2.0,3.0],"bias":[0.0]}]}"#;
        match model_from_str(text) {
            Err(Error::Validation(msg)) => assert!(msg.contains("layer 0"), "{msg}"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_names_rejected() {
        let bad_act = r#"{"format_version":1,"layers":[{"in":1,"out":1,"activation":"tanh","weights":[1.0],"bias":[0.0]}]}"#;
        assert!(matches!(model_from_str(bad_act), Err(Error::Validation(_))));
        let bad_loss = r#"{"format_version":1,"layers":[{"in":1,"out":1,"activation":"identity","weights":[1.0],"bias":[0.0]}],"training":{"loss":"hinge","optimizer":"sgd","learning_rate":0.1}}"#;
        assert!(matches!(model_from_str(bad_loss), Err(Error::Validation(_))));
    }

    #[test]
    fn broken_chain_rejected_at_load() {
        let text = r#"{"format_version":1,"layers":[{"in":3,"out":4,"activation":"relu","weights":[0,0,0,0,0,0,0,0,0,0,0,0],"bias":[0,0,0,0]},{"in":5,"out":2,"activation":"identity","weights":[0,0,0,0,0,0,0,0,0,0],"bias":[0,0]}]}"#;
        assert!(matches!(model_from_str(text), Err(Error::Validation(_))));
    }

    #[test]
    fn inspect_reports_structure() {
        let summary = inspect(&sample_model());
        assert_eq!(summary.layer_count, 2);
        assert_eq!(summary.parameters, (3 * 4 + 4) + (4 * 2 + 2));
        assert_eq!(summary.layers[0].activation, "relu");
        assert_eq!(summary.layers[1].activation, "softmax");
        let text = summary.to_string();
        assert!(text.contains("parameters: 26"));
        assert!(text.contains("training config: absent"));
    }

    #[test]
    fn edit_param_changes_exactly_one_value() {
        let model = sample_model();
        let edited = edit_param(&model, 1, ParamKind::Bias, 0, 123.5).unwrap();
        assert_eq!(edited.layers()[1].bias().data()[0], 123.5);
        // Everything else bit-identical.
        assert!(edited.layers()[0].weights().bits_eq(model.layers()[0].weights()));
        assert!(edited.layers()[0].bias().bits_eq(model.layers()[0].bias()));
        assert!(edited.layers()[1].weights().bits_eq(model.layers()[1].weights()));
        assert_eq!(
            edited.layers()[1].bias().data()[1],
            model.layers()[1].bias().data()[1]
        );

        assert!(edit_param(&model, 5, ParamKind::Bias, 0, 1.0).is_err());
        assert!(edit_param(&model, 0, ParamKind::Weight, 99, 1.0).is_err());
    }

    #[test]
    fn save_and_load_files(){
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.nn");
        let model = sample_model();
        save(&model, &path).unwrap();
        let back = load(&path).unwrap();
        assert!(back.bits_eq(&model));
        // Two saves produce byte-identical files.
        let path2 = dir.path().join("model2.nn");
        save(&model, &path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }
}
