//! Attacks against dense classifiers: last-layer tampering, backdoor
//! fine-tuning, input inversion, black-box random search, and
//! out-of-range probing.

mod backdoor;
mod invert;
mod probability;
mod search;
mod tamper;

pub use backdoor::{implant_backdoor, BACKDOOR_SAFE_LEARNING_RATE, DEFAULT_REPLAY_RATIO};
pub use invert::invert_input;
pub use probability::hit_probability;
pub use search::{bruteforce_search, overflow_probe};
pub use tamper::{spike_bias, zero_and_set, DEFAULT_SPIKE_MAGNITUDE};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nn::{predict, Model};
use crate::tensor::Tensor;

/// The class an attack tries to elicit (the "access granted" class).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetSpec {
    pub class_index: usize,
}

impl TargetSpec {
    pub fn new(class_index: usize) -> Self {
        TargetSpec { class_index }
    }

    pub(crate) fn validate(&self, model: &Model) -> Result<()> {
        if self.class_index >= model.output_dim() {
            return Err(Error::InvalidArgument(format!(
                "target class {} out of range for {} outputs",
                self.class_index,
                model.output_dim()
            )));
        }
        Ok(())
    }
}

/// Black-box query interface: the attacker sees output probability vectors
/// only. Every query increments the counter exactly once.
pub struct Oracle {
    query_fn: Box<dyn FnMut(&Tensor) -> Result<Tensor>>,
    queries: u64,
}

impl Oracle {
    /// Oracle over an owned model's forward pass.
    pub fn from_model(model: Model) -> Self {
        Oracle {
            query_fn: Box::new(move |x| predict(&model, x)),
            queries: 0,
        }
    }

    /// Oracle over an arbitrary query function (test instrumentation).
    pub fn from_fn(f: impl FnMut(&Tensor) -> Result<Tensor> + 'static) -> Self {
        Oracle {
            query_fn: Box::new(f),
            queries: 0,
        }
    }

    pub fn query(&mut self, x: &Tensor) -> Result<Tensor> {
        self.queries += 1;
        (self.query_fn)(x)
    }

    pub fn queries_used(&self) -> u64 {
        self.queries
    }
}

/// Per-magnitude outcome counts from an overflow probe.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MagnitudeStat {
    pub magnitude: f64,
    pub trials: usize,
    pub successes: usize,
}

/// Outcome of a query-based attack.
#[derive(Debug, Clone)]
pub struct AttackReport {
    pub success: bool,
    pub queries_used: u64,
    pub best_input: Option<Tensor>,
    pub best_confidence: f64,
    pub perturbation_linf: Option<f64>,
    pub magnitude_stats: Option<Vec<MagnitudeStat>>,
}

#[derive(Serialize)]
struct AttackReportFile<'a> {
    success: bool,
    queries_used: u64,
    best_input: Option<&'a [f64]>,
    best_confidence: f64,
    perturbation_linf: Option<f64>,
    magnitude_stats: Option<&'a [MagnitudeStat]>,
}

/// Canonical single-line JSON for an attack report.
pub fn attack_report_to_string(report: &AttackReport) -> String {
    let file = AttackReportFile {
        success: report.success,
        queries_used: report.queries_used,
        best_input: report.best_input.as_ref().map(|t| t.data()),
        best_confidence: report.best_confidence,
        perturbation_linf: report.perturbation_linf,
        magnitude_stats: report.magnitude_stats.as_deref(),
    };
    serde_json::to_string(&file).expect("report fields are always serializable")
}

/// Pre/post comparison quantifying how detectable a model edit is.
#[derive(Debug, Clone, Serialize)]
pub struct StealthReport {
    pub pre_accuracy: f64,
    pub post_accuracy: f64,
    /// `pre_accuracy - post_accuracy`.
    pub accuracy_drop: f64,
    pub backdoor_hit: bool,
    /// Per class: recall before minus recall after (positive = degraded).
    pub per_class_recall_deltas: Vec<f64>,
}

/// Canonical single-line JSON for a stealth report.
pub fn stealth_report_to_string(report: &StealthReport) -> String {
    serde_json::to_string(report).expect("report fields are always serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_counts_every_query() {
        let mut oracle = Oracle::from_fn(|x| Ok(x.clone()));
        let x = Tensor::vector(vec![0.5]);
        assert_eq!(oracle.queries_used(), 0);
        for i in 1..=5 {
            oracle.query(&x).unwrap();
            assert_eq!(oracle.queries_used(), i);
        }
    }

    #[test]
    fn report_serialization_is_canonical() {
        let report = AttackReport {
            success: true,
            queries_used: 3,
            best_input: Some(Tensor::vector(vec![0.25, 0.5])),
            best_confidence: 0.75,
            perturbation_linf: Some(0.1),
            magnitude_stats: None,
        };
        let a = attack_report_to_string(&report);
        let b = attack_report_to_string(&report);
        assert_eq!(a, b);
        assert!(a.starts_with("{\"success\":true,\"queries_used\":3"));
        assert!(a.contains("\"magnitude_stats\":null"));
    }
}
