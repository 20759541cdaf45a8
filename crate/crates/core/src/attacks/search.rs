//! Black-box search attacks: hill-climbing random perturbation and
//! out-of-range magnitude probing.

use crate::attacks::{AttackReport, MagnitudeStat, Oracle, TargetSpec};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tensor::{linf_distance, Tensor};

fn confidence(oracle: &mut Oracle, x: &Tensor, target: TargetSpec) -> Result<f64> {
    let out = oracle.query(x)?;
    out.data()
        .get(target.class_index)
        .copied()
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "oracle returned {} outputs, target class is {}",
                out.len(),
                target.class_index
            ))
        })
}

/// Hill-climbing random search around `seed_input`.
///
/// Each iteration perturbs the current best by a uniform draw in
/// `[-epsilon, +epsilon]` per coordinate, clamps to `[0, 1]`, queries the
/// oracle, and keeps the candidate when the target confidence improves.
/// Stops at the first confidence `>= threshold` or when `budget` queries
/// are spent; never exceeds the budget.
pub fn bruteforce_search(
    oracle: &mut Oracle,
    seed_input: &Tensor,
    epsilon: f64,
    budget: u64,
    threshold: f64,
    target: TargetSpec,
    rng: &mut Rng,
) -> Result<AttackReport> {
    if budget < 1 {
        return Err(Error::InvalidArgument("query budget must be >= 1".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "perturbation epsilon must be positive, got {epsilon}"
        )));
    }

    let mut queries = 0u64;
    let mut best = seed_input.clone();
    let mut best_confidence = confidence(oracle, &best, target)?;
    queries += 1;

    while best_confidence < threshold && queries < budget {
        let candidate = Tensor::vector(
            best.data()
                .iter()
                .map(|&v| (v + rng.uniform(-epsilon, epsilon)).clamp(0.0, 1.0))
                .collect(),
        );
        let c = confidence(oracle, &candidate, target)?;
        queries += 1;
        if c > best_confidence {
            best = candidate;
            best_confidence = c;
        }
    }

    Ok(AttackReport {
        success: best_confidence >= threshold,
        queries_used: queries,
        perturbation_linf: Some(linf_distance(seed_input, &best)?),
        best_input: Some(best),
        best_confidence,
        magnitude_stats: None,
    })
}

/// Probe with out-of-range inputs of growing magnitude.
///
/// For every magnitude `m > 1` and trial, submits a random sign pattern of
/// `+/- m` across all coordinates. All `magnitudes x trials` probes run so
/// the report carries the full per-magnitude success counts; the reported
/// input is the first successful probe (or the highest-confidence probe on
/// total failure).
pub fn overflow_probe(
    oracle: &mut Oracle,
    input_dim: usize,
    magnitudes: &[f64],
    target: TargetSpec,
    threshold: f64,
    trials_per_magnitude: usize,
    rng: &mut Rng,
) -> Result<AttackReport> {
    if magnitudes.is_empty() {
        return Err(Error::InvalidArgument("no magnitudes to probe".into()));
    }
    if let Some(&bad) = magnitudes.iter().find(|&&m| !(m > 1.0)) {
        return Err(Error::InvalidArgument(format!(
            "magnitudes must be > 1 to leave the trained range, got {bad}"
        )));
    }
    if trials_per_magnitude == 0 {
        return Err(Error::InvalidArgument("trials_per_magnitude must be >= 1".into()));
    }

    let mut stats = Vec::with_capacity(magnitudes.len());
    let mut queries = 0u64;
    let mut first_hit: Option<(Tensor, f64)> = None;
    let mut best_miss: Option<(Tensor, f64)> = None;
    for &magnitude in magnitudes {
        let mut successes = 0;
        for _ in 0..trials_per_magnitude {
            let probe = Tensor::vector(
                (0..input_dim)
                    .map(|_| {
                        if rng.next_u64() & 1 == 0 {
                            magnitude
                        } else {
                            -magnitude
                        }
                    })
                    .collect(),
            );
            let c = confidence(oracle, &probe, target)?;
            queries += 1;
            if c >= threshold {
                successes += 1;
                if first_hit.is_none() {
                    first_hit = Some((probe, c));
                }
            } else if best_miss.as_ref().map_or(true, |(_, b)| c > *b) {
                best_miss = Some((probe, c));
            }
        }
        stats.push(MagnitudeStat {
            magnitude,
            trials: trials_per_magnitude,
            successes,
        });
    }

    let success = first_hit.is_some();
    let (best_input, best_confidence) = first_hit
        .or(best_miss)
        .map(|(x, c)| (Some(x), c))
        .unwrap_or((None, 0.0));
    Ok(AttackReport {
        success,
        queries_used: queries,
        best_input,
        best_confidence,
        perturbation_linf: None,
        magnitude_stats: Some(stats),
    })
}
