//! Hand-constructed piecewise-linear interpolation networks.
//!
//! Each interior center gets a "hat": a bump built from two ReLU hinge
//! neurons and an aggregating ReLU neuron, peaking at exactly 1 over its
//! center and falling to 0 at the neighboring centers. The output neuron
//! sums the hats scaled by the requested heights. Four extra hinge neurons
//! patch the two outermost segments so the network passes through the
//! boundary heights and extends the outermost segments linearly beyond the
//! center range instead of clamping to zero.

use crate::error::{Error, Result};
use crate::nn::model::{Activation, DenseLayer, Model};
use crate::tensor::Tensor;

/// Build a 1-input, 1-output network realizing the piecewise-linear
/// interpolant through `(centers[i], heights[i])`.
///
/// Interior centers are reproduced exactly (`forward(c_i) == heights[i]`
/// bit for bit); between adjacent centers the function is affine; beyond
/// the outermost centers the outermost segments continue linearly.
pub fn build_hat_network(centers: &[f64], heights: &[f64]) -> Result<Model> {
    let k = centers.len().saturating_sub(1);
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "hat network needs at least 3 centers, got {}",
            centers.len()
        )));
    }
    if heights.len() != centers.len() {
        return Err(Error::InvalidArgument(format!(
            "{} centers but {} heights",
            centers.len(),
            heights.len()
        )));
    }
    if centers.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(Error::InvalidArgument(
            "centers must be strictly ascending".into(),
        ));
    }

    let interior = k - 1; // centers 1 ..= k-1
    let l1_size = 2 * interior + 4;
    let l2_size = interior + 4;

    // Layer 1: hinge pairs u_i = relu(c_i - x), v_i = relu(x - c_i) for each
    // interior center, then four boundary hinges.
    let mut w1 = Vec::with_capacity(l1_size);
    let mut b1 = Vec::with_capacity(l1_size);
    for i in 1..k {
        w1.push(-1.0);
        b1.push(centers[i]); // u_i
        w1.push(1.0);
        b1.push(-centers[i]); // v_i
    }
    for (w, b) in [
        (-1.0, centers[1]),      // relu(c_1 - x)
        (-1.0, centers[0]),      // relu(c_0 - x)
        (1.0, -centers[k - 1]),  // relu(x - c_{k-1})
        (1.0, -centers[k]),      // relu(x - c_k)
    ] {
        w1.push(w);
        b1.push(b);
    }

    // Layer 2: hat aggregators h_i = relu(1 - u_i/dl - v_i/dr), then four
    // pass-through neurons for the boundary hinges (their inputs are
    // non-negative, so relu passes them unchanged).
    let mut w2 = vec![0.0; l2_size * l1_size];
    let mut b2 = vec![0.0; l2_size];
    for i in 1..k {
        let row = i - 1;
        let dl = centers[i] - centers[i - 1];
        let dr = centers[i + 1] - centers[i];
        // Nudge each slope until the hat evaluates to an exact zero at the
        // neighboring center through this exact arithmetic path; otherwise a
        // rounded 1/d leaks an ulp of the hat into the neighbor's peak.
        let slope_l = saturating_slope(1.0 / dl, dl);
        let slope_r = saturating_slope(1.0 / dr, dr);
        w2[row * l1_size + 2 * (i - 1)] = -slope_l;
        w2[row * l1_size + 2 * (i - 1) + 1] = -slope_r;
        b2[row] = 1.0;
    }
    for j in 0..4 {
        w2[(interior + j) * l1_size + 2 * interior + j] = 1.0;
    }

    // Output layer: heights on the hats, boundary-segment corrections on the
    // pass-through neurons.
    let dl0 = centers[1] - centers[0];
    let dlk = centers[k] - centers[k - 1];
    let mut w3 = Vec::with_capacity(l2_size);
    w3.extend((1..k).map(|i| heights[i]));
    w3.extend([
        heights[0] / dl0,
        -heights[1] / dl0,
        heights[k] / dlk,
        -heights[k - 1] / dlk,
    ]);

    Model::new(vec![
        DenseLayer::new(
            Tensor::matrix(l1_size, 1, w1)?,
            Tensor::vector(b1),
            Activation::Relu,
        )?,
        DenseLayer::new(
            Tensor::matrix(l2_size, l1_size, w2)?,
            Tensor::vector(b2),
            Activation::Relu,
        )?,
        DenseLayer::new(
            Tensor::matrix(1, l2_size, w3)?,
            Tensor::vector(vec![0.0]),
            Activation::Identity,
        )?,
    ])
}

/// Smallest slope >= `slope0` with `1.0 - slope * span <= 0` under f64
/// rounding, so the aggregating relu clamps exactly at the span edge.
fn saturating_slope(slope0: f64, span: f64) -> f64 {
    let mut slope = slope0;
    for _ in 0..8 {
        if 1.0 - slope * span <= 0.0 {
            return slope;
        }
        slope = slope.next_up();
    }
    unreachable!("slope nudge failed for span {span}");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::model::predict;

    fn eval(model: &Model, x: f64) -> f64 {
        predict(model, &Tensor::vector(vec![x])).unwrap().data()[0]
    }

    #[test]
    fn exact_at_interior_centers() {
        let centers = [0.0, 0.4, 1.1, 1.5, 2.9];
        let heights = [0.3, -1.2, 0.8, 2.5, -0.4];
        let model = build_hat_network(&centers, &heights).unwrap();
        for i in 1..centers.len() - 1 {
            assert_eq!(
                eval(&model, centers[i]),
                heights[i],
                "height not exact at center {i}"
            );
        }
    }

    #[test]
    fn affine_between_centers() {
        let centers = [0.0, 1.0, 2.0, 3.0];
        let heights = [1.0, 3.0, -1.0, 0.5];
        let model = build_hat_network(&centers, &heights).unwrap();
        for i in 0..centers.len() - 1 {
            let mid = 0.5 * (centers[i] + centers[i + 1]);
            let expected = 0.5 * (heights[i] + heights[i + 1]);
            assert!(
                (eval(&model, mid) - expected).abs() < 1e-12,
                "segment {i} not affine"
            );
        }
    }

    #[test]
    fn outermost_segments_extend_linearly() {
        let centers = [0.0, 1.0, 2.0];
        let heights = [0.0, 1.0, 3.0];
        let model = build_hat_network(&centers, &heights).unwrap();
        // Left slope 1, right slope 2, continued past the ends.
        assert!((eval(&model, -2.0) - (-2.0)).abs() < 1e-12);
        assert!((eval(&model, 5.0) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn sine_approximation_under_one_percent() {
        let n = 50;
        let centers: Vec<f64> = (0..n).map(|i| 3.0 * i as f64 / (n - 1) as f64).collect();
        let heights: Vec<f64> = centers.iter().map(|&c| c.sin()).collect();
        let model = build_hat_network(&centers, &heights).unwrap();
        let mut max_err = 0.0f64;
        for j in 0..=600 {
            let x = 3.0 * j as f64 / 600.0;
            max_err = max_err.max((eval(&model, x) - x.sin()).abs());
        }
        assert!(max_err < 0.01, "max grid error {max_err}");
    }

    #[test]
    fn rejects_bad_centers() {
        assert!(build_hat_network(&[0.0, 1.0], &[0.0, 1.0]).is_err());
        assert!(build_hat_network(&[0.0, 1.0, 1.0], &[0.0, 1.0, 2.0]).is_err());
        assert!(build_hat_network(&[0.0, 2.0, 1.0], &[0.0, 1.0, 2.0]).is_err());
        assert!(build_hat_network(&[0.0, 1.0, 2.0], &[0.0, 1.0]).is_err());
    }
}
