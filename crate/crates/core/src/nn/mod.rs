//! Dense feed-forward networks: forward pass, losses, backpropagation,
//! SGD training with layer freezing, and hand-constructed interpolation
//! networks used as a correctness oracle.

mod hat;
mod loss;
mod model;
mod train;

pub use hat::build_hat_network;
pub use loss::{cost_mean, loss_cross_entropy, loss_mse, loss_value, CROSS_ENTROPY_EPS};
pub use model::{
    forward, predict, relu, relu_grad, softmax, Activation, DenseLayer, ForwardTrace, Loss,
    Model, ParamVector, TrainingConfig,
};
pub use train::{
    backprop, evaluate, input_gradient, per_class_recall, sgd_step, train, Evaluation,
    TrainingHistory,
};
