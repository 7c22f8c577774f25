//! ANN training, conversion to integrate-and-fire layers, rate encoding and
//! device-mapped inference.

mod ablation;
mod convert;
mod encode;
mod engine;
mod mlp;

pub use ablation::{ablation_report, AblationRow};
pub use convert::{convert_ann_to_snn, ConversionConfig, Normalization, SnnModel};
pub use encode::{
    encode_image, encode_poisson, RunConfig, SpikeEncoding, DEFAULT_AMPLITUDE, DEFAULT_PULSE_WIDTH,
    DEFAULT_TIME_STEPS,
};
pub use engine::{
    effective_weights, evaluate, run_inference, DeviceContext, EvalReport, Evaluation, InferenceResult, Mode,
    SnnNetwork, TraceOptions,
};
pub use mlp::{argmax, loss_and_gradients, train_ann, EpochStats, MlpModel, TrainConfig};
