//! HiGCN: per-order learnable polynomial filters over FP adjacencies, per-order
//! feature transforms, concatenation and an output map.
//!
//! For order `p` the filtered signal is `S_p = Σ_k γ_{p,k} Ã_p^k X`, transformed by
//! `Θ_p` (one linear map, or two with a rectifier between). The per-order outputs
//! are concatenated into `Z` and mapped by `W` to the output head.
//!
//! Gradients are reverse-mode through a fixed tape of intermediates; there is
//! no general autodiff.

mod adam;
mod checkpoint;
mod model;
mod params;

pub use adam::{adam_step, adam_update, AdamConfig, AdamState};
pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, CheckpointHeader};
pub use model::{
    backward, embed, embed_backward, forward, loss_and_grad, loss_and_grad_with_tape, objective_value, EmbedTape, ForwardTape, Objective, PetalTape,
    WeightDecay,
};
pub use params::{gamma_init, init_params, strength, Head, HigcnConfig, HigcnParams, Transform};
