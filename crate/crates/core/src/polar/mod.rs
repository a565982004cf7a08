//! Polar code construction, the hard and soft polar transforms, and the
//! serial-decoding error model.

mod construct;
pub mod kernel;
mod transform;

pub use construct::{
    build_reliabilities, build_staircase_frozen_set, post_decoding_pe, q_function, BitChannelProfile,
    Construction, PolarCodeSpec,
};
pub use kernel::{boxplus_exact, f_tilde, g_func, hard_decision, partial_sum_combine, LLR_MAX};
pub use transform::{polar_transform, polar_transform_in_place, soft_transform, soft_transform_in_place};
