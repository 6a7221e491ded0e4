//! Characteristic analysis and desk-scale numerical evolution for a
//! first-order causal theory of relativistic viscous fluids in flat space.
//!
//! - [`eos`]: equations of state and transport-coefficient models
//! - [`kinematics`]: Minkowski tensor algebra and the viscous stress-energy tensor
//! - [`symbol`]: principal symbols, causality conditions and characteristic speeds
//! - [`evolve`]: method-of-lines evolution on a periodic torus
//! - [`cli`]: configuration and batch subcommands

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod cli;
pub mod eos;
pub mod evolve;
pub mod fd;
pub mod kinematics;
pub mod par;
pub mod sampling;
pub mod scalar;
pub mod symbol;
