//! Design, stability analysis and simulation of disturbance-observer (DOB)
//! and reaction-force-observer (RFOB) motion control loops.
//!
//! The crate is organized bottom-up:
//!
//! - [`poly_tf`]: polynomials and transfer functions in `s`.
//! - [`observer`]: plant/observer parameters and the inner-loop bandwidth constraint.
//! - [`loop_builder`]: inner, position and force loops, in closed form and block-composed.
//! - [`stability`]: Routh–Hurwitz, root locus, zero scans and parameter maps.
//! - [`time_sim`]: nonlinear fixed-step simulation of the position and force experiments.
//! - [`config`] and [`params`]: the flat `key = value` configuration format.

pub mod config;
pub mod error;
pub mod loop_builder;
pub mod observer;
pub mod params;
pub mod poly_tf;
pub mod stability;
pub mod time_sim;

pub use error::{Error, Result};
pub use observer::{check_bandwidth_constraint, second_order_params, DesignVerdict, ObserverConfig, PlantParams};
pub use params::ParameterSet;
pub use poly_tf::{FrequencyPoint, Polynomial, TransferFunction};
