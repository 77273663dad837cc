//! Seedable radio-propagation channel models.
//!
//! The crate covers the closed-form pathloss families used from 2G to 5G,
//! non-directional tapped-delay-line fading, a 3GPP/ITU-R style
//! geometry-based stochastic cluster channel, antenna-array gain modelling
//! and the 5G add-ons (LOS probability, oxygen absorption, O2I penetration,
//! blockage and spatially consistent mobility).
//!
//! Every stochastic entry point takes an explicit RNG or a seed; identical
//! seeds reproduce identical output bit for bit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod data;
pub mod error;
pub mod gscm;
pub mod link_state;
pub mod pathloss;
pub mod rng;
pub mod scenario;
pub mod spatial;
pub mod tdl;

pub use error::{Error, Result};
pub use scenario::{
    breakpoint_distance, compute_link_distances, spherical_unit_vector, CarrierSpec, LinkGeometry, LinkState,
    Position3D, ScenarioKind, SPEED_OF_LIGHT,
};
