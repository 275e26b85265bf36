#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Secrecy outage analysis for satellite downlinks protected by a
//! cooperative jamming relay.
//!
//! A satellite serves a ground user (Bob) while an eavesdropper (Eve) listens
//! over a statistically identical link. A multi-antenna ground relay radiates
//! artificial noise in the null space of its channel to Bob, so only Eve is
//! jammed. The crate covers channel sampling, the special functions behind
//! the outage laws, relay selection, power allocation and the experiment
//! runner that produces SOP curves.

pub mod channel;
pub mod error;
pub mod experiments;
pub mod numerics;
pub mod power_allocation;
pub mod relay_selection;
pub mod rng;
pub mod secrecy;

pub use channel::{ChannelModel, ChannelSpec, ComplexVector, NullSpaceBasis, RelayLinkModel};
pub use error::{Error, Result};
pub use experiments::{FigureId, Scenario, Scheme, SopCurve, SopPoint};
pub use numerics::ToleranceConfig;
pub use power_allocation::{AllocationMethod, AllocationResult, TraversalConfig};
pub use relay_selection::RelayEnsemble;
pub use rng::{LinkLabel, RngStreams};
pub use secrecy::{
    LinkSetup, PowerSplit, ResidualModel, SecrecyParams, SnrBundle, SopEstimate, SopMethod,
};
