//! Simulation of reconfigurable holographic surfaces (RHS).
//!
//! An RHS is a series-fed leaky-wave metasurface whose elements only control
//! how much of the guided reference wave they radiate. The crate covers the
//! whole chain:
//!
//! * [`geometry`]: lattice, feeds and frequency-derived constants
//! * [`holography`]: interferogram amplitudes, PIN-diode quantization and
//!   auxiliary-pattern sidelobe suppression
//! * [`farfield`]: radiated and received far field, directivity and beam
//!   metrics, steering sweeps
//! * [`link`]: free-space link budget and an antipodal AWGN loopback
//! * [`config`] and [`export`]: file formats

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod export;
pub mod farfield;
pub mod geometry;
pub mod holography;
pub mod link;

pub use error::{Error, Result};
pub use farfield::{BeamMetrics, EvalOptions, FarFieldPattern, PatternCut};
pub use geometry::{Direction, ElementGrid, FeedPosition, Point2, RhsConfig};
pub use holography::{HolographicPattern, PinState, PinStateMap};
pub use link::{LinkBudget, LinkParams, StreamResult};
