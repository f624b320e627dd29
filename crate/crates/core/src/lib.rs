//! Event graph analytics for temporal networks.
//!
//! A temporal network is a time-ordered sequence of (possibly non-dyadic)
//! timestamped events. This crate builds the *event graph* — a directed
//! acyclic graph whose vertices are events and whose edges link pairs of
//! events selected by a joining rule and weighted by their inter-event
//! time — and runs analyses on top of it:
//!
//! - [`percolation`]: temporal (weakly connected) components, their size
//!   metrics, susceptibility, and threshold scans over Δt;
//! - [`motifs`]: enumeration and counting of sequential and windowed
//!   temporal motifs;
//! - [`centrality`]: event and node communicability (walk-counting)
//!   centralities with optional temporal decay;
//! - [`decomposition`]: diagnostics for fixed-width interval discretisation;
//! - [`models`]: synthetic generators and a flattened second-order model
//!   fitted from the event graph.

pub mod centrality;
pub mod decomposition;
mod error;
pub mod events;
pub mod graph;
pub mod io;
pub mod models;
pub mod motifs;
pub mod percolation;
pub mod rules;

pub use error::{Error, Result};
pub use events::{EventSequence, HyperEvent, NodeId};
pub use graph::EventGraph;
pub use rules::JoiningRule;
