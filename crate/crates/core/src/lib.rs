//! Atemporal diagrams for quantum circuits.
//!
//! Objects are dense complex tensors whose legs are ket (open) or bra
//! (closed) nodes on labelled Hilbert spaces. On top of the contraction
//! engine the crate provides map-state duality and the inverse of an
//! entangled ket, channel operators (Kraus sets, transition and dynamical
//! operators, complete-positivity tests), standard and unambiguous
//! teleportation, and the cross-operator rank census for two-qubit
//! unitaries. A small line-oriented text format describes diagrams; see
//! [`dsl`].

pub mod census;
pub mod channels;
pub mod cli;
pub mod diagram;
pub mod duality;
pub mod dsl;
pub mod error;
pub mod linalg;
pub mod protocols;
pub mod sampling;
pub mod tensor;

pub use diagram::{Diagram, Edge, LegRef};
pub use error::{Error, Result};
pub use tensor::{Leg, Polarity, Positivity, Space, SpaceRegistry, Tensor};
