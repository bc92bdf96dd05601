//! Transient 1D channel flow as a sequence of QUBO problems.
//!
//! Each implicit time step is a tridiagonal system `A u = b`. The unknowns
//! are written in fixed point ([`fixed_point`]), the system becomes a binary
//! least-squares problem and then a QUBO ([`qubo`]). Annealer-style
//! samplers ([`samplers`]) return distributions of states, which are
//! collapsed to profiles ([`selection`]) and compared against the
//! double-precision solve ([`channel_flow`], [`analysis`]).
//! [`experiment`] drives whole runs and parameter sweeps.

pub mod analysis;
pub mod channel_flow;
pub mod error;
pub mod experiment;
pub mod fixed_point;
pub mod qubo;
pub mod samplers;
pub mod selection;

pub use error::{Error, Result};
