//! Simulation of a Rydberg manifold used as a qudit in the wave-packet
//! (Kepler) basis, and compilation of packet-basis unitaries into pulse
//! schedules.

pub mod basis;
pub mod error;
pub mod evolution;
pub mod gates;
pub mod integrate;
pub mod manifold;
pub mod pulse;
pub mod scenarios;
pub mod trace;
pub mod units;

pub use basis::{AmplitudeVector, BasisTag};
pub use error::{Error, Result};
pub use manifold::{ManifoldSpec, SpectrumMode, TimeScales};
pub use pulse::{PulseSpec, SimulationState, Storage};
