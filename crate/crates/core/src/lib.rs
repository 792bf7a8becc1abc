//! Free-particle dispersive blowup: exact spectral propagation, closed-form
//! wave packets, Bohmian trajectories and width diagnostics.

pub mod analysis;
pub mod bohm;
pub mod error;
pub mod io;
pub mod packets;
pub mod propagator;
pub mod scenario;
pub mod specfun;
pub mod svg;

pub use error::{Error, Result};
pub use packets::{
    GaussianSpec, PacketSpec, RectangularSpec, SingularSpec, TruncatedSingularSpec, UnitSystem,
};
pub use propagator::{FieldSource, Propagator, SpatialGrid, SpectralEvolver, WaveField};
