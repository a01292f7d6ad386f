//! Time-harmonic eddy-current simulation of three-phase resistance furnaces
//! and reduction of the field solution to a single lumped impedance.
//!
//! Pipeline: [`mesh`] (MSH input, edges, partition) → [`fem`] (A/V edge
//! element discretization and solve) → [`fields`] (current density, Joule
//! power, terminal report) → [`lumped`] (reduced impedance, power planning).
//! [`oracles`] holds closed-form rod solutions used by [`verify`].

pub mod cli;
pub mod config;
pub mod error;
pub mod fem;
pub mod fields;
pub mod lumped;
pub mod mesh;
pub mod oracles;
pub mod phasor;
pub mod verify;

pub use config::{load_config, Config, DriveSpec, Material, MaterialTable, RegionMap};
pub use error::{Error, Result};
pub use phasor::{balanced_drive, Phasor};
