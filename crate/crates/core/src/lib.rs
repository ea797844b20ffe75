//! Axisymmetric incompressible Navier-Stokes in the reduced variables
//! `u1 = v_phi / r`, `omega1 = omega_phi / r`, `psi1 = psi / r`, together with
//! the weighted regularity functionals that are monitored along a run.

pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod grid;
pub mod io;
pub mod manufactured;
pub mod offline;
pub mod plot;
pub mod scenario;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{make_grid, Grid, GridSpec, Parity, ScalarField};
pub use dynamics::{run, Forcing, Simulation, SolverConfig};
pub use scenario::{Scenario, ScenarioKind};
pub use state::{State, VelocityFields};
