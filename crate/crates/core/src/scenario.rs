//! Initial-condition library.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::elliptic::StreamSolver;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec, Parity, ScalarField};
use crate::manufactured::Manufactured;
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Zero,
    PureSwirl,
    GaussianRing,
    Manufactured,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Zero => "zero",
            ScenarioKind::PureSwirl => "pure_swirl",
            ScenarioKind::GaussianRing => "gaussian_ring",
            ScenarioKind::Manufactured => "manufactured",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(ScenarioKind::Zero),
            "pure_swirl" => Ok(ScenarioKind::PureSwirl),
            "gaussian_ring" => Ok(ScenarioKind::GaussianRing),
            "manufactured" => Ok(ScenarioKind::Manufactured),
            other => Err(Error::UnknownScenario(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub amplitude: f64,
    pub r_center: f64,
    pub z_center: f64,
    pub width: f64,
    /// Axial mode number; the wavenumber is `2 pi mode_k / Lz`.
    pub mode_k: u32,
}

impl Scenario {
    /// Unit amplitude, centred at `(R/2, Lz/2)`, width `min(R, Lz)/5`, mode 1.
    pub fn with_defaults(kind: ScenarioKind, spec: &GridSpec) -> Self {
        Scenario {
            kind,
            amplitude: 1.0,
            r_center: 0.5 * spec.radius,
            z_center: 0.5 * spec.length,
            width: 0.2 * spec.radius.min(spec.length),
            mode_k: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let uses_width = matches!(self.kind, ScenarioKind::PureSwirl | ScenarioKind::GaussianRing);
        if !self.amplitude.is_finite() {
            return Err(Error::config("amplitude", "must be finite"));
        }
        if uses_width && !(self.width > 0.0) {
            return Err(Error::config("width", format!("must be positive, got {}", self.width)));
        }
        if uses_width && !(self.r_center.is_finite() && self.r_center >= 0.0) {
            return Err(Error::config("r_center", "must be finite and >= 0"));
        }
        if !self.z_center.is_finite() {
            return Err(Error::config("z_center", "must be finite"));
        }
        Ok(())
    }
}

/// Even part of a radial Gaussian, `exp(-(r^2 + c^2)/w^2) cosh(2 r c / w^2)`.
fn even_gaussian(r: f64, c: f64, w: f64) -> f64 {
    0.5 * ((-(r - c) * (r - c) / (w * w)).exp() + (-(r + c) * (r + c) / (w * w)).exp())
}

/// Periodic sum of axial Gaussian images.
fn periodic_gaussian(z: f64, c: f64, w: f64, length: f64) -> f64 {
    let images = (4.0 * w / length).ceil() as i64 + 1;
    (-images..=images)
        .map(|n| {
            let d = z - c - n as f64 * length;
            (-d * d / (w * w)).exp()
        })
        .sum()
}

/// Builds the initial state and sets `psi1` from `omega1`.
pub fn init_scenario(s: &Scenario, grid: &Arc<Grid>) -> Result<State> {
    init_with_solver(s, &StreamSolver::new(grid))
}

pub fn init_with_solver(s: &Scenario, solver: &StreamSolver) -> Result<State> {
    s.validate()?;
    let grid = solver.grid();
    let (a, w) = (s.amplitude, s.width);
    let lz = grid.length();
    let (u1, omega1) = match s.kind {
        ScenarioKind::Zero => (
            ScalarField::zeros(grid, Parity::Even),
            ScalarField::zeros(grid, Parity::Even),
        ),
        ScenarioKind::PureSwirl => {
            let k = 2.0 * PI * s.mode_k as f64 / lz;
            let u1 = ScalarField::from_fn(grid, Parity::Even, |r, z| {
                a * (k * z).cos() * even_gaussian(r, s.r_center, w)
            });
            (u1, ScalarField::zeros(grid, Parity::Even))
        }
        ScenarioKind::GaussianRing => {
            let profile = ScalarField::from_fn(grid, Parity::Even, |r, z| {
                a * even_gaussian(r, s.r_center, w) * periodic_gaussian(z, s.z_center, w, lz)
            });
            (profile.clone(), profile)
        }
        ScenarioKind::Manufactured => {
            // viscosity only enters the forcing
            let m = Manufactured::for_grid(grid, s.mode_k, a, 0.0);
            let [u1, omega1, _] = m.fields(grid, 0.0);
            (u1, omega1)
        }
    };
    let psi1 = solver.solve(&omega1)?;
    State::new(u1, omega1, psi1, 0.0)
}
