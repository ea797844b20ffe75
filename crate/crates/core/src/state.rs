//! Dynamical state in reduced variables and the physical fields built from it.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{d_dr, d_dz, Grid, Parity, ScalarField};

/// `u1 = v_phi / r`, `omega1 = omega_phi / r`, `psi1 = psi / r` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u1: ScalarField,
    pub omega1: ScalarField,
    pub psi1: ScalarField,
    pub t: f64,
}

impl State {
    pub fn zeros(grid: &Arc<Grid>, t: f64) -> Self {
        State {
            u1: ScalarField::zeros(grid, Parity::Even),
            omega1: ScalarField::zeros(grid, Parity::Even),
            psi1: ScalarField::zeros(grid, Parity::Even),
            t,
        }
    }

    pub fn new(u1: ScalarField, omega1: ScalarField, psi1: ScalarField, t: f64) -> Result<Self> {
        let s = State { u1, omega1, psi1, t };
        s.validate()?;
        Ok(s)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.u1.grid()
    }

    pub fn validate(&self) -> Result<()> {
        self.u1.check_same_grid(&self.omega1)?;
        self.u1.check_same_grid(&self.psi1)?;
        for (name, f) in [("u1", &self.u1), ("omega1", &self.omega1), ("psi1", &self.psi1)] {
            if f.parity() != Parity::Even {
                return Err(Error::Parity {
                    op: "State",
                    expected: Parity::Even,
                    found: f.parity(),
                });
            }
            f.ensure_finite(name)?;
        }
        if !self.t.is_finite() {
            return Err(Error::NonFinite { what: "t".into() });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.omega1.is_finite() && self.psi1.is_finite()
    }
}

/// Cylindrical velocity and vorticity components.
#[derive(Debug, Clone)]
pub struct VelocityFields {
    pub v_r: ScalarField,
    pub v_phi: ScalarField,
    pub v_z: ScalarField,
    pub om_r: ScalarField,
    pub om_phi: ScalarField,
    pub om_z: ScalarField,
    /// `v_r / r = -psi1_z`, kept in its regular form.
    pub vr_over_r: ScalarField,
}

/// Rebuilds `v` and `omega` from the reduced variables.
///
/// `v_z` is taken as `2 psi1 + r psi1_r`, the expanded form of
/// `(1/r)(r^2 psi1)_r`, so nothing is divided by `r`.
pub fn reconstruct_velocity(state: &State) -> VelocityFields {
    let psi_z = d_dz(&state.psi1);
    let psi_r = d_dr(&state.psi1);
    let u_z = d_dz(&state.u1);
    let u_r = d_dr(&state.u1);

    let v_r = psi_z.map_r(Parity::Odd, |r, p| -r * p);
    let vr_over_r = psi_z.scale(-1.0);
    let v_z = state
        .psi1
        .zip(&psi_r.times_r(), Parity::Even, |p, rp| 2.0 * p + rp);
    let v_phi = state.u1.times_r();
    let om_phi = state.omega1.times_r();
    let om_r = u_z.map_r(Parity::Odd, |r, d| -r * d);
    let om_z = state
        .u1
        .zip(&u_r.times_r(), Parity::Even, |u, ru| 2.0 * u + ru);
    VelocityFields {
        v_r,
        v_phi,
        v_z,
        om_r,
        om_phi,
        om_z,
        vr_over_r,
    }
}

/// L2 norm of `v_r,r + v_z,z + v_r/r`.
pub fn divergence_residual(vel: &VelocityFields) -> f64 {
    let div = d_dr(&vel.v_r)
        .zip(&d_dz(&vel.v_z), Parity::Even, |a, b| a + b)
        .zip(&vel.vr_over_r, Parity::Even, |a, b| a + b);
    div.l2_norm()
}

/// Contract between the evolved `omega1` and the curl of the velocity:
/// L2 norm of `r omega1 - (v_r,z - v_z,r)`.
pub fn curl_consistency_residual(state: &State) -> f64 {
    let vel = reconstruct_velocity(state);
    meridional_curl(&vel)
        .zip(&vel.om_phi, Parity::Odd, |c, w| w - c)
        .l2_norm()
}

/// `v_r,z - v_z,r` evaluated with the field stencils.
pub fn meridional_curl(vel: &VelocityFields) -> ScalarField {
    d_dz(&vel.v_r).zip(&d_dr(&vel.v_z), Parity::Odd, |a, b| a - b)
}
