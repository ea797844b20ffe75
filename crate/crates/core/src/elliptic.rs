//! Stream-function solve `-(Delta psi1 + (2/r) psi1_r) = omega1`.
//!
//! The periodic second difference in `z` is diagonalised by a DFT; every
//! axial mode then leaves one real tridiagonal system in `r`, solved by the
//! Thomas algorithm.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{apply_modified_laplacian, d_dz, integrate_meridional, Grid, Parity, RadialStencil, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticReport {
    pub residual_l2: f64,
    /// Number of axial modes solved.
    pub modes: usize,
    pub ratio_a_over_b: Option<f64>,
}

/// Both sides of the instantaneous weighted estimate
/// `int v_r^2 / r^3 dx <= c int omega_phi^2 / r dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriteriaRatio {
    pub a: f64,
    pub b: f64,
    pub ratio: f64,
}

/// Cached FFT plans and radial stencil for one grid.
#[derive(Clone)]
pub struct StreamSolver {
    grid: Arc<Grid>,
    stencil: RadialStencil,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Eigenvalues of the periodic second difference, one per mode (all <= 0).
    axial_eigen: Vec<f64>,
}

impl std::fmt::Debug for StreamSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StreamSolver")
            .field("spec", &self.grid.spec())
            .finish_non_exhaustive()
    }
}

impl StreamSolver {
    pub fn new(grid: &Arc<Grid>) -> Self {
        let nz = grid.nz();
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(nz);
        let inverse = planner.plan_fft_inverse(nz);
        let dz = grid.dz();
        let axial_eigen = (0..nz)
            .map(|k| {
                let s = (PI * k as f64 / nz as f64).sin();
                -4.0 * s * s / (dz * dz)
            })
            .collect();
        StreamSolver {
            grid: Arc::clone(grid),
            stencil: RadialStencil::new(grid),
            forward,
            inverse,
            axial_eigen,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn stencil(&self) -> &RadialStencil {
        &self.stencil
    }

    pub fn solve(&self, omega1: &ScalarField) -> Result<ScalarField> {
        if !Arc::ptr_eq(omega1.grid(), &self.grid) && **omega1.grid() != *self.grid {
            return Err(Error::GridMismatch);
        }
        if omega1.parity() != Parity::Even {
            return Err(Error::Parity {
                op: "solve_stream",
                expected: Parity::Even,
                found: omega1.parity(),
            });
        }
        omega1.ensure_finite("omega1")?;

        let (nr, nz) = (self.grid.nr(), self.grid.nz());
        // spectral[k * nr + i]: mode k of radial column i
        let mut spectral = vec![Complex64::new(0.0, 0.0); nr * nz];
        let mut line = vec![Complex64::new(0.0, 0.0); nz];
        for i in 0..nr {
            for j in 0..nz {
                line[j] = Complex64::new(omega1.at(i, j), 0.0);
            }
            self.forward.process(&mut line);
            for k in 0..nz {
                spectral[k * nr + i] = line[k];
            }
        }

        let mut sub = vec![0.0; nr];
        let mut diag = vec![0.0; nr];
        let mut sup = vec![0.0; nr];
        for k in 0..nz {
            // -(radial + lambda_k) psi_hat = omega_hat
            for i in 0..nr {
                sub[i] = -self.stencil.lower[i];
                diag[i] = -self.stencil.diag[i] - self.axial_eigen[k];
                sup[i] = -self.stencil.upper[i];
            }
            let rhs = &mut spectral[k * nr..(k + 1) * nr];
            thomas(&sub, &diag, &sup, rhs).map_err(|_| Error::SingularSystem { mode: k })?;
        }

        let scale = 1.0 / nz as f64;
        let mut out = vec![0.0; nr * nz];
        for i in 0..nr {
            for k in 0..nz {
                line[k] = spectral[k * nr + i];
            }
            self.inverse.process(&mut line);
            for j in 0..nz {
                out[j * nr + i] = line[j].re * scale;
            }
        }
        ScalarField::from_values(&self.grid, out, Parity::Even)
    }

    pub fn solve_with_report(&self, omega1: &ScalarField) -> Result<(ScalarField, EllipticReport)> {
        let psi1 = self.solve(omega1)?;
        let residual_l2 = self.residual(&psi1, omega1)?;
        Ok((
            psi1,
            EllipticReport {
                residual_l2,
                modes: self.grid.nz(),
                ratio_a_over_b: None,
            },
        ))
    }

    pub fn residual(&self, psi1: &ScalarField, omega1: &ScalarField) -> Result<f64> {
        psi1.check_same_grid(omega1)?;
        let lap = apply_modified_laplacian(psi1, &self.stencil);
        Ok(lap.zip(omega1, Parity::Even, |l, w| l + w).l2_norm())
    }

    pub fn criteria_ratio(&self, omega1: &ScalarField) -> Result<CriteriaRatio> {
        let psi1 = self.solve(omega1)?;
        let a = criterion_a_from_psi(&psi1);
        let b = criterion_b_from_omega(omega1);
        let ratio = if b > 0.0 {
            a / b
        } else if a == 0.0 {
            0.0
        } else {
            return Err(Error::Contract(format!(
                "stream solve produced A = {a} from omega1 with B = 0"
            )));
        };
        Ok(CriteriaRatio { a, b, ratio })
    }
}

/// One-shot stream solve; builds the FFT plans on every call.
pub fn solve_stream(omega1: &ScalarField) -> Result<ScalarField> {
    StreamSolver::new(omega1.grid()).solve(omega1)
}

/// `|| omega1 + (Delta + (2/r) d/dr) psi1 ||_L2`.
pub fn stream_residual(psi1: &ScalarField, omega1: &ScalarField) -> Result<f64> {
    psi1.check_same_grid(omega1)?;
    let lap = crate::grid::modified_laplacian(psi1)?;
    Ok(lap.zip(omega1, Parity::Even, |l, w| l + w).l2_norm())
}

pub fn criteria_ratio(omega1: &ScalarField) -> Result<CriteriaRatio> {
    StreamSolver::new(omega1.grid()).criteria_ratio(omega1)
}

/// `int v_r^2 / r^3 dx = 2 pi int int psi1_z^2 dr dz`.
pub(crate) fn criterion_a_from_psi(psi1: &ScalarField) -> f64 {
    let pz = d_dz(psi1);
    integrate_meridional(&pz.map(Parity::Even, |v| v * v))
}

/// `int omega_phi^2 / r dx = 2 pi int int r^2 omega1^2 dr dz`.
pub(crate) fn criterion_b_from_omega(omega1: &ScalarField) -> f64 {
    integrate_meridional(&omega1.map_r(Parity::Even, |r, w| r * r * w * w))
}

#[derive(Debug)]
pub(crate) struct Singular;

/// Thomas algorithm for a real tridiagonal matrix and complex right-hand side.
/// `sub[0]` and `sup[n-1]` are ignored. The solution overwrites `rhs`.
pub(crate) fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [Complex64]) -> Result<(), Singular> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut denom = diag[0];
    if denom.abs() < f64::MIN_POSITIVE {
        return Err(Singular);
    }
    c[0] = sup[0] / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * c[i - 1];
        if denom.abs() < f64::MIN_POSITIVE || !denom.is_finite() {
            return Err(Singular);
        }
        c[i] = if i + 1 < n { sup[i] / denom } else { 0.0 };
        let prev = rhs[i - 1];
        rhs[i] = (rhs[i] - prev * sub[i]) / denom;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= next * c[i];
    }
    Ok(())
}
