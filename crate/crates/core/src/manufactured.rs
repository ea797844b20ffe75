//! Closed-form fields for manufactured-solution runs.
//!
//! The exact solution is
//! `u1* = h(t) U(r) cos kz`, `psi1* = g(t) P(r) sin kz`,
//! `omega1* = -(Delta + (2/r) d/dr) psi1* = g(t) W(r) sin kz`
//! with `U = P = (R^2 - r^2)^3`, so all three vanish at the wall together with
//! `W`. Radial profiles are polynomials in `r^2`, which keeps them even and
//! lets every derivative be taken exactly.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::grid::{Grid, Parity, ScalarField};

/// `sum_n c[n] r^(2n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenPoly {
    pub coeffs: Vec<f64>,
}

impl EvenPoly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        EvenPoly { coeffs }
    }

    /// `(R^2 - r^2)^m`
    pub fn wall_power(radius: f64, m: u32) -> Self {
        let a = radius * radius;
        let mut coeffs = vec![1.0];
        for _ in 0..m {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (n, &c) in coeffs.iter().enumerate() {
                next[n] += a * c;
                next[n + 1] -= c;
            }
            coeffs = next;
        }
        EvenPoly { coeffs }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let x = r * r;
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// First derivative, an odd function; evaluated directly.
    pub fn deriv(&self, r: f64) -> f64 {
        r * self.deriv_over_r().eval(r)
    }

    /// `f'(r) / r`, again even.
    pub fn deriv_over_r(&self) -> EvenPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &c)| 2.0 * n as f64 * c)
            .collect();
        EvenPoly { coeffs }
    }

    /// `f'' + (3/r) f'`
    pub fn radial_operator(&self) -> EvenPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &c)| {
                let m = 2.0 * n as f64;
                m * (m + 2.0) * c
            })
            .collect();
        EvenPoly { coeffs }
    }

    pub fn scale(&self, a: f64) -> EvenPoly {
        EvenPoly {
            coeffs: self.coeffs.iter().map(|c| a * c).collect(),
        }
    }

    pub fn add(&self, other: &EvenPoly) -> EvenPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &EvenPoly, i: usize| p.coeffs.get(i).copied().unwrap_or(0.0);
        EvenPoly {
            coeffs: (0..n).map(|i| get(self, i) + get(other, i)).collect(),
        }
    }
}

/// Values of the exact solution and its pieces at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactPoint {
    pub u1: f64,
    pub omega1: f64,
    pub psi1: f64,
    pub du1_dt: f64,
    pub domega1_dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manufactured {
    pub amplitude: f64,
    /// Axial wavenumber `2 pi m / Lz`.
    pub k: f64,
    pub nu: f64,
    u: EvenPoly,
    psi: EvenPoly,
    omega: EvenPoly,
}

impl Manufactured {
    pub fn new(radius: f64, length: f64, mode: u32, amplitude: f64, nu: f64) -> Self {
        let k = 2.0 * PI * mode as f64 / length;
        let u = EvenPoly::wall_power(radius, 3);
        let psi = EvenPoly::wall_power(radius, 3);
        let omega = psi.radial_operator().scale(-1.0).add(&psi.scale(k * k));
        Manufactured {
            amplitude,
            k,
            nu,
            u,
            psi,
            omega,
        }
    }

    pub fn for_grid(grid: &Grid, mode: u32, amplitude: f64, nu: f64) -> Self {
        Manufactured::new(grid.radius(), grid.length(), mode, amplitude, nu)
    }

    /// `h(t)` and `h'(t)`.
    fn h(&self, t: f64) -> (f64, f64) {
        let a = self.amplitude;
        (a * (1.0 + 0.5 * (2.0 * t).sin()), a * (2.0 * t).cos())
    }

    /// `g(t)` and `g'(t)`.
    fn g(&self, t: f64) -> (f64, f64) {
        let a = self.amplitude;
        (a * t.cos(), -a * t.sin())
    }

    pub fn point(&self, r: f64, z: f64, t: f64) -> ExactPoint {
        let (h, dh) = self.h(t);
        let (g, dg) = self.g(t);
        let (c, s) = ((self.k * z).cos(), (self.k * z).sin());
        let ur = self.u.eval(r);
        let wr = self.omega.eval(r);
        ExactPoint {
            u1: h * ur * c,
            omega1: g * wr * s,
            psi1: g * self.psi.eval(r) * s,
            du1_dt: dh * ur * c,
            domega1_dt: dg * wr * s,
        }
    }

    /// Analytic forcing `(F_u, F_omega)` at one point.
    pub fn forcing_at(&self, r: f64, z: f64, t: f64) -> (f64, f64) {
        let k = self.k;
        let nu = self.nu;
        let (h, dh) = self.h(t);
        let (g, dg) = self.g(t);
        let (c, s) = ((k * z).cos(), (k * z).sin());

        let (uu, up) = (self.u.eval(r), self.u.deriv(r));
        let (pp, pr) = (self.psi.eval(r), self.psi.deriv(r));
        let (ww, wp) = (self.omega.eval(r), self.omega.deriv(r));
        let mu = self.u.radial_operator().eval(r) - k * k * uu;
        let mw = self.omega.radial_operator().eval(r) - k * k * ww;

        let v_r = -r * g * pp * k * c;
        let v_z = g * (2.0 * pp + r * pr) * s;
        let u = h * uu * c;
        let u_r = h * up * c;
        let u_z = -h * uu * k * s;
        let psi_z = g * pp * k * c;
        let w_r = g * wp * s;
        let w_z = g * ww * k * c;

        let f_u = dh * uu * c + v_r * u_r + v_z * u_z - nu * h * mu * c - 2.0 * u * psi_z;
        let f_w = dg * ww * s + v_r * w_r + v_z * w_z - nu * g * mw * s - 2.0 * u * u_z;
        (f_u, f_w)
    }

    pub fn fields(&self, grid: &Arc<Grid>, t: f64) -> [ScalarField; 3] {
        [
            ScalarField::from_fn(grid, Parity::Even, |r, z| self.point(r, z, t).u1),
            ScalarField::from_fn(grid, Parity::Even, |r, z| self.point(r, z, t).omega1),
            ScalarField::from_fn(grid, Parity::Even, |r, z| self.point(r, z, t).psi1),
        ]
    }

    pub fn time_derivatives(&self, grid: &Arc<Grid>, t: f64) -> [ScalarField; 2] {
        [
            ScalarField::from_fn(grid, Parity::Even, |r, z| self.point(r, z, t).du1_dt),
            ScalarField::from_fn(grid, Parity::Even, |r, z| self.point(r, z, t).domega1_dt),
        ]
    }

    pub fn forcing(&self, grid: &Arc<Grid>, t: f64) -> [ScalarField; 2] {
        [
            ScalarField::from_fn(grid, Parity::Even, |r, z| self.forcing_at(r, z, t).0),
            ScalarField::from_fn(grid, Parity::Even, |r, z| self.forcing_at(r, z, t).1),
        ]
    }
}
