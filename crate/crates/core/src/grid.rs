//! Truncated cylindrical mesh, volume quadrature and centered stencils.
//!
//! The radial grid is cell-centered, `r_i = (i + 1/2) dr`, so no node sits on
//! the axis. Axis values come from reflection ghosts chosen by the field
//! parity. The axial direction is periodic with `z_j = j dz`.
//!
//! Storage is row-major with `r` fastest: `values[j * nr + i]`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Outer radius of the truncated cylinder.
    pub radius: f64,
    /// Axial period.
    pub length: f64,
    pub nr: usize,
    pub nz: usize,
}

impl GridSpec {
    pub fn new(radius: f64, length: f64, nr: usize, nz: usize) -> Self {
        GridSpec {
            radius,
            length,
            nr,
            nz,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "R must be positive, got {}",
                self.radius
            )));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "Lz must be positive, got {}",
                self.length
            )));
        }
        if self.nr < 4 {
            return Err(Error::InvalidGrid(format!("nr must be >= 4, got {}", self.nr)));
        }
        if self.nz < 4 || self.nz % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "nz must be even and >= 4, got {}",
                self.nz
            )));
        }
        Ok(())
    }

    /// Same domain with both cell counts multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        GridSpec {
            nr: self.nr * factor,
            nz: self.nz * factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    spec: GridSpec,
    r: Vec<f64>,
    z: Vec<f64>,
    dr: f64,
    dz: f64,
    weights: Vec<f64>,
}

pub fn make_grid(spec: GridSpec) -> Result<Arc<Grid>> {
    Grid::new(spec).map(Arc::new)
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let dr = spec.radius / spec.nr as f64;
        let dz = spec.length / spec.nz as f64;
        let r: Vec<f64> = (0..spec.nr).map(|i| (i as f64 + 0.5) * dr).collect();
        let z: Vec<f64> = (0..spec.nz).map(|j| j as f64 * dz).collect();
        let weights = r.iter().map(|&ri| 2.0 * PI * ri * dr * dz).collect();
        Ok(Grid {
            spec,
            r,
            z,
            dr,
            dz,
            weights,
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }
    pub fn nr(&self) -> usize {
        self.spec.nr
    }
    pub fn nz(&self) -> usize {
        self.spec.nz
    }
    pub fn len(&self) -> usize {
        self.spec.nr * self.spec.nz
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn radius(&self) -> f64 {
        self.spec.radius
    }
    pub fn length(&self) -> f64 {
        self.spec.length
    }
    pub fn dr(&self) -> f64 {
        self.dr
    }
    pub fn dz(&self) -> f64 {
        self.dz
    }
    pub fn r(&self) -> &[f64] {
        &self.r
    }
    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// Volume weight `2 pi r_i dr dz` of every node in radial column `i`.
    pub fn quad_weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Meridional area element `dr dz` (no `2 pi r` factor).
    pub fn cell_area(&self) -> f64 {
        self.dr * self.dz
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.spec.nr + i
    }

    pub fn volume(&self) -> f64 {
        PI * self.spec.radius * self.spec.radius * self.spec.length
    }
}

/// Behaviour under the reflection `r -> -r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Parity of a product of two fields.
    pub fn times(self, other: Parity) -> Self {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    parity: Parity,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>, parity: Parity) -> Self {
        ScalarField {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.len()],
            parity,
        }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>, parity: Parity) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(ScalarField {
            grid: Arc::clone(grid),
            values,
            parity,
        })
    }

    /// Samples `f(r, z)` at every node.
    pub fn from_fn(grid: &Arc<Grid>, parity: Parity, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for &z in grid.z() {
            for &r in grid.r() {
                values.push(f(r, z));
            }
        }
        ScalarField {
            grid: Arc::clone(grid),
            values,
            parity,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn parity(&self) -> Parity {
        self.parity
    }
    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn same_grid(&self, other: &ScalarField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn check_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn ensure_finite(&self, what: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { what: what.into() })
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, parity: Parity, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
            parity,
        }
    }

    /// Nodewise `f(r_i, value)`.
    pub fn map_r(&self, parity: Parity, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        let nr = self.grid.nr();
        let r = self.grid.r();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| f(r[k % nr], v))
            .collect();
        ScalarField {
            grid: Arc::clone(&self.grid),
            values,
            parity,
        }
    }

    pub fn zip(&self, other: &ScalarField, parity: Parity, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        debug_assert!(self.same_grid(other));
        ScalarField {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            parity,
        }
    }

    pub fn scale(&self, a: f64) -> ScalarField {
        self.map(self.parity, |v| a * v)
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &ScalarField) {
        debug_assert!(self.same_grid(other));
        for (s, o) in self.values.iter_mut().zip(&other.values) {
            *s += a * o;
        }
    }

    /// Multiplies every node by `r_i`, flipping parity.
    pub fn times_r(&self) -> ScalarField {
        self.map_r(self.parity.flip(), |r, v| r * v)
    }

    /// Square root of `integral f^2 dx`.
    pub fn l2_norm(&self) -> f64 {
        sum_weighted(&self.grid, &self.values, |v| v * v).sqrt()
    }
}

fn sum_weighted(grid: &Grid, values: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let nr = grid.nr();
    values
        .chunks_exact(nr)
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(i, &v)| grid.quad_weight(i) * f(v))
                .sum::<f64>()
        })
        .sum()
}

/// `integral f dx` with `dx = 2 pi r dr dz`.
pub fn integrate_volume(f: &ScalarField) -> Result<f64> {
    f.ensure_finite("volume integrand")?;
    Ok(sum_weighted(&f.grid, &f.values, |v| v))
}

/// `2 pi integral f dr dz`: the volume integral of `f / r`, evaluated without
/// dividing by `r`.
pub fn integrate_meridional(f: &ScalarField) -> f64 {
    2.0 * PI * f.grid.cell_area() * f.values.iter().sum::<f64>()
}

/// Centered radial derivative.
///
/// The axis ghost reflects with the field parity. At the outer wall the ghost
/// is the quadratic extrapolation `3 f[n-1] - 3 f[n-2] + f[n-3]`, which makes
/// the last-node stencil the one-sided second-order difference and leaves the
/// result independent of the wall value.
pub fn d_dr(f: &ScalarField) -> ScalarField {
    let grid = &f.grid;
    let (nr, nz) = (grid.nr(), grid.nz());
    let inv = 0.5 / grid.dr();
    let sign = f.parity.sign();
    let mut out = vec![0.0; grid.len()];
    for j in 0..nz {
        let row = &f.values[j * nr..(j + 1) * nr];
        let dst = &mut out[j * nr..(j + 1) * nr];
        dst[0] = (row[1] - sign * row[0]) * inv;
        for i in 1..nr - 1 {
            dst[i] = (row[i + 1] - row[i - 1]) * inv;
        }
        let ghost = 3.0 * row[nr - 1] - 3.0 * row[nr - 2] + row[nr - 3];
        dst[nr - 1] = (ghost - row[nr - 2]) * inv;
    }
    ScalarField {
        grid: Arc::clone(grid),
        values: out,
        parity: f.parity.flip(),
    }
}

/// Centered axial derivative with periodic wraparound.
pub fn d_dz(f: &ScalarField) -> ScalarField {
    let grid = &f.grid;
    let (nr, nz) = (grid.nr(), grid.nz());
    let inv = 0.5 / grid.dz();
    let mut out = vec![0.0; grid.len()];
    for j in 0..nz {
        let up = (j + 1) % nz;
        let down = (j + nz - 1) % nz;
        for i in 0..nr {
            out[j * nr + i] = (f.values[up * nr + i] - f.values[down * nr + i]) * inv;
        }
    }
    ScalarField {
        grid: Arc::clone(grid),
        values: out,
        parity: f.parity,
    }
}

/// Coefficients of the discrete radial operator `d2/dr2 + (3/r) d/dr` for an
/// even field vanishing at `r = R`.
///
/// Row `i` reads `lower[i] f[i-1] + diag[i] f[i] + upper[i] f[i+1]` after the
/// axis ghost (`f[-1] = f[0]`) and the wall ghost (`f[n] = -2 f[n-1] + f[n-2]/3`,
/// the quadratic through the wall value zero) have been folded in. `lower[0]`
/// and `upper[n-1]` are zero.
#[derive(Debug, Clone)]
pub struct RadialStencil {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Weights of the wall ghost `f[n] = WALL_GHOST[0] f[n-1] + WALL_GHOST[1] f[n-2]`.
pub const WALL_GHOST: [f64; 2] = [-2.0, 1.0 / 3.0];

impl RadialStencil {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.nr();
        let h = grid.dr();
        let h2 = h * h;
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n {
            let ri = grid.r()[i];
            // plain three-point weights before ghosts are folded in
            let wm = 1.0 / h2 - 1.5 / (ri * h);
            let wp = 1.0 / h2 + 1.5 / (ri * h);
            diag[i] = -2.0 / h2;
            if i == 0 {
                diag[i] += wm;
            } else {
                lower[i] = wm;
            }
            if i == n - 1 {
                diag[i] += wp * WALL_GHOST[0];
                lower[i] += wp * WALL_GHOST[1];
            } else {
                upper[i] = wp;
            }
        }
        RadialStencil { lower, diag, upper }
    }

    #[inline]
    fn apply_row(&self, row: &[f64], i: usize) -> f64 {
        let mut acc = self.diag[i] * row[i];
        if i > 0 {
            acc += self.lower[i] * row[i - 1];
        }
        if i + 1 < row.len() {
            acc += self.upper[i] * row[i + 1];
        }
        acc
    }
}

/// Discrete `d2/dr2 + (3/r) d/dr + d2/dz2`, i.e. `Delta + (2/r) d/dr` acting on
/// the reduced variables, with the homogeneous Dirichlet wall at `r = R`.
pub fn modified_laplacian(f: &ScalarField) -> Result<ScalarField> {
    if f.parity != Parity::Even {
        return Err(Error::Parity {
            op: "modified_laplacian",
            expected: Parity::Even,
            found: f.parity,
        });
    }
    let grid = &f.grid;
    let stencil = RadialStencil::new(grid);
    Ok(apply_modified_laplacian(f, &stencil))
}

pub(crate) fn apply_modified_laplacian(f: &ScalarField, stencil: &RadialStencil) -> ScalarField {
    let grid = &f.grid;
    let (nr, nz) = (grid.nr(), grid.nz());
    let inv_dz2 = 1.0 / (grid.dz() * grid.dz());
    let mut out = vec![0.0; grid.len()];
    for j in 0..nz {
        let up = (j + 1) % nz;
        let down = (j + nz - 1) % nz;
        let row = &f.values[j * nr..(j + 1) * nr];
        for i in 0..nr {
            let axial = (f.values[up * nr + i] - 2.0 * row[i] + f.values[down * nr + i]) * inv_dz2;
            out[j * nr + i] = stencil.apply_row(row, i) + axial;
        }
    }
    ScalarField {
        grid: Arc::clone(grid),
        values: out,
        parity: Parity::Even,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(r: f64, l: f64, nr: usize, nz: usize) -> Arc<Grid> {
        make_grid(GridSpec::new(r, l, nr, nz)).unwrap()
    }

    #[test]
    fn nodes_are_cell_centered() {
        let g = grid(1.0, 1.0, 4, 4);
        assert_eq!(g.r(), &[0.125, 0.375, 0.625, 0.875]);
        assert_eq!(g.z(), &[0.0, 0.25, 0.5, 0.75]);
    }

    #[test]
    fn weights_sum_to_cylinder_volume() {
        let g = grid(2.0, 1.0, 8, 8);
        let ones = ScalarField::from_fn(&g, Parity::Even, |_, _| 1.0);
        let v = integrate_volume(&ones).unwrap();
        assert!((v - 4.0 * PI).abs() <= 1e-12 * 4.0 * PI);
        let g = grid(1.0, 1.0, 17, 6);
        let ones = ScalarField::from_fn(&g, Parity::Even, |_, _| 1.0);
        assert!((integrate_volume(&ones).unwrap() - PI).abs() <= 1e-12 * PI);
    }

    #[test]
    fn rejects_small_or_odd_counts() {
        assert!(make_grid(GridSpec::new(1.0, 1.0, 3, 4)).is_err());
        assert!(make_grid(GridSpec::new(1.0, 1.0, 4, 5)).is_err());
        assert!(make_grid(GridSpec::new(1.0, 1.0, 4, 2)).is_err());
        assert!(make_grid(GridSpec::new(0.0, 1.0, 4, 4)).is_err());
        assert!(make_grid(GridSpec::new(1.0, -1.0, 4, 4)).is_err());
    }

    #[test]
    fn integrate_zero_and_nonfinite() {
        let g = grid(1.0, 1.0, 8, 8);
        assert_eq!(integrate_volume(&ScalarField::zeros(&g, Parity::Even)).unwrap(), 0.0);
        let mut f = ScalarField::zeros(&g, Parity::Even);
        f.values_mut()[3] = f64::NAN;
        assert!(integrate_volume(&f).is_err());
    }

    #[test]
    fn integrate_r_converges_to_two_thirds_pi() {
        // 2 pi int_0^1 r * r dr = 2 pi / 3; midpoint error is -pi dr^2 / 6
        let exact = 2.0 * PI / 3.0;
        let err = |n: usize| {
            let g = grid(1.0, 1.0, n, 4);
            let f = ScalarField::from_fn(&g, Parity::Odd, |r, _| r);
            (integrate_volume(&f).unwrap() - exact).abs()
        };
        let (e1, e2) = (err(16), err(32));
        assert!(e1 < 1e-2);
        assert!((e1 / e2).log2() > 1.9);
    }

    #[test]
    fn d_dr_constant_and_quadratic() {
        let g = grid(1.3, 1.0, 10, 4);
        let c = ScalarField::from_fn(&g, Parity::Even, |_, _| 2.5);
        assert!(d_dr(&c).max_abs() < 1e-12);
        let q = ScalarField::from_fn(&g, Parity::Even, |r, _| r * r);
        let dq = d_dr(&q);
        assert_eq!(dq.parity(), Parity::Odd);
        for j in 0..g.nz() {
            for (i, &r) in g.r().iter().enumerate() {
                assert!((dq.at(i, j) - 2.0 * r).abs() < 1e-12, "i={i}");
            }
        }
    }

    #[test]
    fn d_dr_odd_ghost_at_axis() {
        let g = grid(1.0, 1.0, 8, 4);
        let f = ScalarField::from_fn(&g, Parity::Odd, |r, _| r);
        let df = d_dr(&f);
        assert_eq!(df.parity(), Parity::Even);
        assert!((df.at(0, 0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn d_dz_sine_and_cosine() {
        let k = 2.0 * PI;
        let g = grid(1.0, 1.0, 4, 64);
        let s = ScalarField::from_fn(&g, Parity::Even, |_, z| (k * z).sin());
        let ds = d_dz(&s);
        let mut err: f64 = 0.0;
        for (j, &z) in g.z().iter().enumerate() {
            err = err.max((ds.at(1, j) - k * (k * z).cos()).abs());
        }
        // (sin(k h)/h - k) / k ~ (k h)^2 / 6
        assert!(err < k * (k * g.dz()).powi(2) / 6.0 * 1.01);
        let c = ScalarField::from_fn(&g, Parity::Even, |_, z| (k * z).cos());
        assert!(d_dz(&c).at(2, 0).abs() < 1e-15);
        let cst = ScalarField::from_fn(&g, Parity::Even, |_, _| 3.0);
        assert_eq!(d_dz(&cst).max_abs(), 0.0);
    }

    #[test]
    fn modified_laplacian_checks() {
        let g = grid(1.0, 1.0, 16, 32);
        let c = ScalarField::from_fn(&g, Parity::Even, |_, _| 1.0);
        let lc = modified_laplacian(&c).unwrap();
        for j in 0..g.nz() {
            for i in 0..g.nr() - 1 {
                assert!(lc.at(i, j).abs() < 1e-10);
            }
        }
        let q = ScalarField::from_fn(&g, Parity::Even, |r, _| r * r);
        let lq = modified_laplacian(&q).unwrap();
        for j in 0..g.nz() {
            for i in 0..g.nr() - 1 {
                assert!((lq.at(i, j) - 8.0).abs() < 1e-9, "i={i} {}", lq.at(i, j));
            }
        }
        let odd = q.clone().with_parity(Parity::Odd);
        assert!(modified_laplacian(&odd).is_err());
    }

    #[test]
    fn modified_laplacian_axial_eigenfunction() {
        let k = 2.0 * PI / 2.0;
        let err = |nz: usize| {
            let g = grid(1.0, 2.0, 8, nz);
            let f = ScalarField::from_fn(&g, Parity::Even, |_, z| (k * z).cos());
            let lf = modified_laplacian(&f).unwrap();
            let mut e: f64 = 0.0;
            for j in 0..nz {
                for i in 0..g.nr() - 1 {
                    e = e.max((lf.at(i, j) + k * k * f.at(i, j)).abs());
                }
            }
            e
        };
        let (e1, e2) = (err(16), err(32));
        assert!(e2 < 0.05);
        assert!((e1 / e2).log2() > 1.9);
    }

    #[test]
    fn d_dz_is_skew_adjoint() {
        let g = grid(1.0, 1.0, 12, 16);
        let f = ScalarField::from_fn(&g, Parity::Even, |r, z| (1.0 - r * r) * (2.0 * PI * z).sin() + 0.3 * (4.0 * PI * z).cos());
        let h = ScalarField::from_fn(&g, Parity::Even, |r, z| (1.0 - r * r).powi(2) * (1.0 + (2.0 * PI * z).cos()));
        let a = integrate_volume(&f.zip(&d_dz(&h), Parity::Even, |x, y| x * y)).unwrap();
        let b = integrate_volume(&h.zip(&d_dz(&f), Parity::Even, |x, y| x * y)).unwrap();
        assert!((a + b).abs() <= 1e-10 * f.l2_norm() * h.l2_norm());
    }
}
