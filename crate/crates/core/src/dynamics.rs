//! Evolution of `(u1, omega1)` with an explicit SSP-RK3 stepper.
//!
//! ```text
//! u1_t     + v . grad u1     = nu (Delta + (2/r) d/dr) u1     + 2 u1 psi1_z
//! omega1_t + v . grad omega1 = nu (Delta + (2/r) d/dr) omega1 + 2 u1 u1_z
//! ```
//!
//! Advection uses the centered stencils of [`crate::grid`]; `psi1` is
//! recomputed from `omega1` after every stage.

use std::sync::Arc;

use crate::diagnostics::{CriteriaSeries, MonitorRow, SeriesMeta};
use crate::elliptic::StreamSolver;
use crate::error::{Error, Result};
use crate::grid::{apply_modified_laplacian, d_dr, d_dz, make_grid, Grid, GridSpec, Parity, ScalarField};
use crate::manufactured::Manufactured;
use crate::scenario::{init_with_solver, Scenario, ScenarioKind};
use crate::state::State;

/// Extra source terms, only meaningful for the manufactured scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Forcing {
    #[default]
    None,
    /// Continuous forcing of the closed-form solution.
    Analytic,
    /// Forcing that makes the sampled closed form an exact solution of the
    /// spatially discrete system, leaving only the time-stepping error.
    SemiDiscrete,
}

impl Forcing {
    pub fn name(self) -> &'static str {
        match self {
            Forcing::None => "none",
            Forcing::Analytic => "analytic",
            Forcing::SemiDiscrete => "semidiscrete",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub nu: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub grid: GridSpec,
    pub scenario: Scenario,
    /// Steps between monitor samples.
    pub output_every: usize,
    /// Exponent of the weighted-swirl monitor.
    pub s: u32,
    pub forcing: Forcing,
    /// Monitor samples between stored snapshots.
    pub snapshot_every: usize,
}

impl SolverConfig {
    pub fn new(grid: GridSpec, kind: ScenarioKind, nu: f64, cfl: f64, t_end: f64) -> Self {
        SolverConfig {
            nu,
            cfl,
            t_end,
            grid,
            scenario: Scenario::with_defaults(kind, &grid),
            output_every: 10,
            s: 4,
            forcing: Forcing::None,
            snapshot_every: 1,
        }
    }

    pub fn forcing_enabled(&self) -> bool {
        self.forcing != Forcing::None
    }

    pub fn validate(&self) -> Result<()> {
        self.grid
            .validate()
            .map_err(|e| Error::config("grid", e.to_string()))?;
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return Err(Error::config("nu", format!("must be > 0, got {}", self.nu)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::config("cfl", format!("must lie in (0, 1], got {}", self.cfl)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::config("t_end", format!("must be >= 0, got {}", self.t_end)));
        }
        if self.output_every == 0 {
            return Err(Error::config("output_every", "must be >= 1"));
        }
        if self.snapshot_every == 0 {
            return Err(Error::config("snapshot_every", "must be >= 1"));
        }
        if self.s < 3 {
            return Err(Error::config("s", format!("must be >= 3, got {}", self.s)));
        }
        if self.forcing_enabled() && self.scenario.kind != ScenarioKind::Manufactured {
            return Err(Error::config("forcing", "only available for the manufactured scenario"));
        }
        self.scenario.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub du1: ScalarField,
    pub domega1: ScalarField,
}

/// Right-hand sides and stepping for one configuration and grid.
#[derive(Debug, Clone)]
pub struct Integrator {
    cfg: SolverConfig,
    solver: StreamSolver,
    mms: Option<Manufactured>,
}

impl Integrator {
    pub fn new(cfg: &SolverConfig, grid: &Arc<Grid>) -> Result<Self> {
        cfg.validate()?;
        if grid.spec() != cfg.grid {
            return Err(Error::GridMismatch);
        }
        let mms = cfg.forcing_enabled().then(|| {
            Manufactured::for_grid(grid, cfg.scenario.mode_k, cfg.scenario.amplitude, cfg.nu)
        });
        Ok(Integrator {
            cfg: cfg.clone(),
            solver: StreamSolver::new(grid),
            mms,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn solver(&self) -> &StreamSolver {
        &self.solver
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.solver.grid()
    }

    fn unforced(&self, state: &State) -> Result<Tendency> {
        for (name, f) in [("u1", &state.u1), ("omega1", &state.omega1), ("psi1", &state.psi1)] {
            f.ensure_finite(name)?;
        }
        let grid = self.grid();
        let nr = grid.nr();
        let r = grid.r();
        let nu = self.cfg.nu;

        let psi_z = d_dz(&state.psi1);
        let psi_r = d_dr(&state.psi1);
        let u_r = d_dr(&state.u1);
        let u_z = d_dz(&state.u1);
        let w_r = d_dr(&state.omega1);
        let w_z = d_dz(&state.omega1);
        let lap_u = apply_modified_laplacian(&state.u1, self.solver.stencil());
        let lap_w = apply_modified_laplacian(&state.omega1, self.solver.stencil());

        let (psi, u) = (state.psi1.values(), state.u1.values());
        let (pz, pr) = (psi_z.values(), psi_r.values());
        let mut du = vec![0.0; grid.len()];
        let mut dw = vec![0.0; grid.len()];
        for k in 0..grid.len() {
            let ri = r[k % nr];
            let v_r = -ri * pz[k];
            let v_z = 2.0 * psi[k] + ri * pr[k];
            du[k] = -(v_r * u_r.values()[k] + v_z * u_z.values()[k])
                + nu * lap_u.values()[k]
                + 2.0 * u[k] * pz[k];
            dw[k] = -(v_r * w_r.values()[k] + v_z * w_z.values()[k])
                + nu * lap_w.values()[k]
                + 2.0 * u[k] * u_z.values()[k];
        }
        let t = Tendency {
            du1: ScalarField::from_values(grid, du, Parity::Even)?,
            domega1: ScalarField::from_values(grid, dw, Parity::Even)?,
        };
        t.du1.ensure_finite("du1")?;
        t.domega1.ensure_finite("domega1")?;
        Ok(t)
    }

    /// Forcing at time `t`, if enabled.
    pub fn forcing(&self, t: f64) -> Result<Option<Tendency>> {
        let Some(m) = &self.mms else { return Ok(None) };
        let grid = self.grid();
        let [du1, domega1] = match self.cfg.forcing {
            Forcing::None => return Ok(None),
            Forcing::Analytic => m.forcing(grid, t),
            Forcing::SemiDiscrete => {
                let [u1, omega1, _] = m.fields(grid, t);
                let psi1 = self.solver.solve(&omega1)?;
                let exact = State { u1, omega1, psi1, t };
                let discrete = self.unforced(&exact)?;
                let [mut fu, mut fw] = m.time_derivatives(grid, t);
                fu.axpy(-1.0, &discrete.du1);
                fw.axpy(-1.0, &discrete.domega1);
                [fu, fw]
            }
        };
        Ok(Some(Tendency { du1, domega1 }))
    }

    pub fn rhs(&self, state: &State, t: f64) -> Result<Tendency> {
        let mut tend = self.unforced(state)?;
        if let Some(f) = self.forcing(t)? {
            tend.du1.axpy(1.0, &f.du1);
            tend.domega1.axpy(1.0, &f.domega1);
        }
        Ok(tend)
    }

    /// Explicit time-step limit, clamped to the time left before `t_end`.
    pub fn stable_dt(&self, state: &State) -> f64 {
        let grid = self.grid();
        let remaining = (self.cfg.t_end - state.t).max(0.0);
        let (dr, dz) = (grid.dr(), grid.dz());
        let mut limit = f64::INFINITY;
        if self.cfg.nu > 0.0 {
            let (dr2, dz2) = (dr * dr, dz * dz);
            limit = limit.min(dr2 * dz2 / (2.0 * self.cfg.nu * (dr2 + dz2)));
        }
        let psi_z = d_dz(&state.psi1);
        let psi_r = d_dr(&state.psi1);
        let nr = grid.nr();
        let (mut vr_max, mut vz_max) = (0.0f64, 0.0f64);
        for k in 0..grid.len() {
            let ri = grid.r()[k % nr];
            vr_max = vr_max.max((ri * psi_z.values()[k]).abs());
            vz_max = vz_max.max((2.0 * state.psi1.values()[k] + ri * psi_r.values()[k]).abs());
        }
        if vr_max > 0.0 {
            limit = limit.min(dr / vr_max);
        }
        if vz_max > 0.0 {
            limit = limit.min(dz / vz_max);
        }
        (self.cfg.cfl * limit).min(remaining)
    }

    /// One SSP-RK3 step of size `dt`.
    pub fn step(&self, state: &State, dt: f64) -> Result<State> {
        let t0 = state.t;
        let abort = |stage: usize, e: Error| Error::Aborted {
            t: t0,
            stage,
            reason: e.to_string(),
        };
        let stage = |base: &State, t: f64, id: usize| -> Result<Tendency> {
            self.rhs(base, t).map_err(|e| abort(id, e))
        };
        let finish = |u1: ScalarField, omega1: ScalarField, t: f64, id: usize| -> Result<State> {
            u1.ensure_finite("u1").map_err(|e| abort(id, e))?;
            omega1.ensure_finite("omega1").map_err(|e| abort(id, e))?;
            let psi1 = self.solver.solve(&omega1).map_err(|e| abort(id, e))?;
            Ok(State { u1, omega1, psi1, t })
        };
        let combine = |a: f64, x: &ScalarField, b: f64, y: &ScalarField, c: f64, k: &ScalarField| {
            let mut out = x.scale(a);
            out.axpy(b, y);
            out.axpy(c, k);
            out
        };

        let k1 = stage(state, t0, 1)?;
        let s1 = finish(
            combine(1.0, &state.u1, 0.0, &state.u1, dt, &k1.du1),
            combine(1.0, &state.omega1, 0.0, &state.omega1, dt, &k1.domega1),
            t0 + dt,
            1,
        )?;
        let k2 = stage(&s1, t0 + dt, 2)?;
        let s2 = finish(
            combine(0.75, &state.u1, 0.25, &s1.u1, 0.25 * dt, &k2.du1),
            combine(0.75, &state.omega1, 0.25, &s1.omega1, 0.25 * dt, &k2.domega1),
            t0 + 0.5 * dt,
            2,
        )?;
        let k3 = stage(&s2, t0 + 0.5 * dt, 3)?;
        let third = 1.0 / 3.0;
        let twothirds = 2.0 / 3.0;
        finish(
            combine(third, &state.u1, twothirds, &s2.u1, twothirds * dt, &k3.du1),
            combine(third, &state.omega1, twothirds, &s2.omega1, twothirds * dt, &k3.domega1),
            t0 + dt,
            3,
        )
    }
}

pub fn rhs(state: &State, cfg: &SolverConfig, t: f64) -> Result<Tendency> {
    Integrator::new(cfg, state.grid())?.rhs(state, t)
}

pub fn stable_dt(state: &State, cfg: &SolverConfig) -> Result<f64> {
    Ok(Integrator::new(cfg, state.grid())?.stable_dt(state))
}

pub fn step(state: &State, dt: f64, cfg: &SolverConfig) -> Result<State> {
    Integrator::new(cfg, state.grid())?.step(state, dt)
}

/// What one call to [`Simulation::advance`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Advance {
    /// Already at `t_end`; nothing happened.
    Finished,
    Stepped,
    /// Stepped and appended a monitor row.
    Sampled,
}

/// Stateful driver: scenario setup, stepping and monitor sampling.
#[derive(Debug, Clone)]
pub struct Simulation {
    integrator: Integrator,
    state: State,
    series: CriteriaSeries,
    steps: usize,
}

impl Simulation {
    pub fn new(cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = make_grid(cfg.grid)?;
        let integrator = Integrator::new(cfg, &grid)?;
        let state = init_with_solver(&cfg.scenario, integrator.solver())?;
        let mut series = CriteriaSeries::new(SeriesMeta {
            grid: cfg.grid,
            nu: cfg.nu,
            scenario: cfg.scenario.kind.name().to_string(),
            s: cfg.s,
        });
        series.sample(&state)?;
        Ok(Simulation {
            integrator,
            state,
            series,
            steps: 0,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        self.integrator.config()
    }
    pub fn integrator(&self) -> &Integrator {
        &self.integrator
    }
    pub fn state(&self) -> &State {
        &self.state
    }
    pub fn series(&self) -> &CriteriaSeries {
        &self.series
    }
    pub fn into_parts(self) -> (State, CriteriaSeries) {
        (self.state, self.series)
    }
    pub fn steps(&self) -> usize {
        self.steps
    }
    pub fn latest_row(&self) -> &MonitorRow {
        self.series.last().expect("initial row is always present")
    }

    pub fn is_finished(&self) -> bool {
        self.state.t >= self.config().t_end
    }

    /// True when the latest monitor row should also be stored as a snapshot.
    pub fn snapshot_due(&self) -> bool {
        self.is_finished() || (self.series.len() - 1) % self.config().snapshot_every == 0
    }

    pub fn advance(&mut self) -> Result<Advance> {
        if self.is_finished() {
            return Ok(Advance::Finished);
        }
        let t_end = self.config().t_end;
        let dt = self.integrator.stable_dt(&self.state);
        if !(dt > 0.0) {
            return Err(Error::Aborted {
                t: self.state.t,
                stage: 0,
                reason: format!("time step collapsed to {dt}"),
            });
        }
        let mut next = self.integrator.step(&self.state, dt)?;
        if dt >= t_end - self.state.t {
            next.t = t_end;
        }
        self.state = next;
        self.steps += 1;
        if self.steps % self.config().output_every == 0 || self.is_finished() {
            self.series.sample(&self.state)?;
            Ok(Advance::Sampled)
        } else {
            Ok(Advance::Stepped)
        }
    }

    /// Steps to `t_end`, calling `on_sample` after every appended row.
    pub fn run_to_end(&mut self, mut on_sample: impl FnMut(&Simulation) -> Result<()>) -> Result<()> {
        loop {
            match self.advance()? {
                Advance::Finished => return Ok(()),
                Advance::Stepped => {}
                Advance::Sampled => on_sample(self)?,
            }
        }
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub final_state: State,
    pub series: CriteriaSeries,
    /// States at the rows selected by `snapshot_every`, the first and the last.
    pub snapshots: Vec<State>,
    /// Set when stepping stopped early; everything above is the partial run.
    pub abort: Option<Error>,
}

/// Runs a configuration in memory. Setup errors are returned as `Err`;
/// failures while stepping end the run and are reported in `abort`.
pub fn run(cfg: &SolverConfig) -> Result<RunOutput> {
    let mut sim = Simulation::new(cfg)?;
    let mut snapshots = vec![sim.state().clone()];
    let abort = sim
        .run_to_end(|s| {
            if s.snapshot_due() {
                snapshots.push(s.state().clone());
            }
            Ok(())
        })
        .err();
    let (final_state, series) = sim.into_parts();
    Ok(RunOutput {
        final_state,
        series,
        snapshots,
        abort,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(n: usize, kind: ScenarioKind, nu: f64) -> SolverConfig {
        SolverConfig::new(GridSpec::new(1.0, 1.0, n, n), kind, nu, 0.5, 0.1)
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let c = cfg(8, ScenarioKind::Zero, 0.3);
        let grid = make_grid(c.grid).unwrap();
        let it = Integrator::new(&c, &grid).unwrap();
        let s = State::zeros(&grid, 0.0);
        let t = it.rhs(&s, 0.0).unwrap();
        assert_eq!(t.du1.max_abs() + t.domega1.max_abs(), 0.0);
        let next = it.step(&s, 1e-3).unwrap();
        assert_eq!(next.u1.max_abs() + next.omega1.max_abs() + next.psi1.max_abs(), 0.0);
        assert_eq!(next.t, 1e-3);
    }

    #[test]
    fn axial_cosine_tendencies() {
        let c = cfg(16, ScenarioKind::Zero, 1.0);
        let grid = make_grid(c.grid).unwrap();
        let it = Integrator::new(&c, &grid).unwrap();
        let k = 2.0 * PI;
        let mut s = State::zeros(&grid, 0.0);
        s.u1 = ScalarField::from_fn(&grid, Parity::Even, |_, z| (k * z).cos());
        let t = it.rhs(&s, 0.0).unwrap();
        // discrete symbols of the periodic second and first differences
        let h = grid.dz();
        let lam = -4.0 * (0.5 * k * h).sin().powi(2) / (h * h);
        let d1 = (k * h).sin() / h;
        // interior columns see no wall ghost of a constant-in-r profile
        for j in 0..grid.nz() {
            let z = grid.z()[j];
            for i in 0..grid.nr() - 1 {
                assert!((t.du1.at(i, j) - lam * (k * z).cos()).abs() < 1e-9);
                let expected = -2.0 * (k * z).cos() * d1 * (k * z).sin();
                assert!((t.domega1.at(i, j) - expected).abs() < 1e-9);
            }
        }
        // continuum symbols within truncation
        assert!((lam + k * k).abs() / (k * k) < 0.02);
        assert!((d1 - k).abs() / k < 0.03);
    }

    #[test]
    fn uniform_swirl_has_no_interior_tendency() {
        let c = cfg(8, ScenarioKind::Zero, 0.5);
        let grid = make_grid(c.grid).unwrap();
        let it = Integrator::new(&c, &grid).unwrap();
        let mut s = State::zeros(&grid, 0.0);
        s.u1 = ScalarField::from_fn(&grid, Parity::Even, |_, _| 0.7);
        let t = it.rhs(&s, 0.0).unwrap();
        for j in 0..grid.nz() {
            for i in 0..grid.nr() - 1 {
                assert!(t.du1.at(i, j).abs() < 1e-12);
            }
        }
        assert_eq!(t.domega1.max_abs(), 0.0);
    }

    #[test]
    fn diffusion_limited_dt() {
        let c = SolverConfig {
            t_end: 10.0,
            ..cfg(16, ScenarioKind::Zero, 1.0)
        };
        let grid = make_grid(c.grid).unwrap();
        let it = Integrator::new(&c, &grid).unwrap();
        let h = 1.0 / 16.0;
        let dt = it.stable_dt(&State::zeros(&grid, 0.0));
        assert!((dt - 0.5 * h * h / 4.0).abs() < 1e-15);
        let late = State::zeros(&grid, 10.0 - 1e-6);
        assert!((it.stable_dt(&late) - 1e-6).abs() < 1e-15);
    }

    #[test]
    fn advective_limit_binds() {
        let mut c = SolverConfig::new(GridSpec::new(1.0, 1.0, 10, 10), ScenarioKind::Zero, 1e-9, 0.5, 1.0);
        c.t_end = 1.0;
        let grid = make_grid(c.grid).unwrap();
        let it = Integrator::new(&c, &grid).unwrap();
        let mut s = State::zeros(&grid, 0.0);
        // psi1 = 5 gives v_z = 10 everywhere and v_r = 0
        s.psi1 = ScalarField::from_fn(&grid, Parity::Even, |_, _| 5.0);
        let dt = it.stable_dt(&s);
        assert!((dt - 0.5 * 0.01).abs() < 1e-12, "{dt}");
    }

    #[test]
    fn rejects_invalid_config() {
        let mut c = cfg(8, ScenarioKind::Zero, -1.0);
        assert!(matches!(c.validate(), Err(Error::Config { ref key, .. }) if key == "nu"));
        c.nu = 0.1;
        c.cfl = 1.5;
        assert!(matches!(c.validate(), Err(Error::Config { ref key, .. }) if key == "cfl"));
        c.cfl = 0.5;
        c.forcing = Forcing::Analytic;
        assert!(matches!(c.validate(), Err(Error::Config { ref key, .. }) if key == "forcing"));
    }

    #[test]
    fn nonfinite_state_aborts_with_stage() {
        let c = cfg(8, ScenarioKind::Zero, 0.1);
        let grid = make_grid(c.grid).unwrap();
        let it = Integrator::new(&c, &grid).unwrap();
        let mut s = State::zeros(&grid, 0.0);
        s.u1.values_mut()[3] = f64::NAN;
        match it.step(&s, 1e-3) {
            Err(Error::Aborted { stage, .. }) => assert_eq!(stage, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_end_time_gives_single_row() {
        let c = SolverConfig {
            t_end: 0.0,
            ..cfg(8, ScenarioKind::GaussianRing, 0.1)
        };
        let out = run(&c).unwrap();
        assert_eq!(out.series.len(), 1);
        assert_eq!(out.final_state.t, 0.0);
        assert!(out.abort.is_none());
    }

    #[test]
    fn zero_scenario_stays_zero() {
        let out = run(&cfg(8, ScenarioKind::Zero, 0.1)).unwrap();
        assert!(out.abort.is_none());
        assert_eq!(out.final_state.t, 0.1);
        assert_eq!(out.final_state.u1.max_abs(), 0.0);
        for row in &out.series.rows {
            let a = row.to_array();
            assert!(a[1..].iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn semidiscrete_forcing_keeps_exact_trajectory_to_rk_error() {
        let mut c = cfg(8, ScenarioKind::Manufactured, 0.05);
        c.forcing = Forcing::SemiDiscrete;
        c.scenario.amplitude = 0.3;
        let grid = make_grid(c.grid).unwrap();
        let it = Integrator::new(&c, &grid).unwrap();
        let m = Manufactured::for_grid(&grid, 1, 0.3, 0.05);
        let err = |n: usize| {
            let mut s = init_with_solver(&c.scenario, it.solver()).unwrap();
            let dt = 0.2 / n as f64;
            for _ in 0..n {
                s = it.step(&s, dt).unwrap();
            }
            let [u, _, _] = m.fields(&grid, s.t);
            s.u1.zip(&u, Parity::Even, |a, b| a - b).max_abs()
        };
        let (e1, e2) = (err(8), err(16));
        assert!((e1 / e2).log2() > 2.7, "{e1} {e2}");
    }
}
