//! Self-checks behind `axireg verify`. Each suite is a handful of small,
//! fast runs with the same pass conditions as the full acceptance suite.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{run, Forcing, Integrator, Simulation, SolverConfig};
use crate::elliptic::StreamSolver;
use crate::error::{Error, Result};
use crate::grid::{d_dr, d_dz, integrate_volume, make_grid, modified_laplacian, Grid, GridSpec, Parity, ScalarField};
use crate::manufactured::Manufactured;
use crate::scenario::ScenarioKind;
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Ops,
    Elliptic,
    Energy,
    MaxPrinciple,
    WeightedRatio,
    Mms,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ops" => Suite::Ops,
            "elliptic" => Suite::Elliptic,
            "energy" => Suite::Energy,
            "maxprinciple" => Suite::MaxPrinciple,
            "lemma33" => Suite::WeightedRatio,
            "mms" => Suite::Mms,
            "all" => Suite::All,
            other => return Err(Error::InvalidArgument(format!("unknown suite `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}/{}: {}", self.suite, self.name, self.detail)
    }
}

fn check(suite: &'static str, name: &str, passed: bool, detail: String) -> Check {
    Check {
        suite,
        name: name.to_string(),
        passed,
        detail,
    }
}

fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

fn unit_grid(n: usize) -> Arc<Grid> {
    make_grid(GridSpec::new(1.0, 1.0, n, n)).expect("valid grid")
}

fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    a.zip(b, Parity::Even, |x, y| x - y).max_abs()
}

// the Dirichlet ghost is only first-order accurate on the last radial row
fn max_diff_interior(a: &ScalarField, b: &ScalarField) -> f64 {
    let nr = a.grid().nr();
    let d = a.zip(b, Parity::Even, |x, y| x - y);
    d.values()
        .chunks_exact(nr)
        .flat_map(|row| row[..nr - 1].iter().map(|v| v.abs()))
        .fold(0.0, f64::max)
}

pub fn run_suite(suite: Suite) -> Result<Vec<Check>> {
    Ok(match suite {
        Suite::Ops => ops()?,
        Suite::Elliptic => elliptic()?,
        Suite::Energy => energy()?,
        Suite::MaxPrinciple => max_principle()?,
        Suite::WeightedRatio => weighted_ratio()?,
        Suite::Mms => mms()?,
        Suite::All => {
            let mut all = Vec::new();
            for s in [
                Suite::Ops,
                Suite::Elliptic,
                Suite::Energy,
                Suite::MaxPrinciple,
                Suite::WeightedRatio,
                Suite::Mms,
            ] {
                all.extend(run_suite(s)?);
            }
            all
        }
    })
}

fn ops() -> Result<Vec<Check>> {
    let k = 2.0 * PI;
    let f = |r: f64, z: f64| (1.0 - r * r).powi(2) * (k * z).cos();
    let fr = |r: f64, z: f64| -4.0 * r * (1.0 - r * r) * (k * z).cos();
    let fz = |r: f64, z: f64| -k * (1.0 - r * r).powi(2) * (k * z).sin();
    // (d2/dr2 + (3/r) d/dr + d2/dz2) f
    let mf = |r: f64, z: f64| (-16.0 + 24.0 * r * r - k * k * (1.0 - r * r).powi(2)) * (k * z).cos();
    let mut e = [[0.0; 3]; 3];
    for (l, n) in [16, 32, 64].into_iter().enumerate() {
        let g = unit_grid(n);
        let field = ScalarField::from_fn(&g, Parity::Even, f);
        e[0][l] = max_diff(&d_dr(&field), &ScalarField::from_fn(&g, Parity::Even, fr));
        e[1][l] = max_diff(&d_dz(&field), &ScalarField::from_fn(&g, Parity::Even, fz));
        e[2][l] = max_diff_interior(&modified_laplacian(&field)?, &ScalarField::from_fn(&g, Parity::Even, mf));
    }
    let mut out = Vec::new();
    for (name, errs) in ["d_dr", "d_dz", "modified_laplacian"].iter().zip(e) {
        let o = order(errs[1], errs[2]);
        out.push(check("ops", name, o >= 1.9, format!("errors {:.2e} {:.2e} {:.2e}, order {o:.3}", errs[0], errs[1], errs[2])));
    }
    let g = make_grid(GridSpec::new(1.7, 0.6, 12, 8))?;
    let one = integrate_volume(&ScalarField::from_fn(&g, Parity::Even, |_, _| 1.0))?;
    let rel = (one - g.volume()).abs() / g.volume();
    out.push(check("ops", "volume", rel <= 1e-14, format!("sum of weights vs pi R^2 Lz: rel err {rel:.1e}")));
    Ok(out)
}

fn elliptic() -> Result<Vec<Check>> {
    let k = 2.0 * PI;
    let psi = |r: f64, z: f64| (1.0 - r * r).powi(2) * (k * z).cos();
    let omega = |r: f64, z: f64| (16.0 - 24.0 * r * r + k * k * (1.0 - r * r).powi(2)) * (k * z).cos();
    let mut errs = Vec::new();
    let mut worst: f64 = 0.0;
    for n in [16, 32, 64] {
        let g = unit_grid(n);
        let solver = StreamSolver::new(&g);
        let w = ScalarField::from_fn(&g, Parity::Even, omega);
        let p = solver.solve(&w)?;
        errs.push(max_diff(&p, &ScalarField::from_fn(&g, Parity::Even, psi)));
        worst = worst.max(solver.residual(&p, &w)? / w.l2_norm());
    }
    let o = order(errs[1], errs[2]);
    Ok(vec![
        check("elliptic", "recovery order", o >= 1.9, format!("errors {:.2e} {:.2e} {:.2e}, order {o:.3}", errs[0], errs[1], errs[2])),
        check("elliptic", "residual", worst <= 1e-10, format!("max residual / |omega1| = {worst:.2e}")),
    ])
}

fn short_run(kind: ScenarioKind, nu: f64) -> Result<crate::dynamics::RunOutput> {
    let mut cfg = SolverConfig::new(GridSpec::new(1.0, 1.0, 32, 32), kind, nu, 0.5, 0.25);
    cfg.output_every = 2;
    cfg.snapshot_every = usize::MAX;
    cfg.scenario.r_center = 0.4;
    cfg.scenario.width = 0.25;
    cfg.scenario.amplitude = 2.0;
    run(&cfg)
}

fn energy() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for kind in [ScenarioKind::GaussianRing, ScenarioKind::PureSwirl] {
        let nu = 0.1;
        let res = short_run(kind, nu)?;
        let rows = &res.series.rows;
        let rise = rows
            .windows(2)
            .map(|w| (w[1].energy - w[0].energy) / w[0].energy)
            .fold(f64::NEG_INFINITY, f64::max);
        let (first, last) = (rows[0], rows[rows.len() - 1]);
        let balance = (last.energy - first.energy + nu * last.dissipation_int).abs() / first.energy;
        out.push(check(
            "energy",
            kind.name(),
            res.abort.is_none() && rise <= 1e-9 && balance <= 1e-3,
            format!("max rel rise {rise:.2e}, cumulative balance {balance:.2e}"),
        ));
    }
    Ok(out)
}

fn max_principle() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for kind in [ScenarioKind::GaussianRing, ScenarioKind::PureSwirl] {
        let res = short_run(kind, 0.05)?;
        let rows = &res.series.rows;
        let worst = rows.iter().map(|r| r.swirl_sup / rows[0].swirl_sup).fold(0.0, f64::max);
        out.push(check(
            "maxprinciple",
            kind.name(),
            worst <= 1.0 + 1e-10,
            format!("max sup|r^2 u1| / initial = {worst:.12}"),
        ));
    }
    Ok(out)
}

fn weighted_ratio() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let g = unit_grid(32);
    let solver = StreamSolver::new(&g);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut terms = Vec::new();
        for m in 0..3 {
            for n in 0..4 {
                terms.push((m, n as f64, rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI)));
            }
        }
        let w = ScalarField::from_fn(&g, Parity::Even, |r, z| {
            let s: f64 = terms
                .iter()
                .map(|&(m, n, a, ph): &(i32, f64, f64, f64)| a * r.powi(2 * m) * (2.0 * PI * n * z + ph).cos())
                .sum();
            (1.0 - r * r).powi(2) * s
        });
        worst = worst.max(solver.criteria_ratio(&w)?.ratio);
    }
    Ok(vec![check(
        "lemma33",
        "ratio",
        worst <= 2.0,
        format!("max critA/critB over 50 random fields = {worst:.5}"),
    )])
}

fn mms() -> Result<Vec<Check>> {
    let mut errs = Vec::new();
    for n in [8, 16, 32] {
        let mut cfg = SolverConfig::new(GridSpec::new(1.0, 1.0, n, n), ScenarioKind::Manufactured, 0.1, 0.5, 0.05);
        cfg.forcing = Forcing::Analytic;
        cfg.scenario.amplitude = 0.5;
        cfg.output_every = usize::MAX;
        let mut sim = Simulation::new(&cfg)?;
        sim.run_to_end(|_| Ok(()))?;
        let g = sim.state().grid().clone();
        let [u, w, _] = Manufactured::for_grid(&g, 1, 0.5, 0.1).fields(&g, sim.state().t);
        errs.push(max_diff(&sim.state().u1, &u).max(max_diff(&sim.state().omega1, &w)));
    }
    let os = order(errs[1], errs[2]);

    let spec = GridSpec::new(1.0, 1.0, 8, 8);
    let mut cfg = SolverConfig::new(spec, ScenarioKind::Manufactured, 0.01, 1.0, 0.5);
    cfg.forcing = Forcing::SemiDiscrete;
    cfg.scenario.amplitude = 0.5;
    let g = make_grid(spec)?;
    let it = Integrator::new(&cfg, &g)?;
    let m = Manufactured::for_grid(&g, 1, 0.5, 0.01);
    let mut terr = Vec::new();
    for steps in [16, 32, 64] {
        let [u1, omega1, _] = m.fields(&g, 0.0);
        let psi1 = it.solver().solve(&omega1)?;
        let mut s = State::new(u1, omega1, psi1, 0.0)?;
        for _ in 0..steps {
            s = it.step(&s, cfg.t_end / steps as f64)?;
        }
        let [u, w, _] = m.fields(&g, cfg.t_end);
        terr.push(max_diff(&s.u1, &u).max(max_diff(&s.omega1, &w)));
    }
    let ot = order(terr[1], terr[2]);
    Ok(vec![
        check("mms", "space", os >= 1.9, format!("errors {:.2e} {:.2e} {:.2e}, order {os:.3}", errs[0], errs[1], errs[2])),
        check("mms", "time", ot >= 2.9, format!("errors {:.2e} {:.2e} {:.2e}, order {ot:.3}", terr[0], terr[1], terr[2])),
    ])
}
