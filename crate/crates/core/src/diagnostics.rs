//! Regularity functionals, energy ledger and their running time integrals.
//!
//! Every weighted integrand is rewritten in the reduced variables so that no
//! monitor divides by `r`: `v_r / r = -psi1_z`, `v_phi / r = u1`,
//! `omega_phi / r = omega1`, `v_phi^2 / r = r u1^2`.

use crate::error::{Error, Result};
use crate::grid::{d_dr, d_dz, GridSpec, Parity, ScalarField};
use crate::state::{reconstruct_velocity, State};

fn vol(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let nr = grid.nr();
    f.values()
        .chunks_exact(nr)
        .map(|row| row.iter().enumerate().map(|(i, v)| grid.quad_weight(i) * v).sum::<f64>())
        .sum()
}

fn vol_sq(f: &ScalarField) -> f64 {
    vol(&f.map(Parity::Even, |v| v * v))
}

/// `int |grad f|^2` from one-sided differences on cell faces, the quadrature
/// whose summation by parts reproduces the compact second differences.
fn grad_sq(f: &ScalarField) -> f64 {
    let grid = f.grid();
    let (nr, nz) = (grid.nr(), grid.nz());
    let (h, k) = (grid.dr(), grid.dz());
    let v = f.values();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut axial = 0.0;
    for j in 0..nz {
        let up = (j + 1) % nz;
        for i in 0..nr {
            let d = (v[up * nr + i] - v[j * nr + i]) / k;
            axial += grid.quad_weight(i) * d * d;
        }
    }
    let mut radial = 0.0;
    let rw = grid.radius() - 0.25 * h;
    for row in v.chunks_exact(nr) {
        for i in 0..nr - 1 {
            let d = (row[i + 1] - row[i]) / h;
            radial += two_pi * (i + 1) as f64 * h * h * k * d * d;
        }
        // half cell at the axis: odd fields grow like r, even ones are flat
        if f.parity() == Parity::Odd {
            let a = row[0] / grid.r()[0];
            radial += 0.25 * std::f64::consts::PI * h * h * k * a * a;
        }
        // half cell at the wall
        let d = (3.0 * row[nr - 1] - 4.0 * row[nr - 2] + row[nr - 3]) / (2.0 * h);
        radial += two_pi * rw * 0.5 * h * k * d * d;
    }
    axial + radial
}

/// Energy `E = 1/2 int |v|^2 dx` and its dissipation split into the gradient
/// part `int |grad v|^2` (component derivatives) and the weighted part
/// `int (v_r/r)^2 + (v_phi/r)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBudget {
    pub energy: f64,
    pub gradient: f64,
    pub weighted: f64,
}

impl EnergyBudget {
    pub fn dissipation(&self) -> f64 {
        self.gradient + self.weighted
    }
}

pub fn energy_budget(state: &State) -> EnergyBudget {
    let vel = reconstruct_velocity(state);
    let energy = 0.5 * (vol_sq(&vel.v_r) + vol_sq(&vel.v_phi) + vol_sq(&vel.v_z));
    let gradient = grad_sq(&vel.v_r) + grad_sq(&vel.v_phi) + grad_sq(&vel.v_z);
    let weighted = vol_sq(&vel.vr_over_r) + vol_sq(&state.u1);
    EnergyBudget {
        energy,
        gradient,
        weighted,
    }
}

/// `int v_r^2 / r^3 dx`
pub fn criterion_a(state: &State) -> f64 {
    crate::elliptic::criterion_a_from_psi(&state.psi1)
}

/// `int omega_phi^2 / r dx`
pub fn criterion_b(state: &State) -> f64 {
    crate::elliptic::criterion_b_from_omega(&state.omega1)
}

#[inline]
fn swirl_abs(r: f64, u1: f64) -> f64 {
    (r * r * u1).abs()
}

/// `max |r v_phi| = max |r^2 u1|` over the nodes.
pub fn swirl_sup(state: &State) -> f64 {
    state
        .u1
        .map_r(Parity::Even, swirl_abs)
        .values()
        .iter()
        .fold(0.0, |m, &v| m.max(v))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCheck {
    pub lhs: f64,
    pub rhs: f64,
}

/// `int v_phi^4 dx` against `sup|r v_phi|^2 int (v_phi / r)^2 dx`.
///
/// Both sums are accumulated term by term in the same order from
/// `v_phi^4 = (r^2 u1)^2 u1^2`, so rounding monotonicity keeps `lhs <= rhs`
/// exact.
pub fn quartic_check(state: &State) -> Result<QuarticCheck> {
    let sup = swirl_sup(state);
    let sup2 = sup * sup;
    let grid = state.grid();
    let nr = grid.nr();
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for row in state.u1.values().chunks_exact(nr) {
        for (i, &u) in row.iter().enumerate() {
            let w = grid.quad_weight(i);
            let a = swirl_abs(grid.r()[i], u);
            let u2 = u * u;
            lhs += w * (a * a * u2);
            rhs += w * (sup2 * u2);
        }
    }
    if lhs > rhs {
        return Err(Error::Contract(format!("quartic bound broken: {lhs} > {rhs}")));
    }
    Ok(QuarticCheck { lhs, rhs })
}

/// L2 norms of `Phi = omega_r / r = -u1_z` and `Gamma = omega_phi / r = omega1`.
pub fn phi_gamma_norms(state: &State) -> (f64, f64) {
    (d_dz(&state.u1).l2_norm(), state.omega1.l2_norm())
}

/// Quantities from the `v_phi^2 / r` energy estimate, with `w = r u1^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfzQuantities {
    /// `int w^2 dx`
    pub l2_sq: f64,
    /// `int (w_r^2 + w_z^2) dx`
    pub grad_sq: f64,
    /// `int u1^4 dx`, i.e. `|| v_phi / r ||_L4^4`
    pub l4: f64,
}

pub fn cfz_quantities(state: &State) -> CfzQuantities {
    let w = state.u1.map_r(Parity::Odd, |r, u| r * u * u);
    CfzQuantities {
        l2_sq: vol_sq(&w),
        grad_sq: grad_sq(&w),
        l4: vol(&state.u1.map(Parity::Even, |u| u * u * u * u)),
    }
}

/// Three quantities of the `L_s` estimate for `u_alpha = r^(2 - alpha) u1`,
/// `alpha = 3 / s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSwirl {
    /// `int |u_alpha|^s dx`
    pub ualpha_s: f64,
    /// `int |grad |u_alpha|^(s/2)|^2 dx`
    pub grad_term: f64,
    /// `int |u_alpha|^s / r^2 dx`
    pub weighted_term: f64,
}

pub fn weighted_swirl_report(state: &State, s: u32) -> Result<WeightedSwirl> {
    if s < 3 {
        return Err(Error::InvalidArgument(format!("weighted swirl needs s >= 3, got {s}")));
    }
    let s = f64::from(s);
    let half = 0.5 * s;
    let u = &state.u1;
    let ur = d_dr(u);
    let uz = d_dz(u);
    // |u_alpha|^s = r^(2s - 3) |u1|^s and |u_alpha|^s / r^2 = r^(2s - 5) |u1|^s
    let ualpha_s = vol(&u.map_r(Parity::Even, |r, v| r.powf(2.0 * s - 3.0) * v.abs().powf(s)));
    let weighted_term = vol(&u.map_r(Parity::Even, |r, v| r.powf(2.0 * s - 5.0) * v.abs().powf(s)));

    // g = r^(s - 3/2) |u1|^(s/2); chain rule keeps every power nonnegative
    let grid = state.grid();
    let nr = grid.nr();
    let mut grad = vec![0.0; grid.len()];
    for (k, slot) in grad.iter_mut().enumerate() {
        let r = grid.r()[k % nr];
        let v = u.values()[k];
        let mag = v.abs();
        let dmag = half * mag.powf(half - 1.0) * v.signum();
        let gr = (s - 1.5) * r.powf(s - 2.5) * mag.powf(half) + r.powf(s - 1.5) * dmag * ur.values()[k];
        let gz = r.powf(s - 1.5) * dmag * uz.values()[k];
        *slot = gr * gr + gz * gz;
    }
    let grad_term = vol(&ScalarField::from_values(grid, grad, Parity::Even)?);
    Ok(WeightedSwirl {
        ualpha_s,
        grad_term,
        weighted_term,
    })
}

/// Lebesgue exponent in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if matches!(t, "inf" | "infinity" | "Inf" | "oo") {
            return Ok(Exponent::Infinity);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad exponent `{text}`")))?;
        if v.is_infinite() && v > 0.0 {
            return Ok(Exponent::Infinity);
        }
        if !(v >= 1.0) {
            return Err(Error::InvalidArgument(format!("exponent must be >= 1, got {v}")));
        }
        Ok(Exponent::Finite(v))
    }
}

fn spatial_norm(f: &ScalarField, p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => f.max_abs(),
        Exponent::Finite(p) => vol(&f.map(Parity::Even, |v| v.abs().powf(p))).powf(1.0 / p),
    }
}

/// Anisotropic norm `( int_0^T ( int |u|^p dx )^(q/p) dt )^(1/q)`; the time
/// integral is the trapezoid rule over the samples.
pub fn lpq_norm(samples: &[(f64, &ScalarField)], p: Exponent, q: Exponent) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            found: samples.len(),
        });
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::NonMonotoneTime { t: w[1].0, last: w[0].0 });
        }
    }
    let norms: Vec<f64> = samples.iter().map(|(_, f)| spatial_norm(f, p)).collect();
    Ok(match q {
        Exponent::Infinity => norms.iter().fold(0.0, |m, &v| m.max(v)),
        Exponent::Finite(q) => {
            let mut acc = 0.0;
            for k in 1..samples.len() {
                let dt = samples[k].0 - samples[k - 1].0;
                acc += 0.5 * dt * (norms[k - 1].powf(q) + norms[k].powf(q));
            }
            acc.powf(1.0 / q)
        }
    })
}

/// One sampled time with every monitor. Integral columns are trapezoid sums
/// over the preceding rows of the series.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MonitorRow {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub crit_a: f64,
    pub crit_b: f64,
    pub crit_a_int: f64,
    pub crit_b_int: f64,
    pub swirl_sup: f64,
    pub cfz_l2: f64,
    pub cfz_grad_int: f64,
    pub cfz_l4_int: f64,
    pub phi_l2: f64,
    pub gamma_l2: f64,
    pub om1_l2: f64,
    pub om1_grad_int: f64,
    pub u1_l4_int: f64,
    pub ualpha_s: f64,
    pub quartic_lhs: f64,
    pub quartic_rhs: f64,
    // instantaneous integrands of the running integrals above
    pub cfz_grad: f64,
    pub om1_grad: f64,
    pub u1_l4: f64,
    pub dissipation_int: f64,
    /// `|| grad~ (v_r / r) ||_L2`
    pub vr_grad: f64,
    /// `int_0^t || grad~ (v_r / r) ||_L2^(4/3) dt`
    pub vr_grad_43_int: f64,
}

/// Column names in CSV order.
pub const COLUMNS: [&str; 25] = [
    "t",
    "E",
    "D",
    "critA",
    "critB",
    "critA_int",
    "critB_int",
    "swirl_sup",
    "cfz_l2",
    "cfz_grad_int",
    "cfz_l4_int",
    "phi_l2",
    "gamma_l2",
    "om1_l2",
    "om1_grad_int",
    "u1_l4_int",
    "ualpha_s",
    "quartic_lhs",
    "quartic_rhs",
    "cfz_grad",
    "om1_grad",
    "u1_l4",
    "D_int",
    "vr_grad",
    "vr_grad_43_int",
];

impl MonitorRow {
    pub fn to_array(&self) -> [f64; 25] {
        [
            self.t,
            self.energy,
            self.dissipation,
            self.crit_a,
            self.crit_b,
            self.crit_a_int,
            self.crit_b_int,
            self.swirl_sup,
            self.cfz_l2,
            self.cfz_grad_int,
            self.cfz_l4_int,
            self.phi_l2,
            self.gamma_l2,
            self.om1_l2,
            self.om1_grad_int,
            self.u1_l4_int,
            self.ualpha_s,
            self.quartic_lhs,
            self.quartic_rhs,
            self.cfz_grad,
            self.om1_grad,
            self.u1_l4,
            self.dissipation_int,
            self.vr_grad,
            self.vr_grad_43_int,
        ]
    }

    pub fn from_array(a: [f64; 25]) -> Self {
        MonitorRow {
            t: a[0],
            energy: a[1],
            dissipation: a[2],
            crit_a: a[3],
            crit_b: a[4],
            crit_a_int: a[5],
            crit_b_int: a[6],
            swirl_sup: a[7],
            cfz_l2: a[8],
            cfz_grad_int: a[9],
            cfz_l4_int: a[10],
            phi_l2: a[11],
            gamma_l2: a[12],
            om1_l2: a[13],
            om1_grad_int: a[14],
            u1_l4_int: a[15],
            ualpha_s: a[16],
            quartic_lhs: a[17],
            quartic_rhs: a[18],
            cfz_grad: a[19],
            om1_grad: a[20],
            u1_l4: a[21],
            dissipation_int: a[22],
            vr_grad: a[23],
            vr_grad_43_int: a[24],
        }
    }

    /// Instantaneous monitors of one state; integral columns are left at zero.
    pub fn instantaneous(state: &State, s: u32) -> Result<Self> {
        let budget = energy_budget(state);
        let quartic = quartic_check(state)?;
        let cfz = cfz_quantities(state);
        let (phi_l2, gamma_l2) = phi_gamma_norms(state);
        let ualpha = weighted_swirl_report(state, s)?;
        let vr_over_r = d_dz(&state.psi1).scale(-1.0);
        Ok(MonitorRow {
            t: state.t,
            energy: budget.energy,
            dissipation: budget.dissipation(),
            crit_a: criterion_a(state),
            crit_b: criterion_b(state),
            swirl_sup: swirl_sup(state),
            cfz_l2: cfz.l2_sq.sqrt(),
            phi_l2,
            gamma_l2,
            om1_l2: state.omega1.l2_norm(),
            ualpha_s: ualpha.ualpha_s,
            quartic_lhs: quartic.lhs,
            quartic_rhs: quartic.rhs,
            cfz_grad: cfz.grad_sq,
            om1_grad: grad_sq(&state.omega1),
            u1_l4: cfz.l4,
            vr_grad: grad_sq(&vr_over_r).sqrt(),
            ..MonitorRow::default()
        })
    }

    /// Running integrals advanced from `prev` by the trapezoid rule.
    fn accumulate(&mut self, prev: &MonitorRow) {
        let dt = self.t - prev.t;
        let trap = |a: f64, b: f64| 0.5 * dt * (a + b);
        self.crit_a_int = prev.crit_a_int + trap(prev.crit_a, self.crit_a);
        self.crit_b_int = prev.crit_b_int + trap(prev.crit_b, self.crit_b);
        self.cfz_grad_int = prev.cfz_grad_int + trap(prev.cfz_grad, self.cfz_grad);
        self.cfz_l4_int = prev.cfz_l4_int + trap(prev.u1_l4, self.u1_l4);
        self.om1_grad_int = prev.om1_grad_int + trap(prev.om1_grad, self.om1_grad);
        self.u1_l4_int = prev.u1_l4_int + trap(prev.u1_l4, self.u1_l4);
        self.dissipation_int = prev.dissipation_int + trap(prev.dissipation, self.dissipation);
        self.vr_grad_43_int =
            prev.vr_grad_43_int + trap(prev.vr_grad.powf(4.0 / 3.0), self.vr_grad.powf(4.0 / 3.0));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub grid: GridSpec,
    pub nu: f64,
    pub scenario: String,
    /// Exponent of the weighted-swirl monitor.
    pub s: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriteriaSeries {
    pub meta: SeriesMeta,
    pub rows: Vec<MonitorRow>,
}

impl CriteriaSeries {
    pub fn new(meta: SeriesMeta) -> Self {
        CriteriaSeries { meta, rows: Vec::new() }
    }

    pub fn last(&self) -> Option<&MonitorRow> {
        self.rows.last()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a row for `state`, which must be later than the last row.
    pub fn sample(&mut self, state: &State) -> Result<&MonitorRow> {
        let row = MonitorRow::instantaneous(state, self.meta.s)?;
        self.push_instantaneous(row)
    }

    pub(crate) fn push_instantaneous(&mut self, mut row: MonitorRow) -> Result<&MonitorRow> {
        if let Some(prev) = self.rows.last() {
            if !(row.t > prev.t) {
                return Err(Error::NonMonotoneTime { t: row.t, last: prev.t });
            }
            row.accumulate(prev);
        }
        self.rows.push(row);
        Ok(self.rows.last().expect("just pushed"))
    }
}

/// Free-function form of [`CriteriaSeries::sample`].
pub fn sample<'a>(state: &State, series: &'a mut CriteriaSeries) -> Result<&'a MonitorRow> {
    series.sample(state)
}

/// Sides of the `omega1` energy budget
/// `1/2 |omega1(t)|^2 + nu/2 int |grad omega1|^2 <= 2/nu int |u1|_4^4 + 1/2 |omega1(0)|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Omega1Budget {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl Omega1Budget {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + tol)
    }
}

/// Budget at every row.
pub fn omega1_budget_rows(series: &CriteriaSeries, nu: f64) -> Result<Vec<Omega1Budget>> {
    let first = series.rows.first().ok_or(Error::TooFewRows { needed: 1, found: 0 })?;
    let initial = 0.5 * first.om1_l2 * first.om1_l2;
    Ok(series
        .rows
        .iter()
        .map(|row| Omega1Budget {
            t: row.t,
            lhs: 0.5 * row.om1_l2 * row.om1_l2 + 0.5 * nu * row.om1_grad_int,
            rhs: 2.0 / nu * row.u1_l4_int + initial,
        })
        .collect())
}

/// Budget at the last row; a violation beyond 1% is an error.
pub fn omega1_budget(series: &CriteriaSeries, nu: f64) -> Result<Omega1Budget> {
    let rows = omega1_budget_rows(series, nu)?;
    let last = *rows.last().expect("nonempty");
    if let Some(bad) = rows.iter().find(|b| !b.holds(1e-2)) {
        return Err(Error::Contract(format!(
            "omega1 budget violated at t = {}: {} > {}",
            bad.t, bad.lhs, bad.rhs
        )));
    }
    Ok(last)
}
