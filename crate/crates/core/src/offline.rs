//! Monitors recomputed from stored snapshots.

use std::path::Path;

use crate::diagnostics::{lpq_norm, CriteriaSeries, Exponent, SeriesMeta};
use crate::error::{Error, Result};
use crate::grid::{Parity, ScalarField};
use crate::io::{list_snapshots, read_snapshot, Snapshot};

#[derive(Debug, Clone)]
pub struct OfflineReport {
    pub series: CriteriaSeries,
    /// `|| r^(1+d) u1 ||_{L_p L_q}` with `d = 1 - 3/s`.
    pub weighted_lpq: f64,
}

/// `r^(1+d) u1`, `d = 1 - 3/s`: the swirl weight `r^2 u1` relaxed by `r^(3/s)`.
pub fn weighted_swirl_field(u1: &ScalarField, s: u32) -> ScalarField {
    let power = 2.0 - 3.0 / f64::from(s);
    u1.map_r(Parity::Even, |r, u| r.powf(power) * u)
}

/// Rebuilds the full monitor series from snapshots ordered in time.
pub fn recompute(snapshots: &[Snapshot], s: u32, p: Exponent, q: Exponent) -> Result<OfflineReport> {
    let first = snapshots.first().ok_or(Error::TooFewRows { needed: 1, found: 0 })?;
    let spec = first.state.grid().spec();
    let mut series = CriteriaSeries::new(SeriesMeta {
        grid: spec,
        nu: first.nu,
        scenario: "offline".into(),
        s,
    });
    for snap in snapshots {
        if snap.state.grid().spec() != spec {
            return Err(Error::GridMismatch);
        }
        snap.state.validate()?;
        series.sample(&snap.state)?;
    }
    let weighted: Vec<ScalarField> = snapshots
        .iter()
        .map(|sn| weighted_swirl_field(&sn.state.u1, s))
        .collect();
    let samples: Vec<(f64, &ScalarField)> = snapshots.iter().map(|sn| sn.state.t).zip(&weighted).collect();
    let weighted_lpq = if samples.len() >= 2 {
        lpq_norm(&samples, p, q)?
    } else {
        0.0
    };
    Ok(OfflineReport { series, weighted_lpq })
}

pub fn recompute_dir(dir: &Path, s: u32, p: Exponent, q: Exponent) -> Result<OfflineReport> {
    let paths = list_snapshots(dir)?;
    if paths.is_empty() {
        return Err(Error::format(dir, "no snapshots found"));
    }
    let snaps = paths
        .iter()
        .map(|p| read_snapshot(p))
        .collect::<Result<Vec<_>>>()?;
    recompute(&snaps, s, p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridSpec};
    use crate::state::State;

    #[test]
    fn constant_swirl_lpq() {
        let g = make_grid(GridSpec::new(1.0, 1.0, 8, 8)).unwrap();
        let snaps: Vec<Snapshot> = (0..3)
            .map(|k| {
                let mut st = State::zeros(&g, k as f64 * 0.5);
                st.u1 = ScalarField::from_fn(&g, Parity::Even, |_, _| 2.0);
                Snapshot { state: st, nu: 0.1 }
            })
            .collect();
        let rep = recompute(&snaps, 4, Exponent::Infinity, Exponent::Infinity).unwrap();
        let rmax = *g.r().last().unwrap();
        assert!((rep.weighted_lpq - 2.0 * rmax.powf(1.25)).abs() < 1e-14);
        assert_eq!(rep.series.len(), 3);
    }

    #[test]
    fn empty_input() {
        assert!(recompute(&[], 4, Exponent::Finite(2.0), Exponent::Finite(2.0)).is_err());
    }
}
