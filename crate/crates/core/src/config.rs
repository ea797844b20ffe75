//! Flat `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Every key may appear once;
//! unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::dynamics::{Forcing, SolverConfig};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::scenario::ScenarioKind;

const REQUIRED: [&str; 8] = ["nu", "R", "Lz", "nr", "nz", "cfl", "t_end", "scenario"];
const OPTIONAL: [&str; 9] = [
    "output_every",
    "s",
    "amplitude",
    "width",
    "r_center",
    "z_center",
    "mode_k",
    "forcing",
    "snapshot_every",
];

fn value<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(text) => text
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::config(key, format!("cannot parse `{text}`"))),
    }
}

fn required<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T> {
    value(map, key)?.ok_or_else(|| Error::config(key, "missing required key"))
}

fn parse_forcing(text: &str) -> Result<Forcing> {
    match text {
        "none" | "false" | "off" => Ok(Forcing::None),
        "analytic" | "true" | "on" => Ok(Forcing::Analytic),
        "semidiscrete" => Ok(Forcing::SemiDiscrete),
        other => Err(Error::config("forcing", format!("unknown mode `{other}`"))),
    }
}

pub fn parse_config(text: &str) -> Result<SolverConfig> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, val)) = line.split_once('=') else {
            return Err(Error::config(line, format!("line {}: expected `key = value`", n + 1)));
        };
        let (key, val) = (key.trim(), val.trim());
        if !REQUIRED.contains(&key) && !OPTIONAL.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        if map.insert(key.to_string(), val.to_string()).is_some() {
            return Err(Error::config(key, "duplicate key"));
        }
    }

    let grid = GridSpec::new(
        required(&map, "R")?,
        required(&map, "Lz")?,
        required(&map, "nr")?,
        required(&map, "nz")?,
    );
    let kind: ScenarioKind = required::<String>(&map, "scenario")?
        .parse()
        .map_err(|e: Error| Error::config("scenario", e.to_string()))?;
    let mut cfg = SolverConfig::new(
        grid,
        kind,
        required(&map, "nu")?,
        required(&map, "cfl")?,
        required(&map, "t_end")?,
    );
    if let Some(v) = value(&map, "output_every")? {
        cfg.output_every = v;
    }
    if let Some(v) = value(&map, "snapshot_every")? {
        cfg.snapshot_every = v;
    }
    if let Some(v) = value(&map, "s")? {
        cfg.s = v;
    }
    if let Some(v) = value(&map, "amplitude")? {
        cfg.scenario.amplitude = v;
    }
    if let Some(v) = value(&map, "width")? {
        cfg.scenario.width = v;
    }
    if let Some(v) = value(&map, "r_center")? {
        cfg.scenario.r_center = v;
    }
    if let Some(v) = value(&map, "z_center")? {
        cfg.scenario.z_center = v;
    }
    if let Some(v) = value(&map, "mode_k")? {
        cfg.scenario.mode_k = v;
    }
    if let Some(text) = map.get("forcing") {
        cfg.forcing = parse_forcing(text)?;
    }
    cfg.grid.validate().map_err(|e| {
        let key = if grid.radius <= 0.0 || !grid.radius.is_finite() {
            "R"
        } else if grid.length <= 0.0 || !grid.length.is_finite() {
            "Lz"
        } else if grid.nr < 4 {
            "nr"
        } else {
            "nz"
        };
        Error::config(key, e.to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn read_config(path: &Path) -> Result<SolverConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Inverse of [`parse_config`] for every key it understands.
pub fn render_config(cfg: &SolverConfig) -> String {
    let s = &cfg.scenario;
    format!(
        "nu = {:?}\nR = {:?}\nLz = {:?}\nnr = {}\nnz = {}\ncfl = {:?}\nt_end = {:?}\nscenario = {}\n\
         output_every = {}\nsnapshot_every = {}\ns = {}\namplitude = {:?}\nwidth = {:?}\n\
         r_center = {:?}\nz_center = {:?}\nmode_k = {}\nforcing = {}\n",
        cfg.nu,
        cfg.grid.radius,
        cfg.grid.length,
        cfg.grid.nr,
        cfg.grid.nz,
        cfg.cfl,
        cfg.t_end,
        s.kind,
        cfg.output_every,
        cfg.snapshot_every,
        cfg.s,
        s.amplitude,
        s.width,
        s.r_center,
        s.z_center,
        s.mode_k,
        cfg.forcing.name(),
    )
}
