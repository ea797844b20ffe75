//! Binary snapshots and CSV monitor series.
//!
//! Snapshot layout, all little-endian:
//!
//! ```text
//! "AXNS"  u8 version = 1
//! u32 nr  u32 nz
//! f64 R   f64 Lz   f64 t   f64 nu
//! f64 u1[nr*nz]  f64 omega1[nr*nz]  f64 psi1[nr*nz]     (r fastest)
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::diagnostics::{CriteriaSeries, MonitorRow, COLUMNS};
use crate::error::{Error, Result};
use crate::grid::{make_grid, GridSpec, Parity, ScalarField};
use crate::state::State;

pub const MAGIC: &[u8; 4] = b"AXNS";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 4 + 4 + 4 * 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub state: State,
    pub nu: f64,
}

pub fn encode_snapshot(state: &State, nu: f64) -> Vec<u8> {
    let grid = state.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 3 * 8 * grid.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(grid.nr() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.nz() as u32).to_le_bytes());
    for v in [grid.radius(), grid.length(), state.t, nu] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for f in [&state.u1, &state.omega1, &state.psi1] {
        for v in f.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_snapshot(bytes: &[u8], path: &Path) -> Result<Snapshot> {
    let bad = |msg: String| Error::format(path, msg);
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("truncated header ({} bytes)", bytes.len())));
    }
    if &bytes[0..4] != MAGIC {
        return Err(bad("bad magic".into()));
    }
    if bytes[4] != VERSION {
        return Err(bad(format!("unsupported version {}", bytes[4])));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes")) as usize;
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let (nr, nz) = (u32_at(5), u32_at(9));
    let (radius, length, t, nu) = (f64_at(13), f64_at(21), f64_at(29), f64_at(37));
    let n = nr
        .checked_mul(nz)
        .ok_or_else(|| bad("grid size overflows".into()))?;
    let expected = HEADER_LEN + 3 * 8 * n;
    if bytes.len() != expected {
        return Err(bad(format!(
            "header announces {nr}x{nz} ({expected} bytes), file has {} bytes",
            bytes.len()
        )));
    }
    let grid = make_grid(GridSpec::new(radius, length, nr, nz)).map_err(|e| bad(e.to_string()))?;
    let field = |k: usize| {
        let start = HEADER_LEN + k * 8 * n;
        let values = (0..n).map(|m| f64_at(start + 8 * m)).collect();
        ScalarField::from_values(&grid, values, Parity::Even)
    };
    let state = State {
        u1: field(0)?,
        omega1: field(1)?,
        psi1: field(2)?,
        t,
    };
    Ok(Snapshot { state, nu })
}

/// Writes `bytes` next to `path` and renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_snapshot(state: &State, nu: f64, path: &Path) -> Result<()> {
    write_atomic(path, &encode_snapshot(state, nu))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    decode_snapshot(&fs::read(path)?, path)
}

/// `snap_000042.axns`
pub fn snapshot_name(index: usize) -> String {
    format!("snap_{index:06}.axns")
}

/// Snapshot files of a directory in name order.
pub fn list_snapshots(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "axns"))
        .collect();
    out.sort();
    Ok(out)
}

pub fn series_to_csv(rows: &[MonitorRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::TooFewRows { needed: 1, found: 0 });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(row.to_array().iter().map(|v| format!("{v:.16e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

pub fn write_series(series: &CriteriaSeries, path: &Path) -> Result<()> {
    write_atomic(path, series_to_csv(&series.rows)?.as_bytes())
}

pub fn parse_series(text: &str, path: &Path) -> Result<Vec<MonitorRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(Error::format(path, "unexpected column header"));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let mut a = [0.0; COLUMNS.len()];
        for (slot, field) in a.iter_mut().zip(rec.iter()) {
            *slot = field
                .parse()
                .map_err(|_| Error::format(path, format!("bad number `{field}`")))?;
        }
        rows.push(MonitorRow::from_array(a));
    }
    Ok(rows)
}

pub fn read_series(path: &Path) -> Result<Vec<MonitorRow>> {
    parse_series(&fs::read_to_string(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::SeriesMeta;
    use crate::grid::Grid;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn grid() -> Arc<Grid> {
        make_grid(GridSpec::new(1.5, 2.0, 6, 4)).unwrap()
    }

    fn bits(s: &State) -> Vec<u64> {
        [&s.u1, &s.omega1, &s.psi1]
            .iter()
            .flat_map(|f| f.values().iter().map(|v| v.to_bits()))
            .chain([s.t.to_bits()])
            .collect()
    }

    #[test]
    fn zero_state_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(snapshot_name(0));
        let s = State::zeros(&grid(), 0.25);
        write_snapshot(&s, 0.1, &path).unwrap();
        let back = read_snapshot(&path).unwrap();
        assert_eq!(bits(&back.state), bits(&s));
        assert_eq!(back.nu, 0.1);
        assert_eq!(back.state.grid().spec(), s.grid().spec());
        assert_eq!(list_snapshots(dir.path()).unwrap(), vec![path]);
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let p = Path::new("x.axns");
        let good = encode_snapshot(&State::zeros(&grid(), 0.0), 1.0);
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(decode_snapshot(&bad, p), Err(Error::Format { .. })));
        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(decode_snapshot(&bad, p), Err(Error::Format { .. })));
        assert!(decode_snapshot(&good[..good.len() - 1], p).is_err());
        assert!(decode_snapshot(&good[..10], p).is_err());
        let mut long = good.clone();
        long.push(0);
        assert!(decode_snapshot(&long, p).is_err());
    }

    #[test]
    fn empty_series_is_an_error() {
        assert!(matches!(series_to_csv(&[]), Err(Error::TooFewRows { .. })));
    }

    #[test]
    fn single_zero_row_is_two_lines() {
        let text = series_to_csv(&[MonitorRow::default()]).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("t,E,D,critA,critB,critA_int"));
    }

    #[test]
    fn write_series_to_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        let mut series = CriteriaSeries::new(SeriesMeta {
            grid: grid().spec(),
            nu: 0.1,
            scenario: "zero".into(),
            s: 4,
        });
        series.sample(&State::zeros(&grid(), 0.0)).unwrap();
        write_series(&series, &path).unwrap();
        assert_eq!(read_series(&path).unwrap(), series.rows);
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            -1e300..1e300f64,
            -1.0..1.0f64,
            Just(0.0),
            Just(-0.0),
            Just(f64::MIN_POSITIVE),
            Just(5e-324)
        ]
    }

    proptest! {
        #[test]
        fn snapshot_round_trip_is_bit_exact(
            vals in proptest::collection::vec(finite(), 72),
            t in finite(),
            nu in finite(),
        ) {
            let g = grid();
            let f = |k: usize| ScalarField::from_values(&g, vals[24 * k..24 * (k + 1)].to_vec(), Parity::Even).unwrap();
            let s = State { u1: f(0), omega1: f(1), psi1: f(2), t };
            let back = decode_snapshot(&encode_snapshot(&s, nu), Path::new("mem")).unwrap();
            prop_assert_eq!(bits(&back.state), bits(&s));
            prop_assert_eq!(back.nu.to_bits(), nu.to_bits());
        }

        #[test]
        fn csv_round_trip_is_exact(vals in proptest::collection::vec(finite(), 25 * 3)) {
            let rows: Vec<MonitorRow> = vals
                .chunks_exact(25)
                .map(|c| MonitorRow::from_array(c.try_into().unwrap()))
                .collect();
            let back = parse_series(&series_to_csv(&rows).unwrap(), Path::new("mem")).unwrap();
            let b = |rs: &[MonitorRow]| rs.iter().flat_map(|r| r.to_array()).map(|v| v.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(b(&back), b(&rows));
        }
    }
}
