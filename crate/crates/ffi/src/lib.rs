//! C ABI for the axireg solver.
//!
//! Handles are opaque. Every call returns an [`AxiregStatus`]; on failure the
//! message is kept per thread and read back with [`axireg_last_error`].
//! Field buffers use the solver layout: index `j * nr + i`, radius fastest.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use axireg::config::parse_config;
use axireg::diagnostics::MonitorRow;
use axireg::dynamics::{Advance, Simulation};
use axireg::elliptic::StreamSolver;
use axireg::io::{write_series, write_snapshot};
use axireg::{make_grid, Error, GridSpec, Parity, ScalarField};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiregStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    NonFinite = 4,
    Aborted = 5,
    Io = 6,
    Format = 7,
    BufferSize = 8,
    Internal = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiregField {
    U1 = 0,
    Omega1 = 1,
    Psi1 = 2,
}

/// One monitor row, same fields and order as the CSV columns.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AxiregRow {
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
    pub cfz_grad: f64,
    pub om1_grad: f64,
    pub u1_l4: f64,
    pub dissipation_int: f64,
    pub vr_grad: f64,
    pub vr_grad_43_int: f64,
}

impl From<&MonitorRow> for AxiregRow {
    fn from(r: &MonitorRow) -> Self {
        AxiregRow {
            t: r.t,
            energy: r.energy,
            dissipation: r.dissipation,
            crit_a: r.crit_a,
            crit_b: r.crit_b,
            crit_a_int: r.crit_a_int,
            crit_b_int: r.crit_b_int,
            swirl_sup: r.swirl_sup,
            cfz_l2: r.cfz_l2,
            cfz_grad_int: r.cfz_grad_int,
            cfz_l4_int: r.cfz_l4_int,
            phi_l2: r.phi_l2,
            gamma_l2: r.gamma_l2,
            om1_l2: r.om1_l2,
            om1_grad_int: r.om1_grad_int,
            u1_l4_int: r.u1_l4_int,
            ualpha_s: r.ualpha_s,
            quartic_lhs: r.quartic_lhs,
            quartic_rhs: r.quartic_rhs,
            cfz_grad: r.cfz_grad,
            om1_grad: r.om1_grad,
            u1_l4: r.u1_l4,
            dissipation_int: r.dissipation_int,
            vr_grad: r.vr_grad,
            vr_grad_43_int: r.vr_grad_43_int,
        }
    }
}

/// Opaque solver handle.
pub struct AxiregSolver {
    sim: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> AxiregStatus {
    match e {
        Error::Config { .. } | Error::UnknownScenario(_) => AxiregStatus::Config,
        Error::InvalidArgument(_) | Error::InvalidGrid(_) | Error::GridMismatch | Error::Parity { .. } => {
            AxiregStatus::InvalidArgument
        }
        Error::NonFinite { .. } => AxiregStatus::NonFinite,
        Error::Aborted { .. } => AxiregStatus::Aborted,
        Error::Io(_) => AxiregStatus::Io,
        Error::Format { .. } | Error::Csv(_) => AxiregStatus::Format,
        _ => AxiregStatus::Internal,
    }
}

struct Fail(AxiregStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(AxiregStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any error and converts panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AxiregStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AxiregStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("panic inside axireg".into());
            AxiregStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(AxiregStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn solver_ref<'a>(h: *const AxiregSolver) -> Result<&'a AxiregSolver, Fail> {
    h.as_ref().ok_or_else(|| null("solver"))
}

unsafe fn solver_mut<'a>(h: *mut AxiregSolver) -> Result<&'a mut AxiregSolver, Fail> {
    h.as_mut().ok_or_else(|| null("solver"))
}

/// Last error message on this thread, or null. Valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn axireg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// NUL-terminated crate version.
#[no_mangle]
pub extern "C" fn axireg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a solver from `key = value` configuration text.
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn axireg_solver_new(config: *const c_char, out: *mut *mut AxiregSolver) -> AxiregStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let cfg = parse_config(text(config, "config")?)?;
        let sim = Simulation::new(&cfg)?;
        *out = Box::into_raw(Box::new(AxiregSolver { sim }));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`axireg_solver_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn axireg_solver_free(h: *mut AxiregSolver) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Takes up to `max_steps` time steps, stopping early at `t_end`.
/// `steps_taken` may be null.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn axireg_solver_advance(
    h: *mut AxiregSolver,
    max_steps: usize,
    steps_taken: *mut usize,
) -> AxiregStatus {
    guard(|| {
        let s = solver_mut(h)?;
        let mut n = 0;
        let res = (|| {
            while n < max_steps {
                if s.sim.advance()? == Advance::Finished {
                    break;
                }
                n += 1;
            }
            Ok::<(), Error>(())
        })();
        if !steps_taken.is_null() {
            *steps_taken = n;
        }
        res.map_err(Fail::from)
    })
}

/// Steps until `t_end`.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn axireg_solver_run(h: *mut AxiregSolver) -> AxiregStatus {
    guard(|| Ok(solver_mut(h)?.sim.run_to_end(|_| Ok(()))?))
}

/// # Safety
/// `h` must be a live handle, `t` and `finished` valid pointers (`finished` may be null).
#[no_mangle]
pub unsafe extern "C" fn axireg_solver_time(h: *const AxiregSolver, t: *mut f64, finished: *mut bool) -> AxiregStatus {
    guard(|| {
        let s = solver_ref(h)?;
        if t.is_null() {
            return Err(null("t"));
        }
        *t = s.sim.state().t;
        if !finished.is_null() {
            *finished = s.sim.is_finished();
        }
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `nr`, `nz` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn axireg_solver_dims(h: *const AxiregSolver, nr: *mut usize, nz: *mut usize) -> AxiregStatus {
    guard(|| {
        let g = solver_ref(h)?.sim.state().grid().clone();
        if nr.is_null() || nz.is_null() {
            return Err(null("nr/nz"));
        }
        *nr = g.nr();
        *nz = g.nz();
        Ok(())
    })
}

/// Copies one field into `buf`, which must hold exactly `nr * nz` values.
///
/// # Safety
/// `h` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn axireg_solver_copy_field(
    h: *const AxiregSolver,
    field: AxiregField,
    buf: *mut f64,
    len: usize,
) -> AxiregStatus {
    guard(|| {
        let st = solver_ref(h)?.sim.state();
        let f = match field {
            AxiregField::U1 => &st.u1,
            AxiregField::Omega1 => &st.omega1,
            AxiregField::Psi1 => &st.psi1,
        };
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len != f.values().len() {
            return Err(Fail(
                AxiregStatus::BufferSize,
                format!("buffer holds {len} values, field has {}", f.values().len()),
            ));
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(f.values());
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `count` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn axireg_solver_row_count(h: *const AxiregSolver, count: *mut usize) -> AxiregStatus {
    guard(|| {
        let s = solver_ref(h)?;
        if count.is_null() {
            return Err(null("count"));
        }
        *count = s.sim.series().len();
        Ok(())
    })
}

/// Monitor row `index` (0 is the initial sample).
///
/// # Safety
/// `h` must be a live handle and `row` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn axireg_solver_row(h: *const AxiregSolver, index: usize, row: *mut AxiregRow) -> AxiregStatus {
    guard(|| {
        let s = solver_ref(h)?;
        if row.is_null() {
            return Err(null("row"));
        }
        let rows = &s.sim.series().rows;
        let r = rows.get(index).ok_or_else(|| {
            Fail(
                AxiregStatus::InvalidArgument,
                format!("row {index} out of range ({} rows)", rows.len()),
            )
        })?;
        *row = AxiregRow::from(r);
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `row` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn axireg_solver_latest_row(h: *const AxiregSolver, row: *mut AxiregRow) -> AxiregStatus {
    guard(|| {
        let s = solver_ref(h)?;
        if row.is_null() {
            return Err(null("row"));
        }
        *row = AxiregRow::from(s.sim.latest_row());
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn axireg_solver_write_snapshot(h: *const AxiregSolver, path: *const c_char) -> AxiregStatus {
    guard(|| {
        let s = solver_ref(h)?;
        let p = text(path, "path")?;
        Ok(write_snapshot(s.sim.state(), s.sim.config().nu, Path::new(p))?)
    })
}

/// # Safety
/// `h` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn axireg_solver_write_series(h: *const AxiregSolver, path: *const c_char) -> AxiregStatus {
    guard(|| {
        let s = solver_ref(h)?;
        let p = text(path, "path")?;
        Ok(write_series(s.sim.series(), Path::new(p))?)
    })
}

unsafe fn even_field(
    radius: f64,
    length: f64,
    nr: usize,
    nz: usize,
    data: *const f64,
) -> Result<ScalarField, Fail> {
    let grid = make_grid(GridSpec::new(radius, length, nr, nz))?;
    if data.is_null() {
        return Err(null("omega1"));
    }
    let vals = std::slice::from_raw_parts(data, grid.len()).to_vec();
    Ok(ScalarField::from_values(&grid, vals, Parity::Even)?)
}

/// Solves `-(d2/dr2 + (3/r) d/dr + d2/dz2) psi1 = omega1` with `psi1 = 0` at
/// the wall. Both buffers hold `nr * nz` values.
///
/// # Safety
/// `omega1` must be valid for `nr * nz` reads and `psi1` for as many writes.
#[no_mangle]
pub unsafe extern "C" fn axireg_solve_stream(
    radius: f64,
    length: f64,
    nr: usize,
    nz: usize,
    omega1: *const f64,
    psi1: *mut f64,
) -> AxiregStatus {
    guard(|| {
        let w = even_field(radius, length, nr, nz, omega1)?;
        let p = StreamSolver::new(w.grid()).solve(&w)?;
        if psi1.is_null() {
            return Err(null("psi1"));
        }
        std::slice::from_raw_parts_mut(psi1, p.values().len()).copy_from_slice(p.values());
        Ok(())
    })
}

/// `crit_a / crit_b` of the stream function generated by `omega1`.
///
/// # Safety
/// `omega1` must be valid for `nr * nz` reads and `ratio` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn axireg_criteria_ratio(
    radius: f64,
    length: f64,
    nr: usize,
    nz: usize,
    omega1: *const f64,
    ratio: *mut f64,
) -> AxiregStatus {
    guard(|| {
        let w = even_field(radius, length, nr, nz, omega1)?;
        let r = StreamSolver::new(w.grid()).criteria_ratio(&w)?;
        if ratio.is_null() {
            return Err(null("ratio"));
        }
        *ratio = r.ratio;
        Ok(())
    })
}
