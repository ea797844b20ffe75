use std::ffi::{CStr, CString};
use std::ptr;

use axireg_ffi::*;

const CFG: &str = "nu = 0.05\nR = 1\nLz = 1\nnr = 16\nnz = 16\ncfl = 0.5\nt_end = 0.1\n\
                   scenario = gaussian_ring\namplitude = 2\nr_center = 0.4\noutput_every = 2\n";

fn last_error() -> String {
    let p = axireg_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn new_solver(text: &str) -> (AxiregStatus, *mut AxiregSolver) {
    let c = CString::new(text).unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { axireg_solver_new(c.as_ptr(), &mut h) };
    (st, h)
}

#[test]
fn lifecycle_matches_library() {
    let (st, h) = new_solver(CFG);
    assert_eq!(st, AxiregStatus::Ok);
    let (mut nr, mut nz) = (0, 0);
    unsafe {
        assert_eq!(axireg_solver_dims(h, &mut nr, &mut nz), AxiregStatus::Ok);
        assert_eq!((nr, nz), (16, 16));
        let mut taken = 0;
        assert_eq!(axireg_solver_advance(h, 3, &mut taken), AxiregStatus::Ok);
        assert_eq!(taken, 3);
        assert_eq!(axireg_solver_run(h), AxiregStatus::Ok);
        let (mut t, mut done) = (0.0, false);
        assert_eq!(axireg_solver_time(h, &mut t, &mut done), AxiregStatus::Ok);
        assert!(done && t == 0.1);

        let mut row = AxiregRow::default();
        assert_eq!(axireg_solver_latest_row(h, &mut row), AxiregStatus::Ok);
        let cfg = axireg::config::parse_config(CFG).unwrap();
        let out = axireg::run(&cfg).unwrap();
        let lib = out.series.rows.last().unwrap();
        assert_eq!(row.crit_a_int, lib.crit_a_int);
        assert_eq!(row.energy, lib.energy);

        let mut buf = vec![0.0; nr * nz];
        assert_eq!(axireg_solver_copy_field(h, AxiregField::U1, buf.as_mut_ptr(), buf.len()), AxiregStatus::Ok);
        assert_eq!(buf.as_slice(), out.final_state.u1.values());
        assert_eq!(
            axireg_solver_copy_field(h, AxiregField::Psi1, buf.as_mut_ptr(), 3),
            AxiregStatus::BufferSize
        );

        let mut count = 0;
        assert_eq!(axireg_solver_row_count(h, &mut count), AxiregStatus::Ok);
        assert_eq!(count, out.series.len());
        assert_eq!(axireg_solver_row(h, count, &mut row), AxiregStatus::InvalidArgument);

        let dir = tempfile::tempdir().unwrap();
        let snap = CString::new(dir.path().join("s.axns").to_str().unwrap()).unwrap();
        let csv = CString::new(dir.path().join("s.csv").to_str().unwrap()).unwrap();
        assert_eq!(axireg_solver_write_snapshot(h, snap.as_ptr()), AxiregStatus::Ok);
        assert_eq!(axireg_solver_write_series(h, csv.as_ptr()), AxiregStatus::Ok);
        let back = axireg::io::read_snapshot(&dir.path().join("s.axns")).unwrap();
        assert_eq!(back.state.omega1.values(), out.final_state.omega1.values());
        axireg_solver_free(h);
    }
}

#[test]
fn config_errors_name_the_key() {
    let (st, h) = new_solver(&CFG.replace("nu = 0.05", "nu = thick"));
    assert_eq!(st, AxiregStatus::Config);
    assert!(h.is_null());
    assert!(last_error().contains("nu"));
}

#[test]
fn null_handles_are_rejected() {
    unsafe {
        assert_eq!(axireg_solver_run(ptr::null_mut()), AxiregStatus::NullPointer);
        assert_eq!(axireg_solver_new(ptr::null(), ptr::null_mut()), AxiregStatus::NullPointer);
        axireg_solver_free(ptr::null_mut());
    }
    assert!(last_error().contains("null"));
}

#[test]
fn stream_solve_and_ratio() {
    let (nr, nz) = (24, 16);
    let g = axireg::make_grid(axireg::GridSpec::new(1.0, 1.0, nr, nz)).unwrap();
    let w = axireg::ScalarField::from_fn(&g, axireg::Parity::Even, |r, z| {
        (1.0 - r * r) * (1.0 + (2.0 * std::f64::consts::PI * z).cos())
    });
    let mut psi = vec![0.0; nr * nz];
    let mut ratio = 0.0;
    unsafe {
        assert_eq!(axireg_solve_stream(1.0, 1.0, nr, nz, w.values().as_ptr(), psi.as_mut_ptr()), AxiregStatus::Ok);
        assert_eq!(axireg_criteria_ratio(1.0, 1.0, nr, nz, w.values().as_ptr(), &mut ratio), AxiregStatus::Ok);
        assert_eq!(axireg_solve_stream(1.0, 1.0, 2, nz, w.values().as_ptr(), psi.as_mut_ptr()), AxiregStatus::InvalidArgument);
    }
    let lib = axireg::elliptic::solve_stream(&w).unwrap();
    assert_eq!(psi.as_slice(), lib.values());
    assert!(ratio > 0.0 && ratio <= 2.0);
}
