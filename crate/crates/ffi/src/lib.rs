//! C ABI over the furnace library.
//!
//! Every fallible function returns a [`FurnaceStatus`]; on failure the
//! message is available from [`furnace_last_error`] on the same thread.
//! Handles are opaque and must be released with their `_free` function.
//! Results are written through out-pointers, which are left untouched on
//! failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;

use furnace::config::load_config;
use furnace::fem::{solve_fields, Discretization, FieldSolution, SolverKind, SolverOptions};
use furnace::fields::{export_vtk, terminal_report, TerminalReport};
use furnace::lumped::{predict_power, reduce, required_current, ReducedModel};
use furnace::mesh::load_msh;
use furnace::{Error, Phasor};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FurnaceStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Assembly = 5,
    Solve = 6,
    /// Rejected by the reduced model, e.g. a non-passive impedance.
    Lumped = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FurnaceSolver {
    Auto = 0,
    Direct = 1,
    Iterative = 2,
}

/// Complex number as `re + i·im`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FurnaceComplex {
    pub re: f64,
    pub im: f64,
}

impl From<num_complex::Complex64> for FurnaceComplex {
    fn from(c: num_complex::Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<Phasor> for FurnaceComplex {
    fn from(p: Phasor) -> Self {
        p.0.into()
    }
}

/// A solved field problem with its terminal report.
pub struct FurnaceSimulation {
    solution: FieldSolution,
    report: TerminalReport,
}

/// Reduced impedance of a three-terminal furnace.
pub struct FurnaceReducedModel {
    model: ReducedModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FurnaceStatus {
    match e {
        Error::InvalidArgument { .. } => FurnaceStatus::InvalidArgument,
        Error::Io { .. } => FurnaceStatus::Io,
        Error::Config { .. } | Error::Msh { .. } | Error::Document { .. } => FurnaceStatus::Parse,
        Error::Mesh(_) | Error::Partition(_) | Error::Assembly(_) => FurnaceStatus::Assembly,
        Error::Solve { .. } => FurnaceStatus::Solve,
        Error::Lumped(_) => FurnaceStatus::Lumped,
    }
}

struct Failure(FurnaceStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FurnaceStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FurnaceStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FurnaceStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            FurnaceStatus::Panic
        }
    }
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(FurnaceStatus::InvalidArgument, format!("`{what}` is not UTF-8")))?;
    Ok(PathBuf::from(s))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failure on this thread, or null if none. The string
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn furnace_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn furnace_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads an MSH 2.2 mesh and a TOML configuration, assembles and solves.
/// `tol` ≤ 0 selects the default tolerance.
///
/// # Safety
/// `mesh_path` and `config_path` must be NUL-terminated strings; `out` must
/// point to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn furnace_simulation_run(
    mesh_path: *const c_char,
    config_path: *const c_char,
    solver: FurnaceSolver,
    tol: f64,
    gauge_seed: u64,
    out: *mut *mut FurnaceSimulation,
) -> FurnaceStatus {
    guard(|| {
        let mesh_path = path_arg(mesh_path, "mesh_path")?;
        let config_path = path_arg(config_path, "config_path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = std::fs::read_to_string(&config_path).map_err(|e| Error::io(&config_path, e))?;
        let config = load_config(&text)?;
        let file = File::open(&mesh_path).map_err(|e| Error::io(&mesh_path, e))?;
        let mesh = load_msh(BufReader::new(file), &config.regions)?;
        let disc = Arc::new(Discretization::new(
            mesh,
            &config.regions,
            config.materials,
            gauge_seed,
        )?);
        let defaults = SolverOptions::default();
        let options = SolverOptions {
            kind: match solver {
                FurnaceSolver::Auto => SolverKind::Auto,
                FurnaceSolver::Direct => SolverKind::Direct,
                FurnaceSolver::Iterative => SolverKind::Iterative,
            },
            tol: if tol > 0.0 { tol } else { defaults.tol },
            ..defaults
        };
        let solution = solve_fields(disc, &config.drive, &options)?;
        let report = terminal_report(&solution);
        write_out(
            out,
            Box::into_raw(Box::new(FurnaceSimulation { solution, report })),
            "out",
        )
    })
}

/// Releases a simulation handle. Null is ignored.
///
/// # Safety
/// `sim` must come from [`furnace_simulation_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn furnace_simulation_free(sim: *mut FurnaceSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Number of terminals, ground included.
///
/// # Safety
/// `sim` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn furnace_simulation_terminal_count(
    sim: *const FurnaceSimulation,
    out: *mut usize,
) -> FurnaceStatus {
    guard(|| {
        let sim = borrow(sim, "sim")?;
        write_out(out, sim.report.n_terminals(), "out")
    })
}

/// Voltage and entering current of terminal `k` (0-based, the last is ground).
///
/// # Safety
/// `sim` must be a live handle; `voltage` and `current` writable.
#[no_mangle]
pub unsafe extern "C" fn furnace_simulation_terminal(
    sim: *const FurnaceSimulation,
    k: usize,
    voltage: *mut FurnaceComplex,
    current: *mut FurnaceComplex,
) -> FurnaceStatus {
    guard(|| {
        let sim = borrow(sim, "sim")?;
        let t = sim.report.terminals.get(k).ok_or_else(|| {
            Failure(
                FurnaceStatus::InvalidArgument,
                format!("terminal {k} out of range (have {})", sim.report.n_terminals()),
            )
        })?;
        if voltage.is_null() || current.is_null() {
            return Err(null("voltage/current"));
        }
        write_out(voltage, t.v.into(), "voltage")?;
        write_out(current, t.i.into(), "current")
    })
}

/// Complex power `½ Σ V_k conj(I_k)` (VA) and Joule power (W).
///
/// # Safety
/// `sim` must be a live handle; `s` and `joule` writable.
#[no_mangle]
pub unsafe extern "C" fn furnace_simulation_power(
    sim: *const FurnaceSimulation,
    s: *mut FurnaceComplex,
    joule: *mut f64,
) -> FurnaceStatus {
    guard(|| {
        let sim = borrow(sim, "sim")?;
        if s.is_null() || joule.is_null() {
            return Err(null("s/joule"));
        }
        write_out(s, sim.report.s.into(), "s")?;
        write_out(joule, sim.report.p_h, "joule")
    })
}

/// Writes the terminal report as JSON.
///
/// # Safety
/// `sim` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn furnace_simulation_write_report(
    sim: *const FurnaceSimulation,
    path: *const c_char,
) -> FurnaceStatus {
    guard(|| {
        let sim = borrow(sim, "sim")?;
        Ok(sim.report.save(&path_arg(path, "path")?)?)
    })
}

/// Writes the element fields as legacy VTK.
///
/// # Safety
/// `sim` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn furnace_simulation_write_vtk(
    sim: *const FurnaceSimulation,
    path: *const c_char,
) -> FurnaceStatus {
    guard(|| {
        let sim = borrow(sim, "sim")?;
        Ok(export_vtk(&sim.solution, &path_arg(path, "path")?)?)
    })
}

/// Reduces a three-terminal simulation to `Z_R`.
///
/// # Safety
/// `sim` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn furnace_simulation_reduce(
    sim: *const FurnaceSimulation,
    allow_nonpassive: bool,
    out: *mut *mut FurnaceReducedModel,
) -> FurnaceStatus {
    guard(|| {
        let sim = borrow(sim, "sim")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let model = reduce(&sim.report, allow_nonpassive)?;
        write_out(out, Box::into_raw(Box::new(FurnaceReducedModel { model })), "out")
    })
}

/// Reduces a terminal report file to `Z_R`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn furnace_reduce_report_file(
    path: *const c_char,
    allow_nonpassive: bool,
    out: *mut *mut FurnaceReducedModel,
) -> FurnaceStatus {
    guard(|| {
        let path = path_arg(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let model = reduce(&TerminalReport::load(&path)?, allow_nonpassive)?;
        write_out(out, Box::into_raw(Box::new(FurnaceReducedModel { model })), "out")
    })
}

/// Model from a known impedance, e.g. terminal measurements.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn furnace_reduced_model_new(
    z_r: FurnaceComplex,
    frequency_hz: f64,
    out: *mut *mut FurnaceReducedModel,
) -> FurnaceStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = ReducedModel::from_impedance(Phasor::new(z_r.re, z_r.im), frequency_hz, "external measurement")?;
        write_out(out, Box::into_raw(Box::new(FurnaceReducedModel { model })), "out")
    })
}

/// Reads a reduced-model JSON file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn furnace_reduced_model_load(
    path: *const c_char,
    out: *mut *mut FurnaceReducedModel,
) -> FurnaceStatus {
    guard(|| {
        let path = path_arg(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let model = ReducedModel::load(&path)?;
        write_out(out, Box::into_raw(Box::new(FurnaceReducedModel { model })), "out")
    })
}

/// Writes the model as JSON.
///
/// # Safety
/// `model` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn furnace_reduced_model_save(
    model: *const FurnaceReducedModel,
    path: *const c_char,
) -> FurnaceStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        Ok(m.model.save(&path_arg(path, "path")?)?)
    })
}

/// Releases a model handle. Null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn furnace_reduced_model_free(model: *mut FurnaceReducedModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// `Z_R` in ohms.
///
/// # Safety
/// `model` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn furnace_reduced_model_impedance(
    model: *const FurnaceReducedModel,
    out: *mut FurnaceComplex,
) -> FurnaceStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        write_out(out, m.model.impedance().into(), "out")
    })
}

/// Power in watts dissipated at common current amplitude `current` (A).
///
/// # Safety
/// `model` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn furnace_reduced_model_predict_power(
    model: *const FurnaceReducedModel,
    current: f64,
    out: *mut f64,
) -> FurnaceStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        write_out(out, predict_power(&m.model, current)?, "out")
    })
}

/// Current amplitude in amperes that dissipates `power` watts.
///
/// # Safety
/// `model` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn furnace_reduced_model_required_current(
    model: *const FurnaceReducedModel,
    power: f64,
    out: *mut f64,
) -> FurnaceStatus {
    guard(|| {
        let m = borrow(model, "model")?;
        write_out(out, required_current(&m.model, power)?, "out")
    })
}
