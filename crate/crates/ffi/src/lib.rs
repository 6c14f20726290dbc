//! C interface to `multilayer-heat`.
//!
//! Every fallible function returns an [`MlhStatus`]. On failure the message
//! is stored per thread and read with [`mlh_last_error`]. Handles are opaque;
//! each `*_new`/`*_from_*` call is paired with the matching `*_free`.
//! Panics never cross the boundary: they surface as `MLH_STATUS_PANIC`.
//!
//! Solver and shift arguments are plain integers holding [`MlhSolver`] and
//! [`MlhShift`] values, so an out-of-range value is reported instead of being
//! undefined behaviour.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use multilayer_heat::band::{LinearSystem, PentaMatrix, TriMatrix};
use multilayer_heat::bench::counts::op_count;
use multilayer_heat::config::Config;
use multilayer_heat::materials::MaterialSet;
use multilayer_heat::mesh::RadialMesh;
use multilayer_heat::solvers::{solve_penta_f64, solve_tri_f64, SolverId};
use multilayer_heat::time_stepper::{advance, ShiftMode, StepConfig, TemperatureField};
use multilayer_heat::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlhStatus {
    Ok = 0,
    NullPointer = 1,
    /// Bad geometry, coefficients, indices or enum values.
    InvalidArgument = 2,
    DimensionMismatch = 3,
    /// A pivot or a band-reduction coefficient vanished.
    Breakdown = 4,
    Singular = 5,
    NonConvergence = 6,
    /// Malformed or inconsistent TOML configuration.
    Config = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlhSolver {
    Npdm = 0,
    Mnpdm = 1,
    Spdm = 2,
    Ntdm = 3,
    Stdm = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlhShift {
    None = 0,
    Pentadiagonal = 1,
    Tridiagonal = 2,
}

/// Time-step settings. Fill with [`mlh_step_options_default`] first.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlhStepOptions {
    pub tau: f64,
    pub picard_tol: f64,
    pub max_picard: usize,
    /// An [`MlhSolver`] value.
    pub solver: u32,
    /// An [`MlhShift`] value.
    pub shift: u32,
}

/// Layers, materials and the mesh built from them.
pub struct MlhProblem {
    mesh: RadialMesh,
    materials: MaterialSet,
    config: Config,
}

/// A temperature field advanced in time on a copy of a problem.
pub struct MlhSimulation {
    mesh: RadialMesh,
    materials: MaterialSet,
    field: TemperatureField,
    step: StepConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> MlhStatus {
    match err {
        Error::Structure(_)
        | Error::Domain(_)
        | Error::Spacing(_)
        | Error::Index { .. }
        | Error::StencilSelection { .. }
        | Error::Precondition(_) => MlhStatus::InvalidArgument,
        Error::ReductionBreakdown { .. } | Error::Breakdown { .. } => MlhStatus::Breakdown,
        Error::Singular { .. } => MlhStatus::Singular,
        Error::NonConvergence { .. } => MlhStatus::NonConvergence,
        Error::DimensionMismatch { .. } => MlhStatus::DimensionMismatch,
        Error::Config(_) => MlhStatus::Config,
        Error::Io(_) => MlhStatus::Io,
    }
}

struct Failure(MlhStatus, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure(status_of(&err), err.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MlhStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: String) -> Failure {
    Failure(MlhStatus::InvalidArgument, message)
}

/// Runs `body`, records any failure and converts it to a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> MlhStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MlhStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {message}"));
            MlhStatus::Panic
        }
    }
}

fn solver_of(value: u32) -> Result<SolverId, Failure> {
    Ok(match value {
        0 => SolverId::Npdm,
        1 => SolverId::Mnpdm,
        2 => SolverId::Spdm,
        3 => SolverId::Ntdm,
        4 => SolverId::Stdm,
        other => return Err(invalid(format!("unknown solver {other}"))),
    })
}

fn shift_of(value: u32) -> Result<ShiftMode, Failure> {
    Ok(match value {
        0 => ShiftMode::None,
        1 => ShiftMode::Pentadiagonal,
        2 => ShiftMode::Tridiagonal,
        other => return Err(invalid(format!("unknown shift mode {other}"))),
    })
}

/// # Safety
/// `p` is null (only when `len == 0`) or valid for `len` reads.
unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` is null (only when `len == 0`) or valid for `len` writes.
unsafe fn output<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

/// # Safety
/// `p` is null or points to a NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

fn copy_out(dst: &mut [f64], src: &[f64]) -> Result<(), Failure> {
    if dst.len() != src.len() {
        return Err(Error::DimensionMismatch {
            expected: src.len(),
            found: dst.len(),
        }
        .into());
    }
    dst.copy_from_slice(src);
    Ok(())
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mlh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mlh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mlh_step_options_default(out: *mut MlhStepOptions) -> MlhStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = MlhStepOptions {
            tau: 1.0,
            picard_tol: StepConfig::DEFAULT_TOL,
            max_picard: StepConfig::DEFAULT_MAX_PICARD,
            solver: MlhSolver::Ntdm as u32,
            shift: MlhShift::None as u32,
        };
        Ok(())
    })
}

fn new_problem(config: Config, out: *mut *mut MlhProblem) -> Result<(), Failure> {
    let mesh = config.mesh()?;
    let problem = MlhProblem {
        mesh,
        materials: config.materials.clone(),
        config,
    };
    // SAFETY: checked non-null by the callers.
    unsafe { *out = Box::into_raw(Box::new(problem)) };
    Ok(())
}

/// Parses a TOML problem description (layers, materials and optional run
/// sections).
///
/// # Safety
/// `toml` is a NUL-terminated string; `out` is valid for one write. On
/// success `*out` owns a problem to release with [`mlh_problem_free`].
#[no_mangle]
pub unsafe extern "C" fn mlh_problem_from_toml(toml: *const c_char, out: *mut *mut MlhProblem) -> MlhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = Config::from_toml_str(text(toml, "toml")?)?;
        new_problem(config, out)
    })
}

/// # Safety
/// As [`mlh_problem_from_toml`], with `path` naming a TOML file.
#[no_mangle]
pub unsafe extern "C" fn mlh_problem_load(path: *const c_char, out: *mut *mut MlhProblem) -> MlhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = Config::load(Path::new(text(path, "path")?))?;
        new_problem(config, out)
    })
}

/// # Safety
/// `problem` is null or came from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mlh_problem_free(problem: *mut MlhProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// # Safety
/// `problem` is a live handle; `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mlh_problem_node_count(problem: *const MlhProblem, out: *mut usize) -> MlhStatus {
    guard(|| {
        let problem = problem.as_ref().ok_or_else(|| null("problem"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = problem.mesh.len();
        Ok(())
    })
}

/// Copies the node radii; `len` must equal the node count.
///
/// # Safety
/// `problem` is a live handle; `nodes` is valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn mlh_problem_nodes(problem: *const MlhProblem, nodes: *mut f64, len: usize) -> MlhStatus {
    guard(|| {
        let problem = problem.as_ref().ok_or_else(|| null("problem"))?;
        copy_out(output(nodes, len, "nodes")?, problem.mesh.nodes())
    })
}

fn start_simulation(problem: &MlhProblem, field: TemperatureField, step: StepConfig, out: *mut *mut MlhSimulation) -> Result<(), Failure> {
    step.validate()?;
    let sim = MlhSimulation {
        mesh: problem.mesh.clone(),
        materials: problem.materials.clone(),
        field,
        step,
    };
    // SAFETY: checked non-null by the callers.
    unsafe { *out = Box::into_raw(Box::new(sim)) };
    Ok(())
}

/// Starts a simulation at time 0 from `u0` (one value per node).
///
/// # Safety
/// `problem` is a live handle, `options` is valid for one read, `u0` for
/// `len` reads and `out` for one write. On success `*out` owns a simulation
/// to release with [`mlh_simulation_free`]; it does not borrow `problem`.
#[no_mangle]
pub unsafe extern "C" fn mlh_simulation_new(
    problem: *const MlhProblem,
    options: *const MlhStepOptions,
    u0: *const f64,
    len: usize,
    out: *mut *mut MlhSimulation,
) -> MlhStatus {
    guard(|| {
        let problem = problem.as_ref().ok_or_else(|| null("problem"))?;
        let options = options.as_ref().ok_or_else(|| null("options"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let u0 = input(u0, len, "u0")?;
        if u0.len() != problem.mesh.len() {
            return Err(Error::DimensionMismatch {
                expected: problem.mesh.len(),
                found: u0.len(),
            }
            .into());
        }
        let step = StepConfig {
            tau: options.tau,
            picard_tol: options.picard_tol,
            max_picard: options.max_picard,
            solver: solver_of(options.solver)?,
            shift: shift_of(options.shift)?,
        };
        start_simulation(problem, TemperatureField::new(u0.to_vec(), 0.0), step, out)
    })
}

/// Starts a simulation from the problem's `[simulate]` section.
///
/// # Safety
/// As [`mlh_simulation_new`].
#[no_mangle]
pub unsafe extern "C" fn mlh_simulation_from_config(problem: *const MlhProblem, out: *mut *mut MlhSimulation) -> MlhStatus {
    guard(|| {
        let problem = problem.as_ref().ok_or_else(|| null("problem"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let section = problem
            .config
            .simulate
            .as_ref()
            .ok_or_else(|| Failure(MlhStatus::Config, "problem has no [simulate] section".into()))?;
        start_simulation(problem, section.initial_field(&problem.mesh), section.step_config(), out)
    })
}

/// # Safety
/// `sim` is null or came from this library and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mlh_simulation_free(sim: *mut MlhSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances `steps` time steps. `iterations` (may be null) receives the
/// total number of Picard iterations. On failure the field is left at the
/// last completed step.
///
/// # Safety
/// `sim` is a live handle; `iterations` is null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mlh_simulation_advance(sim: *mut MlhSimulation, steps: usize, iterations: *mut usize) -> MlhStatus {
    guard(|| {
        let sim = sim.as_mut().ok_or_else(|| null("sim"))?;
        let mut total = 0;
        let result = (|| {
            for _ in 0..steps {
                let (next, k) = advance(&sim.mesh, &sim.materials, &sim.field, &sim.step)?;
                sim.field = next;
                total += k;
            }
            Ok::<(), Error>(())
        })();
        if let Some(out) = iterations.as_mut() {
            *out = total;
        }
        Ok(result?)
    })
}

/// # Safety
/// `sim` is a live handle; `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mlh_simulation_time(sim: *const MlhSimulation, out: *mut f64) -> MlhStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("sim"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = sim.field.time;
        Ok(())
    })
}

/// Copies the current temperatures; `len` must equal the node count.
///
/// # Safety
/// `sim` is a live handle; `values` is valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn mlh_simulation_field(sim: *const MlhSimulation, values: *mut f64, len: usize) -> MlhStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("sim"))?;
        copy_out(output(values, len, "values")?, &sim.field.values)
    })
}

/// Solves an `n`-row pentadiagonal system given by its five diagonals.
/// Entry `i` of each diagonal belongs to row `i`; entries that fall outside
/// the matrix must be zero. `full_rows` lists the rows allowed to use the
/// outer diagonals (rows 0 and `n-1` need not be listed). Tridiagonal
/// solvers reduce the system first.
///
/// # Safety
/// The five diagonals, `rhs` and `x` are valid for `n` elements;
/// `full_rows` for `full_len` elements.
#[no_mangle]
pub unsafe extern "C" fn mlh_solve_penta(
    solver: u32,
    n: usize,
    sub2: *const f64,
    sub1: *const f64,
    diag: *const f64,
    sup1: *const f64,
    sup2: *const f64,
    full_rows: *const usize,
    full_len: usize,
    rhs: *const f64,
    x: *mut f64,
) -> MlhStatus {
    guard(|| {
        let solver = solver_of(solver)?;
        let mut rows = input(full_rows, full_len, "full_rows")?.to_vec();
        if n > 0 {
            rows.extend([0, n - 1]);
        }
        rows.sort_unstable();
        rows.dedup();
        let matrix = PentaMatrix::from_diagonals(
            input(sub2, n, "sub2")?.to_vec(),
            input(sub1, n, "sub1")?.to_vec(),
            input(diag, n, "diag")?.to_vec(),
            input(sup1, n, "sup1")?.to_vec(),
            input(sup2, n, "sup2")?.to_vec(),
            rows,
        )?;
        let system = LinearSystem::new(matrix, input(rhs, n, "rhs")?.to_vec())?;
        let solution = solve_penta_f64(solver, &system)?;
        copy_out(output(x, n, "x")?, &solution)
    })
}

/// Solves an `n`-row tridiagonal system with NTDM or STDM.
///
/// # Safety
/// The three diagonals, `rhs` and `x` are valid for `n` elements.
#[no_mangle]
pub unsafe extern "C" fn mlh_solve_tri(
    solver: u32,
    n: usize,
    sub: *const f64,
    diag: *const f64,
    sup: *const f64,
    rhs: *const f64,
    x: *mut f64,
) -> MlhStatus {
    guard(|| {
        let solver = solver_of(solver)?;
        let matrix = TriMatrix::from_diagonals(
            input(sub, n, "sub")?.to_vec(),
            input(diag, n, "diag")?.to_vec(),
            input(sup, n, "sup")?.to_vec(),
        )?;
        let system = LinearSystem::new(matrix, input(rhs, n, "rhs")?.to_vec())?;
        let solution = solve_tri_f64(solver, &system)?;
        copy_out(output(x, n, "x")?, &solution)
    })
}

/// Operation count of a numerical solver on the `n`-node benchmark system
/// with `k` contacts.
///
/// # Safety
/// `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mlh_op_count(solver: u32, n: usize, k: usize, seed: u64, out: *mut u64) -> MlhStatus {
    guard(|| {
        let solver = solver_of(solver)?;
        if solver.is_exact() {
            return Err(invalid(format!("{solver} has no operation count")));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = op_count(solver, n, k, seed)?;
        Ok(())
    })
}
