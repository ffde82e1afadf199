//! C ABI for `kahler-qm`.
//!
//! Spaces, states and operators cross the boundary as opaque heap handles
//! created by `kqm_*_new` style constructors and released with the
//! matching `kqm_*_free`. Every fallible call returns a [`KqmStatus`];
//! results are written through out-pointers only on success. The message
//! of the most recent failure on the calling thread is available from
//! [`kqm_last_error_message`].
//!
//! Small integer selectors (pictures, coordinates, brackets, integrators)
//! are plain `uint32_t` constants so that an out-of-range value coming
//! from C is reported as [`KqmStatus::InvalidParameter`] instead of being
//! undefined behaviour.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kahler_qm::flow::{integrate, Integrator};
use kahler_qm::fock::{build_coordinate_operators, CMatrix, CVector, CoordinateOperators};
use kahler_qm::kahler::{bracket, eval, kahler_product, BracketKind};
use kahler_qm::reconstruct::{
    forward_direct, forward_recursive, reconstruct_direct, reconstruct_recursive, TildeData,
};
use kahler_qm::suite::{run_suite, SuiteConfig};
use kahler_qm::{Error, FockSpace, Operator, Picture, Space, StateVector, C64};

/// Outcome of a call.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KqmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    InvalidSpace = 2,
    SpaceMismatch = 3,
    DimensionMismatch = 4,
    UndefinedState = 5,
    /// The affine chart is undefined at the state.
    Chart = 6,
    NotHermitian = 7,
    Truncation = 8,
    InvalidParameter = 9,
    /// Overlapping reconstructions disagree.
    Inconsistent = 10,
    /// The recursive reconstruction seed vanishes.
    SingularSeed = 11,
    Io = 12,
    /// A string argument is not valid UTF-8.
    InvalidUtf8 = 13,
    /// A Rust panic was caught at the boundary.
    Panic = 14,
}

/// A complex number laid out as two doubles, real part first.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KqmComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for KqmComplex {
    fn from(c: C64) -> Self {
        KqmComplex { re: c.re, im: c.im }
    }
}

impl From<KqmComplex> for C64 {
    fn from(c: KqmComplex) -> Self {
        C64::new(c.re, c.im)
    }
}

/// Parameters of [`kqm_verify`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KqmSuiteConfig {
    pub modes: usize,
    pub cutoff: usize,
    pub hbar: f64,
    pub seed: u64,
    pub cases: usize,
    pub tolerance: f64,
}

impl From<KqmSuiteConfig> for SuiteConfig {
    fn from(c: KqmSuiteConfig) -> Self {
        SuiteConfig {
            modes: c.modes,
            cutoff: c.cutoff,
            hbar: c.hbar,
            seed: c.seed,
            cases: c.cases,
            tolerance: c.tolerance,
        }
    }
}

pub const KQM_PICTURE_HILBERT: u32 = 0;
pub const KQM_PICTURE_HOMOGENEOUS: u32 = 1;
pub const KQM_PICTURE_AFFINE: u32 = 2;

pub const KQM_COORDINATE_X: u32 = 0;
pub const KQM_COORDINATE_P: u32 = 1;
pub const KQM_COORDINATE_ALPHA: u32 = 2;
pub const KQM_COORDINATE_ALPHA_BAR: u32 = 3;
pub const KQM_COORDINATE_NUMBER: u32 = 4;

pub const KQM_BRACKET_POISSON: u32 = 0;
pub const KQM_BRACKET_RIEMANN: u32 = 1;
pub const KQM_BRACKET_JORDAN: u32 = 2;

pub const KQM_INTEGRATOR_RK4: u32 = 0;
pub const KQM_INTEGRATOR_SPLIT_EXACT: u32 = 1;

/// A truncated Fock space together with its coordinate operators.
pub struct KqmSpace {
    space: Space,
    coords: CoordinateOperators,
}

/// A state vector on a [`KqmSpace`].
pub struct KqmState(StateVector);

/// A linear operator on a [`KqmSpace`].
pub struct KqmOperator(Operator);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: KqmStatus,
    message: String,
}

impl Failure {
    fn new(status: KqmStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidSpace(_) => KqmStatus::InvalidSpace,
            Error::SpaceMismatch(_) => KqmStatus::SpaceMismatch,
            Error::DimensionMismatch { .. } => KqmStatus::DimensionMismatch,
            Error::UndefinedState(_) => KqmStatus::UndefinedState,
            Error::Chart(_) => KqmStatus::Chart,
            Error::NotHermitian(_) => KqmStatus::NotHermitian,
            Error::Truncation { .. } => KqmStatus::Truncation,
            Error::InvalidParameter(_) => KqmStatus::InvalidParameter,
            Error::Inconsistent { .. } => KqmStatus::Inconsistent,
            Error::SingularSeed(_) => KqmStatus::SingularSeed,
            Error::Io(_) => KqmStatus::Io,
        };
        Failure::new(status, e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).unwrap_or_default());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(body: impl FnOnce() -> Outcome) -> KqmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error(None);
            KqmStatus::Ok
        }
        Ok(Err(f)) => {
            set_last_error(Some(f.message));
            f.status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(Some(format!("panic: {message}")));
            KqmStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> std::result::Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(KqmStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn input<'a, T>(p: *const T, len: usize, name: &str) -> std::result::Result<&'a [T], Failure> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(Failure::new(KqmStatus::NullPointer, format!("`{name}` is null")))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn output<'a, T>(p: *mut T, len: usize, name: &str) -> std::result::Result<&'a mut [T], Failure> {
    if len == 0 {
        Ok(&mut [])
    } else if p.is_null() {
        Err(Failure::new(KqmStatus::NullPointer, format!("`{name}` is null")))
    } else {
        Ok(std::slice::from_raw_parts_mut(p, len))
    }
}

unsafe fn store<T>(out: *mut T, value: T, name: &str) -> Outcome {
    if out.is_null() {
        return Err(Failure::new(KqmStatus::NullPointer, format!("`{name}` is null")));
    }
    out.write(value);
    Ok(())
}

unsafe fn store_handle<T>(out: *mut *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(Failure::new(KqmStatus::NullPointer, "`out` is null"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

fn same_length(expected: usize, found: usize) -> Outcome {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found }.into())
    }
}

fn picture(code: u32) -> std::result::Result<Picture, Failure> {
    match code {
        KQM_PICTURE_HILBERT => Ok(Picture::Hilbert),
        KQM_PICTURE_HOMOGENEOUS => Ok(Picture::Homogeneous),
        KQM_PICTURE_AFFINE => Ok(Picture::Affine),
        _ => Err(Failure::new(KqmStatus::InvalidParameter, format!("unknown picture {code}"))),
    }
}

fn to_vector(values: &[KqmComplex]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&c| C64::from(c)))
}

fn copy_out(values: &CVector, buffer: &mut [KqmComplex]) -> Outcome {
    same_length(values.len(), buffer.len())?;
    for (slot, v) in buffer.iter_mut().zip(values.iter()) {
        *slot = (*v).into();
    }
    Ok(())
}

fn check_mode(space: &Space, mode: usize) -> Outcome {
    if mode < space.modes() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mode {mode} out of range for {} modes", space.modes())).into())
    }
}

/// Length in bytes of the last error message on this thread, excluding
/// the terminating NUL, or 0 when the last call succeeded.
#[no_mangle]
pub extern "C" fn kqm_last_error_length() -> usize {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(0, |c| c.as_bytes().len()))
}

/// Copies the last error message on this thread into `buffer` as a
/// NUL-terminated string, truncated to `capacity - 1` bytes. Returns the
/// full message length excluding the NUL.
///
/// # Safety
/// `buffer` must be null or point to at least `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn kqm_last_error_message(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let bytes = slot.as_ref().map_or(&[][..], |c| c.as_bytes());
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buffer, n);
            *buffer.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kqm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a space of `modes` modes with per-mode cutoff `cutoff`.
///
/// # Safety
/// `out` must be null or valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn kqm_space_new(modes: usize, cutoff: usize, hbar: f64, out: *mut *mut KqmSpace) -> KqmStatus {
    guard(|| {
        let space = FockSpace::new(modes, cutoff, hbar)?;
        let coords = build_coordinate_operators(&space);
        store_handle(out, KqmSpace { space, coords })
    })
}

/// Releases a space. Null is ignored.
///
/// # Safety
/// `space` must be null or a handle from [`kqm_space_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kqm_space_free(space: *mut KqmSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Writes the Hilbert-space dimension of `space` to `out`.
///
/// # Safety
/// `space` must be a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_space_dim(space: *const KqmSpace, out: *mut usize) -> KqmStatus {
    guard(|| store(out, borrow(space, "space")?.space.dim(), "out"))
}

/// Creates a state from `len` amplitudes in flat basis order.
///
/// # Safety
/// `space` must be a live handle, `amplitudes` must point to `len`
/// readable values and `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_state_new(
    space: *const KqmSpace,
    amplitudes: *const KqmComplex,
    len: usize,
    out: *mut *mut KqmState,
) -> KqmStatus {
    guard(|| {
        let s = borrow(space, "space")?;
        let z = to_vector(input(amplitudes, len, "amplitudes")?);
        store_handle(out, KqmState(StateVector::new(&s.space, z)?))
    })
}

/// Creates the basis state with the given occupation numbers, one per mode.
///
/// # Safety
/// `space` must be a live handle, `occupations` must point to `len`
/// readable values and `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_state_basis(
    space: *const KqmSpace,
    occupations: *const usize,
    len: usize,
    out: *mut *mut KqmState,
) -> KqmStatus {
    guard(|| {
        let s = borrow(space, "space")?;
        let idx = input(occupations, len, "occupations")?;
        store_handle(out, KqmState(StateVector::basis(&s.space, idx)?))
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `state` must be null or a state handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kqm_state_free(state: *mut KqmState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Copies the amplitudes of `state` into `buffer`, whose length must equal
/// the space dimension.
///
/// # Safety
/// `state` must be a live handle and `buffer` must point to `len` writable
/// values.
#[no_mangle]
pub unsafe extern "C" fn kqm_state_amplitudes(state: *const KqmState, buffer: *mut KqmComplex, len: usize) -> KqmStatus {
    guard(|| copy_out(borrow(state, "state")?.0.amplitudes(), output(buffer, len, "buffer")?))
}

/// Writes `|z|^2` of `state` to `out`.
///
/// # Safety
/// `state` must be a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_state_norm_sqr(state: *const KqmState, out: *mut f64) -> KqmStatus {
    guard(|| store(out, borrow(state, "state")?.0.norm_sqr(), "out"))
}

/// Creates one of the coordinate operators (`KQM_COORDINATE_*`) of `mode`.
///
/// # Safety
/// `space` must be a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_operator_coordinate(
    space: *const KqmSpace,
    coordinate: u32,
    mode: usize,
    out: *mut *mut KqmOperator,
) -> KqmStatus {
    guard(|| {
        let s = borrow(space, "space")?;
        check_mode(&s.space, mode)?;
        let op = match coordinate {
            KQM_COORDINATE_X => s.coords.x(mode),
            KQM_COORDINATE_P => s.coords.p(mode),
            KQM_COORDINATE_ALPHA => s.coords.alpha(mode),
            KQM_COORDINATE_ALPHA_BAR => s.coords.alpha_bar(mode),
            KQM_COORDINATE_NUMBER => s.coords.number(mode),
            _ => {
                return Err(Failure::new(
                    KqmStatus::InvalidParameter,
                    format!("unknown coordinate {coordinate}"),
                ))
            }
        };
        store_handle(out, KqmOperator(op.clone()))
    })
}

/// Creates an operator from `len = dim * dim` entries in row-major order.
///
/// # Safety
/// `space` must be a live handle, `entries` must point to `len` readable
/// values and `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_operator_from_matrix(
    space: *const KqmSpace,
    entries: *const KqmComplex,
    len: usize,
    out: *mut *mut KqmOperator,
) -> KqmStatus {
    guard(|| {
        let s = borrow(space, "space")?;
        let dim = s.space.dim();
        let values = input(entries, len, "entries")?;
        same_length(dim * dim, values.len())?;
        let m = CMatrix::from_row_iterator(dim, dim, values.iter().map(|&c| C64::from(c)));
        store_handle(out, KqmOperator(Operator::new(&s.space, m)?))
    })
}

/// Releases an operator. Null is ignored.
///
/// # Safety
/// `op` must be null or an operator handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kqm_operator_free(op: *mut KqmOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Writes the Kählerian function of `op` at `state` in the given picture
/// (`KQM_PICTURE_*`) to `out`.
///
/// # Safety
/// `op` and `state` must be live handles; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_evaluate(
    op: *const KqmOperator,
    state: *const KqmState,
    picture_code: u32,
    out: *mut KqmComplex,
) -> KqmStatus {
    guard(|| {
        let value = eval(&borrow(op, "op")?.0, &borrow(state, "state")?.0, picture(picture_code)?)?.value;
        store(out, value.into(), "out")
    })
}

/// Writes the Kähler product of the functions of `beta` and `gamma` at
/// `state` to `out`.
///
/// # Safety
/// All handles must be live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_kahler_product(
    beta: *const KqmOperator,
    gamma: *const KqmOperator,
    state: *const KqmState,
    picture_code: u32,
    out: *mut KqmComplex,
) -> KqmStatus {
    guard(|| {
        let value = kahler_product(
            &borrow(beta, "beta")?.0,
            &borrow(gamma, "gamma")?.0,
            &borrow(state, "state")?.0,
            picture(picture_code)?,
        )?;
        store(out, value.into(), "out")
    })
}

/// Evaluates a bracket (`KQM_BRACKET_*`) from gradients and tensors
/// (`out_geometric`) and from the operator algebra (`out_algebraic`).
///
/// # Safety
/// All handles must be live; the out-pointers must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_bracket(
    beta: *const KqmOperator,
    gamma: *const KqmOperator,
    state: *const KqmState,
    bracket_code: u32,
    picture_code: u32,
    out_geometric: *mut KqmComplex,
    out_algebraic: *mut KqmComplex,
) -> KqmStatus {
    guard(|| {
        let kind = match bracket_code {
            KQM_BRACKET_POISSON => BracketKind::Poisson,
            KQM_BRACKET_RIEMANN => BracketKind::Riemann,
            KQM_BRACKET_JORDAN => BracketKind::Jordan,
            _ => {
                return Err(Failure::new(
                    KqmStatus::InvalidParameter,
                    format!("unknown bracket {bracket_code}"),
                ))
            }
        };
        let v = bracket(
            &borrow(beta, "beta")?.0,
            &borrow(gamma, "gamma")?.0,
            &borrow(state, "state")?.0,
            kind,
            picture(picture_code)?,
        )?;
        store(out_geometric, v.geometric.into(), "out_geometric")?;
        store(out_algebraic, v.algebraic.into(), "out_algebraic")
    })
}

/// Integrates the flow of the Hermitian generator `h` from `state` up to
/// `t_end` and returns the final state.
///
/// # Safety
/// `h` and `state` must be live handles; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_flow(
    h: *const KqmOperator,
    state: *const KqmState,
    t_end: f64,
    step: f64,
    integrator: u32,
    out: *mut *mut KqmState,
) -> KqmStatus {
    guard(|| {
        let method = match integrator {
            KQM_INTEGRATOR_RK4 => Integrator::Rk4,
            KQM_INTEGRATOR_SPLIT_EXACT => Integrator::SplitExact,
            _ => {
                return Err(Failure::new(
                    KqmStatus::InvalidParameter,
                    format!("unknown integrator {integrator}"),
                ))
            }
        };
        let traj = integrate(&borrow(h, "h")?.0, &borrow(state, "state")?.0, t_end, step, method)?;
        store_handle(out, KqmState(traj.final_state().clone()))
    })
}

/// Writes the Hilbert-picture covector data of `alpha_bar_mode` at `state`
/// into `buffer` (length = space dimension).
///
/// # Safety
/// `state` must be a live handle and `buffer` must point to `len` writable
/// values.
#[no_mangle]
pub unsafe extern "C" fn kqm_forward_direct(
    state: *const KqmState,
    mode: usize,
    buffer: *mut KqmComplex,
    len: usize,
) -> KqmStatus {
    guard(|| copy_out(&forward_direct(&borrow(state, "state")?.0, mode)?, output(buffer, len, "buffer")?))
}

/// Rebuilds a state from the Hilbert-picture covector data of one mode.
///
/// # Safety
/// `space` must be a live handle, `data` must point to `len` readable
/// values and `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_reconstruct_direct(
    space: *const KqmSpace,
    mode: usize,
    data: *const KqmComplex,
    len: usize,
    out: *mut *mut KqmState,
) -> KqmStatus {
    guard(|| {
        let s = borrow(space, "space")?;
        let comps = to_vector(input(data, len, "data")?);
        store_handle(out, KqmState(reconstruct_direct(&s.space, &[(mode, comps)])?))
    })
}

/// Writes the homogeneous-picture covector data of `alpha_bar_mode` at
/// `state` into `buffer` and the seed value `f_alpha_bar` into `out_f`.
///
/// # Safety
/// `state` must be a live handle, `buffer` must point to `len` writable
/// values and `out_f` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_forward_recursive(
    state: *const KqmState,
    mode: usize,
    buffer: *mut KqmComplex,
    len: usize,
    out_f: *mut KqmComplex,
) -> KqmStatus {
    guard(|| {
        let data = forward_recursive(&borrow(state, "state")?.0, mode)?;
        copy_out(&data.components, output(buffer, len, "buffer")?)?;
        store(out_f, data.f_value.into(), "out_f")
    })
}

/// Rebuilds a state from homogeneous-picture covector data and the seed
/// value `f`. Fails with [`KqmStatus::SingularSeed`] when `|f| < 1e-12`.
///
/// # Safety
/// `space` must be a live handle, `data` must point to `len` readable
/// values and `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_reconstruct_recursive(
    space: *const KqmSpace,
    mode: usize,
    data: *const KqmComplex,
    len: usize,
    f: KqmComplex,
    out: *mut *mut KqmState,
) -> KqmStatus {
    guard(|| {
        let s = borrow(space, "space")?;
        let tilde = TildeData {
            components: to_vector(input(data, len, "data")?),
            f_value: f.into(),
            mode,
        };
        store_handle(out, KqmState(reconstruct_recursive(&s.space, &tilde)?))
    })
}

/// Default verification parameters.
#[no_mangle]
pub extern "C" fn kqm_suite_config_default() -> KqmSuiteConfig {
    let d = SuiteConfig::default();
    KqmSuiteConfig {
        modes: d.modes,
        cutoff: d.cutoff,
        hbar: d.hbar,
        seed: d.seed,
        cases: d.cases,
        tolerance: d.tolerance,
    }
}

/// Runs a verification suite (`"all"`, a group name or
/// `"negative-controls"`; null means `"all"`) and returns the JSON report
/// in `out_json`, to be released with [`kqm_string_free`]. A null `config`
/// uses the defaults. `out_all_passed` receives whether every entry met
/// its expectation.
///
/// # Safety
/// `suite` must be null or a NUL-terminated string, `config` null or
/// readable, and the out-pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn kqm_verify(
    suite: *const c_char,
    config: *const KqmSuiteConfig,
    out_json: *mut *mut c_char,
    out_all_passed: *mut bool,
) -> KqmStatus {
    guard(|| {
        let name = if suite.is_null() {
            "all"
        } else {
            CStr::from_ptr(suite)
                .to_str()
                .map_err(|e| Failure::new(KqmStatus::InvalidUtf8, e.to_string()))?
        };
        let cfg = config.as_ref().map_or_else(SuiteConfig::default, |c| SuiteConfig::from(*c));
        let report = run_suite(name, &cfg)?;
        let json = CString::new(report.to_json())
            .map_err(|e| Failure::new(KqmStatus::InvalidParameter, e.to_string()))?;
        if out_json.is_null() {
            return Err(Failure::new(KqmStatus::NullPointer, "`out_json` is null"));
        }
        if !out_all_passed.is_null() {
            out_all_passed.write(report.all_passed());
        }
        out_json.write(json.into_raw());
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from [`kqm_verify`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kqm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
