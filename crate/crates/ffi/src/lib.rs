//! C ABI for `swk-core`.
//!
//! Operators live behind the opaque [`SwkOperators`] handle. Every fallible
//! function returns an [`SwkStatus`]; on failure a message is available
//! from [`swk_last_error`] on the same thread. Panics are caught at the
//! boundary and reported as [`SwkStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use swk_core::graph::{save_graph, GraphSpec};
use swk_core::mapping::full_spectrum_check;
use swk_core::operators::{build_instance, identity_suite, BuildOptions, Instance};
use swk_core::spectral::{eig_hermitian, eig_unitary, ensure_dense_feasible, Tolerances};
use swk_core::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    ResourceLimit = 4,
    Numerical = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Selects one of the six operators.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwkOperator {
    BoundaryA = 0,
    BoundaryB = 1,
    Shift = 2,
    Coin = 3,
    Evolution = 4,
    Discriminant = 5,
}

/// Opaque handle to a built set of walk operators.
pub struct SwkOperators {
    inst: Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SwkStatus {
    match e {
        Error::Parse { .. } => SwkStatus::Parse,
        Error::ResourceLimit(_) => SwkStatus::ResourceLimit,
        Error::Io(_) => SwkStatus::Io,
        Error::InvalidParameter(_)
        | Error::Domain(_)
        | Error::Dimension(_)
        | Error::NotCoisometry { .. }
        | Error::NotInvolution { .. } => SwkStatus::InvalidArgument,
        _ => SwkStatus::Numerical,
    }
}

fn fail(status: SwkStatus, msg: impl Into<String>) -> SwkStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), SwkStatus>) -> SwkStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SwkStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(SwkStatus::Panic, "internal panic"),
    }
}

fn core(e: Error) -> SwkStatus {
    fail(status_of(&e), e.to_string())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, SwkStatus> {
    if p.is_null() {
        return Err(fail(SwkStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SwkStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(p: *const SwkOperators) -> Result<&'a SwkOperators, SwkStatus> {
    p.as_ref()
        .ok_or_else(|| fail(SwkStatus::NullPointer, "operator handle is NULL"))
}

fn tolerances(tol: f64) -> Tolerances {
    let mut t = Tolerances::default();
    if tol > 0.0 {
        t.construction = tol;
    }
    t
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn swk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn swk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds operators from a graph spec such as `cycle:5` or `file:g.txt`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn swk_operators_from_spec(spec: *const c_char, out: *mut *mut SwkOperators) -> SwkStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(SwkStatus::NullPointer, "out is NULL"));
        }
        *out = ptr::null_mut();
        let text = str_arg(spec, "spec")?;
        let spec: GraphSpec = text.parse().map_err(core)?;
        let inst = build_instance(&spec, &BuildOptions::default()).map_err(core)?;
        *out = Box::into_raw(Box::new(SwkOperators { inst }));
        Ok(())
    })
}

/// Builds operators from a graph file.
///
/// # Safety
/// As [`swk_operators_from_spec`].
#[no_mangle]
pub unsafe extern "C" fn swk_operators_load(path: *const c_char, out: *mut *mut SwkOperators) -> SwkStatus {
    match str_arg(path, "path") {
        Ok(p) => match CString::new(format!("file:{p}")) {
            Ok(spec) => swk_operators_from_spec(spec.as_ptr(), out),
            Err(_) => fail(SwkStatus::InvalidArgument, "path contains NUL"),
        },
        Err(s) => s,
    }
}

/// Writes the underlying graph in the text graph format.
///
/// # Safety
/// `ops` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn swk_operators_save_graph(ops: *const SwkOperators, path: *const c_char) -> SwkStatus {
    guard(|| {
        let h = handle(ops)?;
        let path = str_arg(path, "path")?;
        let g = h
            .inst
            .graph
            .as_ref()
            .ok_or_else(|| fail(SwkStatus::InvalidArgument, "operators were not built from a graph"))?;
        save_graph(g, path).map_err(core)
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `ops` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn swk_operators_free(ops: *mut SwkOperators) {
    if !ops.is_null() {
        drop(Box::from_raw(ops));
    }
}

/// Arc-space and vertex-space dimensions.
///
/// # Safety
/// `ops` must come from this library; `dim_h` and `dim_k` must be writable.
#[no_mangle]
pub unsafe extern "C" fn swk_operators_dims(
    ops: *const SwkOperators,
    dim_h: *mut usize,
    dim_k: *mut usize,
) -> SwkStatus {
    guard(|| {
        let h = handle(ops)?;
        if dim_h.is_null() || dim_k.is_null() {
            return Err(fail(SwkStatus::NullPointer, "output pointer is NULL"));
        }
        *dim_h = h.inst.ops.dim_h();
        *dim_k = h.inst.ops.dim_k();
        Ok(())
    })
}

/// Copies one operator, row-major, into `re` and `im`, each of length at
/// least `rows * cols`. `rows` and `cols` are written even when the buffers
/// are too small.
///
/// # Safety
/// `ops` from this library; `rows`, `cols` writable; `re`, `im` valid for
/// `len` doubles each.
#[no_mangle]
pub unsafe extern "C" fn swk_operators_copy(
    ops: *const SwkOperators,
    which: SwkOperator,
    re: *mut f64,
    im: *mut f64,
    len: usize,
    rows: *mut usize,
    cols: *mut usize,
) -> SwkStatus {
    guard(|| {
        let h = handle(ops)?;
        if rows.is_null() || cols.is_null() {
            return Err(fail(SwkStatus::NullPointer, "rows or cols is NULL"));
        }
        let o = &h.inst.ops;
        let op = match which {
            SwkOperator::BoundaryA => o.boundary_a(),
            SwkOperator::BoundaryB => o.boundary_b(),
            SwkOperator::Shift => o.shift(),
            SwkOperator::Coin => o.coin(),
            SwkOperator::Evolution => o.evolution(),
            SwkOperator::Discriminant => o.discriminant(),
        };
        *rows = op.rows();
        *cols = op.cols();
        let n = op.rows() * op.cols();
        if len < n {
            return Err(fail(SwkStatus::BufferTooSmall, format!("need {n} entries, got {len}")));
        }
        if re.is_null() || im.is_null() {
            return Err(fail(SwkStatus::NullPointer, "re or im is NULL"));
        }
        let dense = op.to_dense();
        let (re, im) = (
            std::slice::from_raw_parts_mut(re, n),
            std::slice::from_raw_parts_mut(im, n),
        );
        for (k, z) in dense.as_slice().iter().enumerate() {
            re[k] = z.re;
            im[k] = z.im;
        }
        Ok(())
    })
}

/// Eigenvalues of `U` into `re`/`im` (length at least `dim_h`).
///
/// # Safety
/// `ops` from this library; buffers valid for `len` doubles each.
#[no_mangle]
pub unsafe extern "C" fn swk_evolution_spectrum(
    ops: *const SwkOperators,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> SwkStatus {
    guard(|| {
        let h = handle(ops)?;
        let n = h.inst.ops.dim_h();
        if len < n {
            return Err(fail(SwkStatus::BufferTooSmall, format!("need {n} entries, got {len}")));
        }
        if re.is_null() || im.is_null() {
            return Err(fail(SwkStatus::NullPointer, "re or im is NULL"));
        }
        ensure_dense_feasible(n, "evolution spectrum").map_err(core)?;
        let e = eig_unitary(&h.inst.ops.evolution().to_dense()).map_err(core)?;
        for (k, z) in e.values.iter().enumerate() {
            *re.add(k) = z.re;
            *im.add(k) = z.im;
        }
        Ok(())
    })
}

/// Eigenvalues of `T`, ascending, into `values` (length at least `dim_k`).
///
/// # Safety
/// `ops` from this library; `values` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn swk_discriminant_spectrum(
    ops: *const SwkOperators,
    values: *mut f64,
    len: usize,
) -> SwkStatus {
    guard(|| {
        let h = handle(ops)?;
        let n = h.inst.ops.dim_k();
        if len < n {
            return Err(fail(SwkStatus::BufferTooSmall, format!("need {n} entries, got {len}")));
        }
        if values.is_null() {
            return Err(fail(SwkStatus::NullPointer, "values is NULL"));
        }
        ensure_dense_feasible(n, "discriminant spectrum").map_err(core)?;
        let e = eig_hermitian(&h.inst.ops.discriminant().to_dense()).map_err(core)?;
        std::slice::from_raw_parts_mut(values, n).copy_from_slice(&e.values);
        Ok(())
    })
}

/// Runs the operator identities and the full spectral mapping check.
/// `*pass` is set on `SWK_OK`; a failed check is not an error. A
/// non-positive `identity_tolerance` selects the default.
///
/// # Safety
/// `ops` from this library; `pass` writable.
#[no_mangle]
pub unsafe extern "C" fn swk_verify(ops: *const SwkOperators, identity_tolerance: f64, pass: *mut bool) -> SwkStatus {
    guard(|| {
        let h = handle(ops)?;
        if pass.is_null() {
            return Err(fail(SwkStatus::NullPointer, "pass is NULL"));
        }
        let tol = tolerances(identity_tolerance);
        let ids = identity_suite(&h.inst.ops, tol.construction);
        let mapping = full_spectrum_check(&h.inst.ops, &tol).map_err(core)?;
        *pass = ids.pass() && mapping.pass;
        if !*pass {
            let mut failed: Vec<String> = ids.failures().map(|c| c.name.to_string()).collect();
            failed.extend(mapping.failed_checks().map(|c| c.name.to_string()));
            set_error(format!("failed checks: {}", failed.join(", ")));
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes_are_stable() {
        assert_eq!(SwkStatus::Ok as i32, 0);
        assert_eq!(SwkStatus::ResourceLimit as i32, 4);
        assert_eq!(
            status_of(&Error::Parse {
                line: 2,
                message: String::new()
            }),
            SwkStatus::Parse
        );
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), SwkStatus::Panic);
        assert!(!swk_last_error().is_null());
    }
}
