//! C interface to `yamabe-core`.
//!
//! Objects are opaque handles created by `*_new`-style functions and released
//! with the matching `*_free`. Every fallible call returns a [`YamabeStatus`];
//! on failure, [`yamabe_last_error_message`] describes the error for the
//! calling thread. Strings returned to the caller are freed with
//! [`yamabe_string_free`]. `m = +INFINITY` selects the `m = ∞` case.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use yamabe_core::catalog::{self, CatalogOptions};
use yamabe_core::cli::{run_verify, RunConfig, Suite};
use yamabe_core::construct::chain_check;
use yamabe_core::construct::profile::{
    integrate_profile, profile_to_instance, Profile, ProfileStatus,
};
use yamabe_core::jets::Point;
use yamabe_core::soliton::{evaluate_point, soliton_residual_at, MParam, SolitonInstance};
use yamabe_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YamabeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfDomain = 3,
    NotPositiveDefinite = 4,
    CriticalPoint = 5,
    WrongDimension = 6,
    ProfileError = 7,
    Io = 8,
    Expression = 9,
    Panic = 10,
}

/// Profile status kinds reported by [`yamabe_profile_status`].
pub const YAMABE_PROFILE_COMPLETE: i32 = 0;
pub const YAMABE_PROFILE_PHI_COLLAPSE: i32 = 1;
pub const YAMABE_PROFILE_BLOWUP: i32 = 2;

/// Suite bits for [`yamabe_instance_verify_json`].
pub const YAMABE_SUITE_ALGEBRAIC: u32 = 1;
pub const YAMABE_SUITE_SOLITON: u32 = 2;
pub const YAMABE_SUITE_LEVELSET: u32 = 4;
pub const YAMABE_SUITE_QUADRATURE: u32 = 8;

/// Number of columns written by [`yamabe_profile_node`]:
/// `r, φ, φ', φ'', f, f', f'', R`.
pub const YAMABE_PROFILE_COLUMNS: usize = 8;

/// Opaque soliton instance.
pub struct YamabeInstance(SolitonInstance);

/// Opaque integrated profile.
pub struct YamabeProfile(Profile);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> YamabeStatus {
    match e {
        Error::OutOfDomain { .. } | Error::OutOfProfileRange { .. } => YamabeStatus::OutOfDomain,
        Error::NotPositiveDefinite { .. } => YamabeStatus::NotPositiveDefinite,
        Error::CriticalPoint { .. } => YamabeStatus::CriticalPoint,
        Error::WrongDimension { .. } | Error::Shape(_) => YamabeStatus::WrongDimension,
        Error::PhiNonPositive { .. } | Error::ProfileTooShort { .. } => YamabeStatus::ProfileError,
        Error::Expression(_) => YamabeStatus::Expression,
        Error::InvalidParameter(_) => YamabeStatus::InvalidArgument,
        Error::Io(_) => YamabeStatus::Io,
    }
}

/// Why a call failed before or inside the library.
enum Failure {
    Null(&'static str),
    Arg(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Run `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> YamabeStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => YamabeStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            YamabeStatus::NullPointer
        }
        Ok(Err(Failure::Arg(msg))) => {
            set_last_error(msg);
            YamabeStatus::InvalidArgument
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            YamabeStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn as_mut<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn as_str<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Arg(format!("{what} is not valid UTF-8")))
}

fn m_param(m: f64) -> Result<MParam, Failure> {
    let v = if m == f64::INFINITY {
        MParam::Infinity
    } else {
        MParam::Finite(m)
    };
    if v.is_valid() {
        Ok(v)
    } else {
        Err(Failure::Arg(format!(
            "m must be nonzero and finite, or +INFINITY; got {m}"
        )))
    }
}

unsafe fn point_arg(point: *const f64, len: usize) -> Result<Point, Failure> {
    if point.is_null() {
        return Err(Failure::Null("point"));
    }
    Ok(Point::new(std::slice::from_raw_parts(point, len).to_vec())?)
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn yamabe_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn yamabe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Free a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn yamabe_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Integrate a radial profile.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a new handle.
#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_integrate(
    n: usize,
    m: f64,
    rho: f64,
    q: f64,
    r_max: f64,
    h_r: f64,
    out: *mut *mut YamabeProfile,
) -> YamabeStatus {
    guard(|| {
        let out = as_mut(out, "out")?;
        let pr = integrate_profile(n, m_param(m)?, rho, q, r_max, h_r)?;
        *out = Box::into_raw(Box::new(YamabeProfile(pr)));
        Ok(())
    })
}

/// Read a CSV written by [`yamabe_profile_write_csv`] or `yamabe construct`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_read_csv(
    path: *const c_char,
    n: usize,
    m: f64,
    rho: f64,
    out: *mut *mut YamabeProfile,
) -> YamabeStatus {
    guard(|| {
        let path = PathBuf::from(as_str(path, "path")?);
        let out = as_mut(out, "out")?;
        let pr = yamabe_core::cli::load_profile(&path, n, m_param(m)?, rho)?;
        *out = Box::into_raw(Box::new(YamabeProfile(pr)));
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library and not have been freed; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_free(p: *mut YamabeProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_len(
    p: *const YamabeProfile,
    out: *mut usize,
) -> YamabeStatus {
    guard(|| {
        *as_mut(out, "out")? = as_ref(p, "profile")?.0.len();
        Ok(())
    })
}

/// Status kind (`YAMABE_PROFILE_*`) and, for early stops, the radius reached.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_status(
    p: *const YamabeProfile,
    kind: *mut i32,
    r: *mut f64,
) -> YamabeStatus {
    guard(|| {
        let pr = &as_ref(p, "profile")?.0;
        let (k, at) = match pr.status {
            ProfileStatus::Complete => (YAMABE_PROFILE_COMPLETE, pr.r_end()),
            ProfileStatus::PhiCollapse { r } => (YAMABE_PROFILE_PHI_COLLAPSE, r),
            ProfileStatus::Blowup { r } => (YAMABE_PROFILE_BLOWUP, r),
        };
        *as_mut(kind, "kind")? = k;
        *as_mut(r, "r")? = at;
        Ok(())
    })
}

/// Copy node `k` into `out[0..YAMABE_PROFILE_COLUMNS]`.
///
/// # Safety
/// `out` must hold `YAMABE_PROFILE_COLUMNS` doubles.
#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_node(
    p: *const YamabeProfile,
    k: usize,
    out: *mut f64,
) -> YamabeStatus {
    guard(|| {
        let pr = &as_ref(p, "profile")?.0;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        if k >= pr.len() {
            return Err(Failure::Arg(format!(
                "node {k} out of range (len {})",
                pr.len()
            )));
        }
        let row = [
            pr.grid[k],
            pr.phi[k],
            pr.dphi[k],
            pr.d2phi[k],
            pr.fval[k],
            pr.df[k],
            pr.d2f[k],
            pr.scalar_r[k],
        ];
        std::slice::from_raw_parts_mut(out, YAMABE_PROFILE_COLUMNS).copy_from_slice(&row);
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_write_csv(
    p: *const YamabeProfile,
    path: *const c_char,
) -> YamabeStatus {
    guard(|| {
        let pr = &as_ref(p, "profile")?.0;
        let path = as_str(path, "path")?;
        let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        pr.write_csv(std::io::BufWriter::new(file))?;
        Ok(())
    })
}

/// Largest pointwise residual of the radial `L(R − ρ)` identity.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn yamabe_profile_chain_residual(
    p: *const YamabeProfile,
    out: *mut f64,
) -> YamabeStatus {
    guard(|| {
        let c = chain_check(&as_ref(p, "profile")?.0)?;
        *as_mut(out, "out")? = c.report.value;
        Ok(())
    })
}

/// Built-in instance by name, with its default constants. `seed` only
/// matters for `RANDOMPOLY` entries.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn yamabe_instance_catalog(
    name: *const c_char,
    seed: u64,
    out: *mut *mut YamabeInstance,
) -> YamabeStatus {
    guard(|| {
        let name = as_str(name, "name")?;
        let out = as_mut(out, "out")?;
        let opts = CatalogOptions {
            seed,
            ..Default::default()
        };
        *out = Box::into_raw(Box::new(YamabeInstance(catalog::instance(name, &opts)?)));
        Ok(())
    })
}

/// The warped-product instance of a profile.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn yamabe_instance_from_profile(
    p: *const YamabeProfile,
    out: *mut *mut YamabeInstance,
) -> YamabeStatus {
    guard(|| {
        let pr = &as_ref(p, "profile")?.0;
        let out = as_mut(out, "out")?;
        *out = Box::into_raw(Box::new(YamabeInstance(profile_to_instance(pr)?)));
        Ok(())
    })
}

/// # Safety
/// `inst` must come from this library and not have been freed; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn yamabe_instance_free(inst: *mut YamabeInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn yamabe_instance_dim(
    inst: *const YamabeInstance,
    out: *mut usize,
) -> YamabeStatus {
    guard(|| {
        *as_mut(out, "out")? = as_ref(inst, "instance")?.0.dim();
        Ok(())
    })
}

/// Max-abs of the soliton equation residual at `point[0..len]`.
///
/// # Safety
/// `point` must hold `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn yamabe_instance_soliton_residual(
    inst: *const YamabeInstance,
    point: *const f64,
    len: usize,
    out: *mut f64,
) -> YamabeStatus {
    guard(|| {
        let inst = &as_ref(inst, "instance")?.0;
        let pe = evaluate_point(inst, &point_arg(point, len)?)?;
        *as_mut(out, "out")? = soliton_residual_at(&pe).max_abs();
        Ok(())
    })
}

/// Scalar curvature at `point[0..len]`.
///
/// # Safety
/// `point` must hold `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn yamabe_instance_scalar_curvature(
    inst: *const YamabeInstance,
    point: *const f64,
    len: usize,
    out: *mut f64,
) -> YamabeStatus {
    guard(|| {
        let inst = &as_ref(inst, "instance")?.0;
        let pe = evaluate_point(inst, &point_arg(point, len)?)?;
        *as_mut(out, "out")? = pe.cp.scalar;
        Ok(())
    })
}

/// Run the suites selected by `suites` (`YAMABE_SUITE_*` bits) over `samples`
/// seeded points. `out_json` receives the JSON report (free with
/// [`yamabe_string_free`]); `out_pass` receives 1 if every check passed.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn yamabe_instance_verify_json(
    inst: *const YamabeInstance,
    suites: u32,
    samples: usize,
    seed: u64,
    out_json: *mut *mut c_char,
    out_pass: *mut i32,
) -> YamabeStatus {
    guard(|| {
        let inst = &as_ref(inst, "instance")?.0;
        let out_json = as_mut(out_json, "out_json")?;
        let out_pass = as_mut(out_pass, "out_pass")?;
        let all = [
            (YAMABE_SUITE_ALGEBRAIC, Suite::Algebraic),
            (YAMABE_SUITE_SOLITON, Suite::Soliton),
            (YAMABE_SUITE_LEVELSET, Suite::Levelset),
            (YAMABE_SUITE_QUADRATURE, Suite::Quadrature),
        ];
        let chosen: Vec<Suite> = all
            .iter()
            .filter(|(b, _)| suites & b != 0)
            .map(|&(_, s)| s)
            .collect();
        if chosen.is_empty() || suites & !0xf != 0 {
            return Err(Failure::Arg(format!("invalid suite mask {suites:#x}")));
        }
        let mut cfg = RunConfig::default();
        cfg.sampling.count = samples;
        cfg.sampling.seed = seed;
        let report = run_verify(inst, &chosen, &cfg)?;
        *out_pass = i32::from(report.summary.pass == Some(true));
        *out_json = CString::new(report.to_json())
            .map_err(|_| Failure::Arg("report contains NUL".into()))?
            .into_raw();
        Ok(())
    })
}
