//! C ABI over `lucp-core`.
//!
//! Instances are opaque handles. Every entry point returns a [`LucpStatus`]; on failure the
//! message is available from [`lucp_last_error`] until the next call on the same thread.
//! Strings handed out by the library must be released with [`lucp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lucp_core::instance::{galois, load_instance, InstanceFile};
use lucp_core::report::{run, Command};
use lucp_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LucpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    SizeCap = 5,
    Io = 6,
    Computation = 7,
    Panic = 8,
    InvalidInput = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LucpCommand {
    Validate = 0,
    Cohomology = 1,
    CrossedProduct = 2,
    SequenceCheck = 3,
    Report = 4,
}

impl From<LucpCommand> for Command {
    fn from(c: LucpCommand) -> Command {
        match c {
            LucpCommand::Validate => Command::Validate,
            LucpCommand::Cohomology => Command::Cohomology,
            LucpCommand::CrossedProduct => Command::CrossedProduct,
            LucpCommand::SequenceCheck => Command::SequenceCheck,
            LucpCommand::Report => Command::Report,
        }
    }
}

/// A validated instance.
pub struct LucpInstance {
    inner: lucp_core::instance::Instance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LucpStatus {
    match e {
        Error::Parse(_) => LucpStatus::Parse,
        Error::Validation { .. } => LucpStatus::Validation,
        Error::SizeCap(_) => LucpStatus::SizeCap,
        Error::Io(_) => LucpStatus::Io,
        Error::Shape(_) | Error::Algebra(_) => LucpStatus::InvalidInput,
        _ => LucpStatus::Computation,
    }
}

fn guarded(f: impl FnOnce() -> Result<(), LucpStatus>) -> LucpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LucpStatus::Ok,
        Ok(Err(s)) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            LucpStatus::Panic
        }
    }
}

fn fail(e: Error) -> LucpStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, LucpStatus> {
    if s.is_null() {
        set_error("null string argument".into());
        return Err(LucpStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8".into());
        LucpStatus::InvalidUtf8
    })
}

fn hand_out(inst: lucp_core::instance::Instance, out: *mut *mut LucpInstance) {
    unsafe { *out = Box::into_raw(Box::new(LucpInstance { inner: inst })) };
}

fn check_out<T>(out: *mut *mut T) -> Result<(), LucpStatus> {
    if out.is_null() {
        set_error("null output pointer".into());
        return Err(LucpStatus::NullArgument);
    }
    unsafe { *out = ptr::null_mut() };
    Ok(())
}

/// Parses and validates an instance from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lucp_instance_from_json(json: *const c_char, out: *mut *mut LucpInstance) -> LucpStatus {
    guarded(|| {
        check_out(out)?;
        let text = read_str(json)?;
        let inst = InstanceFile::from_json(text).and_then(|f| f.validate()).map_err(fail)?;
        hand_out(inst, out);
        Ok(())
    })
}

/// Loads and validates an instance file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lucp_instance_load(path: *const c_char, out: *mut *mut LucpInstance) -> LucpStatus {
    guarded(|| {
        check_out(out)?;
        let path = read_str(path)?;
        let inst = load_instance(std::path::Path::new(path)).map_err(fail)?;
        hand_out(inst, out);
        Ok(())
    })
}

/// The builtin skew group ring of `F_{p^n}` over its Frobenius group.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lucp_instance_galois(p: u64, n: usize, out: *mut *mut LucpInstance) -> LucpStatus {
    guarded(|| {
        check_out(out)?;
        let inst = galois(p, n).and_then(|f| f.validate()).map_err(fail)?;
        hand_out(inst, out);
        Ok(())
    })
}

/// Runs a command and returns the JSON bundle in `out_json`.
///
/// `verdict` receives 0 for pass, 1 for fail and 2 for undecided. The caps stored in the
/// instance are used, with the seed replaced by `seed`.
///
/// # Safety
/// `inst` must come from this library; `out_json` and `verdict` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lucp_run(
    inst: *const LucpInstance,
    command: LucpCommand,
    seed: u64,
    out_json: *mut *mut c_char,
    verdict: *mut i32,
) -> LucpStatus {
    guarded(|| {
        check_out(out_json)?;
        if inst.is_null() || verdict.is_null() {
            set_error("null argument".into());
            return Err(LucpStatus::NullArgument);
        }
        let inst = &(*inst).inner;
        let mut caps = inst.caps.clone();
        caps.seed = seed;
        let bundle = run(command.into(), inst, &caps).map_err(fail)?;
        let json = CString::new(bundle.to_json()).map_err(|_| {
            set_error("bundle contains NUL".into());
            LucpStatus::Computation
        })?;
        *verdict = bundle.exit_code();
        *out_json = json.into_raw();
        Ok(())
    })
}

/// Canonical JSON of the instance.
///
/// # Safety
/// `inst` must come from this library and `out_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lucp_instance_to_json(inst: *const LucpInstance, out_json: *mut *mut c_char) -> LucpStatus {
    guarded(|| {
        check_out(out_json)?;
        if inst.is_null() {
            set_error("null instance".into());
            return Err(LucpStatus::NullArgument);
        }
        let json = CString::new((*inst).inner.file.to_json()).map_err(|_| LucpStatus::Computation)?;
        *out_json = json.into_raw();
        Ok(())
    })
}

/// Releases an instance. Null is ignored.
///
/// # Safety
/// `inst` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lucp_instance_free(inst: *mut LucpInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lucp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null.
#[no_mangle]
pub extern "C" fn lucp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn lucp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
