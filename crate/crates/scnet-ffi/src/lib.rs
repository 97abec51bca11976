//! C interface for the channel-mapping library.
//!
//! Every object crosses the boundary as an opaque handle (`ScnetConfig`,
//! `ScnetDataset`, `ScnetModel`) created and released by paired
//! constructor/free functions. Fallible calls return a [`ScnetStatus`] code
//! and leave a human-readable message retrievable through
//! [`scnet_last_error`]; the message lives in thread-local storage and stays
//! valid until the next failing call on the same thread.
//!
//! The generated header lands in `include/scnet.h` at build time. All
//! functions are panic-safe: a Rust panic is caught at the boundary and
//! surfaced as `SCNET_STATUS_PANIC` instead of unwinding into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use scnet_core::config::{Preset, RunConfig};
use scnet_core::dataset::{generate, Dataset};
use scnet_core::error::Error;
use scnet_core::eval::{
    complex_flops, dataset_nmse, real_flops, train_split, ModelKind, TrainedModel,
};
use scnet_core::optim::{make_pool, GradientModel};
use scnet_core::rng::derive_seed;

use num_complex::Complex64;

/// Outcome of a fallible call. Anything other than `OK` leaves a detail
/// message in [`scnet_last_error`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScnetStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Configuration or parameters violate an invariant.
    ConfigError = 3,
    /// Buffer lengths or model/dataset dimensions do not line up.
    ShapeError = 4,
    /// Underlying file-system failure.
    IoError = 5,
    /// A file exists but is not a usable artifact (magic, version,
    /// truncation, or corrupt payload).
    FormatError = 6,
    /// Training produced a non-finite loss.
    TrainingDiverged = 7,
    /// An internal invariant failed; the library state is still consistent.
    Panic = 8,
}

/// Which model family to train.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScnetModelKind {
    Scnet = 0,
    Fnn = 1,
}

impl From<ScnetModelKind> for ModelKind {
    fn from(k: ScnetModelKind) -> ModelKind {
        match k {
            ScnetModelKind::Scnet => ModelKind::Scnet,
            ScnetModelKind::Fnn => ModelKind::Fnn,
        }
    }
}

/// Opaque run configuration (preset plus overrides).
pub struct ScnetConfig {
    inner: RunConfig,
}

/// Opaque sample collection with its generation metadata.
pub struct ScnetDataset {
    inner: Dataset,
}

/// Opaque trained model of either family.
pub struct ScnetModel {
    inner: TrainedModel,
}

// ---- Error reporting ----

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

type FfiError = (ScnetStatus, String);
type FfiResult<T> = Result<T, FfiError>;

fn status_of(err: &Error) -> ScnetStatus {
    match err {
        Error::InvalidConfiguration(_)
        | Error::InvalidScenario(_)
        | Error::InvalidParameters(_)
        | Error::InvalidArchitecture(_)
        | Error::InvalidSplit(_) => ScnetStatus::ConfigError,
        Error::ShapeMismatch(_) => ScnetStatus::ShapeError,
        Error::Io(_) => ScnetStatus::IoError,
        Error::BadMagic { .. }
        | Error::UnsupportedVersion { .. }
        | Error::Truncated(_)
        | Error::Corrupt(_) => ScnetStatus::FormatError,
        Error::TrainingDiverged { .. } => ScnetStatus::TrainingDiverged,
    }
}

fn core<T>(r: Result<T, Error>) -> FfiResult<T> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn set_last_error(msg: &str) {
    let stored = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = stored);
}

/// Runs a fallible body, catching panics and recording the error message.
fn guard<F: FnOnce() -> FfiResult<()>>(f: F) -> ScnetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScnetStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic in library call".into());
            set_last_error(&msg);
            ScnetStatus::Panic
        }
    }
}

// ---- Pointer checks ----

unsafe fn want_ref<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    unsafe { p.as_ref() }.ok_or_else(|| null_arg(name))
}

unsafe fn want_mut<'a, T>(p: *mut T, name: &str) -> FfiResult<&'a mut T> {
    unsafe { p.as_mut() }.ok_or_else(|| null_arg(name))
}

unsafe fn want_str<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null_arg(name));
    }
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| (ScnetStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

fn null_arg(name: &str) -> FfiError {
    (ScnetStatus::NullArgument, format!("{name} must not be null"))
}

unsafe fn hand_out<T>(out: *mut *mut T, name: &str, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(null_arg(name));
    }
    unsafe { out.write(Box::into_raw(Box::new(value))) };
    Ok(())
}

// ---- Library info ----

/// Version of the library as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn scnet_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread, as a
/// nul-terminated string. Valid until the next failing call on the same
/// thread; never null (initially empty).
#[no_mangle]
pub extern "C" fn scnet_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

// ---- Config handles ----

/// Creates a configuration from a named preset (`"paper"` or `"desk"`).
///
/// # Safety
/// `preset` must be a nul-terminated string; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn scnet_config_new(
    preset: *const c_char,
    out: *mut *mut ScnetConfig,
) -> ScnetStatus {
    guard(|| {
        let name = unsafe { want_str(preset, "preset") }?;
        let preset: Preset = name
            .parse()
            .map_err(|e: Error| (ScnetStatus::ConfigError, e.to_string()))?;
        unsafe { hand_out(out, "out", ScnetConfig { inner: preset.config() }) }
    })
}

/// Applies a TOML override document on top of an existing configuration.
/// On error the configuration is left unchanged.
///
/// # Safety
/// `config` must be a live handle from `scnet_config_new`; `text` must be a
/// nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn scnet_config_overlay_toml(
    config: *mut ScnetConfig,
    text: *const c_char,
) -> ScnetStatus {
    guard(|| {
        let handle = unsafe { want_mut(config, "config") }?;
        let text = unsafe { want_str(text, "text") }?;
        handle.inner = core(handle.inner.clone().overlay_toml(text))?;
        Ok(())
    })
}

/// Replaces the master seed that generation and training derive from.
///
/// # Safety
/// `config` must be a live handle from `scnet_config_new`.
#[no_mangle]
pub unsafe extern "C" fn scnet_config_set_seed(
    config: *mut ScnetConfig,
    seed: u64,
) -> ScnetStatus {
    guard(|| {
        unsafe { want_mut(config, "config") }?.inner.master_seed = seed;
        Ok(())
    })
}

/// Releases a configuration handle. Null is ignored.
///
/// # Safety
/// `config` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn scnet_config_free(config: *mut ScnetConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

// ---- Dataset handles ----

/// Generates the uplink/downlink sample collection the configuration
/// describes, deterministically in its master seed.
///
/// # Safety
/// `config` must be a live handle; `out` must point to writable storage for
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn scnet_dataset_generate(
    config: *const ScnetConfig,
    out: *mut *mut ScnetDataset,
) -> ScnetStatus {
    guard(|| {
        let cfg = &unsafe { want_ref(config, "config") }?.inner;
        let settings = core(cfg.run_settings())?;
        let params = settings.gen_params(derive_seed(cfg.master_seed, "dataset", 0));
        let ds = core(generate(&params))?.dataset;
        unsafe { hand_out(out, "out", ScnetDataset { inner: ds }) }
    })
}

/// Loads a dataset file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn scnet_dataset_load(
    path: *const c_char,
    out: *mut *mut ScnetDataset,
) -> ScnetStatus {
    guard(|| {
        let path = unsafe { want_str(path, "path") }?;
        let ds = core(Dataset::load(Path::new(path)))?;
        unsafe { hand_out(out, "out", ScnetDataset { inner: ds }) }
    })
}

/// Writes a dataset file (bit-exact round trip with `scnet_dataset_load`).
///
/// # Safety
/// `dataset` must be a live handle; `path` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn scnet_dataset_save(
    dataset: *const ScnetDataset,
    path: *const c_char,
) -> ScnetStatus {
    guard(|| {
        let ds = unsafe { want_ref(dataset, "dataset") }?;
        let path = unsafe { want_str(path, "path") }?;
        core(ds.inner.save(Path::new(path)))
    })
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scnet_dataset_len(dataset: *const ScnetDataset) -> usize {
    unsafe { dataset.as_ref() }.map_or(0, |ds| ds.inner.len())
}

/// Complex entries per sample (the antenna count), or 0 for a null handle.
///
/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scnet_dataset_dim(dataset: *const ScnetDataset) -> usize {
    unsafe { dataset.as_ref() }.map_or(0, |ds| ds.inner.dim())
}

/// Releases a dataset handle. Null is ignored.
///
/// # Safety
/// `dataset` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn scnet_dataset_free(dataset: *mut ScnetDataset) {
    if !dataset.is_null() {
        drop(unsafe { Box::from_raw(dataset) });
    }
}

// ---- Model handles ----

/// Trains a model of the requested family on the dataset, using the
/// configuration's split, architecture, optimizer settings, and master
/// seed. The dataset's antenna count must match the configuration. On
/// success, if `final_nmse` is non-null it receives the held-out NMSE of
/// the trained model.
///
/// # Safety
/// `config` and `dataset` must be live handles; `out` must point to
/// writable storage for one pointer; `final_nmse` must be null or point to
/// writable storage for one double.
#[no_mangle]
pub unsafe extern "C" fn scnet_model_train(
    config: *const ScnetConfig,
    dataset: *const ScnetDataset,
    kind: ScnetModelKind,
    out: *mut *mut ScnetModel,
    final_nmse: *mut f64,
) -> ScnetStatus {
    guard(|| {
        let cfg = &unsafe { want_ref(config, "config") }?.inner;
        let ds = &unsafe { want_ref(dataset, "dataset") }?.inner;
        let settings = core(cfg.run_settings())?;
        if ds.dim() != settings.scnet_sizes[0] {
            return Err((
                ScnetStatus::ShapeError,
                format!(
                    "dataset has {} antennas but the configuration expects {}",
                    ds.dim(),
                    settings.scnet_sizes[0]
                ),
            ));
        }
        let (tr, ev) = core(ds.split(settings.train_fraction))?;
        let pool = core(cfg.effective_workers().and_then(make_pool))?;
        let (model, report, _) =
            core(train_split(&settings, kind.into(), cfg.master_seed, &tr, &ev, &pool))?;
        if !final_nmse.is_null() {
            unsafe { final_nmse.write(report.final_eval_nmse) };
        }
        unsafe { hand_out(out, "out", ScnetModel { inner: model }) }
    })
}

/// Loads a weight file of either family, detected from its magic bytes.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn scnet_model_load(
    path: *const c_char,
    out: *mut *mut ScnetModel,
) -> ScnetStatus {
    guard(|| {
        let path = unsafe { want_str(path, "path") }?;
        let model = core(TrainedModel::load_auto(Path::new(path)))?;
        unsafe { hand_out(out, "out", ScnetModel { inner: model }) }
    })
}

/// Writes a weight file (bit-exact round trip with `scnet_model_load`).
///
/// # Safety
/// `model` must be a live handle; `path` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn scnet_model_save(
    model: *const ScnetModel,
    path: *const c_char,
) -> ScnetStatus {
    guard(|| {
        let model = unsafe { want_ref(model, "model") }?;
        let path = unsafe { want_str(path, "path") }?;
        core(model.inner.save(Path::new(path)))
    })
}

/// Family name of the model as a static string (`"scnet"` or `"fnn"`), or
/// null for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scnet_model_kind_name(model: *const ScnetModel) -> *const c_char {
    match unsafe { model.as_ref() } {
        Some(m) => match m.inner {
            TrainedModel::Scnet(_) => b"scnet\0".as_ptr() as *const c_char,
            TrainedModel::Fnn(_) => b"fnn\0".as_ptr() as *const c_char,
        },
        None => std::ptr::null(),
    }
}

/// Complex entries per input/output sample, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scnet_model_dim(model: *const ScnetModel) -> usize {
    match unsafe { model.as_ref() } {
        Some(m) => match &m.inner {
            TrainedModel::Scnet(net) => net.input_dim(),
            TrainedModel::Fnn(fnn) => fnn.complex_dim(),
        },
        None => 0,
    }
}

/// Number of real parameter components, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scnet_model_param_count(model: *const ScnetModel) -> usize {
    unsafe { model.as_ref() }.map_or(0, |m| m.inner.param_count())
}

/// Applies the model to one complex sample. Both buffers hold
/// (real, imaginary) pairs, interleaved, so their length in doubles is
/// twice the model dimension; `input_len` and `output_len` say how many
/// doubles each buffer holds. The input is used as-is — callers working
/// with raw channel vectors apply their dataset's normalization first.
///
/// # Safety
/// `model` must be a live handle; `input` must point to `input_len`
/// readable doubles and `output` to `output_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn scnet_model_predict(
    model: *const ScnetModel,
    input: *const f64,
    input_len: usize,
    output: *mut f64,
    output_len: usize,
) -> ScnetStatus {
    guard(|| {
        let model = &unsafe { want_ref(model, "model") }?.inner;
        if input.is_null() {
            return Err(null_arg("input"));
        }
        if output.is_null() {
            return Err(null_arg("output"));
        }
        let dim = match model {
            TrainedModel::Scnet(net) => net.input_dim(),
            TrainedModel::Fnn(fnn) => fnn.complex_dim(),
        };
        if input_len != 2 * dim || output_len != 2 * dim {
            return Err((
                ScnetStatus::ShapeError,
                format!(
                    "model of dimension {dim} needs {} doubles per buffer, got {input_len} in / {output_len} out",
                    2 * dim
                ),
            ));
        }
        let input = unsafe { std::slice::from_raw_parts(input, input_len) };
        let x: Vec<Complex64> =
            input.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        let mut y = vec![Complex64::new(0.0, 0.0); dim];
        core(model.predict_into(&x, &mut y))?;
        let output = unsafe { std::slice::from_raw_parts_mut(output, output_len) };
        for (pair, c) in output.chunks_exact_mut(2).zip(&y) {
            pair[0] = c.re;
            pair[1] = c.im;
        }
        Ok(())
    })
}

/// Mean relative squared error of the model's predictions over a dataset,
/// written to `out`.
///
/// # Safety
/// `model` and `dataset` must be live handles; `out` must point to writable
/// storage for one double.
#[no_mangle]
pub unsafe extern "C" fn scnet_model_nmse(
    model: *const ScnetModel,
    dataset: *const ScnetDataset,
    out: *mut f64,
) -> ScnetStatus {
    guard(|| {
        let model = &unsafe { want_ref(model, "model") }?.inner;
        let ds = &unsafe { want_ref(dataset, "dataset") }?.inner;
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let report = core(dataset_nmse(model, ds))?;
        unsafe { out.write(report.nmse) };
        Ok(())
    })
}

/// Releases a model handle. Null is ignored.
///
/// # Safety
/// `model` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn scnet_model_free(model: *mut ScnetModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

// ---- Complexity counts ----

/// Multiply count of a complex-valued network with the given layer widths,
/// weighting each complex multiply as four real ones. Returns 0 if `sizes`
/// is null or `n_sizes` < 2.
///
/// # Safety
/// `sizes` must be null or point to `n_sizes` readable entries.
#[no_mangle]
pub unsafe extern "C" fn scnet_flops_complex(sizes: *const usize, n_sizes: usize) -> u64 {
    if sizes.is_null() || n_sizes < 2 {
        return 0;
    }
    complex_flops(unsafe { std::slice::from_raw_parts(sizes, n_sizes) })
}

/// Real multiply count of a real-valued network with the given layer
/// widths. Returns 0 if `sizes` is null or `n_sizes` < 2.
///
/// # Safety
/// `sizes` must be null or point to `n_sizes` readable entries.
#[no_mangle]
pub unsafe extern "C" fn scnet_flops_real(sizes: *const usize, n_sizes: usize) -> u64 {
    if sizes.is_null() || n_sizes < 2 {
        return 0;
    }
    real_flops(unsafe { std::slice::from_raw_parts(sizes, n_sizes) })
}
