//! C ABI over the `qboost` crate.
//!
//! Every function returns a [`QbStatus`]. On failure the message is kept
//! per thread and can be read with [`qb_last_error_message`]. Objects are
//! opaque handles created by `*_new`/`*_load` and released with `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use num_complex::Complex64;
use qboost::circuits::{argmax, Architecture};
use qboost::cli::Checkpoint;
use qboost::datasets::{ImageSample, PIXELS};
use qboost::ensemble::Voting;
use qboost::optim::{QcnnModel, QnnModel, QuantumClassifier};
use qboost::sim::{Angle, GateOp, ParameterizedCircuit, StateVector};
use qboost::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Binding = 4,
    Format = 5,
    Numerical = 6,
    MissingInput = 7,
    Config = 8,
    Io = 9,
    Panic = 10,
}

/// Rotation axis.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbAxis {
    X = 0,
    Y = 1,
    Z = 2,
}

/// What a model consumes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbInputKind {
    /// 28×28 grayscale bytes.
    Image = 0,
    /// A statevector handle.
    State = 1,
}

pub struct QbState(StateVector);

pub struct QbCircuit(ParameterizedCircuit);

enum Classifier {
    Qnn(QnnModel),
    Qcnn(QcnnModel),
}

pub struct QbModel {
    checkpoint: Checkpoint,
    classifier: Classifier,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(QbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => QbStatus::Domain,
            Error::Binding { .. } => QbStatus::Binding,
            Error::Format { .. } | Error::Json(_) | Error::Csv(_) => QbStatus::Format,
            Error::Numerical(_) => QbStatus::Numerical,
            Error::MissingInput { .. } => QbStatus::MissingInput,
            Error::Config(_) => QbStatus::Config,
            Error::Io(_) => QbStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(QbStatus::InvalidArgument, msg.into())
}

fn null(name: &str) -> Failure {
    Failure(QbStatus::NullPointer, format!("{name} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QbStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QbStatus::Panic
        }
    }
}

unsafe fn obj<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn obj_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `|0…0⟩` on `n_qubits` qubits.
///
/// # Safety
/// `out` must be a valid pointer to write a handle into.
#[no_mangle]
pub unsafe extern "C" fn qb_state_new(n_qubits: usize, out: *mut *mut QbState) -> QbStatus {
    guard(|| {
        if n_qubits == 0 || n_qubits > qboost::sim::MAX_QUBITS {
            return Err(invalid(format!("qubit count {n_qubits} outside 1..={}", qboost::sim::MAX_QUBITS)));
        }
        put(out, QbState(StateVector::zero(n_qubits)))
    })
}

/// State from `len` amplitudes split into real and imaginary arrays. `len`
/// must be a power of two and the vector normalized.
///
/// # Safety
/// `re` and `im` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_state_from_amplitudes(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut QbState,
) -> QbStatus {
    guard(|| {
        let (re, im) = (slice(re, len, "re")?, slice(im, len, "im")?);
        let amps = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        put(out, QbState(StateVector::from_amplitudes(amps)?))
    })
}

/// # Safety
/// `state` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qb_state_free(state: *mut QbState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qb_state_n_qubits(state: *const QbState, out: *mut usize) -> QbStatus {
    guard(|| {
        let s = obj(state, "state")?;
        *obj_mut(out, "out")? = s.0.n_qubits();
        Ok(())
    })
}

/// Copy the `2^n` amplitudes into `re`/`im`, each of length `len`.
///
/// # Safety
/// `state` must be a live handle; `re` and `im` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qb_state_amplitudes(
    state: *const QbState,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> QbStatus {
    guard(|| {
        let s = obj(state, "state")?;
        if len != s.0.dim() {
            return Err(invalid(format!("buffer length {len}, state dimension {}", s.0.dim())));
        }
        let (re, im) = (slice_mut(re, len, "re")?, slice_mut(im, len, "im")?);
        for (i, a) in s.0.amplitudes().iter().enumerate() {
            re[i] = a.re;
            im[i] = a.im;
        }
        Ok(())
    })
}

/// Marginal outcome probabilities of `qubits` (first listed qubit is the
/// least-significant outcome bit) into `out` of length `2^n_measured`.
///
/// # Safety
/// `state` must be a live handle; `qubits` must hold `n_measured` entries
/// and `out` `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qb_state_probabilities(
    state: *const QbState,
    qubits: *const usize,
    n_measured: usize,
    out: *mut f64,
    len: usize,
) -> QbStatus {
    guard(|| {
        let s = obj(state, "state")?;
        let probs = s.0.measure_probs(slice(qubits, n_measured, "qubits")?)?;
        if probs.len() != len {
            return Err(invalid(format!("buffer length {len}, {} outcomes", probs.len())));
        }
        slice_mut(out, len, "out")?.copy_from_slice(&probs);
        Ok(())
    })
}

/// Empty circuit on `n_qubits` qubits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_circuit_new(n_qubits: usize, out: *mut *mut QbCircuit) -> QbStatus {
    guard(|| {
        if n_qubits == 0 || n_qubits > qboost::sim::MAX_QUBITS {
            return Err(invalid(format!("qubit count {n_qubits} outside 1..={}", qboost::sim::MAX_QUBITS)));
        }
        put(out, QbCircuit(ParameterizedCircuit::new(n_qubits)))
    })
}

/// # Safety
/// `circuit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_circuit_free(circuit: *mut QbCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

fn rotation(axis: QbAxis, q: usize, angle: Angle) -> GateOp {
    match axis {
        QbAxis::X => GateOp::Rx(q, angle),
        QbAxis::Y => GateOp::Ry(q, angle),
        QbAxis::Z => GateOp::Rz(q, angle),
    }
}

unsafe fn push(circuit: *mut QbCircuit, gate: GateOp) -> QbStatus {
    guard(|| Ok(obj_mut(circuit, "circuit")?.0.push(gate)?))
}

/// Append `R_axis(θ)` with a literal angle.
///
/// # Safety
/// `circuit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_circuit_rotation(
    circuit: *mut QbCircuit,
    axis: QbAxis,
    qubit: usize,
    angle: f64,
) -> QbStatus {
    push(circuit, rotation(axis, qubit, Angle::Fixed(angle)))
}

/// Append `R_axis(params[slot])`, bound when the circuit is applied.
///
/// # Safety
/// `circuit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_circuit_param_rotation(
    circuit: *mut QbCircuit,
    axis: QbAxis,
    qubit: usize,
    slot: usize,
) -> QbStatus {
    push(circuit, rotation(axis, qubit, Angle::Param(slot)))
}

/// # Safety
/// `circuit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_circuit_cnot(circuit: *mut QbCircuit, control: usize, target: usize) -> QbStatus {
    push(circuit, GateOp::Cnot { control, target })
}

/// # Safety
/// `circuit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_circuit_cz(circuit: *mut QbCircuit, a: usize, b: usize) -> QbStatus {
    push(circuit, GateOp::Cz(a, b))
}

/// Number of parameter slots the circuit references.
///
/// # Safety
/// `circuit` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qb_circuit_n_slots(circuit: *const QbCircuit, out: *mut usize) -> QbStatus {
    guard(|| {
        *obj_mut(out, "out")? = obj(circuit, "circuit")?.0.n_slots();
        Ok(())
    })
}

/// Evolve `state` in place with slots bound from `params`.
///
/// # Safety
/// Handles must be live; `params` must hold `n_params` doubles.
#[no_mangle]
pub unsafe extern "C" fn qb_circuit_apply(
    circuit: *const QbCircuit,
    params: *const f64,
    n_params: usize,
    state: *mut QbState,
) -> QbStatus {
    guard(|| {
        let c = obj(circuit, "circuit")?;
        let s = obj_mut(state, "state")?;
        if c.0.n_qubits() != s.0.n_qubits() {
            return Err(invalid(format!("circuit has {} qubits, state {}", c.0.n_qubits(), s.0.n_qubits())));
        }
        Ok(c.0.apply(&mut s.0, slice(params, n_params, "params")?)?)
    })
}

/// Load a checkpoint written by `qboost train` or `qboost boost`.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qb_model_load(path: *const c_char, out: *mut *mut QbModel) -> QbStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|_| invalid("path is not UTF-8"))?;
        let checkpoint = Checkpoint::load(Path::new(path))?;
        let classifier = match &checkpoint.model.architecture {
            Architecture::Qnn(a) => Classifier::Qnn(QnnModel::new(a.clone())?),
            Architecture::Qcnn(a) => Classifier::Qcnn(QcnnModel::new(a.clone())?),
        };
        put(out, QbModel { checkpoint, classifier })
    })
}

/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_model_free(model: *mut QbModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qb_model_n_classes(model: *const QbModel, out: *mut usize) -> QbStatus {
    guard(|| {
        *obj_mut(out, "out")? = obj(model, "model")?.checkpoint.model.n_classes;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qb_model_n_members(model: *const QbModel, out: *mut usize) -> QbStatus {
    guard(|| {
        *obj_mut(out, "out")? = obj(model, "model")?.checkpoint.model.len();
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qb_model_input_kind(model: *const QbModel, out: *mut QbInputKind) -> QbStatus {
    guard(|| {
        *obj_mut(out, "out")? = match obj(model, "model")?.classifier {
            Classifier::Qnn(_) => QbInputKind::Image,
            Classifier::Qcnn(_) => QbInputKind::State,
        };
        Ok(())
    })
}

/// Ensemble scores: `Σ α P` for soft voting, `Σ α [argmax P = k]` for hard.
fn ensemble_scores<M: QuantumClassifier>(model: &QbModel, m: &M, input: &M::Input) -> Result<Vec<f64>, Failure> {
    let ens = &model.checkpoint.model;
    let mut s = vec![0.0; ens.n_classes];
    for member in &ens.members {
        let p = m.class_probs(&member.params, input)?;
        match ens.voting {
            Voting::Soft => s.iter_mut().zip(&p).for_each(|(s, p)| *s += member.alpha * p),
            Voting::Hard => s[argmax(&p)] += member.alpha,
        }
    }
    Ok(s)
}

unsafe fn report(s: Vec<f64>, label: *mut usize, out_scores: *mut f64, len: usize) -> Result<(), Failure> {
    *obj_mut(label, "label")? = argmax(&s);
    if !out_scores.is_null() {
        if len != s.len() {
            return Err(invalid(format!("scores buffer length {len}, {} classes", s.len())));
        }
        slice_mut(out_scores, len, "scores")?.copy_from_slice(&s);
    }
    Ok(())
}

/// Classify a 28×28 image (`PIXELS` = 784 bytes, row-major). `scores` may
/// be null; otherwise it receives `n_classes` ensemble scores.
///
/// # Safety
/// `model` must be live, `pixels` hold `len` bytes, `label` be writable and
/// `scores` null or hold `scores_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qb_model_predict_image(
    model: *const QbModel,
    pixels: *const u8,
    len: usize,
    label: *mut usize,
    scores: *mut f64,
    scores_len: usize,
) -> QbStatus {
    guard(|| {
        let m = obj(model, "model")?;
        let Classifier::Qnn(qnn) = &m.classifier else {
            return Err(invalid("model classifies quantum states, not images"));
        };
        if len != PIXELS {
            return Err(invalid(format!("image has {len} bytes, expected {PIXELS}")));
        }
        let image = ImageSample { pixels: slice(pixels, len, "pixels")?.to_vec(), label: 0 };
        report(ensemble_scores(m, qnn, &image)?, label, scores, scores_len)
    })
}

/// Classify a quantum state.
///
/// # Safety
/// As [`qb_model_predict_image`], with `state` a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_model_predict_state(
    model: *const QbModel,
    state: *const QbState,
    label: *mut usize,
    scores: *mut f64,
    scores_len: usize,
) -> QbStatus {
    guard(|| {
        let m = obj(model, "model")?;
        let Classifier::Qcnn(qcnn) = &m.classifier else {
            return Err(invalid("model classifies images, not quantum states"));
        };
        let s = obj(state, "state")?;
        report(ensemble_scores(m, qcnn, &s.0)?, label, scores, scores_len)
    })
}
