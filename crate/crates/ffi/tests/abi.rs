use std::ffi::{CStr, CString};
use std::ptr;

use qboost::circuits::{Architecture, QcnnArchitecture};
use qboost::cli::{Checkpoint, CheckpointKind, Provenance, RngInfo, Task, CHECKPOINT_VERSION};
use qboost::ensemble::{EnsembleModel, Voting, WeakClassifierRecord};
use qboost::optim::{QcnnModel, QuantumClassifier};
use qboost::rng::{derive, Stream};
use qboost::sim::StateVector;
use qboost_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qb_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn bell_pair_through_the_c_surface() {
    unsafe {
        let mut state = ptr::null_mut();
        assert_eq!(qb_state_new(2, &mut state), QbStatus::Ok);
        let mut circuit = ptr::null_mut();
        assert_eq!(qb_circuit_new(2, &mut circuit), QbStatus::Ok);
        // RY(π/2) on qubit 0 then CNOT 0→1: (|00⟩ + |11⟩)/√2 up to RY's sign.
        assert_eq!(qb_circuit_param_rotation(circuit, QbAxis::Y, 0, 0), QbStatus::Ok);
        assert_eq!(qb_circuit_cnot(circuit, 0, 1), QbStatus::Ok);
        let mut slots = 0;
        assert_eq!(qb_circuit_n_slots(circuit, &mut slots), QbStatus::Ok);
        assert_eq!(slots, 1);
        let params = [std::f64::consts::FRAC_PI_2];
        assert_eq!(qb_circuit_apply(circuit, params.as_ptr(), 1, state), QbStatus::Ok);

        let mut probs = [0.0; 4];
        let qubits = [0usize, 1];
        assert_eq!(qb_state_probabilities(state, qubits.as_ptr(), 2, probs.as_mut_ptr(), 4), QbStatus::Ok);
        for (got, want) in probs.iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert!((got - want).abs() < 1e-12, "{probs:?}");
        }
        let (mut re, mut im) = ([0.0; 4], [0.0; 4]);
        assert_eq!(qb_state_amplitudes(state, re.as_mut_ptr(), im.as_mut_ptr(), 4), QbStatus::Ok);
        assert!((re[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12 && im.iter().all(|x| x.abs() < 1e-12));

        qb_circuit_free(circuit);
        qb_state_free(state);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut state = ptr::null_mut();
        assert_eq!(qb_state_new(0, &mut state), QbStatus::InvalidArgument);
        assert!(last_error().contains("qubit count"));
        assert_eq!(qb_state_new(1, ptr::null_mut()), QbStatus::NullPointer);

        let mut circuit = ptr::null_mut();
        assert_eq!(qb_circuit_new(1, &mut circuit), QbStatus::Ok);
        assert_eq!(qb_circuit_cnot(circuit, 0, 3), QbStatus::Domain);
        assert_eq!(qb_circuit_param_rotation(circuit, QbAxis::X, 0, 2), QbStatus::Ok);
        assert_eq!(qb_state_new(1, &mut state), QbStatus::Ok);
        assert_eq!(qb_circuit_apply(circuit, ptr::null(), 0, state), QbStatus::Binding);

        let re = [0.6, 0.0];
        let im = [0.0, 0.0];
        let mut bad = ptr::null_mut();
        assert_eq!(qb_state_from_amplitudes(re.as_ptr(), im.as_ptr(), 2, &mut bad), QbStatus::Domain);

        let missing = CString::new("/nonexistent/checkpoint.json").unwrap();
        let mut model = ptr::null_mut();
        assert_eq!(qb_model_load(missing.as_ptr(), &mut model), QbStatus::MissingInput);
        assert!(last_error().contains("checkpoint.json"));
        qb_circuit_free(circuit);
        qb_state_free(state);
        qb_state_free(ptr::null_mut());
    }
}

#[test]
fn checkpoint_predictions_match_the_library() {
    let arch = QcnnArchitecture::default();
    let classifier = QcnnModel::new(arch.clone()).unwrap();
    let mut rng = derive(11, Stream::Init, 0);
    let mut model = EnsembleModel::new(Architecture::Qcnn(arch), Voting::Soft);
    for alpha in [0.7, 1.3] {
        model.members.push(WeakClassifierRecord {
            params: classifier.init_params(&mut rng),
            alpha,
            c: 1.0,
            train_predictions: Vec::new(),
            train_confidences: Vec::new(),
        });
    }
    let checkpoint = Checkpoint {
        format_version: CHECKPOINT_VERSION,
        kind: CheckpointKind::Ensemble,
        task: Task::PhaseQcnn,
        algorithm: None,
        model: model.clone(),
        rng: RngInfo::new(11),
        provenance: Provenance { config_hash: String::new(), input_hash: String::new() },
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("checkpoint.json");
    checkpoint.save(&path).unwrap();

    let inputs: Vec<StateVector> = (0..4).map(|_| StateVector::random(15, &mut rng)).collect();
    let expected = model.predict(&classifier, &inputs).unwrap();
    unsafe {
        let c_path = CString::new(path.to_str().unwrap()).unwrap();
        let mut handle = ptr::null_mut();
        assert_eq!(qb_model_load(c_path.as_ptr(), &mut handle), QbStatus::Ok);
        let (mut k, mut members, mut kind) = (0, 0, QbInputKind::Image);
        assert_eq!(qb_model_n_classes(handle, &mut k), QbStatus::Ok);
        assert_eq!(qb_model_n_members(handle, &mut members), QbStatus::Ok);
        assert_eq!(qb_model_input_kind(handle, &mut kind), QbStatus::Ok);
        assert_eq!((k, members, kind), (3, 2, QbInputKind::State));

        for (x, &want) in inputs.iter().zip(&expected) {
            let re: Vec<f64> = x.amplitudes().iter().map(|a| a.re).collect();
            let im: Vec<f64> = x.amplitudes().iter().map(|a| a.im).collect();
            let mut s = ptr::null_mut();
            assert_eq!(qb_state_from_amplitudes(re.as_ptr(), im.as_ptr(), re.len(), &mut s), QbStatus::Ok);
            let mut label = usize::MAX;
            let mut scores = [0.0; 3];
            assert_eq!(qb_model_predict_state(handle, s, &mut label, scores.as_mut_ptr(), 3), QbStatus::Ok);
            assert_eq!(label, want);
            let total: f64 = scores.iter().sum();
            assert!(total > 0.0 && total <= 2.0 + 1e-9, "{scores:?}");
            let pixels = [0u8; 784];
            assert_eq!(
                qb_model_predict_image(handle, pixels.as_ptr(), 784, &mut label, ptr::null_mut(), 0),
                QbStatus::InvalidArgument
            );
            qb_state_free(s);
        }
        qb_model_free(handle);
    }
}

#[test]
fn header_is_valid_c() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = root.join("include/qboost.h");
    assert!(header.exists());
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["qb_state_new", "qb_circuit_apply", "qb_model_load", "qb_last_error_message", "QB_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-xc"])
        .arg(root.join("tests/smoke.c"))
        .arg(format!("-I{}", root.join("include").display()))
        .status()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(status.success());
}
