use pdqp::adversary::{build_relation, compute_bounds, BoundReport, RelationInstance, WeightScheme, DEFAULT_EPSILON};
use pdqp::algorithms::{build_algorithm, AlgorithmSpec, Model};
use pdqp::bench::verify::{Suite, SuiteReport, VerifyOptions};
use pdqp::bench::{verify_all, ExperimentSpec, OutputFormat};
use pdqp::engine::{run_direct, StepCircuit};
use pdqp::problems::{generate_instance, InstanceParams, ProblemInstance, ProblemKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn round_trip<T: serde::Serialize + serde::de::DeserializeOwned + PartialEq + std::fmt::Debug>(v: &T) {
    let text = serde_json::to_string(v).unwrap();
    assert_eq!(&serde_json::from_str::<T>(&text).unwrap(), v);
}

#[test]
fn algorithms_and_circuits() {
    for kind in ProblemKind::ALL {
        for model in Model::ALL {
            let algo = build_algorithm(kind, model, 16, None, None).unwrap();
            round_trip::<AlgorithmSpec>(&algo);
            let c = StepCircuit::from_json(&algo.circuit.to_json()).unwrap();
            assert_eq!(c, algo.circuit);
        }
    }
}

#[test]
fn circuit_json_drives_the_same_run() {
    let algo = build_algorithm(ProblemKind::Search, Model::Pdqp, 27, None, None).unwrap();
    let back = StepCircuit::from_json(&algo.circuit.to_json()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inst = generate_instance(ProblemKind::Search, 27, &InstanceParams::default(), &mut rng).unwrap();
    let a = run_direct(&algo.circuit, &inst, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let b = run_direct(&back, &inst, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    assert_eq!(a, b);
    round_trip(&a);
}

#[test]
fn instances_relations_and_bounds() {
    let inst = ProblemInstance::from_table(ProblemKind::ElementDistinctness, vec![0, 1, 1, 3]).unwrap();
    round_trip(&inst);
    let text = serde_json::to_string(&inst).unwrap();
    assert!(text.contains("\"N\":4") && text.contains("element_distinctness"));
    let r = build_relation(ProblemKind::Majority, 6).unwrap();
    round_trip::<RelationInstance>(&r);
    round_trip(&WeightScheme::uniform(&r));
    let b = compute_bounds(ProblemKind::Search, 64, Model::PdqpNaq, DEFAULT_EPSILON).unwrap();
    round_trip::<BoundReport>(&b);
    assert!(serde_json::to_string(&b).unwrap().contains("\"model\":\"pdqp-naq\""));
}

#[test]
fn experiment_spec_defaults_fill_in() {
    let spec: ExperimentSpec = serde_json::from_str(r#"{"problem": "parity", "N": [16, 64]}"#).unwrap();
    assert_eq!(spec.n, vec![16, 64]);
    assert_eq!(spec.model, Model::Pdqp);
    assert_eq!(spec.target, 2.0 / 3.0);
    assert_eq!(spec.out, OutputFormat::Csv);
    round_trip(&spec);
    let alias: ExperimentSpec = serde_json::from_str(r#"{"model": "pdqp_naq", "problem": "ed"}"#).unwrap();
    assert_eq!((alias.model, alias.problem), (Model::PdqpNaq, ProblemKind::ElementDistinctness));
}

#[test]
fn suite_report() {
    let rep = verify_all(&VerifyOptions {
        seed: 2,
        suites: vec![Suite::Polynomial, Suite::Lifted],
        mutate_reweight: false,
    })
    .unwrap();
    round_trip::<SuiteReport>(&rep);
    assert!(serde_json::to_string(&rep).unwrap().contains("\"suite\":\"polynomial\""));
}
