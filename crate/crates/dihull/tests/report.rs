use dihull::config::{InstanceSource, PointSpec};
use dihull::corpus::{generate_corpus, standard_line};
use dihull::run::{parse_config, HarnessError};
use dihull::{run, ExperimentConfig, ExperimentReport, Instance, Mode, Task};

fn line_config(task: Task) -> ExperimentConfig {
    ExperimentConfig {
        task,
        instance: Some(InstanceSource::Inline(Instance::from_cloud(&standard_line()))),
        samples: 5,
        seed: 11,
        ..ExperimentConfig::default()
    }
}

#[test]
fn reports_round_trip_losslessly() {
    for task in [Task::Suite, Task::Embed, Task::Qe, Task::Chebyshev, Task::Descent, Task::CheckTakahashi, Task::CheckPair] {
        for mode in [Mode::Exact, Mode::Float] {
            let cfg = ExperimentConfig { mode, ..line_config(task) };
            let r = run(&cfg).unwrap();
            let back: ExperimentReport = serde_json::from_str(&r.to_json()).unwrap();
            assert_eq!(back, r);
            assert_eq!(back.to_json(), r.to_json());
        }
    }
}

#[test]
fn same_seed_gives_identical_reports() {
    let cfg = line_config(Task::Suite);
    assert_eq!(run(&cfg).unwrap().to_json(), run(&cfg).unwrap().to_json());
    let other = ExperimentConfig { seed: 12, ..cfg.clone() };
    assert_eq!(run(&other).unwrap().config.seed, 12);
}

#[test]
fn malformed_rational_is_a_parse_error() {
    let text = "{\n  \"instance\": {\"kind\": \"matrix\",\n  \"q\": [[\"0\", \"1/0\"], [\"1\", \"0\"]]}\n}";
    match parse_config("bad.json", text) {
        Err(HarnessError::Parse { path, line, .. }) => {
            assert_eq!(path, "bad.json");
            assert_eq!(line, 3);
        }
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn validation_errors_carry_context() {
    let cfg = ExperimentConfig { points: vec![PointSpec::Embed { embed: 9 }], ..line_config(Task::Qe) };
    let e = run(&cfg).unwrap_err();
    assert!(matches!(e, HarnessError::Validation { .. }));
    assert!(e.to_string().starts_with("point 0"), "{e}");
}

#[test]
fn corpus_instances_pass_the_suite() {
    for inst in generate_corpus(7, &[3, 4, 5], 3) {
        let cfg = ExperimentConfig {
            instance: Some(InstanceSource::Inline(inst)),
            samples: 4,
            ..ExperimentConfig::default()
        };
        let r = run(&cfg).unwrap();
        assert!(r.passed(), "{:?}", r.verdicts);
    }
}

#[test]
fn affine_takahashi_on_line_passes() {
    let r = run(&line_config(Task::CheckTakahashi)).unwrap();
    assert!(r.passed(), "{:?}", r.verdicts);
    assert_eq!(r.values["total"], serde_json::json!(false));
}
