use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cocked_hat_cli::config::{
    CommandKind, CounterexampleArg, ExperimentConfig, FormulationArg, KindArg, QuantityArg,
    ScenarioSource,
};
use proptest::prelude::*;

fn cockedhat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cockedhat"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const EQ3: &str = "\
# equilateral sites around the origin
P 0 1
P -0.8660254037844386 -0.5
P 0.8660254037844386 -0.5
F 0 0
";

fn workdir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("eq3.scn"), EQ3).unwrap();
    dir
}

#[test]
fn exact_on_equilateral_file() {
    let dir = workdir();
    let o = cockedhat(
        dir.path(),
        &[
            "exact",
            "--scenario",
            "eq3.scn",
            "--model",
            "tworay:±10deg",
            "--formulation",
            "constrained",
            "-o",
            "r.csv",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("2/8 = 0.25\n"));
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "quantity,formulation,n,numerator,denominator,reduced,decimal,forming,favorable,scenario_sha256"
    );
    assert!(lines
        .next()
        .unwrap()
        .starts_with("hat,constrained,3,2,8,1/4,0.25,8,--- +++,"));
}

#[test]
fn spec_examples() {
    let dir = workdir();
    let o = cockedhat(dir.path(), &["special", "--n", "4", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("special selections: 8 of 16"));
    let o = cockedhat(dir.path(), &["counterexample", "ce1"]);
    assert_eq!(
        stdout(&o).trim(),
        "conjunction 1/8, conditional 1/1, properties: 4/4 verified"
    );
}

#[test]
fn exit_codes() {
    let dir = workdir();
    let d = dir.path();
    let usage: [&[&str]; 6] = [
        &["nonsense"],
        &["exact", "--scenario", "missing.scn", "--model", "auto"],
        &["exact", "--scenario", "eq3.scn", "--model", "gauss:2deg"],
        &[
            "simulate",
            "--scenario",
            "eq3.scn",
            "--model",
            "auto",
            "--trials",
            "many",
        ],
        &["gen", "--n", "3", "--case", "4", "-o", "x.scn"],
        &["run", "--config", "missing.json"],
    ];
    for args in usage {
        assert_eq!(cockedhat(d, args).status.code(), Some(2), "{args:?}");
    }
    fs::write(d.join("bad.scn"), "P 0 1\nP 1 one\nF 0 0\n").unwrap();
    let o = cockedhat(d, &["exact", "--scenario", "bad.scn", "--model", "auto"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.scn:2:"), "{}", stderr(&o));

    let validation: [&[&str]; 3] = [
        &["exact", "--scenario", "eq3.scn", "--model", "tworay:±80deg"],
        &[
            "exact",
            "--scenario",
            "eq3.scn",
            "--model",
            "interval:5deg;interval:5deg",
        ],
        &["regions", "--line", "0,0,0", "--line", "1,0,180deg"],
    ];
    for args in validation {
        assert_eq!(cockedhat(d, args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn generated_scenarios_keep_their_hash() {
    let dir = workdir();
    let d = dir.path();
    let o = cockedhat(
        d,
        &[
            "gen", "--n", "6", "--seed", "11", "--kind", "tworay", "-o", "g.scn",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let hash_line = |s: String| {
        s.lines()
            .find(|l| l.starts_with("scenario sha256"))
            .unwrap()
            .to_string()
    };
    let gen_hash = hash_line(stdout(&o));
    let model = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("model: "))
        .unwrap()
        .to_string();
    let o = cockedhat(
        d,
        &[
            "exact",
            "--scenario",
            "g.scn",
            "--model",
            &model,
            "--quantity",
            "unbounded",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("12/64 = 0.1875\n"), "{}", stdout(&o));
    assert_eq!(hash_line(stdout(&o)), gen_hash);
}

#[test]
fn saved_configs_replay() {
    let dir = workdir();
    let d = dir.path();
    let o = cockedhat(
        d,
        &[
            "simulate",
            "--scenario",
            "eq3.scn",
            "--model",
            "interval:10deg",
            "--trials",
            "20000",
            "--seed",
            "3",
            "-o",
            "a.csv",
            "--save-config",
            "cfg.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cfg = ExperimentConfig::load(&d.join("cfg.json")).unwrap();
    assert_eq!(cfg.command, CommandKind::Simulate);
    assert_eq!(cfg.output, Some(PathBuf::from("a.csv")));

    let mut replay = cfg.clone();
    replay.output = Some("b.csv".into());
    replay.save(&d.join("replay.json")).unwrap();
    let o = cockedhat(d, &["run", "--config", "replay.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        fs::read(d.join("a.csv")).unwrap(),
        fs::read(d.join("b.csv")).unwrap()
    );

    fs::write(
        d.join("typo.json"),
        "{\n  \"command\": \"simulate\",\n  \"trails\": 10\n}\n",
    )
    .unwrap();
    let o = cockedhat(d, &["run", "--config", "typo.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("trails") && stderr(&o).contains("line 3"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let dir = workdir();
    let o = Command::new(env!("CARGO_BIN_EXE_cockedhat"))
        .current_dir(dir.path())
        .env("COCKEDHAT_THREADS", "zero")
        .args(["counterexample", "CE2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        -1e3..1e3f64
    ]
}

fn source() -> impl Strategy<Value = ScenarioSource> {
    prop_oneof![
        "[a-z0-9_/]{1,12}\\.scn".prop_map(|p| ScenarioSource::File(p.into())),
        (
            prop::collection::vec([finite(), finite()], 1..6),
            [finite(), finite()]
        )
            .prop_map(|(points, target)| ScenarioSource::Inline { points, target }),
    ]
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    let commands = prop::sample::select(vec![
        CommandKind::Simulate,
        CommandKind::Exact,
        CommandKind::Special,
        CommandKind::Counterexample,
        CommandKind::Regions,
        CommandKind::Gen,
        CommandKind::Table,
    ]);
    let formulations = prop::sample::select(vec![
        FormulationArg::Conjunction,
        FormulationArg::Conditional,
        FormulationArg::Lines,
        FormulationArg::Constrained,
    ]);
    (
        (
            commands,
            prop::option::of(source()),
            prop::option::of("[ -~]{0,20}"),
        ),
        (
            prop::option::of(prop::sample::select(vec![
                QuantityArg::Hat,
                QuantityArg::Unbounded,
            ])),
            prop::option::of(formulations),
            prop::option::of(any::<u64>()),
            prop::option::of(any::<u64>()),
        ),
        (
            prop::option::of("[a-z0-9_.]{1,10}"),
            prop::option::of(any::<usize>()),
            prop::option::of(prop::sample::select(vec![
                KindArg::Interval,
                KindArg::Tworay,
            ])),
            prop::option::of(1u8..=3),
            prop::option::of(prop::sample::select(vec![
                CounterexampleArg::Ce1,
                CounterexampleArg::Ce2,
                CounterexampleArg::Ce3,
            ])),
            prop::collection::vec([finite(), finite(), finite()], 0..4),
        ),
    )
        .prop_map(
            |(
                (command, scenario, model),
                (quantity, formulation, trials, seed),
                (output, cap, kind, case, counterexample, lines),
            )| {
                let mut c = ExperimentConfig::new(command);
                c.scenario = scenario;
                c.model = model;
                c.quantity = quantity;
                c.formulation = formulation;
                c.trials = trials;
                c.seed = seed;
                c.output = output.map(PathBuf::from);
                c.cap = cap;
                c.n = cap.map(|v| v % 64);
                c.kind = kind;
                c.case = case;
                c.counterexample = counterexample;
                c.lines = lines;
                c
            },
        )
}

proptest! {
    #[test]
    fn configs_round_trip_losslessly(c in config()) {
        let back = ExperimentConfig::from_json(&c.to_json(), "mem").unwrap();
        prop_assert_eq!(back.to_json(), c.to_json());
        prop_assert_eq!(back, c);
    }
}
