use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use tempfile::TempDir;
use viscofix::config::{ASpec, FSpec, FamilyKind, MapSpec, Reference, SampleSpec, SetSpec};
use viscofix::{parse_config, ExperimentConfig};
use viscofix_core::family::Extension;
use viscofix_core::schedule::ScalarSchedule;

const K_SIN_COS: &str = "\
[problem]
family = k
maps = sin,cos
weights = 0.5,0.3333333333
x0 = 3.0
[viscosity]
f = linear:0.5
gamma = 1
A = scaled_identity:1.0
[schedule]
alpha = power:1,1
beta = const:0.1
gammaseq = const:0.5
delta = const:0.5
d = 0.3
[stop]
eps = 1e-7
max_iter = 100000
";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_viscofix"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(config: &Path, trace: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg("--config").arg(config).arg("--trace").arg(trace).args(extra).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn summary_q(summary: &str) -> f64 {
    summary.lines().find_map(|l| l.strip_prefix("q = ")).unwrap().parse().unwrap()
}

#[test]
fn converged_run_exits_zero_and_writes_both_files() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "k.cfg", K_SIN_COS);
    let trace = dir.path().join("trace.csv");
    let out = dir.path().join("summary.txt");
    let o = run(&cfg, &trace, &["--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(&out).unwrap();
    assert!((summary_q(&summary) - 0.7145797).abs() < 1e-6);
    assert!(summary.contains("reason = "));
    let csv = fs::read_to_string(&trace).unwrap();
    assert!(csv.lines().any(|l| l == "n,x_1,z_1,y_1,step_norm,r,delta"));
}

#[test]
fn max_iter_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "k.cfg", &K_SIN_COS.replace("max_iter = 100000", "max_iter = 10"));
    let o = run(&cfg, &dir.path().join("t.csv"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("iterations = 10"));
}

#[test]
fn invalid_config_exits_one_and_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bad.cfg", &K_SIN_COS.replace("x0 = 3.0", "x0 = 3.0\nbogus = 1"));
    let trace = dir.path().join("t.csv");
    let out = dir.path().join("s.txt");
    let o = run(&cfg, &trace, &["--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 6"), "{err}");
    assert!(!trace.exists() && !out.exists());

    let o = run(&dir.path().join("missing.cfg"), &trace, &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!trace.exists());
}

#[test]
fn rejected_schedules_exit_three_unless_forced() {
    let dir = TempDir::new().unwrap();
    let text = K_SIN_COS.replace("delta = const:0.5", "delta = const:0");
    let cfg = write(&dir, "c.cfg", &text);
    let trace = dir.path().join("t.csv");
    let o = run(&cfg, &trace, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!trace.exists());

    let forced = write(&dir, "f.cfg", &text.replace("x0 = 3.0", "x0 = 3.0\nforce = true"));
    let o = run(&forced, &trace, &[]);
    assert!(matches!(o.status.code(), Some(0 | 2)));
    assert!(fs::read_to_string(&trace).unwrap().contains("force = true"));
}

#[test]
fn oracle_bracket_without_sign_change_exits_four() {
    let o = bin().args(["oracle", "cos", "2", "3", "1e-10"]).output().unwrap();
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn oracle_prints_fixed_points() {
    let o = bin().args(["oracle", "cos", "0", "1", "1e-12"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0.7390851332");

    let o = bin().args(["oracle", "k:sin,cos:0.5,0.3333333333", "-3", "3", "1e-12"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let x: f64 = stdout(&o).trim().parse().unwrap();
    assert!((x - 0.71491).abs() < 1e-5, "{x}");
}

#[test]
fn runs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let text = K_SIN_COS.replace("x0 = 3.0", "x0 = 3.0\nvi_samples = random:-3,3,50");
    let cfg = write(&dir, "k.cfg", &text);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let oa = run(&cfg, &a, &["--seed", "9"]);
    let ob = run(&cfg, &b, &["--seed", "9"]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(oa.stdout, ob.stdout);
    assert!(stdout(&oa).contains("vi_residual = "));
}

#[test]
fn trace_header_reparses_to_the_same_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "k.cfg", K_SIN_COS);
    let trace = dir.path().join("t.csv");
    run(&cfg, &trace, &[]);
    let csv = fs::read_to_string(&trace).unwrap();
    let echoed: String = csv
        .lines()
        .map_while(|l| l.strip_prefix("# "))
        .take_while(|l| *l != "--")
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(parse_config(&echoed).unwrap(), parse_config(K_SIN_COS).unwrap());
}

#[test]
fn sine_atan_k_run_approaches_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "k.cfg", &K_SIN_COS.replace("maps = sin,cos", "maps = sin,atan"));
    let o = run(&cfg, &dir.path().join("t.csv"), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(summary_q(&stdout(&o)).abs() <= 0.02);
}

#[test]
fn tables_report_k_rows_within_tolerance() {
    for which in ["1", "3"] {
        let dir = TempDir::new().unwrap();
        let o = bin().args(["tables", "--which", which, "--out"]).arg(dir.path()).output().unwrap();
        assert_eq!(o.status.code(), Some(0));
        let report = stdout(&o);
        assert_eq!(fs::read_to_string(dir.path().join("report.txt")).unwrap(), report);
        assert!(dir.path().join(format!("table{which}_k.csv")).exists());
        assert!(dir.path().join(format!("table{which}_w.csv")).exists());
        let k_block: Vec<&str> =
            report.lines().skip_while(|l| *l != format!("table {which} K:")).skip(1).take_while(|l| l.starts_with(' ')).collect();
        assert!(k_block.iter().any(|l| l.contains("(within 1e-3)")), "{report}");
    }
}

#[test]
fn validate_reports_table_caveat_and_constant_alpha_failure() {
    let dir = TempDir::new().unwrap();
    let table = K_SIN_COS.replace("alpha = power:1,1", "alpha = table:1,0.5,0.3,0.2,0.1,0.05");
    let o = bin().arg("validate").arg("--config").arg(write(&dir, "t.cfg", &table)).output().unwrap();
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("C1: pass-numeric"), "{text}");
    assert!(text.contains("tail unverifiable"));

    let constant = K_SIN_COS.replace("alpha = power:1,1", "alpha = const:0.5");
    let o = bin().arg("validate").arg("--config").arg(write(&dir, "c.cfg", &constant)).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("C1: fail(n=0)"));
}

fn schedule() -> impl Strategy<Value = ScalarSchedule> {
    prop_oneof![
        (0.01..1.0f64).prop_map(ScalarSchedule::Constant),
        (0.01..1.0f64, 0.0..2.0f64).prop_map(|(a, p)| ScalarSchedule::power(a, p)),
        prop::collection::vec(0.0..1.0f64, 1..6).prop_map(ScalarSchedule::Table),
    ]
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    (1usize..4).prop_flat_map(|dim| {
        let maps = prop::collection::vec(
            if dim == 1 {
                prop_oneof![
                    prop::sample::select(vec!["id", "sin", "cos", "atan"]).prop_map(|m| MapSpec::Builtin(m.into())),
                    (-3.0..0.0f64, 0.0..3.0f64).prop_map(|(lo, hi)| MapSpec::Interval(lo, hi)),
                ]
                .boxed()
            } else {
                prop::sample::select(vec!["id", "sin", "cos", "atan"]).prop_map(|m| MapSpec::Builtin(m.into())).boxed()
            },
            1..4,
        );
        let set = prop_oneof![
            Just(SetSpec::All),
            (-5.0..0.0f64, 0.0..5.0f64).prop_map(|(lo, hi)| SetSpec::Box(lo, hi)),
            (prop::collection::vec(-2.0..2.0f64, dim), 0.1..5.0f64).prop_map(|(center, radius)| SetSpec::Ball { center, radius }),
        ];
        let samples = prop_oneof![
            Just(None),
            (-3.0..0.0f64, 0.0..3.0f64, 1usize..50).prop_map(|(lo, hi, count)| Some(SampleSpec::Random { lo, hi, count })),
            (-3.0..0.0f64, 0.0..3.0f64, 1usize..50).prop_map(move |(lo, hi, count)| (dim == 1).then_some(SampleSpec::Grid { lo, hi, count })),
        ];
        let reference = prop_oneof![
            Just(Reference::Oracle),
            Just(Reference::None),
            prop::collection::vec(-3.0..3.0f64, dim).prop_map(Reference::Value),
        ];
        let f = prop_oneof![
            (0.05..0.95f64, any::<bool>()).prop_map(|(a, neg)| FSpec::Linear(if neg { -a } else { a })),
            prop::collection::vec(-3.0..3.0f64, dim).prop_map(FSpec::Const),
        ];
        let a = prop_oneof![
            (1.0..2.0f64).prop_map(ASpec::ScaledIdentity),
            prop::collection::vec(1.0..2.0f64, dim).prop_map(ASpec::Diag),
        ];
        (
            (any::<bool>(), maps, any::<bool>(), set, prop::collection::vec(-5.0..5.0f64, dim)),
            (prop::option::of(1usize..6), any::<bool>(), samples, reference),
            (f, 0.1..0.9f64, a),
            (schedule(), schedule(), schedule(), schedule(), 0.01..0.99f64),
            (1e-12..1e-3f64, 1usize..1_000_000),
        )
            .prop_map(|(p, q, v, s, stop)| {
                let (is_w, maps, cycle, set, x0) = p;
                let weights = (0..maps.len()).map(|i| 0.9 / (i as f64 + 1.5)).collect();
                ExperimentConfig {
                    family: if is_w { FamilyKind::W } else { FamilyKind::K },
                    maps,
                    weights,
                    extend: if cycle { Extension::Cycle } else { Extension::IdentityPad },
                    set,
                    x0,
                    freeze: q.0,
                    force: q.1,
                    vi_samples: q.2,
                    reference: q.3,
                    f: v.0,
                    gamma: v.1,
                    a: v.2,
                    alpha: s.0,
                    beta: s.1,
                    gammaseq: s.2,
                    delta: s.3,
                    d: s.4,
                    eps: stop.0,
                    max_iter: stop.1,
                }
            })
    })
}

proptest! {
    #![proptest_config(Config { cases: 1000, rng_seed: RngSeed::Fixed(5), failure_persistence: None, ..Config::default() })]

    #[test]
    fn config_text_round_trips(cfg in config()) {
        let text = cfg.to_string();
        let back = parse_config(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, cfg);
    }
}
