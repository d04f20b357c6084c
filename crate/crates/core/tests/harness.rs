use homfinsler::harness::{
    cmd_catalog, cmd_crosscheck, cmd_scan, cmd_verify_case, exit_code, MetricConfig, PhiConfig, RunConfig, ScanConfig,
    SpaceConfig,
};
use homfinsler::Error;
use proptest::prelude::*;
use serde_json::Value;

fn quick_scan() -> ScanConfig {
    ScanConfig {
        flag_samples: 64,
        refine_iters: 4,
        s_samples: 50,
        oracle_points: 2,
        ..ScanConfig::default()
    }
}

fn randers_s3(eps: f64) -> RunConfig {
    RunConfig {
        space: SpaceConfig { case: 1, n: 1, ..SpaceConfig::default() },
        metric: MetricConfig {
            blocks: Some(vec![1.0, 1.0]),
            phi: PhiConfig {
                family: "randers".into(),
                eps: Some(eps),
                ..PhiConfig::default()
            },
            ..MetricConfig::default()
        },
        scan: quick_scan(),
        ..RunConfig::default()
    }
}

fn without_timing(json: &str) -> Value {
    let mut v: Value = serde_json::from_str(json).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_s");
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips_through_json(
        seed in any::<u64>(),
        case in prop::sample::select(vec![1u8, 2, 3, 4, 6, 7]),
        n in 1usize..4,
        k in -5i64..5,
        samples in 1usize..5000,
        eps in prop::option::of(0.0f64..0.9),
        blocks in prop::option::of(prop::collection::vec(0.1f64..2.0, 1..5)),
    ) {
        let cfg = RunConfig {
            space: SpaceConfig { case, n, k, ..SpaceConfig::default() },
            metric: MetricConfig {
                blocks,
                phi: match eps {
                    Some(e) => PhiConfig { family: "randers".into(), eps: Some(e), ..PhiConfig::default() },
                    None => PhiConfig::default(),
                },
                ..MetricConfig::default()
            },
            scan: ScanConfig { flag_samples: samples, ..ScanConfig::default() },
            seed,
            ..RunConfig::default()
        };
        prop_assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}

#[test]
fn sparse_configs_fill_defaults() {
    let cfg = RunConfig::from_json(r#"{"space": {"family": 6, "k": 2, "l": 1}, "seed": 9}"#).unwrap();
    assert_eq!(cfg.space.case, 6);
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.scan, ScanConfig::default());
}

#[test]
fn malformed_configs_are_config_errors() {
    for text in [
        r#"{"spaec": {}}"#,
        r#"{"metric": {"phi": {"family": "randers"}}}"#,
        r#"{"metric": {"phi": {"family": "randers", "eps": 0.1, "t": 0.1}}}"#,
        r#"{"metric": {"phi": {"family": "riemannian", "eps": 0.1}}}"#,
        r#"{"metric": {"phi": {"family": "polynomial"}}}"#,
        r#"{"metric": {"phi": {"family": "kropina"}}}"#,
        r#"{"scan": {"grid": [0.5, -1.0]}}"#,
        r#"{"oracle": {"enable": ["nonsense"]}}"#,
        r#"[1, 2]"#,
    ] {
        assert!(matches!(RunConfig::from_json(text), Err(Error::Config(_))), "{text}");
    }
}

#[test]
fn exit_codes_follow_outcomes() {
    let pass = cmd_verify_case(&randers_s3(0.2));
    assert!(pass.as_ref().unwrap().pass, "{}", pass.as_ref().unwrap().render_text());
    assert_eq!(exit_code(&pass), 0);

    let control = RunConfig {
        space: SpaceConfig { case: 6, k: 1, l: -1, negative_control: true, ..SpaceConfig::default() },
        metric: MetricConfig {
            phi: PhiConfig { family: "randers".into(), eps: Some(0.2), ..PhiConfig::default() },
            ..MetricConfig::default()
        },
        scan: quick_scan(),
        ..RunConfig::default()
    };
    let fail = cmd_verify_case(&control);
    assert!(!fail.as_ref().unwrap().pass);
    assert_eq!(exit_code(&fail), 1);

    let excluded = RunConfig {
        space: SpaceConfig { case: 6, k: 1, l: -1, ..SpaceConfig::default() },
        ..control
    };
    let err = cmd_verify_case(&excluded);
    assert!(matches!(err, Err(Error::Structural(_))));
    assert_eq!(exit_code(&err), 2);
}

#[test]
fn reports_are_deterministic_given_the_seed() {
    let cfg = RunConfig { seed: 17, ..randers_s3(0.3) };
    let a = cmd_scan(&cfg).unwrap().to_json();
    let b = cmd_scan(&cfg).unwrap().to_json();
    assert_eq!(without_timing(&a), without_timing(&b));
    let other = cmd_scan(&RunConfig { seed: 18, ..cfg }).unwrap().to_json();
    assert_ne!(without_timing(&a)["flag_curvature"], without_timing(&other)["flag_curvature"]);
}

#[test]
fn report_fields_keep_their_order() {
    let json = cmd_scan(&randers_s3(0.3)).unwrap().to_json();
    let keys = [
        "command",
        "case",
        "metric",
        "checks",
        "s_curvature",
        "flag_curvature",
        "pass",
        "config",
        "wall_time_s",
    ];
    // top-level keys sit at two-space indentation in the pretty output
    let pos: Vec<usize> = keys
        .iter()
        .map(|k| json.find(&format!("\n  \"{k}\"")).unwrap_or_else(|| panic!("{k} missing")))
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{pos:?}");
}

#[test]
fn single_sample_budget_still_reports() {
    let mut cfg = randers_s3(0.3);
    cfg.scan.flag_samples = 1;
    cfg.scan.s_samples = 1;
    let rep = cmd_scan(&cfg).unwrap();
    let flag = rep.flag_curvature.unwrap();
    assert!(flag.poles >= 1);
    assert!(flag.min.is_finite());
    assert_eq!(rep.s_curvature.unwrap().rays, 1);
}

#[test]
fn crosscheck_runs_selected_suites() {
    let cfg = RunConfig {
        scan: quick_scan(),
        oracle: homfinsler::harness::OracleConfig { enable: vec!["riemannian".into(), "structural".into()] },
        ..RunConfig::default()
    };
    let rep = cmd_crosscheck(&cfg).unwrap();
    assert!(rep.pass, "{}", rep.render_text());
    assert!(rep.oracle.iter().all(|r| r.suite.starts_with("riemannian/")));
    assert!(!rep.oracle.is_empty());
    assert!(!rep.checks.is_empty());
}

#[test]
fn catalog_json_lists_every_case() {
    let rep = cmd_catalog();
    let v: Value = serde_json::from_str(&rep.to_json()).unwrap();
    assert_eq!(v["cases"].as_array().unwrap().len(), 10);
    assert_eq!(v["admissible"], 6);
    assert!(rep.render_text().contains("6 admissible"));
}
