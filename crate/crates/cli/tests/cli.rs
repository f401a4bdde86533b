use std::path::{Path, PathBuf};
use std::process::Command;

use fde_cli::commands::{self, FamilyKind, StabilityOutput, StudyOutput, VerifyOutput};
use fde_cli::config::ProblemRef;
use fde_cli::{exit, parse_config, CliError, OutputFormat, ProblemConfig};
use hahn_fde::mnc::PerturbationShape;
use hahn_fde::{SolveReport, WeightSequence};

fn fde() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fde"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn config(text: &str) -> ProblemConfig {
    parse_config(text).unwrap()
}

#[test]
fn minimal_config_uses_registry_defaults() {
    let c = config(r#"{ "problem": "example72" }"#);
    let p = c.parameters().unwrap();
    assert_eq!((p.beta, p.mu, p.rho), (0.2, 0.5, 1.0 / 6.0));
    assert_eq!((c.n, c.m, c.tol, c.max_iter), (20, 256, 1e-10, 200));
    assert_eq!(c.weights, WeightSequence::Linear);
    let spec = c.spec().unwrap();
    assert_eq!(spec.components(), 20);
    assert_eq!(spec.rhs().key(), "example72");
}

#[test]
fn inline_problem_and_weights() {
    let c = config(
        r#"{ "problem": { "key": "constant", "params": { "value": 2.5 } },
             "weights": { "kind": "power", "p": 1.5 }, "n": 3, "m": 16, "output": "csv" }"#,
    );
    assert_eq!(c.problem.key(), "constant");
    assert_eq!(c.weights, WeightSequence::Power(1.5));
    assert_eq!((c.n, c.m), (3, 16));
    assert_eq!(c.output, Some(OutputFormat::Csv));
    let phi = c.spec().unwrap().rhs().eval(0, 0.3, &[0.0; 3]);
    assert_eq!(phi, 2.5);
}

fn config_error(text: &str) -> (String, String) {
    match parse_config(text) {
        Err(CliError::Config { path, message }) => (path, message),
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn config_errors_name_the_field() {
    let (path, msg) = config_error(r#"{ "problem": "example72", "rho": 2 }"#);
    assert_eq!(path, "rho");
    assert!(msg.contains("(0, 1)"));
    assert_eq!(config_error(r#"{ "problem": "example72", "beta": 1.5 }"#).0, "beta");
    assert_eq!(config_error(r#"{ "problem": "example72", "N": 0 }"#).0, "N");
    assert_eq!(config_error(r#"{ "problem": "example72", "tol": -1 }"#).0, "tol");
    assert_eq!(config_error(r#"{ "problem": "nope" }"#).0, "problem");
    let (path, msg) = config_error(r#"{ "problem": "example72", "colour": 1 }"#);
    assert!(msg.contains("colour"), "{path}: {msg}");
    let (path, _) = config_error(r#"{ "problem": "example72", "weights": { "kind": "power", "q": 1 } }"#);
    assert!(path.starts_with("weights"), "{path}");
    let (path, _) = config_error(r#"{ "problem": "example72", "N": "many" }"#);
    assert_eq!(path, "N");
    assert_eq!(
        config_error(r#"{ "problem": { "key": "zero", "params": { "value": 1 } } }"#).0,
        "problem.params.value"
    );
}

#[test]
fn singular_parameters_rejected() {
    let err = parse_config(r#"{ "problem": "zero", "mu": 8.0, "rho": 0.5 }"#).unwrap_err();
    assert!(matches!(
        err,
        CliError::Core(hahn_fde::Error::SingularParameters { .. })
    ));
    assert_eq!(err.exit_code(), exit::SINGULAR);
}

#[test]
fn verify_reports_and_advises() {
    let out = commands::verify(&ProblemConfig::for_problem("example72")).unwrap();
    assert!((out.report.product_signed - 0.016).abs() <= 1e-3);
    assert!(out.report.exists_flag);

    let out = commands::verify(&ProblemConfig::for_problem("example71")).unwrap();
    assert!((out.report.product_signed - 0.019_088_688_546_770_86).abs() < 1e-12);
    assert!(out.advisories.iter().any(|a| a.contains("0.370")));

    let mut c = ProblemConfig::for_problem("zero");
    c.mu = Some(0.0);
    let out = commands::verify(&c).unwrap();
    assert_eq!(out.report.product_signed, 0.0);
    let em = commands::emit_verify(&out, OutputFormat::Json).unwrap();
    assert_eq!(em.exit, exit::OK);
}

#[test]
fn json_reports_round_trip_bitwise() {
    let verify = commands::verify(&ProblemConfig::for_problem("example71")).unwrap();
    let text = commands::emit_verify(&verify, OutputFormat::Json).unwrap().body;
    let back: VerifyOutput = serde_json::from_str(&text).unwrap();
    assert_eq!(back, verify);

    let mut c = ProblemConfig::for_problem("example72");
    c.n = 4;
    c.m = 64;
    let solve = commands::solve(&c).unwrap();
    let text = commands::emit_solve(&solve, OutputFormat::Json).unwrap().body;
    let back: SolveReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, solve);
    for (a, b) in back.solution.values().iter().zip(solve.solution.values()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }

    let stab = commands::stability(&c, 1e-3, PerturbationShape::Sine).unwrap();
    let text = commands::emit_stability(&stab, OutputFormat::Json).unwrap().body;
    assert_eq!(serde_json::from_str::<StabilityOutput>(&text).unwrap(), stab);

    let study = commands::study(&c, Some(&[2, 4]), Some(&[32, 64])).unwrap();
    let text = commands::emit_study(&study, OutputFormat::Json).unwrap().body;
    assert_eq!(serde_json::from_str::<StudyOutput>(&text).unwrap(), study);

    let text = serde_json::to_string(&c).unwrap();
    assert_eq!(parse_config(&text).unwrap(), c);
}

#[test]
fn csv_solution_round_trips() {
    let mut c = ProblemConfig::for_problem("example72");
    c.n = 3;
    c.m = 32;
    let solve = commands::solve(&c).unwrap();
    let text = commands::solution_csv(&solve.solution).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["xi", "m_1", "m_2", "m_3"]);
    for (j, row) in reader.records().enumerate() {
        let row = row.unwrap();
        assert_eq!(row[0].parse::<f64>().unwrap(), j as f64 / 32.0);
        for i in 0..3 {
            assert_eq!(
                row[i + 1].parse::<f64>().unwrap().to_bits(),
                solve.solution.get(i, j).to_bits()
            );
        }
    }
}

#[test]
fn example72_solve_golden() {
    let solve = commands::solve(&ProblemConfig::for_problem("example72")).unwrap();
    assert!(solve.converged);
    assert_eq!(solve.iterations, 17);
    assert!(solve.final_residual <= 2e-10);
}

#[test]
fn manufactured_solve_and_study() {
    let c = config(r#"{ "problem": "manufactured", "beta": 0.25, "mu": 1.0, "rho": 0.375, "N": 2, "M": 512 }"#);
    let solve = commands::solve(&c).unwrap();
    let exact = |x: f64| {
        let (mu, rho): (f64, f64) = (1.0, 0.375);
        let cc = (1.0 - mu * rho.powi(3) / 3.0) / (1.0 - mu * rho * rho / 2.0);
        x * x - cc * x
    };
    let err = (0..=512)
        .map(|j| (solve.solution.get(1, j) - exact(j as f64 / 512.0)).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1e-4, "{err}");

    let c = config(r#"{ "problem": "manufactured", "N": 1 }"#);
    let study = commands::study(&c, None, Some(&[64, 128, 256])).unwrap();
    let rows = study.refinement.unwrap();
    let beta = c.parameters().unwrap().beta;
    for row in &rows[1..] {
        assert!(row.order_end.unwrap() >= 1.0 + beta - 0.2);
        // sup error is dominated by the first node and is first order
        assert!((row.order_sup.unwrap() - 1.0).abs() < 0.05);
        assert!(row.delta_previous.unwrap() > 0.0);
    }
}

#[test]
fn mnc_command() {
    let c = ProblemConfig::for_problem("example72");
    let out = commands::mnc(&c, FamilyKind::UnitSphere, 40, 50).unwrap();
    assert_eq!(out.estimate.limit_estimate, 1.0);
    assert!(out.estimate.tail_sup.iter().all(|&t| (t - 1.0).abs() <= 1e-12));
    assert!(out.estimate.is_lower_bound);

    let mut small = c.clone();
    small.n = 5;
    small.m = 32;
    let out = commands::mnc(&small, FamilyKind::Solution, 6, 0).unwrap();
    assert_eq!(out.members, 33);
    assert_eq!(out.estimate.limit_estimate, 0.0);
}

#[test]
fn binary_exit_codes_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = write_config(d, "ok.json", r#"{ "problem": "example72", "N": 4, "M": 64 }"#);
    let zero = write_config(d, "zero.json", r#"{ "problem": "zero", "N": 2, "M": 8 }"#);
    let bad = write_config(d, "bad.json", r#"{ "problem": "example72", "rho": 2 }"#);
    let singular = write_config(d, "singular.json", r#"{ "problem": "zero", "mu": 8.0, "rho": 0.5 }"#);
    let diverging = write_config(
        d,
        "div.json",
        r#"{ "problem": "example71", "mu": 7.999, "rho": 0.5, "N": 1, "M": 16, "init": 1.0 }"#,
    );
    let unstable = write_config(
        d,
        "unstable.json",
        r#"{ "problem": "example72", "mu": 7.99, "rho": 0.5, "M": 64 }"#,
    );

    let out = fde().args(["verify", "--config"]).arg(&ok).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: VerifyOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.report.exists_flag);

    let out = fde().args(["solve", "--config"]).arg(&zero).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("xi,m_1,m_2"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    for row in rows {
        assert!(row.split(',').skip(1).all(|v| v == "0.0"));
    }

    let target = d.join("report.json");
    let out = fde()
        .args(["solve", "--output", "json", "--config"])
        .arg(&ok)
        .arg("--out")
        .arg(&target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: SolveReport = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert!(report.converged);

    let out = fde().args(["verify", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rho"));

    let out = fde().args(["verify", "--config"]).arg(&singular).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::SINGULAR));

    let out = fde().args(["solve", "--config"]).arg(&diverging).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::DIVERGENCE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("residual history"));

    let out = fde().args(["stability", "--config"]).arg(&unstable).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::STABILITY));

    let out = fde()
        .args(["verify", "--config"])
        .arg(d.join("missing.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(exit::NOT_MET));

    let out = fde()
        .args(["study", "--Ms", "16,32", "--output", "csv", "--config"])
        .arg(&ok)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("M,rho_effective"));
}

#[test]
fn problem_ref_serializes_as_written() {
    let c = config(r#"{ "problem": "zero" }"#);
    assert_eq!(c.problem, ProblemRef::Key("zero".into()));
    assert!(serde_json::to_string(&c).unwrap().contains(r#""problem":"zero""#));
}
