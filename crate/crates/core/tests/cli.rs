use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_weakdamp");

fn weakdamp(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(cwd).output().expect("binary runs")
}

fn read(dir: &Path, file: &str) -> Vec<u8> {
    std::fs::read(dir.join(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

const ARTIFACTS: [&str; 9] = [
    "trajectory.csv",
    "verdicts.csv",
    "fits.csv",
    "kernels.csv",
    "certifications.csv",
    "envelope.svg",
    "normalized.svg",
    "fit.svg",
    "report.json",
];

#[test]
fn list_scenarios_names_the_registry() {
    let tmp = tempfile::tempdir().unwrap();
    let out = weakdamp(&["list-scenarios"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["bessel-unforced", "power-decay", "resonant-counterexample"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn run_writes_every_artifact_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "# small copy of the power-decay scenario\n[scenario]\nname=small\nfamily=power:a=1,b=1\nforcing=powerdecay:g=2\nomega=2\n[integration]\nhorizon=400\n";
    std::fs::write(tmp.path().join("small.cfg"), cfg).unwrap();
    for dir in ["a", "b"] {
        let out = weakdamp(&["run", "small.cfg", "--out", dir], tmp.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ARTIFACTS {
        let a = read(&tmp.path().join("a"), file);
        assert!(!a.is_empty(), "{file}");
        assert_eq!(a, read(&tmp.path().join("b"), file), "{file} differs between runs");
    }
    let report: serde_json::Value =
        serde_json::from_slice(&read(&tmp.path().join("a"), "report.json")).unwrap();
    assert_eq!(report["config"]["name"], "small");
    assert_eq!(report["artifacts"].as_array().unwrap().len(), ARTIFACTS.len());
    for cert in report["certifications"].as_array().unwrap() {
        assert!(!cert["anchor"].as_str().unwrap().is_empty());
        assert_eq!(cert["passed"], true, "{cert}");
    }
    let svg = String::from_utf8(read(&tmp.path().join("a"), "envelope.svg")).unwrap();
    assert!(svg.contains(r#"version="1.1""#) && svg.contains(r#"width="960""#) && svg.contains(r#"height="480""#));
    assert!(!svg.contains("NaN"));
}

#[test]
fn default_output_directory_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let out = weakdamp(&["run", "bessel-unforced", "--horizon", "300", "--tol", "1e-9"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&read(&tmp.path().join("out/bessel-unforced"), "report.json")).unwrap();
    assert_eq!(report["config"]["horizon"], 300.0);
    assert_eq!(report["config"]["tol"], 1e-9);
}

#[test]
fn config_errors_exit_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("bad.cfg"), "name=x\nfamily=bessel\nomega=abc\n").unwrap();
    let out = weakdamp(&["run", "bad.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("omega"), "{err}");

    let out = weakdamp(&["run", "no-such-scenario"], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    let out = weakdamp(&["run", "power-decay", "--tol", "1e-2"], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    let out = weakdamp(&["run", "power-decay", "--horizon", "5"], tmp.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn numerical_abort_exits_with_four() {
    // constant damping has a non-integrable residual potential
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("const.cfg"),
        "name=const\nfamily=const:c=0.01\nomega=1\nweighted=false\n",
    )
    .unwrap();
    let out = weakdamp(&["run", "const.cfg"], tmp.path());
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn certify_runs_only_certifications() {
    let tmp = tempfile::tempdir().unwrap();
    let out = weakdamp(&["certify", "power-decay"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("gronwall") && text.contains("c-norm"));
    assert!(!text.contains("filter-y1"));
    assert!(!tmp.path().join("out").exists());
}
